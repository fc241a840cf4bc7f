#include <doctest.h>

#include <promptsel/error.hpp>
#include <promptsel/label_scheme.hpp>

using namespace promptsel;

TEST_CASE("built-in schemes have the published sizes") {
  CHECK(LabelScheme::conll2003_ner().size() == 9);
  CHECK(LabelScheme::conll2000_chunk().size() == 23);
  CHECK(LabelScheme::ud_upos().size() == 17);
  CHECK(LabelScheme::conll2003_ner().kind() == SchemeKind::bio);
  CHECK(LabelScheme::ud_upos().kind() == SchemeKind::flat);
}

TEST_CASE("fallback labels") {
  CHECK(LabelScheme::conll2003_ner().fallback_label() == "O");
  CHECK(LabelScheme::conll2000_chunk().fallback_label() == "O");
  CHECK(LabelScheme::ud_upos().fallback_label() == "NOUN");
}

TEST_CASE("membership and index lookup") {
  const auto ner = LabelScheme::conll2003_ner();
  CHECK(ner.contains("B-MISC"));
  CHECK_FALSE(ner.contains("B-DATE"));
  CHECK_FALSE(ner.contains("b-misc"));
  REQUIRE(ner.index_of("O").has_value());
  CHECK(ner.labels()[*ner.index_of("I-LOC")] == "I-LOC");
  CHECK_FALSE(ner.index_of("NOUN").has_value());

  const auto chunk = LabelScheme::conll2000_chunk();
  for (const char* t : {"NP", "VP", "PP", "ADVP", "ADJP", "SBAR", "PRT", "CONJP", "INTJ", "LST", "UCP"}) {
    CHECK(chunk.contains(std::string("B-") + t));
    CHECK(chunk.contains(std::string("I-") + t));
  }
}

TEST_CASE("invalid scheme definitions are rejected") {
  CHECK_THROWS_AS(LabelScheme(Task::ner, {}, SchemeKind::bio), Error);
  CHECK_THROWS_AS(LabelScheme(Task::ner, {"O", "O"}, SchemeKind::bio), Error);
  CHECK_THROWS_AS(LabelScheme(Task::ner, {"O", "PER"}, SchemeKind::bio), Error);
  CHECK_NOTHROW(LabelScheme(Task::pos, {"X", "Y"}, SchemeKind::flat));
}

TEST_CASE("BIO violations and repair") {
  std::vector<std::string> labels{"I-ORG", "I-ORG", "O", "B-PER", "I-LOC", "I-LOC"};
  const auto bad = find_bio_violations(labels);
  REQUIRE(bad.size() == 2);
  CHECK(bad[0] == 0);
  CHECK(bad[1] == 4);
  CHECK(repair_bio(labels) == 2);
  CHECK(labels == std::vector<std::string>{"B-ORG", "I-ORG", "O", "B-PER", "B-LOC", "I-LOC"});
  CHECK(find_bio_violations(labels).empty());
}

TEST_CASE("bio_type") {
  CHECK(bio_type("B-ORG") == "ORG");
  CHECK(bio_type("I-MISC") == "MISC");
  CHECK(bio_type("O") == "");
  CHECK(bio_type("NOUN") == "");
}

TEST_CASE("task names") {
  CHECK(parse_task("ner") == Task::ner);
  CHECK(parse_task("chunk") == Task::chunk);
  CHECK(parse_task("pos") == Task::pos);
  CHECK(to_string(Task::chunk) == "chunk");
  CHECK_THROWS_AS(parse_task("srl"), Error);
}
