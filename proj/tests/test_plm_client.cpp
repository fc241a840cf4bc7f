#include <doctest.h>

#include <promptsel/error.hpp>
#include <promptsel/hashing.hpp>
#include <promptsel/plm_client.hpp>
#include <promptsel/prompting.hpp>

#include <chrono>
#include <cmath>

#include "support/http_fixture.hpp"
#include "support/synthetic.hpp"

using namespace promptsel;

namespace {

CorpusSplit tiny_gold() {
  return make_split(SplitName::test, LabelScheme::conll2003_ner(),
                    {{{"Peter", "Blackburn", "visited", "Brussels"}, {"B-PER", "I-PER", "O", "B-LOC"}}});
}

CorpusSplit tiny_train() {
  return make_split(SplitName::train, LabelScheme::conll2003_ner(),
                    {{{"Peter", "left", "Brussels"}, {"B-PER", "O", "B-LOC"}},
                     {{"Brussels", "said"}, {"B-ORG", "O"}}});
}

std::string prompt_for(const CorpusSplit& train, const CorpusSplit& gold, const std::string& progress) {
  return render_prompt(train.sentences(), gold[0], Task::ner).text + progress;
}

class EchoClient final : public CompletionClient {
 public:
  CompletionResponse complete(const CompletionRequest& req) override {
    return {"B-PER extra words", std::to_string(req.max_tokens)};
  }
};

}  // namespace

TEST_CASE("request canonical form and hash") {
  CompletionRequest req;
  req.prompt = "Context: a\nTagged:";
  req.stop = {" ", "\n"};
  CHECK(request_json(req) ==
        R"({"max_tokens":8,"prompt":"Context: a\nTagged:","stop":[" ","\n"],"temperature":0.0})");
  CHECK(request_hash(req) == sha256_hex(request_json(req)));
  CompletionRequest other = req;
  other.max_tokens = 4;
  CHECK(request_hash(other) != request_hash(req));
}

TEST_CASE("truncate to max_tokens units") {
  CHECK(truncate_units("B-PER I-PER O", 1) == "B-PER");
  CHECK(truncate_units("B-PER I-PER O", 2) == "B-PER I-PER");
  CHECK(truncate_units("  NOUN", 1) == "  NOUN");
  CHECK(truncate_units("x", 0) == "");
}

TEST_CASE("rate limiter spaces out requests") {
  RateLimiter limiter(2, std::chrono::milliseconds(100));
  const auto start = std::chrono::steady_clock::now();
  for (int i = 0; i < 5; ++i) limiter.acquire();
  const auto elapsed = std::chrono::steady_clock::now() - start;
  CHECK(elapsed >= std::chrono::milliseconds(200));
  RateLimiter off(0, std::chrono::milliseconds(1000));
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < 100; ++i) off.acquire();
  CHECK(std::chrono::steady_clock::now() - t0 < std::chrono::milliseconds(100));
}

TEST_CASE("oracle answers the gold label of the pending token") {
  const auto gold = tiny_gold();
  const auto train = tiny_train();
  OracleClient oracle(gold);
  CompletionRequest req;
  req.prompt = prompt_for(train, gold, " Peter_");
  CHECK(oracle.complete(req).text == "B-PER");
  req.prompt = prompt_for(train, gold, " Peter_B-PER Blackburn_I-PER visited_O Brussels_");
  CHECK(oracle.complete(req).text == "B-LOC");
  req.prompt = prompt_for(train, gold, "\nPeter_B-PER Blackburn_");
  CHECK(oracle.complete(req).text == "I-PER");

  req.prompt = prompt_for(train, gold, " Paul_");
  CHECK_THROWS_AS(oracle.complete(req), Error);
  req.prompt = "nonsense";
  try {
    oracle.complete(req);
    FAIL("expected oracle error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::oracle);
  }
  CHECK_THROWS_AS(OracleClient(gold, 1.5), Error);
}

TEST_CASE("noisy oracle: always wrong at p=1, deterministic per prompt") {
  const auto gold = tiny_gold();
  const auto train = tiny_train();
  OracleClient always_wrong(gold, 1.0, 3);
  OracleClient again(gold, 1.0, 3);
  CompletionRequest req;
  req.prompt = prompt_for(train, gold, " Peter_");
  const auto a = always_wrong.complete(req).text;
  CHECK(a != "B-PER");
  CHECK(LabelScheme::conll2003_ner().contains(a));
  CHECK(again.complete(req).text == a);
}

TEST_CASE("noisy oracle error rate") {
  // One query per token over a synthetic POS corpus; wrong answers should
  // occur at the configured rate. Binomial sd here is about 0.006.
  const auto gold = testing_support::random_pos_split(400, 8, SplitName::test);
  const auto train = testing_support::random_pos_split(3, 9);
  OracleClient noisy(gold, 0.2, 77);
  std::size_t wrong = 0, total = 0;
  for (const auto& s : gold.sentences()) {
    const auto base = render_prompt(train.sentences(), s, Task::pos).text;
    std::string progress;
    for (std::size_t i = 0; i < s.size(); ++i) {
      CompletionRequest req;
      req.prompt = base + progress + " " + s.tokens[i] + "_";
      const auto label = noisy.complete(req).text;
      wrong += label != s.labels[i];
      ++total;
      progress += " " + s.tokens[i] + "_" + s.labels[i];
    }
  }
  REQUIRE(total > 3000);
  const double rate = static_cast<double>(wrong) / static_cast<double>(total);
  CHECK(std::fabs(rate - 0.2) < 0.03);
}

TEST_CASE("demonstration lookup client") {
  const auto gold = tiny_gold();
  const auto train = tiny_train();
  DemonstrationLookupClient lookup(LabelScheme::conll2003_ner());
  CompletionRequest req;
  req.prompt = prompt_for(train, gold, " Peter_");
  CHECK(lookup.complete(req).text == "B-PER");
  // "Brussels" is B-LOC once and B-ORG once: the first seen wins.
  req.prompt = prompt_for(train, gold, " Peter_B-PER Blackburn_I-PER visited_O Brussels_");
  CHECK(lookup.complete(req).text == "B-LOC");
  req.prompt = prompt_for(train, gold, " Peter_B-PER Blackburn_");
  CHECK(lookup.complete(req).text == "O");
}

TEST_CASE("HTTP completion client: plain and chat protocols") {
  const auto gold = tiny_gold();
  const auto train = tiny_train();
  OracleClient oracle(gold);
  testing_support::LocalServer server(oracle);

  HttpClientOptions options;
  options.url = server.url("/complete");
  options.api_key = "k1";
  options.initial_backoff = std::chrono::milliseconds(1);
  HttpCompletionClient plain(options);
  CompletionRequest req;
  req.prompt = prompt_for(train, gold, " Peter_");
  req.stop = {" ", "\n"};
  CHECK(plain.complete(req).text == "B-PER");
  CHECK(server.last_authorization() == "Bearer k1");

  options.url = server.url("/v1/chat/completions");
  options.chat_wrap = true;
  options.model = "some-model";
  HttpCompletionClient chat(options);
  CHECK(chat.complete(req).text == "B-PER");

  server.fail_next(2, 429);
  CHECK(plain.complete(req).text == "B-PER");
  CHECK(server.requests() == 5);

  options.chat_wrap = false;
  options.url = server.url("/complete");
  options.max_retries = 2;
  HttpCompletionClient limited(options);
  server.fail_next(3, 500);
  try {
    limited.complete(req);
    FAIL("expected transport error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::transport);
  }
  server.fail_next(1, 401);
  try {
    limited.complete(req);
    FAIL("expected request error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::request);
    CHECK(std::string(e.what()).find("401") != std::string::npos);
  }
}

TEST_CASE("unreachable endpoint is a transport error") {
  HttpClientOptions options;
  options.url = "http://127.0.0.1:1/complete";
  options.max_retries = 1;
  options.initial_backoff = std::chrono::milliseconds(1);
  options.timeout = std::chrono::seconds(2);
  HttpCompletionClient client(options);
  try {
    client.complete({});
    FAIL("expected transport error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::transport);
  }
  CHECK_THROWS_AS(HttpCompletionClient(HttpClientOptions{}), Error);
}

TEST_CASE("record then replay") {
  const auto dir = testing_support::scratch_dir("plm-record");
  const std::string fixture = dir + "/fixture.jsonl";
  EchoClient echo;
  CompletionRequest a, b;
  a.prompt = "first";
  b.prompt = "second";
  b.max_tokens = 3;
  {
    RecordingClient rec(echo, fixture);
    CHECK(rec.complete(a).text == "B-PER extra words");
    rec.complete(b);
  }
  ReplayClient replay(fixture);
  CHECK(replay.size() == 2);
  CHECK(replay.complete(a).text == "B-PER extra words");
  CHECK(replay.complete(b).finish_reason == "3");
  CompletionRequest c;
  c.prompt = "third";
  try {
    replay.complete(c);
    FAIL("expected transport error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::transport);
  }
  CHECK_THROWS_AS(ReplayClient(dir + "/missing.jsonl"), Error);
}
