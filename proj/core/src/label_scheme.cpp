#include "promptsel/label_scheme.hpp"

#include <unordered_set>

#include "promptsel/error.hpp"

namespace promptsel {

std::string_view to_string(Task task) noexcept {
  switch (task) {
    case Task::ner: return "ner";
    case Task::chunk: return "chunk";
    case Task::pos: return "pos";
  }
  return "?";
}

Task parse_task(std::string_view name) {
  if (name == "ner") return Task::ner;
  if (name == "chunk") return Task::chunk;
  if (name == "pos") return Task::pos;
  throw Error(ErrorKind::config,
              "unknown task '" + std::string(name) + "' (expected ner, chunk or pos)");
}

namespace {

bool has_bio_prefix(std::string_view label) {
  return label.size() > 2 && (label[0] == 'B' || label[0] == 'I') && label[1] == '-';
}

std::vector<std::string> bio_labels(std::initializer_list<const char*> types) {
  std::vector<std::string> out{"O"};
  for (const char* type : types) {
    out.push_back(std::string("B-") + type);
    out.push_back(std::string("I-") + type);
  }
  return out;
}

}  // namespace

LabelScheme::LabelScheme(Task task, std::vector<std::string> labels, SchemeKind kind)
    : task_(task), kind_(kind), labels_(std::move(labels)) {
  if (labels_.empty()) throw Error(ErrorKind::config, "label scheme is empty");
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i].empty()) throw Error(ErrorKind::config, "label scheme contains an empty label");
    if (!index_.emplace(labels_[i], i).second) {
      throw Error(ErrorKind::config, "duplicate label '" + labels_[i] + "' in scheme");
    }
  }
  if (kind_ == SchemeKind::bio) {
    if (!index_.contains("O")) throw Error(ErrorKind::config, "BIO scheme lacks the 'O' label");
    for (const auto& label : labels_) {
      if (label != "O" && !has_bio_prefix(label)) {
        throw Error(ErrorKind::config, "label '" + label + "' is not O, B-X or I-X");
      }
    }
    fallback_ = "O";
  } else {
    fallback_ = index_.contains("NOUN") ? std::string("NOUN") : labels_.front();
  }
}

LabelScheme LabelScheme::conll2003_ner() {
  return {Task::ner, bio_labels({"PER", "ORG", "LOC", "MISC"}), SchemeKind::bio};
}

LabelScheme LabelScheme::conll2000_chunk() {
  return {Task::chunk,
          bio_labels({"NP", "VP", "PP", "ADVP", "ADJP", "SBAR", "PRT", "CONJP", "INTJ",
                      "LST", "UCP"}),
          SchemeKind::bio};
}

LabelScheme LabelScheme::ud_upos() {
  return {Task::pos,
          {"ADJ", "ADP", "ADV", "AUX", "CCONJ", "DET", "INTJ", "NOUN", "NUM", "PART",
           "PRON", "PROPN", "PUNCT", "SCONJ", "SYM", "VERB", "X"},
          SchemeKind::flat};
}

LabelScheme LabelScheme::for_task(Task task) {
  switch (task) {
    case Task::ner: return conll2003_ner();
    case Task::chunk: return conll2000_chunk();
    case Task::pos: return ud_upos();
  }
  throw Error(ErrorKind::config, "unknown task");
}

bool LabelScheme::contains(std::string_view label) const {
  return index_.find(std::string(label)) != index_.end();
}

std::optional<std::size_t> LabelScheme::index_of(std::string_view label) const {
  auto it = index_.find(std::string(label));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::string_view bio_type(std::string_view label) noexcept {
  return has_bio_prefix(label) ? label.substr(2) : std::string_view{};
}

std::vector<std::size_t> find_bio_violations(std::span<const std::string> labels) {
  std::vector<std::size_t> out;
  std::string_view prev = "O";
  for (std::size_t i = 0; i < labels.size(); ++i) {
    std::string_view cur = labels[i];
    if (cur.starts_with("I-")) {
      const bool continues = has_bio_prefix(prev) && bio_type(prev) == bio_type(cur);
      if (!continues) out.push_back(i);
    }
    prev = cur;
  }
  return out;
}

std::size_t repair_bio(std::vector<std::string>& labels) {
  const auto bad = find_bio_violations(labels);
  for (std::size_t i : bad) labels[i][0] = 'B';
  return bad.size();
}

}  // namespace promptsel
