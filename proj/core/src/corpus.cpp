#include "promptsel/corpus.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <fstream>
#include <nlohmann/json.hpp>
#include <numeric>
#include <ostream>
#include <sstream>

#include "promptsel/error.hpp"
#include "promptsel/hashing.hpp"

namespace promptsel {

std::string TaggedSentence::text() const {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

std::string_view to_string(SplitName name) noexcept {
  switch (name) {
    case SplitName::train: return "train";
    case SplitName::dev: return "dev";
    case SplitName::test: return "test";
  }
  return "?";
}

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' || c == '\f'; }

bool is_blank(std::string_view line) {
  return std::all_of(line.begin(), line.end(), is_space);
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

std::vector<std::string> split_fields(std::string_view line) {
  std::vector<std::string> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    std::size_t j = i;
    while (j < line.size() && !is_space(line[j])) ++j;
    if (j > i) fields.emplace_back(line.substr(i, j - i));
    i = j;
  }
  return fields;
}

std::vector<std::string> split_tabs(std::string_view line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    std::size_t end = line.find('\t', start);
    if (end == std::string_view::npos) {
      fields.emplace_back(line.substr(start));
      return fields;
    }
    fields.emplace_back(line.substr(start, end - start));
    start = end + 1;
  }
}

std::string line_ref(std::size_t line_no) { return "line " + std::to_string(line_no); }

void check_token(const std::string& token, const std::string& where) {
  if (token.find('_') != std::string::npos) {
    throw Error(ErrorKind::scheme_violation,
                where + ": token '" + token +
                    "' contains '_', which is the prompt token/label delimiter");
  }
  if (std::any_of(token.begin(), token.end(), is_space)) {
    throw Error(ErrorKind::scheme_violation,
                where + ": token '" + token + "' contains whitespace");
  }
}

void check_label(const LabelScheme& scheme, const std::string& label, std::size_t line_no) {
  if (!scheme.contains(label)) {
    throw Error(ErrorKind::scheme_violation,
                line_ref(line_no) + ": label '" + label + "' is not in the " +
                    std::string(to_string(scheme.task())) + " scheme");
  }
}

// Applies the BIO policy; returns false if the sentence is rejected.
bool apply_bio_policy(const LabelScheme& scheme, BioPolicy policy, TaggedSentence& s,
                      IngestLog& log) {
  if (scheme.kind() != SchemeKind::bio) return true;
  const auto bad = find_bio_violations(s.labels);
  if (bad.empty()) return true;
  if (policy == BioPolicy::reject) {
    ++log.rejected_sentences;
    return false;
  }
  log.repaired_transitions += repair_bio(s.labels);
  return true;
}

void finish_log(const IngestLog& log, std::string_view what) {
  if (log.repaired_transitions) {
    spdlog::info("{}: repaired {} invalid I-X transitions", what, log.repaired_transitions);
  }
  if (log.rejected_sentences) {
    spdlog::warn("{}: rejected {} sentences with invalid BIO transitions", what,
                 log.rejected_sentences);
  }
}

}  // namespace

CorpusSplit::CorpusSplit(SplitName name, LabelScheme scheme, std::vector<TaggedSentence> sentences)
    : name_(name), scheme_(std::move(scheme)), sentences_(std::move(sentences)) {
  for (std::size_t i = 0; i < sentences_.size(); ++i) {
    const auto& s = sentences_[i];
    if (s.id != i) {
      throw Error(ErrorKind::integrity, "sentence ids must be dense: expected " + std::to_string(i) +
                                            ", found " + std::to_string(s.id));
    }
    if (s.tokens.empty() || s.tokens.size() != s.labels.size()) {
      throw Error(ErrorKind::integrity, "sentence " + std::to_string(i) +
                                            " must have equal, nonzero token and label counts");
    }
    for (const auto& token : s.tokens) {
      if (token.empty()) throw Error(ErrorKind::integrity, "sentence " + std::to_string(i) + " has an empty token");
    }
    for (const auto& label : s.labels) {
      if (!scheme_.contains(label)) {
        throw Error(ErrorKind::scheme_violation, "sentence " + std::to_string(i) + ": label '" +
                                                     label + "' is not in the scheme");
      }
    }
  }
}

std::size_t CorpusSplit::token_count() const noexcept {
  std::size_t n = 0;
  for (const auto& s : sentences_) n += s.size();
  return n;
}

CorpusSplit parse_conll(std::string_view text, const LabelScheme& scheme,
                        const ConllOptions& options, IngestLog* log_out) {
  IngestLog log;
  std::vector<TaggedSentence> sentences;
  std::optional<std::size_t> columns;
  std::optional<char> separator;
  std::size_t blocks = 0;

  TaggedSentence current;
  SourceLayout layout;
  bool in_docstart = false;
  std::vector<std::size_t> label_lines;

  auto flush = [&] {
    if (in_docstart) {
      ++log.skipped_documents;
    } else if (!current.tokens.empty()) {
      current.source_index = blocks++;
      current.layout = std::move(layout);
      if (apply_bio_policy(scheme, options.bio_policy, current, log)) {
        current.id = sentences.size();
        sentences.push_back(std::move(current));
      }
    }
    current = TaggedSentence{};
    layout = SourceLayout{};
    in_docstart = false;
  };

  const auto lines = split_lines(text);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    const std::string_view line = lines[n];
    const std::size_t line_no = n + 1;
    if (is_blank(line)) {
      flush();
      continue;
    }
    auto fields = split_fields(line);
    if (fields.front() == "-DOCSTART-") {
      in_docstart = true;
      continue;
    }
    if (in_docstart) continue;
    if (!columns) {
      columns = fields.size();
      separator = line.find('\t') != std::string_view::npos ? '\t' : ' ';
      if (*columns <= options.tag_column || *columns < 2) {
        throw Error(ErrorKind::parse, line_ref(line_no) + ": " + std::to_string(*columns) +
                                          " columns, tag column " +
                                          std::to_string(options.tag_column) + " out of range");
      }
    }
    if (fields.size() != *columns) {
      throw Error(ErrorKind::parse, line_ref(line_no) + ": expected " + std::to_string(*columns) +
                                        " columns, found " + std::to_string(fields.size()));
    }
    check_token(fields[0], line_ref(line_no));
    check_label(scheme, fields[options.tag_column], line_no);
    current.tokens.push_back(fields[0]);
    current.labels.push_back(fields[options.tag_column]);
    layout.rows.push_back(std::move(fields));
  }
  flush();
  finish_log(log, "conll");
  if (log_out) *log_out = log;

  CorpusSplit split(options.split, scheme, std::move(sentences));
  split.format = SourceFormat::conll;
  split.tag_column = options.tag_column;
  split.separator = separator.value_or(' ');
  return split;
}

CorpusSplit parse_conllu(std::string_view text, const LabelScheme& scheme, SplitName split_name,
                         IngestLog* log_out) {
  constexpr std::size_t kFormColumn = 1;
  constexpr std::size_t kUposColumn = 3;
  IngestLog log;
  std::vector<TaggedSentence> sentences;
  std::size_t blocks = 0;
  TaggedSentence current;
  SourceLayout layout;

  auto flush = [&] {
    if (!current.tokens.empty()) {
      current.source_index = blocks++;
      current.layout = std::move(layout);
      current.id = sentences.size();
      sentences.push_back(std::move(current));
    }
    current = TaggedSentence{};
    layout = SourceLayout{};
  };

  const auto lines = split_lines(text);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    const std::string_view line = lines[n];
    const std::size_t line_no = n + 1;
    if (is_blank(line)) {
      flush();
      continue;
    }
    if (line.front() == '#') {
      layout.passthrough.emplace_back(current.tokens.size(), std::string(line));
      continue;
    }
    auto fields = split_tabs(line);
    if (fields.size() != 10) {
      throw Error(ErrorKind::parse, line_ref(line_no) + ": expected 10 tab-separated columns, found " +
                                        std::to_string(fields.size()));
    }
    const std::string& id = fields[0];
    if (id.find('-') != std::string::npos || id.find('.') != std::string::npos) {
      ++log.skipped_nodes;
      layout.passthrough.emplace_back(current.tokens.size(), std::string(line));
      continue;
    }
    const std::string& upos = fields[kUposColumn];
    if (upos == "_") {
      throw Error(ErrorKind::scheme_violation,
                  line_ref(line_no) + ": word '" + fields[kFormColumn] + "' has no UPOS tag");
    }
    check_token(fields[kFormColumn], line_ref(line_no));
    check_label(scheme, upos, line_no);
    current.tokens.push_back(fields[kFormColumn]);
    current.labels.push_back(upos);
    layout.rows.push_back(std::move(fields));
  }
  flush();
  if (log_out) *log_out = log;

  CorpusSplit split(split_name, scheme, std::move(sentences));
  split.format = SourceFormat::conllu;
  split.tag_column = kUposColumn;
  split.separator = '\t';
  return split;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::parse, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

CorpusSplit sample_test_subset(const CorpusSplit& split, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw Error(ErrorKind::config, "sample size must be at least 1");
  const std::size_t total = split.size();
  std::vector<std::size_t> picked(total);
  std::iota(picked.begin(), picked.end(), std::size_t{0});
  if (n >= total) {
    if (n > total) {
      spdlog::warn("requested {} test sentences but the split has only {}; using all", n, total);
    }
  } else {
    // Partial Fisher-Yates over the first n slots.
    SplitMix64 rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = i + rng.below(total - i);
      std::swap(picked[i], picked[j]);
    }
    picked.resize(n);
    std::sort(picked.begin(), picked.end());
  }
  std::vector<TaggedSentence> out;
  out.reserve(picked.size());
  for (std::size_t idx : picked) {
    TaggedSentence s = split[idx];
    s.id = out.size();
    out.push_back(std::move(s));
  }
  CorpusSplit result(split.name(), split.scheme(), std::move(out));
  result.format = split.format;
  result.tag_column = split.tag_column;
  result.separator = split.separator;
  return result;
}

std::string serialize(const CorpusSplit& split) {
  std::string out;
  const char sep = split.separator;
  auto write_row = [&](const std::vector<std::string>& row) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out.push_back(sep);
      out += row[c];
    }
    out.push_back('\n');
  };
  for (const auto& s : split.sentences()) {
    if (s.layout) {
      const auto& layout = *s.layout;
      std::size_t pass = 0;
      for (std::size_t r = 0; r <= layout.rows.size(); ++r) {
        while (pass < layout.passthrough.size() && layout.passthrough[pass].first == r) {
          out += layout.passthrough[pass].second;
          out.push_back('\n');
          ++pass;
        }
        if (r == layout.rows.size()) break;
        auto row = layout.rows[r];
        row.at(split.tag_column) = s.labels[r];
        write_row(row);
      }
    } else {
      for (std::size_t i = 0; i < s.size(); ++i) write_row({s.tokens[i], s.labels[i]});
    }
    out.push_back('\n');
  }
  return out;
}

void write_jsonl(const CorpusSplit& split, std::ostream& out) {
  for (const auto& s : split.sentences()) {
    nlohmann::json j{{"id", s.id}, {"tokens", s.tokens}, {"labels", s.labels}};
    out << j.dump() << '\n';
  }
}

CorpusSplit make_split(
    SplitName name, const LabelScheme& scheme,
    std::vector<std::pair<std::vector<std::string>, std::vector<std::string>>> rows) {
  std::vector<TaggedSentence> sentences;
  sentences.reserve(rows.size());
  for (auto& [tokens, labels] : rows) {
    TaggedSentence s;
    s.id = sentences.size();
    s.source_index = s.id;
    for (const auto& t : tokens) check_token(t, "sentence " + std::to_string(s.id));
    s.tokens = std::move(tokens);
    s.labels = std::move(labels);
    sentences.push_back(std::move(s));
  }
  return CorpusSplit(name, scheme, std::move(sentences));
}

}  // namespace promptsel
