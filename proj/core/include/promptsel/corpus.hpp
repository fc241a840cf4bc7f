#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "promptsel/label_scheme.hpp"

namespace promptsel {

/// Source rows kept so a parsed block can be written back byte-for-byte.
struct SourceLayout {
  /// All columns of every token row, as read.
  std::vector<std::vector<std::string>> rows;
  /// Lines that are not token rows (comments, multiword ranges, empty nodes),
  /// each tagged with the index of the token row it precedes.
  std::vector<std::pair<std::size_t, std::string>> passthrough;
};

struct TaggedSentence {
  std::size_t id = 0;            // dense index within its split
  std::size_t source_index = 0;  // index in the file it was parsed from
  std::vector<std::string> tokens;
  std::vector<std::string> labels;
  std::optional<SourceLayout> layout;

  std::size_t size() const noexcept { return tokens.size(); }
  /// Tokens joined by single spaces.
  std::string text() const;
};

enum class SplitName { train, dev, test };
std::string_view to_string(SplitName name) noexcept;

enum class SourceFormat { conll, conllu };

/// An immutable collection of sentences under one label scheme.
class CorpusSplit {
 public:
  /// Validates sentence shape, dense ids and label membership.
  CorpusSplit(SplitName name, LabelScheme scheme, std::vector<TaggedSentence> sentences);

  SplitName name() const noexcept { return name_; }
  const LabelScheme& scheme() const noexcept { return scheme_; }
  std::span<const TaggedSentence> sentences() const noexcept { return sentences_; }
  const TaggedSentence& operator[](std::size_t id) const { return sentences_.at(id); }
  std::size_t size() const noexcept { return sentences_.size(); }
  bool empty() const noexcept { return sentences_.empty(); }
  std::size_t token_count() const noexcept;

  // Writing back in the source format.
  SourceFormat format = SourceFormat::conll;
  std::size_t tag_column = 1;
  char separator = ' ';

 private:
  SplitName name_;
  LabelScheme scheme_;
  std::vector<TaggedSentence> sentences_;
};

enum class BioPolicy { repair, reject };

struct ConllOptions {
  std::size_t tag_column = 3;  // CoNLL2003 NER; CoNLL2000 chunking uses 2
  BioPolicy bio_policy = BioPolicy::repair;
  SplitName split = SplitName::train;
};

struct IngestLog {
  std::size_t repaired_transitions = 0;
  std::size_t rejected_sentences = 0;
  std::size_t skipped_documents = 0;  // -DOCSTART- blocks
  std::size_t skipped_nodes = 0;      // CoNLL-U multiword ranges and empty nodes
};

/// Whitespace-columned, blank-line separated CoNLL blocks; the label is read
/// from `tag_column`. Throws Error(parse) with the line number for rows with
/// the wrong column count, Error(scheme_violation) for unknown labels and
/// tokens containing '_'.
CorpusSplit parse_conll(std::string_view text, const LabelScheme& scheme,
                        const ConllOptions& options = {}, IngestLog* log = nullptr);

/// CoNLL-U: FORM (column 2) and UPOS (column 4).
CorpusSplit parse_conllu(std::string_view text, const LabelScheme& scheme,
                         SplitName split = SplitName::train, IngestLog* log = nullptr);

/// Reads a whole file; Error(parse) if it cannot be opened.
std::string read_file(const std::string& path);

/// Deterministic pseudo-random subset of min(n, |split|) sentences, kept in
/// original order and re-indexed densely. `source_index` survives.
CorpusSplit sample_test_subset(const CorpusSplit& split, std::size_t n, std::uint64_t seed);

/// Writes the split back in its source format. Sentences without a layout
/// are written as "token<sep>label" rows.
std::string serialize(const CorpusSplit& split);

/// One {"id","tokens","labels"} object per line.
void write_jsonl(const CorpusSplit& split, std::ostream& out);

/// Builds a split from in-memory sentences, assigning dense ids.
CorpusSplit make_split(SplitName name, const LabelScheme& scheme,
                       std::vector<std::pair<std::vector<std::string>, std::vector<std::string>>> rows);

}  // namespace promptsel
