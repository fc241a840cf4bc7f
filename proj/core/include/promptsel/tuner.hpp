#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "promptsel/decoder.hpp"
#include "promptsel/evaluation.hpp"
#include "promptsel/scoring.hpp"

namespace promptsel {

/// All (w1, w2, w3) with w_i = n_i * step, n_i >= 0 and sum 1, enumerated
/// with w1 outermost. Throws Error(config) unless 1/step is a whole number.
std::vector<Weights> simplex_grid(double step);

struct GridPoint {
  Weights weights;
  std::optional<double> metric;  // empty when the run failed
  std::string error;
};

struct TuneResult {
  Weights best;
  double best_metric = 0.0;
  std::vector<GridPoint> table;
};

struct TuneOptions {
  double step = 0.05;
  /// Grid points evaluated concurrently. Each point decodes its own run with
  /// `run.jobs` threads.
  std::size_t grid_jobs = 1;
  RunOptions run;  // strategy is forced to cp; weights are overwritten per point
};

/// Runs select -> render -> decode -> evaluate on `dev` for every grid
/// point and returns the argmax. Ties prefer the larger w3, then the larger
/// w2. A point whose run loses any sentence is recorded as missing. Throws
/// Error(config) if every point failed.
TuneResult grid_search(const CorpusSplit& dev, std::span<const EmbeddingVector> dev_embeddings,
                       const CandidatePool& pool, CompletionClient& client,
                       const TuneOptions& options);

/// "w1,w2,w3,metric" rows (empty metric for failed points) and a final
/// "# best" line.
void write_tuning_csv(const TuneResult& result, std::ostream& out);

}  // namespace promptsel
