#include "promptsel/tuner.hpp"

#include <spdlog/spdlog.h>

#include <cmath>
#include <iomanip>
#include <ostream>

#include "promptsel/error.hpp"
#include "promptsel/parallel.hpp"

namespace promptsel {

std::vector<Weights> simplex_grid(double step) {
  if (!(step > 0.0 && step <= 1.0)) throw Error(ErrorKind::config, "grid step must be in (0, 1]");
  const double divisions = 1.0 / step;
  const auto n = static_cast<long>(std::llround(divisions));
  if (n < 1 || std::abs(divisions - static_cast<double>(n)) > 1e-9 * divisions) {
    throw Error(ErrorKind::config, "grid step " + std::to_string(step) + " does not divide 1");
  }
  const double den = static_cast<double>(n);
  std::vector<Weights> grid;
  grid.reserve(static_cast<std::size_t>((n + 1) * (n + 2) / 2));
  for (long i = n; i >= 0; --i) {
    for (long j = n - i; j >= 0; --j) {
      const long k = n - i - j;
      grid.push_back({static_cast<double>(i) / den, static_cast<double>(j) / den,
                      static_cast<double>(k) / den});
    }
  }
  return grid;
}

TuneResult grid_search(const CorpusSplit& dev, std::span<const EmbeddingVector> dev_embeddings,
                       const CandidatePool& pool, CompletionClient& client,
                       const TuneOptions& options) {
  const auto grid = simplex_grid(options.step);
  TuneResult result;
  result.table.resize(grid.size());

  parallel_for(grid.size(), options.grid_jobs, [&](std::size_t g) {
    auto& point = result.table[g];
    point.weights = grid[g];
    RunOptions run = options.run;
    run.strategy = Strategy::cp;
    run.selection.weights = grid[g];
    run.resume = nullptr;
    run.on_prompt = nullptr;
    try {
      const auto predictions = run_task(dev, dev_embeddings, pool, client, run);
      if (!predictions.failures.empty()) {
        point.error = std::to_string(predictions.failures.size()) + " sentences failed: " +
                      predictions.failures.front().message;
        return;
      }
      point.metric = evaluate(predictions, dev).headline();
    } catch (const std::exception& e) {
      point.error = e.what();
    }
  });

  const GridPoint* best = nullptr;
  for (const auto& point : result.table) {
    if (!point.metric) {
      spdlog::warn("grid point ({}, {}, {}) missing: {}", point.weights.length,
                   point.weights.entropy, point.weights.similarity, point.error);
      continue;
    }
    if (!best) {
      best = &point;
      continue;
    }
    const auto& w = point.weights;
    const auto& bw = best->weights;
    if (*point.metric > *best->metric ||
        (*point.metric == *best->metric &&
         (w.similarity > bw.similarity || (w.similarity == bw.similarity && w.entropy > bw.entropy)))) {
      best = &point;
    }
  }
  if (!best) throw Error(ErrorKind::config, "every grid point failed");
  result.best = best->weights;
  result.best_metric = *best->metric;
  return result;
}

void write_tuning_csv(const TuneResult& result, std::ostream& out) {
  const auto flags = out.flags();
  const auto precision = out.precision();
  out << std::setprecision(10);
  out << "w1,w2,w3,metric\n";
  for (const auto& point : result.table) {
    const auto& w = point.weights;
    out << w.length << ',' << w.entropy << ',' << w.similarity << ',';
    if (point.metric) out << *point.metric;
    out << '\n';
  }
  out << "# best," << result.best.length << ',' << result.best.entropy << ','
      << result.best.similarity << ',' << result.best_metric << '\n';
  out.flags(flags);
  out.precision(precision);
}

}  // namespace promptsel
