#include "promptsel/evaluation.hpp"

#include <algorithm>
#include <iomanip>
#include <nlohmann/json.hpp>
#include <ostream>

#include "promptsel/error.hpp"

namespace promptsel {

std::vector<Span> extract_spans(std::span<const std::string> labels) {
  std::vector<Span> spans;
  bool open = false;
  Span current;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const std::string& label = labels[i];
    const std::string_view type = bio_type(label);
    const bool begins = label.starts_with("B-");
    const bool inside = label.starts_with("I-");
    const bool continues = inside && open && current.type == type;
    if (open && !continues) {
      current.end = i;
      spans.push_back(current);
      open = false;
    }
    if ((begins || inside) && !continues) {
      current = Span{i, i, std::string(type)};
      open = true;
    }
  }
  if (open) {
    current.end = labels.size();
    spans.push_back(current);
  }
  return spans;
}

namespace {

const TaggedSentence& aligned_gold(const Prediction& p, const CorpusSplit& gold) {
  if (p.test_id >= gold.size()) {
    throw Error(ErrorKind::alignment, "prediction for test_id " + std::to_string(p.test_id) +
                                          " has no gold sentence");
  }
  const auto& g = gold[p.test_id];
  if (g.size() != p.predicted.size()) {
    throw Error(ErrorKind::alignment, "test_id " + std::to_string(p.test_id) + ": " +
                                          std::to_string(p.predicted.size()) + " predicted labels for " +
                                          std::to_string(g.size()) + " gold tokens");
  }
  return g;
}

double safe_div(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

void count_tokens(EvalReport& report, const Prediction& p, const TaggedSentence& g) {
  ++report.n_sentences;
  report.n_tokens += g.size();
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (p.predicted[i] == g.labels[i]) ++report.correct_tokens;
  }
}

}  // namespace

EvalReport micro_f1(const PredictionSet& pred, const CorpusSplit& gold) {
  EvalReport report;
  report.task = gold.scheme().task();
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  for (const auto& p : pred.predictions) {
    const auto& g = aligned_gold(p, gold);
    count_tokens(report, p, g);
    const auto gold_spans = extract_spans(g.labels);
    const auto pred_spans = extract_spans(p.predicted);
    std::vector<Span> both;
    std::set_intersection(gold_spans.begin(), gold_spans.end(), pred_spans.begin(), pred_spans.end(),
                          std::back_inserter(both));
    for (const auto& s : both) ++report.per_label[s.type].tp;
    for (const auto& s : pred_spans) {
      if (!std::binary_search(both.begin(), both.end(), s)) ++report.per_label[s.type].fp;
    }
    for (const auto& s : gold_spans) {
      if (!std::binary_search(both.begin(), both.end(), s)) ++report.per_label[s.type].fn;
    }
    tp += both.size();
    fp += pred_spans.size() - both.size();
    fn += gold_spans.size() - both.size();
  }
  report.precision = safe_div(tp, tp + fp);
  report.recall = safe_div(tp, tp + fn);
  const double pr = report.precision + report.recall;
  report.f1 = pr > 0.0 ? 2.0 * report.precision * report.recall / pr : 0.0;
  report.accuracy = safe_div(report.correct_tokens, report.n_tokens);
  report.n_missing = gold.size() - std::min(gold.size(), report.n_sentences);
  return report;
}

EvalReport token_accuracy(const PredictionSet& pred, const CorpusSplit& gold) {
  EvalReport report;
  report.task = gold.scheme().task();
  for (const auto& p : pred.predictions) count_tokens(report, p, aligned_gold(p, gold));
  report.accuracy = safe_div(report.correct_tokens, report.n_tokens);
  report.n_missing = gold.size() - std::min(gold.size(), report.n_sentences);
  return report;
}

EvalReport evaluate(const PredictionSet& pred, const CorpusSplit& gold) {
  return gold.scheme().kind() == SchemeKind::bio ? micro_f1(pred, gold) : token_accuracy(pred, gold);
}

void write_report_table(const EvalReport& report, std::ostream& out) {
  const auto flags = out.flags();
  const auto precision = out.precision();
  out << std::fixed << std::setprecision(2);
  out << "task: " << to_string(report.task) << "  sentences: " << report.n_sentences
      << "  tokens: " << report.n_tokens;
  if (report.n_missing) out << "  missing: " << report.n_missing;
  out << '\n';
  if (report.task == Task::pos) {
    out << "accuracy: " << 100.0 * report.accuracy << '\n';
  } else {
    out << "precision: " << 100.0 * report.precision << "  recall: " << 100.0 * report.recall
        << "  F1: " << 100.0 * report.f1 << '\n';
    out << std::left << std::setw(10) << "type" << std::right << std::setw(8) << "tp"
        << std::setw(8) << "fp" << std::setw(8) << "fn" << std::setw(10) << "F1" << '\n';
    for (const auto& [type, c] : report.per_label) {
      const double p = safe_div(c.tp, c.tp + c.fp);
      const double r = safe_div(c.tp, c.tp + c.fn);
      const double f = p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
      out << std::left << std::setw(10) << type << std::right << std::setw(8) << c.tp
          << std::setw(8) << c.fp << std::setw(8) << c.fn << std::setw(10) << 100.0 * f << '\n';
    }
  }
  out.flags(flags);
  out.precision(precision);
}

void write_report_json(const EvalReport& report, std::ostream& out) {
  nlohmann::json j{{"task", to_string(report.task)},
                   {"n_sentences", report.n_sentences},
                   {"n_tokens", report.n_tokens},
                   {"n_missing", report.n_missing},
                   {"accuracy", report.accuracy}};
  if (report.task != Task::pos) {
    j["precision"] = report.precision;
    j["recall"] = report.recall;
    j["f1"] = report.f1;
    nlohmann::json per = nlohmann::json::object();
    for (const auto& [type, c] : report.per_label) per[type] = {{"tp", c.tp}, {"fp", c.fp}, {"fn", c.fn}};
    j["per_label"] = per;
  }
  out << j.dump(2) << '\n';
}

void write_error_listing(const PredictionSet& pred, std::ostream& out) {
  for (const auto& p : pred.predictions) {
    if (p.predicted == p.gold) continue;
    out << p.test_id << ':';
    for (std::size_t i = 0; i < p.tokens.size(); ++i) {
      out << ' ' << p.tokens[i];
      if (i < p.gold.size() && i < p.predicted.size() && p.gold[i] != p.predicted[i]) {
        out << '[' << p.gold[i] << "->" << p.predicted[i] << ']';
      }
    }
    out << '\n';
  }
}

}  // namespace promptsel
