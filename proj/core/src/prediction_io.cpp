#include <istream>
#include <nlohmann/json.hpp>
#include <ostream>

#include "promptsel/decoder.hpp"
#include "promptsel/error.hpp"

namespace promptsel {

namespace {

RepairKind parse_repair_kind(const std::string& name) {
  for (auto kind : {RepairKind::exact, RepairKind::case_insensitive, RepairKind::prefix,
                    RepairKind::fallback}) {
    if (to_string(kind) == name) return kind;
  }
  throw Error(ErrorKind::parse, "unknown repair kind '" + name + "'");
}

}  // namespace

void write_predictions(const PredictionSet& set, std::ostream& out) {
  std::size_t f = 0;
  auto write_failures_before = [&](std::size_t test_id) {
    while (f < set.failures.size() && set.failures[f].test_id < test_id) {
      const auto& fail = set.failures[f++];
      nlohmann::json j{{"test_id", fail.test_id}, {"prompt_hash", fail.prompt_hash}, {"error", fail.message}};
      out << j.dump() << '\n';
    }
  };
  for (const auto& p : set.predictions) {
    write_failures_before(p.test_id);
    nlohmann::json repairs = nlohmann::json::array();
    for (const auto& r : p.repairs) {
      repairs.push_back({{"position", r.position}, {"raw", r.raw}, {"label", r.label},
                         {"kind", to_string(r.kind)}});
    }
    nlohmann::json j{{"test_id", p.test_id},         {"tokens", p.tokens},
                     {"gold", p.gold},               {"predicted", p.predicted},
                     {"example_ids", p.example_ids}, {"prompt_hash", p.prompt_hash},
                     {"repairs", repairs}};
    out << j.dump() << '\n';
  }
  write_failures_before(static_cast<std::size_t>(-1));
}

PredictionSet read_predictions(std::istream& in, Task task) {
  PredictionSet set;
  set.task = task;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      if (j.contains("error")) {
        set.failures.push_back({j.at("test_id").get<std::size_t>(),
                                j.value("prompt_hash", std::string()),
                                j.at("error").get<std::string>()});
        continue;
      }
      Prediction p;
      p.test_id = j.at("test_id").get<std::size_t>();
      p.tokens = j.at("tokens").get<std::vector<std::string>>();
      p.gold = j.at("gold").get<std::vector<std::string>>();
      p.predicted = j.at("predicted").get<std::vector<std::string>>();
      p.example_ids = j.at("example_ids").get<std::vector<std::size_t>>();
      p.prompt_hash = j.at("prompt_hash").get<std::string>();
      for (const auto& r : j.at("repairs")) {
        p.repairs.push_back({r.at("position").get<std::size_t>(), r.at("raw").get<std::string>(),
                             r.at("label").get<std::string>(),
                             parse_repair_kind(r.at("kind").get<std::string>())});
      }
      set.predictions.push_back(std::move(p));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::parse, "predictions line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  std::sort(set.predictions.begin(), set.predictions.end(),
            [](const Prediction& a, const Prediction& b) { return a.test_id < b.test_id; });
  return set;
}

}  // namespace promptsel
