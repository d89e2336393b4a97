#include "srkit/evaluation.hpp"

#include <cstdio>
#include <fstream>
#include <unordered_map>

#include <json.hpp>

#include "srkit/eval.hpp"
#include "srkit/parse.hpp"
#include "srkit/skeleton.hpp"

namespace srkit {

namespace {

using json = nlohmann::json;

std::unordered_map<std::string, const DatasetRecord*> index_by_id(std::span<const DatasetRecord> dataset) {
  std::unordered_map<std::string, const DatasetRecord*> out;
  for (const auto& r : dataset) out.emplace(r.equation.id, &r);
  return out;
}

json to_json(const MetricReport& m) {
  json features = json::object();
  for (Feature f : kAllFeatures) features[std::string(to_string(f))] = m.per_feature[static_cast<std::size_t>(f)];
  return {{"r2", m.r2}, {"acc_tau", m.acc_tau}, {"s_struct", m.s_struct}, {"per_feature", features}, {"tau", m.tau}};
}

}  // namespace

std::vector<Prediction> read_predictions(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DatasetError(DatasetError::Kind::io_error, "cannot open " + path.string());
  std::vector<Prediction> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("id") || !j.contains("prediction") ||
        !j["id"].is_string() || !j["prediction"].is_string()) {
      throw DatasetError(DatasetError::Kind::malformed_line,
                         "line " + std::to_string(n) + ": expected {\"id\": string, \"prediction\": string}", n);
    }
    out.push_back({j["id"].get<std::string>(), j["prediction"].get<std::string>()});
  }
  return out;
}

ReportRow evaluate_prediction(const DatasetRecord& record, const std::string& prediction, double tau,
                              const FitBudget& budget) {
  ReportRow row;
  row.id = record.equation.id;
  row.prediction = prediction;
  row.metrics.tau = tau;

  Expression parsed;
  try {
    parsed = parse(extract_equation(prediction));
  } catch (const ParseError&) {
    return row;
  }
  const DataMatrix& data = record.data;
  if (parsed.arity() > data.n_vars) return row;

  const FormSimilarity sim = form_similarity(extract_skeleton(parsed), record.equation.skeleton);
  row.metrics.s_struct = sim.value;
  row.metrics.per_feature = sim.per_feature;

  FitResult fitted;
  try {
    fitted = refine(parsed, data, budget);
  } catch (const FitError&) {
    row.metrics.r2 = kR2Sentinel;
    row.fitted = print(parsed);
    return row;
  }
  row.fitted = print(fitted.expression);
  row.metrics.r2 = fitted.r2;

  const CompiledExpr f(fitted.expression);
  std::vector<double> pred(data.rows());
  for (std::size_t i = 0; i < data.rows(); ++i) {
    const auto v = f(data.row(i));
    if (!v) return row;
    pred[i] = *v;
  }
  row.metrics.acc_tau = acc_tau(pred, data.y, tau);
  return row;
}

RunReport evaluate_predictions(std::span<const DatasetRecord> dataset,
                               const std::map<std::string, std::string>& predictions, double tau,
                               const FitBudget& budget) {
  if (dataset.empty()) throw std::invalid_argument("evaluate_predictions: empty dataset");
  const auto by_id = index_by_id(dataset);
  for (const auto& [id, text] : predictions) {
    if (!by_id.contains(id)) throw UnknownId("unknown-id: prediction for '" + id + "' has no dataset record");
  }

  RunReport report;
  std::vector<MetricReport> metrics;
  for (const auto& r : dataset) {
    const auto it = predictions.find(r.equation.id);
    ReportRow row;
    if (it != predictions.end()) {
      row = evaluate_prediction(r, it->second, tau, budget);
    } else {
      row.id = r.equation.id;
      row.metrics.tau = tau;
    }
    metrics.push_back(row.metrics);
    report.rows.push_back(std::move(row));
  }
  report.summary = aggregate(metrics);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", tau);
  report.config["tau"] = buf;
  report.config["restarts"] = std::to_string(budget.restarts);
  report.config["max_iterations"] = std::to_string(budget.max_iterations);
  report.config["seed"] = std::to_string(budget.seed);
  return report;
}

std::string to_json(const RunReport& report) {
  json rows = json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"id", r.id}, {"prediction", r.prediction}, {"fitted", r.fitted}, {"metrics", to_json(r.metrics)}});
  }
  const MetricSummary& s = report.summary;
  json j;
  j["config"] = report.config;
  j["summary"] = {{"count", s.count},
                  {"s_struct", s.s_struct},
                  {"r2", s.r2},
                  {"r2_unclipped", s.r2_unclipped},
                  {"acc_tau", s.acc_tau}};
  j["rows"] = std::move(rows);
  if (report.wall_clock_seconds) j["wall_clock_seconds"] = *report.wall_clock_seconds;
  return j.dump(2);
}

std::vector<RewardRow> score_rewards(std::span<const DatasetRecord> dataset, std::span<const Prediction> predictions,
                                     const RewardWeights& weights, const FitBudget& budget) {
  const auto by_id = index_by_id(dataset);
  std::vector<RewardRow> out;
  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const auto& p = predictions[i];
    const auto it = by_id.find(p.id);
    if (it == by_id.end()) throw UnknownId("unknown-id: prediction for '" + p.id + "' has no dataset record");
    const DatasetRecord& r = *it->second;
    const std::string text = extract_equation(p.text);
    out.push_back({p.id, p.text, score_candidate(text, r.equation.skeleton, r.data, weights, budget)});
    groups[p.id].push_back(i);
  }
  for (const auto& [id, members] : groups) {
    if (members.size() < 2) continue;
    std::vector<double> totals;
    for (std::size_t i : members) totals.push_back(out[i].reward.total);
    const auto adv = group_advantages(totals);
    for (std::size_t k = 0; k < members.size(); ++k) out[members[k]].reward.group_advantage = adv[k];
  }
  return out;
}

std::string to_json_line(const RewardRow& row) {
  const RewardBreakdown& b = row.reward;
  const json j = {{"id", row.id},
                  {"prediction", row.prediction},
                  {"format", b.format},
                  {"similarity", b.similarity},
                  {"numerical", b.numerical},
                  {"equiv", b.equiv},
                  {"total", b.total},
                  {"advantage", b.group_advantage}};
  return j.dump();
}

std::string to_json(const SearchResult& result) {
  auto entry = [](const MemoryEntry& e) {
    return json{{"equation", e.equation}, {"score", e.score}, {"comments", e.comments}};
  };
  json trace = json::array();
  for (const auto& it : result.trace) {
    json bank = json::array();
    for (const auto& e : it.bank) bank.push_back(entry(e));
    trace.push_back({{"iteration", it.iteration},
                     {"proposed", it.proposed},
                     {"valid", it.valid},
                     {"generator_failed", it.generator_failed},
                     {"best_score", it.best_score},
                     {"bank", std::move(bank)}});
  }
  json j;
  j["best"] = entry(result.best);
  j["trace"] = std::move(trace);
  return j.dump(2);
}

}  // namespace srkit
