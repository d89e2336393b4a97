#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "srkit/dataset.hpp"
#include "srkit/fitter.hpp"
#include "srkit/her.hpp"
#include "srkit/metrics.hpp"
#include "srkit/rewards.hpp"

namespace srkit {

struct Prediction {
  std::string id;
  std::string text;
};

/// JSONL of {"id": ..., "prediction": ...}. Throws DatasetError with line numbers.
std::vector<Prediction> read_predictions(const std::filesystem::path& path);

class UnknownId : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ReportRow {
  std::string id;
  std::string prediction;
  /// Prediction with fitted constants; empty when it did not parse.
  std::string fitted;
  MetricReport metrics;
};

struct RunReport {
  std::vector<ReportRow> rows;
  MetricSummary summary;
  /// Echo of the settings that produced the report.
  std::map<std::string, std::string> config;
  /// Only recorded on request; it would otherwise break byte-identical reports.
  std::optional<double> wall_clock_seconds;
};

/// Scores one prediction against one record: sanitize, parse, fit constants on the
/// record's matrix, then r2, acc_tau and form similarity. Predictions that do not
/// parse (or reference variables the record lacks) score all zeros.
ReportRow evaluate_prediction(const DatasetRecord& record, const std::string& prediction, double tau = kDefaultTau,
                              const FitBudget& budget = {});

/// One row per dataset record, in dataset order; records without a prediction score
/// all zeros. Throws UnknownId if a prediction names no record, and
/// std::invalid_argument for an empty dataset.
RunReport evaluate_predictions(std::span<const DatasetRecord> dataset,
                               const std::map<std::string, std::string>& predictions, double tau = kDefaultTau,
                               const FitBudget& budget = {});

std::string to_json(const RunReport& report);

struct RewardRow {
  std::string id;
  std::string prediction;
  RewardBreakdown reward;
};

/// Scores every prediction against its record. Predictions sharing an id form a
/// group whose advantages are normalized together; singleton groups get 0.
std::vector<RewardRow> score_rewards(std::span<const DatasetRecord> dataset, std::span<const Prediction> predictions,
                                     const RewardWeights& weights = {}, const FitBudget& budget = {});

std::string to_json_line(const RewardRow& row);

/// Best entry plus every per-iteration bank snapshot; deterministic for a given result.
std::string to_json(const SearchResult& result);

}  // namespace srkit
