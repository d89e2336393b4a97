#include "srkit/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace srkit {

namespace {

void check_lengths(std::span<const double> a, std::span<const double> b, const char* who) {
  if (a.size() != b.size()) {
    throw LengthMismatch(std::string(who) + ": length mismatch (" + std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()) + ")");
  }
}

}  // namespace

double r_squared(std::span<const double> y_pred, std::span<const double> y_true) {
  check_lengths(y_pred, y_true, "r_squared");
  if (y_true.empty()) throw std::invalid_argument("r_squared: empty input");

  double mean = 0.0;
  for (double v : y_true) mean += v;
  mean /= static_cast<double>(y_true.size());

  // Power-of-two rescaling is exact and keeps the squares finite for huge targets.
  double max_abs_res = 0.0;
  double max_abs = 0.0;
  double raw_ss_tot = 0.0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const double r = y_true[i] - y_pred[i];
    const double d = y_true[i] - mean;
    if (!std::isfinite(r) || !std::isfinite(d)) return kR2Sentinel;
    max_abs_res = std::max(max_abs_res, std::fabs(r));
    max_abs = std::max({max_abs, std::fabs(r), std::fabs(d)});
    raw_ss_tot += d * d;
  }
  if (raw_ss_tot < 1e-12) return max_abs_res < 1e-9 ? 1.0 : kR2Sentinel;
  const int exponent = std::ilogb(max_abs);
  double ss_res = 0.0;
  double ss_tot = 0.0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const double r = std::scalbn(y_true[i] - y_pred[i], -exponent);
    const double d = std::scalbn(y_true[i] - mean, -exponent);
    ss_res += r * r;
    ss_tot += d * d;
  }
  const double r2 = 1.0 - ss_res / ss_tot;
  return std::isfinite(r2) ? r2 : kR2Sentinel;
}

int acc_tau(std::span<const double> y_pred, std::span<const double> y_true, double tau) {
  check_lengths(y_pred, y_true, "acc_tau");
  double worst = 0.0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const double rel = std::fabs(y_pred[i] - y_true[i]) / std::max(std::fabs(y_true[i]), 1e-10);
    if (!(rel <= worst)) worst = rel;  // also propagates NaN
  }
  return worst <= tau ? 1 : 0;
}

double ratio_sim(double v1, double v2) {
  if (v1 < 0.0 || v2 < 0.0) throw std::invalid_argument("ratio_sim: values must be non-negative");
  if (v1 == 0.0 && v2 == 0.0) return 1.0;
  return std::min(v1, v2) / std::max(v1, v2);
}

double pattern_sim(std::string_view p1, std::string_view p2) {
  const std::size_t longest = std::max(p1.size(), p2.size());
  if (longest == 0) return 1.0;
  const std::size_t overlap = std::min(p1.size(), p2.size());
  std::size_t matches = 0;
  for (std::size_t i = 0; i < overlap; ++i) matches += p1[i] == p2[i];
  return static_cast<double>(matches) / static_cast<double>(longest);
}

std::string_view to_string(Feature f) noexcept {
  switch (f) {
    case Feature::operators: return "operators";
    case Feature::functions: return "functions";
    case Feature::variables: return "variables";
    case Feature::constants: return "constants";
    case Feature::pattern: return "pattern";
    case Feature::complexity: return "complexity";
  }
  return "?";
}

FormSimilarity form_similarity(const FeatureVector& pred, const FeatureVector& truth) {
  FormSimilarity out;
  auto& f = out.per_feature;
  f[static_cast<std::size_t>(Feature::operators)] = jaccard(pred.operators, truth.operators);
  f[static_cast<std::size_t>(Feature::functions)] = jaccard(pred.functions, truth.functions);
  f[static_cast<std::size_t>(Feature::variables)] = jaccard(pred.variables, truth.variables);
  f[static_cast<std::size_t>(Feature::constants)] =
      ratio_sim(static_cast<double>(pred.constant_count), static_cast<double>(truth.constant_count));
  f[static_cast<std::size_t>(Feature::pattern)] = pattern_sim(pred.structural_pattern, truth.structural_pattern);
  f[static_cast<std::size_t>(Feature::complexity)] =
      ratio_sim(static_cast<double>(pred.complexity_score), static_cast<double>(truth.complexity_score));
  double sum = 0.0;
  for (double v : f) sum += v;
  out.value = std::clamp(sum / 6.0, 0.0, 1.0);
  return out;
}

FormSimilarity form_similarity(const Skeleton& pred, const Skeleton& truth) {
  return form_similarity(extract_features(pred), extract_features(truth));
}

MetricSummary aggregate(std::span<const MetricReport> reports) {
  if (reports.empty()) throw std::invalid_argument("aggregate: empty input");
  MetricSummary s;
  s.count = reports.size();
  const double n = static_cast<double>(reports.size());
  for (const auto& r : reports) {
    s.s_struct += r.s_struct;
    s.r2 += std::max(0.0, r.r2);
    // Divided first so sentinel values cannot overflow the sum.
    s.r2_unclipped += r.r2 / n;
    s.acc_tau += r.acc_tau;
  }
  s.s_struct /= n;
  s.r2 /= n;
  s.acc_tau /= n;
  return s;
}

}  // namespace srkit
