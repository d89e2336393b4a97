#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <limits>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "srkit/skeleton.hpp"

namespace srkit {

inline constexpr double kDefaultTau = 0.05;

/// Returned by r_squared when y_true is constant and the prediction misses it.
inline constexpr double kR2Sentinel = std::numeric_limits<double>::lowest();

class LengthMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Coefficient of determination 1 - SS_res / SS_tot. When SS_tot < 1e-12 the
/// result is 1.0 if every |residual| < 1e-9, else kR2Sentinel. A non-finite
/// residual sum also yields kR2Sentinel.
double r_squared(std::span<const double> y_pred, std::span<const double> y_true);

/// 1 iff max_i |pred_i - true_i| / max(|true_i|, 1e-10) <= tau.
int acc_tau(std::span<const double> y_pred, std::span<const double> y_true, double tau = kDefaultTau);

/// |a ∩ b| / |a ∪ b|; 1.0 when both are empty.
template <class T>
double jaccard(const std::set<T>& a, const std::set<T>& b) {
  if (a.empty() && b.empty()) return 1.0;
  std::size_t shared = 0;
  for (const auto& v : a) shared += b.contains(v);
  const std::size_t uni = a.size() + b.size() - shared;
  return static_cast<double>(shared) / static_cast<double>(uni);
}

/// min / max of two non-negative values; 1.0 when both are zero.
double ratio_sim(double v1, double v2);

/// Matching characters at identical positions over the longer length; 1.0 when
/// both are empty.
double pattern_sim(std::string_view p1, std::string_view p2);

enum class Feature { operators, functions, variables, constants, pattern, complexity };
inline constexpr std::array<Feature, 6> kAllFeatures = {Feature::operators, Feature::functions, Feature::variables,
                                                        Feature::constants, Feature::pattern,   Feature::complexity};
std::string_view to_string(Feature f) noexcept;

struct FormSimilarity {
  double value = 0.0;
  /// Indexed by Feature.
  std::array<double, 6> per_feature{};
};

/// Six-feature structural similarity averaged without weights and clipped to [0, 1].
FormSimilarity form_similarity(const Skeleton& pred, const Skeleton& truth);
FormSimilarity form_similarity(const FeatureVector& pred, const FeatureVector& truth);

struct MetricReport {
  double r2 = 0.0;
  int acc_tau = 0;
  double s_struct = 0.0;
  std::array<double, 6> per_feature{};
  double tau = kDefaultTau;
};

struct MetricSummary {
  std::size_t count = 0;
  double s_struct = 0.0;
  /// Mean of max(0, r2).
  double r2 = 0.0;
  /// Plain mean of r2, kept for transparency.
  double r2_unclipped = 0.0;
  double acc_tau = 0.0;
};

/// Means over reports. Throws std::invalid_argument when empty.
MetricSummary aggregate(std::span<const MetricReport> reports);

}  // namespace srkit
