#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "srkit/fitter.hpp"
#include "srkit/sampler.hpp"
#include "srkit/skeleton.hpp"

namespace srkit {

/// Weights of the four reward terms; defaults are (1, 2, 2, 4).
struct RewardWeights {
  double format = 1.0;
  double similarity = 2.0;
  double numerical = 2.0;
  double equiv = 4.0;
};

struct RewardBreakdown {
  double format = -1.0;
  double similarity = 0.0;
  double numerical = 0.0;
  double equiv = 0.0;
  double total = 0.0;
  /// Filled by group normalization.
  double group_advantage = 0.0;
};

inline constexpr std::size_t kValidityProbes = 32;
inline constexpr double kValidityProbeRange = 10.0;
inline constexpr std::size_t kDefaultGroupSize = 8;

/// True iff `text` parses, references no variable index >= arity, and evaluates
/// on at least one of 32 probe points drawn from U(-10, 10)^arity. Placeholders are
/// probed at 1.0.
bool is_valid(std::string_view text, std::size_t arity, std::uint64_t probe_seed = 0);

/// 1.0 if is_valid else -1.0.
double format_reward(std::string_view text, std::size_t arity, std::uint64_t probe_seed = 0);

/// Form similarity between the two skeletons.
double similarity_reward(const Skeleton& pred, const Skeleton& truth);

/// max(0, R^2) of the prediction after coefficient fitting on `truth`; 0 when the
/// text is invalid. `fitted`, when given, is scored as-is instead of fitting.
double numerical_reward(std::string_view pred_text, const DataMatrix& truth,
                        const std::optional<Expression>& fitted = std::nullopt, const FitBudget& budget = {},
                        std::uint64_t probe_seed = 0);

/// 1.0 iff the canonical skeleton strings are identical.
double equiv_reward(const Skeleton& pred, const Skeleton& truth);

double total_reward(const RewardBreakdown& parts, const RewardWeights& w = {});

/// Scores one candidate against a ground-truth skeleton and data matrix.
RewardBreakdown score_candidate(std::string_view pred_text, const Skeleton& truth, const DataMatrix& data,
                                const RewardWeights& w = {}, const FitBudget& budget = {},
                                std::uint64_t probe_seed = 0);

class GroupTooSmall : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// (r_i - mean) / (population stddev + 1e-8). Throws GroupTooSmall for fewer than
/// two rewards.
std::vector<double> group_advantages(std::span<const double> rewards);

}  // namespace srkit
