#include "srkit/rewards.hpp"

#include <algorithm>
#include <cmath>

#include "srkit/eval.hpp"
#include "srkit/metrics.hpp"
#include "srkit/parse.hpp"

namespace srkit {

namespace {

std::optional<Expression> parse_valid(std::string_view text, std::size_t arity, std::uint64_t probe_seed) {
  Expression e;
  try {
    e = parse(text);
  } catch (const ParseError&) {
    return std::nullopt;
  }
  if (e.arity() > arity) return std::nullopt;

  const CompiledExpr f(e);
  const std::vector<double> ones(e.placeholder_count(), 1.0);
  Rng rng(derive_seed(probe_seed, 11));
  std::uniform_real_distribution<double> draw(-kValidityProbeRange, kValidityProbeRange);
  std::vector<double> x(arity);
  for (std::size_t p = 0; p < kValidityProbes; ++p) {
    for (double& v : x) v = draw(rng);
    if (f(x, ones)) return e;
  }
  return std::nullopt;
}

}  // namespace

bool is_valid(std::string_view text, std::size_t arity, std::uint64_t probe_seed) {
  return parse_valid(text, arity, probe_seed).has_value();
}

double format_reward(std::string_view text, std::size_t arity, std::uint64_t probe_seed) {
  return is_valid(text, arity, probe_seed) ? 1.0 : -1.0;
}

double similarity_reward(const Skeleton& pred, const Skeleton& truth) { return form_similarity(pred, truth).value; }

double numerical_reward(std::string_view pred_text, const DataMatrix& truth, const std::optional<Expression>& fitted,
                        const FitBudget& budget, std::uint64_t probe_seed) {
  auto parsed = parse_valid(pred_text, truth.n_vars, probe_seed);
  if (!parsed) return 0.0;
  double r2 = 0.0;
  if (fitted) {
    std::vector<double> pred(truth.rows());
    const CompiledExpr f(*fitted);
    for (std::size_t i = 0; i < truth.rows(); ++i) {
      auto v = f(truth.row(i));
      if (!v) return 0.0;
      pred[i] = *v;
    }
    r2 = r_squared(pred, truth.y);
  } else {
    try {
      r2 = refine(*parsed, truth, budget).r2;
    } catch (const FitError&) {
      return 0.0;
    }
  }
  return std::max(0.0, r2);
}

double equiv_reward(const Skeleton& pred, const Skeleton& truth) {
  return pred.canonical_string() == truth.canonical_string() ? 1.0 : 0.0;
}

double total_reward(const RewardBreakdown& parts, const RewardWeights& w) {
  return w.format * parts.format + w.similarity * parts.similarity + w.numerical * parts.numerical +
         w.equiv * parts.equiv;
}

RewardBreakdown score_candidate(std::string_view pred_text, const Skeleton& truth, const DataMatrix& data,
                                const RewardWeights& w, const FitBudget& budget, std::uint64_t probe_seed) {
  RewardBreakdown out;
  out.format = format_reward(pred_text, data.n_vars, probe_seed);
  // Similarity and equivalence only need a parse; they are structural.
  try {
    const Skeleton pred = parse_skeleton(pred_text);
    out.similarity = similarity_reward(pred, truth);
    out.equiv = equiv_reward(pred, truth);
  } catch (const ParseError&) {
  }
  if (out.format > 0.0) out.numerical = numerical_reward(pred_text, data, std::nullopt, budget, probe_seed);
  out.total = total_reward(out, w);
  return out;
}

std::vector<double> group_advantages(std::span<const double> rewards) {
  if (rewards.size() < 2) throw GroupTooSmall("group_advantages: need at least 2 rewards");
  std::vector<double> out(rewards.size(), 0.0);
  const auto [lo, hi] = std::minmax_element(rewards.begin(), rewards.end());
  if (*lo == *hi) return out;

  const double n = static_cast<double>(rewards.size());
  double mean = 0.0;
  for (double r : rewards) mean += r;
  mean /= n;
  double var = 0.0;
  for (double r : rewards) var += (r - mean) * (r - mean);
  const double stddev = std::sqrt(var / n);
  for (std::size_t i = 0; i < rewards.size(); ++i) out[i] = (rewards[i] - mean) / (stddev + 1e-8);
  return out;
}

}  // namespace srkit
