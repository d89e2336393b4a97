#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "srkit/expr.hpp"
#include "srkit/random.hpp"
#include "srkit/skeleton.hpp"

namespace srkit {

/// Knobs for random equation synthesis.
struct GeneratorConfig {
  std::size_t max_vars = 3;
  std::size_t min_depth = 4;
  std::size_t max_depth = 12;
  std::vector<UnaryKind> unary_pool{std::begin(kAllUnaryKinds), std::end(kAllUnaryKinds)};
  std::vector<BinaryKind> binary_pool{std::begin(kAllBinaryKinds), std::end(kAllBinaryKinds)};
  std::uint64_t seed = 0;
  std::size_t target_count = 1;

  // Hole-filling weights; terminal is forced once a hole reaches max_depth.
  double p_binary = 0.4;
  double p_unary = 0.2;
  double p_terminal = 0.4;
  /// Chance that a terminal is a variable rather than a placeholder.
  double p_variable = 0.75;
  /// Chance that an add/sub operand is wrapped as C*operand.
  double p_coefficient_wrap = 0.5;
  /// Range used by the evaluability screen.
  double dom = 10.0;

  /// Throws std::invalid_argument on an inconsistent configuration.
  void validate() const;
};

enum class Split { train, test };

std::string_view to_string(Split s) noexcept;

struct EquationRecord {
  std::string id;
  Expression expression;
  Skeleton skeleton;
  std::size_t n_vars = 0;
  std::size_t depth = 0;
  Split split = Split::train;
};

class GenerationExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kTreeAttempts = 1000;
inline constexpr std::size_t kCorpusAttemptsPerRecord = 100;

/// Draws one skeleton tree by filling expansion holes until none remain. The
/// variable count is drawn uniformly from {1..max_vars} and every declared
/// variable appears at least once. Depth never exceeds max_depth; the min_depth
/// filter is applied by generate_corpus.
///
/// Throws GenerationExhausted after kTreeAttempts rejected drafts.
Expression generate_tree(const GeneratorConfig& cfg, Rng& rng);

/// Replaces each placeholder with a constant drawn from U(-5, 5), redrawn while
/// |c| < 0.1, rounded to 3 decimals.
Expression instantiate_coefficients(const Skeleton& skeleton, Rng& rng);

bool is_unique(const Skeleton& skeleton, const std::unordered_set<std::string>& seen);

/// Exactly cfg.target_count records passing the depth filter, skeleton uniqueness
/// and the evaluability screen. Deterministic in cfg.seed.
///
/// Throws GenerationExhausted if kCorpusAttemptsPerRecord * target_count trees are
/// drawn first.
std::vector<EquationRecord> generate_corpus(const GeneratorConfig& cfg);

/// Partitions records so that no canonical skeleton lands in both halves; records
/// sharing a skeleton stay together. The split field of each returned record is set.
std::pair<std::vector<EquationRecord>, std::vector<EquationRecord>> split_by_skeleton(
    std::vector<EquationRecord> records, double test_fraction, std::uint64_t seed);

}  // namespace srkit
