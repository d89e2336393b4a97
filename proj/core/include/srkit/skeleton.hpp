#pragma once

#include <cstddef>
#include <cstdint>
#include <set>
#include <string>
#include <string_view>

#include "srkit/expr.hpp"

namespace srkit {

/// An expression whose fitted coefficients are all replaced by the placeholder "C",
/// paired with its canonical rendering. Integer pow exponents are structure and stay.
class Skeleton {
 public:
  Skeleton() : Skeleton(Expression::placeholder()) {}

  const Expression& expr() const noexcept { return expr_; }
  const std::string& canonical_string() const noexcept { return canonical_; }

  friend bool operator==(const Skeleton& a, const Skeleton& b) noexcept { return a.canonical_ == b.canonical_; }

 private:
  explicit Skeleton(Expression placeholder_only);
  friend Skeleton extract_skeleton(const Expression& e);

  Expression expr_;
  std::string canonical_;
};

/// Replaces every coefficient Constant with a placeholder. Adjacent placeholders are
/// not merged (C*C stays C*C) and the structure is otherwise untouched.
Skeleton extract_skeleton(const Expression& e);

/// Convenience: extract_skeleton(parse(text)).
Skeleton parse_skeleton(std::string_view text);

struct FeatureVector {
  std::set<BinaryKind> operators;
  std::set<UnaryKind> functions;
  std::set<std::uint32_t> variables;
  std::size_t constant_count = 0;
  /// Canonical skeleton string with each variable token replaced by "VAR".
  std::string structural_pattern;
  /// binary-op nodes + unary-fn nodes + max parenthesis nesting of the canonical string.
  std::size_t complexity_score = 0;

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

FeatureVector extract_features(const Skeleton& skeleton);

/// Maximum parenthesis nesting depth of `text`.
std::size_t max_paren_depth(std::string_view text) noexcept;

}  // namespace srkit
