#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "srkit/expr.hpp"

namespace srkit {

/// Denominators smaller than this in magnitude are a domain error.
inline constexpr double kDivisionGuard = 1e-12;

/// An expression flattened into postfix form for repeated evaluation. Placeholders
/// read from a caller-supplied coefficient vector, slot i being the i-th placeholder
/// from the left.
///
/// Every evaluation path in the library goes through this class so that a value
/// computed while sampling data is reproduced bit-for-bit when scoring.
class CompiledExpr {
 public:
  explicit CompiledExpr(const Expression& e);

  /// Evaluates at one point. Returns nullopt on a domain error: log/sqrt of a
  /// negative, arcsin outside [-1, 1], |denominator| < kDivisionGuard, or any
  /// non-finite intermediate.
  std::optional<double> operator()(std::span<const double> x, std::span<const double> coefficients = {}) const;

  std::size_t arity() const noexcept { return arity_; }
  std::size_t placeholder_count() const noexcept { return placeholders_; }

 private:
  enum class Op : std::uint8_t {
    variable, constant, placeholder,
    add, sub, mul, div, pow,
    sin, cos, arcsin, arctan, exp, log, sqrt,
  };
  struct Instr {
    Op op;
    std::uint32_t slot = 0;
    double value = 0.0;
  };

  void compile(const Expression& e, std::uint32_t& next_slot);

  std::vector<Instr> code_;
  std::size_t max_stack_ = 0;
  std::size_t arity_ = 0;
  std::size_t placeholders_ = 0;
};

/// Evaluates a placeholder-free expression. Throws std::invalid_argument when `x` is
/// shorter than the expression's arity or placeholders remain.
std::optional<double> evaluate(const Expression& e, std::span<const double> x);

/// Evaluates with placeholder values supplied left to right.
std::optional<double> evaluate(const Expression& e, std::span<const double> x,
                               std::span<const double> coefficients);

}  // namespace srkit
