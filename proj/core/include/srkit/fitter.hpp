#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "srkit/eval.hpp"
#include "srkit/expr.hpp"
#include "srkit/sampler.hpp"
#include "srkit/skeleton.hpp"

namespace srkit {

/// Squared residual charged for a row on which the candidate has a domain error
/// (a residual of 1e6).
inline constexpr double kDomainPenalty = 1e12;

struct FitBudget {
  /// Multi-start count: all-ones, all-0.1, then random U(-5, 5) draws.
  std::size_t restarts = 8;
  /// Simplex iterations per start.
  std::size_t max_iterations = 500;
  /// Stop once (worst - best) / |best| over the simplex drops below this.
  double tolerance = 1e-10;
  std::uint64_t seed = 0;
};

struct FitResult {
  /// Skeleton with the fitted constants bound.
  Expression expression;
  std::vector<double> coefficients;
  /// r_squared of `expression` on the fitting matrix; kR2Sentinel if it fails to
  /// evaluate on any row.
  double r2 = 0.0;
  /// Residual objective at `coefficients`.
  double objective = 0.0;
  std::size_t n_restarts_used = 0;
  /// True when the winning start met the tolerance before its iteration cap.
  bool converged = false;
};

class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sum of squared residuals over a DataMatrix as a function of the placeholder
/// vector, with kDomainPenalty per failing row.
class ResidualObjective {
 public:
  ResidualObjective(const Expression& skeleton_expr, const DataMatrix& data);

  double operator()(std::span<const double> coefficients) const;
  /// Number of rows on which the candidate evaluates at `coefficients`.
  std::size_t valid_rows(std::span<const double> coefficients) const;
  std::size_t dimension() const noexcept { return compiled_.placeholder_count(); }

 private:
  CompiledExpr compiled_;
  const DataMatrix& data_;
};

/// Fits the placeholders of `skeleton` to `data` by multi-start Nelder-Mead. When
/// `initial_guess` is non-empty it is evaluated as an extra first start.
///
/// Throws FitError when the candidate cannot be evaluated on any row from any start.
FitResult fit(const Skeleton& skeleton, const DataMatrix& data, const FitBudget& budget = {},
              std::span<const double> initial_guess = {});

/// Refines the coefficients of a concrete expression: its skeleton is fitted with
/// the expression's own constants as the first start (placeholders start at 1).
FitResult refine(const Expression& expr, const DataMatrix& data, const FitBudget& budget = {});

enum class DifferenceScheme { forward, central };

/// Finite-difference gradient of `f` at `point`.
std::vector<double> numeric_gradient(const std::function<double(std::span<const double>)>& f,
                                     std::span<const double> point, double step,
                                     DifferenceScheme scheme = DifferenceScheme::central);

}  // namespace srkit
