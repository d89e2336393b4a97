#include "srkit/fitter.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "overloaded.hpp"
#include "srkit/metrics.hpp"

namespace srkit {

namespace {

using detail::overloaded;
using Point = std::vector<double>;

struct SimplexResult {
  Point best;
  double value = 0.0;
  bool converged = false;
};

// Downhill simplex with the standard reflection / expansion / contraction /
// shrink coefficients. The best vertex is only ever replaced by a strictly better
// one, so the result never exceeds f(start).
class NelderMead {
 public:
  NelderMead(const ResidualObjective& f, std::size_t max_iterations, double tolerance)
      : f_(f), max_iterations_(max_iterations), tolerance_(tolerance) {}

  SimplexResult minimize(const Point& start) {
    const std::size_t n = start.size();
    std::vector<Point> simplex(n + 1, start);
    for (std::size_t i = 0; i < n; ++i) {
      simplex[i + 1][i] += std::max(0.5, 0.1 * std::fabs(start[i]));
    }
    std::vector<double> values(n + 1);
    for (std::size_t i = 0; i <= n; ++i) values[i] = f_(simplex[i]);

    std::vector<std::size_t> order(n + 1);
    Point centroid(n), trial(n), second(n);
    bool converged = false;

    for (std::size_t iter = 0; iter < max_iterations_; ++iter) {
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
      const std::size_t best = order.front();
      const std::size_t worst = order.back();
      const std::size_t next_worst = order[n - 1];

      const double spread = values[worst] - values[best];
      if (values[best] == 0.0 || spread <= tolerance_ * std::fabs(values[best])) {
        converged = true;
        break;
      }

      std::fill(centroid.begin(), centroid.end(), 0.0);
      for (std::size_t i = 0; i <= n; ++i) {
        if (i == worst) continue;
        for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j];
      }
      for (double& c : centroid) c /= static_cast<double>(n);

      auto along = [&](double t, Point& out) {
        for (std::size_t j = 0; j < n; ++j) out[j] = centroid[j] + t * (simplex[worst][j] - centroid[j]);
        return f_(out);
      };

      const double reflected = along(-1.0, trial);
      if (reflected < values[best]) {
        const double expanded = along(-2.0, second);
        if (expanded < reflected) {
          accept(simplex, values, worst, second, expanded);
        } else {
          accept(simplex, values, worst, trial, reflected);
        }
        continue;
      }
      if (reflected < values[next_worst]) {
        accept(simplex, values, worst, trial, reflected);
        continue;
      }
      const bool outside = reflected < values[worst];
      const double contracted = along(outside ? -0.5 : 0.5, second);
      if (contracted < (outside ? reflected : values[worst])) {
        accept(simplex, values, worst, second, contracted);
        continue;
      }
      for (std::size_t i = 0; i <= n; ++i) {
        if (i == best) continue;
        for (std::size_t j = 0; j < n; ++j) simplex[i][j] = simplex[best][j] + 0.5 * (simplex[i][j] - simplex[best][j]);
        values[i] = f_(simplex[i]);
      }
    }

    const std::size_t best = static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
    return {simplex[best], values[best], converged};
  }

 private:
  static void accept(std::vector<Point>& simplex, std::vector<double>& values, std::size_t slot, const Point& p,
                     double v) {
    simplex[slot] = p;
    values[slot] = v;
  }

  const ResidualObjective& f_;
  std::size_t max_iterations_;
  double tolerance_;
};

void collect_initial_guess(const Expression& e, std::vector<double>& out) {
  std::visit(overloaded{
                 [&](const BinaryOp& b) {
                   collect_initial_guess(b.left, out);
                   if (b.kind == BinaryKind::pow && is_structural_exponent(b.right)) return;
                   collect_initial_guess(b.right, out);
                 },
                 [&](const UnaryFn& u) { collect_initial_guess(u.child, out); },
                 [&](const Constant& c) { out.push_back(c.value); },
                 [&](const ConstPlaceholder&) { out.push_back(1.0); },
                 [](const Variable&) {},
             },
             e.node().value);
}

double score(const Expression& fitted, const DataMatrix& data) {
  const CompiledExpr f(fitted);
  std::vector<double> pred(data.rows());
  for (std::size_t i = 0; i < data.rows(); ++i) {
    auto v = f(data.row(i));
    if (!v) return kR2Sentinel;
    pred[i] = *v;
  }
  return r_squared(pred, data.y);
}

}  // namespace

ResidualObjective::ResidualObjective(const Expression& skeleton_expr, const DataMatrix& data)
    : compiled_(skeleton_expr), data_(data) {
  if (compiled_.arity() > data.n_vars) {
    throw std::invalid_argument("fit: candidate uses " + std::to_string(compiled_.arity()) +
                                " variables but the data has " + std::to_string(data.n_vars));
  }
}

double ResidualObjective::operator()(std::span<const double> coefficients) const {
  double total = 0.0;
  for (std::size_t i = 0; i < data_.rows(); ++i) {
    auto v = compiled_(data_.row(i), coefficients);
    double sq = kDomainPenalty;
    if (v) {
      const double r = *v - data_.y[i];
      sq = std::min(r * r, kDomainPenalty);
    }
    total += sq;
  }
  return total;
}

std::size_t ResidualObjective::valid_rows(std::span<const double> coefficients) const {
  std::size_t ok = 0;
  for (std::size_t i = 0; i < data_.rows(); ++i) ok += compiled_(data_.row(i), coefficients).has_value();
  return ok;
}

FitResult fit(const Skeleton& skeleton, const DataMatrix& data, const FitBudget& budget,
              std::span<const double> initial_guess) {
  const Expression& skel = skeleton.expr();
  const ResidualObjective objective(skel, data);
  const std::size_t n = objective.dimension();

  if (n == 0) {
    FitResult r;
    r.expression = skel;
    r.r2 = score(skel, data);
    r.objective = objective({});
    r.converged = true;
    return r;
  }
  if (!initial_guess.empty() && initial_guess.size() != n) {
    throw std::invalid_argument("fit: initial guess has " + std::to_string(initial_guess.size()) +
                                " values for " + std::to_string(n) + " placeholders");
  }

  std::vector<Point> starts;
  if (!initial_guess.empty()) starts.emplace_back(initial_guess.begin(), initial_guess.end());
  Rng rng(derive_seed(budget.seed, 7));
  std::uniform_real_distribution<double> draw(-5.0, 5.0);
  for (std::size_t s = 0; s < budget.restarts; ++s) {
    if (s == 0) {
      starts.emplace_back(n, 1.0);
    } else if (s == 1) {
      starts.emplace_back(n, 0.1);
    } else {
      Point p(n);
      for (double& v : p) v = draw(rng);
      starts.push_back(std::move(p));
    }
  }

  NelderMead optimizer(objective, budget.max_iterations, budget.tolerance);
  SimplexResult winner;
  bool have_winner = false;
  bool any_valid = false;
  std::size_t used = 0;
  for (const Point& start : starts) {
    SimplexResult r = optimizer.minimize(start);
    ++used;
    if (!any_valid) any_valid = objective.valid_rows(r.best) > 0 || objective.valid_rows(start) > 0;
    if (!have_winner || r.value < winner.value) {
      winner = std::move(r);
      have_winner = true;
    }
    // Later starts can at best tie an exact zero, and ties go to the earlier start.
    if (winner.value == 0.0) break;
  }
  if (!any_valid) throw FitError("fit: candidate '" + skeleton.canonical_string() + "' fails on every row");

  FitResult out;
  out.coefficients = winner.best;
  out.expression = bind_placeholders(skel, out.coefficients);
  out.objective = winner.value;
  out.r2 = score(out.expression, data);
  out.n_restarts_used = used;
  out.converged = winner.converged;
  return out;
}

FitResult refine(const Expression& expr, const DataMatrix& data, const FitBudget& budget) {
  std::vector<double> guess;
  collect_initial_guess(expr, guess);
  return fit(extract_skeleton(expr), data, budget, guess);
}

std::vector<double> numeric_gradient(const std::function<double(std::span<const double>)>& f,
                                     std::span<const double> point, double step, DifferenceScheme scheme) {
  std::vector<double> x(point.begin(), point.end());
  std::vector<double> grad(x.size());
  const double f0 = scheme == DifferenceScheme::forward ? f(x) : 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double h = step * std::max(1.0, std::fabs(point[i]));
    const double saved = x[i];
    x[i] = saved + h;
    const double up = f(x);
    if (scheme == DifferenceScheme::forward) {
      grad[i] = (up - f0) / h;
    } else {
      x[i] = saved - h;
      grad[i] = (up - f(x)) / (2.0 * h);
    }
    x[i] = saved;
  }
  return grad;
}

}  // namespace srkit
