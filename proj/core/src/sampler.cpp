#include "srkit/sampler.hpp"

#include <cmath>
#include <vector>

#include "srkit/eval.hpp"

namespace srkit {

namespace {

constexpr std::size_t kScreenRows = 64;
// A quarter of independent draws must evaluate, so kRowAttempts redraws per row
// practically never run out.
constexpr std::size_t kScreenMinValidRows = kScreenRows / 4;
constexpr double kScreenMinStddev = 1e-8;

}  // namespace

std::string_view to_string(Distribution d) noexcept { return d == Distribution::uniform ? "uniform" : "gaussian"; }

std::optional<Distribution> distribution_from_string(std::string_view s) noexcept {
  if (s == "uniform") return Distribution::uniform;
  if (s == "gaussian") return Distribution::gaussian;
  return std::nullopt;
}

DataMatrix sample_matrix(const Expression& expr, std::size_t k, double dom, Rng& rng, NoiseSpec noise) {
  std::bernoulli_distribution coin(0.5);
  auto distribution = coin(rng) ? Distribution::uniform : Distribution::gaussian;
  return sample_matrix(expr, k, dom, distribution, rng, noise);
}

DataMatrix sample_matrix(const Expression& expr, std::size_t k, double dom, Distribution distribution, Rng& rng,
                         NoiseSpec noise) {
  if (k == 0) throw std::invalid_argument("sample_matrix: k must be positive");
  if (!(dom > 0.0)) throw std::invalid_argument("sample_matrix: dom must be positive");
  if (noise.sigma < 0.0) throw std::invalid_argument("sample_matrix: sigma must be non-negative");
  if (expr.placeholder_count() != 0) throw std::invalid_argument("sample_matrix: expression has placeholders");

  const CompiledExpr f(expr);
  DataMatrix m;
  m.n_vars = expr.arity();
  m.distribution = distribution;
  m.dom = dom;
  m.x.resize(k * m.n_vars);
  m.y.resize(k);

  std::uniform_real_distribution<double> uniform(-dom, dom);
  std::normal_distribution<double> gaussian(0.0, dom);
  auto draw = [&] { return distribution == Distribution::uniform ? uniform(rng) : gaussian(rng); };

  for (std::size_t i = 0; i < k; ++i) {
    std::span<double> row(m.x.data() + i * m.n_vars, m.n_vars);
    bool ok = false;
    for (std::size_t attempt = 0; attempt < kRowAttempts && !ok; ++attempt) {
      for (double& v : row) v = draw();
      if (auto y = f(row)) {
        m.y[i] = *y;
        ok = true;
      }
    }
    if (!ok) {
      throw UnsatisfiableDomain("no valid input found for row " + std::to_string(i) + " after " +
                                std::to_string(kRowAttempts) + " draws");
    }
  }

  if (noise.sigma > 0.0) {
    std::normal_distribution<double> eps(0.0, noise.sigma);
    for (double& v : m.y) v += eps(rng);
  }
  return m;
}

bool screen(const Expression& expr, double dom, Rng& rng) {
  if (expr.placeholder_count() != 0 || !(dom > 0.0)) return false;
  const CompiledExpr f(expr);
  const std::size_t n_vars = expr.arity();
  std::uniform_real_distribution<double> uniform(-dom, dom);
  std::normal_distribution<double> gaussian(0.0, dom);
  std::vector<double> row(n_vars);
  std::vector<double> ys;

  for (const Distribution d : {Distribution::uniform, Distribution::gaussian}) {
    std::size_t valid = 0;
    for (std::size_t i = 0; i < kScreenRows; ++i) {
      for (double& v : row) v = d == Distribution::uniform ? uniform(rng) : gaussian(rng);
      if (auto y = f(row)) {
        ys.push_back(*y);
        ++valid;
      }
    }
    if (valid < kScreenMinValidRows) return false;
  }

  // Centered on the first value so that a constant sample has exactly zero spread;
  // a rounded mean of huge equal values would leave ulp-sized deviations.
  const double origin = ys.front();
  double mean = 0.0;
  for (double v : ys) mean += v - origin;
  mean /= static_cast<double>(ys.size());
  double ss = 0.0;
  for (double v : ys) ss += (v - origin - mean) * (v - origin - mean);
  const double stddev = std::sqrt(ss / static_cast<double>(ys.size()));
  return std::isfinite(stddev) && stddev > kScreenMinStddev;
}

}  // namespace srkit
