#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "srkit/expr.hpp"
#include "srkit/random.hpp"

namespace srkit {

enum class Distribution { uniform, gaussian };

std::string_view to_string(Distribution d) noexcept;
std::optional<Distribution> distribution_from_string(std::string_view s) noexcept;

inline constexpr double kDefaultDom = 10.0;
inline constexpr std::size_t kDefaultPoints = 200;

/// K rows of (x_0..x_{C-1}, y). `x` is row-major K x C.
struct DataMatrix {
  std::vector<double> x;
  std::vector<double> y;
  std::size_t n_vars = 0;
  Distribution distribution = Distribution::uniform;
  double dom = kDefaultDom;

  std::size_t rows() const noexcept { return y.size(); }
  std::span<const double> row(std::size_t i) const noexcept { return {x.data() + i * n_vars, n_vars}; }

  friend bool operator==(const DataMatrix&, const DataMatrix&) = default;
};

/// Additive zero-mean Gaussian noise on y.
struct NoiseSpec {
  double sigma = 0.0;
};

class UnsatisfiableDomain : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Per-row redraw cap before a matrix is declared unsatisfiable.
inline constexpr std::size_t kRowAttempts = 200;

/// Draws `k` rows for `expr` (which must be fully coefficiented). The distribution,
/// U(-dom, dom) or N(0, dom) with dom as the standard deviation, is picked once per
/// matrix with probability 1/2 each. Rows on which `expr` has a domain error are
/// redrawn; noise, when requested, is added after evaluation.
///
/// Throws UnsatisfiableDomain when some row fails kRowAttempts times.
DataMatrix sample_matrix(const Expression& expr, std::size_t k, double dom, Rng& rng, NoiseSpec noise = {});

/// Same, with the input distribution fixed by the caller.
DataMatrix sample_matrix(const Expression& expr, std::size_t k, double dom, Distribution distribution, Rng& rng,
                         NoiseSpec noise = {});

/// True iff, for each input distribution, at least 16 of 64 independent draws
/// evaluate, and the pooled y values have standard deviation above 1e-8.
bool screen(const Expression& expr, double dom, Rng& rng);

}  // namespace srkit
