#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

namespace srkit {

enum class BinaryKind : std::uint8_t { add, sub, mul, div, pow };
enum class UnaryKind : std::uint8_t { sin, cos, arcsin, arctan, exp, log, sqrt };

inline constexpr BinaryKind kAllBinaryKinds[] = {BinaryKind::add, BinaryKind::sub, BinaryKind::mul,
                                                 BinaryKind::div, BinaryKind::pow};
inline constexpr UnaryKind kAllUnaryKinds[] = {UnaryKind::sin, UnaryKind::cos,  UnaryKind::arcsin,
                                               UnaryKind::arctan, UnaryKind::exp, UnaryKind::log,
                                               UnaryKind::sqrt};

/// Operator token as written in equation strings ("+", "-", "*", "/", "**").
std::string_view symbol(BinaryKind kind) noexcept;
/// Function name as written in equation strings ("sin", "arctan", ...).
std::string_view name(UnaryKind kind) noexcept;
std::optional<UnaryKind> unary_from_name(std::string_view name) noexcept;
std::optional<BinaryKind> binary_from_symbol(std::string_view symbol) noexcept;

struct Node;

/// Immutable expression tree. Copies share structure, so passing by value is cheap
/// and instances may be shared freely across threads.
///
/// A default-constructed Expression is a single constant placeholder ("C").
class Expression {
 public:
  Expression();

  static Expression binary(BinaryKind kind, Expression left, Expression right);
  static Expression unary(UnaryKind kind, Expression child);
  static Expression variable(std::uint32_t index);
  static Expression constant(double value);
  static Expression placeholder();

  const Node& node() const noexcept { return *node_; }

  bool is_leaf() const noexcept;
  bool is_placeholder() const noexcept;
  bool is_constant() const noexcept;

  /// Number of nodes in the tree.
  std::size_t size() const noexcept;
  /// Number of node layers; a single leaf has depth 1.
  std::size_t depth() const noexcept;
  /// 1 + the largest variable index, or 0 when no variable appears.
  std::size_t arity() const noexcept;
  std::size_t placeholder_count() const noexcept;

  friend bool operator==(const Expression& a, const Expression& b) noexcept;

 private:
  explicit Expression(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  std::shared_ptr<const Node> node_;
};

struct BinaryOp {
  BinaryKind kind;
  Expression left;
  Expression right;
};

struct UnaryFn {
  UnaryKind kind;
  Expression child;
};

struct Variable {
  std::uint32_t index;
};

struct Constant {
  double value;
};

struct ConstPlaceholder {};

struct Node {
  std::variant<BinaryOp, UnaryFn, Variable, Constant, ConstPlaceholder> value;
  // Cached at construction.
  std::uint32_t size = 1;
  std::uint32_t depth = 1;
  std::uint32_t arity = 0;
  std::uint32_t placeholders = 0;
};

/// Number of layers in the tree; a single leaf has depth 1.
inline std::size_t depth(const Expression& e) noexcept { return e.depth(); }

/// True for an integer-valued Constant sitting in the exponent slot of a pow node.
/// Such exponents are structural (x_0**2) rather than fitted coefficients.
bool is_structural_exponent(const Expression& pow_right) noexcept;

/// Values of the fitted coefficients of `e` (every Constant leaf except structural
/// exponents), in left-to-right order.
std::vector<double> coefficient_values(const Expression& e);

/// Replaces placeholders left to right with `values`; `values.size()` must equal
/// `e.placeholder_count()`.
Expression bind_placeholders(const Expression& e, std::span<const double> values);

/// Checks arity rules and kind ranges independently of how the tree was built.
bool is_well_formed(const Expression& e) noexcept;

}  // namespace srkit
