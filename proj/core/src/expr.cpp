#include "srkit/expr.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "overloaded.hpp"

namespace srkit {

namespace {

using detail::overloaded;

std::shared_ptr<const Node> make_leaf(Node node) {
  if (auto* v = std::get_if<Variable>(&node.value)) node.arity = v->index + 1;
  if (std::holds_alternative<ConstPlaceholder>(node.value)) node.placeholders = 1;
  return std::make_shared<const Node>(std::move(node));
}

void collect_coefficients(const Expression& e, std::vector<double>& out) {
  std::visit(overloaded{
                 [&](const BinaryOp& b) {
                   collect_coefficients(b.left, out);
                   if (b.kind == BinaryKind::pow && is_structural_exponent(b.right)) return;
                   collect_coefficients(b.right, out);
                 },
                 [&](const UnaryFn& u) { collect_coefficients(u.child, out); },
                 [&](const Constant& c) { out.push_back(c.value); },
                 [](const auto&) {},
             },
             e.node().value);
}

Expression bind_impl(const Expression& e, std::span<const double> values, std::size_t& next) {
  return std::visit(overloaded{
                        [&](const BinaryOp& b) {
                          auto left = bind_impl(b.left, values, next);
                          auto right = bind_impl(b.right, values, next);
                          return Expression::binary(b.kind, std::move(left), std::move(right));
                        },
                        [&](const UnaryFn& u) {
                          return Expression::unary(u.kind, bind_impl(u.child, values, next));
                        },
                        [&](const ConstPlaceholder&) { return Expression::constant(values[next++]); },
                        [&](const auto&) { return e; },
                    },
                    e.node().value);
}

}  // namespace

std::string_view symbol(BinaryKind kind) noexcept {
  switch (kind) {
    case BinaryKind::add: return "+";
    case BinaryKind::sub: return "-";
    case BinaryKind::mul: return "*";
    case BinaryKind::div: return "/";
    case BinaryKind::pow: return "**";
  }
  return "?";
}

std::string_view name(UnaryKind kind) noexcept {
  switch (kind) {
    case UnaryKind::sin: return "sin";
    case UnaryKind::cos: return "cos";
    case UnaryKind::arcsin: return "arcsin";
    case UnaryKind::arctan: return "arctan";
    case UnaryKind::exp: return "exp";
    case UnaryKind::log: return "log";
    case UnaryKind::sqrt: return "sqrt";
  }
  return "?";
}

std::optional<UnaryKind> unary_from_name(std::string_view text) noexcept {
  for (auto kind : kAllUnaryKinds) {
    if (name(kind) == text) return kind;
  }
  return std::nullopt;
}

std::optional<BinaryKind> binary_from_symbol(std::string_view text) noexcept {
  for (auto kind : kAllBinaryKinds) {
    if (symbol(kind) == text) return kind;
  }
  return std::nullopt;
}

Expression::Expression() : node_(make_leaf(Node{ConstPlaceholder{}})) {}

Expression Expression::binary(BinaryKind kind, Expression left, Expression right) {
  const Node& l = left.node();
  const Node& r = right.node();
  Node node{BinaryOp{kind, left, right}};
  node.size = 1 + l.size + r.size;
  node.depth = 1 + std::max(l.depth, r.depth);
  node.arity = std::max(l.arity, r.arity);
  node.placeholders = l.placeholders + r.placeholders;
  return Expression(std::make_shared<const Node>(std::move(node)));
}

Expression Expression::unary(UnaryKind kind, Expression child) {
  const Node& c = child.node();
  Node node{UnaryFn{kind, child}};
  node.size = 1 + c.size;
  node.depth = 1 + c.depth;
  node.arity = c.arity;
  node.placeholders = c.placeholders;
  return Expression(std::make_shared<const Node>(std::move(node)));
}

Expression Expression::variable(std::uint32_t index) { return Expression(make_leaf(Node{Variable{index}})); }

Expression Expression::constant(double value) { return Expression(make_leaf(Node{Constant{value}})); }

Expression Expression::placeholder() { return Expression(make_leaf(Node{ConstPlaceholder{}})); }

bool Expression::is_leaf() const noexcept {
  return !std::holds_alternative<BinaryOp>(node_->value) && !std::holds_alternative<UnaryFn>(node_->value);
}

bool Expression::is_placeholder() const noexcept { return std::holds_alternative<ConstPlaceholder>(node_->value); }

bool Expression::is_constant() const noexcept { return std::holds_alternative<Constant>(node_->value); }

std::size_t Expression::size() const noexcept { return node_->size; }
std::size_t Expression::depth() const noexcept { return node_->depth; }
std::size_t Expression::arity() const noexcept { return node_->arity; }
std::size_t Expression::placeholder_count() const noexcept { return node_->placeholders; }

bool operator==(const Expression& a, const Expression& b) noexcept {
  if (a.node_ == b.node_) return true;
  const Node& x = a.node();
  const Node& y = b.node();
  if (x.value.index() != y.value.index() || x.size != y.size) return false;
  return std::visit(overloaded{
                        [&](const BinaryOp& p) {
                          const auto& q = std::get<BinaryOp>(y.value);
                          return p.kind == q.kind && p.left == q.left && p.right == q.right;
                        },
                        [&](const UnaryFn& p) {
                          const auto& q = std::get<UnaryFn>(y.value);
                          return p.kind == q.kind && p.child == q.child;
                        },
                        [&](const Variable& p) { return p.index == std::get<Variable>(y.value).index; },
                        [&](const Constant& p) { return p.value == std::get<Constant>(y.value).value; },
                        [](const ConstPlaceholder&) { return true; },
                    },
                    x.value);
}

bool is_structural_exponent(const Expression& pow_right) noexcept {
  const auto* c = std::get_if<Constant>(&pow_right.node().value);
  return c != nullptr && std::isfinite(c->value) && std::trunc(c->value) == c->value;
}

std::vector<double> coefficient_values(const Expression& e) {
  std::vector<double> out;
  collect_coefficients(e, out);
  return out;
}

Expression bind_placeholders(const Expression& e, std::span<const double> values) {
  if (values.size() != e.placeholder_count()) {
    throw std::invalid_argument("bind_placeholders: expected " + std::to_string(e.placeholder_count()) +
                                " values, got " + std::to_string(values.size()));
  }
  std::size_t next = 0;
  return bind_impl(e, values, next);
}

bool is_well_formed(const Expression& e) noexcept {
  return std::visit(overloaded{
                        [](const BinaryOp& b) {
                          auto k = static_cast<unsigned>(b.kind);
                          return k <= static_cast<unsigned>(BinaryKind::pow) && is_well_formed(b.left) &&
                                 is_well_formed(b.right);
                        },
                        [](const UnaryFn& u) {
                          auto k = static_cast<unsigned>(u.kind);
                          return k <= static_cast<unsigned>(UnaryKind::sqrt) && is_well_formed(u.child);
                        },
                        [](const Constant& c) { return std::isfinite(c.value); },
                        [](const auto&) { return true; },
                    },
                    e.node().value);
}

}  // namespace srkit
