#include "srkit/skeleton.hpp"

#include <algorithm>

#include "overloaded.hpp"
#include "srkit/parse.hpp"

namespace srkit {

namespace {

using detail::overloaded;

Expression strip_coefficients(const Expression& e) {
  return std::visit(overloaded{
                        [&](const BinaryOp& b) {
                          auto left = strip_coefficients(b.left);
                          auto right = (b.kind == BinaryKind::pow && is_structural_exponent(b.right))
                                           ? b.right
                                           : strip_coefficients(b.right);
                          return Expression::binary(b.kind, std::move(left), std::move(right));
                        },
                        [&](const UnaryFn& u) { return Expression::unary(u.kind, strip_coefficients(u.child)); },
                        [](const Constant&) { return Expression::placeholder(); },
                        [&](const auto&) { return e; },
                    },
                    e.node().value);
}

struct FeatureCounter {
  FeatureVector& out;
  std::size_t binary_nodes = 0;
  std::size_t unary_nodes = 0;

  void walk(const Expression& e) {
    std::visit(overloaded{
                   [&](const BinaryOp& b) {
                     ++binary_nodes;
                     out.operators.insert(b.kind);
                     walk(b.left);
                     walk(b.right);
                   },
                   [&](const UnaryFn& u) {
                     ++unary_nodes;
                     out.functions.insert(u.kind);
                     walk(u.child);
                   },
                   [&](const Variable& v) { out.variables.insert(v.index); },
                   [&](const ConstPlaceholder&) { ++out.constant_count; },
                   [](const Constant&) {},
               },
               e.node().value);
  }
};

}  // namespace

Skeleton::Skeleton(Expression placeholder_only)
    : expr_(std::move(placeholder_only)), canonical_(print(expr_)) {}

Skeleton extract_skeleton(const Expression& e) { return Skeleton(strip_coefficients(e)); }

Skeleton parse_skeleton(std::string_view text) { return extract_skeleton(parse(text)); }

std::size_t max_paren_depth(std::string_view text) noexcept {
  std::size_t depth = 0;
  std::size_t best = 0;
  for (char c : text) {
    if (c == '(') {
      best = std::max(best, ++depth);
    } else if (c == ')' && depth > 0) {
      --depth;
    }
  }
  return best;
}

FeatureVector extract_features(const Skeleton& skeleton) {
  FeatureVector fv;
  FeatureCounter counter{fv};
  counter.walk(skeleton.expr());
  fv.structural_pattern = print(skeleton.expr(), PrintOptions{.mask_variables = true});
  fv.complexity_score = counter.binary_nodes + counter.unary_nodes + max_paren_depth(skeleton.canonical_string());
  return fv;
}

}  // namespace srkit
