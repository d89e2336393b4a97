#include "srkit/eval.hpp"

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include "overloaded.hpp"

namespace srkit {

using detail::overloaded;

CompiledExpr::CompiledExpr(const Expression& e) : arity_(e.arity()), placeholders_(e.placeholder_count()) {
  code_.reserve(e.size());
  std::uint32_t next_slot = 0;
  compile(e, next_slot);
  // Postfix stack depth never exceeds the tree depth.
  max_stack_ = e.depth();
}

void CompiledExpr::compile(const Expression& e, std::uint32_t& next_slot) {
  std::visit(overloaded{
                 [&](const BinaryOp& b) {
                   compile(b.left, next_slot);
                   compile(b.right, next_slot);
                   Op op = Op::add;
                   switch (b.kind) {
                     case BinaryKind::add: op = Op::add; break;
                     case BinaryKind::sub: op = Op::sub; break;
                     case BinaryKind::mul: op = Op::mul; break;
                     case BinaryKind::div: op = Op::div; break;
                     case BinaryKind::pow: op = Op::pow; break;
                   }
                   code_.push_back({op});
                 },
                 [&](const UnaryFn& u) {
                   compile(u.child, next_slot);
                   Op op = Op::sin;
                   switch (u.kind) {
                     case UnaryKind::sin: op = Op::sin; break;
                     case UnaryKind::cos: op = Op::cos; break;
                     case UnaryKind::arcsin: op = Op::arcsin; break;
                     case UnaryKind::arctan: op = Op::arctan; break;
                     case UnaryKind::exp: op = Op::exp; break;
                     case UnaryKind::log: op = Op::log; break;
                     case UnaryKind::sqrt: op = Op::sqrt; break;
                   }
                   code_.push_back({op});
                 },
                 [&](const Variable& v) { code_.push_back({Op::variable, v.index}); },
                 [&](const Constant& c) { code_.push_back({Op::constant, 0, c.value}); },
                 [&](const ConstPlaceholder&) {
                   // Leaves are visited left to right, so slots follow reading order.
                   code_.push_back({Op::placeholder, next_slot++});
                 },
             },
             e.node().value);
}

std::optional<double> CompiledExpr::operator()(std::span<const double> x,
                                               std::span<const double> coefficients) const {
  if (x.size() < arity_) {
    throw std::invalid_argument("evaluate: point has " + std::to_string(x.size()) + " coordinates, expression needs " +
                                std::to_string(arity_));
  }
  if (coefficients.size() < placeholders_) {
    throw std::invalid_argument("evaluate: " + std::to_string(placeholders_) + " placeholders but " +
                                std::to_string(coefficients.size()) + " coefficients");
  }

  constexpr std::size_t kInline = 64;
  std::array<double, kInline> inline_stack;
  std::vector<double> heap_stack;
  double* stack = inline_stack.data();
  if (max_stack_ > kInline) {
    heap_stack.resize(max_stack_);
    stack = heap_stack.data();
  }

  std::size_t top = 0;
  for (const Instr& in : code_) {
    double r;
    switch (in.op) {
      case Op::variable: r = x[in.slot]; break;
      case Op::constant: r = in.value; break;
      case Op::placeholder: r = coefficients[in.slot]; break;
      case Op::add: --top; r = stack[top - 1] + stack[top]; --top; break;
      case Op::sub: --top; r = stack[top - 1] - stack[top]; --top; break;
      case Op::mul: --top; r = stack[top - 1] * stack[top]; --top; break;
      case Op::div:
        --top;
        if (std::fabs(stack[top]) < kDivisionGuard) return std::nullopt;
        r = stack[top - 1] / stack[top];
        --top;
        break;
      case Op::pow: --top; r = std::pow(stack[top - 1], stack[top]); --top; break;
      case Op::sin: r = std::sin(stack[--top]); break;
      case Op::cos: r = std::cos(stack[--top]); break;
      case Op::arcsin: {
        double u = stack[--top];
        if (u < -1.0 || u > 1.0) return std::nullopt;
        r = std::asin(u);
        break;
      }
      case Op::arctan: r = std::atan(stack[--top]); break;
      case Op::exp: r = std::exp(stack[--top]); break;
      case Op::log: {
        double u = stack[--top];
        if (u < 0.0) return std::nullopt;
        r = std::log(u);
        break;
      }
      case Op::sqrt: {
        double u = stack[--top];
        if (u < 0.0) return std::nullopt;
        r = std::sqrt(u);
        break;
      }
      default: return std::nullopt;
    }
    if (!std::isfinite(r)) return std::nullopt;
    stack[top++] = r;
  }
  return stack[0];
}

std::optional<double> evaluate(const Expression& e, std::span<const double> x) {
  if (e.placeholder_count() != 0) throw std::invalid_argument("evaluate: expression still contains placeholders");
  return CompiledExpr(e)(x);
}

std::optional<double> evaluate(const Expression& e, std::span<const double> x, std::span<const double> coefficients) {
  return CompiledExpr(e)(x, coefficients);
}

}  // namespace srkit
