#include <algorithm>
#include <iterator>
#include <random>
#include <variant>

#include "overloaded.hpp"
#include "srkit/generator.hpp"
#include "srkit/her.hpp"
#include "srkit/parse.hpp"
#include "srkit/skeleton.hpp"

namespace srkit {

namespace {

constexpr std::size_t kMaxMutantSize = 40;
constexpr double kFreshTreeChance = 0.15;

// Preorder indexing: the root is 0, a left subtree occupies the next left.size() slots.
Expression subtree_at(const Expression& e, std::size_t index) {
  if (index == 0) return e;
  return std::visit(detail::overloaded{
                        [&](const BinaryOp& b) {
                          return index <= b.left.size() ? subtree_at(b.left, index - 1)
                                                        : subtree_at(b.right, index - 1 - b.left.size());
                        },
                        [&](const UnaryFn& u) { return subtree_at(u.child, index - 1); },
                        [&](const auto&) { return e; },
                    },
                    e.node().value);
}

Expression replace_at(const Expression& e, std::size_t index, const Expression& replacement) {
  if (index == 0) return replacement;
  return std::visit(detail::overloaded{
                        [&](const BinaryOp& b) {
                          if (index <= b.left.size()) {
                            return Expression::binary(b.kind, replace_at(b.left, index - 1, replacement), b.right);
                          }
                          return Expression::binary(b.kind, b.left,
                                                    replace_at(b.right, index - 1 - b.left.size(), replacement));
                        },
                        [&](const UnaryFn& u) { return Expression::unary(u.kind, replace_at(u.child, index - 1, replacement)); },
                        [&](const auto&) { return e; },
                    },
                    e.node().value);
}

std::size_t pick_index(const Expression& e, Rng& rng) {
  return std::uniform_int_distribution<std::size_t>(0, e.size() - 1)(rng);
}

Expression fresh_tree(std::size_t n_vars, std::size_t max_depth, Rng& rng) {
  GeneratorConfig cfg;
  cfg.max_vars = n_vars;
  cfg.min_depth = 2;
  cfg.max_depth = max_depth;
  try {
    return generate_tree(cfg, rng);
  } catch (const GenerationExhausted&) {
    const auto j = std::uniform_int_distribution<std::uint32_t>(0, static_cast<std::uint32_t>(n_vars - 1))(rng);
    return Expression::binary(BinaryKind::mul, Expression::placeholder(), Expression::variable(j));
  }
}

Expression swap_operator(const Expression& e, Rng& rng) {
  // Up to size() probes for a non-pow operator node; unchanged if none found.
  for (std::size_t probe = 0; probe < e.size(); ++probe) {
    const std::size_t idx = pick_index(e, rng);
    const Expression node = subtree_at(e, idx);
    if (const auto* b = std::get_if<BinaryOp>(&node.node().value); b && b->kind != BinaryKind::pow) {
      static constexpr BinaryKind kSwappable[] = {BinaryKind::add, BinaryKind::sub, BinaryKind::mul, BinaryKind::div};
      BinaryKind k = b->kind;
      while (k == b->kind) k = kSwappable[std::uniform_int_distribution<int>(0, 3)(rng)];
      return replace_at(e, idx, Expression::binary(k, b->left, b->right));
    }
    if (const auto* u = std::get_if<UnaryFn>(&node.node().value)) {
      UnaryKind k = u->kind;
      const int n = static_cast<int>(std::size(kAllUnaryKinds));
      while (k == u->kind) k = kAllUnaryKinds[std::uniform_int_distribution<int>(0, n - 1)(rng)];
      return replace_at(e, idx, Expression::unary(k, u->child));
    }
  }
  return e;
}

Expression delete_term(const Expression& e, Rng& rng) {
  for (std::size_t probe = 0; probe < e.size(); ++probe) {
    const std::size_t idx = pick_index(e, rng);
    const Expression node = subtree_at(e, idx);
    if (const auto* b = std::get_if<BinaryOp>(&node.node().value); b && b->kind != BinaryKind::pow) {
      const bool keep_left = std::bernoulli_distribution(0.5)(rng);
      return replace_at(e, idx, keep_left ? b->left : b->right);
    }
  }
  return e;
}

Expression mutate(const Expression& parent, std::size_t n_vars, Rng& rng) {
  switch (std::uniform_int_distribution<int>(0, 3)(rng)) {
    case 0:
      return replace_at(parent, pick_index(parent, rng), fresh_tree(n_vars, 3, rng));
    case 1:
      return swap_operator(parent, rng);
    case 2: {
      const BinaryKind k = std::bernoulli_distribution(0.5)(rng) ? BinaryKind::add : BinaryKind::sub;
      const Expression term = Expression::binary(BinaryKind::mul, Expression::placeholder(), fresh_tree(n_vars, 2, rng));
      return Expression::binary(k, parent, term);
    }
    default:
      return delete_term(parent, rng);
  }
}

}  // namespace

std::vector<std::string> LocalMutationGenerator::propose(const HypothesisRequest& request) {
  const std::size_t n_vars = std::max<std::size_t>(request.n_vars, 1);
  std::vector<Expression> parents;
  for (const auto& entry : request.bank.entries()) {
    try {
      parents.push_back(extract_skeleton(parse(entry.equation)).expr());
    } catch (const ParseError&) {
    }
  }

  std::vector<std::string> out;
  out.reserve(request.count);
  Rng& rng = request.rng;
  for (std::size_t i = 0; i < request.count; ++i) {
    Expression candidate;
    if (parents.empty() || std::bernoulli_distribution(kFreshTreeChance)(rng)) {
      candidate = fresh_tree(n_vars, 4, rng);
    } else {
      const auto& parent = parents[std::uniform_int_distribution<std::size_t>(0, parents.size() - 1)(rng)];
      candidate = mutate(parent, n_vars, rng);
      if (candidate.size() > kMaxMutantSize) candidate = fresh_tree(n_vars, 4, rng);
    }
    out.push_back(print(extract_skeleton(candidate).expr()));
  }
  return out;
}

}  // namespace srkit
