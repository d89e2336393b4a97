#include "srkit/generator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <map>

#include "srkit/sampler.hpp"

namespace srkit {

namespace {

constexpr double kCoefficientBound = 5.0;
constexpr double kCoefficientFloor = 0.1;

// Mutable draft used while holes are being filled.
struct Draft {
  enum class Kind { hole, binary, unary, variable, placeholder, exponent } kind = Kind::hole;
  BinaryKind binary = BinaryKind::add;
  UnaryKind unary = UnaryKind::sin;
  std::uint32_t index = 0;
  int exponent = 2;
  std::size_t left = 0;
  std::size_t right = 0;
  std::size_t depth = 1;
  bool allow_placeholder = true;
};

bool contains(const std::vector<BinaryKind>& pool, BinaryKind k) {
  return std::find(pool.begin(), pool.end(), k) != pool.end();
}

class TreeBuilder {
 public:
  TreeBuilder(const GeneratorConfig& cfg, Rng& rng, std::uint32_t n_vars) : cfg_(cfg), rng_(rng), n_vars_(n_vars) {}

  Expression build() {
    nodes_.clear();
    std::deque<std::size_t> holes{add_hole(1, true)};
    while (!holes.empty()) {
      std::size_t h = holes.front();
      holes.pop_front();
      fill(h, holes);
    }
    return to_expression(0);
  }

 private:
  std::size_t add_hole(std::size_t depth, bool allow_placeholder) {
    Draft d;
    d.depth = depth;
    d.allow_placeholder = allow_placeholder;
    nodes_.push_back(d);
    return nodes_.size() - 1;
  }

  std::size_t add_leaf(Draft::Kind kind, std::size_t depth) {
    Draft d;
    d.kind = kind;
    d.depth = depth;
    nodes_.push_back(d);
    return nodes_.size() - 1;
  }

  void fill(std::size_t h, std::deque<std::size_t>& holes) {
    const std::size_t depth = nodes_[h].depth;
    double w_binary = cfg_.binary_pool.empty() ? 0.0 : cfg_.p_binary;
    double w_unary = cfg_.unary_pool.empty() ? 0.0 : cfg_.p_unary;
    double w_terminal = cfg_.p_terminal;
    if (depth >= cfg_.max_depth) w_binary = w_unary = 0.0;
    if (w_terminal <= 0.0 && w_binary <= 0.0 && w_unary <= 0.0) w_terminal = 1.0;

    std::uniform_real_distribution<double> u(0.0, w_binary + w_unary + w_terminal);
    const double r = u(rng_);
    if (r < w_binary) {
      fill_binary(h, depth, holes);
    } else if (r < w_binary + w_unary) {
      std::uniform_int_distribution<std::size_t> pick(0, cfg_.unary_pool.size() - 1);
      nodes_[h].kind = Draft::Kind::unary;
      nodes_[h].unary = cfg_.unary_pool[pick(rng_)];
      std::size_t child = add_hole(depth + 1, true);
      nodes_[h].left = child;
      holes.push_back(child);
    } else {
      fill_terminal(h);
    }
  }

  void fill_binary(std::size_t h, std::size_t depth, std::deque<std::size_t>& holes) {
    std::uniform_int_distribution<std::size_t> pick(0, cfg_.binary_pool.size() - 1);
    const BinaryKind kind = cfg_.binary_pool[pick(rng_)];
    nodes_[h].kind = Draft::Kind::binary;
    nodes_[h].binary = kind;

    if (kind == BinaryKind::pow) {
      std::size_t base = add_hole(depth + 1, true);
      std::uniform_int_distribution<int> exponent(2, 4);
      std::size_t exp_node = add_leaf(Draft::Kind::exponent, depth + 1);
      nodes_[exp_node].exponent = exponent(rng_);
      nodes_[h].left = base;
      nodes_[h].right = exp_node;
      holes.push_back(base);
      return;
    }

    const bool can_wrap = (kind == BinaryKind::add || kind == BinaryKind::sub) &&
                          contains(cfg_.binary_pool, BinaryKind::mul) && depth + 2 <= cfg_.max_depth;
    std::bernoulli_distribution wrap(cfg_.p_coefficient_wrap);
    std::size_t operands[2];
    for (std::size_t& slot : operands) {
      if (can_wrap && wrap(rng_)) {
        Draft m;
        m.kind = Draft::Kind::binary;
        m.binary = BinaryKind::mul;
        m.depth = depth + 1;
        nodes_.push_back(m);
        std::size_t mul = nodes_.size() - 1;
        std::size_t coeff = add_leaf(Draft::Kind::placeholder, depth + 2);
        std::size_t operand = add_hole(depth + 2, false);
        nodes_[mul].left = coeff;
        nodes_[mul].right = operand;
        holes.push_back(operand);
        slot = mul;
      } else {
        slot = add_hole(depth + 1, true);
        holes.push_back(slot);
      }
    }
    nodes_[h].left = operands[0];
    nodes_[h].right = operands[1];
  }

  void fill_terminal(std::size_t h) {
    std::bernoulli_distribution variable(cfg_.p_variable);
    if (!nodes_[h].allow_placeholder || variable(rng_)) {
      std::uniform_int_distribution<std::uint32_t> pick(0, n_vars_ - 1);
      nodes_[h].kind = Draft::Kind::variable;
      nodes_[h].index = pick(rng_);
    } else {
      nodes_[h].kind = Draft::Kind::placeholder;
    }
  }

  Expression to_expression(std::size_t i) const {
    const Draft& d = nodes_[i];
    switch (d.kind) {
      case Draft::Kind::binary: return Expression::binary(d.binary, to_expression(d.left), to_expression(d.right));
      case Draft::Kind::unary: return Expression::unary(d.unary, to_expression(d.left));
      case Draft::Kind::variable: return Expression::variable(d.index);
      case Draft::Kind::exponent: return Expression::constant(static_cast<double>(d.exponent));
      case Draft::Kind::placeholder:
      case Draft::Kind::hole: break;
    }
    return Expression::placeholder();
  }

  const GeneratorConfig& cfg_;
  Rng& rng_;
  std::uint32_t n_vars_;
  std::vector<Draft> nodes_;
};

bool uses_all_variables(const Expression& e, std::size_t n_vars) {
  std::vector<bool> seen(n_vars, false);
  std::vector<Expression> stack{e};
  while (!stack.empty()) {
    Expression cur = stack.back();
    stack.pop_back();
    const auto& v = cur.node().value;
    if (const auto* b = std::get_if<BinaryOp>(&v)) {
      stack.push_back(b->left);
      stack.push_back(b->right);
    } else if (const auto* u = std::get_if<UnaryFn>(&v)) {
      stack.push_back(u->child);
    } else if (const auto* var = std::get_if<Variable>(&v)) {
      if (var->index < n_vars) seen[var->index] = true;
    }
  }
  return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
}

std::string record_id(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "eq%06zu", i);
  return buf;
}

}  // namespace

void GeneratorConfig::validate() const {
  if (max_vars == 0) throw std::invalid_argument("max_vars must be positive");
  if (min_depth < 2) throw std::invalid_argument("min_depth must be at least 2");
  if (max_depth < min_depth) throw std::invalid_argument("max_depth must be >= min_depth");
  if (unary_pool.empty() && binary_pool.empty()) throw std::invalid_argument("operator pools are both empty");
  if (p_binary < 0 || p_unary < 0 || p_terminal < 0) throw std::invalid_argument("negative hole probability");
  if (!(dom > 0.0)) throw std::invalid_argument("dom must be positive");
}

std::string_view to_string(Split s) noexcept { return s == Split::train ? "train" : "test"; }

Expression generate_tree(const GeneratorConfig& cfg, Rng& rng) {
  cfg.validate();
  std::uniform_int_distribution<std::uint32_t> vars(1, static_cast<std::uint32_t>(cfg.max_vars));
  for (std::size_t attempt = 0; attempt < kTreeAttempts; ++attempt) {
    const std::uint32_t n_vars = vars(rng);
    Expression tree = TreeBuilder(cfg, rng, n_vars).build();
    if (uses_all_variables(tree, n_vars)) return tree;
  }
  throw GenerationExhausted("generate_tree: no tree used every declared variable in " +
                            std::to_string(kTreeAttempts) + " attempts");
}

Expression instantiate_coefficients(const Skeleton& skeleton, Rng& rng) {
  std::uniform_real_distribution<double> coeff(-kCoefficientBound, kCoefficientBound);
  std::vector<double> values(skeleton.expr().placeholder_count());
  for (double& v : values) {
    double c = 0.0;
    do {
      c = coeff(rng);
    } while (std::fabs(c) < kCoefficientFloor);
    v = std::round(c * 1000.0) / 1000.0;
  }
  return bind_placeholders(skeleton.expr(), values);
}

bool is_unique(const Skeleton& skeleton, const std::unordered_set<std::string>& seen) {
  return !seen.contains(skeleton.canonical_string());
}

std::vector<EquationRecord> generate_corpus(const GeneratorConfig& cfg) {
  cfg.validate();
  std::vector<EquationRecord> out;
  out.reserve(cfg.target_count);
  if (cfg.target_count == 0) return out;

  Rng rng(derive_seed(cfg.seed, 0));
  std::unordered_set<std::string> seen;
  const std::size_t budget = kCorpusAttemptsPerRecord * cfg.target_count;

  for (std::size_t attempt = 0; attempt < budget && out.size() < cfg.target_count; ++attempt) {
    Expression tree = generate_tree(cfg, rng);
    if (tree.depth() < cfg.min_depth || tree.depth() > cfg.max_depth) continue;
    Skeleton skeleton = extract_skeleton(tree);
    if (!is_unique(skeleton, seen)) continue;
    Expression expr = instantiate_coefficients(skeleton, rng);
    if (!screen(expr, cfg.dom, rng)) continue;

    seen.insert(skeleton.canonical_string());
    EquationRecord rec;
    rec.id = record_id(out.size());
    rec.n_vars = expr.arity();
    rec.depth = expr.depth();
    rec.expression = std::move(expr);
    rec.skeleton = std::move(skeleton);
    out.push_back(std::move(rec));
  }
  if (out.size() < cfg.target_count) {
    throw GenerationExhausted("generate_corpus: produced " + std::to_string(out.size()) + " of " +
                              std::to_string(cfg.target_count) + " records within " + std::to_string(budget) +
                              " attempts");
  }
  return out;
}

std::pair<std::vector<EquationRecord>, std::vector<EquationRecord>> split_by_skeleton(
    std::vector<EquationRecord> records, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw std::invalid_argument("split_by_skeleton: test_fraction must lie in (0, 1)");
  }
  for (auto& rec : records) rec.split = Split::train;

  // Group record indices by skeleton, in order of first appearance.
  std::map<std::string, std::size_t> group_of;
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < records.size(); ++i) {
    auto [it, inserted] = group_of.try_emplace(records[i].skeleton.canonical_string(), groups.size());
    if (inserted) groups.emplace_back();
    groups[it->second].push_back(i);
  }

  std::vector<std::size_t> order(groups.size());
  for (std::size_t g = 0; g < order.size(); ++g) order[g] = g;
  Rng rng(derive_seed(seed, 1));
  std::shuffle(order.begin(), order.end(), rng);

  const auto target = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(records.size())));
  std::size_t test_count = 0;
  for (std::size_t g : order) {
    if (test_count >= target) break;
    for (std::size_t i : groups[g]) records[i].split = Split::test;
    test_count += groups[g].size();
  }

  std::pair<std::vector<EquationRecord>, std::vector<EquationRecord>> out;
  std::unordered_set<std::string> train_skeletons;
  for (auto& rec : records) {
    if (rec.split == Split::train) {
      train_skeletons.insert(rec.skeleton.canonical_string());
      out.first.push_back(std::move(rec));
    } else {
      out.second.push_back(std::move(rec));
    }
  }
  for (const auto& rec : out.second) {
    if (train_skeletons.contains(rec.skeleton.canonical_string())) {
      throw std::logic_error("split_by_skeleton: skeleton " + rec.skeleton.canonical_string() + " in both splits");
    }
  }
  return out;
}

}  // namespace srkit
