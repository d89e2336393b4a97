#include "srkit/her.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>
#include <unordered_map>

#include "srkit/metrics.hpp"
#include "srkit/parse.hpp"
#include "srkit/rewards.hpp"
#include "srkit/skeleton.hpp"

namespace srkit {

namespace {

std::string format_g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void append_row(std::string& out, const DataMatrix& data, std::size_t i) {
  out += "    ";
  const auto x = data.row(i);
  for (std::size_t j = 0; j < x.size(); ++j) {
    out += "x_" + std::to_string(j) + "=" + format_g(x[j]) + ", ";
  }
  out += "y=" + format_g(data.y[i]) + "\n";
}

std::string skeleton_key(const std::string& equation) {
  try {
    return extract_skeleton(parse(equation)).canonical_string();
  } catch (const ParseError&) {
    return equation;
  }
}

}  // namespace

void MemoryBank::merge(const std::vector<MemoryEntry>& candidates) {
  std::vector<Slot> pool = std::move(slots_);
  for (const auto& c : candidates) pool.push_back({c, skeleton_key(c.equation), next_sequence_++});

  std::stable_sort(pool.begin(), pool.end(), [](const Slot& a, const Slot& b) {
    if (a.entry.score != b.entry.score) return a.entry.score > b.entry.score;
    return a.sequence < b.sequence;
  });

  // First occurrence of a skeleton in sorted order is its best.
  slots_.clear();
  std::unordered_map<std::string, bool> seen;
  for (auto& s : pool) {
    if (slots_.size() == capacity_) break;
    if (!seen.emplace(s.skeleton, true).second) continue;
    slots_.push_back(std::move(s));
  }
}

std::vector<MemoryEntry> MemoryBank::entries() const {
  std::vector<MemoryEntry> out;
  out.reserve(slots_.size());
  for (const auto& s : slots_) out.push_back(s.entry);
  return out;
}

const MemoryEntry& MemoryBank::best() const {
  if (slots_.empty()) throw std::out_of_range("memory bank is empty");
  return slots_.front().entry;
}

void SearchConfig::validate(std::size_t rows) const {
  if (hypotheses_per_iter == 0) throw std::invalid_argument("hypotheses_per_iter must be at least 1");
  if (prompt_points == 0 || verify_points == 0) throw std::invalid_argument("prompt_points and verify_points must be positive");
  if (prompt_points + verify_points > rows) {
    throw std::invalid_argument("prompt_points + verify_points exceeds the " + std::to_string(rows) + " data rows");
  }
  if (!(temperature >= 0.0)) throw std::invalid_argument("temperature must be non-negative");
}

const char* const kSystemPrompt =
    "You are an exceptional symbolic regression assistant.\n"
    "Your specialty lies in analyzing numerical relationships among data and variables.\n"
    "When provided with mathematical questions or data from humans, you carefully comprehend the essence of the "
    "problem, methodically clarify relationships among variables.\n"
    "Ultimately, you output a precise, concise, and interpretable mathematical formula.";

Prompt build_prompt(const DataMatrix& data, const MemoryBank& bank, const SearchConfig& cfg) {
  cfg.validate(data.rows());

  std::string user =
      "You will be provided with a set of input-output pairs.\n"
      "Based on these data, infer the mathematical relationship between y and multiple input variables.\n"
      "Please note that the possible mathematical operations include: +, -, *, /, exp, log, sqrt, sin, arcsin, "
      "and constant terms.\n";

  if (!bank.empty()) {
    const auto entries = bank.entries();
    user +=
        "\nYou can refer to the previously proposed formulas and their corresponding fitness scores (higher is "
        "better), which are stored in pred_dict:\n";
    for (std::size_t i = 0; i < entries.size(); ++i) {
      user += std::to_string(i) + ": [" + entries[i].equation + ", " + format_g(entries[i].score) + "]\n";
    }
    user += "Based on the analysis, here are some suggestions for improvement:\n";
    for (const auto& e : entries) {
      if (!e.comments.empty()) user += "- " + e.comments + "\n";
    }
    user += "Please consider these suggestions when generating new formulas.\n";
  }

  user += "\nThe input sample data are as follows:\n";
  for (std::size_t i = 0; i < cfg.prompt_points; ++i) append_row(user, data, i);
  user +=
      "Based on the above data, please infer the possible formula.\n"
      "Ensure that your inference applies to all the provided data points, and consider both linear and nonlinear "
      "combinations.\n"
      "Verify whether your formula applies to the following new data point and adjust it to ensure accuracy:\n";
  for (std::size_t i = cfg.prompt_points; i < cfg.prompt_points + cfg.verify_points; ++i) append_row(user, data, i);
  user +=
      "Finally, please output only the formula string you inferred (e.g. y = 2.52*x_0 + x_1 + 5.4), without any "
      "additional information.\n"
      "Do not include any explanation, text, or extra information, only return the expression string.\n";

  return {{"system", kSystemPrompt}, {"user", std::move(user)}};
}

std::string render_prompt(const Prompt& prompt) {
  std::string out;
  for (const auto& m : prompt) {
    out += "### " + m.role + "\n" + m.content;
    if (m.content.empty() || m.content.back() != '\n') out += '\n';
  }
  return out;
}

std::vector<std::string> ChatHypothesisGenerator::propose(const HypothesisRequest& request) {
  std::vector<std::string> out;
  out.reserve(request.count);
  for (std::size_t i = 0; i < request.count; ++i) {
    out.push_back(backend_.complete(request.prompt, request.temperature));
  }
  return out;
}

void run_iteration(SearchState& state, HypothesisGenerator& generator, const SearchConfig& cfg, ChatBackend* reviser) {
  const DataMatrix& data = state.data;
  ++state.iteration;
  IterationRecord record;
  record.iteration = state.iteration;

  const Prompt prompt = build_prompt(data, state.bank, cfg);
  std::vector<std::string> raw;
  for (std::size_t attempt = 0; attempt < kGeneratorAttempts; ++attempt) {
    try {
      raw = generator.propose({prompt, state.bank, data.n_vars, cfg.hypotheses_per_iter, cfg.temperature, state.rng,
                               state.iteration});
      break;
    } catch (const std::exception&) {
      raw.clear();
      if (attempt + 1 == kGeneratorAttempts) record.generator_failed = true;
    }
  }
  record.proposed = raw.size();

  const std::uint64_t probe_seed = derive_seed(cfg.seed, 1000 + state.iteration);
  FitBudget budget = cfg.fit;
  std::vector<MemoryEntry> survivors;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const std::string text = extract_equation(raw[i]);
    if (format_reward(text, data.n_vars, probe_seed) < 0.0) continue;
    budget.seed = derive_seed(cfg.seed, (state.iteration << 16) + i);
    FitResult fitted;
    try {
      fitted = refine(parse(text), data, budget);
    } catch (const FitError&) {
      continue;
    }
    if (fitted.r2 == kR2Sentinel) continue;
    const std::string equation = print(fitted.expression);
    survivors.push_back({equation, fitted.r2, revise(fitted.expression, fitted.r2, data, reviser, cfg.temperature)});
  }
  record.valid = survivors.size();

  state.bank.merge(survivors);
  record.bank = state.bank.entries();
  record.best_score = state.bank.empty() ? kR2Sentinel : state.bank.best().score;
  state.trace.push_back(std::move(record));
}

SearchResult search(const DataMatrix& data, const SearchConfig& cfg, HypothesisGenerator& generator,
                    ChatBackend* reviser) {
  if (cfg.iterations == 0) throw SearchError(SearchError::Kind::empty_search, "empty-search: iterations is 0");
  cfg.validate(data.rows());

  SearchState state(data, cfg.seed);
  for (std::size_t it = 0; it < cfg.iterations; ++it) run_iteration(state, generator, cfg, reviser);

  if (state.bank.empty()) {
    const bool all_failed = std::all_of(state.trace.begin(), state.trace.end(),
                                        [](const IterationRecord& r) { return r.generator_failed; });
    if (all_failed) {
      throw SearchError(SearchError::Kind::generator_failure, "generator-failure: every iteration failed to generate");
    }
    throw SearchError(SearchError::Kind::no_valid_candidates, "no valid candidate in any iteration");
  }
  return {state.bank.best(), std::move(state.trace)};
}

}  // namespace srkit
