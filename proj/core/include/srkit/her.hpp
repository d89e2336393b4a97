#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "srkit/chat_client.hpp"
#include "srkit/fitter.hpp"
#include "srkit/random.hpp"
#include "srkit/sampler.hpp"

namespace srkit {

/// (equation, R^2, revision comments). `equation` carries fitted constants.
struct MemoryEntry {
  std::string equation;
  double score = 0.0;
  std::string comments;

  friend bool operator==(const MemoryEntry&, const MemoryEntry&) = default;
};

inline constexpr std::size_t kMemoryCapacity = 5;

/// Top-k store of hypotheses ordered by score, descending; ties keep insertion
/// order. Entries sharing a skeleton collapse to the higher-scoring one.
class MemoryBank {
 public:
  explicit MemoryBank(std::size_t capacity = kMemoryCapacity) : capacity_(capacity) {}

  /// Adds candidates and discards the weakest beyond capacity.
  void merge(const std::vector<MemoryEntry>& candidates);

  std::vector<MemoryEntry> entries() const;
  std::size_t size() const noexcept { return slots_.size(); }
  bool empty() const noexcept { return slots_.empty(); }
  std::size_t capacity() const noexcept { return capacity_; }
  /// Highest-scoring entry; throws std::out_of_range when empty.
  const MemoryEntry& best() const;

 private:
  struct Slot {
    MemoryEntry entry;
    std::string skeleton;
    std::uint64_t sequence = 0;
  };

  std::vector<Slot> slots_;
  std::size_t capacity_;
  std::uint64_t next_sequence_ = 0;
};

enum class GeneratorBackend { chat, local };

struct SearchConfig {
  std::size_t iterations = 5;
  std::size_t hypotheses_per_iter = 6;
  std::size_t prompt_points = 40;
  std::size_t verify_points = 5;
  GeneratorBackend generator = GeneratorBackend::local;
  double temperature = 0.7;
  std::uint64_t seed = 0;
  FitBudget fit{};

  /// Throws std::invalid_argument when inconsistent with a matrix of `rows` rows.
  void validate(std::size_t rows) const;
};

using Prompt = std::vector<ChatMessage>;

/// System text sent with every hypothesis request.
extern const char* const kSystemPrompt;

/// Message sequence: system text, then one user message holding the instruction
/// block, the memory block (omitted when the bank is empty) and the data block with
/// prompt_points shown rows followed by verify_points held-out rows.
Prompt build_prompt(const DataMatrix& data, const MemoryBank& bank, const SearchConfig& cfg);

/// Plain-text rendering of a prompt ("### role" headers), used for golden files.
std::string render_prompt(const Prompt& prompt);

struct HypothesisRequest {
  const Prompt& prompt;
  const MemoryBank& bank;
  std::size_t n_vars;
  std::size_t count;
  double temperature;
  Rng& rng;
  /// 1-based iteration index.
  std::size_t iteration;
};

/// Proposes candidate equation strings; must return exactly `request.count` of them
/// (they may be invalid). May throw to signal a backend failure.
class HypothesisGenerator {
 public:
  virtual ~HypothesisGenerator() = default;
  virtual std::vector<std::string> propose(const HypothesisRequest& request) = 0;
};

/// Sends the prompt to a chat backend once per requested hypothesis.
class ChatHypothesisGenerator final : public HypothesisGenerator {
 public:
  explicit ChatHypothesisGenerator(ChatBackend& backend) : backend_(backend) {}
  std::vector<std::string> propose(const HypothesisRequest& request) override;

 private:
  ChatBackend& backend_;
};

/// Offline generator: mutates bank members (subtree replacement, operator swap,
/// term insertion, term deletion) or draws fresh random trees when the bank is empty.
class LocalMutationGenerator final : public HypothesisGenerator {
 public:
  std::vector<std::string> propose(const HypothesisRequest& request) override;
};

/// Templated comments from residual statistics of `fitted` on `data`.
std::string local_revision_comments(const Expression& fitted, double score, const DataMatrix& data);

/// Revision comments for one hypothesis. With a backend, asks it for improvement
/// suggestions and falls back to local_revision_comments on any failure.
std::string revise(const Expression& fitted, double score, const DataMatrix& data, ChatBackend* backend,
                   double temperature = 0.7);

struct IterationRecord {
  std::size_t iteration = 0;
  std::size_t proposed = 0;
  std::size_t valid = 0;
  bool generator_failed = false;
  double best_score = 0.0;
  std::vector<MemoryEntry> bank;
};

struct SearchState {
  explicit SearchState(const DataMatrix& matrix, std::uint64_t seed = 0) : data(matrix), rng(derive_seed(seed, 3)) {}

  const DataMatrix& data;
  MemoryBank bank;
  std::size_t iteration = 0;
  Rng rng;
  std::vector<IterationRecord> trace;
};

inline constexpr std::size_t kGeneratorAttempts = 3;

/// One Hypothesis / Experiment / Revision round. Invalid candidates are dropped,
/// survivors are fitted and scored on every row, commented, and merged into the bank.
void run_iteration(SearchState& state, HypothesisGenerator& generator, const SearchConfig& cfg,
                   ChatBackend* reviser = nullptr);

class SearchError : public std::runtime_error {
 public:
  enum class Kind { empty_search, generator_failure, no_valid_candidates };
  SearchError(Kind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

struct SearchResult {
  MemoryEntry best;
  std::vector<IterationRecord> trace;
};

/// Runs cfg.iterations rounds and returns the bank head plus per-iteration snapshots.
SearchResult search(const DataMatrix& data, const SearchConfig& cfg, HypothesisGenerator& generator,
                    ChatBackend* reviser = nullptr);

}  // namespace srkit
