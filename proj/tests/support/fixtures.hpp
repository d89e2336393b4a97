#pragma once

#include <algorithm>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "srkit/chat_client.hpp"
#include "srkit/her.hpp"
#include "srkit/sampler.hpp"

namespace srkit::testing {

// 45 rows of y = 2.5*x_0 - 1.25*x_1**2 + 0.5 on a fixed grid; used by the prompt goldens.
inline DataMatrix golden_matrix() {
  DataMatrix m;
  m.n_vars = 2;
  for (int i = 0; i < 45; ++i) {
    const double x0 = -9.0 + 0.4 * i;
    const double x1 = 5.0 - 0.25 * i;
    m.x.push_back(x0);
    m.x.push_back(x1);
    m.y.push_back(2.5 * x0 - 1.25 * x1 * x1 + 0.5);
  }
  return m;
}

inline MemoryBank two_entry_bank() {
  MemoryBank bank;
  bank.merge({{"2.4*x_0 + 0.7", 0.4125, "consider a term in x_1 (residual correlation -0.71)"},
              {"2.5*x_0 - 1.25*x_1**2 + 0.5", 1.0, "fit is adequate; prefer simplification"}});
  return bank;
}

// Emits the strings scripted for the current iteration; anything unscripted
// yields `count` copies of an unparsable string.
class ScriptedGenerator final : public HypothesisGenerator {
 public:
  explicit ScriptedGenerator(std::map<std::size_t, std::vector<std::string>> script) : script_(std::move(script)) {}

  std::vector<std::string> propose(const HypothesisRequest& request) override {
    ++calls;
    std::vector<std::string> out(request.count, "((");
    const auto it = script_.find(request.iteration);
    if (it != script_.end()) {
      for (std::size_t i = 0; i < std::min(out.size(), it->second.size()); ++i) out[i] = it->second[i];
    }
    return out;
  }

  std::size_t calls = 0;

 private:
  std::map<std::size_t, std::vector<std::string>> script_;
};

class ThrowingGenerator final : public HypothesisGenerator {
 public:
  std::vector<std::string> propose(const HypothesisRequest&) override {
    ++calls;
    throw std::runtime_error("backend offline");
  }
  std::size_t calls = 0;
};

class FakeBackend final : public ChatBackend {
 public:
  explicit FakeBackend(std::vector<std::string> replies, bool fail = false) : replies_(std::move(replies)), fail_(fail) {}

  std::string complete(std::span<const ChatMessage> messages, double) override {
    last_messages.assign(messages.begin(), messages.end());
    if (fail_) throw ChatError("offline");
    const std::string r = replies_[next_ % replies_.size()];
    ++next_;
    return r;
  }

  std::vector<ChatMessage> last_messages;

 private:
  std::vector<std::string> replies_;
  bool fail_;
  std::size_t next_ = 0;
};

}  // namespace srkit::testing
