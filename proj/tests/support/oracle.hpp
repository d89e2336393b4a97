#pragma once

#include <array>
#include <string>

namespace srkit::testing {

// Brute-force reimplementation of the six-feature form similarity working
// directly on canonical skeleton strings (regex tokenization, no expression tree).
struct OracleSimilarity {
  double value = 0.0;
  std::array<double, 6> per_feature{};
};

OracleSimilarity oracle_form_similarity(const std::string& pred_canonical, const std::string& truth_canonical);

}  // namespace srkit::testing
