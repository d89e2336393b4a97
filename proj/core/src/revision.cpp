#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

#include "srkit/eval.hpp"
#include "srkit/her.hpp"
#include "srkit/parse.hpp"

namespace srkit {

namespace {

constexpr double kAdequateScore = 0.999;
constexpr double kSignBiasFraction = 0.8;
constexpr double kCorrelationThreshold = 0.5;
constexpr double kExcessKurtosisThreshold = 3.0;
constexpr std::size_t kRevisionExcerptRows = 10;

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa <= 0.0 || sbb <= 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

}  // namespace

std::string local_revision_comments(const Expression& fitted, double score, const DataMatrix& data) {
  if (score >= kAdequateScore) return "fit is adequate; prefer simplification";

  const CompiledExpr f(fitted);
  std::vector<double> residual;
  std::vector<std::vector<double>> columns(data.n_vars);
  for (std::size_t i = 0; i < data.rows(); ++i) {
    const auto v = f(data.row(i));
    if (!v) continue;
    residual.push_back(data.y[i] - *v);
    for (std::size_t j = 0; j < data.n_vars; ++j) columns[j].push_back(data.row(i)[j]);
  }
  if (residual.size() < 4) return "candidate fails on most rows; consider a different functional form";

  std::vector<std::string> notes;
  const double n = static_cast<double>(residual.size());
  const auto positive = std::count_if(residual.begin(), residual.end(), [](double r) { return r > 0.0; });
  const auto negative = std::count_if(residual.begin(), residual.end(), [](double r) { return r < 0.0; });
  if (static_cast<double>(positive) >= kSignBiasFraction * n) {
    notes.push_back("residuals are mostly positive; add offset term");
  } else if (static_cast<double>(negative) >= kSignBiasFraction * n) {
    notes.push_back("residuals are mostly negative; remove offset term");
  }

  for (std::size_t j = 0; j < data.n_vars; ++j) {
    const double r = pearson(residual, columns[j]);
    if (std::abs(r) > kCorrelationThreshold) {
      char buf[384];
      std::snprintf(buf, sizeof buf, "consider a term in x_%zu (residual correlation %.2f)", j, r);
      notes.emplace_back(buf);
    }
  }

  double mean = 0.0;
  for (double r : residual) mean += r;
  mean /= n;
  double m2 = 0.0, m4 = 0.0;
  for (double r : residual) {
    const double d = (r - mean) * (r - mean);
    m2 += d;
    m4 += d * d;
  }
  m2 /= n;
  m4 /= n;
  if (m2 > 0.0 && m4 / (m2 * m2) - 3.0 > kExcessKurtosisThreshold) {
    notes.push_back("residuals are heavy-tailed; consider a nonlinear transform");
  }

  if (notes.empty()) return "no systematic residual pattern; consider a different functional form";
  std::string out = notes.front();
  for (std::size_t i = 1; i < notes.size(); ++i) out += "; " + notes[i];
  return out;
}

std::string revise(const Expression& fitted, double score, const DataMatrix& data, ChatBackend* backend,
                   double temperature) {
  if (backend == nullptr) return local_revision_comments(fitted, score, data);

  char buf[64];
  std::string user = "Equation: " + print(fitted) + "\n";
  std::snprintf(buf, sizeof buf, "%.6g", score);
  user += std::string("R^2 on the full data: ") + buf + "\nData excerpt:\n";
  for (std::size_t i = 0; i < std::min(kRevisionExcerptRows, data.rows()); ++i) {
    user += "    ";
    for (std::size_t j = 0; j < data.n_vars; ++j) {
      std::snprintf(buf, sizeof buf, "x_%zu=%.6g, ", j, data.row(i)[j]);
      user += buf;
    }
    std::snprintf(buf, sizeof buf, "y=%.6g\n", data.y[i]);
    user += buf;
  }
  user +=
      "Give up to three concrete suggestions for improving this equation, one per line. Reply with the suggestions "
      "only.\n";

  const std::vector<ChatMessage> messages{{"system", kSystemPrompt}, {"user", std::move(user)}};
  try {
    std::string reply = backend->complete(messages, temperature);
    std::replace(reply.begin(), reply.end(), '\n', ' ');
    while (!reply.empty() && reply.back() == ' ') reply.pop_back();
    if (!reply.empty()) return reply;
  } catch (const std::exception&) {
  }
  return local_revision_comments(fitted, score, data);
}

}  // namespace srkit
