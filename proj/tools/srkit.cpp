// srkit command-line front end: corpus generation, statistics, evaluation,
// reward scoring, single-skeleton fitting and HER search.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "srkit/chat_client.hpp"
#include "srkit/dataset.hpp"
#include "srkit/evaluation.hpp"
#include "srkit/fitter.hpp"
#include "srkit/generator.hpp"
#include "srkit/her.hpp"
#include "srkit/parse.hpp"
#include "srkit/sampler.hpp"
#include "srkit/skeleton.hpp"

namespace {

using namespace srkit;
using json = nlohmann::json;

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path);
}

const DatasetRecord& find_record(const std::vector<DatasetRecord>& data, const std::string& id) {
  const auto it = std::find_if(data.begin(), data.end(), [&](const DatasetRecord& r) { return r.equation.id == id; });
  if (it == data.end()) throw UnknownId("unknown-id: no record '" + id + "'");
  return *it;
}

struct GenerateArgs {
  GeneratorConfig gen;
  std::size_t points = kDefaultPoints;
  double test_fraction = 0.0;
  double noise_sigma = 0.0;
  std::string out;
};

int run_generate(const GenerateArgs& a) {
  std::vector<EquationRecord> all = generate_corpus(a.gen);
  // A zero fraction keeps every record in train.
  if (a.test_fraction > 0.0) {
    auto [train, test] = split_by_skeleton(std::move(all), a.test_fraction, a.gen.seed);
    all = std::move(train);
    all.insert(all.end(), std::make_move_iterator(test.begin()), std::make_move_iterator(test.end()));
  }
  std::sort(all.begin(), all.end(), [](const auto& l, const auto& r) { return l.id < r.id; });

  const std::uint64_t matrix_seed = derive_seed(a.gen.seed, 2);
  std::vector<DatasetRecord> out;
  out.reserve(all.size());
  for (std::size_t i = 0; i < all.size(); ++i) {
    Rng rng(derive_seed(matrix_seed, i));
    DataMatrix m = sample_matrix(all[i].expression, a.points, a.gen.dom, rng, NoiseSpec{a.noise_sigma});
    out.push_back({std::move(all[i]), std::move(m), a.noise_sigma});
  }
  write_dataset(out, a.out);
  std::fprintf(stderr, "wrote %zu records to %s\n", out.size(), a.out.c_str());
  return 0;
}

int run_stats(const std::string& data) {
  const auto records = read_dataset(data);
  std::cout << to_json(corpus_stats(records)) << '\n';
  return 0;
}

struct EvaluateArgs {
  std::string data;
  std::string pred;
  double tau = kDefaultTau;
  std::string report;
  bool timing = false;
  FitBudget budget;
};

int run_evaluate(const EvaluateArgs& a) {
  const auto start = std::chrono::steady_clock::now();
  const auto records = read_dataset(a.data);
  std::map<std::string, std::string> predictions;
  for (auto& p : read_predictions(a.pred)) predictions[p.id] = std::move(p.text);

  RunReport report = evaluate_predictions(records, predictions, a.tau, a.budget);
  report.config["data"] = a.data;
  report.config["pred"] = a.pred;
  if (a.timing) {
    report.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  write_text(a.report, to_json(report) + "\n");
  const auto& s = report.summary;
  std::fprintf(stderr, "n=%zu  S_struct=%.4f  R2=%.4f  Acc=%.4f\n", s.count, s.s_struct, s.r2, s.acc_tau);
  return 0;
}

RewardWeights parse_weights(const std::string& text) {
  std::vector<double> w;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) w.push_back(std::stod(part));
  if (w.size() != 4) throw CLI::ValidationError("--weights", "expected four comma-separated numbers");
  return {w[0], w[1], w[2], w[3]};
}

int run_reward(const std::string& data, const std::string& pred, const std::string& weights, const std::string& out,
               const FitBudget& budget) {
  const auto records = read_dataset(data);
  const auto predictions = read_predictions(pred);
  std::string text;
  for (const auto& row : score_rewards(records, predictions, parse_weights(weights), budget)) {
    text += to_json_line(row) + "\n";
  }
  write_text(out, text);
  return 0;
}

int run_fit(const std::string& skeleton, const std::string& data, const std::string& id, const FitBudget& budget) {
  const auto records = read_dataset(data);
  const DatasetRecord& r = find_record(records, id);
  const FitResult f = fit(parse_skeleton(skeleton), r.data, budget);
  const json j = {{"id", id},
                  {"skeleton", parse_skeleton(skeleton).canonical_string()},
                  {"expression", print(f.expression)},
                  {"coefficients", f.coefficients},
                  {"r2", f.r2},
                  {"objective", f.objective},
                  {"restarts", f.n_restarts_used},
                  {"converged", f.converged}};
  std::cout << j.dump(2) << '\n';
  return 0;
}

struct SearchArgs {
  std::string data;
  std::string id;
  SearchConfig cfg;
  std::string backend = "local";
  std::string report;
};

int run_search(SearchArgs a) {
  const auto records = read_dataset(a.data);
  const DatasetRecord& r = find_record(records, a.id);

  std::unique_ptr<ChatClient> client;
  std::unique_ptr<HypothesisGenerator> generator;
  if (a.backend == "chat") {
    a.cfg.generator = GeneratorBackend::chat;
    client = std::make_unique<ChatClient>(ChatConfig::from_environment());
    generator = std::make_unique<ChatHypothesisGenerator>(*client);
  } else {
    a.cfg.generator = GeneratorBackend::local;
    generator = std::make_unique<LocalMutationGenerator>();
  }
  const SearchResult result = search(r.data, a.cfg, *generator, client.get());
  write_text(a.report, to_json(result) + "\n");
  std::fprintf(stderr, "best: %s  (R2=%.6g)\n", result.best.equation.c_str(), result.best.score);
  return 0;
}

void add_budget_options(CLI::App* cmd, FitBudget& b) {
  cmd->add_option("--restarts", b.restarts, "Fitter multi-start count")->capture_default_str();
  cmd->add_option("--fit-iterations", b.max_iterations, "Simplex iterations per start")->capture_default_str();
  cmd->add_option("--fit-seed", b.seed, "Seed for random fitter starts")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Symbolic-regression benchmark generation, evaluation and search"};
  app.set_config("--config", "", "Read options from an INI/TOML file");
  app.require_subcommand(1);

  GenerateArgs gen;
  gen.gen.target_count = 0;
  auto* g = app.add_subcommand("generate", "Generate an equation corpus with sampled data");
  g->add_option("--count", gen.gen.target_count, "Number of equations")->required();
  g->add_option("--seed", gen.gen.seed, "Master seed")->capture_default_str();
  g->add_option("--max-vars", gen.gen.max_vars, "Maximum input variables")->capture_default_str();
  g->add_option("--min-depth", gen.gen.min_depth, "Minimum tree depth")->capture_default_str();
  g->add_option("--max-depth", gen.gen.max_depth, "Maximum tree depth")->capture_default_str();
  g->add_option("--dom", gen.gen.dom, "Sampling range / standard deviation")->capture_default_str();
  g->add_option("--points", gen.points, "Rows per data matrix")->capture_default_str();
  g->add_option("--test-fraction", gen.test_fraction, "Fraction of skeletons held out")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  g->add_option("--noise-sigma", gen.noise_sigma, "Additive Gaussian noise on y")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  g->add_option("--out", gen.out, "Output JSONL path")->required();

  std::string stats_data;
  auto* st = app.add_subcommand("stats", "Summarize a dataset file");
  st->add_option("--data", stats_data, "Dataset JSONL")->required()->check(CLI::ExistingFile);

  EvaluateArgs ev;
  auto* e = app.add_subcommand("evaluate", "Score predictions against a dataset");
  e->add_option("--data", ev.data, "Dataset JSONL")->required()->check(CLI::ExistingFile);
  e->add_option("--pred", ev.pred, "Predictions JSONL {id, prediction}")->required()->check(CLI::ExistingFile);
  e->add_option("--tau", ev.tau, "Acc tolerance")->capture_default_str();
  e->add_option("--report", ev.report, "Report path ('-' for stdout)")->capture_default_str();
  e->add_flag("--timing", ev.timing, "Record wall-clock time in the report");
  add_budget_options(e, ev.budget);

  std::string rw_data, rw_pred, rw_weights = "1,2,2,4", rw_out;
  FitBudget rw_budget;
  auto* rw = app.add_subcommand("reward", "Compute reward breakdowns and group advantages");
  rw->add_option("--data", rw_data, "Dataset JSONL")->required()->check(CLI::ExistingFile);
  rw->add_option("--pred", rw_pred, "Predictions JSONL; repeated ids form a group")->required()->check(CLI::ExistingFile);
  rw->add_option("--weights", rw_weights, "format,similarity,numerical,equiv")->capture_default_str();
  rw->add_option("--out", rw_out, "Output JSONL ('-' for stdout)")->capture_default_str();
  add_budget_options(rw, rw_budget);

  std::string fit_skeleton, fit_data, fit_id;
  FitBudget fit_budget;
  auto* f = app.add_subcommand("fit", "Fit one skeleton to one record's data");
  f->add_option("--skeleton", fit_skeleton, "Skeleton such as \"C*x_0+C\"")->required();
  f->add_option("--data", fit_data, "Dataset JSONL")->required()->check(CLI::ExistingFile);
  f->add_option("--id", fit_id, "Record id")->required();
  add_budget_options(f, fit_budget);

  SearchArgs se;
  auto* s = app.add_subcommand("search", "Run the hypothesis / experiment / revision loop on one record");
  s->add_option("--data", se.data, "Dataset JSONL")->required()->check(CLI::ExistingFile);
  s->add_option("--id", se.id, "Record id")->required();
  s->add_option("--iterations", se.cfg.iterations, "Search iterations")->capture_default_str();
  s->add_option("--hypotheses", se.cfg.hypotheses_per_iter, "Candidates per iteration")->capture_default_str();
  s->add_option("--backend", se.backend, "Hypothesis generator")
      ->check(CLI::IsMember({"chat", "local"}))
      ->capture_default_str();
  s->add_option("--prompt-points", se.cfg.prompt_points, "Rows shown in the prompt")->capture_default_str();
  s->add_option("--verify-points", se.cfg.verify_points, "Held-out rows shown for verification")->capture_default_str();
  s->add_option("--temperature", se.cfg.temperature, "Sampling temperature")->capture_default_str();
  s->add_option("--seed", se.cfg.seed, "Search seed")->capture_default_str();
  s->add_option("--report", se.report, "Trace JSON path ('-' for stdout)")->capture_default_str();
  add_budget_options(s, se.cfg.fit);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*g) return run_generate(gen);
    if (*st) return run_stats(stats_data);
    if (*e) return run_evaluate(ev);
    if (*rw) return run_reward(rw_data, rw_pred, rw_weights, rw_out, rw_budget);
    if (*f) return run_fit(fit_skeleton, fit_data, fit_id, fit_budget);
    if (*s) return run_search(std::move(se));
  } catch (const std::exception& ex) {
    std::fprintf(stderr, "srkit: %s\n", ex.what());
    return 1;
  }
  return 0;
}
