#include <benchmark/benchmark.h>

#include "srkit/eval.hpp"
#include "srkit/fitter.hpp"
#include "srkit/generator.hpp"
#include "srkit/her.hpp"
#include "srkit/metrics.hpp"
#include "srkit/parse.hpp"
#include "srkit/sampler.hpp"

namespace {

using namespace srkit;

constexpr const char* kEquation = "1.5*x_0*sin(x_1) - 0.25*x_1**2 + exp(0.1*x_0)/(1 + x_1**2)";

void BM_Parse(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(parse(kEquation));
}
BENCHMARK(BM_Parse);

void BM_EvaluateMatrix(benchmark::State& state) {
  const Expression e = parse(kEquation);
  Rng rng(1);
  const DataMatrix m = sample_matrix(e, 200, 10.0, rng);
  const CompiledExpr f(e);
  for (auto _ : state) {
    double acc = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) acc += *f(m.row(i));
    benchmark::DoNotOptimize(acc);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(m.rows()));
}
BENCHMARK(BM_EvaluateMatrix);

void BM_FormSimilarity(benchmark::State& state) {
  const Skeleton a = parse_skeleton("C*x_0**2 + C*arctan(C*x_1 + C)");
  const Skeleton b = parse_skeleton("C*x_0**2 + C*x_0 + C");
  for (auto _ : state) benchmark::DoNotOptimize(form_similarity(a, b));
}
BENCHMARK(BM_FormSimilarity);

void BM_Fit(benchmark::State& state) {
  Rng rng(2);
  const DataMatrix m = sample_matrix(parse("1.3*exp(0.2*x_0) - 0.7*x_0"), 200, 10.0, rng);
  const Skeleton s = parse_skeleton("C*exp(C*x_0) + C*x_0");
  for (auto _ : state) benchmark::DoNotOptimize(fit(s, m));
}
BENCHMARK(BM_Fit)->Unit(benchmark::kMillisecond);

void BM_GenerateCorpus(benchmark::State& state) {
  GeneratorConfig cfg;
  cfg.target_count = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(generate_corpus(cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GenerateCorpus)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_LocalSearch(benchmark::State& state) {
  Rng rng(3);
  const DataMatrix m = sample_matrix(parse("1.5*x_0**2 - 0.5"), 200, 10.0, rng);
  LocalMutationGenerator gen;
  for (auto _ : state) benchmark::DoNotOptimize(search(m, SearchConfig{}, gen));
}
BENCHMARK(BM_LocalSearch)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
