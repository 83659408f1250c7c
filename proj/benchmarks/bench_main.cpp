#include <benchmark/benchmark.h>

#include <map>

#include "pcekit/analysis.hpp"
#include "pcekit/design.hpp"
#include "pcekit/models.hpp"
#include "pcekit/sensitivity.hpp"

using namespace pcekit;

namespace {

const ParameterSpec& spec()
{
    static const ParameterSpec s = ParameterSpec::leakage_defaults();
    return s;
}

const EvaluationTable& leakage_table(int nq)
{
    static std::map<int, EvaluationTable> cache;
    auto it = cache.find(nq);
    if (it == cache.end()) {
        const auto rule = QuadratureRule::tensor_grid(spec().families(), std::vector<int>(4, nq));
        it = cache.emplace(nq, evaluate_model(BuiltinModel::ToyLeakage, spec(), rule)).first;
    }
    return it->second;
}

}  // namespace

static void BM_BasisBuild(benchmark::State& state)
{
    const int p = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(PcBasis::build(4, p, PolyFamily::HermiteProbabilist));
}
BENCHMARK(BM_BasisBuild)->Arg(4)->Arg(8);

static void BM_TensorGrid(benchmark::State& state)
{
    const int nq = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(QuadratureRule::tensor_grid(4, PolyFamily::HermiteProbabilist, nq));
}
BENCHMARK(BM_TensorGrid)->Arg(5)->Arg(10);

static void BM_ProjectLeakage(benchmark::State& state)
{
    const int nq = static_cast<int>(state.range(0));
    const auto rule = QuadratureRule::tensor_grid(spec().families(), std::vector<int>(4, nq));
    const auto basis = PcBasis::build(4, nq - 1, spec().families());
    const auto& table = leakage_table(nq);
    for (auto _ : state) benchmark::DoNotOptimize(project(table, rule, basis, true));
}
BENCHMARK(BM_ProjectLeakage)->Arg(5)->Arg(7)->Unit(benchmark::kMillisecond);

static void BM_SampleCaprock(benchmark::State& state)
{
    const auto rule = QuadratureRule::tensor_grid(spec().families(), {5, 5, 5, 5});
    const auto s = project(evaluate_model(BuiltinModel::ToyCaprock, spec(), rule), rule,
                           PcBasis::build(4, 4, spec().families()), false);
    const auto n = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(sample(s, n, 1));
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * state.range(0));
}
BENCHMARK(BM_SampleCaprock)->Arg(100'000)->Arg(1'000'000)->Unit(benchmark::kMillisecond);

static void BM_SobolTimeseries(benchmark::State& state)
{
    const auto rule = QuadratureRule::tensor_grid(spec().families(), {5, 5, 5, 5});
    const auto s = project(leakage_table(5), rule, PcBasis::build(4, 4, spec().families()), false);
    for (auto _ : state) benchmark::DoNotOptimize(sensitivity_timeseries(s));
}
BENCHMARK(BM_SobolTimeseries);

static void BM_FailureSweep(benchmark::State& state)
{
    const auto rule = QuadratureRule::tensor_grid(spec().families(), {5, 5, 5, 5});
    const auto s = project(evaluate_model(BuiltinModel::ToyCaprock, spec(), rule), rule,
                           PcBasis::build(4, 4, spec().families()), false);
    DesignProblem p;
    p.surrogate = &s;
    p.design_dim = 3;
    p.mean = 2.1827;
    p.sigma = 0.2;
    p.threshold = 330.0;
    const FailureProbability pf(p, static_cast<std::size_t>(state.range(0)), 1);
    double v = 1.6;
    for (auto _ : state) {
        benchmark::DoNotOptimize(pf(v));
        v = v > 2.8 ? 1.6 : v + 0.03;
    }
}
BENCHMARK(BM_FailureSweep)->Arg(1'000'000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
