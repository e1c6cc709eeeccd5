#include <benchmark/benchmark.h>

#include "hs/classifier.hpp"
#include "hs/cli.hpp"
#include "hs/evaluator.hpp"

namespace {

const hs::Context& ctx_for(int id) {
    static const hs::Context c[4] = {hs::make_context(hs::example_spec(1)), hs::make_context(hs::example_spec(2)),
                                     hs::make_context(hs::example_spec(3)), hs::make_context(hs::example_spec(4))};
    return c[id - 1];
}

hs::Exec exec_of(int64_t e) { return e == 0 ? hs::Exec::Serial : hs::Exec::OpenMP; }

void BM_EvaluateGrid(benchmark::State& st) {
    const auto& ctx = ctx_for(static_cast<int>(st.range(0)));
    const double eta = 0.5 * hs::eta_limit(ctx) < 1e300 ? 0.5 * hs::eta_limit(ctx) : 2.0;
    std::vector<double> alphas(256);
    for (int i = 0; i < 256; ++i) alphas[i] = (i + 0.5) / 256.0;
    for (auto _ : st) benchmark::DoNotOptimize(hs::evaluate_grid(ctx, eta, alphas, true, exec_of(st.range(1))));
}
BENCHMARK(BM_EvaluateGrid)->ArgsProduct({{1, 2, 3, 4}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_BuildCache(benchmark::State& st) {
    const auto& ctx = ctx_for(static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(hs::build_cache(ctx.spec, ctx.report, exec_of(st.range(1))));
}
BENCHMARK(BM_BuildCache)->ArgsProduct({{1, 2, 3, 4}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_Sweep(benchmark::State& st) {
    const auto data = hs::make_builtin("cos2pi", {1.0});
    const std::vector<double> lams{-3, -1.5, -1, -0.5, -0.25, 0.25, 0.5, 1, 1.5, 3};
    for (auto _ : st) {
        auto v = hs::parallel_map(exec_of(st.range(0)), lams.size() * 2, [&](std::size_t i) {
            hs::ProblemSpec s{lams[i / 2], i % 2 ? 1.0 : -1.0, data, {}};
            return hs::classify(s).regime;
        });
        benchmark::DoNotOptimize(v);
    }
}
BENCHMARK(BM_Sweep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
