#include <benchmark/benchmark.h>

#include <numbers>

#include "opkernel/fixtures.hpp"
#include "opkernel/kernel.hpp"

namespace {

using namespace opkernel;

QuadratureRule small_rule(int panels, int nodes) {
    QuadratureRule r;
    r.nodes_per_panel = nodes;
    r.max_panel_width = 1.0 / panels;
    return r;
}

void BM_BuildGrid(benchmark::State& state) {
    const LebesgueSet dom = LebesgueSet::interval(0.0, 1.0);
    const QuadratureRule rule = small_rule(static_cast<int>(state.range(0)), 12);
    const double breaks[] = {0.25, 0.5, 0.75};
    for (auto _ : state) {
        benchmark::DoNotOptimize(build_grid(dom, breaks, rule));
    }
}
BENCHMARK(BM_BuildGrid)->Arg(32)->Arg(128);

void BM_ComposeFixedStructure(benchmark::State& state) {
    const double pi = std::numbers::pi;
    const LebesgueSet dom = LebesgueSet::interval(0.0, pi);
    const FuncExpr t = FuncExpr::var(Axis::T);
    const FuncExpr s = FuncExpr::var(Axis::S);
    const Kernel k = Kernel::general(cos(t) * cos(s) + sin(t) * sin(s), dom);
    QuadratureRule rule;
    rule.nodes_per_panel = static_cast<int>(state.range(0));
    rule.max_panel_width = pi / 32.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(compose_kernels(k, dom, k, rule));
    }
}
BENCHMARK(BM_ComposeFixedStructure)->Arg(4)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);

void BM_ComposeTriangular(benchmark::State& state) {
    const LebesgueSet dom = LebesgueSet::interval(0.0, 1.0);
    const Kernel inner = Kernel::separable(FuncExpr::constant(1.0), FuncExpr::constant(1.0), dom);
    const Kernel k = Kernel::volterra(inner, 0.0, dom);
    const QuadratureRule rule = small_rule(static_cast<int>(state.range(0)), 8);
    for (auto _ : state) {
        benchmark::DoNotOptimize(compose_kernels(k, dom, k, rule));
    }
}
BENCHMARK(BM_ComposeTriangular)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_DirectResidualTrig(benchmark::State& state) {
    const QuadratureRule rule = small_rule(static_cast<int>(state.range(0)), 8);
    auto pair = fixtures::make_trig_pair(rule);
    const auto battery = make_battery(pair.grid, 10, 1);
    const Polynomial f = Polynomial::monomial(1.0, 2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(direct_residual(pair.a, pair.b, f, battery));
    }
}
BENCHMARK(BM_DirectResidualTrig)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_AeScan(benchmark::State& state) {
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    std::vector<double> values(n, 0.0), weights(n, 1.0 / n);
    values[n / 2] = 1.0;
    const AeTolerance tol = AeTolerance::defaults_for(1.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(ae_zero(values, weights, tol));
    }
}
BENCHMARK(BM_AeScan)->Arg(1 << 12)->Arg(1 << 16);

}  // namespace

BENCHMARK_MAIN();
