#include <benchmark/benchmark.h>

#include <vector>

#include "mpcert/mpc.hpp"
#include "mpcert/wcet.hpp"

using namespace mpcert;

namespace {

// Solve of the condensed pendulum at a state that saturates the input.
void BM_SolvePendulum(benchmark::State &state) {
    const MpQP P = condense(pendulum_example(static_cast<int>(state.range(0))));
    const DualData dd = to_dual(P);
    Eigen::VectorXd th = Eigen::VectorXd::Zero(P.n_theta);
    th << 0.5, 0.5, 0.1, 0.5, 0, 0, 0, 0;
    for (auto _ : state) benchmark::DoNotOptimize(solve(dd, th, {}).x.data());
    state.counters["iterations"] = solve(dd, th, {}).iterations;
}
BENCHMARK(BM_SolvePendulum)->Arg(2)->Arg(5)->Arg(10)->Arg(20);

void BM_TraceCost(benchmark::State &state) {
    const MpQP P = condense(pendulum_example(10));
    const DualData dd = to_dual(P);
    Eigen::VectorXd th = Eigen::VectorXd::Zero(P.n_theta);
    th << 0.5, 0.5, 0.1, 0.5, 0, 0, 0, 0;
    const ExecutionTrace t = solve(dd, th, {}).trace;
    const CostModel cm = CostModel::flop();
    for (auto _ : state) benchmark::DoNotOptimize(trace_cost(t, cm));
}
BENCHMARK(BM_TraceCost);

std::vector<double> values(int n) {
    Xoshiro256 rng(1);
    std::vector<double> v(n);
    for (auto &x : v) x = rng.normal();
    return v;
}

void BM_ArgminOrderIndependent(benchmark::State &state) {
    const auto v = values(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(argmin_order_independent(v));
}
BENCHMARK(BM_ArgminOrderIndependent)->Arg(8)->Arg(64)->Arg(512);

void BM_ArgminOrderDependent(benchmark::State &state) {
    const auto v = values(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(argmin_order_dependent(v));
}
BENCHMARK(BM_ArgminOrderDependent)->Arg(8)->Arg(64)->Arg(512);

}  // namespace

BENCHMARK_MAIN();
