#include <benchmark/benchmark.h>

#include "mpcert/mpc.hpp"
#include "mpcert/wcet.hpp"

using namespace mpcert;

namespace {

void BM_CertifyPendulum(benchmark::State &state) {
    const MpQP P = condense(pendulum_example(static_cast<int>(state.range(0))));
    const DualData dd = to_dual(P);
    std::size_t regions = 0;
    for (auto _ : state) regions = certify(dd, P.theta0, {}).regions.size();
    state.counters["regions"] = static_cast<double>(regions);
}
BENCHMARK(BM_CertifyPendulum)->Arg(1)->Arg(2)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_WcetPendulum(benchmark::State &state) {
    const MpQP P = condense(pendulum_example(static_cast<int>(state.range(0))));
    const DualData dd = to_dual(P);
    const CertOutput C = certify(dd, P.theta0, {});
    for (auto _ : state) benchmark::DoNotOptimize(wcet_from_cert(dd, C, {}, CostModel::flop()).worst_cost);
}
BENCHMARK(BM_WcetPendulum)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_MonteCarloBaseline(benchmark::State &state) {
    const MpQP P = condense(pendulum_example(3));
    const DualData dd = to_dual(P);
    for (auto _ : state)
        benchmark::DoNotOptimize(monte_carlo_baseline(dd, P.theta0, {}, CostModel::flop(), 10000, 0).max_cost);
}
BENCHMARK(BM_MonteCarloBaseline)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
