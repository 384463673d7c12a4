#include <benchmark/benchmark.h>

#include "mpcert/geometry.hpp"
#include "mpcert/rng.hpp"

using namespace mpcert;

namespace {

// Random bounded polytope around the origin with `rows` extra halfspaces.
Polyhedron polytope(int dim, int rows, std::uint64_t seed) {
    Xoshiro256 rng(seed);
    Polyhedron P(dim);
    for (int i = 0; i < rows; ++i) {
        Eigen::VectorXd a(dim);
        for (int k = 0; k < dim; ++k) a(k) = rng.normal();
        P.add(a, rng.uniform(0.1, 1.0));
    }
    for (int k = 0; k < dim; ++k) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(dim);
        e(k) = 1;
        P.add(e, 2.0);
        P.add(-e, 2.0);
    }
    return P;
}

void BM_ChebyshevCenter(benchmark::State &state) {
    const Polyhedron P = polytope(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)), 3);
    for (auto _ : state) benchmark::DoNotOptimize(chebyshev_center(P).radius);
}
BENCHMARK(BM_ChebyshevCenter)->Args({2, 10})->Args({4, 20})->Args({8, 40});

void BM_SolveLp(benchmark::State &state) {
    const int d = static_cast<int>(state.range(0));
    const Polyhedron P = polytope(d, 4 * d, 4);
    const Eigen::VectorXd c = Eigen::VectorXd::Ones(d);
    for (auto _ : state) benchmark::DoNotOptimize(solve_lp(c, P).value);
}
BENCHMARK(BM_SolveLp)->Arg(2)->Arg(4)->Arg(8);

void BM_RemoveRedundant(benchmark::State &state) {
    const Polyhedron P = polytope(4, static_cast<int>(state.range(0)), 5);
    for (auto _ : state) benchmark::DoNotOptimize(remove_redundant(P).rows());
}
BENCHMARK(BM_RemoveRedundant)->Arg(10)->Arg(40);

}  // namespace

BENCHMARK_MAIN();
