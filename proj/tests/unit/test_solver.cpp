#include <doctest.h>

#include <bit>
#include <cmath>
#include <map>
#include <limits>

#include "fixtures.hpp"
#include "mpcert/solver.hpp"

using namespace mpcert;
using mpcert::testing::vec;

TEST_CASE("EX1 solves at the unconstrained optimum") {
    const DualData dd = to_dual(testing::ex1());
    const SolveResult r = solve(dd, vec({0, 0}), {});
    CHECK(r.status == SolveStatus::optimal);
    CHECK(r.W.empty());
    CHECK(r.lambda.norm() == 0.0);
    CHECK(r.x.norm() == 0.0);
    CHECK(r.iterations == 1);
    REQUIRE(r.sequence.size() == 1);
    CHECK(r.sequence[0].empty());
}

TEST_CASE("EX1 adds one constraint") {
    const DualData dd = to_dual(testing::ex1());
    const SolveResult r = solve(dd, vec({2, 0}), {});
    CHECK(r.status == SolveStatus::optimal);
    CHECK(r.W == WorkingSet{0});
    CHECK((r.lambda - vec({1, 0, 0})).norm() <= 1e-14);
    CHECK((r.x - vec({1, 0})).norm() <= 1e-14);
    REQUIRE(r.sequence.size() == 2);
    CHECK(r.sequence[0].empty());
    CHECK(r.sequence[1] == WorkingSet{0});
}

TEST_CASE("EX1 corner solution") {
    const DualData dd = to_dual(testing::ex1());
    const SolveResult r = solve(dd, vec({2, 2}), {});
    CHECK(r.status == SolveStatus::optimal);
    CHECK((r.x - vec({1, 1})).norm() <= 1e-12);
    CHECK(r.sequence.back().size() == 2);
}

TEST_CASE("EX2 is infeasible through the singular branch") {
    const DualData dd = to_dual(testing::ex2());
    for (const auto &th : {vec({0, 0}), vec({0.7, -0.9})}) {
        const SolveResult r = solve(dd, th, {});
        CHECK(r.status == SolveStatus::infeasible);
        bool singular_seen = false;
        for (const auto &e : r.trace.events) singular_seen |= e.block == Block::SING_DIR;
        CHECK(singular_seen);
        CHECK(r.trace.events.back().block == Block::TERMINATE_INF);
    }
}

TEST_CASE("solver rejects bad configuration and input") {
    const DualData dd = to_dual(testing::ex1());
    SolverConfig cfg;
    cfg.k_max = 0;
    CHECK_THROWS_AS(solve(dd, vec({0, 0}), cfg), InvalidInput);
    CHECK_THROWS_AS(solve(dd, vec({0, 0, 0}), {}), InvalidInput);
    cfg = {};
    cfg.W0 = WorkingSet{0, 0};
    CHECK_THROWS_AS(solve(dd, vec({0, 0}), cfg), InvalidInput);
}

TEST_CASE("iter_cap keeps the final working set") {
    const DualData dd = to_dual(testing::ex1());
    SolverConfig cfg;
    cfg.k_max = 1;
    const SolveResult r = solve(dd, vec({2, 2}), cfg);
    CHECK(r.status == SolveStatus::iter_cap);
    CHECK(r.iterations == 1);
    CHECK(r.sequence.size() == 2);
}

TEST_CASE("argmin kernels follow the first-minimum convention") {
    const double a[] = {3, -1, -1};
    const double b[] = {5};
    const double c[] = {0, 0, 0};
    const double d[] = {2.5, 2.5, 2.5, 2.5};
    CHECK(argmin_order_independent(a) == ArgMin{-1, 1});
    CHECK(argmin_order_dependent(a) == ArgMin{-1, 1});
    CHECK(argmin_order_independent(b) == ArgMin{5, 0});
    CHECK(argmin_order_dependent(c) == ArgMin{0, 0});
    CHECK(argmin_order_independent(d) == ArgMin{2.5, 0});
    CHECK_THROWS(argmin_order_independent(std::span<const double>{}));
    CHECK_THROWS(argmin_order_dependent(std::span<const double>{}));
}

TEST_CASE("order-independent argmin matches the order-dependent kernel") {
    Xoshiro256 rng(1);
    std::vector<double> v;
    for (int t = 0; t < 20000; ++t) {
        v.resize(1 + rng.next() % 16);
        for (auto &x : v) x = (rng.next() % 4 == 0) ? std::floor(rng.uniform(-3, 3)) : rng.uniform(-5, 5);
        const ArgMin a = argmin_order_independent(v), b = argmin_order_dependent(v);
        CHECK(a.index == b.index);
        CHECK(std::bit_cast<std::uint64_t>(a.value) == std::bit_cast<std::uint64_t>(b.value));
    }
}

TEST_CASE("order-independent argmin has a content-independent trace") {
    Xoshiro256 rng(2);
    for (int len = 1; len <= 12; ++len) {
        std::vector<double> u(len), w(len);
        for (auto &x : u) x = rng.uniform(-1, 1);
        for (int i = 0; i < len; ++i) w[i] = static_cast<double>(len - i);
        KernelTrace tu, tw;
        argmin_order_independent(u, &tu);
        argmin_order_independent(w, &tw);
        CHECK(tu == tw);
    }
    // The order-dependent kernel stores only on improvement.
    const double up[] = {1, 2, 3, 4}, down[] = {4, 3, 2, 1};
    KernelTrace a, b;
    argmin_order_dependent(up, &a);
    argmin_order_dependent(down, &b);
    CHECK_FALSE(a == b);
}

TEST_CASE("ratio test examples") {
    const double l1[] = {1, 3}, s1[] = {-1, 1};
    RatioStep r = ratio_test_remove(l1, s1, RemoveRule::classic_blocking);
    CHECK(r.position == 0);
    CHECK(r.alpha == doctest::Approx(0.5));
    const double l2[] = {0, 2}, s2[] = {-1, -1};
    r = ratio_test_remove(l2, s2, RemoveRule::classic_blocking);
    CHECK(r.position == 0);
    CHECK(r.alpha == 0.0);
    const double l3[] = {1}, s3[] = {-1};
    for (auto rule : {RemoveRule::classic_blocking, RemoveRule::paper_literal}) {
        r = ratio_test_remove(l3, s3, rule);
        CHECK(r.position == 0);
        CHECK(r.alpha == doctest::Approx(0.5));
    }
    const double bad[] = {1, 1}, pos[] = {1, 2};
    CHECK_THROWS(ratio_test_remove(bad, pos, RemoveRule::classic_blocking));
}

TEST_CASE("the printed ratio picks the largest blocking step") {
    const double l[] = {1, 3}, s[] = {-1, -1};
    // Classic α = (1/2, 3/4); printed keys λ*/(λ*−λ) = (1/2, 1/4).
    CHECK(ratio_test_remove(l, s, RemoveRule::classic_blocking).position == 0);
    CHECK(ratio_test_remove(l, s, RemoveRule::paper_literal).position == 1);
}

TEST_CASE("KKT oracle examples") {
    const MpQP P = testing::ex1();
    KktResult k = kkt_oracle(P, vec({2, 2}));
    REQUIRE(k.feasible);
    CHECK((k.x - vec({1, 1})).norm() <= 1e-12);
    CHECK(k.active == WorkingSet{0, 1});
    k = kkt_oracle(P, vec({0, 0}));
    REQUIRE(k.feasible);
    CHECK(k.x.norm() <= 1e-14);
    CHECK(k.active.empty());
    CHECK_FALSE(kkt_oracle(testing::ex2(), vec({0.3, 0.3})).feasible);
}

TEST_CASE("trace hash") {
    CHECK(trace_hash(ExecutionTrace{}) == 0xcbf29ce484222325ULL);
    ExecutionTrace a, b;
    a.emit(0, Block::SING_CHECK, 0, 2, 3);
    b.emit(0, Block::SING_CHECK, 0, 2, 3);
    CHECK(trace_hash(a) == trace_hash(b));
    b.events[0].block = Block::LINSYS;
    CHECK(trace_hash(a) != trace_hash(b));
}

TEST_CASE("solver agrees with the KKT oracle on random problems") {
    Xoshiro256 rng(123);
    int optimal = 0, infeasible = 0;
    for (int t = 0; t < 200; ++t) {
        const int n = 1 + static_cast<int>(rng.next() % 4);
        const int m = 1 + static_cast<int>(rng.next() % 8);
        const int nt = 1 + static_cast<int>(rng.next() % 3);
        const MpQP P = testing::random_mpqp(rng, n, m, nt);
        const DualData dd = to_dual(P);
        const Eigen::VectorXd th = testing::random_vector(rng, nt);
        const SolveResult r = solve(dd, th, {});
        const KktResult k = kkt_oracle(P, th);
        REQUIRE(r.status != SolveStatus::iter_cap);
        CHECK((r.status == SolveStatus::optimal) == k.feasible);
        if (k.feasible && r.status == SolveStatus::optimal) {
            CHECK((r.x - k.x).lpNorm<Eigen::Infinity>() <= 1e-6);
            ++optimal;
        } else {
            ++infeasible;
        }
    }
    CHECK(optimal > 0);
    CHECK(infeasible > 0);
}

TEST_CASE("optimal solutions satisfy the KKT conditions") {
    Xoshiro256 rng(77);
    for (int t = 0; t < 300; ++t) {
        const MpQP P = testing::random_mpqp(rng, 3, 6, 2);
        const DualData dd = to_dual(P);
        const Eigen::VectorXd th = testing::random_vector(rng, 2);
        const SolveResult r = solve(dd, th, {});
        if (r.status != SolveStatus::optimal) continue;
        CHECK(r.lambda.minCoeff() >= 0.0);
        CHECK(r.min_dual_iterate >= 0.0);
        const Eigen::VectorXd b = P.b0 + P.B * th;
        CHECK((P.A * r.x - b).maxCoeff() <= 1e-6);
        CHECK((P.H * r.x + P.f0 + P.F * th + P.A.transpose() * r.lambda).norm() <= 1e-6);
    }
}

TEST_CASE("dual iterates stay nonnegative under the blocking rule") {
    Xoshiro256 rng(78);
    for (int t = 0; t < 300; ++t) {
        const MpQP P = testing::random_mpqp(rng, 4, 8, 3);
        const DualData dd = to_dual(P);
        const SolveResult r = solve(dd, testing::random_vector(rng, 3), {});
        CHECK(r.min_dual_iterate >= 0.0);
    }
}

TEST_CASE("Bland addition also reaches the oracle solution") {
    Xoshiro256 rng(55);
    SolverConfig cfg;
    cfg.add_rule = AddRule::bland;
    for (int t = 0; t < 100; ++t) {
        const MpQP P = testing::random_mpqp(rng, 3, 6, 2);
        const Eigen::VectorXd th = testing::random_vector(rng, 2);
        const SolveResult r = solve(to_dual(P), th, cfg);
        const KktResult k = kkt_oracle(P, th);
        CHECK((r.status == SolveStatus::optimal) == k.feasible);
        if (k.feasible && r.status == SolveStatus::optimal) CHECK((r.x - k.x).lpNorm<Eigen::Infinity>() <= 1e-6);
    }
}

TEST_CASE("traces are a function of the working-set sequence") {
    Xoshiro256 rng(6);
    const MpQP P = testing::random_mpqp(rng, 3, 6, 2);
    const DualData dd = to_dual(P);
    std::map<std::vector<std::vector<int>>, std::uint64_t> seen;
    for (int t = 0; t < 2000; ++t) {
        const Eigen::VectorXd th = testing::random_vector(rng, 2);
        const SolveResult a = solve(dd, th, {}), b = solve(dd, th, {});
        CHECK(a.trace == b.trace);
        std::vector<std::vector<int>> key;
        for (const auto &W : a.sequence) key.push_back(W.indices());
        const std::uint64_t h = trace_hash(a.trace);
        const auto [it, fresh] = seen.emplace(key, h);
        if (!fresh) CHECK(it->second == h);
        CHECK(trace_from_sequence(dd, a.sequence, a.status) == a.trace);
    }
    CHECK(seen.size() > 1);
}

TEST_CASE("solver terminates well before 10·m iterations") {
    Xoshiro256 rng(99);
    int capped = 0;
    for (int t = 0; t < 1000; ++t) {
        const int m = 1 + static_cast<int>(rng.next() % 8);
        const MpQP P = testing::random_mpqp(rng, 3, m, 2);
        SolverConfig cfg;
        cfg.k_max = 10 * m;
        capped += solve(to_dual(P), testing::random_vector(rng, 2), cfg).status == SolveStatus::iter_cap;
    }
    CHECK(capped <= 10);
}

TEST_CASE("flop and memory counts depend only on block and sizes") {
    for (int b = 0; b < kBlockCount; ++b) {
        const auto blk = static_cast<Block>(b);
        CHECK(block_from_name(block_name(blk)) == blk);
        CHECK(eval_count(block_flop_terms(blk), 3, 4, 8) == eval_count(block_flop_terms(blk), 3, 4, 8));
    }
    CHECK_FALSE(block_from_name("NOPE"));
}
