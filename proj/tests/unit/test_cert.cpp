#include <doctest.h>

#include <algorithm>

#include "fixtures.hpp"
#include "mpcert/cert.hpp"
#include "mpcert/io.hpp"

using namespace mpcert;
using mpcert::testing::vec;

namespace {

CertOutput certify_problem(const MpQP &P, const SolverConfig &cfg = {}, const CertOptions &opt = {}) {
    return certify(to_dual(P), P.theta0, cfg, opt);
}

const RegionRecord *region_at(const CertOutput &C, const Eigen::VectorXd &th) {
    for (const auto &r : C.regions)
        if (contains(r.region, th, 1e-9) == Containment::inside) return &r;
    return nullptr;
}

}  // namespace

TEST_CASE("EX1 regions around known points") {
    const CertOutput C = certify_problem(testing::ex1());
    const RegionRecord *a = region_at(C, vec({0, 0}));
    REQUIRE(a);
    CHECK(a->sequence == WorkingSetSequence{WorkingSet{}});
    CHECK(a->iterations == 1);
    const RegionRecord *b = region_at(C, vec({2, 0}));
    REQUIRE(b);
    CHECK(b->sequence == WorkingSetSequence{WorkingSet{}, WorkingSet{0}});
    // (2,2) sits on the Dantzig tie μ₁ = μ₂, so it is a boundary point of
    // the two regions that end in {1,2} and {2,1}.
    int corner = 0;
    for (const auto &r : C.regions) {
        if (contains(r.region, vec({2, 2}), 1e-9) == Containment::outside) continue;
        std::vector<int> idx = r.sequence.back().indices();
        std::sort(idx.begin(), idx.end());
        CHECK(idx == std::vector<int>{0, 1});
        ++corner;
    }
    CHECK(corner == 2);
    for (const auto &r : C.regions) {
        CHECK(r.status == RegionStatus::optimal);
        REQUIRE(r.archetype);
        CHECK(contains(r.region, *r.archetype, 0.0) != Containment::outside);
    }
    for (std::size_t i = 0; i < C.regions.size(); ++i) CHECK(C.regions[i].id == static_cast<int>(i));
}

TEST_CASE("parameter-free problem yields a single region") {
    const MpQP P = testing::parameter_free();
    const CertOutput C = certify_problem(P);
    REQUIRE(C.regions.size() == 1);
    const SolveResult r = solve(to_dual(P), vec({0.5, -2}), {});
    CHECK(C.regions[0].sequence == r.sequence);
    CHECK(C.regions[0].status == RegionStatus::optimal);
    const ValidationReport v = validate_cover(C, to_dual(P), {}, 500, 1e-6, 1);
    CHECK(v.ok());
    CHECK(v.match_rate() == 1.0);
}

TEST_CASE("EX2 yields one infeasible region") {
    const CertOutput C = certify_problem(testing::ex2());
    REQUIRE(C.regions.size() == 1);
    CHECK(C.regions[0].status == RegionStatus::infeasible);
    CHECK(C.regions[0].region.polyhedral());
    CHECK(contains(C.regions[0].region, vec({0.99, -0.99}), 1e-9) == Containment::inside);
}

TEST_CASE("EX1 cover validates") {
    const MpQP P = testing::ex1();
    const CertOutput C = certify_problem(P);
    const ValidationReport v = validate_cover(C, to_dual(P), {}, 1000, 1e-6, 0);
    CHECK(v.ok());
    CHECK(v.checked > 900);
    CHECK(v.match_rate() == 1.0);
}

TEST_CASE("corrupted region table is caught") {
    const MpQP P = testing::ex1();
    CertOutput C = certify_problem(P);
    REQUIRE(C.regions.size() >= 2);
    auto big = std::max_element(C.regions.begin(), C.regions.end(), [](const auto &a, const auto &b) {
        return chebyshev_center(a.region.linear).radius < chebyshev_center(b.region.linear).radius;
    });
    auto other = big == C.regions.begin() ? C.regions.begin() + 1 : C.regions.begin();
    std::swap(big->sequence, other->sequence);
    const ValidationReport v = validate_cover(C, to_dual(P), {}, 1000, 1e-6, 0);
    CHECK_FALSE(v.ok());
    CHECK(v.match_rate() < 1.0);
    CHECK_FALSE(v.counterexamples.empty());
}

TEST_CASE("certification is independent of the worker count") {
    Xoshiro256 rng(8);
    const MpQP P = testing::random_mpqp(rng, 3, 6, 2);
    CertOptions one, four;
    four.threads = 4;
    const CertOutput a = certify_problem(P, {}, one), b = certify_problem(P, {}, four);
    CHECK(dump(to_json(a)) == dump(to_json(b)));
}

TEST_CASE("certify rejects unsupported input") {
    MpQP P = testing::ex1();
    SolverConfig cfg;
    cfg.remove_rule = RemoveRule::paper_literal;
    CHECK_THROWS_AS(certify_problem(P, cfg), InvalidInput);
    const DualData dd = to_dual(P);
    Polyhedron half(2);
    half.add(vec({1, 0}), 1.0);
    CHECK_THROWS_AS(certify(dd, half, {}), InvalidInput);
}

TEST_CASE("random problems certify to a validated cover") {
    Xoshiro256 rng(31);
    for (int t = 0; t < 25; ++t) {
        const int n = 1 + static_cast<int>(rng.next() % 3);
        const int m = 1 + static_cast<int>(rng.next() % 5);
        const MpQP P = testing::random_mpqp(rng, n, m, 2);
        const DualData dd = to_dual(P);
        const CertOutput C = certify(dd, P.theta0, {});
        const ValidationReport v = validate_cover(C, dd, {}, 2000, 1e-6, static_cast<std::uint64_t>(t));
        CHECK(v.ok());
        CHECK(v.unresolved_hits + v.matched == v.checked);
    }
}

TEST_CASE("Bland addition certifies to a validated cover") {
    Xoshiro256 rng(32);
    SolverConfig cfg;
    cfg.add_rule = AddRule::bland;
    for (int t = 0; t < 10; ++t) {
        const MpQP P = testing::random_mpqp(rng, 2, 5, 2);
        const DualData dd = to_dual(P);
        const CertOutput C = certify(dd, P.theta0, cfg);
        CHECK(validate_cover(C, dd, cfg, 2000, 1e-6, 0).ok());
    }
}

TEST_CASE("all interior samples of a region share one trace") {
    Xoshiro256 rng(33);
    const MpQP P = testing::random_mpqp(rng, 3, 6, 2);
    const DualData dd = to_dual(P);
    const CertOutput C = certify(dd, P.theta0, {});
    int regions = 0;
    for (const auto &r : C.regions) {
        if (r.status == RegionStatus::unresolved) continue;
        const auto pts = sample_region(r.region, 10, 5000, 1234, 1e-7);
        if (pts.empty()) continue;
        ++regions;
        const std::uint64_t h = trace_hash(solve(dd, pts[0], {}).trace);
        for (const auto &x : pts) {
            const SolveResult s = solve(dd, x, {});
            CHECK(s.sequence == r.sequence);
            CHECK(trace_hash(s.trace) == h);
        }
    }
    CHECK(regions > 1);
}

TEST_CASE("fixed seed gives identical output") {
    Xoshiro256 rng(34);
    const MpQP P = testing::random_mpqp(rng, 3, 6, 3);
    CertOptions opt;
    opt.seed = 99;
    CHECK(dump(to_json(certify_problem(P, {}, opt))) == dump(to_json(certify_problem(P, {}, opt))));
}

TEST_CASE("region status names round trip") {
    for (auto s : {RegionStatus::optimal, RegionStatus::infeasible, RegionStatus::iter_cap, RegionStatus::unresolved})
        CHECK(region_status_from_name(region_status_name(s)) == s);
    CHECK_FALSE(region_status_from_name("bogus"));
}

TEST_CASE("iteration cap produces iter_cap regions") {
    SolverConfig cfg;
    cfg.k_max = 1;
    const MpQP P = testing::ex1();
    const CertOutput C = certify_problem(P, cfg);
    bool capped = false;
    for (const auto &r : C.regions) capped |= r.status == RegionStatus::iter_cap;
    CHECK(capped);
    CHECK(validate_cover(C, to_dual(P), cfg, 1000, 1e-6, 0).ok());
}
