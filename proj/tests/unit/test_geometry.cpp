#include <doctest.h>

#include <array>
#include <cmath>

#include "fixtures.hpp"
#include "mpcert/cert.hpp"
#include "mpcert/geometry.hpp"
#include "mpcert/polynomial.hpp"

using namespace mpcert;
using mpcert::testing::vec;

namespace {

Polyhedron box2(double lo, double hi) { return Polyhedron::box(Eigen::VectorXd::Constant(2, lo), Eigen::VectorXd::Constant(2, hi)); }

Polyhedron halfplanes(std::initializer_list<std::array<double, 3>> rows) {
    Polyhedron P(2);
    for (const auto &r : rows) P.add(vec({r[0], r[1]}), r[2]);
    return P;
}

Polynomial coord(int nvars, int i) {
    std::vector<double> a(nvars, 0.0);
    a[i] = 1.0;
    return Polynomial::affine(a, 0.0);
}

// Random bounded polytope containing a random point strictly inside.
Polyhedron random_polytope(Xoshiro256 &rng, int d) {
    Polyhedron P = Polyhedron::box(Eigen::VectorXd::Constant(d, -5.0), Eigen::VectorXd::Constant(d, 5.0));
    const Eigen::VectorXd c = testing::random_vector(rng, d, -1.0, 1.0);
    const int rows = 3 + static_cast<int>(rng.next() % 10);
    for (int i = 0; i < rows; ++i) {
        Eigen::VectorXd a = testing::random_vector(rng, d, -2.0, 2.0);
        P.add(a, a.dot(c) + rng.uniform(0.05, 2.0));
    }
    return P;
}

}  // namespace

TEST_CASE("solve_lp minimizes a linear cost over a box") {
    const LpResult r = solve_lp(vec({1, 0}), box2(-3, 3));
    REQUIRE(r.status == LpStatus::optimal);
    CHECK(r.value == doctest::Approx(-3.0));
    CHECK(r.x(0) == doctest::Approx(-3.0));
    CHECK(std::abs(r.x(1)) <= 3.0 + 1e-12);
}

TEST_CASE("solve_lp with zero cost returns a feasible point") {
    const Polyhedron P = box2(-1, 2);
    const LpResult r = solve_lp(vec({0, 0}), P);
    REQUIRE(r.status == LpStatus::optimal);
    CHECK(r.value == 0.0);
    CHECK(P.satisfied(r.x, 1e-9));
}

TEST_CASE("solve_lp on the nonnegative orthant") {
    const Polyhedron cone = halfplanes({{-1, 0, 0}, {0, -1, 0}});
    const LpResult lo = solve_lp(vec({1, 1}), cone);
    REQUIRE(lo.status == LpStatus::optimal);
    CHECK(lo.value == doctest::Approx(0.0));
    CHECK(lo.x.norm() == doctest::Approx(0.0));
    CHECK(solve_lp(vec({-1, -1}), cone).status == LpStatus::unbounded);
}

TEST_CASE("solve_lp reports infeasibility") {
    const Polyhedron P = halfplanes({{1, 0, 0}, {-1, 0, -1}});
    CHECK(solve_lp(vec({0, 1}), P).status == LpStatus::infeasible);
}

TEST_CASE("solve_lp rejects mismatched or non-finite input") {
    CHECK_THROWS(solve_lp(vec({1, 0, 0}), box2(-1, 1)));
    CHECK_THROWS(solve_lp(vec({NAN, 0}), box2(-1, 1)));
}

TEST_CASE("solve_lp optimum is not beaten by feasible samples") {
    Xoshiro256 rng(11);
    for (int t = 0; t < 20; ++t) {
        const Polyhedron P = random_polytope(rng, 3);
        const Eigen::VectorXd c = testing::random_vector(rng, 3);
        const LpResult r = solve_lp(c, P);
        REQUIRE(r.status == LpStatus::optimal);
        CHECK(P.satisfied(r.x, 1e-8));
        const auto pts = uniform_samples(P, 1000, static_cast<std::uint64_t>(t));
        for (const auto &x : pts) CHECK(r.value <= c.dot(x) + 1e-9);
    }
}

TEST_CASE("Chebyshev center of a symmetric box") {
    const ChebyshevBall b = chebyshev_center(box2(-3, 3));
    CHECK(b.radius == doctest::Approx(3.0));
    CHECK(b.center.norm() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("Chebyshev center of a right triangle matches the incircle") {
    const Polyhedron T = halfplanes({{-1, 0, 0}, {0, -1, 0}, {1, 1, 2}});
    const ChebyshevBall b = chebyshev_center(T);
    // Incircle of a right triangle: r = (a + b − c) / 2 with legs 2, 2.
    const double r = (2.0 + 2.0 - std::hypot(2.0, 2.0)) / 2.0;
    CHECK(std::abs(b.radius - r) <= 1e-9);
    CHECK(std::abs(b.center(0) - r) <= 1e-9);
    CHECK(std::abs(b.center(1) - r) <= 1e-9);
}

TEST_CASE("Chebyshev radius is negative for contradictory halfspaces") {
    CHECK(chebyshev_center(halfplanes({{1, 0, 0}, {-1, 0, -1}})).radius < 0.0);
}

TEST_CASE("Chebyshev center of an unbounded set uses the guard box") {
    GeometryOptions opt;
    opt.box_bound = 100.0;
    const ChebyshevBall b = chebyshev_center(halfplanes({{-1, 0, 0}}), opt);
    CHECK(b.radius > 0.0);
    CHECK(b.radius <= 100.0 + 1e-9);
}

TEST_CASE("Chebyshev center is feasible with full slack on random polytopes") {
    Xoshiro256 rng(7);
    for (int t = 0; t < 100; ++t) {
        const int d = 1 + static_cast<int>(rng.next() % 5);
        const Polyhedron P = random_polytope(rng, d);
        const ChebyshevBall b = chebyshev_center(P);
        REQUIRE(b.radius > 0.0);
        for (int i = 0; i < P.rows(); ++i) {
            const double slack = P.offsets(i) - P.normals.row(i).dot(b.center);
            CHECK(slack >= b.radius * P.normals.row(i).norm() - 1e-8);
        }
    }
}

TEST_CASE("is_empty flags empty and thin sets") {
    CHECK_FALSE(is_empty(box2(-1, 1), 1e-9).empty);
    const EmptinessResult e = is_empty(halfplanes({{1, 0, 0}, {-1, 0, -1}}), 1e-9);
    CHECK(e.empty);
    CHECK_FALSE(e.thin);
    Polyhedron slab = box2(-1, 1);
    slab.add(vec({1, 0}), 0.0);
    slab.add(vec({-1, 0}), 0.0);
    const EmptinessResult t = is_empty(slab, 1e-9);
    CHECK(t.empty);
    CHECK(t.thin);
}

TEST_CASE("is_empty agrees with rejection sampling") {
    Xoshiro256 rng(5);
    int empties = 0;
    for (int t = 0; t < 40; ++t) {
        Polyhedron P = box2(-1, 1);
        for (int k = 0; k < 4; ++k) P.add(testing::random_vector(rng, 2), rng.uniform(-1.0, 0.3));
        if (!is_empty(P, 1e-9).empty) continue;
        ++empties;
        for (int s = 0; s < 10000; ++s) {
            const Eigen::VectorXd x = testing::random_vector(rng, 2);
            CHECK_FALSE(P.satisfied(x, 0.0));
        }
    }
    CHECK(empties > 0);
}

TEST_CASE("contains classifies inside, boundary and outside") {
    const RegionDescription R(box2(-1, 1));
    CHECK(contains(R, vec({0, 0}), 1e-8) == Containment::inside);
    CHECK(contains(R, vec({1, 0}), 1e-8) == Containment::boundary);
    CHECK(contains(R, vec({2, 0}), 1e-8) == Containment::outside);
    CHECK_THROWS(contains(R, vec({0, 0, 0}), 1e-8));
}

TEST_CASE("interior_point of a polyhedral region is its Chebyshev center") {
    const auto p = interior_point(RegionDescription(box2(-1, 1)), 10, 0);
    REQUIRE(p);
    CHECK(p->norm() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("interior_point keeps a center that satisfies the polynomial part") {
    RegionDescription R(box2(-1, 1));
    R.nonlinear.push_back({coord(2, 0) * coord(2, 1) - Polynomial::constant(2, 0.5)});
    const auto p = interior_point(R, 10, 0);
    REQUIRE(p);
    CHECK(p->norm() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("interior_point gives up on an unsatisfiable polynomial part") {
    RegionDescription R(box2(0, 1));
    R.nonlinear.push_back({Polynomial::constant(2, 2.0) - coord(2, 0) * coord(2, 1)});
    CHECK_FALSE(interior_point(R, 500, 3));
}

TEST_CASE("interior_point samples when the center violates a quadratic constraint") {
    RegionDescription R(box2(-1, 1));
    // θ₁² + θ₂² ≥ 0.25 excludes the center.
    R.nonlinear.push_back({Polynomial::constant(2, 0.25) - coord(2, 0) * coord(2, 0) - coord(2, 1) * coord(2, 1)});
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto p = interior_point(R, 1000, seed);
        REQUIRE(p);
        CHECK(contains(R, *p, 1e-9) == Containment::inside);
    }
}

TEST_CASE("hit-and-run is deterministic and stays inside") {
    const Polyhedron P = halfplanes({{-1, 0, 0}, {0, -1, 0}, {1, 1, 2}});
    HitAndRun a(P, vec({0.5, 0.5}), 42), b(P, vec({0.5, 0.5}), 42);
    for (int i = 0; i < 1000; ++i) {
        const Eigen::VectorXd &x = a.next();
        CHECK(x == b.next());
        CHECK(P.satisfied(x, 1e-12));
    }
}

TEST_CASE("bounding_box and remove_redundant") {
    Polyhedron P = halfplanes({{-1, 0, 0}, {0, -1, 0}, {1, 1, 2}, {1, 0, 5}});
    Eigen::VectorXd lo, hi;
    REQUIRE(bounding_box(P, lo, hi));
    CHECK(lo(0) == doctest::Approx(0.0));
    CHECK(hi(0) == doctest::Approx(2.0));
    CHECK(hi(1) == doctest::Approx(2.0));
    CHECK(remove_redundant(P).rows() == 3);
}

TEST_CASE("polynomial arithmetic and dense round trip") {
    const Polynomial x = coord(2, 0), y = coord(2, 1);
    const Polynomial p = (x + y) * (x - y) + Polynomial::constant(2, 3.0);
    const double at[2] = {2.0, 0.5};
    CHECK(p.eval(at) == doctest::Approx(4.0 - 0.25 + 3.0));
    CHECK(p.degree() == 2);
    const std::vector<double> dense = p.to_dense();
    CHECK(dense.size() == monomial_count(2, 2));
    CHECK(Polynomial::from_dense(2, 2, dense) == p);
    double g[2];
    p.gradient(at, g);
    CHECK(g[0] == doctest::Approx(4.0));
    CHECK(g[1] == doctest::Approx(-1.0));
}
