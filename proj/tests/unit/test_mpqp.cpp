#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "mpcert/mpqp.hpp"

using namespace mpcert;
using mpcert::testing::vec;

namespace {

WorkingSet random_working_set(Xoshiro256 &rng, int m, int max_size) {
    std::vector<int> all(m);
    for (int i = 0; i < m; ++i) all[i] = i;
    for (int i = m - 1; i > 0; --i) std::swap(all[i], all[rng.next() % (i + 1)]);
    const int s = static_cast<int>(rng.next() % (max_size + 1));
    return WorkingSet(std::vector<int>(all.begin(), all.begin() + s));
}

}  // namespace

TEST_CASE("EX1 dual data") {
    const DualData dd = to_dual(testing::ex1());
    const MpQP P = testing::ex1();
    CHECK((dd.M - P.A).norm() <= 1e-15);
    CHECK((dd.d0 - vec({1, 1, 1})).norm() <= 1e-15);
    CHECK((dd.D + P.A).norm() <= 1e-15);
}

TEST_CASE("EX1 Gram matrices") {
    const DualData dd = to_dual(testing::ex1());
    const GramFactor g = gram(dd, {0, 2});
    Eigen::MatrixXd G(2, 2);
    G << 1, -1, -1, 2;
    CHECK((g.G - G).norm() == 0.0);
    CHECK_FALSE(g.singular);
    const GramFactor h = gram(dd, {0, 1, 2});
    CHECK(h.singular);
    CHECK(h.rank == 2);
    CHECK(gram(dd, {}).G.size() == 0);
}

TEST_CASE("EX1 lambda maps") {
    const DualData dd = to_dual(testing::ex1());
    const AffineMap a = affine_lambda_map(dd, {0});
    CHECK(a.E(0, 0) == doctest::Approx(1.0));
    CHECK(a.E(0, 1) == doctest::Approx(0.0));
    CHECK(a.e(0) == doctest::Approx(-1.0));
    CHECK(affine_lambda_map(dd, {}).rows() == 0);
    const AffineMap b = affine_lambda_map(dd, {0, 1});
    const Eigen::VectorXd th = vec({0.3, -1.7});
    CHECK((b.eval(th) - vec({th(0) - 1, th(1) - 1})).norm() <= 1e-14);
    CHECK_THROWS_AS(affine_lambda_map(dd, {0, 1, 2}), std::logic_error);
}

TEST_CASE("EX1 mu maps") {
    const DualData dd = to_dual(testing::ex1());
    const AffineMap mu = affine_mu_map(dd, {0}, affine_lambda_map(dd, {0}));
    const Eigen::VectorXd th = vec({0.4, 1.3});
    CHECK(mu.eval_row(0, th) == doctest::Approx(1.0 - th(1)));
    CHECK(mu.eval_row(1, th) == doctest::Approx(2.0 + th(1)));
    const AffineMap mu2 = affine_mu_map(dd, {0, 1}, affine_lambda_map(dd, {0, 1}));
    CHECK(mu2.eval_row(0, vec({0, 0})) == doctest::Approx(3.0));
    CHECK(mu2.E.norm() <= 1e-14);
}

TEST_CASE("null directions of dependent working sets") {
    const DualData d1 = to_dual(testing::ex1());
    const Eigen::VectorXd p = null_direction(d1, {0, 1, 2});
    CHECK(std::abs(std::abs(p(0)) - 1.0 / std::sqrt(3.0)) <= 1e-12);
    CHECK((p - Eigen::VectorXd::Constant(3, p(0))).norm() <= 1e-12);
    const DualData d2 = to_dual(testing::ex2());
    const Eigen::VectorXd q = null_direction(d2, {0, 1});
    CHECK(std::abs(std::abs(q(0)) - 1.0 / std::sqrt(2.0)) <= 1e-12);
    CHECK(q(0) == doctest::Approx(q(1)));
    CHECK_THROWS_AS(null_direction(d1, {0, 1}), std::logic_error);
}

TEST_CASE("EX1 primal recovery") {
    const DualData dd = to_dual(testing::ex1());
    CHECK((recover_primal(dd, vec({1, 0, 0}), vec({2, 0})) - vec({1, 0})).norm() <= 1e-14);
    CHECK(recover_primal(dd, vec({0, 0, 0}), vec({0, 0})).norm() == 0.0);
    CHECK((recover_primal(dd, vec({1, 1, 0}), vec({2, 2})) - vec({1, 1})).norm() <= 1e-14);
}

TEST_CASE("MpQP validation errors") {
    MpQP P = testing::ex1();
    P.H(0, 0) = -1.0;
    CHECK_THROWS_AS(P.validate(), NotPositiveDefinite);
    P = testing::ex1();
    P.H(0, 1) = 0.5;
    CHECK_THROWS_AS(P.validate(), InvalidInput);
    P = testing::ex1();
    P.b0.resize(2);
    CHECK_THROWS_AS(P.validate(), InvalidInput);
    P = testing::ex1();
    P.A(1, 1) = NAN;
    CHECK_THROWS_AS(P.validate(), InvalidInput);
    P = testing::ex1();
    P.theta0.add(vec({1, 0}), -10.0);
    CHECK_THROWS_AS(P.validate(), InvalidInput);
    CHECK_THROWS_AS(WorkingSet({0, 0}).validate(3), InvalidInput);
    CHECK_THROWS_AS(WorkingSet({3}).validate(3), InvalidInput);
}

TEST_CASE("M Mᵀ equals A H⁻¹ Aᵀ") {
    Xoshiro256 rng(3);
    for (int t = 0; t < 50; ++t) {
        const MpQP P = testing::random_mpqp(rng, 4, 6, 2);
        const DualData dd = to_dual(P);
        const Eigen::MatrixXd ref = P.A * P.H.ldlt().solve(P.A.transpose());
        CHECK((dd.M * dd.M.transpose() - ref).norm() <= 1e-10 * std::max(1.0, ref.norm()));
    }
}

TEST_CASE("lambda and mu maps solve the working-set system") {
    Xoshiro256 rng(9);
    int checked = 0;
    for (int t = 0; t < 1000; ++t) {
        const MpQP P = testing::random_mpqp(rng, 4, 6, 3);
        const DualData dd = to_dual(P);
        const WorkingSet W = random_working_set(rng, P.m, 4);
        const GramFactor g = gram(dd, W);
        if (g.singular) continue;
        ++checked;
        const AffineMap lam = affine_lambda_map(dd, W);
        const Eigen::VectorXd th = testing::random_vector(rng, P.n_theta);
        const Eigen::VectorXd d = dd.d(th);
        Eigen::VectorXd dW(W.size());
        for (int i = 0; i < W.size(); ++i) dW(i) = d(W[i]);
        CHECK((g.G * lam.eval(th) + dW).norm() <= 1e-8);

        const AffineMap mu = affine_mu_map(dd, W, lam);
        Eigen::VectorXd full = Eigen::VectorXd::Zero(P.m);
        const Eigen::VectorXd l = lam.eval(th);
        for (int i = 0; i < W.size(); ++i) full(W[i]) = l(i);
        const Eigen::VectorXd ref = dd.M * dd.M.transpose() * full + d;
        const std::vector<int> comp = W.complement(P.m);
        for (std::size_t k = 0; k < comp.size(); ++k)
            CHECK(std::abs(mu.eval_row(static_cast<int>(k), th) - ref(comp[k])) <= 1e-8);
    }
    CHECK(checked > 500);
}

TEST_CASE("gram and null_direction are bitwise repeatable") {
    Xoshiro256 rng(21);
    const MpQP P = testing::random_mpqp(rng, 3, 6, 2);
    const DualData dd = to_dual(P);
    const WorkingSet W{4, 1, 0, 3};
    const GramFactor a = gram(dd, W), b = gram(dd, W);
    CHECK(a.G == b.G);
    CHECK(a.L == b.L);
    REQUIRE(a.singular);
    CHECK(null_direction(dd, W) == null_direction(dd, W));
}

TEST_CASE("restrict_parameters fixes the other coordinates") {
    Xoshiro256 rng(4);
    const MpQP P = testing::random_mpqp(rng, 3, 4, 3);
    const int dims[] = {2, 0};
    const Eigen::VectorXd fixed = vec({0.1, -0.4, 0.7});
    const MpQP Q = restrict_parameters(P, dims, fixed, vec({-1, -1}), vec({1, 1}));
    const Eigen::VectorXd s = vec({0.3, -0.2});
    const Eigen::VectorXd full = vec({-0.2, -0.4, 0.3});
    CHECK((Q.f0 + Q.F * s - (P.f0 + P.F * full)).norm() <= 1e-14);
    CHECK((Q.b0 + Q.B * s - (P.b0 + P.B * full)).norm() <= 1e-14);
    CHECK(Q.n_theta == 2);
}
