#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "mpcert/mpc.hpp"

using namespace mpcert;
using mpcert::testing::vec;

namespace {

// Unscaled horizon cost by forward simulation.
double horizon_cost(const MpcSpec &S, const Eigen::VectorXd &u, const Eigen::VectorXd &x0, const Eigen::VectorXd &r) {
    const int nu = S.model.n_u();
    Eigen::VectorXd x = x0;
    double J = 0.0;
    for (int k = 0; k < S.N; ++k) {
        const Eigen::VectorXd uk = u.segment(k * nu, nu);
        x = S.model.A * x + S.model.B * uk;
        const Eigen::VectorXd e = x - S.ref_map * r;
        J += e.dot((k + 1 == S.N ? S.QN : S.Q) * e) + uk.dot(S.R * uk);
    }
    return J;
}

}  // namespace

TEST_CASE("condensed pendulum dimensions") {
    for (int N = 1; N <= 10; ++N) {
        const MpQP P = condense(pendulum_example(N));
        CHECK(P.n == N);
        CHECK(P.m == 2 * N);
        CHECK(P.n_theta == 8);
    }
}

TEST_CASE("zero-order hold of a double integrator") {
    Eigen::MatrixXd Ac(2, 2), Bc(2, 1);
    Ac << 0, 1, 0, 0;
    Bc << 0, 1;
    const double T = 0.1;
    const LtiModel m = zoh(Ac, Bc, T);
    Eigen::MatrixXd Ad(2, 2), Bd(2, 1);
    Ad << 1, T, 0, 1;
    Bd << T * T / 2, T;
    CHECK((m.A - Ad).norm() <= 1e-14);
    CHECK((m.B - Bd).norm() <= 1e-14);
    CHECK_THROWS_AS(zoh(Ac, Bc, -1.0), InvalidInput);
}

TEST_CASE("DARE solution satisfies the Riccati equation") {
    const MpcSpec S = pendulum_example(1);
    const Eigen::MatrixXd &A = S.model.A, &B = S.model.B;
    const Eigen::MatrixXd P = solve_dare(A, B, S.Q, S.R);
    const Eigen::MatrixXd K = (S.R + B.transpose() * P * B).ldlt().solve(B.transpose() * P * A);
    const Eigen::MatrixXd res = A.transpose() * P * A - A.transpose() * P * B * K + S.Q - P;
    CHECK(res.norm() <= 1e-8 * P.norm());
    CHECK((S.QN - P).norm() <= 1e-8 * P.norm());
}

TEST_CASE("condensed Hessian and gradient match the simulated cost") {
    const MpcSpec S = pendulum_example(4);
    const MpQP P = condense(S);
    Xoshiro256 rng(5);
    for (int t = 0; t < 20; ++t) {
        const Eigen::VectorXd u = testing::random_vector(rng, P.n);
        const Eigen::VectorXd th = testing::random_vector(rng, 8, -0.1, 0.1);
        const Eigen::VectorXd x0 = th.head(4), r = th.tail(4);
        const double jp = horizon_cost(S, u, x0, r), jm = horizon_cost(S, -u, x0, r), j0 = horizon_cost(S, 0 * u, x0, r);
        const Eigen::VectorXd f = P.f0 + P.F * th;
        CHECK(jp + jm - 2 * j0 == doctest::Approx(2 * u.dot(P.H * u)).epsilon(1e-9));
        CHECK(jp - jm == doctest::Approx(4 * f.dot(u)).epsilon(1e-9));
    }
}

TEST_CASE("zero state weights make the unconstrained optimum feasible") {
    MpcSpec S = pendulum_example(3);
    S.Q.setZero();
    S.QN.setZero();
    const MpQP P = condense(S);
    const DualData dd = to_dual(P);
    Xoshiro256 rng(6);
    for (int t = 0; t < 50; ++t) {
        const Eigen::VectorXd th = testing::random_vector(rng, 8, -0.05, 0.05);
        const SolveResult r = solve(dd, th, {});
        CHECK(r.status == SolveStatus::optimal);
        CHECK(r.W.empty());
        CHECK(r.x.norm() == 0.0);
    }
}

TEST_CASE("MPC specification validation") {
    MpcSpec S = pendulum_example(2);
    S.R(0, 0) = 0.0;
    CHECK_THROWS_AS(S.validate(), InvalidInput);
    S = pendulum_example(2);
    S.u_lo(0) = S.u_hi(0);
    CHECK_THROWS_AS(S.validate(), InvalidInput);
    S = pendulum_example(2);
    S.N = 0;
    CHECK_THROWS_AS(S.validate(), InvalidInput);
    CHECK_THROWS_AS(pendulum_example(0), InvalidInput);
}

TEST_CASE("closed loop at the equilibrium stays at rest") {
    const MpcSpec S = pendulum_example(2);
    const Trajectory T = closed_loop_sim(S, Eigen::VectorXd::Zero(4), Eigen::VectorXd::Zero(4), 20, {}, CostModel::unit());
    REQUIRE(T.steps.size() == 20);
    for (const auto &s : T.steps) {
        CHECK(s.u.norm() == 0.0);
        CHECK(s.sequence.back().empty());
    }
}

TEST_CASE("closed loop stabilizes a perturbed pendulum") {
    for (int N : {1, 2, 3}) {
        const MpcSpec S = pendulum_example(N);
        const Eigen::VectorXd x0 = vec({0.5, 0.0, 0.08, 0.0});
        const Trajectory T = closed_loop_sim(S, x0, Eigen::VectorXd::Zero(4), 200, {}, CostModel::unit());
        CHECK(T.final_state.norm() < 0.1 * x0.norm());
        bool saturated = false;
        for (const auto &s : T.steps) saturated |= std::abs(s.u(0)) >= S.u_hi(0) - 1e-12;
        CHECK(saturated);
    }
}

TEST_CASE("closed-loop costs match the certified cost map") {
    const MpcSpec S = pendulum_example(2);
    const MpQP P = condense(S);
    CertOutput C;
    const WcetReport R = wcet(P, {}, CostModel::flop(), {}, &C);
    const auto map = cost_map(R, C.regions.size());
    const Eigen::VectorXd x0 = vec({0.4, 0.0, 0.08, 0.0});
    const Trajectory T = closed_loop_sim(S, x0, Eigen::VectorXd::Zero(4), 100, {}, CostModel::flop());
    int looked_up = 0;
    for (const auto &s : T.steps) {
        CHECK(s.cost <= R.worst_cost);
        Eigen::VectorXd th(8);
        th << s.x, Eigen::VectorXd::Zero(4);
        if (!P.theta0.satisfied(th, 0.0)) continue;
        const LookupResult L = lookup_cost(C, map, th);
        if (L.boundary || L.advisory) continue;
        CHECK(L.cost == s.cost);
        ++looked_up;
    }
    CHECK(looked_up > 50);
}
