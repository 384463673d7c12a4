#include "mpcert/mpc.hpp"

#include <cmath>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

namespace mpcert {

namespace {
void check(bool cond, const std::string &msg) {
    if (!cond) throw InvalidInput(msg);
}
}  // namespace

void LtiModel::validate() const {
    check(A.rows() >= 1 && A.rows() == A.cols(), "LtiModel: A must be square and nonempty");
    check(B.rows() == A.rows() && B.cols() >= 1, "LtiModel: B must have n_s rows and at least one column");
    check(A.allFinite() && B.allFinite() && std::isfinite(Ts) && Ts > 0.0, "LtiModel: non-finite entry or Ts <= 0");
}

LtiModel zoh(const Eigen::MatrixXd &Ac, const Eigen::MatrixXd &Bc, double Ts) {
    const Eigen::Index ns = Ac.rows(), nu = Bc.cols();
    Eigen::MatrixXd Mc = Eigen::MatrixXd::Zero(ns + nu, ns + nu);
    Mc.topLeftCorner(ns, ns) = Ac * Ts;
    Mc.topRightCorner(ns, nu) = Bc * Ts;
    const Eigen::MatrixXd E = Mc.exp();
    LtiModel m{E.topLeftCorner(ns, ns), E.topRightCorner(ns, nu), Ts};
    m.validate();
    return m;
}

Eigen::MatrixXd solve_dare(const Eigen::MatrixXd &A, const Eigen::MatrixXd &B, const Eigen::MatrixXd &Q,
                           const Eigen::MatrixXd &R, int max_iter, double tol) {
    Eigen::MatrixXd P = Q;
    for (int it = 0; it < max_iter; ++it) {
        const Eigen::MatrixXd S = R + B.transpose() * P * B;
        const Eigen::MatrixXd K = S.ldlt().solve(B.transpose() * P * A);
        Eigen::MatrixXd Pn = Q + A.transpose() * P * A - A.transpose() * P * B * K;
        Pn = 0.5 * (Pn + Pn.transpose());
        const double diff = (Pn - P).cwiseAbs().maxCoeff();
        P = std::move(Pn);
        if (diff <= tol * std::max(1.0, P.cwiseAbs().maxCoeff())) return P;
    }
    throw std::runtime_error("solve_dare: Riccati iteration did not converge");
}

void MpcSpec::validate() const {
    model.validate();
    const int ns = model.n_s(), nu = model.n_u();
    check(N >= 1, "MpcSpec: horizon must be at least 1");
    check(Q.rows() == ns && Q.cols() == ns && QN.rows() == ns && QN.cols() == ns, "MpcSpec: Q and Q_N must be n_s×n_s");
    check(R.rows() == nu && R.cols() == nu, "MpcSpec: R must be n_u×n_u");
    check(Q.allFinite() && QN.allFinite() && R.allFinite(), "MpcSpec: non-finite weight");
    Eigen::LLT<Eigen::MatrixXd> llt(0.5 * (R + R.transpose()));
    check(llt.info() == Eigen::Success, "MpcSpec: R must be positive definite");
    check(u_lo.size() == nu && u_hi.size() == nu, "MpcSpec: input bounds must have n_u entries");
    for (int i = 0; i < nu; ++i) check(u_lo(i) < u_hi(i), "MpcSpec: u_lo must be below u_hi");
    check(n_r >= 0 && ref_map.rows() == ns && ref_map.cols() == n_r, "MpcSpec: ref_map must be n_s×n_r");
    check(x0_lo.size() == ns && x0_hi.size() == ns && r_lo.size() == n_r && r_hi.size() == n_r,
          "MpcSpec: Theta0 box sizes must match n_s and n_r");
    for (int i = 0; i < ns; ++i) check(x0_lo(i) < x0_hi(i), "MpcSpec: empty state box");
    for (int i = 0; i < n_r; ++i) check(r_lo(i) < r_hi(i), "MpcSpec: empty reference box");
}

MpQP condense(const MpcSpec &S) {
    S.validate();
    const int ns = S.model.n_s(), nu = S.model.n_u(), N = S.N;
    const Eigen::MatrixXd &A = S.model.A, &B = S.model.B;

    Eigen::MatrixXd Phi(N * ns, ns);
    Eigen::MatrixXd Gamma = Eigen::MatrixXd::Zero(N * ns, N * nu);
    Eigen::MatrixXd Ak = Eigen::MatrixXd::Identity(ns, ns);
    std::vector<Eigen::MatrixXd> powers;  // A^0 .. A^{N-1}
    for (int k = 0; k < N; ++k) {
        powers.push_back(Ak);
        Ak = A * Ak;
        Phi.middleRows(k * ns, ns) = Ak;
    }
    for (int k = 0; k < N; ++k)
        for (int i = 0; i <= k; ++i) Gamma.block(k * ns, i * nu, ns, nu) = powers[k - i] * B;

    Eigen::MatrixXd Qb = Eigen::MatrixXd::Zero(N * ns, N * ns);
    Eigen::MatrixXd Rb = Eigen::MatrixXd::Zero(N * nu, N * nu);
    Eigen::MatrixXd T(N * ns, S.n_r);
    for (int k = 0; k < N; ++k) {
        Qb.block(k * ns, k * ns, ns, ns) = k + 1 == N ? S.QN : S.Q;
        Rb.block(k * nu, k * nu, nu, nu) = S.R;
        T.middleRows(k * ns, ns) = S.ref_map;
    }

    MpQP P;
    P.n = N * nu;
    P.m = 2 * N * nu;
    P.n_theta = S.n_theta();
    const Eigen::MatrixXd GtQ = Gamma.transpose() * Qb;
    P.H = GtQ * Gamma + Rb;
    P.H = 0.5 * (P.H + P.H.transpose());
    P.f0 = Eigen::VectorXd::Zero(P.n);
    P.F.resize(P.n, P.n_theta);
    P.F.leftCols(ns) = GtQ * Phi;
    P.F.rightCols(S.n_r) = -GtQ * T;
    P.A.resize(P.m, P.n);
    P.A.topRows(P.n) = Eigen::MatrixXd::Identity(P.n, P.n);
    P.A.bottomRows(P.n) = -Eigen::MatrixXd::Identity(P.n, P.n);
    P.b0.resize(P.m);
    for (int k = 0; k < N; ++k) {
        P.b0.segment(k * nu, nu) = S.u_hi;
        P.b0.segment(P.n + k * nu, nu) = -S.u_lo;
    }
    P.B = Eigen::MatrixXd::Zero(P.m, P.n_theta);
    Eigen::VectorXd lo(P.n_theta), hi(P.n_theta);
    lo << S.x0_lo, S.r_lo;
    hi << S.x0_hi, S.r_hi;
    P.theta0 = Polyhedron::box(lo, hi);
    P.validate();
    return P;
}

MpcSpec pendulum_example(int N) {
    check(N >= 1, "pendulum_example: horizon must be at least 1");
    const double Mc = 0.5, mp = 0.2, b = 0.1, I = 0.006, g = 9.8, l = 0.3;
    const double p = I * (Mc + mp) + Mc * mp * l * l;
    Eigen::MatrixXd Ac(4, 4);
    Ac << 0, 1, 0, 0,
          0, -(I + mp * l * l) * b / p, mp * mp * g * l * l / p, 0,
          0, 0, 0, 1,
          0, -mp * l * b / p, mp * g * l * (Mc + mp) / p, 0;
    Eigen::MatrixXd Bc(4, 1);
    Bc << 0, (I + mp * l * l) / p, 0, mp * l / p;

    MpcSpec S;
    S.model = zoh(Ac, Bc, 0.05);
    S.N = N;
    S.Q = Eigen::Vector4d(10, 1, 10, 1).asDiagonal();
    S.R = Eigen::MatrixXd::Constant(1, 1, 0.1);
    S.QN = solve_dare(S.model.A, S.model.B, S.Q, S.R);
    S.u_lo = Eigen::VectorXd::Constant(1, -1.0);
    S.u_hi = Eigen::VectorXd::Constant(1, 1.0);
    S.n_r = 4;
    S.ref_map = Eigen::MatrixXd::Identity(4, 4);
    S.x0_hi = Eigen::Vector4d(0.5, 0.5, 0.1, 0.5);
    S.x0_lo = -S.x0_hi;
    S.r_hi = Eigen::Vector4d(0.5, 0.1, 0.05, 0.1);
    S.r_lo = -S.r_hi;
    S.validate();
    return S;
}

Trajectory closed_loop_sim(const MpcSpec &S, const Eigen::VectorXd &x0, const Eigen::VectorXd &r, int steps,
                           const SolverConfig &cfg, const CostModel &cm) {
    check(steps >= 1, "closed_loop_sim: steps must be at least 1");
    check(x0.size() == S.model.n_s() && r.size() == S.n_r, "closed_loop_sim: x0 or r has the wrong size");
    const MpQP P = condense(S);
    const DualData dd = to_dual(P);
    const int nu = S.model.n_u();
    Trajectory tr;
    Eigen::VectorXd x = x0;
    Eigen::VectorXd theta(P.n_theta);
    for (int k = 0; k < steps; ++k) {
        theta << x, r;
        const SolveResult res = solve(dd, theta, cfg);
        SimStep st;
        st.step = k;
        st.x = x;
        st.status = res.status;
        st.iterations = res.iterations;
        st.cost = trace_cost(res.trace, cm);
        st.sequence = res.sequence;
        st.u = res.status == SolveStatus::optimal ? Eigen::VectorXd(res.x.head(nu)) : Eigen::VectorXd::Zero(nu);
        x = S.model.A * x + S.model.B * st.u;
        tr.steps.push_back(std::move(st));
    }
    tr.final_state = x;
    return tr;
}

}  // namespace mpcert
