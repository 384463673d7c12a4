#include <stdexcept>

#include <Eigen/LU>

#include "mpcert/solver.hpp"

namespace mpcert {

KktResult kkt_oracle(const MpQP &P, const Eigen::Ref<const Eigen::VectorXd> &theta) {
    if (P.m > 20) throw InvalidInput("kkt_oracle: m must be at most 20");
    if (theta.size() != P.n_theta) throw InvalidInput("kkt_oracle: theta has the wrong dimension");
    const int n = P.n, m = P.m;
    const Eigen::VectorXd f = P.f0 + P.F * theta;
    const Eigen::VectorXd b = P.b0 + P.B * theta;
    const double tol = 1e-9 * (1.0 + b.cwiseAbs().maxCoeff() + f.cwiseAbs().maxCoeff());

    KktResult best;
    double best_violation = tol;
    for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
        std::vector<int> S;
        for (int i = 0; i < m; ++i)
            if (mask & (1u << i)) S.push_back(i);
        const int s = static_cast<int>(S.size());
        if (s > n) continue;
        Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n + s, n + s);
        Eigen::VectorXd rhs(n + s);
        K.topLeftCorner(n, n) = P.H;
        rhs.head(n) = -f;
        for (int k = 0; k < s; ++k) {
            K.block(0, n + k, n, 1) = P.A.row(S[k]).transpose();
            K.block(n + k, 0, 1, n) = P.A.row(S[k]);
            rhs(n + k) = b(S[k]);
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(K);
        if (lu.rank() < n + s) continue;
        const Eigen::VectorXd z = lu.solve(rhs);
        const Eigen::VectorXd x = z.head(n);
        const Eigen::VectorXd lam = z.tail(s);
        double viol = 0.0;
        if (m > 0) viol = std::max(viol, (P.A * x - b).maxCoeff());
        if (s > 0) viol = std::max(viol, -lam.minCoeff());
        if (viol <= best_violation) {
            best_violation = viol;
            best.feasible = true;
            best.x = x;
            best.lambda = Eigen::VectorXd::Zero(m);
            for (int k = 0; k < s; ++k) best.lambda(S[k]) = lam(k);
            best.active = WorkingSet(S);
            if (viol <= 0.0) break;
        }
    }
    if (best.feasible) return best;

    const LpResult lp = solve_lp(Eigen::VectorXd::Zero(n), Polyhedron(P.A, b));
    if (lp.status == LpStatus::infeasible) return {};
    throw std::runtime_error("kkt_oracle: feasible problem but no KKT active set was accepted");
}

}  // namespace mpcert
