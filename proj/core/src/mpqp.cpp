#include "mpcert/mpqp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mpcert {

namespace {
void check(bool cond, const std::string &msg) {
    if (!cond) throw InvalidInput(msg);
}

// In-order Cholesky G = LLᵀ that stops at the first pivot below `tol`.
// Returns the number of accepted pivots.
int cholesky_in_order(const Eigen::MatrixXd &G, Eigen::MatrixXd &L, double tol) {
    const Eigen::Index s = G.rows();
    L = Eigen::MatrixXd::Zero(s, s);
    for (Eigen::Index j = 0; j < s; ++j) {
        double piv = G(j, j);
        for (Eigen::Index k = 0; k < j; ++k) piv -= L(j, k) * L(j, k);
        if (!(piv > tol)) return static_cast<int>(j);
        const double ljj = std::sqrt(piv);
        L(j, j) = ljj;
        for (Eigen::Index i = j + 1; i < s; ++i) {
            double v = G(i, j);
            for (Eigen::Index k = 0; k < j; ++k) v -= L(i, k) * L(j, k);
            L(i, j) = v / ljj;
        }
    }
    return static_cast<int>(s);
}

// Solves (L Lᵀ) X = Rhs with L lower triangular (leading k×k block).
Eigen::MatrixXd chol_solve(const Eigen::MatrixXd &L, int k, const Eigen::MatrixXd &rhs) {
    const Eigen::MatrixXd Lk = L.topLeftCorner(k, k);
    const Eigen::MatrixXd y = Lk.triangularView<Eigen::Lower>().solve(rhs);
    return Lk.transpose().triangularView<Eigen::Upper>().solve(y);
}
}  // namespace

// ---------------------------------------------------------------------------
// WorkingSet
// ---------------------------------------------------------------------------

WorkingSet::WorkingSet(std::initializer_list<int> idx) : idx_(idx) {}
WorkingSet::WorkingSet(std::vector<int> idx) : idx_(std::move(idx)) {}

bool WorkingSet::contains(int i) const { return position(i) >= 0; }

int WorkingSet::position(int i) const {
    for (std::size_t p = 0; p < idx_.size(); ++p)
        if (idx_[p] == i) return static_cast<int>(p);
    return -1;
}

void WorkingSet::push(int i) { idx_.push_back(i); }

void WorkingSet::erase_at(int pos) { idx_.erase(idx_.begin() + pos); }

std::vector<int> WorkingSet::complement(int m) const {
    std::vector<bool> in(m, false);
    for (int i : idx_) in[i] = true;
    std::vector<int> out;
    out.reserve(m - idx_.size());
    for (int i = 0; i < m; ++i)
        if (!in[i]) out.push_back(i);
    return out;
}

void WorkingSet::validate(int m) const {
    check(static_cast<int>(idx_.size()) <= m, "working set larger than the constraint count");
    std::vector<bool> seen(m, false);
    for (int i : idx_) {
        check(i >= 0 && i < m, "working-set index " + std::to_string(i) + " out of range");
        check(!seen[i], "working-set index " + std::to_string(i) + " repeated");
        seen[i] = true;
    }
}

// ---------------------------------------------------------------------------
// MpQP
// ---------------------------------------------------------------------------

void MpQP::validate() const {
    check(n >= 1, "MpQP: n must be positive");
    check(m >= 0 && n_theta >= 0, "MpQP: negative dimension");
    check(H.rows() == n && H.cols() == n, "MpQP: H must be n×n");
    check(f0.size() == n, "MpQP: f0 must have n entries");
    check(F.rows() == n && F.cols() == n_theta, "MpQP: F must be n×n_theta");
    check(A.rows() == m && A.cols() == n, "MpQP: A must be m×n");
    check(b0.size() == m, "MpQP: b0 must have m entries");
    check(B.rows() == m && B.cols() == n_theta, "MpQP: B must be m×n_theta");
    check(theta0.dim() == n_theta, "MpQP: Theta0 dimension must equal n_theta");
    check(H.allFinite() && f0.allFinite() && F.allFinite() && A.allFinite() && b0.allFinite() && B.allFinite(),
          "MpQP: non-finite entry");
    theta0.validate();
    const double hmax = H.cwiseAbs().maxCoeff();
    check((H - H.transpose()).cwiseAbs().maxCoeff() <= DualOptions{}.sym_tol * std::max(hmax, 1.0),
          "MpQP: H is not symmetric");
    Eigen::MatrixXd L;
    const double dmax = H.diagonal().maxCoeff();
    const int rank = cholesky_in_order(H, L, DualOptions{}.pd_tol * std::max(dmax, 0.0));
    if (rank < n || !(dmax > 0.0))
        throw NotPositiveDefinite("MpQP: H is not positive definite (Cholesky pivot " + std::to_string(rank) + ")",
                                  rank);
    if (n_theta > 0) {
        const auto e = is_empty(theta0, 0.0);
        check(!(e.radius < 0.0), "MpQP: Theta0 is empty");
    }
}

// ---------------------------------------------------------------------------
// Dual data
// ---------------------------------------------------------------------------

DualData to_dual(const MpQP &P, const DualOptions &opt) {
    P.validate();
    DualData dd;
    dd.n = P.n;
    dd.m = P.m;
    dd.n_theta = P.n_theta;
    const double dmax = P.H.diagonal().maxCoeff();
    const int rank = cholesky_in_order(P.H, dd.L, opt.pd_tol * dmax);
    if (rank < P.n)
        throw NotPositiveDefinite("to_dual: Cholesky of H failed at pivot " + std::to_string(rank), rank);
    // M = A L⁻ᵀ  ⇔  Mᵀ = L⁻¹ Aᵀ
    dd.M = dd.L.triangularView<Eigen::Lower>().solve(P.A.transpose()).transpose();
    const Eigen::VectorXd Hf0 = chol_solve(dd.L, P.n, P.f0);
    const Eigen::MatrixXd HF = chol_solve(dd.L, P.n, P.F);
    dd.d0 = P.b0 + P.A * Hf0;
    dd.D = P.B + P.A * HF;
    dd.f0 = P.f0;
    dd.F = P.F;
    dd.A = P.A;
    return dd;
}

GramFactor gram(const DualData &dd, const WorkingSet &W, const DualOptions &opt) {
    W.validate(dd.m);
    const int s = W.size();
    GramFactor g;
    g.G.resize(s, s);
    for (int i = 0; i < s; ++i)
        for (int j = 0; j <= i; ++j) {
            const double v = dd.M.row(W[i]).dot(dd.M.row(W[j]));
            g.G(i, j) = v;
            g.G(j, i) = v;
        }
    if (s == 0) {
        g.rank = 0;
        g.singular = false;
        g.L.resize(0, 0);
        return g;
    }
    const double dmax = g.G.diagonal().maxCoeff();
    g.rank = cholesky_in_order(g.G, g.L, opt.sing_tol * std::max(dmax, 0.0));
    if (!(dmax > 0.0)) g.rank = 0;
    g.singular = g.rank < s;
    return g;
}

AffineMap affine_lambda_map(const DualData &dd, const WorkingSet &W, const DualOptions &opt) {
    const GramFactor g = gram(dd, W, opt);
    if (g.singular) throw std::logic_error("affine_lambda_map: singular working set");
    const int s = W.size();
    AffineMap map;
    if (s == 0) {
        map.E.resize(0, dd.n_theta);
        map.e.resize(0);
        return map;
    }
    Eigen::MatrixXd rhs(s, dd.n_theta + 1);
    for (int i = 0; i < s; ++i) {
        rhs.row(i).head(dd.n_theta) = -dd.D.row(W[i]);
        rhs(i, dd.n_theta) = -dd.d0(W[i]);
    }
    const Eigen::MatrixXd sol = chol_solve(g.L, s, rhs);
    map.E = sol.leftCols(dd.n_theta);
    map.e = sol.col(dd.n_theta);
    return map;
}

AffineMap affine_mu_map(const DualData &dd, const WorkingSet &W, const AffineMap &lambda) {
    if (lambda.rows() != W.size() || lambda.E.cols() != dd.n_theta)
        throw InvalidInput("affine_mu_map: lambda map does not match the working set");
    const std::vector<int> comp = W.complement(dd.m);
    const int r = static_cast<int>(comp.size());
    const int s = W.size();
    AffineMap mu;
    mu.E.resize(r, dd.n_theta);
    mu.e.resize(r);
    // Mᵀ_W λ*(θ) as an n×(n_theta+1) affine object.
    Eigen::MatrixXd MtE = Eigen::MatrixXd::Zero(dd.n, dd.n_theta);
    Eigen::VectorXd Mte = Eigen::VectorXd::Zero(dd.n);
    for (int k = 0; k < s; ++k) {
        MtE += dd.M.row(W[k]).transpose() * lambda.E.row(k);
        Mte += dd.M.row(W[k]).transpose() * lambda.e(k);
    }
    for (int k = 0; k < r; ++k) {
        const int j = comp[k];
        mu.E.row(k) = dd.M.row(j) * MtE + dd.D.row(j);
        mu.e(k) = dd.M.row(j).dot(Mte) + dd.d0(j);
    }
    return mu;
}

Eigen::VectorXd null_direction(const DualData &dd, const WorkingSet &W, const DualOptions &opt) {
    const GramFactor g = gram(dd, W, opt);
    if (!g.singular) throw std::logic_error("null_direction: working set is not singular");
    const int k = g.rank;
    Eigen::VectorXd p = Eigen::VectorXd::Zero(W.size());
    p(k) = 1.0;
    if (k > 0) {
        const Eigen::MatrixXd c = chol_solve(g.L, k, g.G.block(0, k, k, 1));
        p.head(k) = -c.col(0);
    }
    p /= p.norm();
    return p;
}

Eigen::VectorXd recover_primal(const DualData &dd, const Eigen::Ref<const Eigen::VectorXd> &lambda,
                               const Eigen::Ref<const Eigen::VectorXd> &theta) {
    const Eigen::VectorXd g = dd.f0 + dd.F * theta + dd.A.transpose() * lambda;
    return -chol_solve(dd.L, dd.n, g);
}

MpQP restrict_parameters(const MpQP &P, std::span<const int> dims, const Eigen::VectorXd &theta_fixed,
                         const Eigen::VectorXd &lo, const Eigen::VectorXd &hi) {
    check(theta_fixed.size() == P.n_theta, "restrict_parameters: fixed parameter vector has wrong size");
    const int k = static_cast<int>(dims.size());
    check(lo.size() == k && hi.size() == k, "restrict_parameters: bound sizes must equal the slice dimension");
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(P.n_theta, k);
    Eigen::VectorXd base = theta_fixed;
    for (int j = 0; j < k; ++j) {
        check(dims[j] >= 0 && dims[j] < P.n_theta, "restrict_parameters: slice dimension out of range");
        S(dims[j], j) = 1.0;
        base(dims[j]) = 0.0;
    }
    MpQP Q = P;
    Q.n_theta = k;
    Q.f0 = P.f0 + P.F * base;
    Q.F = P.F * S;
    Q.b0 = P.b0 + P.B * base;
    Q.B = P.B * S;
    Q.theta0 = Polyhedron::box(lo, hi);
    return Q;
}

}  // namespace mpcert
