#pragma once

#include <initializer_list>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "mpcert/errors.hpp"
#include "mpcert/geometry.hpp"

namespace mpcert {

/// Ordered set of distinct constraint indices, kept in insertion order.
class WorkingSet {
public:
    WorkingSet() = default;
    WorkingSet(std::initializer_list<int> idx);
    explicit WorkingSet(std::vector<int> idx);

    int size() const { return static_cast<int>(idx_.size()); }
    bool empty() const { return idx_.empty(); }
    int operator[](int pos) const { return idx_[pos]; }
    const std::vector<int> &indices() const { return idx_; }
    auto begin() const { return idx_.begin(); }
    auto end() const { return idx_.end(); }

    bool contains(int i) const;
    /// Position of constraint i, or -1.
    int position(int i) const;
    void push(int i);
    void erase_at(int pos);

    /// Indices {0..m-1} not in the set, ascending.
    std::vector<int> complement(int m) const;
    /// Throws when an index repeats or is outside [0, m).
    void validate(int m) const;

    friend bool operator==(const WorkingSet &, const WorkingSet &) = default;
    friend auto operator<=>(const WorkingSet &a, const WorkingSet &b) { return a.idx_ <=> b.idx_; }

private:
    std::vector<int> idx_;
};

/// min_x ½xᵀHx + f(θ)ᵀx  s.t.  Ax <= b(θ),  f(θ) = f0 + Fθ,  b(θ) = b0 + Bθ,
/// θ ∈ Θ0.
struct MpQP {
    int n = 0;
    int m = 0;
    int n_theta = 0;
    Eigen::MatrixXd H;
    Eigen::VectorXd f0;
    Eigen::MatrixXd F;
    Eigen::MatrixXd A;
    Eigen::VectorXd b0;
    Eigen::MatrixXd B;
    Polyhedron theta0;

    /// Dimensions, finiteness, symmetry and positive definiteness of H,
    /// nonemptiness of Θ0.
    void validate() const;
};

/// Dual of an MpQP: min_{λ>=0} ½λᵀMMᵀλ + d(θ)ᵀλ with M = A·L⁻ᵀ (H = LLᵀ)
/// and d(θ) = d0 + Dθ, d0 = b0 + AH⁻¹f0, D = B + AH⁻¹F.
struct DualData {
    int n = 0;
    int m = 0;
    int n_theta = 0;
    Eigen::MatrixXd M;
    Eigen::VectorXd d0;
    Eigen::MatrixXd D;
    Eigen::MatrixXd L;  // lower Cholesky factor of H
    Eigen::VectorXd f0;
    Eigen::MatrixXd F;
    Eigen::MatrixXd A;

    Eigen::VectorXd d(const Eigen::Ref<const Eigen::VectorXd> &theta) const { return d0 + D * theta; }
};

/// θ ↦ Eθ + e.
struct AffineMap {
    Eigen::MatrixXd E;
    Eigen::VectorXd e;

    int rows() const { return static_cast<int>(e.size()); }
    Eigen::VectorXd eval(const Eigen::Ref<const Eigen::VectorXd> &theta) const { return E * theta + e; }
    double eval_row(int r, const Eigen::Ref<const Eigen::VectorXd> &theta) const { return E.row(r).dot(theta) + e(r); }
};

/// Gram matrix of the working-set rows of M, in working-set order, and its
/// in-order Cholesky factorization.
struct GramFactor {
    Eigen::MatrixXd G;
    Eigen::MatrixXd L;  // valid in its leading `rank` columns
    bool singular = false;
    /// Position of the first rejected pivot when singular, else the size.
    int rank = 0;
};

struct DualOptions {
    double pd_tol = 1e-12;    // relative to max diag(H)
    double sing_tol = 1e-11;  // relative to max diag(G)
    double sym_tol = 1e-12;   // relative to max |H|
};

DualData to_dual(const MpQP &P, const DualOptions &opt = {});

GramFactor gram(const DualData &dd, const WorkingSet &W, const DualOptions &opt = {});

/// λ*(θ) on W (working-set order) solving G·λ* = −[d(θ)]_W.
AffineMap affine_lambda_map(const DualData &dd, const WorkingSet &W, const DualOptions &opt = {});

/// μ(θ) = [M]_{W̄}[M]_Wᵀλ*(θ) + [d(θ)]_{W̄}, rows in ascending index order
/// of the complement W̄.
AffineMap affine_mu_map(const DualData &dd, const WorkingSet &W, const AffineMap &lambda);

/// Unit p with G·p = 0 for a singular W: p = (−c, 1, 0, …) normalized, where
/// the row at the first rejected pivot equals Σ cⱼ·(earlier rows).
Eigen::VectorXd null_direction(const DualData &dd, const WorkingSet &W, const DualOptions &opt = {});

/// x* = −H⁻¹(f(θ) + Aᵀλ) for a dense m-vector λ.
Eigen::VectorXd recover_primal(const DualData &dd, const Eigen::Ref<const Eigen::VectorXd> &lambda,
                               const Eigen::Ref<const Eigen::VectorXd> &theta);

/// Restricts an MpQP to the parameter slice θ = θ_fix + Σ e_{dims[k]}·φ_k,
/// with the new Θ0 the box [lo, hi] over φ.
MpQP restrict_parameters(const MpQP &P, std::span<const int> dims, const Eigen::VectorXd &theta_fixed,
                         const Eigen::VectorXd &lo, const Eigen::VectorXd &hi);

}  // namespace mpcert
