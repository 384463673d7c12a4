#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "mpcert/mpqp.hpp"
#include "mpcert/solver.hpp"
#include "mpcert/wcet.hpp"

namespace mpcert {

/// x⁺ = A x + B u, sampled every Ts seconds.
struct LtiModel {
    Eigen::MatrixXd A;
    Eigen::MatrixXd B;
    double Ts = 0.0;

    int n_s() const { return static_cast<int>(A.rows()); }
    int n_u() const { return static_cast<int>(B.cols()); }
    void validate() const;
};

/// Zero-order-hold discretization of ẋ = Ac x + Bc u.
LtiModel zoh(const Eigen::MatrixXd &Ac, const Eigen::MatrixXd &Bc, double Ts);

/// Stabilizing solution of the discrete algebraic Riccati equation by
/// fixed-point iteration from P = Q.
Eigen::MatrixXd solve_dare(const Eigen::MatrixXd &A, const Eigen::MatrixXd &B, const Eigen::MatrixXd &Q,
                           const Eigen::MatrixXd &R, int max_iter = 100000, double tol = 1e-12);

/// Tracking MPC with input bounds. Stage cost (x_k − C r)ᵀQ(x_k − C r) +
/// u_kᵀR u_k for k < N and terminal weight Q_N; θ = [x₀; r].
struct MpcSpec {
    LtiModel model;
    int N = 1;
    Eigen::MatrixXd Q;
    Eigen::MatrixXd R;
    Eigen::MatrixXd QN;
    Eigen::VectorXd u_lo;
    Eigen::VectorXd u_hi;
    int n_r = 0;
    /// n_s × n_r map from the reference parameter to the state reference.
    Eigen::MatrixXd ref_map;
    Eigen::VectorXd x0_lo;
    Eigen::VectorXd x0_hi;
    Eigen::VectorXd r_lo;
    Eigen::VectorXd r_hi;

    int n_theta() const { return model.n_s() + n_r; }
    void validate() const;
};

/// Condensed QP over the stacked input sequence:
///   H = ΓᵀQ̄Γ + R̄,  f(θ) = ΓᵀQ̄(Φx₀ − T r),  A = [I; −I],  b = [u_hi; −u_lo].
MpQP condense(const MpcSpec &S);

/// Linearized cart-pole (upright equilibrium) with documented defaults.
///   M = 0.5 kg cart, m = 0.2 kg pole, b = 0.1 N·s/m friction,
///   I = 0.006 kg·m² pole inertia, l = 0.3 m to the pole's center of mass,
///   g = 9.8 m/s². State (p, ṗ, φ, φ̇), input force u.
///   Ts = 0.05 s, Q = diag(10, 1, 10, 1), R = 0.1, Q_N from the DARE,
///   |u| <= 1 N, θ = [x₀; r] with a full-state reference (n_θ = 8).
///   Θ0: x₀ ∈ ±(0.5, 0.5, 0.1, 0.5), r ∈ ±(0.5, 0.1, 0.05, 0.1).
MpcSpec pendulum_example(int N);

struct SimStep {
    int step = 0;
    Eigen::VectorXd x;
    Eigen::VectorXd u;
    int iterations = 0;
    std::uint64_t cost = 0;
    SolveStatus status = SolveStatus::optimal;
    WorkingSetSequence sequence;
};

struct Trajectory {
    std::vector<SimStep> steps;
    Eigen::VectorXd final_state;
};

/// Receding-horizon loop on the linear model: solve at θ = [x; r], apply the
/// first input, propagate. A non-optimal solve applies u = 0 and is visible
/// through its step status.
Trajectory closed_loop_sim(const MpcSpec &S, const Eigen::VectorXd &x0, const Eigen::VectorXd &r, int steps,
                           const SolverConfig &cfg, const CostModel &cm);

}  // namespace mpcert
