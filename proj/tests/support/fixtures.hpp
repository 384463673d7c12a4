#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <Eigen/Dense>

#include "mpcert/mpqp.hpp"
#include "mpcert/rng.hpp"

namespace mpcert::testing {

// min ½‖x‖² − θᵀx  s.t.  x₁ ≤ 1, x₂ ≤ 1, −x₁ − x₂ ≤ 1, over θ ∈ [−3,3]².
inline MpQP ex1() {
    MpQP P;
    P.n = 2;
    P.m = 3;
    P.n_theta = 2;
    P.H = Eigen::MatrixXd::Identity(2, 2);
    P.f0 = Eigen::VectorXd::Zero(2);
    P.F = -Eigen::MatrixXd::Identity(2, 2);
    P.A.resize(3, 2);
    P.A << 1, 0, 0, 1, -1, -1;
    P.b0 = Eigen::VectorXd::Ones(3);
    P.B = Eigen::MatrixXd::Zero(3, 2);
    P.theta0 = Polyhedron::box(Eigen::VectorXd::Constant(2, -3.0), Eigen::VectorXd::Constant(2, 3.0));
    return P;
}

// x₁ ≤ 0 and x₁ ≥ 1: infeasible for every θ.
inline MpQP ex2() {
    MpQP P;
    P.n = 2;
    P.m = 2;
    P.n_theta = 2;
    P.H = Eigen::MatrixXd::Identity(2, 2);
    P.f0 = Eigen::VectorXd::Zero(2);
    P.F = Eigen::MatrixXd::Zero(2, 2);
    P.A.resize(2, 2);
    P.A << 1, 0, -1, 0;
    P.b0.resize(2);
    P.b0 << 0, -1;
    P.B = Eigen::MatrixXd::Zero(2, 2);
    P.theta0 = Polyhedron::box(Eigen::VectorXd::Constant(2, -1.0), Eigen::VectorXd::Constant(2, 1.0));
    return P;
}

// EX1 with the parameter removed from the data: one behavior over Θ0.
inline MpQP parameter_free() {
    MpQP P = ex1();
    P.f0 << -2.0, 0.5;
    P.F.setZero();
    return P;
}

inline Eigen::MatrixXd random_matrix(Xoshiro256 &rng, int r, int c, double lo = -1.0, double hi = 1.0) {
    Eigen::MatrixXd M(r, c);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) M(i, j) = rng.uniform(lo, hi);
    return M;
}

inline Eigen::VectorXd random_vector(Xoshiro256 &rng, int n, double lo = -1.0, double hi = 1.0) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = rng.uniform(lo, hi);
    return v;
}

// Well-conditioned random mpQP. Negative b0 entries make some instances
// infeasible so both solver outcomes are exercised.
inline MpQP random_mpqp(Xoshiro256 &rng, int n, int m, int n_theta) {
    MpQP P;
    P.n = n;
    P.m = m;
    P.n_theta = n_theta;
    const Eigen::MatrixXd R = random_matrix(rng, n, n);
    P.H = R * R.transpose() + 0.5 * Eigen::MatrixXd::Identity(n, n);
    P.H = 0.5 * (P.H + P.H.transpose()).eval();
    P.f0 = random_vector(rng, n);
    P.F = random_matrix(rng, n, n_theta);
    P.A = random_matrix(rng, m, n);
    P.b0 = random_vector(rng, m, -0.5, 1.5);
    P.B = random_matrix(rng, m, n_theta, -0.5, 0.5);
    P.theta0 = Polyhedron::box(Eigen::VectorXd::Constant(n_theta, -1.0), Eigen::VectorXd::Constant(n_theta, 1.0));
    return P;
}

inline Eigen::VectorXd vec(std::initializer_list<double> v) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out(i++) = x;
    return out;
}

inline std::filesystem::path scratch_dir(const std::string &name) {
    const auto dir = std::filesystem::temp_directory_path() / ("mpcert_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace mpcert::testing
