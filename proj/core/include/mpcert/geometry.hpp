#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "mpcert/polynomial.hpp"
#include "mpcert/rng.hpp"

namespace mpcert {

/// Halfspace set {θ : normals·θ <= offsets}.
struct Polyhedron {
    Eigen::MatrixXd normals;  // rows aᵢᵀ
    Eigen::VectorXd offsets;  // βᵢ

    Polyhedron() = default;
    explicit Polyhedron(int dim) : normals(0, dim), offsets(0) {}
    Polyhedron(Eigen::MatrixXd a, Eigen::VectorXd b);

    static Polyhedron box(const Eigen::VectorXd &lo, const Eigen::VectorXd &hi);

    int dim() const { return static_cast<int>(normals.cols()); }
    int rows() const { return static_cast<int>(normals.rows()); }

    void add(const Eigen::Ref<const Eigen::VectorXd> &a, double b);
    void append(const Polyhedron &other);

    /// Throws std::invalid_argument on non-finite entries or mismatched sizes.
    void validate() const;
    /// A zero row with a negative offset.
    bool trivially_empty(double tol = 0.0) const;
    bool satisfied(const Eigen::Ref<const Eigen::VectorXd> &x, double tol) const;
};

/// p(θ) <= 0 with deg p >= 2.
struct PolyConstraint {
    Polynomial p;

    void validate(int dim) const;
};

struct RegionDescription {
    Polyhedron linear;
    std::vector<PolyConstraint> nonlinear;

    RegionDescription() = default;
    explicit RegionDescription(Polyhedron p) : linear(std::move(p)) {}

    int dim() const { return linear.dim(); }
    bool polyhedral() const { return nonlinear.empty(); }
};

enum class LpStatus { optimal, infeasible, unbounded };

struct LpResult {
    LpStatus status = LpStatus::infeasible;
    Eigen::VectorXd x;
    double value = 0.0;
};

struct LpOptions {
    double feas_tol = 1e-9;
    double pivot_tol = 1e-10;
    int max_pivots = 50000;
};

/// min costᵀθ subject to P. Dense two-phase tableau simplex with Bland's
/// rule; free variables are split θ = θ⁺ − θ⁻ and rows are scaled to unit
/// norm before solving.
LpResult solve_lp(const Eigen::VectorXd &cost, const Polyhedron &P, const LpOptions &opt = {});

struct ChebyshevBall {
    Eigen::VectorXd center;
    /// Negative when P is empty; -infinity when P is trivially empty.
    double radius = 0.0;
};

struct GeometryOptions {
    /// Half-width of the implicit bounding box intersected with every
    /// Chebyshev LP.
    double box_bound = 1e6;
    double thin_tol = 1e-9;
    LpOptions lp{};
};

ChebyshevBall chebyshev_center(const Polyhedron &P, const GeometryOptions &opt = {});

struct EmptinessResult {
    bool empty = false;
    /// Radius within [-tol, tol]: lower-dimensional, reported as empty.
    bool thin = false;
    double radius = 0.0;
};

EmptinessResult is_empty(const Polyhedron &P, double tol = 1e-9, const GeometryOptions &opt = {});

enum class Containment { inside, boundary, outside };

/// Signed first-order distance of θ to the constraint boundary: positive when
/// satisfied. Linear rows use (β − aᵀθ)/‖a‖, polynomial rows use
/// −p(θ)/‖∇p(θ)‖.
double linear_slack(const Polyhedron &P, int row, const Eigen::Ref<const Eigen::VectorXd> &x);
double poly_slack(const PolyConstraint &c, const Eigen::Ref<const Eigen::VectorXd> &x);
/// Minimum slack over all constraints of R (+infinity when R has none).
double min_slack(const RegionDescription &R, const Eigen::Ref<const Eigen::VectorXd> &x);

Containment contains(const RegionDescription &R, const Eigen::Ref<const Eigen::VectorXd> &x, double tol);

struct InteriorPointOptions {
    /// Extra sequential-linearization refinement from the least-violating
    /// sample when sampling alone fails.
    bool refine = true;
    int refine_iterations = 60;
    /// Slack required of a returned point.
    double margin = 1e-9;
    GeometryOptions geometry{};
};

/// Point strictly inside R: the Chebyshev center of the linear part when it
/// satisfies the polynomial constraints, else the first of at most `budget`
/// hit-and-run samples that does. None when the budget is exhausted.
std::optional<Eigen::VectorXd> interior_point(const RegionDescription &R, int budget, std::uint64_t seed,
                                              const InteriorPointOptions &opt = {});

/// Hit-and-run random walk inside a bounded polyhedron, started from an
/// interior point. Directions are uniform on the sphere; chord endpoints come
/// from exact ray clipping against every halfspace (and the implicit box).
class HitAndRun {
public:
    HitAndRun(const Polyhedron &P, Eigen::VectorXd start, std::uint64_t seed, double box_bound = 1e6);
    const Eigen::VectorXd &next();
    const Eigen::VectorXd &current() const { return x_; }

private:
    Polyhedron P_;
    Eigen::VectorXd x_;
    Eigen::VectorXd dir_;
    double box_bound_;
    Xoshiro256 rng_;
};

/// Up to `count` points of R with slack > margin, drawn by hit-and-run from
/// an interior point; at most `budget` walk steps.
std::vector<Eigen::VectorXd> sample_region(const RegionDescription &R, int count, int budget, std::uint64_t seed,
                                           double margin = 1e-9, const GeometryOptions &opt = {});

/// Axis-aligned bounding box of P via 2·dim LPs. Returns false when empty or
/// unbounded.
bool bounding_box(const Polyhedron &P, Eigen::VectorXd &lo, Eigen::VectorXd &hi, const LpOptions &opt = {});

/// Drops rows implied by the remaining rows (one LP per row).
Polyhedron remove_redundant(const Polyhedron &P, double tol = 1e-9, const LpOptions &opt = {});

}  // namespace mpcert
