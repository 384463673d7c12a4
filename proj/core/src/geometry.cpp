#include "mpcert/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mpcert {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kZeroRow = 1e-13;

void require(bool cond, const char *msg) {
    if (!cond) throw std::invalid_argument(msg);
}
}  // namespace

// ---------------------------------------------------------------------------
// Polyhedron
// ---------------------------------------------------------------------------

Polyhedron::Polyhedron(Eigen::MatrixXd a, Eigen::VectorXd b) : normals(std::move(a)), offsets(std::move(b)) {
    require(normals.rows() == offsets.size(), "Polyhedron: normals and offsets row counts differ");
}

Polyhedron Polyhedron::box(const Eigen::VectorXd &lo, const Eigen::VectorXd &hi) {
    require(lo.size() == hi.size(), "Polyhedron::box: bound sizes differ");
    const int d = static_cast<int>(lo.size());
    Polyhedron P(d);
    P.normals.resize(2 * d, d);
    P.normals.setZero();
    P.offsets.resize(2 * d);
    for (int i = 0; i < d; ++i) {
        P.normals(2 * i, i) = 1.0;
        P.offsets(2 * i) = hi(i);
        P.normals(2 * i + 1, i) = -1.0;
        P.offsets(2 * i + 1) = -lo(i);
    }
    return P;
}

void Polyhedron::add(const Eigen::Ref<const Eigen::VectorXd> &a, double b) {
    require(a.size() == normals.cols(), "Polyhedron::add: dimension mismatch");
    const Eigen::Index r = normals.rows();
    normals.conservativeResize(r + 1, Eigen::NoChange);
    offsets.conservativeResize(r + 1);
    normals.row(r) = a.transpose();
    offsets(r) = b;
}

void Polyhedron::append(const Polyhedron &other) {
    require(other.dim() == dim(), "Polyhedron::append: dimension mismatch");
    const Eigen::Index r = normals.rows();
    normals.conservativeResize(r + other.normals.rows(), Eigen::NoChange);
    offsets.conservativeResize(r + other.offsets.size());
    normals.bottomRows(other.normals.rows()) = other.normals;
    offsets.tail(other.offsets.size()) = other.offsets;
}

void Polyhedron::validate() const {
    require(normals.rows() == offsets.size(), "Polyhedron: normals and offsets row counts differ");
    require(normals.allFinite() && offsets.allFinite(), "Polyhedron: non-finite entry");
}

bool Polyhedron::trivially_empty(double tol) const {
    for (int i = 0; i < rows(); ++i)
        if (normals.row(i).norm() <= kZeroRow && offsets(i) < -tol) return true;
    return false;
}

bool Polyhedron::satisfied(const Eigen::Ref<const Eigen::VectorXd> &x, double tol) const {
    for (int i = 0; i < rows(); ++i)
        if (normals.row(i).dot(x) > offsets(i) + tol) return false;
    return true;
}

void PolyConstraint::validate(int dim) const {
    require(p.nvars() == dim, "PolyConstraint: variable count does not match region dimension");
    require(p.degree() >= 2, "PolyConstraint: degree must be at least 2");
    for (const auto &t : p.terms()) require(std::isfinite(t.coeff), "PolyConstraint: non-finite coefficient");
}

// ---------------------------------------------------------------------------
// Simplex
// ---------------------------------------------------------------------------

namespace {

class Tableau {
public:
    Tableau(int rows, int cols) : rows_(rows), cols_(cols), data_((rows + 1) * (cols + 1), 0.0), basis_(rows, -1) {}

    double &at(int i, int j) { return data_[static_cast<std::size_t>(i) * (cols_ + 1) + j]; }
    double at(int i, int j) const { return data_[static_cast<std::size_t>(i) * (cols_ + 1) + j]; }
    double &rhs(int i) { return at(i, cols_); }
    double &obj(int j) { return at(rows_, j); }
    int rows() const { return rows_; }
    int cols() const { return cols_; }
    std::vector<int> &basis() { return basis_; }

    void pivot(int pr, int pc) {
        double *prow = &data_[static_cast<std::size_t>(pr) * (cols_ + 1)];
        const double inv = 1.0 / prow[pc];
        for (int j = 0; j <= cols_; ++j) prow[j] *= inv;
        prow[pc] = 1.0;
        for (int i = 0; i <= rows_; ++i) {
            if (i == pr) continue;
            double *row = &data_[static_cast<std::size_t>(i) * (cols_ + 1)];
            const double f = row[pc];
            if (f == 0.0) continue;
            for (int j = 0; j <= cols_; ++j) row[j] -= f * prow[j];
            row[pc] = 0.0;
        }
        basis_[pr] = pc;
    }

    enum class Outcome { optimal, unbounded, stalled };

    // Bland's rule: entering = lowest-index column with negative reduced
    // cost; leaving = minimum ratio, ties to the lowest basic index.
    Outcome run(int allowed_cols, const LpOptions &opt) {
        for (int it = 0; it < opt.max_pivots; ++it) {
            int pc = -1;
            for (int j = 0; j < allowed_cols; ++j)
                if (obj(j) < -opt.pivot_tol) {
                    pc = j;
                    break;
                }
            if (pc < 0) return Outcome::optimal;
            int pr = -1;
            double best = kInf;
            for (int i = 0; i < rows_; ++i) {
                const double a = at(i, pc);
                if (a <= opt.pivot_tol) continue;
                const double ratio = std::max(rhs(i), 0.0) / a;
                const double eps = 1e-14 * std::max(1.0, std::abs(best));
                if (pr < 0 || ratio < best - eps) {
                    best = ratio;
                    pr = i;
                } else if (ratio <= best + eps && basis_[i] < basis_[pr]) {
                    pr = i;
                }
            }
            if (pr < 0) return Outcome::unbounded;
            pivot(pr, pc);
        }
        return Outcome::stalled;
    }

private:
    int rows_, cols_;
    std::vector<double> data_;
    std::vector<int> basis_;
};

}  // namespace

LpResult solve_lp(const Eigen::VectorXd &cost, const Polyhedron &P, const LpOptions &opt) {
    require(cost.size() == P.dim(), "solve_lp: cost dimension does not match polyhedron");
    require(cost.allFinite(), "solve_lp: non-finite cost");
    P.validate();

    const int n = P.dim();
    LpResult res;

    // Normalize rows; drop zero rows after checking their sign.
    std::vector<int> keep;
    std::vector<double> scale;
    for (int i = 0; i < P.rows(); ++i) {
        const double nr = P.normals.row(i).norm();
        if (nr <= kZeroRow) {
            if (P.offsets(i) < -opt.feas_tol) {
                res.status = LpStatus::infeasible;
                return res;
            }
            continue;
        }
        keep.push_back(i);
        scale.push_back(1.0 / nr);
    }
    const int r = static_cast<int>(keep.size());

    if (r == 0) {
        res.x = Eigen::VectorXd::Zero(n);
        if (cost.norm() > 0.0) {
            res.status = LpStatus::unbounded;
            return res;
        }
        res.status = LpStatus::optimal;
        res.value = 0.0;
        return res;
    }

    int n_art = 0;
    for (int k = 0; k < r; ++k)
        if (P.offsets(keep[k]) * scale[k] < 0.0) ++n_art;

    const int c_slack = 2 * n;
    const int c_art = 2 * n + r;
    const int ncols = 2 * n + r + n_art;
    Tableau T(r, ncols);

    double art_scale = 1.0;
    int a = 0;
    for (int k = 0; k < r; ++k) {
        const int i = keep[k];
        const double s = scale[k];
        const double b = P.offsets(i) * s;
        const double sign = b < 0.0 ? -1.0 : 1.0;
        for (int j = 0; j < n; ++j) {
            const double v = P.normals(i, j) * s * sign;
            T.at(k, j) = v;
            T.at(k, n + j) = -v;
        }
        T.at(k, c_slack + k) = sign;
        T.rhs(k) = b * sign;
        if (sign < 0.0) {
            T.at(k, c_art + a) = 1.0;
            T.basis()[k] = c_art + a;
            art_scale = std::max(art_scale, std::abs(b));
            ++a;
        } else {
            T.basis()[k] = c_slack + k;
        }
    }

    if (n_art > 0) {
        // Phase I: minimize the sum of artificials.
        for (int j = 0; j <= ncols; ++j) T.obj(j) = 0.0;
        for (int j = c_art; j < ncols; ++j) T.obj(j) = 1.0;
        for (int k = 0; k < r; ++k)
            if (T.basis()[k] >= c_art)
                for (int j = 0; j <= ncols; ++j) T.obj(j) -= T.at(k, j);
        const auto out = T.run(ncols, opt);
        if (out == Tableau::Outcome::stalled) throw std::runtime_error("solve_lp: pivot limit reached in phase I");
        const double infeas = -T.obj(ncols);
        if (infeas > opt.feas_tol * art_scale) {
            res.status = LpStatus::infeasible;
            return res;
        }
        // Drive remaining artificials out of the basis.
        for (int k = 0; k < r; ++k) {
            if (T.basis()[k] < c_art) continue;
            for (int j = 0; j < c_art; ++j) {
                if (std::abs(T.at(k, j)) > 1e-9) {
                    T.pivot(k, j);
                    break;
                }
            }
        }
    }

    // Phase II objective over (θ⁺, θ⁻).
    auto col_cost = [&](int j) -> double {
        if (j < n) return cost(j);
        if (j < 2 * n) return -cost(j - n);
        return 0.0;
    };
    for (int j = 0; j <= ncols; ++j) T.obj(j) = (j < ncols) ? col_cost(j) : 0.0;
    for (int k = 0; k < r; ++k) {
        const double cb = col_cost(T.basis()[k]);
        if (cb == 0.0) continue;
        for (int j = 0; j <= ncols; ++j) T.obj(j) -= cb * T.at(k, j);
    }
    const auto out = T.run(c_art, opt);
    if (out == Tableau::Outcome::stalled) throw std::runtime_error("solve_lp: pivot limit reached in phase II");

    Eigen::VectorXd xs = Eigen::VectorXd::Zero(2 * n);
    for (int k = 0; k < r; ++k) {
        const int b = T.basis()[k];
        if (b < 2 * n) xs(b) = T.rhs(k);
    }
    res.x = xs.head(n) - xs.tail(n);
    if (out == Tableau::Outcome::unbounded) {
        res.status = LpStatus::unbounded;
        return res;
    }
    res.status = LpStatus::optimal;
    res.value = cost.dot(res.x);
    return res;
}

// ---------------------------------------------------------------------------
// Chebyshev center and emptiness
// ---------------------------------------------------------------------------

ChebyshevBall chebyshev_center(const Polyhedron &P, const GeometryOptions &opt) {
    P.validate();
    const int d = P.dim();
    ChebyshevBall ball;
    ball.center = Eigen::VectorXd::Zero(d);
    if (P.trivially_empty()) {
        ball.radius = -kInf;
        return ball;
    }
    Polyhedron L(d + 1);
    int rows = 0;
    for (int i = 0; i < P.rows(); ++i)
        if (P.normals.row(i).norm() > kZeroRow) ++rows;
    L.normals.resize(rows + 2 * d, d + 1);
    L.offsets.resize(rows + 2 * d);
    int k = 0;
    for (int i = 0; i < P.rows(); ++i) {
        const double nr = P.normals.row(i).norm();
        if (nr <= kZeroRow) continue;
        L.normals.row(k).head(d) = P.normals.row(i) / nr;
        L.normals(k, d) = 1.0;
        L.offsets(k) = P.offsets(i) / nr;
        ++k;
    }
    for (int j = 0; j < d; ++j) {
        L.normals.row(k).setZero();
        L.normals(k, j) = 1.0;
        L.normals(k, d) = 1.0;
        L.offsets(k++) = opt.box_bound;
        L.normals.row(k).setZero();
        L.normals(k, j) = -1.0;
        L.normals(k, d) = 1.0;
        L.offsets(k++) = opt.box_bound;
    }
    // Shift r by the smallest offset so that (0, 0) is feasible and the
    // simplex starts without a phase I.
    const double shift = std::min(0.0, L.offsets.minCoeff()) - 1.0;
    L.offsets.array() -= shift;
    Eigen::VectorXd c = Eigen::VectorXd::Zero(d + 1);
    c(d) = -1.0;
    LpResult lp = solve_lp(c, L, opt.lp);
    if (lp.status == LpStatus::optimal) lp.x(d) += shift;
    if (lp.status != LpStatus::optimal) {
        throw std::runtime_error("chebyshev_center: LP did not reach an optimum");
    }
    ball.center = lp.x.head(d);
    ball.radius = lp.x(d);
    return ball;
}

EmptinessResult is_empty(const Polyhedron &P, double tol, const GeometryOptions &opt) {
    require(tol >= 0.0, "is_empty: negative tolerance");
    const ChebyshevBall ball = chebyshev_center(P, opt);
    EmptinessResult r;
    r.radius = ball.radius;
    r.thin = ball.radius >= -tol && ball.radius <= tol;
    r.empty = ball.radius <= tol;
    return r;
}

// ---------------------------------------------------------------------------
// Membership
// ---------------------------------------------------------------------------

double linear_slack(const Polyhedron &P, int row, const Eigen::Ref<const Eigen::VectorXd> &x) {
    const double nr = P.normals.row(row).norm();
    const double s = P.offsets(row) - P.normals.row(row).dot(x);
    return nr <= kZeroRow ? s : s / nr;
}

double poly_slack(const PolyConstraint &c, const Eigen::Ref<const Eigen::VectorXd> &x) {
    const int d = static_cast<int>(x.size());
    Eigen::VectorXd xv = x;
    Eigen::VectorXd g(d);
    const double v = c.p.eval({xv.data(), static_cast<std::size_t>(d)});
    c.p.gradient({xv.data(), static_cast<std::size_t>(d)}, {g.data(), static_cast<std::size_t>(d)});
    const double gn = g.norm();
    if (gn <= 1e-300) return v == 0.0 ? 0.0 : (v < 0.0 ? kInf : -kInf);
    return -v / gn;
}

double min_slack(const RegionDescription &R, const Eigen::Ref<const Eigen::VectorXd> &x) {
    double m = kInf;
    for (int i = 0; i < R.linear.rows(); ++i) m = std::min(m, linear_slack(R.linear, i, x));
    for (const auto &c : R.nonlinear) m = std::min(m, poly_slack(c, x));
    return m;
}

Containment contains(const RegionDescription &R, const Eigen::Ref<const Eigen::VectorXd> &x, double tol) {
    require(x.size() == R.dim(), "contains: dimension mismatch");
    const double m = min_slack(R, x);
    if (m > tol) return Containment::inside;
    if (m >= -tol) return Containment::boundary;
    return Containment::outside;
}

// ---------------------------------------------------------------------------
// Hit-and-run and interior points
// ---------------------------------------------------------------------------

HitAndRun::HitAndRun(const Polyhedron &P, Eigen::VectorXd start, std::uint64_t seed, double box_bound)
    : P_(P), x_(std::move(start)), dir_(P.dim()), box_bound_(box_bound), rng_(seed) {}

const Eigen::VectorXd &HitAndRun::next() {
    const int d = P_.dim();
    rng_.unit_direction({dir_.data(), static_cast<std::size_t>(d)});
    double tmin = -kInf, tmax = kInf;
    for (int i = 0; i < P_.rows(); ++i) {
        const double au = P_.normals.row(i).dot(dir_);
        const double s = P_.offsets(i) - P_.normals.row(i).dot(x_);
        if (au > 1e-14)
            tmax = std::min(tmax, s / au);
        else if (au < -1e-14)
            tmin = std::max(tmin, s / au);
    }
    for (int j = 0; j < d; ++j) {
        const double u = dir_(j);
        if (u > 1e-14) {
            tmax = std::min(tmax, (box_bound_ - x_(j)) / u);
            tmin = std::max(tmin, (-box_bound_ - x_(j)) / u);
        } else if (u < -1e-14) {
            tmax = std::min(tmax, (-box_bound_ - x_(j)) / u);
            tmin = std::max(tmin, (box_bound_ - x_(j)) / u);
        }
    }
    if (tmin > 0.0) tmin = 0.0;
    if (tmax < 0.0) tmax = 0.0;
    const double t = rng_.uniform(tmin, tmax);
    x_ += t * dir_;
    return x_;
}

namespace {

// Sequential linearization: maximize the linearized margin inside a trust
// box around the current point.
std::optional<Eigen::VectorXd> refine_point(const RegionDescription &R, Eigen::VectorXd x, double start_radius,
                                            const InteriorPointOptions &opt) {
    const int d = R.dim();
    double best = min_slack(R, x);
    double delta = std::max(start_radius, 1e-4);
    Eigen::VectorXd g(d);
    for (int it = 0; it < opt.refine_iterations && delta > 1e-12; ++it) {
        if (best > opt.margin) return x;
        Polyhedron L(d + 1);
        for (int i = 0; i < R.linear.rows(); ++i) {
            const double nr = R.linear.normals.row(i).norm();
            if (nr <= kZeroRow) continue;
            Eigen::VectorXd row(d + 1);
            row.head(d) = R.linear.normals.row(i).transpose() / nr;
            row(d) = 1.0;
            L.add(row, R.linear.offsets(i) / nr);
        }
        for (const auto &c : R.nonlinear) {
            const double v = c.p.eval({x.data(), static_cast<std::size_t>(d)});
            c.p.gradient({x.data(), static_cast<std::size_t>(d)}, {g.data(), static_cast<std::size_t>(d)});
            const double gn = g.norm();
            if (gn <= 1e-14) continue;
            Eigen::VectorXd row(d + 1);
            row.head(d) = g / gn;
            row(d) = 1.0;
            L.add(row, (g.dot(x) - v) / gn);
        }
        for (int j = 0; j < d; ++j) {
            Eigen::VectorXd row = Eigen::VectorXd::Zero(d + 1);
            row(j) = 1.0;
            L.add(row, x(j) + delta);
            row(j) = -1.0;
            L.add(row, -x(j) + delta);
        }
        Eigen::VectorXd cap = Eigen::VectorXd::Zero(d + 1);
        cap(d) = 1.0;
        L.add(cap, delta);
        Eigen::VectorXd cost = Eigen::VectorXd::Zero(d + 1);
        cost(d) = -1.0;
        LpResult lp;
        try {
            lp = solve_lp(cost, L, opt.geometry.lp);
        } catch (const std::runtime_error &) {
            return std::nullopt;
        }
        if (lp.status != LpStatus::optimal) return std::nullopt;
        Eigen::VectorXd cand = lp.x.head(d);
        const double s = min_slack(R, cand);
        if (s > best) {
            x = cand;
            best = s;
            delta = std::min(delta * 2.0, opt.geometry.box_bound);
        } else {
            delta *= 0.5;
        }
    }
    if (best > opt.margin) return x;
    return std::nullopt;
}

}  // namespace

std::optional<Eigen::VectorXd> interior_point(const RegionDescription &R, int budget, std::uint64_t seed,
                                              const InteriorPointOptions &opt) {
    require(budget >= 1, "interior_point: budget must be at least 1");
    const ChebyshevBall ball = chebyshev_center(R.linear, opt.geometry);
    if (!(ball.radius > opt.margin)) return std::nullopt;
    if (R.polyhedral()) return ball.center;
    double best = min_slack(R, ball.center);
    if (best > opt.margin) return ball.center;
    Eigen::VectorXd best_x = ball.center;
    HitAndRun walk(R.linear, ball.center, seed, opt.geometry.box_bound);
    for (int s = 0; s < budget; ++s) {
        const Eigen::VectorXd &x = walk.next();
        const double m = min_slack(R, x);
        if (m > opt.margin) return x;
        if (m > best) {
            best = m;
            best_x = x;
        }
    }
    if (opt.refine) return refine_point(R, best_x, ball.radius, opt);
    return std::nullopt;
}

std::vector<Eigen::VectorXd> sample_region(const RegionDescription &R, int count, int budget, std::uint64_t seed,
                                           double margin, const GeometryOptions &opt) {
    std::vector<Eigen::VectorXd> out;
    InteriorPointOptions ip;
    ip.margin = margin;
    ip.geometry = opt;
    const auto start = interior_point(R, std::max(budget, 1), seed, ip);
    if (!start) return out;
    HitAndRun walk(R.linear, *start, derive_seed(seed, 1), opt.box_bound);
    for (int s = 0; s < budget && static_cast<int>(out.size()) < count; ++s) {
        const Eigen::VectorXd &x = walk.next();
        if (min_slack(R, x) > margin) out.push_back(x);
    }
    return out;
}

bool bounding_box(const Polyhedron &P, Eigen::VectorXd &lo, Eigen::VectorXd &hi, const LpOptions &opt) {
    const int d = P.dim();
    lo.resize(d);
    hi.resize(d);
    Eigen::VectorXd c = Eigen::VectorXd::Zero(d);
    for (int j = 0; j < d; ++j) {
        c.setZero();
        c(j) = 1.0;
        LpResult r = solve_lp(c, P, opt);
        if (r.status != LpStatus::optimal) return false;
        lo(j) = r.value;
        c(j) = -1.0;
        r = solve_lp(c, P, opt);
        if (r.status != LpStatus::optimal) return false;
        hi(j) = -r.value;
    }
    return true;
}

Polyhedron remove_redundant(const Polyhedron &P, double tol, const LpOptions &opt) {
    std::vector<bool> keep(P.rows(), true);
    for (int i = 0; i < P.rows(); ++i) {
        if (P.normals.row(i).norm() <= kZeroRow) {
            if (P.offsets(i) >= 0.0) keep[i] = false;
            continue;
        }
        Polyhedron Q(P.dim());
        for (int j = 0; j < P.rows(); ++j) {
            if (!keep[j]) continue;
            Q.add(P.normals.row(j).transpose(), j == i ? P.offsets(j) + 1.0 : P.offsets(j));
        }
        const LpResult r = solve_lp(-P.normals.row(i).transpose(), Q, opt);
        if (r.status == LpStatus::optimal && -r.value <= P.offsets(i) + tol) keep[i] = false;
    }
    Polyhedron out(P.dim());
    for (int i = 0; i < P.rows(); ++i)
        if (keep[i]) out.add(P.normals.row(i).transpose(), P.offsets(i));
    return out;
}

}  // namespace mpcert
