#include "mpcert/cert.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace mpcert {

namespace {

class Fnv {
public:
    void u64(std::uint64_t v) {
        for (int b = 0; b < 8; ++b) {
            h_ ^= (v >> (8 * b)) & 0xFFu;
            h_ *= 0x100000001b3ULL;
        }
    }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
    void matrix(const Eigen::MatrixXd &M) {
        u64(static_cast<std::uint64_t>(M.rows()));
        u64(static_cast<std::uint64_t>(M.cols()));
        for (Eigen::Index i = 0; i < M.rows(); ++i)
            for (Eigen::Index j = 0; j < M.cols(); ++j) f64(M(i, j));
    }
    std::uint64_t value() const { return h_; }

private:
    std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

std::uint64_t path_hash(const std::vector<int> &path) {
    Fnv h;
    for (int l : path) h.u64(static_cast<std::uint64_t>(l));
    return h.value();
}

Polynomial affine_poly(const Eigen::Ref<const Eigen::RowVectorXd> &a, double c) {
    std::vector<double> v(a.data(), a.data() + a.size());
    if (a.innerStride() != 1)
        for (Eigen::Index i = 0; i < a.size(); ++i) v[i] = a(i);
    return Polynomial::affine(v, c);
}

int max_degree(const std::vector<Polynomial> &N) {
    int d = -1;
    for (const auto &p : N) d = std::max(d, p.degree());
    return d;
}

void normalize(std::vector<Polynomial> &N) {
    double mx = 0.0;
    for (auto &p : N) {
        p.prune();
        mx = std::max(mx, p.max_abs_coeff());
    }
    if (mx > 0.0)
        for (auto &p : N) p *= 1.0 / mx;
}

// Region under construction: constraints are added in the form g(θ) <= 0.
struct Draft {
    RegionDescription region;
    bool contradictory = false;

    explicit Draft(RegionDescription r) : region(std::move(r)) {}

    void affine(const Eigen::Ref<const Eigen::RowVectorXd> &a, double c) {
        double scale = std::abs(c);
        for (Eigen::Index i = 0; i < a.size(); ++i) scale = std::max(scale, std::abs(a(i)));
        Eigen::VectorXd row = a.transpose();
        for (Eigen::Index i = 0; i < row.size(); ++i)
            if (std::abs(row(i)) <= 1e-14 * scale) row(i) = 0.0;
        const double nr = row.norm();
        if (nr == 0.0) {
            if (c > 0.0) contradictory = true;
            return;
        }
        region.linear.add(row / nr, -c / nr);
    }

    void poly(Polynomial p) {
        p.prune();
        if (p.degree() <= 1) {
            const int d = region.dim();
            Eigen::RowVectorXd a = Eigen::RowVectorXd::Zero(d);
            double c = 0.0;
            if (!p.is_zero()) p.affine_parts({a.data(), static_cast<std::size_t>(d)}, c);
            affine(a, c);
            return;
        }
        p *= 1.0 / p.max_abs_coeff();
        region.nonlinear.push_back({std::move(p)});
    }
};

enum class Fate { empty, thin, ok, unresolved };

constexpr double kArchetypeMargin = kBoundaryBand;

struct Node {
    RegionDescription region;
    WorkingSet W;
    int k = 0;
    std::vector<Polynomial> N;
    WorkingSetSequence seq;
    std::vector<int> path;
    Eigen::VectorXd witness;
};

struct Outcome {
    std::vector<Node> children;
    std::vector<RegionRecord> leaves;
    CertStats stats;
};

class Explorer {
public:
    Explorer(const DualData &dd, const SolverConfig &cfg, const CertOptions &opt) : dd_(dd), cfg_(cfg), opt_(opt) {}

    Fate settle(Draft &d, const Eigen::VectorXd &hint, bool need_center, std::uint64_t seed, Eigen::VectorXd &witness,
                CertStats &st) const {
        if (d.contradictory) {
            ++st.empty_prunes;
            return Fate::empty;
        }
        if (!need_center && hint.size() == d.region.dim() && min_slack(d.region, hint) > opt_.thin_tol) {
            witness = hint;
            return Fate::ok;
        }
        const ChebyshevBall ball = chebyshev_center(d.region.linear, opt_.geometry);
        if (!(ball.radius > opt_.thin_tol)) {
            if (ball.radius < -opt_.thin_tol) {
                ++st.empty_prunes;
                return Fate::empty;
            }
            ++st.thin_prunes;
            return Fate::thin;
        }
        if (d.region.polyhedral()) {
            witness = ball.center;
            return Fate::ok;
        }
        // Archetypes should stay clear of polynomial boundaries, where the
        // solver's floating-point comparisons may differ from the symbolic split.
        InteriorPointOptions ip;
        ip.geometry = opt_.geometry;
        const double margins[] = {std::min(kArchetypeMargin, 0.5 * ball.radius), opt_.thin_tol};
        for (double margin : margins) {
            if (!need_center && margin > opt_.thin_tol) continue;
            if (min_slack(d.region, ball.center) > margin) {
                witness = ball.center;
                return Fate::ok;
            }
            ip.margin = margin;
            if (auto pt = interior_point(d.region, opt_.interior_budget, seed, ip)) {
                witness = *pt;
                return Fate::ok;
            }
        }
        return Fate::unresolved;
    }

    std::uint64_t seed_for(const std::vector<int> &path) const { return derive_seed(opt_.seed, path_hash(path)); }

    void leaf(Outcome &out, Draft &d, const Eigen::VectorXd &hint, std::vector<int> path, WorkingSetSequence seq,
              int iterations, RegionStatus status) const {
        Eigen::VectorXd w;
        const Fate f = settle(d, hint, true, seed_for(path), w, out.stats);
        if (f == Fate::empty || f == Fate::thin) return;
        RegionRecord r;
        r.branch_path = std::move(path);
        r.region = std::move(d.region);
        r.sequence = std::move(seq);
        r.iterations = iterations;
        r.status = f == Fate::unresolved ? RegionStatus::unresolved : status;
        if (f == Fate::ok) r.archetype = w;
        if (r.status == RegionStatus::unresolved) ++out.stats.unresolved;
        out.leaves.push_back(std::move(r));
    }

    // A successor iterate: either the next node, an iter_cap leaf, or an
    // unresolved leaf when no point of its region can be found.
    void child(Outcome &out, Draft &d, const Eigen::VectorXd &hint, const Node &parent, const WorkingSetSequence &seq,
               int label, WorkingSet W, std::vector<Polynomial> N) const {
        std::vector<int> path = parent.path;
        path.push_back(label);
        const int k = parent.k + 1;
        if (k >= cfg_.k_max) {
            WorkingSetSequence full = seq;
            full.push_back(W);
            leaf(out, d, hint, std::move(path), std::move(full), cfg_.k_max, RegionStatus::iter_cap);
            return;
        }
        Eigen::VectorXd w;
        const Fate f = settle(d, hint, false, seed_for(path), w, out.stats);
        if (f == Fate::empty || f == Fate::thin) return;
        if (f == Fate::unresolved) {
            WorkingSetSequence partial = seq;
            partial.push_back(W);
            RegionRecord r;
            r.branch_path = std::move(path);
            r.region = std::move(d.region);
            r.sequence = std::move(partial);
            r.iterations = k;
            r.status = RegionStatus::unresolved;
            ++out.stats.unresolved;
            out.leaves.push_back(std::move(r));
            return;
        }
        Node n;
        n.region = std::move(d.region);
        n.W = std::move(W);
        n.k = k;
        n.N = std::move(N);
        normalize(n.N);
        n.seq = seq;
        n.path = std::move(path);
        n.witness = std::move(w);
        out.children.push_back(std::move(n));
    }

    Outcome expand(const Node &node) const {
        Outcome out;
        out.stats.nodes = 1;
        WorkingSetSequence seq = node.seq;
        seq.push_back(node.W);
        out.stats.max_depth = static_cast<int>(seq.size());

        const GramFactor g = gram(dd_, node.W, cfg_.dual);
        if (!g.singular)
            expand_regular(out, node, seq);
        else
            expand_singular(out, node, seq);
        return out;
    }

private:
    void expand_regular(Outcome &out, const Node &node, const WorkingSetSequence &seq) const {
        const int m = dd_.m;
        const int s = node.W.size();
        const AffineMap lam = affine_lambda_map(dd_, node.W, cfg_.dual);
        std::vector<Polynomial> L;
        L.reserve(s);
        for (int j = 0; j < s; ++j) L.push_back(affine_poly(lam.E.row(j), lam.e(j)));

        // λ* >= 0: the iterate becomes λ* and μ decides.
        Draft base(node.region);
        for (int j = 0; j < s; ++j) base.affine(-lam.E.row(j), -lam.e(j));
        Eigen::VectorXd bw;
        const Fate bf = base.contradictory ? Fate::empty : settle(base, node.witness, false, 0, bw, out.stats);
        if (bf == Fate::ok || bf == Fate::unresolved) {
            if (bf == Fate::unresolved) bw = node.witness;
            const AffineMap mu = affine_mu_map(dd_, node.W, lam);
            const std::vector<int> comp = node.W.complement(m);
            const int r = static_cast<int>(comp.size());

            Draft term(base.region);
            for (int q = 0; q < r; ++q) term.affine(-mu.E.row(q), -mu.e(q));
            std::vector<int> tpath = node.path;
            tpath.push_back(0);
            leaf(out, term, bw, std::move(tpath), seq, node.k + 1, RegionStatus::optimal);

            for (int q = 0; q < r; ++q) {
                Draft add(base.region);
                add.affine(mu.E.row(q), mu.e(q));
                if (cfg_.add_rule == AddRule::dantzig) {
                    for (int o = 0; o < r; ++o)
                        if (o != q) add.affine(mu.E.row(q) - mu.E.row(o), mu.e(q) - mu.e(o));
                } else {
                    for (int o = 0; o < q; ++o) add.affine(-mu.E.row(o), -mu.e(o));
                }
                WorkingSet W = node.W;
                W.push(comp[q]);
                std::vector<Polynomial> N = L;
                N.push_back(Polynomial(dd_.n_theta));
                child(out, add, bw, node, seq, 1 + comp[q], std::move(W), std::move(N));
            }
        }

        if (s == 0) return;
        // Some λ*_j < 0: blocking-constraint removal.
        const int degN = std::max(0, max_degree(node.N));
        for (int j = 0; j < s; ++j) {
            Draft cand(node.region);
            cand.affine(lam.E.row(j), lam.e(j));
            if (cand.contradictory) continue;
            const int label = 1 + m + node.W[j];
            if (1 + degN > opt_.degree_cap) {
                Draft frozen(cand.region);
                for (int l = 0; l < j; ++l) frozen.affine(-lam.E.row(l), -lam.e(l));
                std::vector<int> path = node.path;
                path.push_back(label);
                leaf(out, frozen, node.witness, std::move(path), seq, node.k + 1, RegionStatus::unresolved);
                continue;
            }
            Eigen::VectorXd cw;
            const Fate cf = settle(cand, node.witness, false, 0, cw, out.stats);
            if (cf == Fate::empty || cf == Fate::thin) continue;
            if (cf == Fate::unresolved) cw = node.witness;

            Draft rem(cand.region);
            for (int k = 0; k < s; ++k) {
                if (k == j) continue;
                Draft pair(RegionDescription(cand.region.linear));
                pair.affine(lam.E.row(k), lam.e(k));
                if (pair.contradictory) {
                    ++out.stats.dropped_comparisons;
                    continue;
                }
                const ChebyshevBall pb = chebyshev_center(pair.region.linear, opt_.geometry);
                if (!(pb.radius > opt_.thin_tol)) {
                    ++out.stats.dropped_comparisons;
                    continue;
                }
                rem.poly(L[j] * node.N[k] - L[k] * node.N[j]);
            }
            std::vector<Polynomial> N;
            N.reserve(s - 1);
            for (int l = 0; l < s; ++l)
                if (l != j) N.push_back((-1.0) * (L[j] * node.N[l]) + node.N[j] * L[l]);
            WorkingSet W = node.W;
            W.erase_at(j);
            child(out, rem, cw, node, seq, label, std::move(W), std::move(N));
        }
    }

    void expand_singular(Outcome &out, const Node &node, const WorkingSetSequence &seq) const {
        const int m = dd_.m;
        const int s = node.W.size();
        const Eigen::VectorXd p = null_direction(dd_, node.W, cfg_.dual);
        Eigen::RowVectorXd sa = Eigen::RowVectorXd::Zero(dd_.n_theta);
        double sc = 0.0;
        for (int j = 0; j < s; ++j) {
            sa += p(j) * dd_.D.row(node.W[j]);
            sc += dd_.d0(node.W[j]) * p(j);
        }
        double scale = 0.0;
        for (int j = 0; j < s; ++j) scale = std::max(scale, std::abs(p(j)) * dd_.D.row(node.W[j]).cwiseAbs().maxCoeff());
        for (Eigen::Index i = 0; i < sa.size(); ++i)
            if (std::abs(sa(i)) <= 1e-14 * scale) sa(i) = 0.0;
        const bool constant = sa.isZero(0.0);

        for (int o = 0; o < 2; ++o) {
            if (constant && (o == 1) != (sc > 0.0)) continue;
            Draft side(node.region);
            if (!constant) {
                if (o == 0)
                    side.affine(sa, sc);
                else
                    side.affine(-sa, -sc);
            }
            Eigen::VectorXd sw;
            const Fate sf = settle(side, node.witness, false, 0, sw, out.stats);
            if (sf == Fate::empty || sf == Fate::thin) continue;
            if (sf == Fate::unresolved) sw = node.witness;
            const Eigen::VectorXd pp = o == 0 ? p : Eigen::VectorXd(-p);
            const int base_label = o * (m + 2);

            std::vector<int> cands;
            for (int j = 0; j < s; ++j)
                if (pp(j) < -cfg_.p_tol) cands.push_back(j);
            if (cands.empty()) {
                std::vector<int> path = node.path;
                path.push_back(base_label);
                leaf(out, side, sw, std::move(path), seq, node.k + 1, RegionStatus::infeasible);
                continue;
            }
            for (int j : cands) {
                Draft rem(side.region);
                for (int l : cands)
                    if (l != j) rem.poly(node.N[j] * (-pp(l)) - node.N[l] * (-pp(j)));
                std::vector<Polynomial> N;
                N.reserve(s - 1);
                for (int l = 0; l < s; ++l)
                    if (l != j) N.push_back(node.N[l] + node.N[j] * (pp(l) / -pp(j)));
                WorkingSet W = node.W;
                W.erase_at(j);
                child(out, rem, sw, node, seq, base_label + 1 + node.W[j], std::move(W), std::move(N));
            }
        }
    }

    const DualData &dd_;
    const SolverConfig &cfg_;
    const CertOptions &opt_;
};

void merge(CertStats &a, const CertStats &b) {
    a.nodes += b.nodes;
    a.max_depth = std::max(a.max_depth, b.max_depth);
    a.empty_prunes += b.empty_prunes;
    a.thin_prunes += b.thin_prunes;
    a.unresolved += b.unresolved;
    a.dropped_comparisons += b.dropped_comparisons;
}

}  // namespace

std::string_view region_status_name(RegionStatus s) {
    switch (s) {
        case RegionStatus::optimal: return "optimal";
        case RegionStatus::infeasible: return "infeasible";
        case RegionStatus::iter_cap: return "iter_cap";
        case RegionStatus::unresolved: return "unresolved";
    }
    return "unknown";
}

std::optional<RegionStatus> region_status_from_name(std::string_view name) {
    for (auto s : {RegionStatus::optimal, RegionStatus::infeasible, RegionStatus::iter_cap, RegionStatus::unresolved})
        if (region_status_name(s) == name) return s;
    return std::nullopt;
}

std::uint64_t problem_digest(const DualData &dd, const Polyhedron &theta0) {
    Fnv h;
    h.u64(static_cast<std::uint64_t>(dd.n));
    h.u64(static_cast<std::uint64_t>(dd.m));
    h.u64(static_cast<std::uint64_t>(dd.n_theta));
    h.matrix(dd.M);
    h.matrix(dd.d0);
    h.matrix(dd.D);
    h.matrix(theta0.normals);
    h.matrix(theta0.offsets);
    return h.value();
}

CertOutput certify(const DualData &dd, const Polyhedron &theta0, const SolverConfig &cfg, const CertOptions &opt) {
    if (dd.n_theta < 1) throw InvalidInput("certify: the problem has no parameters");
    if (theta0.dim() != dd.n_theta) throw InvalidInput("certify: Theta0 dimension must equal n_theta");
    theta0.validate();
    cfg.validate(dd.m);
    if (opt.degree_cap < 1) throw InvalidInput("certify: degree_cap must be at least 1");
    if (opt.interior_budget < 1) throw InvalidInput("certify: interior budget must be at least 1");
    if (cfg.remove_rule != RemoveRule::classic_blocking)
        throw InvalidInput("certify: only the classic_blocking removal rule can be certified");
    Eigen::VectorXd lo, hi;
    if (!bounding_box(theta0, lo, hi, opt.geometry.lp)) throw InvalidInput("certify: Theta0 is empty or unbounded");

    CertOutput C;
    C.problem_digest = problem_digest(dd, theta0);
    C.seed = opt.seed;
    C.degree_cap = opt.degree_cap;
    C.k_max = cfg.k_max;
    C.add_rule = cfg.add_rule;
    C.remove_rule = cfg.remove_rule;
    C.theta0 = theta0;

    const Explorer ex(dd, cfg, opt);
    Node root;
    root.region = RegionDescription(theta0);
    root.W = cfg.W0;
    for (int j = 0; j < root.W.size(); ++j) {
        const double v = cfg.lambda0.size() == dd.m ? cfg.lambda0(root.W[j]) : 0.0;
        root.N.push_back(Polynomial::constant(dd.n_theta, v));
    }
    {
        Draft d(root.region);
        const Fate f = ex.settle(d, Eigen::VectorXd(), true, 0, root.witness, C.stats);
        if (f != Fate::ok) throw InvalidInput("certify: Theta0 has an empty interior");
    }

    int threads = opt.threads;
    if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

    std::vector<Node> layer;
    layer.push_back(std::move(root));
    std::vector<RegionRecord> leaves;
    while (!layer.empty()) {
        std::vector<Outcome> outs(layer.size());
        const int workers = static_cast<int>(std::min<std::size_t>(threads, layer.size()));
        if (workers <= 1) {
            for (std::size_t i = 0; i < layer.size(); ++i) outs[i] = ex.expand(layer[i]);
        } else {
            std::atomic<std::size_t> next{0};
            std::exception_ptr err;
            std::mutex err_mu;
            std::vector<std::thread> pool;
            for (int t = 0; t < workers; ++t)
                pool.emplace_back([&] {
                    for (std::size_t i = next++; i < layer.size(); i = next++) {
                        try {
                            outs[i] = ex.expand(layer[i]);
                        } catch (...) {
                            std::lock_guard lock(err_mu);
                            if (!err) err = std::current_exception();
                        }
                    }
                });
            for (auto &th : pool) th.join();
            if (err) std::rethrow_exception(err);
        }
        std::vector<Node> next_layer;
        for (auto &o : outs) {
            merge(C.stats, o.stats);
            for (auto &c : o.children) next_layer.push_back(std::move(c));
            for (auto &l : o.leaves) leaves.push_back(std::move(l));
        }
        if (C.stats.nodes > opt.max_nodes) throw std::runtime_error("certify: node limit exceeded");
        layer = std::move(next_layer);
    }

    std::sort(leaves.begin(), leaves.end(),
              [](const RegionRecord &a, const RegionRecord &b) { return a.branch_path < b.branch_path; });
    for (std::size_t i = 0; i < leaves.size(); ++i) leaves[i].id = static_cast<int>(i);
    C.regions = std::move(leaves);
    return C;
}

}  // namespace mpcert
