#include "mpcert/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace mpcert {

namespace {

constexpr std::array<std::string_view, kBlockCount> kBlockNames = {
    "SING_CHECK", "LINSYS",  "LAM_CHECK", "MU_COMP",     "MU_CHECK",      "ADD",
    "REMOVE_RATIO", "SING_DIR", "P_CHECK",   "SING_REMOVE", "TERMINATE_OPT", "TERMINATE_INF",
};

// {coeff, s, r, n, m}
constexpr CountTerm kSingCheckF[] = {{0, 0, 0, 0, 0}};
constexpr CountTerm kSingCheckM[] = {{1, 0, 0, 0, 0}};
constexpr CountTerm kLinsysF[] = {{1, 2, 0, 1, 0}, {1, 3, 0, 0, 0}, {2, 2, 0, 0, 0}};
constexpr CountTerm kLinsysM[] = {{1, 1, 0, 1, 0}, {1, 2, 0, 0, 0}, {1, 1, 0, 0, 0}};
constexpr CountTerm kLamCheckF[] = {{1, 1, 0, 0, 0}};
constexpr CountTerm kLamCheckM[] = {{1, 1, 0, 0, 0}};
constexpr CountTerm kMuCompF[] = {{2, 1, 0, 1, 0}, {2, 0, 1, 1, 0}, {1, 0, 1, 0, 0}};
constexpr CountTerm kMuCompM[] = {{1, 0, 0, 1, 1}, {1, 0, 0, 0, 1}};
constexpr CountTerm kMuCheckF[] = {{1, 0, 1, 0, 0}};
constexpr CountTerm kMuCheckM[] = {{1, 0, 1, 0, 0}};
constexpr CountTerm kAddF[] = {{2, 0, 1, 0, 0}};
constexpr CountTerm kAddM[] = {{1, 0, 1, 0, 0}, {1, 0, 0, 0, 0}};
constexpr CountTerm kRemoveF[] = {{5, 1, 0, 0, 0}};
constexpr CountTerm kRemoveM[] = {{3, 1, 0, 0, 0}};
constexpr CountTerm kSingDirF[] = {{1, 2, 0, 1, 0}, {1, 3, 0, 0, 0}, {1, 2, 0, 0, 0}, {2, 1, 0, 0, 0}};
constexpr CountTerm kSingDirM[] = {{1, 1, 0, 1, 0}, {1, 2, 0, 0, 0}, {1, 1, 0, 0, 0}};
constexpr CountTerm kPCheckF[] = {{1, 1, 0, 0, 0}};
constexpr CountTerm kPCheckM[] = {{1, 1, 0, 0, 0}};
constexpr CountTerm kSingRemoveF[] = {{4, 1, 0, 0, 0}};
constexpr CountTerm kSingRemoveM[] = {{2, 1, 0, 0, 0}};
constexpr CountTerm kTermOptF[] = {{2, 0, 0, 1, 1}, {1, 0, 0, 2, 0}};
constexpr CountTerm kTermOptM[] = {{1, 0, 0, 1, 1}, {1, 0, 0, 1, 0}};
constexpr CountTerm kTermInfF[] = {{1, 0, 0, 0, 0}};
constexpr CountTerm kTermInfM[] = {{1, 0, 0, 0, 0}};

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kBig = 1e300;

std::uint64_t ipow(std::uint64_t base, int e) {
    std::uint64_t r = 1;
    for (int i = 0; i < e; ++i) r *= base;
    return r;
}

inline double sel(double c, double a, double b) { return c * a + (1.0 - c) * b; }

}  // namespace

std::string_view block_name(Block b) { return kBlockNames[static_cast<std::size_t>(b)]; }

std::optional<Block> block_from_name(std::string_view name) {
    for (int i = 0; i < kBlockCount; ++i)
        if (kBlockNames[i] == name) return static_cast<Block>(i);
    return std::nullopt;
}

std::string_view status_name(SolveStatus s) {
    switch (s) {
        case SolveStatus::optimal: return "optimal";
        case SolveStatus::infeasible: return "infeasible";
        case SolveStatus::iter_cap: return "iter_cap";
    }
    return "unknown";
}

std::span<const CountTerm> block_flop_terms(Block b) {
    switch (b) {
        case Block::SING_CHECK: return kSingCheckF;
        case Block::LINSYS: return kLinsysF;
        case Block::LAM_CHECK: return kLamCheckF;
        case Block::MU_COMP: return kMuCompF;
        case Block::MU_CHECK: return kMuCheckF;
        case Block::ADD: return kAddF;
        case Block::REMOVE_RATIO: return kRemoveF;
        case Block::SING_DIR: return kSingDirF;
        case Block::P_CHECK: return kPCheckF;
        case Block::SING_REMOVE: return kSingRemoveF;
        case Block::TERMINATE_OPT: return kTermOptF;
        case Block::TERMINATE_INF: return kTermInfF;
    }
    return {};
}

std::span<const CountTerm> block_mem_terms(Block b) {
    switch (b) {
        case Block::SING_CHECK: return kSingCheckM;
        case Block::LINSYS: return kLinsysM;
        case Block::LAM_CHECK: return kLamCheckM;
        case Block::MU_COMP: return kMuCompM;
        case Block::MU_CHECK: return kMuCheckM;
        case Block::ADD: return kAddM;
        case Block::REMOVE_RATIO: return kRemoveM;
        case Block::SING_DIR: return kSingDirM;
        case Block::P_CHECK: return kPCheckM;
        case Block::SING_REMOVE: return kSingRemoveM;
        case Block::TERMINATE_OPT: return kTermOptM;
        case Block::TERMINATE_INF: return kTermInfM;
    }
    return {};
}

std::uint64_t eval_count(std::span<const CountTerm> terms, int s, int n, int m) {
    const std::uint64_t us = static_cast<std::uint64_t>(s), ur = static_cast<std::uint64_t>(m - s),
                        un = static_cast<std::uint64_t>(n), um = static_cast<std::uint64_t>(m);
    std::uint64_t total = 0;
    for (const auto &t : terms)
        total += t.coeff * ipow(us, t.s_exp) * ipow(ur, t.r_exp) * ipow(un, t.n_exp) * ipow(um, t.m_exp);
    return total;
}

void ExecutionTrace::emit(int k, Block b, int size, int n, int m) {
    this->n = n;
    this->m = m;
    events.push_back({k, b, size, eval_count(block_flop_terms(b), size, n, m), eval_count(block_mem_terms(b), size, n, m)});
}

void SolverConfig::validate(int m) const {
    if (k_max < 1) throw InvalidInput("SolverConfig: k_max must be at least 1");
    W0.validate(m);
    if (lambda0.size() != 0) {
        if (lambda0.size() != m) throw InvalidInput("SolverConfig: lambda0 must have m entries");
        for (int i = 0; i < m; ++i) {
            if (!std::isfinite(lambda0(i)) || lambda0(i) < 0.0)
                throw InvalidInput("SolverConfig: lambda0 must be finite and nonnegative");
            if (lambda0(i) != 0.0 && !W0.contains(i))
                throw InvalidInput("SolverConfig: lambda0 is nonzero outside W0");
        }
    }
}

// ---------------------------------------------------------------------------
// Selection kernels
// ---------------------------------------------------------------------------

ArgMin argmin_order_independent(std::span<const double> v, KernelTrace *trace) {
    if (v.empty()) throw InvalidInput("argmin: empty vector");
    double best = v[0];
    double idx = 0.0;
    KernelTrace t;
    t.loads = 1;
    t.stores = 2;
    for (std::size_t j = 1; j < v.size(); ++j) {
        const double x = v[j];
        const double c = static_cast<double>(x < best);
        best = sel(c, x, best);
        idx = sel(c, static_cast<double>(j), idx);
        t.loads += 1;
        t.compares += 1;
        t.arith += 8;
        t.stores += 2;
    }
    if (trace) *trace = t;
    return {best, static_cast<int>(idx)};
}

ArgMin argmin_order_dependent(std::span<const double> v, KernelTrace *trace) {
    if (v.empty()) throw InvalidInput("argmin: empty vector");
    double best = kInf;
    int idx = -1;
    KernelTrace t;
    t.stores = 2;
    for (std::size_t j = 0; j < v.size(); ++j) {
        t.loads += 1;
        t.compares += 1;
        if (v[j] < best) {
            best = v[j];
            idx = static_cast<int>(j);
            t.stores += 2;
        }
    }
    if (trace) *trace = t;
    return {best, idx};
}

RatioStep ratio_test_remove(std::span<const double> lambda, std::span<const double> lambda_star, RemoveRule rule) {
    if (lambda.size() != lambda_star.size() || lambda.empty())
        throw InvalidInput("ratio_test_remove: size mismatch or empty input");
    const std::size_t s = lambda.size();
    std::vector<double> key(s);
    std::vector<double> alpha(s);
    bool any = false;
    for (std::size_t j = 0; j < s; ++j) {
        if (lambda[j] < 0.0) throw InvalidInput("ratio_test_remove: negative dual iterate");
        const double c = static_cast<double>(lambda_star[j] < 0.0);
        any = any || c != 0.0;
        const double den = sel(c, lambda[j] - lambda_star[j], 1.0);
        alpha[j] = sel(c, lambda[j] / den, kBig);
        if (rule == RemoveRule::classic_blocking) {
            key[j] = alpha[j];
        } else {
            const double lit_den = sel(c, lambda_star[j] - lambda[j], 1.0);
            key[j] = sel(c, lambda_star[j] / lit_den, kBig);
        }
    }
    if (!any) throw InvalidInput("ratio_test_remove: no component of lambda_star is negative");
    const ArgMin am = argmin_order_independent(key);
    return {am.index, alpha[am.index]};
}

// ---------------------------------------------------------------------------
// Solver
// ---------------------------------------------------------------------------

SolveResult solve(const DualData &dd, const Eigen::Ref<const Eigen::VectorXd> &theta, const SolverConfig &cfg) {
    if (theta.size() != dd.n_theta) throw InvalidInput("solve: theta has the wrong dimension");
    if (!theta.allFinite()) throw InvalidInput("solve: non-finite theta");
    cfg.validate(dd.m);

    const int n = dd.n, m = dd.m;
    const Eigen::VectorXd d = dd.d(theta);
    SolveResult res;
    res.W = cfg.W0;
    res.lambda = cfg.lambda0.size() == m ? cfg.lambda0 : Eigen::VectorXd::Zero(m);
    res.min_dual_iterate = m > 0 ? res.lambda.minCoeff() : 0.0;
    WorkingSet &W = res.W;
    Eigen::VectorXd &lambda = res.lambda;
    ExecutionTrace &tr = res.trace;
    tr.n = n;
    tr.m = m;

    for (int k = 0; k < cfg.k_max; ++k) {
        res.sequence.push_back(W);
        res.iterations = k + 1;
        if (m > 0) res.min_dual_iterate = std::min(res.min_dual_iterate, lambda.minCoeff());
        const int s = W.size();

        tr.emit(k, Block::SING_CHECK, s, n, m);
        const GramFactor g = gram(dd, W, cfg.dual);

        if (!g.singular) {
            tr.emit(k, Block::LINSYS, s, n, m);
            const AffineMap lam_map = affine_lambda_map(dd, W, cfg.dual);
            const Eigen::VectorXd lam_star = lam_map.eval(theta);

            tr.emit(k, Block::LAM_CHECK, s, n, m);
            const bool lam_ok = s == 0 || argmin_order_independent({lam_star.data(), static_cast<std::size_t>(s)}).value >= 0.0;

            if (lam_ok) {
                for (int p = 0; p < s; ++p) lambda(W[p]) = lam_star(p);
                tr.emit(k, Block::MU_COMP, s, n, m);
                const AffineMap mu_map = affine_mu_map(dd, W, lam_map);
                const Eigen::VectorXd mu = mu_map.eval(theta);
                const std::vector<int> comp = W.complement(m);
                const std::size_t r = comp.size();

                tr.emit(k, Block::MU_CHECK, s, n, m);
                ArgMin mu_min{0.0, -1};
                if (r > 0) mu_min = argmin_order_independent({mu.data(), r});
                if (r == 0 || mu_min.value >= 0.0) {
                    tr.emit(k, Block::TERMINATE_OPT, s, n, m);
                    res.status = SolveStatus::optimal;
                    res.x = recover_primal(dd, lambda, theta);
                    return res;
                }

                tr.emit(k, Block::ADD, s, n, m);
                int add_pos = mu_min.index;
                if (cfg.add_rule == AddRule::bland) {
                    std::vector<double> key(r);
                    for (std::size_t j = 0; j < r; ++j) {
                        const double c = static_cast<double>(mu(j) < 0.0);
                        key[j] = sel(c, static_cast<double>(comp[j]), kBig);
                    }
                    add_pos = argmin_order_independent(key).index;
                }
                const int add = comp[add_pos];
                W.push(add);
                lambda(add) = 0.0;
            } else {
                tr.emit(k, Block::REMOVE_RATIO, s, n, m);
                Eigen::VectorXd lam_w(s);
                for (int p = 0; p < s; ++p) lam_w(p) = lambda(W[p]);
                const RatioStep step = ratio_test_remove({lam_w.data(), static_cast<std::size_t>(s)},
                                                         {lam_star.data(), static_cast<std::size_t>(s)},
                                                         cfg.remove_rule);
                for (int p = 0; p < s; ++p) {
                    double v = lam_w(p) + step.alpha * (lam_star(p) - lam_w(p));
                    if (cfg.remove_rule == RemoveRule::classic_blocking) v = std::fmax(v, 0.0);
                    lambda(W[p]) = v;
                }
                lambda(W[step.position]) = 0.0;
                W.erase_at(step.position);
            }
        } else {
            tr.emit(k, Block::SING_DIR, s, n, m);
            Eigen::VectorXd p = null_direction(dd, W, cfg.dual);
            double dp = 0.0;
            for (int j = 0; j < s; ++j) dp += d(W[j]) * p(j);
            p *= sel(static_cast<double>(dp > 0.0), -1.0, 1.0);

            tr.emit(k, Block::P_CHECK, s, n, m);
            bool nonneg = true;
            for (int j = 0; j < s; ++j) nonneg = nonneg && !(p(j) < -cfg.p_tol);
            if (nonneg) {
                tr.emit(k, Block::TERMINATE_INF, s, n, m);
                res.status = SolveStatus::infeasible;
                return res;
            }

            tr.emit(k, Block::SING_REMOVE, s, n, m);
            std::vector<double> key(s);
            for (int j = 0; j < s; ++j) {
                const double c = static_cast<double>(p(j) < -cfg.p_tol);
                const double den = sel(c, -p(j), 1.0);
                key[j] = sel(c, lambda(W[j]) / den, kBig);
            }
            const ArgMin am = argmin_order_independent(key);
            const double alpha = am.value;
            for (int j = 0; j < s; ++j) lambda(W[j]) = std::fmax(lambda(W[j]) + alpha * p(j), 0.0);
            lambda(W[am.index]) = 0.0;
            W.erase_at(am.index);
        }
    }
    res.sequence.push_back(W);
    res.status = SolveStatus::iter_cap;
    return res;
}

ExecutionTrace trace_from_sequence(const DualData &dd, const WorkingSetSequence &seq, SolveStatus status,
                                   const SolverConfig &cfg) {
    ExecutionTrace tr;
    const int n = dd.n, m = dd.m;
    tr.n = n;
    tr.m = m;
    const std::size_t iters = status == SolveStatus::iter_cap ? (seq.empty() ? 0 : seq.size() - 1) : seq.size();
    for (std::size_t k = 0; k < iters; ++k) {
        const WorkingSet &W = seq[k];
        const int s = W.size();
        const int kk = static_cast<int>(k);
        const bool last = k + 1 == iters && status != SolveStatus::iter_cap;
        tr.emit(kk, Block::SING_CHECK, s, n, m);
        const bool singular = gram(dd, W, cfg.dual).singular;
        if (!singular) {
            tr.emit(kk, Block::LINSYS, s, n, m);
            tr.emit(kk, Block::LAM_CHECK, s, n, m);
            const bool grows = !last && seq[k + 1].size() > s;
            if (last || grows) {
                tr.emit(kk, Block::MU_COMP, s, n, m);
                tr.emit(kk, Block::MU_CHECK, s, n, m);
                tr.emit(kk, last ? Block::TERMINATE_OPT : Block::ADD, s, n, m);
            } else {
                tr.emit(kk, Block::REMOVE_RATIO, s, n, m);
            }
        } else {
            tr.emit(kk, Block::SING_DIR, s, n, m);
            tr.emit(kk, Block::P_CHECK, s, n, m);
            tr.emit(kk, last ? Block::TERMINATE_INF : Block::SING_REMOVE, s, n, m);
        }
    }
    return tr;
}

std::uint64_t trace_hash(const ExecutionTrace &t) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](std::uint64_t v) {
        for (int b = 0; b < 8; ++b) {
            h ^= (v >> (8 * b)) & 0xFFu;
            h *= 0x100000001b3ULL;
        }
    };
    for (const auto &e : t.events) {
        mix(static_cast<std::uint64_t>(e.k));
        mix(static_cast<std::uint64_t>(e.block));
        mix(static_cast<std::uint64_t>(e.size));
        mix(e.flops);
        mix(e.mem);
    }
    return h;
}

}  // namespace mpcert
