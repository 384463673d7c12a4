#include <algorithm>

#include "mpcert/cert.hpp"

namespace mpcert {

std::vector<Eigen::VectorXd> uniform_samples(const Polyhedron &P, int n, std::uint64_t seed) {
    if (n < 0) throw InvalidInput("uniform_samples: negative sample count");
    Eigen::VectorXd lo, hi;
    if (!bounding_box(P, lo, hi)) throw InvalidInput("uniform_samples: polyhedron is empty or unbounded");
    Xoshiro256 rng(seed);
    std::vector<Eigen::VectorXd> out;
    out.reserve(n);
    Eigen::VectorXd x(P.dim());
    const long long max_draws = 1000LL * std::max(n, 1) + 100000;
    for (long long draws = 0; static_cast<int>(out.size()) < n; ++draws) {
        if (draws > max_draws) throw std::runtime_error("uniform_samples: rejection rate too high");
        for (int j = 0; j < P.dim(); ++j) x(j) = rng.uniform(lo(j), hi(j));
        if (P.satisfied(x, 0.0)) out.push_back(x);
    }
    return out;
}

namespace {
bool is_prefix(const WorkingSetSequence &a, const WorkingSetSequence &b) {
    return a.size() <= b.size() && std::equal(a.begin(), a.end(), b.begin());
}
}  // namespace

ValidationReport validate_cover(const CertOutput &C, const DualData &dd, const SolverConfig &cfg, int n_samples,
                                double eps, std::uint64_t seed) {
    if (n_samples < 1) throw InvalidInput("validate_cover: n_samples must be at least 1");
    if (!(eps > 0.0)) throw InvalidInput("validate_cover: eps must be positive");
    ValidationReport rep;

    std::vector<std::uint64_t> arch_hash(C.regions.size(), 0);
    for (std::size_t i = 0; i < C.regions.size(); ++i) {
        const RegionRecord &r = C.regions[i];
        if (r.status == RegionStatus::unresolved) continue;
        if (r.archetype && min_slack(r.region, *r.archetype) > eps) {
            const SolveResult res = solve(dd, *r.archetype, cfg);
            if (res.sequence != r.sequence) ++rep.archetype_mismatches;
            arch_hash[i] = trace_hash(res.trace);
        } else {
            if (r.archetype) ++rep.boundary_archetypes;
            const SolveStatus st = r.status == RegionStatus::optimal      ? SolveStatus::optimal
                                   : r.status == RegionStatus::infeasible ? SolveStatus::infeasible
                                                                          : SolveStatus::iter_cap;
            arch_hash[i] = trace_hash(trace_from_sequence(dd, r.sequence, st, cfg));
        }
    }

    auto record = [&](Counterexample ce) { rep.counterexamples.push_back(std::move(ce)); };

    const auto samples = uniform_samples(C.theta0, n_samples, seed);
    rep.samples = n_samples;
    std::vector<int> inside;
    for (const auto &theta : samples) {
        inside.clear();
        bool boundary = false;
        for (std::size_t i = 0; i < C.regions.size() && !boundary; ++i) {
            const Containment c = contains(C.regions[i].region, theta, eps);
            if (c == Containment::boundary) boundary = true;
            if (c == Containment::inside) inside.push_back(static_cast<int>(i));
        }
        if (boundary) {
            ++rep.boundary_skipped;
            continue;
        }
        ++rep.checked;
        if (inside.size() != 1) {
            Counterexample ce{theta, inside.empty() ? "uncovered" : "overlap", inside.empty() ? -1 : inside[0], {}, {}};
            record(std::move(ce));
            continue;
        }
        const RegionRecord &r = C.regions[inside[0]];
        const SolveResult res = solve(dd, theta, cfg);
        if (r.status == RegionStatus::unresolved) {
            ++rep.unresolved_hits;
            if (!is_prefix(r.sequence, res.sequence)) record({theta, "sequence", r.id, r.sequence, res.sequence});
            continue;
        }
        if (res.sequence != r.sequence) {
            record({theta, "sequence", r.id, r.sequence, res.sequence});
            continue;
        }
        if (trace_hash(res.trace) != arch_hash[inside[0]]) {
            record({theta, "trace", r.id, r.sequence, res.sequence});
            continue;
        }
        ++rep.matched;
    }
    return rep;
}

}  // namespace mpcert
