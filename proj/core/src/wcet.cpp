#include "mpcert/wcet.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <map>
#include <mutex>
#include <thread>

namespace mpcert {

namespace {

SolveStatus solve_status(RegionStatus s) {
    switch (s) {
        case RegionStatus::optimal: return SolveStatus::optimal;
        case RegionStatus::infeasible: return SolveStatus::infeasible;
        default: return SolveStatus::iter_cap;
    }
}

template <class F>
void parallel_for(std::size_t count, int threads, F &&body) {
    if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    const int workers = static_cast<int>(std::min<std::size_t>(threads, count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr err;
    std::mutex mu;
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard lock(mu);
                    if (!err) err = std::current_exception();
                }
            }
        });
    for (auto &th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

struct TrieNode {
    std::map<WorkingSet, int> next;
    int first_region = -1;
};

}  // namespace

std::vector<int> prune_prefixes(const CertOutput &C) {
    std::vector<TrieNode> trie(1);
    std::vector<int> end(C.regions.size(), -1);
    for (std::size_t i = 0; i < C.regions.size(); ++i) {
        const RegionRecord &r = C.regions[i];
        if (r.status == RegionStatus::unresolved) continue;
        int at = 0;
        for (const WorkingSet &W : r.sequence) {
            auto it = trie[at].next.find(W);
            if (it == trie[at].next.end()) {
                trie.emplace_back();
                it = trie[at].next.emplace(W, static_cast<int>(trie.size()) - 1).first;
            }
            at = it->second;
        }
        end[i] = at;
        if (trie[at].first_region < 0) trie[at].first_region = static_cast<int>(i);
    }
    std::vector<int> keep;
    for (std::size_t i = 0; i < C.regions.size(); ++i) {
        if (C.regions[i].status == RegionStatus::unresolved) {
            keep.push_back(C.regions[i].id);
            continue;
        }
        const TrieNode &t = trie[end[i]];
        if (t.next.empty() && t.first_region == static_cast<int>(i)) keep.push_back(C.regions[i].id);
    }
    return keep;
}

ArchetypeSet extract_archetypes(const CertOutput &C, const std::vector<int> &region_ids, int budget,
                                std::uint64_t seed) {
    ArchetypeSet out;
    for (int id : region_ids) {
        if (id < 0 || id >= static_cast<int>(C.regions.size())) throw InvalidInput("extract_archetypes: bad region id");
        const RegionRecord &r = C.regions[id];
        if (r.archetype) {
            out.archetypes.push_back({id, *r.archetype});
            continue;
        }
        if (auto pt = interior_point(r.region, budget, derive_seed(seed, static_cast<std::uint64_t>(id))))
            out.archetypes.push_back({id, *pt});
        else
            out.unresolved.push_back(id);
    }
    return out;
}

BaselineResult monte_carlo_baseline(const DualData &dd, const Polyhedron &theta0, const SolverConfig &cfg,
                                    const CostModel &cm, int n, std::uint64_t seed, int threads) {
    if (n < 1) throw InvalidInput("monte_carlo_baseline: n must be at least 1");
    BaselineResult res;
    res.samples = uniform_samples(theta0, n, seed);
    res.costs.assign(res.samples.size(), 0);
    parallel_for(res.samples.size(), threads,
                 [&](std::size_t i) { res.costs[i] = trace_cost(solve(dd, res.samples[i], cfg).trace, cm); });
    for (std::uint64_t c : res.costs) {
        res.max_cost = std::max(res.max_cost, c);
        ++res.histogram[c];
    }
    return res;
}

WcetReport wcet_from_cert(const DualData &dd, const CertOutput &C, const SolverConfig &cfg, const CostModel &cm,
                          const WcetOptions &opt) {
    WcetReport rep;
    rep.profile = cm.name;
    rep.seed = opt.seed;
    const int count = static_cast<int>(C.regions.size());
    rep.nominal_count = count;

    std::vector<int> survivors;
    if (opt.prune) {
        survivors = prune_prefixes(C);
    } else {
        for (int i = 0; i < count; ++i) survivors.push_back(i);
    }
    std::vector<bool> alive(count, false);
    for (int id : survivors) alive[id] = true;

    const ArchetypeSet arch = extract_archetypes(C, survivors, opt.archetype_budget, opt.seed);
    std::vector<int> arch_index(count, -1);
    for (std::size_t a = 0; a < arch.archetypes.size(); ++a) arch_index[arch.archetypes[a].region_id] = static_cast<int>(a);

    std::vector<RegionCost> costs(count);
    std::vector<int> mismatch(count, 0);
    parallel_for(static_cast<std::size_t>(count), opt.threads, [&](std::size_t i) {
        const RegionRecord &r = C.regions[i];
        RegionCost rc;
        rc.region_id = r.id;
        rc.pruned = !alive[i];
        if (arch_index[i] >= 0) {
            const Eigen::VectorXd &theta = arch.archetypes[arch_index[i]].theta;
            const SolveResult res = solve(dd, theta, cfg);
            rc.cost = trace_cost(res.trace, cm);
            rc.trace_hash = trace_hash(res.trace);
            rc.measured = true;
            if (r.status != RegionStatus::unresolved && res.sequence != r.sequence) {
                if (min_slack(r.region, theta) > kBoundaryBand) {
                    mismatch[i] = 1;
                } else {
                    // A sliver region whose best point lies in the boundary band:
                    // the region's own sequence fixes its cost.
                    const ExecutionTrace t = trace_from_sequence(dd, r.sequence, solve_status(r.status), cfg);
                    rc.cost = trace_cost(t, cm);
                    rc.trace_hash = trace_hash(t);
                    rc.measured = false;
                    mismatch[i] = 2;
                }
            }
        } else if (r.status != RegionStatus::unresolved) {
            const ExecutionTrace t = trace_from_sequence(dd, r.sequence, solve_status(r.status), cfg);
            rc.cost = trace_cost(t, cm);
            rc.trace_hash = trace_hash(t);
        }
        costs[i] = rc;
    });
    rep.regions = std::move(costs);

    for (int i = 0; i < count; ++i) {
        rep.archetype_mismatches += mismatch[i] == 1;
        rep.boundary_archetypes += mismatch[i] == 2;
        const RegionRecord &r = C.regions[i];
        if (r.status == RegionStatus::unresolved) {
            if (arch_index[i] >= 0)
                rep.unresolved_costs.emplace_back(i, rep.regions[i].cost);
            else
                rep.unresolved_no_point.push_back(i);
            continue;
        }
        if (!alive[i]) continue;
        if (rep.witness_region < 0 || rep.regions[i].cost > rep.worst_cost) {
            rep.worst_cost = rep.regions[i].cost;
            rep.witness_region = i;
        }
    }
    for (const auto &a : arch.archetypes)
        if (C.regions[a.region_id].status != RegionStatus::unresolved) rep.archetypes.push_back(a);
    rep.surviving_count = static_cast<int>(survivors.size());
    rep.pruned_count = count - rep.surviving_count;
    rep.lower_bound = !rep.unresolved_costs.empty() || !rep.unresolved_no_point.empty();
    if (rep.lower_bound)
        rep.advisory = "unresolved regions present: worst_cost is a certified lower bound; the sampled costs of the "
                       "unresolved regions are listed as upper-bound candidates";
    return rep;
}

WcetReport wcet(const MpQP &P, const SolverConfig &cfg, const CostModel &cm, const WcetOptions &opt,
                CertOutput *cert_out) {
    const DualData dd = to_dual(P);
    CertOptions co = opt.cert;
    co.seed = opt.seed;
    CertOutput C = certify(dd, P.theta0, cfg, co);
    WcetReport rep = wcet_from_cert(dd, C, cfg, cm, opt);
    if (cert_out) *cert_out = std::move(C);
    return rep;
}

LookupResult lookup_cost(const CertOutput &C, const std::vector<std::uint64_t> &cost_map,
                         const Eigen::Ref<const Eigen::VectorXd> &theta, double tol) {
    if (cost_map.size() != C.regions.size()) throw InvalidInput("lookup_cost: cost map size mismatch");
    if (theta.size() != C.theta0.dim()) throw InvalidInput("lookup_cost: theta has the wrong dimension");
    if (!C.theta0.satisfied(theta, tol)) throw InvalidInput("lookup_cost: theta is outside Theta0");
    int boundary = -1, boundary_unresolved = -1;
    for (const RegionRecord &r : C.regions) {
        const Containment c = contains(r.region, theta, tol);
        const bool unresolved = r.status == RegionStatus::unresolved;
        if (c == Containment::inside) return {r.id, cost_map[r.id], false, unresolved};
        if (c == Containment::boundary) {
            if (!unresolved && boundary < 0) boundary = r.id;
            if (unresolved && boundary_unresolved < 0) boundary_unresolved = r.id;
        }
    }
    if (boundary >= 0) return {boundary, cost_map[boundary], true, false};
    if (boundary_unresolved >= 0) return {boundary_unresolved, cost_map[boundary_unresolved], true, true};
    return {-1, 0, false, true};
}

std::vector<std::uint64_t> cost_map(const WcetReport &R, std::size_t region_count) {
    std::vector<std::uint64_t> out(region_count, 0);
    for (const auto &rc : R.regions)
        if (rc.region_id >= 0 && static_cast<std::size_t>(rc.region_id) < region_count) out[rc.region_id] = rc.cost;
    return out;
}

WallclockResult measure_wallclock(const DualData &dd, const Eigen::Ref<const Eigen::VectorXd> &theta,
                                  const SolverConfig &cfg, int repeats) {
    if (repeats < 1) throw InvalidInput("measure_wallclock: repeats must be at least 1");
    using clock = std::chrono::steady_clock;
    std::uint64_t best = UINT64_MAX;
    for (int i = 0; i < repeats; ++i) {
        const auto t0 = clock::now();
        const SolveResult r = solve(dd, theta, cfg);
        const auto t1 = clock::now();
        if (r.iterations < 0) break;
        best = std::min<std::uint64_t>(best, std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count());
    }
    return {best, false};
}

}  // namespace mpcert
