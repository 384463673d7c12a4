#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mpcert/cert.hpp"
#include "mpcert/solver.hpp"

namespace mpcert {

/// Deterministic cycle model: every block's cost is a polynomial in
/// (s, r, n, m) with nonnegative integer coefficients, plus a per-call
/// overhead.
struct CostModel {
    std::string name;
    std::uint64_t overhead = 0;
    /// Empty optional: the block has no entry and traces using it are
    /// rejected.
    std::array<std::optional<std::vector<CountTerm>>, kBlockCount> blocks;

    /// Weight 1 per event, no overhead.
    static CostModel unit();
    /// flops + memory accesses of the solver's count table.
    static CostModel flop();
    /// "unit", "flop", or a path to a JSON profile:
    /// {"name": ..., "overhead": c,
    ///  "blocks": {"LINSYS": [{"coeff": 3, "s": 2, "r": 0, "n": 1, "m": 0}, ...], ...}}
    static CostModel resolve(const std::string &name_or_path);

    std::uint64_t event_cost(const TraceEvent &e, int n, int m) const;
    /// Same model with every weight and the overhead multiplied by k.
    CostModel scaled(std::uint64_t k) const;
};

/// Sum of event costs plus overhead; throws std::overflow_error on 64-bit
/// overflow and InvalidInput on a block without an entry.
std::uint64_t trace_cost(const ExecutionTrace &t, const CostModel &cm);

/// Ids of regions kept after removing every region whose sequence is a
/// strict prefix of another region's. Unresolved regions are always kept
/// and never used as witnesses.
std::vector<int> prune_prefixes(const CertOutput &C);

struct Archetype {
    int region_id = -1;
    Eigen::VectorXd theta;
};

struct ArchetypeSet {
    std::vector<Archetype> archetypes;
    std::vector<int> unresolved;
};

/// One interior point per listed region: the stored archetype when present,
/// else interior_point on the region.
ArchetypeSet extract_archetypes(const CertOutput &C, const std::vector<int> &region_ids, int budget,
                                std::uint64_t seed);

struct BaselineResult {
    std::uint64_t max_cost = 0;
    std::map<std::uint64_t, std::uint64_t> histogram;
    std::vector<Eigen::VectorXd> samples;
    std::vector<std::uint64_t> costs;
};

BaselineResult monte_carlo_baseline(const DualData &dd, const Polyhedron &theta0, const SolverConfig &cfg,
                                    const CostModel &cm, int n, std::uint64_t seed, int threads = 1);

struct RegionCost {
    int region_id = -1;
    std::uint64_t cost = 0;
    std::uint64_t trace_hash = 0;
    bool pruned = false;
    /// Cost from an archetype solve (true) or from the region's sequence
    /// alone (false).
    bool measured = false;
};

struct WcetOptions {
    bool prune = true;
    int archetype_budget = 10000;
    std::uint64_t seed = 0;
    int threads = 1;
    CertOptions cert{};
};

struct WcetReport {
    std::string profile;
    std::uint64_t worst_cost = 0;
    int witness_region = -1;
    std::vector<RegionCost> regions;
    std::vector<Archetype> archetypes;
    int nominal_count = 0;
    int pruned_count = 0;
    int surviving_count = 0;
    /// Archetype solves whose sequence differs from their region's.
    int archetype_mismatches = 0;
    int boundary_archetypes = 0;  // archetypes in the boundary band whose solve left the region
    /// Set when unresolved regions exist: worst_cost is then only a lower
    /// bound, and the sampled costs of those regions are listed.
    bool lower_bound = false;
    std::vector<std::pair<int, std::uint64_t>> unresolved_costs;
    std::vector<int> unresolved_no_point;
    std::string advisory;
    std::optional<BaselineResult> baseline;
    std::uint64_t seed = 0;
};

/// Costs every region of an existing certification and takes the maximum
/// over the surviving ones.
WcetReport wcet_from_cert(const DualData &dd, const CertOutput &C, const SolverConfig &cfg, const CostModel &cm,
                          const WcetOptions &opt = {});

/// to_dual, certify, then wcet_from_cert.
WcetReport wcet(const MpQP &P, const SolverConfig &cfg, const CostModel &cm, const WcetOptions &opt = {},
                CertOutput *cert_out = nullptr);

struct LookupResult {
    int region_id = -1;
    std::uint64_t cost = 0;
    bool boundary = false;
    /// θ lies only in unresolved regions.
    bool advisory = false;
};

/// Region containing θ (inside, else boundary with the lowest id) and its
/// certified cost. cost_map is indexed by region id.
LookupResult lookup_cost(const CertOutput &C, const std::vector<std::uint64_t> &cost_map,
                         const Eigen::Ref<const Eigen::VectorXd> &theta, double tol = 1e-9);

/// Cost map indexed by region id, taken from a report.
std::vector<std::uint64_t> cost_map(const WcetReport &R, std::size_t region_count);

struct WallclockResult {
    std::uint64_t nanoseconds = 0;
    /// Always false: host timing is not a certified quantity.
    bool certified = false;
};

WallclockResult measure_wallclock(const DualData &dd, const Eigen::Ref<const Eigen::VectorXd> &theta,
                                  const SolverConfig &cfg, int repeats);

}  // namespace mpcert
