#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "mpcert/geometry.hpp"
#include "mpcert/mpqp.hpp"
#include "mpcert/solver.hpp"

namespace mpcert {

// Points closer than this to a region boundary are treated as boundary points.
inline constexpr double kBoundaryBand = 1e-6;

struct CertOptions {
    /// Highest total degree allowed in a region constraint. A removal that
    /// would exceed it freezes the node as unresolved.
    int degree_cap = 4;
    /// Hit-and-run budget when searching a point of a region with polynomial
    /// constraints.
    int interior_budget = 10000;
    std::uint64_t seed = 0;
    /// Regions whose inscribed radius is at most this are pruned.
    double thin_tol = 1e-9;
    /// Worker threads; 0 picks the hardware concurrency.
    int threads = 1;
    /// Hard limit on explored nodes.
    std::size_t max_nodes = 20'000'000;
    GeometryOptions geometry{};
};

enum class RegionStatus { optimal, infeasible, iter_cap, unresolved };
std::string_view region_status_name(RegionStatus s);
std::optional<RegionStatus> region_status_from_name(std::string_view name);

struct RegionRecord {
    int id = -1;
    /// Child labels from the root; regions are sorted by it.
    std::vector<int> branch_path;
    RegionDescription region;
    WorkingSetSequence sequence;
    int iterations = 0;
    RegionStatus status = RegionStatus::unresolved;
    std::optional<Eigen::VectorXd> archetype;
};

struct CertStats {
    std::uint64_t nodes = 0;
    int max_depth = 0;
    std::uint64_t empty_prunes = 0;
    std::uint64_t thin_prunes = 0;
    std::uint64_t unresolved = 0;
    /// Pairwise ratio comparisons dropped because an LP ruled the pair out.
    std::uint64_t dropped_comparisons = 0;
};

struct CertOutput {
    std::vector<RegionRecord> regions;
    CertStats stats;
    std::uint64_t problem_digest = 0;
    std::uint64_t seed = 0;
    int degree_cap = 4;
    int k_max = 0;
    AddRule add_rule = AddRule::dantzig;
    RemoveRule remove_rule = RemoveRule::classic_blocking;
    Polyhedron theta0;
};

/// FNV-1a-64 over the dual data and Θ0 (dimensions, then every double's bit
/// pattern in row-major order).
std::uint64_t problem_digest(const DualData &dd, const Polyhedron &theta0);

/// Enumerates the regions of Θ0 on which the solver follows one fixed
/// working-set sequence.
///
/// Every node mirrors one solver iteration. Sign tests of λ*(θ) and μ(θ) are
/// closed affine halfspaces. Removal steps make the dual iterate rational in
/// θ; it is carried as a numerator vector whose common positive denominator
/// cancels from every ratio comparison, so consecutive removals raise the
/// constraint degree by one each.
CertOutput certify(const DualData &dd, const Polyhedron &theta0, const SolverConfig &cfg,
                   const CertOptions &opt = {});

struct Counterexample {
    Eigen::VectorXd theta;
    /// "uncovered", "overlap", "sequence" or "trace".
    std::string kind;
    int region_id = -1;
    WorkingSetSequence expected;
    WorkingSetSequence actual;
};

struct ValidationReport {
    int samples = 0;
    int boundary_skipped = 0;
    int checked = 0;
    int matched = 0;
    /// Samples inside an unresolved region; their sequence is only checked
    /// to extend the region's partial one.
    int unresolved_hits = 0;
    /// Archetypes whose own solve disagrees with their region's sequence.
    int archetype_mismatches = 0;
    int boundary_archetypes = 0;
    std::vector<Counterexample> counterexamples;

    double match_rate() const { return checked == 0 ? 1.0 : static_cast<double>(matched) / checked; }
    bool ok() const { return counterexamples.empty() && archetype_mismatches == 0; }
};

/// Samples Θ0 uniformly (bounding box + rejection) and checks that each
/// sample farther than eps from every region boundary lies inside exactly
/// one region, reproduces its sequence, and reproduces the trace hash of the
/// region's archetype.
ValidationReport validate_cover(const CertOutput &C, const DualData &dd, const SolverConfig &cfg, int n_samples,
                                double eps, std::uint64_t seed);

/// Uniform samples of a bounded polyhedron by rejection from its bounding box.
std::vector<Eigen::VectorXd> uniform_samples(const Polyhedron &P, int n, std::uint64_t seed);

}  // namespace mpcert
