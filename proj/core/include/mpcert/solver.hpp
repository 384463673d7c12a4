#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "mpcert/mpqp.hpp"

namespace mpcert {

enum class AddRule { dantzig, bland };
enum class RemoveRule { classic_blocking, paper_literal };

struct SolverConfig {
    AddRule add_rule = AddRule::dantzig;
    RemoveRule remove_rule = RemoveRule::classic_blocking;
    int k_max = 100;
    WorkingSet W0;
    /// Dense initial dual iterate; empty means zero.
    Eigen::VectorXd lambda0;
    DualOptions dual{};
    /// Components of a null direction with |p_j| <= p_tol count as zero.
    double p_tol = 1e-12;

    void validate(int m) const;
};

/// Flow-chart blocks of one solver iteration. Ids are part of the trace hash
/// encoding and must not be renumbered.
enum class Block : std::uint8_t {
    SING_CHECK = 0,
    LINSYS = 1,
    LAM_CHECK = 2,
    MU_COMP = 3,
    MU_CHECK = 4,
    ADD = 5,
    REMOVE_RATIO = 6,
    SING_DIR = 7,
    P_CHECK = 8,
    SING_REMOVE = 9,
    TERMINATE_OPT = 10,
    TERMINATE_INF = 11,
};
inline constexpr int kBlockCount = 12;

std::string_view block_name(Block b);
std::optional<Block> block_from_name(std::string_view name);

/// One monomial coeff · s^s_exp · r^r_exp · n^n_exp · m^m_exp of a per-block
/// count, where s = |W| at the event, r = m − s, n and m the problem sizes.
struct CountTerm {
    std::uint64_t coeff = 0;
    int s_exp = 0;
    int r_exp = 0;
    int n_exp = 0;
    int m_exp = 0;
};

/// Documented closed-form operation counts. The flop and memory-access
/// tables are fixed per release:
///
/// | block         | flops                    | memory accesses     |
/// |---------------|--------------------------|---------------------|
/// | SING_CHECK    | 0                        | 1                   |
/// | LINSYS        | n·s² + s³ + 2s²          | n·s + s² + s        |
/// | LAM_CHECK     | s                        | s                   |
/// | MU_COMP       | 2n·s + 2n·r + r          | n·m + m             |
/// | MU_CHECK      | r                        | r                   |
/// | ADD           | 2r                       | r + 1               |
/// | REMOVE_RATIO  | 5s                       | 3s                  |
/// | SING_DIR      | n·s² + s³ + s² + 2s      | n·s + s² + s        |
/// | P_CHECK       | s                        | s                   |
/// | SING_REMOVE   | 4s                       | 2s                  |
/// | TERMINATE_OPT | 2n·m + n²                | n·m + n             |
/// | TERMINATE_INF | 1                        | 1                   |
std::span<const CountTerm> block_flop_terms(Block b);
std::span<const CountTerm> block_mem_terms(Block b);
std::uint64_t eval_count(std::span<const CountTerm> terms, int s, int n, int m);

struct TraceEvent {
    int k = 0;
    Block block = Block::SING_CHECK;
    int size = 0;
    std::uint64_t flops = 0;
    std::uint64_t mem = 0;

    friend bool operator==(const TraceEvent &, const TraceEvent &) = default;
};

struct ExecutionTrace {
    std::vector<TraceEvent> events;
    /// Problem sizes the events were counted for; not part of the hash.
    int n = 0;
    int m = 0;

    void emit(int k, Block b, int size, int n, int m);
    friend bool operator==(const ExecutionTrace &, const ExecutionTrace &) = default;
};

using WorkingSetSequence = std::vector<WorkingSet>;

enum class SolveStatus { optimal, infeasible, iter_cap };
std::string_view status_name(SolveStatus s);

struct SolveResult {
    SolveStatus status = SolveStatus::iter_cap;
    Eigen::VectorXd lambda;  // dense m-vector
    WorkingSet W;
    /// Working set at the start of every executed iteration; on iter_cap the
    /// working set left by the last iteration is appended.
    WorkingSetSequence sequence;
    Eigen::VectorXd x;  // set when optimal
    ExecutionTrace trace;
    int iterations = 0;
    /// Smallest dual-iterate component seen at the top of any iteration.
    double min_dual_iterate = 0.0;
};

/// Dual active-set method with branch-free selection kernels.
SolveResult solve(const DualData &dd, const Eigen::Ref<const Eigen::VectorXd> &theta, const SolverConfig &cfg);

struct ArgMin {
    double value = 0.0;
    int index = -1;
    friend bool operator==(const ArgMin &, const ArgMin &) = default;
};

/// Operation tally of a selection kernel run.
struct KernelTrace {
    std::uint64_t loads = 0;
    std::uint64_t compares = 0;
    std::uint64_t arith = 0;
    std::uint64_t stores = 0;
    friend bool operator==(const KernelTrace &, const KernelTrace &) = default;
};

/// First minimum via the {0,1}-multiply select; the executed operations do
/// not depend on the values of v.
ArgMin argmin_order_independent(std::span<const double> v, KernelTrace *trace = nullptr);
/// Same contract with a data-dependent branch; kept as a reference kernel.
ArgMin argmin_order_dependent(std::span<const double> v, KernelTrace *trace = nullptr);

struct RatioStep {
    int position = -1;
    double alpha = 0.0;
};

/// Blocking constraint among positions with lambda_star < 0.
RatioStep ratio_test_remove(std::span<const double> lambda, std::span<const double> lambda_star, RemoveRule rule);

struct KktResult {
    bool feasible = false;
    Eigen::VectorXd x;
    Eigen::VectorXd lambda;
    WorkingSet active;
};

/// Brute-force reference: enumerates all 2^m candidate active sets (m <= 20).
KktResult kkt_oracle(const MpQP &P, const Eigen::Ref<const Eigen::VectorXd> &theta);

/// Trace implied by a working-set sequence and its terminal status, built
/// without any numerical work.
ExecutionTrace trace_from_sequence(const DualData &dd, const WorkingSetSequence &seq, SolveStatus status,
                                   const SolverConfig &cfg = {});

/// FNV-1a-64 over (k, block id, size, flops, mem) of every event, each field
/// encoded as an unsigned 64-bit little-endian integer.
std::uint64_t trace_hash(const ExecutionTrace &t);

}  // namespace mpcert
