#include "cli.hpp"

#include <cstdlib>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mpcert/cert.hpp"
#include "mpcert/io.hpp"
#include "mpcert/mpc.hpp"
#include "mpcert/wcet.hpp"

namespace mpcert::cli {

namespace {

std::vector<double> parse_list(const std::string &s) {
    std::vector<double> v;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        std::size_t pos = 0;
        double x = 0.0;
        try {
            x = std::stod(tok, &pos);
        } catch (const std::exception &) {
            throw InvalidInput("not a number: " + tok);
        }
        if (pos != tok.size()) throw InvalidInput("not a number: " + tok);
        v.push_back(x);
    }
    return v;
}

Eigen::VectorXd to_vector(const std::vector<double> &v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

int env_threads() {
    const char *e = std::getenv("MPCERT_THREADS");
    if (!e || !*e) return 0;
    char *end = nullptr;
    const long v = std::strtol(e, &end, 10);
    if (*end != '\0' || v < 0) throw InvalidInput("MPCERT_THREADS must be a nonnegative integer");
    return static_cast<int>(v);
}

std::string ws_string(const WorkingSet &W) {
    std::ostringstream os;
    os << '{';
    for (int p = 0; p < W.size(); ++p) os << (p ? "," : "") << W[p];
    os << '}';
    return os.str();
}

std::string seq_string(const WorkingSetSequence &seq) {
    std::string s = "(";
    for (std::size_t i = 0; i < seq.size(); ++i) s += (i ? ", " : "") + ws_string(seq[i]);
    return s + ")";
}

struct SolverFlags {
    int k_max = 100;
    std::string add_rule = "dantzig";
    std::string remove_rule = "classic_blocking";

    void attach(CLI::App *app) {
        app->add_option("--kmax", k_max, "Iteration cap")->check(CLI::PositiveNumber);
        app->add_option("--add-rule", add_rule, "dantzig or bland")->check(CLI::IsMember({"dantzig", "bland"}));
        app->add_option("--remove-rule", remove_rule, "classic_blocking or paper_literal")
            ->check(CLI::IsMember({"classic_blocking", "paper_literal"}));
    }
    SolverConfig config() const {
        SolverConfig c;
        c.k_max = k_max;
        c.add_rule = add_rule == "bland" ? AddRule::bland : AddRule::dantzig;
        c.remove_rule = remove_rule == "paper_literal" ? RemoveRule::paper_literal : RemoveRule::classic_blocking;
        return c;
    }
};

struct CertFlags {
    int degree_cap = 4;
    int budget = 10000;

    void attach(CLI::App *app) {
        app->add_option("--degree-cap", degree_cap, "Highest polynomial degree in region constraints")
            ->check(CLI::PositiveNumber);
        app->add_option("--budget", budget, "Sampling budget for regions with polynomial constraints")
            ->check(CLI::PositiveNumber);
    }
};

CertOutput load_or_certify(const std::string &regions_path, const DualData &dd, const MpQP &P,
                           const SolverConfig &cfg, const CertOptions &co) {
    if (!regions_path.empty()) {
        CertOutput C = cert_from_json(read_json_file(regions_path));
        if (C.problem_digest != problem_digest(dd, P.theta0))
            throw InvalidInput("regions file " + regions_path + " was computed for a different problem");
        return C;
    }
    return certify(dd, P.theta0, cfg, co);
}

}  // namespace

int dispatch(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
    CLI::App app{"Parametric WCET certification of a dual active-set QP solver"};
    app.require_subcommand(1);

    std::uint64_t seed = 0;
    SolverFlags solver_flags;
    CertFlags cert_flags;
    std::string problem, out_path, regions_path, profile = "unit";

    // mpc
    auto *mpc = app.add_subcommand("mpc", "Build MPC problems");
    mpc->require_subcommand(1);
    int horizon = 10;
    std::string spec_out;
    auto *pend = mpc->add_subcommand("pendulum", "Condensed cart-pole MPC problem");
    pend->add_option("--horizon", horizon, "Prediction horizon N")->check(CLI::PositiveNumber);
    pend->add_option("--out", out_path, "Problem JSON")->required();
    pend->add_option("--spec-out", spec_out, "Also write the MPC specification JSON");

    std::string spec_in, x0_str, ref_str;
    int steps = 100;
    auto *sim = mpc->add_subcommand("simulate", "Closed-loop simulation on the linear model");
    sim->add_option("--horizon", horizon, "Horizon of the default pendulum")->check(CLI::PositiveNumber);
    sim->add_option("--spec", spec_in, "MPC specification JSON (default: pendulum)");
    sim->add_option("--x0", x0_str, "Initial state v1,v2,...")->required();
    sim->add_option("--ref", ref_str, "Reference r1,r2,... (default 0)");
    sim->add_option("--steps", steps, "Simulation steps")->check(CLI::PositiveNumber);
    sim->add_option("--profile", profile, "unit, flop or a profile JSON");
    sim->add_option("--out", out_path, "Trajectory CSV")->required();
    solver_flags.attach(sim);

    // solve
    std::string theta_str;
    auto *solve_cmd = app.add_subcommand("solve", "Solve one parameter instance");
    solve_cmd->add_option("problem", problem, "Problem JSON")->required();
    solve_cmd->add_option("--theta", theta_str, "Parameter v1,v2,...")->required();
    solve_cmd->add_option("--profile", profile, "unit, flop or a profile JSON");
    solver_flags.attach(solve_cmd);

    // certify
    auto *cert_cmd = app.add_subcommand("certify", "Partition Theta0 by solver behavior");
    cert_cmd->add_option("problem", problem, "Problem JSON")->required();
    cert_cmd->add_option("--out", out_path, "Regions JSON")->required();
    cert_cmd->add_option("--seed", seed, "Seed");
    solver_flags.attach(cert_cmd);
    cert_flags.attach(cert_cmd);

    // wcet
    bool no_prune = false;
    int baseline_samples = 0;
    auto *wcet_cmd = app.add_subcommand("wcet", "Certified worst-case cost");
    wcet_cmd->add_option("problem", problem, "Problem JSON")->required();
    wcet_cmd->add_option("--regions", regions_path, "Existing regions JSON");
    wcet_cmd->add_option("--profile", profile, "unit, flop or a profile JSON");
    wcet_cmd->add_flag("--no-prune", no_prune, "Skip prefix pruning");
    wcet_cmd->add_option("--baseline", baseline_samples, "Also run a Monte-Carlo baseline with this many samples");
    wcet_cmd->add_option("--out", out_path, "Report JSON")->required();
    wcet_cmd->add_option("--seed", seed, "Seed");
    solver_flags.attach(wcet_cmd);
    cert_flags.attach(wcet_cmd);

    // validate
    int samples = 1000;
    double eps = 1e-6;
    auto *val_cmd = app.add_subcommand("validate", "Check a region table against direct solves");
    val_cmd->add_option("problem", problem, "Problem JSON")->required();
    val_cmd->add_option("--regions", regions_path, "Regions JSON")->required();
    val_cmd->add_option("--samples", samples, "Sample count")->check(CLI::PositiveNumber);
    val_cmd->add_option("--eps", eps, "Boundary band")->check(CLI::PositiveNumber);
    val_cmd->add_option("--seed", seed, "Seed");
    solver_flags.attach(val_cmd);

    // baseline
    auto *base_cmd = app.add_subcommand("baseline", "Monte-Carlo maximum of sampled costs");
    base_cmd->add_option("problem", problem, "Problem JSON")->required();
    base_cmd->add_option("--samples", samples, "Sample count")->check(CLI::PositiveNumber);
    base_cmd->add_option("--profile", profile, "unit, flop or a profile JSON");
    base_cmd->add_option("--out", out_path, "Histogram CSV")->required();
    base_cmd->add_option("--seed", seed, "Seed");
    solver_flags.attach(base_cmd);

    // slice
    std::string dims_str, fix_str;
    int grid = 100;
    auto *slice_cmd = app.add_subcommand("slice", "Region and cost grid over two parameter dimensions");
    slice_cmd->add_option("problem", problem, "Problem JSON")->required();
    slice_cmd->add_option("--regions", regions_path, "Regions JSON")->required();
    slice_cmd->add_option("--dims", dims_str, "Two dimensions i,j")->required();
    slice_cmd->add_option("--fix", fix_str, "Fixed values k=v,... (default: center of the bounding box)");
    slice_cmd->add_option("--grid", grid, "Grid points per axis")->check(CLI::Range(2, 100000));
    slice_cmd->add_option("--profile", profile, "unit, flop or a profile JSON");
    slice_cmd->add_option("--out", out_path, "Slice CSV")->required();
    solver_flags.attach(slice_cmd);

    // archetypes
    int wallclock = 0;
    auto *arch_cmd = app.add_subcommand("archetypes", "One representative parameter per surviving region");
    arch_cmd->add_option("problem", problem, "Problem JSON")->required();
    arch_cmd->add_option("--regions", regions_path, "Regions JSON")->required();
    arch_cmd->add_option("--profile", profile, "unit, flop or a profile JSON");
    arch_cmd->add_option("--wallclock", wallclock, "Also time each archetype with this many repeats (not certified)");
    arch_cmd->add_option("--out", out_path, "Archetype CSV")->required();
    arch_cmd->add_option("--seed", seed, "Seed");
    solver_flags.attach(arch_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kInvalidInput;
    }

    try {
        const int threads = env_threads();
        const SolverConfig cfg = solver_flags.config();
        CertOptions co;
        co.degree_cap = cert_flags.degree_cap;
        co.interior_budget = cert_flags.budget;
        co.seed = seed;
        co.threads = threads;

        if (pend->parsed()) {
            const MpcSpec S = pendulum_example(horizon);
            const MpQP P = condense(S);
            write_text_file(out_path, dump(to_json(P)));
            if (!spec_out.empty()) write_text_file(spec_out, dump(to_json(S)));
            out << "n=" << P.n << " m=" << P.m << " n_theta=" << P.n_theta << "\n";
            return kOk;
        }
        if (sim->parsed()) {
            const MpcSpec S = spec_in.empty() ? pendulum_example(horizon) : spec_from_json(read_json_file(spec_in));
            const auto x0 = parse_list(x0_str);
            auto r = parse_list(ref_str);
            if (r.empty()) r.assign(S.n_r, 0.0);
            const Trajectory t = closed_loop_sim(S, to_vector(x0), to_vector(r), steps, cfg, CostModel::resolve(profile));
            write_text_file(out_path, trajectory_csv(t));
            out << "final_state_norm=" << format_double(t.final_state.norm()) << "\n";
            return kOk;
        }

        const MpQP P = mpqp_from_json(read_json_file(problem));
        const DualData dd = to_dual(P);

        if (solve_cmd->parsed()) {
            const Eigen::VectorXd theta = to_vector(parse_list(theta_str));
            const SolveResult r = solve(dd, theta, cfg);
            const CostModel cm = CostModel::resolve(profile);
            out << "n=" << P.n << " m=" << P.m << " n_theta=" << P.n_theta << "\n";
            out << "status=" << status_name(r.status) << "\n";
            out << "W*=" << ws_string(r.W) << "\n";
            if (r.status == SolveStatus::optimal) {
                out << "x*=";
                for (int i = 0; i < r.x.size(); ++i) out << (i ? "," : "") << format_double(r.x(i));
                out << "\n";
            }
            out << "iterations=" << r.iterations << "\n";
            out << "sequence=" << seq_string(r.sequence) << "\n";
            out << "cost=" << trace_cost(r.trace, cm) << " profile=" << cm.name << "\n";
            {
                std::ostringstream h;
                h << std::hex << trace_hash(r.trace);
                out << "trace_hash=0x" << h.str() << "\n";
            }
            return kOk;
        }
        if (cert_cmd->parsed()) {
            const CertOutput C = certify(dd, P.theta0, cfg, co);
            write_text_file(out_path, dump(to_json(C)));
            out << "regions=" << C.regions.size() << " nodes=" << C.stats.nodes << " unresolved=" << C.stats.unresolved
                << " seed=" << seed << "\n";
            return kOk;
        }
        if (wcet_cmd->parsed()) {
            const CostModel cm = CostModel::resolve(profile);
            const CertOutput C = load_or_certify(regions_path, dd, P, cfg, co);
            WcetOptions wo;
            wo.prune = !no_prune;
            wo.seed = seed;
            wo.threads = threads;
            wo.archetype_budget = cert_flags.budget;
            WcetReport R = wcet_from_cert(dd, C, cfg, cm, wo);
            if (baseline_samples > 0)
                R.baseline = monte_carlo_baseline(dd, P.theta0, cfg, cm, baseline_samples, seed, threads);
            write_text_file(out_path, dump(to_json(R)));
            out << "worst_cost=" << R.worst_cost << " witness_region=" << R.witness_region
                << " regions=" << R.nominal_count << " pruned=" << R.pruned_count << " surviving=" << R.surviving_count
                << " profile=" << R.profile << " seed=" << seed << "\n";
            if (R.baseline) out << "baseline_max=" << R.baseline->max_cost << "\n";
            if (R.lower_bound) {
                err << "warning: " << R.advisory << "\n";
                return kUnresolved;
            }
            return kOk;
        }
        if (val_cmd->parsed()) {
            const CertOutput C = load_or_certify(regions_path, dd, P, cfg, co);
            const ValidationReport V = validate_cover(C, dd, cfg, samples, eps, seed);
            out << "samples=" << V.samples << " checked=" << V.checked << " boundary_skipped=" << V.boundary_skipped
                << " matched=" << V.matched << " unresolved_hits=" << V.unresolved_hits
                << " match_rate=" << format_double(V.match_rate()) << " seed=" << seed << "\n";
            for (const auto &ce : V.counterexamples) {
                out << "mismatch kind=" << ce.kind << " region=" << ce.region_id << " theta=";
                for (int i = 0; i < ce.theta.size(); ++i) out << (i ? "," : "") << format_double(ce.theta(i));
                out << " expected=" << seq_string(ce.expected) << " actual=" << seq_string(ce.actual) << "\n";
            }
            if (V.archetype_mismatches) out << "archetype_mismatches=" << V.archetype_mismatches << "\n";
            if (V.boundary_archetypes) out << "boundary_archetypes=" << V.boundary_archetypes << "\n";
            return V.ok() ? kOk : kValidationMismatch;
        }
        if (base_cmd->parsed()) {
            const CostModel cm = CostModel::resolve(profile);
            const BaselineResult B = monte_carlo_baseline(dd, P.theta0, cfg, cm, samples, seed, threads);
            write_text_file(out_path, histogram_csv(B));
            out << "max_cost=" << B.max_cost << " samples=" << samples << " seed=" << seed << "\n";
            return kOk;
        }
        if (slice_cmd->parsed()) {
            const auto dims_d = parse_list(dims_str);
            if (dims_d.size() != 2) throw InvalidInput("--dims needs exactly two indices");
            const int da = static_cast<int>(dims_d[0]), db = static_cast<int>(dims_d[1]);
            if (da < 0 || db < 0 || da >= P.n_theta || db >= P.n_theta || da == db || dims_d[0] != da ||
                dims_d[1] != db)
                throw InvalidInput("--dims must name two distinct parameter indices");
            Eigen::VectorXd lo, hi;
            if (!bounding_box(P.theta0, lo, hi)) throw InvalidInput("Theta0 is empty or unbounded");
            Eigen::VectorXd base = 0.5 * (lo + hi);
            std::stringstream fs(fix_str);
            std::string tok;
            while (std::getline(fs, tok, ',')) {
                const auto eq = tok.find('=');
                if (eq == std::string::npos) throw InvalidInput("--fix entries must be k=v");
                const auto kv = parse_list(tok.substr(0, eq));
                const auto vv = parse_list(tok.substr(eq + 1));
                if (kv.size() != 1 || vv.size() != 1 || kv[0] < 0 || kv[0] >= P.n_theta)
                    throw InvalidInput("bad --fix entry " + tok);
                base(static_cast<int>(kv[0])) = vv[0];
            }
            const CertOutput C = load_or_certify(regions_path, dd, P, cfg, co);
            const CostModel cm = CostModel::resolve(profile);
            std::vector<std::uint64_t> costs(C.regions.size(), 0);
            for (const auto &r : C.regions) {
                if (r.status == RegionStatus::unresolved) continue;
                const SolveStatus st = r.status == RegionStatus::optimal      ? SolveStatus::optimal
                                       : r.status == RegionStatus::infeasible ? SolveStatus::infeasible
                                                                              : SolveStatus::iter_cap;
                costs[r.id] = trace_cost(trace_from_sequence(dd, r.sequence, st, cfg), cm);
            }
            std::vector<SliceRow> rows;
            for (int i = 0; i < grid; ++i)
                for (int j = 0; j < grid; ++j) {
                    Eigen::VectorXd th = base;
                    th(da) = lo(da) + (hi(da) - lo(da)) * i / (grid - 1);
                    th(db) = lo(db) + (hi(db) - lo(db)) * j / (grid - 1);
                    SliceRow row{th(da), th(db), -1, 0};
                    if (P.theta0.satisfied(th, 1e-9)) {
                        const LookupResult L = lookup_cost(C, costs, th);
                        row.region_id = L.region_id;
                        row.cycles = L.region_id >= 0 ? L.cost : 0;
                    }
                    rows.push_back(row);
                }
            write_text_file(out_path, slice_csv(rows, da, db));
            out << "points=" << rows.size() << "\n";
            return kOk;
        }
        if (arch_cmd->parsed()) {
            const CertOutput C = load_or_certify(regions_path, dd, P, cfg, co);
            const CostModel cm = CostModel::resolve(profile);
            WcetOptions wo;
            wo.seed = seed;
            wo.threads = threads;
            const WcetReport R = wcet_from_cert(dd, C, cfg, cm, wo);
            std::string csv = archetypes_csv(R.archetypes, R);
            if (wallclock > 0) {
                std::ostringstream os;
                os << "region_id,ns\n";
                for (const auto &a : R.archetypes)
                    os << a.region_id << ',' << measure_wallclock(dd, a.theta, cfg, wallclock).nanoseconds << '\n';
                write_text_file(out_path + ".wallclock.csv", os.str());
                out << "wallclock timings are host measurements and are not certified\n";
            }
            write_text_file(out_path, csv);
            out << "archetypes=" << R.archetypes.size() << " seed=" << seed << "\n";
            return kOk;
        }
    } catch (const std::invalid_argument &e) {
        err << "error: " << e.what() << "\n";
        return kInvalidInput;
    } catch (const nlohmann::json::exception &e) {
        err << "error: " << e.what() << "\n";
        return kInvalidInput;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << "\n";
        return kInvalidInput;
    }
    return kInvalidInput;
}

}  // namespace mpcert::cli
