#include "mpcert/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace mpcert {

namespace {

void check(bool cond, const std::string &msg) {
    if (!cond) throw InvalidInput(msg);
}

const Json &field(const Json &j, const char *name) {
    check(j.is_object() && j.contains(name), std::string("JSON: missing field \"") + name + "\"");
    return j.at(name);
}

double number(const Json &v) {
    check(v.is_number(), "JSON: expected a number");
    return v.get<double>();
}

int integer(const Json &v) {
    check(v.is_number_integer(), "JSON: expected an integer");
    return v.get<int>();
}

Json flat(const Eigen::MatrixXd &M) {
    Json a = Json::array();
    for (Eigen::Index i = 0; i < M.rows(); ++i)
        for (Eigen::Index j = 0; j < M.cols(); ++j) a.push_back(M(i, j));
    return a;
}

Json nested(const Eigen::MatrixXd &M) {
    Json a = Json::array();
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
        a.push_back(std::move(row));
    }
    return a;
}

Json vec(const Eigen::VectorXd &v) {
    Json a = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

Eigen::VectorXd read_vec(const Json &j, Eigen::Index n, const char *what) {
    check(j.is_array() && static_cast<Eigen::Index>(j.size()) == n,
          std::string("JSON: ") + what + " must have " + std::to_string(n) + " entries");
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = number(j[i]);
    return v;
}

Eigen::MatrixXd read_mat(const Json &j, Eigen::Index rows, Eigen::Index cols, const char *what) {
    check(j.is_array(), std::string("JSON: ") + what + " must be an array");
    Eigen::MatrixXd M(rows, cols);
    if (!j.empty() && j[0].is_array()) {
        check(static_cast<Eigen::Index>(j.size()) == rows, std::string("JSON: ") + what + " has the wrong row count");
        for (Eigen::Index i = 0; i < rows; ++i) {
            check(j[i].is_array() && static_cast<Eigen::Index>(j[i].size()) == cols,
                  std::string("JSON: ") + what + " has the wrong column count");
            for (Eigen::Index c = 0; c < cols; ++c) M(i, c) = number(j[i][c]);
        }
        return M;
    }
    check(static_cast<Eigen::Index>(j.size()) == rows * cols,
          std::string("JSON: ") + what + " must have " + std::to_string(rows * cols) + " entries");
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index c = 0; c < cols; ++c) M(i, c) = number(j[i * cols + c]);
    return M;
}

std::string hex64(std::uint64_t v) {
    char buf[19];
    std::snprintf(buf, sizeof buf, "0x%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::uint64_t parse_hex64(const Json &j) {
    check(j.is_string(), "JSON: expected a hex string");
    const std::string s = j.get<std::string>();
    check(s.size() > 2 && s[0] == '0' && s[1] == 'x', "JSON: hex string must start with 0x");
    std::uint64_t v = 0;
    const auto r = std::from_chars(s.data() + 2, s.data() + s.size(), v, 16);
    check(r.ec == std::errc() && r.ptr == s.data() + s.size(), "JSON: malformed hex string");
    return v;
}

std::uint64_t u64(const Json &v) {
    check(v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0),
          "JSON: expected a nonnegative integer");
    return v.get<std::uint64_t>();
}

Json sequence_json(const WorkingSetSequence &seq) {
    Json a = Json::array();
    for (const auto &W : seq) a.push_back(W.indices());
    return a;
}

WorkingSetSequence sequence_from_json(const Json &j, int m) {
    check(j.is_array(), "JSON: sequence must be a list of index lists");
    WorkingSetSequence seq;
    for (const auto &w : j) {
        check(w.is_array(), "JSON: working set must be a list");
        std::vector<int> idx;
        for (const auto &i : w) idx.push_back(integer(i));
        WorkingSet W(std::move(idx));
        W.validate(m);
        seq.push_back(std::move(W));
    }
    return seq;
}

const char *add_rule_name(AddRule r) { return r == AddRule::dantzig ? "dantzig" : "bland"; }
const char *remove_rule_name(RemoveRule r) {
    return r == RemoveRule::classic_blocking ? "classic_blocking" : "paper_literal";
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

Json to_json(const Polyhedron &P) {
    return Json{{"normals", nested(P.normals)}, {"offsets", vec(P.offsets)}};
}

Polyhedron polyhedron_from_json(const Json &j, int dim) {
    const Json &off = field(j, "offsets");
    check(off.is_array(), "JSON: offsets must be an array");
    const auto rows = static_cast<Eigen::Index>(off.size());
    Polyhedron P(read_mat(field(j, "normals"), rows, dim, "normals"), read_vec(off, rows, "offsets"));
    P.validate();
    return P;
}

Json to_json(const MpQP &P) {
    return Json{{"n", P.n},
                {"m", P.m},
                {"n_theta", P.n_theta},
                {"H", flat(P.H)},
                {"f0", vec(P.f0)},
                {"F", flat(P.F)},
                {"A", flat(P.A)},
                {"b0", vec(P.b0)},
                {"B", flat(P.B)},
                {"Theta0", Json{{"halfspaces", Json{{"normals", flat(P.theta0.normals)}, {"offsets", vec(P.theta0.offsets)}}}}}};
}

MpQP mpqp_from_json(const Json &j) {
    MpQP P;
    P.n = integer(field(j, "n"));
    P.m = integer(field(j, "m"));
    P.n_theta = integer(field(j, "n_theta"));
    check(P.n >= 1 && P.m >= 0 && P.n_theta >= 0, "MpQP JSON: invalid dimensions");
    P.H = read_mat(field(j, "H"), P.n, P.n, "H");
    P.f0 = read_vec(field(j, "f0"), P.n, "f0");
    P.F = read_mat(field(j, "F"), P.n, P.n_theta, "F");
    P.A = read_mat(field(j, "A"), P.m, P.n, "A");
    P.b0 = read_vec(field(j, "b0"), P.m, "b0");
    P.B = read_mat(field(j, "B"), P.m, P.n_theta, "B");
    const Json &t = field(j, "Theta0");
    if (t.contains("box")) {
        const Json &b = t["box"];
        P.theta0 = Polyhedron::box(read_vec(field(b, "lo"), P.n_theta, "lo"), read_vec(field(b, "hi"), P.n_theta, "hi"));
    } else {
        P.theta0 = polyhedron_from_json(field(t, "halfspaces"), P.n_theta);
    }
    P.validate();
    return P;
}

Json to_json(const CertOutput &C) {
    Json regions = Json::array();
    for (const auto &r : C.regions) {
        Json polys = Json::array();
        for (const auto &pc : r.region.nonlinear)
            polys.push_back(Json{{"degree", pc.p.degree()}, {"coefficients", pc.p.to_dense()}});
        regions.push_back(Json{{"id", r.id},
                               {"branch_path", r.branch_path},
                               {"status", std::string(region_status_name(r.status))},
                               {"iterations", r.iterations},
                               {"sequence", sequence_json(r.sequence)},
                               {"halfspaces", to_json(r.region.linear)},
                               {"polynomials", std::move(polys)},
                               {"archetype", r.archetype ? vec(*r.archetype) : Json(nullptr)}});
    }
    return Json{{"format", "mpcert-regions"},
                {"version", 1},
                {"problem_digest", hex64(C.problem_digest)},
                {"seed", C.seed},
                {"options",
                 Json{{"degree_cap", C.degree_cap},
                      {"k_max", C.k_max},
                      {"add_rule", add_rule_name(C.add_rule)},
                      {"remove_rule", remove_rule_name(C.remove_rule)}}},
                {"n_theta", C.theta0.dim()},
                {"Theta0", to_json(C.theta0)},
                {"stats",
                 Json{{"nodes", C.stats.nodes},
                      {"max_depth", C.stats.max_depth},
                      {"empty_prunes", C.stats.empty_prunes},
                      {"thin_prunes", C.stats.thin_prunes},
                      {"unresolved", C.stats.unresolved},
                      {"dropped_comparisons", C.stats.dropped_comparisons}}},
                {"regions", std::move(regions)}};
}

CertOutput cert_from_json(const Json &j) {
    check(j.value("format", std::string()) == "mpcert-regions", "regions JSON: unknown format");
    CertOutput C;
    C.problem_digest = parse_hex64(field(j, "problem_digest"));
    C.seed = u64(field(j, "seed"));
    const Json &o = field(j, "options");
    C.degree_cap = integer(field(o, "degree_cap"));
    C.k_max = integer(field(o, "k_max"));
    const std::string ar = field(o, "add_rule").get<std::string>();
    const std::string rr = field(o, "remove_rule").get<std::string>();
    check(ar == "dantzig" || ar == "bland", "regions JSON: unknown add_rule");
    check(rr == "classic_blocking" || rr == "paper_literal", "regions JSON: unknown remove_rule");
    C.add_rule = ar == "dantzig" ? AddRule::dantzig : AddRule::bland;
    C.remove_rule = rr == "classic_blocking" ? RemoveRule::classic_blocking : RemoveRule::paper_literal;
    const int dim = integer(field(j, "n_theta"));
    C.theta0 = polyhedron_from_json(field(j, "Theta0"), dim);
    const Json &s = field(j, "stats");
    C.stats.nodes = u64(field(s, "nodes"));
    C.stats.max_depth = integer(field(s, "max_depth"));
    C.stats.empty_prunes = u64(field(s, "empty_prunes"));
    C.stats.thin_prunes = u64(field(s, "thin_prunes"));
    C.stats.unresolved = u64(field(s, "unresolved"));
    C.stats.dropped_comparisons = u64(field(s, "dropped_comparisons"));
    int max_index = 0;
    for (const auto &r : field(j, "regions"))
        for (const auto &w : field(r, "sequence"))
            for (const auto &i : w) max_index = std::max(max_index, integer(i) + 1);
    for (const auto &r : field(j, "regions")) {
        RegionRecord rec;
        rec.id = integer(field(r, "id"));
        check(rec.id == static_cast<int>(C.regions.size()), "regions JSON: ids must be consecutive from 0");
        for (const auto &l : field(r, "branch_path")) rec.branch_path.push_back(integer(l));
        const auto st = region_status_from_name(field(r, "status").get<std::string>());
        check(st.has_value(), "regions JSON: unknown status");
        rec.status = *st;
        rec.iterations = integer(field(r, "iterations"));
        rec.sequence = sequence_from_json(field(r, "sequence"), max_index);
        rec.region = RegionDescription(polyhedron_from_json(field(r, "halfspaces"), dim));
        for (const auto &pj : field(r, "polynomials")) {
            const int deg = integer(field(pj, "degree"));
            const Json &cj = field(pj, "coefficients");
            check(cj.is_array() && cj.size() == monomial_count(dim, deg), "regions JSON: coefficient count mismatch");
            std::vector<double> c;
            for (const auto &v : cj) c.push_back(number(v));
            PolyConstraint pc{Polynomial::from_dense(dim, deg, c)};
            pc.validate(dim);
            rec.region.nonlinear.push_back(std::move(pc));
        }
        const Json &a = field(r, "archetype");
        if (!a.is_null()) rec.archetype = read_vec(a, dim, "archetype");
        C.regions.push_back(std::move(rec));
    }
    return C;
}

Json to_json(const WcetReport &R) {
    Json regions = Json::array();
    for (const auto &rc : R.regions)
        regions.push_back(Json{{"id", rc.region_id},
                               {"cost", rc.cost},
                               {"trace_hash", hex64(rc.trace_hash)},
                               {"pruned", rc.pruned},
                               {"measured", rc.measured}});
    Json arch = Json::array();
    for (const auto &a : R.archetypes) arch.push_back(Json{{"region_id", a.region_id}, {"theta", vec(a.theta)}});
    Json uc = Json::array();
    for (const auto &[id, c] : R.unresolved_costs) uc.push_back(Json{{"region_id", id}, {"cost", c}});
    Json baseline = nullptr;
    if (R.baseline) {
        Json hist = Json::array();
        std::uint64_t n = 0;
        for (const auto &[c, k] : R.baseline->histogram) {
            hist.push_back(Json::array({c, k}));
            n += k;
        }
        baseline = Json{{"samples", n}, {"max_cost", R.baseline->max_cost}, {"histogram", std::move(hist)}};
    }
    return Json{{"format", "mpcert-wcet"},
                {"version", 1},
                {"profile", R.profile},
                {"seed", R.seed},
                {"worst_cost", R.worst_cost},
                {"witness_region", R.witness_region},
                {"lower_bound", R.lower_bound},
                {"advisory", R.advisory},
                {"nominal_regions", R.nominal_count},
                {"pruned_regions", R.pruned_count},
                {"surviving_regions", R.surviving_count},
                {"archetype_mismatches", R.archetype_mismatches},
                {"boundary_archetypes", R.boundary_archetypes},
                {"regions", std::move(regions)},
                {"archetypes", std::move(arch)},
                {"unresolved_costs", std::move(uc)},
                {"unresolved_without_point", R.unresolved_no_point},
                {"baseline", std::move(baseline)}};
}

WcetReport report_from_json(const Json &j) {
    check(j.value("format", std::string()) == "mpcert-wcet", "report JSON: unknown format");
    WcetReport R;
    R.profile = field(j, "profile").get<std::string>();
    R.seed = u64(field(j, "seed"));
    R.worst_cost = u64(field(j, "worst_cost"));
    R.witness_region = integer(field(j, "witness_region"));
    R.lower_bound = field(j, "lower_bound").get<bool>();
    R.advisory = field(j, "advisory").get<std::string>();
    R.nominal_count = integer(field(j, "nominal_regions"));
    R.pruned_count = integer(field(j, "pruned_regions"));
    R.surviving_count = integer(field(j, "surviving_regions"));
    R.archetype_mismatches = integer(field(j, "archetype_mismatches"));
    R.boundary_archetypes = integer(field(j, "boundary_archetypes"));
    for (const auto &r : field(j, "regions"))
        R.regions.push_back({integer(field(r, "id")), u64(field(r, "cost")), parse_hex64(field(r, "trace_hash")),
                             field(r, "pruned").get<bool>(), field(r, "measured").get<bool>()});
    for (const auto &a : field(j, "archetypes")) {
        const Json &t = field(a, "theta");
        R.archetypes.push_back({integer(field(a, "region_id")), read_vec(t, static_cast<Eigen::Index>(t.size()), "theta")});
    }
    for (const auto &u : field(j, "unresolved_costs"))
        R.unresolved_costs.emplace_back(integer(field(u, "region_id")), u64(field(u, "cost")));
    for (const auto &u : field(j, "unresolved_without_point")) R.unresolved_no_point.push_back(integer(u));
    const Json &b = field(j, "baseline");
    if (!b.is_null()) {
        BaselineResult br;
        br.max_cost = u64(field(b, "max_cost"));
        for (const auto &h : field(b, "histogram")) {
            check(h.is_array() && h.size() == 2, "report JSON: histogram rows are [cost, count]");
            br.histogram[u64(h[0])] = u64(h[1]);
        }
        R.baseline = std::move(br);
    }
    return R;
}

Json to_json(const MpcSpec &S) {
    return Json{{"n_s", S.model.n_s()},
                {"n_u", S.model.n_u()},
                {"n_r", S.n_r},
                {"A", flat(S.model.A)},
                {"B", flat(S.model.B)},
                {"Ts", S.model.Ts},
                {"N", S.N},
                {"Q", flat(S.Q)},
                {"R", flat(S.R)},
                {"QN", flat(S.QN)},
                {"u_lo", vec(S.u_lo)},
                {"u_hi", vec(S.u_hi)},
                {"ref_map", flat(S.ref_map)},
                {"x0_lo", vec(S.x0_lo)},
                {"x0_hi", vec(S.x0_hi)},
                {"r_lo", vec(S.r_lo)},
                {"r_hi", vec(S.r_hi)}};
}

MpcSpec spec_from_json(const Json &j) {
    MpcSpec S;
    const int ns = integer(field(j, "n_s")), nu = integer(field(j, "n_u"));
    S.n_r = integer(field(j, "n_r"));
    check(ns >= 1 && nu >= 1 && S.n_r >= 0, "MpcSpec JSON: invalid dimensions");
    S.model.A = read_mat(field(j, "A"), ns, ns, "A");
    S.model.B = read_mat(field(j, "B"), ns, nu, "B");
    S.model.Ts = number(field(j, "Ts"));
    S.N = integer(field(j, "N"));
    S.Q = read_mat(field(j, "Q"), ns, ns, "Q");
    S.R = read_mat(field(j, "R"), nu, nu, "R");
    S.QN = read_mat(field(j, "QN"), ns, ns, "QN");
    S.u_lo = read_vec(field(j, "u_lo"), nu, "u_lo");
    S.u_hi = read_vec(field(j, "u_hi"), nu, "u_hi");
    S.ref_map = read_mat(field(j, "ref_map"), ns, S.n_r, "ref_map");
    S.x0_lo = read_vec(field(j, "x0_lo"), ns, "x0_lo");
    S.x0_hi = read_vec(field(j, "x0_hi"), ns, "x0_hi");
    S.r_lo = read_vec(field(j, "r_lo"), S.n_r, "r_lo");
    S.r_hi = read_vec(field(j, "r_hi"), S.n_r, "r_hi");
    S.validate();
    return S;
}

std::string dump(const Json &j) { return j.dump(2) + "\n"; }

Json read_json_file(const std::string &path) {
    std::ifstream in(path);
    check(static_cast<bool>(in), "cannot open " + path);
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::exception &e) {
        throw InvalidInput(path + ": " + e.what());
    }
}

void write_text_file(const std::string &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::string histogram_csv(const BaselineResult &b) {
    std::ostringstream os;
    os << "cost,count\n";
    for (const auto &[c, k] : b.histogram) os << c << ',' << k << '\n';
    return os.str();
}

std::string archetypes_csv(const std::vector<Archetype> &arch, const WcetReport &R) {
    std::ostringstream os;
    const int d = arch.empty() ? 0 : static_cast<int>(arch.front().theta.size());
    os << "region_id";
    for (int i = 0; i < d; ++i) os << ",theta" << i;
    os << ",cost\n";
    for (const auto &a : arch) {
        os << a.region_id;
        for (int i = 0; i < a.theta.size(); ++i) os << ',' << format_double(a.theta(i));
        std::uint64_t cost = 0;
        for (const auto &rc : R.regions)
            if (rc.region_id == a.region_id) cost = rc.cost;
        os << ',' << cost << '\n';
    }
    return os.str();
}

std::string trajectory_csv(const Trajectory &t) {
    std::ostringstream os;
    const int ns = t.steps.empty() ? 0 : static_cast<int>(t.steps.front().x.size());
    const int nu = t.steps.empty() ? 0 : static_cast<int>(t.steps.front().u.size());
    os << "step";
    for (int i = 0; i < ns; ++i) os << ",x" << i;
    for (int i = 0; i < nu; ++i) os << ",u" << i;
    os << ",iters,cost\n";
    for (const auto &s : t.steps) {
        os << s.step;
        for (int i = 0; i < s.x.size(); ++i) os << ',' << format_double(s.x(i));
        for (int i = 0; i < s.u.size(); ++i) os << ',' << format_double(s.u(i));
        os << ',' << s.iterations << ',' << s.cost << '\n';
    }
    return os.str();
}

std::string slice_csv(const std::vector<SliceRow> &rows, int dim_a, int dim_b) {
    std::ostringstream os;
    os << "theta" << dim_a << ",theta" << dim_b << ",region_id,cycles\n";
    for (const auto &r : rows)
        os << format_double(r.a) << ',' << format_double(r.b) << ',' << r.region_id << ',' << r.cycles << '\n';
    return os.str();
}

}  // namespace mpcert
