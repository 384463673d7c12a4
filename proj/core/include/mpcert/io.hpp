#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "mpcert/cert.hpp"
#include "mpcert/mpc.hpp"
#include "mpcert/mpqp.hpp"
#include "mpcert/wcet.hpp"

namespace mpcert {

using Json = nlohmann::json;

// Matrices are written flat in row-major order; readers also accept a
// nested list of rows.

Json to_json(const Polyhedron &P);
Polyhedron polyhedron_from_json(const Json &j, int dim);

/// {"n", "m", "n_theta", "H", "f0", "F", "A", "b0", "B", "Theta0"} with
/// Theta0 either {"box": {"lo", "hi"}} or {"halfspaces": {"normals", "offsets"}}.
Json to_json(const MpQP &P);
MpQP mpqp_from_json(const Json &j);

/// Region table: options, statistics, problem digest (hex), Θ0, and per
/// region its halfspaces (nested rows), polynomial constraints (dense
/// coefficients over the graded monomial basis with their degree), working-
/// set sequence, status and archetype (null when none).
Json to_json(const CertOutput &C);
CertOutput cert_from_json(const Json &j);

/// Contains no timings, so identical runs produce identical files.
Json to_json(const WcetReport &R);
WcetReport report_from_json(const Json &j);

Json to_json(const MpcSpec &S);
MpcSpec spec_from_json(const Json &j);

/// Two-space indented JSON with a trailing newline.
std::string dump(const Json &j);
Json read_json_file(const std::string &path);
void write_text_file(const std::string &path, const std::string &text);

/// Shortest decimal string that reads back to the same double.
std::string format_double(double v);

std::string histogram_csv(const BaselineResult &b);
std::string archetypes_csv(const std::vector<Archetype> &arch, const WcetReport &R);
std::string trajectory_csv(const Trajectory &t);

struct SliceRow {
    double a = 0.0;
    double b = 0.0;
    int region_id = -1;
    std::uint64_t cycles = 0;
};
std::string slice_csv(const std::vector<SliceRow> &rows, int dim_a, int dim_b);

}  // namespace mpcert
