#pragma once

#include "proxident/problems.hpp"
#include "proxident/solvers.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>

namespace proxident {

/// Shortest round-trip representation used in every emitted file (%.17g).
std::string format_double(double v);

/// Text matrix format: first line "rows cols", then one line per row.
void write_matrix(const std::filesystem::path& path, const Matrix& m);
Matrix read_matrix(const std::filesystem::path& path);
/// Vectors are single-column matrices.
void write_vector(const std::filesystem::path& path, const Vector& v);
Vector read_vector(const std::filesystem::path& path);

using KeyValues = std::map<std::string, std::string>;
/// key=value lines; blank lines and lines starting with '#' are skipped.
KeyValues read_key_values(const std::filesystem::path& path);
KeyValues parse_key_values(std::istream& in, const std::string& origin);
void write_key_values(const std::filesystem::path& path, const KeyValues& kv);

/// Bundle directory: A.txt, b.txt, meta and, with ground truth, xstar.txt.
/// Only least-squares problems can be stored.
void save_bundle(const std::filesystem::path& dir, const CompositeProblem& problem,
                 const KeyValues& extra = {});
CompositeProblem load_bundle(const std::filesystem::path& dir);
KeyValues load_bundle_meta(const std::filesystem::path& dir);

/// k,objective,nnz,pattern_hash,u_step,comm_coords,wallclock_s, followed by
/// accel_active,enforced_count when `exploit_columns` is set.
void write_trace_csv(std::ostream& out, const Trace& trace, bool exploit_columns = false);
void write_trace_csv(const std::filesystem::path& path, const Trace& trace,
                     bool exploit_columns = false);

}  // namespace proxident
