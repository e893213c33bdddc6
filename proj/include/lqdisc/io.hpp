#pragma once

// Model / tableau file parsing and result export.
//
// Model file (UTF-8 JSON):
//   {
//     "model": { "state_space": { "A_c", "B_c", "C_c", "D_c", "G_c"?, "delays"? } }
//            | { "transfer": { "nz"?, "nu"?, "channels": [ {"i","j","num","den","tau"?} ] } },
//     "cost":  { "Qc" | "Wz", "mu", "Ts", "N", "zbar"?, "x0"?, "P0"? }
//   }
// Matrices are row-major nested arrays; channel indices are 1-based; "delays"
// holds one delay per input. Unknown keys are rejected. If fewer than N
// references are given the last one is held.

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "lqdisc/discretize.hpp"

namespace lqdisc {

using Json = nlohmann::json;

/// Throws SchemaError naming the offending field.
Problem parse_problem(const Json& doc);
Problem load_problem(const std::string& path);

/// {name, a, b, c, kind}; kind is explicit | diagonally-implicit | implicit.
ButcherTableau parse_tableau(const Json& doc);
ButcherTableau load_tableau(const std::string& path);

Json matrix_to_json(const Mat& m);
Json vector_to_json(const Vec& v);
Json result_to_json(const DiscreteLQ& result, const Problem& problem);

/// Scientific notation with 17 significant digits.
std::string format_double(double x);

/// RFC-4180 writer: header row, quoted fields only when needed, CRLF line ends.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}
  void row(const std::vector<std::string>& fields);

 private:
  std::ostream& out_;
};

/// k, t_k, rho_k, ||q_k||_inf
void write_stage_csv(std::ostream& out, const std::vector<StageCost>& stages);

}  // namespace lqdisc
