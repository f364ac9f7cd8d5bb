#pragma once

// JSON serialization of tuples, subspaces and inner multipliers.

#include <string>

#include <json.hpp>

#include "polyball/berezin.hpp"
#include "polyball/subspaces.hpp"

namespace polyball {

using Json = nlohmann::ordered_json;

/// Throws parse_error with "line L, column C" on malformed text.
Json parse_json(const std::string& text, const std::string& source = "input");
Json read_json_file(const std::string& path);
std::string dump_json(const Json& j);

Json matrix_to_json(const Matrix& m);
/// Rows of [re, im] pairs (plain numbers accepted as real entries). A flat
/// row-major list is accepted when `rows` is given.
Matrix matrix_from_json(const Json& j, Eigen::Index rows = -1, Eigen::Index cols = -1);

/// {"n": [...], "dimH": d, "factors": [[matrix, ...], ...]}
Json tuple_to_json(const OperatorTuple& t);
OperatorTuple tuple_from_json(const Json& j);

FockModel model_from_string(const std::string& s);

/// Structured subspaces are written with their factor profiles; materialized
/// ones as "basis" with per-grade or per-layer orthonormal bases. Reading also
/// accepts kind parameters (mt, cur0, uncountable, ...) and "mode": "generated".
Json subspace_to_json(const GradedSubspace& s);
GradedSubspace subspace_from_json(const Json& j);

Json multiplier_to_json(const InnerMultiplier& psi);
InnerMultiplier multiplier_from_json(const Json& j);

}  // namespace polyball
