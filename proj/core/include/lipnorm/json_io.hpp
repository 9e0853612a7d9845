#pragma once

#include <string>

#include "lipnorm/estimate.hpp"
#include "lipnorm/lipmap.hpp"
#include "lipnorm/tensor.hpp"

namespace lipnorm {

Json json_vector(const Vector& v);
/// Matrix as a list of its columns.
Json json_columns(const Matrix& m);
/// Matrix as a list of its rows.
Json json_rows(const Matrix& m);
Vector parse_vector(const Json& j);
/// Inverse of json_columns; `rows` is required to read an empty list.
Matrix parse_columns(const Json& j, Eigen::Index rows);
Matrix parse_rows(const Json& j, Eigen::Index cols);

/// {"points": [...], "base": name, "dist": [[...]]}
PointedMetricSpace parse_space(const Json& j);
Json space_json(const PointedMetricSpace& X);

/// {"dim": n, "p": number or "inf"}
FinNormedSpace parse_normed(const Json& j);
Json normed_json(const FinNormedSpace& E);

/// {"space": ..., "coeffs": {name: value}}; missing points have coefficient 0
/// and a base entry is ignored.
FreeVector parse_free_vector(const Json& j);
Json free_vector_json(const FreeVector& m);

/// {"domain": space, "codomain": {"dim", "p"}, "values": {name: [...]}}.
/// Points absent from "values" map to 0; the base must map to 0.
LipschitzMap parse_lipschitz_map(const Json& j);
Json lipschitz_map_json(const LipschitzMap& T);

/// {"space": ..., "E": {"dim", "p"}, "terms": [{"x", "y", "e"}]}
TensorElement parse_tensor(const Json& j);
Json tensor_json(const TensorElement& u);

/// Operator on F(X): {"space": ..., "codomain": {"dim","p"}, "matrix": rows}
/// or on l_q: {"domain": {"dim","p"}, "codomain": ..., "matrix": rows}.
/// A codomain {"free": space} selects F(Y).
LinearOperator parse_operator(const Json& j);
Json operator_json(const LinearOperator& u);

/// Deterministic text: keys sorted, numbers printed with 12 significant
/// digits, two-space indentation.
std::string dump_deterministic(const Json& j);

/// Parses a file; throws InputError with the path on failure.
Json read_json_file(const std::string& path);

}  // namespace lipnorm
