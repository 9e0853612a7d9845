#include "lipnorm/json_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "lipnorm/error.hpp"

namespace lipnorm {

namespace {

Exponent parse_exponent(const Json& j) {
  if (j.is_string()) return Exponent::parse(j.get<std::string>());
  if (j.is_number()) return Exponent::finite(j.get<double>());
  throw InputError("exponent must be a number or \"inf\"");
}

Json exponent_json(Exponent p) {
  if (p.is_infinite()) return "inf";
  return p.value();
}

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw InputError(std::string("missing field \"") + key + "\"");
  }
  return j.at(key);
}

void dump_into(const Json& j, std::string& out, int indent) {
  const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
  const std::string close(static_cast<std::size_t>(indent), ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {  // std::map order: sorted keys
        if (!first) out += ",\n";
        first = false;
        out += pad + Json(it.key()).dump() + ": ";
        dump_into(it.value(), out, indent + 2);
      }
      out += "\n" + close + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      bool scalars = true;
      for (const auto& e : j) scalars = scalars && !e.is_structured();
      if (scalars) {
        out += "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) out += ", ";
          dump_into(j[i], out, indent);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += pad;
        dump_into(j[i], out, indent + 2);
      }
      out += "\n" + close + "]";
      return;
    }
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) {
        out += std::isnan(v) ? "\"nan\"" : (v > 0 ? "\"inf\"" : "\"-inf\"");
        return;
      }
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.12g", v == 0.0 ? 0.0 : v);
      out += buf;
      return;
    }
    default:
      out += j.dump();
  }
}

}  // namespace

Json json_vector(const Vector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Json json_columns(const Matrix& m) {
  Json a = Json::array();
  for (Eigen::Index c = 0; c < m.cols(); ++c) a.push_back(json_vector(m.col(c)));
  return a;
}

Json json_rows(const Matrix& m) {
  Json a = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) a.push_back(json_vector(m.row(r).transpose()));
  return a;
}

Vector parse_vector(const Json& j) {
  if (!j.is_array()) throw InputError("expected an array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw InputError("expected an array of numbers");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

Matrix parse_columns(const Json& j, Eigen::Index rows) {
  if (!j.is_array()) throw InputError("expected a list of vectors");
  Matrix m(rows, static_cast<Eigen::Index>(j.size()));
  for (std::size_t c = 0; c < j.size(); ++c) {
    const Vector v = parse_vector(j[c]);
    if (v.size() != rows) throw InputError("vector has wrong length");
    m.col(static_cast<Eigen::Index>(c)) = v;
  }
  return m;
}

Matrix parse_rows(const Json& j, Eigen::Index cols) {
  return parse_columns(j, cols).transpose();
}

namespace {

constexpr double kRoundingSlack = 1e-10;

// Distances written at 12 significant digits can break a tight triangle
// inequality by a few units in the last digit. Slack at that level is closed
// by the shortest-path repair; anything larger is left for validation to
// reject.
Matrix close_rounding_slack(const Matrix& dist) {
  if (dist.rows() != dist.cols() || !dist.allFinite()) return dist;
  Matrix closed = dist;
  const Eigen::Index n = dist.rows();
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) closed(i, j) = std::min(closed(i, j), closed(i, k) + closed(k, j));
    }
  }
  const double scale = std::max(1.0, dist.cwiseAbs().maxCoeff());
  return (dist - closed).maxCoeff() <= kRoundingSlack * scale ? closed : dist;
}

}  // namespace

PointedMetricSpace parse_space(const Json& j) {
  const Json& pts = field(j, "points");
  if (!pts.is_array() || pts.empty()) throw InputError("\"points\" must be a nonempty list");
  std::vector<std::string> names;
  for (const auto& p : pts) {
    if (p.is_string()) {
      names.push_back(p.get<std::string>());
    } else if (p.is_number_integer()) {
      names.push_back(std::to_string(p.get<long long>()));
    } else {
      throw InputError("point names must be strings");
    }
  }
  const auto n = static_cast<Eigen::Index>(names.size());
  const Json& d = field(j, "dist");
  if (!d.is_array() || static_cast<Eigen::Index>(d.size()) != n) {
    throw InputError("\"dist\" must be an n x n matrix");
  }
  const Matrix dist = parse_rows(d, n);
  std::size_t base = 0;
  if (j.contains("base")) {
    const Json& b = j["base"];
    const std::string name = b.is_string() ? b.get<std::string>()
                                           : std::to_string(b.get<long long>());
    const auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw InputError("base point '" + name + "' is not a point");
    base = static_cast<std::size_t>(it - names.begin());
  }
  return PointedMetricSpace(std::move(names), close_rounding_slack(dist), base);
}

Json space_json(const PointedMetricSpace& X) {
  return {{"points", X.names()}, {"base", X.name(X.base())}, {"dist", json_rows(X.distances())}};
}

FinNormedSpace parse_normed(const Json& j) {
  const Json& d = field(j, "dim");
  if (!d.is_number_integer()) throw InputError("\"dim\" must be an integer");
  return FinNormedSpace(d.get<int>(), parse_exponent(field(j, "p")));
}

Json normed_json(const FinNormedSpace& E) {
  return {{"dim", E.dim()}, {"p", exponent_json(E.exponent())}};
}

FreeVector parse_free_vector(const Json& j) {
  auto X = share(parse_space(field(j, "space")));
  Vector coeffs = Vector::Zero(X->free_dim());
  const Json& c = field(j, "coeffs");
  if (!c.is_object()) throw InputError("\"coeffs\" must map point names to numbers");
  for (auto it = c.begin(); it != c.end(); ++it) {
    const std::size_t x = X->index_of(it.key());
    if (!it.value().is_number()) throw InputError("coefficient of '" + it.key() + "' is not a number");
    if (x == X->base()) continue;
    coeffs(X->coord(x)) += it.value().get<double>();
  }
  return FreeVector(X, coeffs);
}

Json free_vector_json(const FreeVector& m) {
  Json c = Json::object();
  const auto& X = *m.space();
  for (int k = 0; k < X.free_dim(); ++k) c[X.name(X.point_of_coord(k))] = m.coeffs()(k);
  return {{"space", space_json(X)}, {"coeffs", c}};
}

namespace {

Codomain parse_codomain(const Json& j) {
  if (j.contains("free")) return Codomain::free_space(share(parse_space(j["free"])));
  return parse_normed(j);
}

Json codomain_json(const Codomain& c) {
  if (c.is_free()) return {{"free", space_json(*c.free())}};
  return normed_json(c.normed());
}

}  // namespace

LipschitzMap parse_lipschitz_map(const Json& j) {
  auto X = share(parse_space(field(j, "domain")));
  const Codomain E = parse_codomain(field(j, "codomain"));
  Matrix values = Matrix::Zero(E.dim(), static_cast<Eigen::Index>(X->size()));
  const Json& v = field(j, "values");
  if (!v.is_object()) throw InputError("\"values\" must map point names to vectors");
  for (auto it = v.begin(); it != v.end(); ++it) {
    const std::size_t x = X->index_of(it.key());
    const Vector val = parse_vector(it.value());
    if (val.size() != E.dim()) throw InputError("value at '" + it.key() + "' has wrong dimension");
    values.col(static_cast<Eigen::Index>(x)) = val;
  }
  return LipschitzMap(X, E, values);
}

Json lipschitz_map_json(const LipschitzMap& T) {
  Json v = Json::object();
  const auto& X = *T.domain();
  for (std::size_t x = 0; x < X.size(); ++x) v[X.name(x)] = json_vector(T.value(x));
  return {{"domain", space_json(X)}, {"codomain", codomain_json(T.codomain())}, {"values", v}};
}

TensorElement parse_tensor(const Json& j) {
  auto X = share(parse_space(field(j, "space")));
  const FinNormedSpace E = parse_normed(field(j, "E"));
  std::vector<TensorTerm> terms;
  const Json& t = field(j, "terms");
  if (!t.is_array()) throw InputError("\"terms\" must be a list");
  for (const auto& term : t) {
    auto name = [&](const char* key) {
      const Json& n = field(term, key);
      return n.is_string() ? n.get<std::string>() : std::to_string(n.get<long long>());
    };
    terms.push_back({X->index_of(name("x")), X->index_of(name("y")), parse_vector(field(term, "e"))});
  }
  return TensorElement(X, E, std::move(terms));
}

Json tensor_json(const TensorElement& u) {
  Json t = Json::array();
  const auto& X = *u.space();
  for (const auto& term : u.terms()) {
    t.push_back({{"x", X.name(term.x)}, {"y", X.name(term.y)}, {"e", json_vector(term.e)}});
  }
  return {{"space", space_json(X)}, {"E", normed_json(u.factor())}, {"terms", t}};
}

LinearOperator parse_operator(const Json& j) {
  const Codomain G = parse_codomain(field(j, "codomain"));
  if (j.contains("space")) {
    auto X = share(parse_space(j["space"]));
    return LinearOperator::on_free_space(X, G, parse_rows(field(j, "matrix"), X->free_dim()));
  }
  const FinNormedSpace D = parse_normed(field(j, "domain"));
  return LinearOperator::on_normed(D, G, parse_rows(field(j, "matrix"), D.dim()));
}

Json operator_json(const LinearOperator& u) {
  Json j = {{"codomain", codomain_json(u.codomain())}, {"matrix", json_rows(u.matrix())}};
  if (u.domain_is_free()) {
    j["space"] = space_json(*u.free_domain());
  } else {
    j["domain"] = normed_json(u.normed_domain());
  }
  return j;
}

std::string dump_deterministic(const Json& j) {
  std::string out;
  dump_into(j, out, 0);
  out += "\n";
  return out;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw InputError("'" + path + "' is not valid JSON: " + e.what());
  }
}

}  // namespace lipnorm
