#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tstruct/complex.hpp"
#include "tstruct/errors.hpp"
#include "tstruct/field.hpp"
#include "tstruct/matrix.hpp"
#include "tstruct/sheaf.hpp"
#include "tstruct/space.hpp"
#include "tstruct/support.hpp"

namespace tstruct::jsonio {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Small helpers

inline int parse_int_key(const std::string& s, const char* what) {
  try {
    size_t used = 0;
    int v = std::stoi(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ValidationError(std::string(what) + ": bad integer key '" + s + "'");
  }
}

inline json parse_text(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string(what) + ": invalid JSON (" + e.what() +
                          ")");
  }
}

inline json read_json_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in)
    throw ValidationError("cannot open file '" + file.string() + "'");
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return parse_text(text, file.string().c_str());
}

// ---------------------------------------------------------------------------
// Field specifications: "Q", "F2", or "Fp:<prime>"

struct FieldSpec {
  bool rational = false;
  uint32_t p = 0;

  static FieldSpec parse(const std::string& s) {
    if (s == "Q") return {true, 0};
    if (s == "F2") return {false, 2};
    if (s.rfind("Fp:", 0) == 0) {
      const std::string digits = s.substr(3);
      uint32_t v = uint32_t(parse_int_key(digits, "field"));
      PrimeField check(v);  // validates primality
      return {false, v};
    }
    throw ValidationError("unknown field '" + s +
                          "' (expected Q, F2, or Fp:<p>)");
  }

  std::string str() const {
    if (rational) return "Q";
    if (p == 2) return "F2";
    return "Fp:" + std::to_string(p);
  }
};

inline FieldSpec spec_of(const PrimeField& f) {
  return {false, f.characteristic()};
}
inline FieldSpec spec_of(const RationalField&) { return {true, 0}; }

/// Calls fn with a field object built from the FieldSpec.
template <class Fn>
void with_field(const FieldSpec& spec, Fn&& fn) {
  if (spec.rational)
    fn(RationalField{});
  else
    fn(PrimeField(spec.p));
}

// ---------------------------------------------------------------------------
// Spaces

inline SpacePtr space_from_json(const json& j) {
  if (!j.is_object() || !j.contains("points") || !j.contains("specializations"))
    throw ValidationError("space JSON needs 'points' and 'specializations'");
  std::vector<SpacePoint> points;
  for (const auto& pj : j.at("points")) {
    if (!pj.contains("id") || !pj.contains("codim") ||
        !pj.at("codim").is_number_integer())
      throw ValidationError("space point needs string 'id' and integer 'codim'");
    points.push_back({pj.at("id").get<std::string>(),
                      pj.at("codim").get<int>()});
  }
  std::vector<std::pair<std::string, std::string>> edges;
  for (const auto& ej : j.at("specializations")) {
    if (!ej.is_array() || ej.size() != 2)
      throw ValidationError("specialization edges are [generic, special] pairs");
    edges.emplace_back(ej.at(0).get<std::string>(),
                       ej.at(1).get<std::string>());
  }
  return std::make_shared<SpaceModel>(std::move(points), edges);
}

/// Canonical form: points in index order, covering edges only.
inline json space_to_json(const SpaceModel& s) {
  json points = json::array();
  for (int i = 0; i < s.n(); ++i)
    points.push_back({{"id", s.id(i)}, {"codim", s.codim(i)}});
  json edges = json::array();
  for (int a = 0; a < s.n(); ++a)
    for (int b = 0; b < s.n(); ++b) {
      if (!s.lt(a, b)) continue;
      bool covered = true;
      for (int c = 0; c < s.n(); ++c)
        if (s.lt(a, c) && s.lt(c, b)) covered = false;
      if (covered) edges.push_back(json::array({s.id(a), s.id(b)}));
    }
  return {{"points", points}, {"specializations", edges}};
}

inline SpacePtr load_space(const std::filesystem::path& file) {
  return space_from_json(read_json_file(file));
}

// ---------------------------------------------------------------------------
// Support data

inline SupportDatum datum_from_json(const json& j, SpacePtr space) {
  if (j.contains("p")) {
    const auto& pj = j.at("p");
    if (!pj.is_object())
      throw ValidationError("datum 'p' must map point ids to integers");
    std::vector<int> values(size_t(space->n()), 0);
    std::vector<bool> seen(size_t(space->n()), false);
    for (const auto& [id, vj] : pj.items()) {
      if (!vj.is_number_integer())
        throw ValidationError("datum value for '" + id +
                              "' must be an integer");
      int idx = space->index(id);
      values[size_t(idx)] = vj.get<int>();
      seen[size_t(idx)] = true;
    }
    for (int i = 0; i < space->n(); ++i)
      if (!seen[size_t(i)])
        throw ValidationError("datum gives no value for point '" +
                              space->id(i) + "'");
    return SupportDatum(std::move(space), std::move(values));
  }
  if (j.contains("levels")) {
    const auto& lj = j.at("levels");
    if (!lj.is_object())
      throw ValidationError("datum 'levels' must map integers to point lists");
    std::map<int, PointSet> levels;
    for (const auto& [key, arr] : lj.items()) {
      int n = parse_int_key(key, "datum level");
      PointSet pts(space->n());
      for (const auto& idj : arr) pts.add(space->index(idj.get<std::string>()));
      levels.emplace(n, std::move(pts));
    }
    std::optional<int> full_below;
    if (j.contains("full_below")) {
      if (!j.at("full_below").is_number_integer())
        throw ValidationError("'full_below' must be an integer");
      full_below = j.at("full_below").get<int>();
    }
    return SupportDatum::from_levels(std::move(space), levels, full_below);
  }
  throw ValidationError("datum JSON needs either 'p' or 'levels'");
}

/// Canonical form: the p-map keyed by point id (object keys sort).
inline json datum_to_json(const SupportDatum& d) {
  json p = json::object();
  const auto& s = *d.space();
  for (int i = 0; i < s.n(); ++i) p[s.id(i)] = d.p(i);
  return {{"p", p}};
}

struct LoadedDatum {
  SpacePtr space;
  SupportDatum datum;
};

/// Resolves a path found inside a JSON file relative to that file.
inline std::filesystem::path resolve_sibling(
    const std::filesystem::path& referrer, const std::string& target) {
  std::filesystem::path t(target);
  if (t.is_absolute()) return t;
  return referrer.parent_path() / t;
}

inline LoadedDatum load_datum(const std::filesystem::path& file) {
  json j = read_json_file(file);
  if (!j.contains("space") || !j.at("space").is_string())
    throw ValidationError("datum file needs a 'space' path");
  auto space = load_space(resolve_sibling(file, j.at("space").get<std::string>()));
  auto datum = datum_from_json(j, space);
  return {std::move(space), std::move(datum)};
}

// ---------------------------------------------------------------------------
// Field elements and matrices

inline typename PrimeField::Elem elem_from_json(const PrimeField& f,
                                                const json& v) {
  if (!v.is_number_integer())
    throw ValidationError("matrix entries must be integers");
  return f.from_int(v.get<long long>());
}

inline typename RationalField::Elem elem_from_json(const RationalField& f,
                                                   const json& v) {
  if (v.is_number_integer()) return f.from_int(v.get<long long>());
  if (v.is_string()) return f.from_string(v.get<std::string>());
  throw ValidationError(
      "matrix entries must be integers (or \"a/b\" strings over Q)");
}

inline json elem_to_json(const PrimeField&, PrimeField::Elem e) {
  return json(e);
}

inline json elem_to_json(const RationalField&, const RationalField::Elem& e) {
  if (boost::multiprecision::denominator(e) == 1)
    return json(boost::multiprecision::numerator(e).convert_to<long long>());
  return json(e.str());
}

template <class F>
Matrix<F> matrix_from_json(const F& field, int rows, int cols, const json& j) {
  if (!j.is_array() || int(j.size()) != rows)
    throw ValidationError("matrix literal has the wrong number of rows");
  Matrix<F> m(field, rows, cols);
  for (int r = 0; r < rows; ++r) {
    const auto& row = j.at(size_t(r));
    if (!row.is_array() || int(row.size()) != cols)
      throw ValidationError("matrix literal has the wrong number of columns");
    for (int c = 0; c < cols; ++c)
      m.at(r, c) = elem_from_json(field, row.at(size_t(c)));
  }
  return m;
}

template <class F>
json matrix_to_json(const Matrix<F>& m) {
  json rows = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < m.cols(); ++c)
      row.push_back(elem_to_json(m.field(), m.at(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Sheaves and complexes

/// One term object: {"stalks": {id: dim}, "transitions": {"a->b": rows}}.
/// Stalks omitted from the object are zero.  A transition may be omitted
/// only when one of its endpoints has a zero stalk.
template <class F>
Sheaf<F> sheaf_from_json(const json& j, SpacePtr space, const F& field) {
  if (!j.is_object() || !j.contains("stalks"))
    throw ValidationError("sheaf term needs 'stalks'");
  const SpaceModel& s = *space;
  std::vector<int> dims(size_t(s.n()), 0);
  for (const auto& [id, dj] : j.at("stalks").items()) {
    if (!dj.is_number_integer() || dj.template get<int>() < 0)
      throw ValidationError("stalk dimension for '" + id +
                            "' must be a non-negative integer");
    dims[size_t(s.index(id))] = dj.template get<int>();
  }
  std::map<std::pair<int, int>, Matrix<F>> rho;
  std::map<std::pair<int, int>, json> given;
  if (j.contains("transitions"))
    for (const auto& [key, mj] : j.at("transitions").items()) {
      auto arrow = key.find("->");
      if (arrow == std::string::npos)
        throw ValidationError("transition key '" + key +
                              "' is not of the form a->b");
      int from = s.index(key.substr(0, arrow));
      int to = s.index(key.substr(arrow + 2));
      given.emplace(std::make_pair(from, to), mj);
    }
  for (int p = 0; p < s.n(); ++p)
    for (int q = 0; q < s.n(); ++q) {
      if (!s.lt(q, p)) continue;
      auto it = given.find({p, q});
      if (it != given.end()) {
        rho.emplace(std::make_pair(p, q),
                    matrix_from_json(field, dims[size_t(q)], dims[size_t(p)],
                                     it->second));
        given.erase(it);
      } else if (dims[size_t(p)] == 0 || dims[size_t(q)] == 0) {
        rho.emplace(std::make_pair(p, q),
                    Matrix<F>(field, dims[size_t(q)], dims[size_t(p)]));
      } else {
        throw ValidationError("missing transition " + s.id(p) + "->" +
                              s.id(q));
      }
    }
  if (!given.empty())
    throw ValidationError("transition between non-specializing points '" +
                          s.id(given.begin()->first.first) + "->" +
                          s.id(given.begin()->first.second) + "'");
  return Sheaf<F>(std::move(space), field, std::move(dims), std::move(rho));
}

template <class F>
json sheaf_to_json(const Sheaf<F>& f) {
  const SpaceModel& s = *f.space();
  json stalks = json::object();
  for (int p = 0; p < s.n(); ++p) stalks[s.id(p)] = f.dim(p);
  json transitions = json::object();
  for (int p = 0; p < s.n(); ++p)
    for (int q = 0; q < s.n(); ++q)
      if (s.lt(q, p) && f.dim(p) > 0 && f.dim(q) > 0)
        transitions[s.id(p) + "->" + s.id(q)] =
            matrix_to_json(f.transition(p, q));
  return {{"stalks", stalks}, {"transitions", transitions}};
}

/// Complex object: {"field": spec, "terms": {degree: term}, "differentials":
/// {degree: {id: rows}}}.  Missing degrees between the extremes are zero
/// terms; a differential component may be omitted only when its source or
/// target stalk is zero.
template <class F>
ChainComplex<F> complex_from_json(const json& j, SpacePtr space,
                                  const F& field) {
  if (!j.is_object() || !j.contains("terms"))
    throw ValidationError("complex JSON needs 'terms'");
  if (j.contains("field")) {
    FieldSpec spec = FieldSpec::parse(j.at("field").get<std::string>());
    if (spec.rational != (field.characteristic() == 0) ||
        (!spec.rational && spec.p != field.characteristic()))
      throw ValidationError("complex field '" + spec.str() +
                            "' does not match the requested field");
  }
  const SpaceModel& s = *space;
  std::map<int, json> terms_j;
  for (const auto& [key, tj] : j.at("terms").items())
    terms_j.emplace(parse_int_key(key, "complex degree"), tj);
  if (terms_j.empty()) return ChainComplex<F>::zero_complex(space, field);
  int lo = terms_j.begin()->first;
  int hi = terms_j.rbegin()->first;
  std::vector<Sheaf<F>> terms;
  for (int k = lo; k <= hi; ++k) {
    auto it = terms_j.find(k);
    terms.push_back(it == terms_j.end()
                        ? Sheaf<F>::zero(space, field)
                        : sheaf_from_json(it->second, space, field));
  }
  json diffs_j = j.contains("differentials") ? j.at("differentials")
                                             : json::object();
  std::vector<Morphism<F>> diffs;
  for (int k = lo; k < hi; ++k) {
    const Sheaf<F>& src = terms[size_t(k - lo)];
    const Sheaf<F>& dst = terms[size_t(k - lo + 1)];
    json dj = diffs_j.contains(std::to_string(k))
                  ? diffs_j.at(std::to_string(k))
                  : json::object();
    std::vector<Matrix<F>> mats;
    for (int p = 0; p < s.n(); ++p) {
      if (dj.contains(s.id(p))) {
        mats.push_back(
            matrix_from_json(field, dst.dim(p), src.dim(p), dj.at(s.id(p))));
      } else if (src.dim(p) == 0 || dst.dim(p) == 0) {
        mats.push_back(Matrix<F>(field, dst.dim(p), src.dim(p)));
      } else {
        throw ValidationError("missing differential component at degree " +
                              std::to_string(k) + ", point '" + s.id(p) + "'");
      }
    }
    diffs.emplace_back(src, dst, std::move(mats));
  }
  return ChainComplex<F>(lo, std::move(terms), std::move(diffs));
}

template <class F>
json complex_to_json(const ChainComplex<F>& c) {
  json terms = json::object();
  json diffs = json::object();
  const SpaceModel& s = *c.space();
  for (int k = c.lo(); k <= c.hi(); ++k)
    terms[std::to_string(k)] = sheaf_to_json(c.term(k));
  for (int k = c.lo(); k < c.hi(); ++k) {
    json comps = json::object();
    auto d = c.diff(k);
    for (int p = 0; p < s.n(); ++p)
      if (d.src().dim(p) > 0 && d.dst().dim(p) > 0)
        comps[s.id(p)] = matrix_to_json(d.at(p));
    diffs[std::to_string(k)] = std::move(comps);
  }
  return {{"field", spec_of(c.field()).str()},
          {"terms", terms},
          {"differentials", diffs}};
}

struct LoadedComplexFile {
  SpacePtr space;
  FieldSpec field;
  json body;
};

/// Reads a complex file far enough to know its space and field; the body is
/// converted by complex_from_json under a with_field dispatch.
inline LoadedComplexFile load_complex_file(const std::filesystem::path& file) {
  json j = read_json_file(file);
  if (!j.contains("space") || !j.at("space").is_string())
    throw ValidationError("complex file needs a 'space' path");
  if (!j.contains("field") || !j.at("field").is_string())
    throw ValidationError("complex file needs a 'field' spec");
  auto space = load_space(resolve_sibling(file, j.at("space").get<std::string>()));
  auto field = FieldSpec::parse(j.at("field").get<std::string>());
  return {std::move(space), field, std::move(j)};
}

}  // namespace tstruct::jsonio
