#include "polyball/io.hpp"

#include <fstream>
#include <sstream>

#include "polyball/errors.hpp"

namespace polyball {

namespace {

[[noreturn]] void schema(const std::string& msg) { fail(ErrorKind::parse_error, msg); }

const Json& field(const Json& j, const char* key, const std::string& ctx) {
  if (!j.is_object()) schema(ctx + ": expected an object");
  const auto it = j.find(key);
  if (it == j.end()) schema(ctx + ": missing field \"" + key + "\"");
  return *it;
}

template <class T>
T get(const Json& j, const char* key, const std::string& ctx) {
  try {
    return field(j, key, ctx).get<T>();
  } catch (const nlohmann::json::exception& e) {
    schema(ctx + ": field \"" + key + "\" has the wrong type");
  }
}

template <class T>
T get_or(const Json& j, const char* key, T fallback, const std::string& ctx) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  return get<T>(j, key, ctx);
}

cplx scalar_from_json(const Json& v) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return {v[0].get<double>(), v[1].get<double>()};
  schema("matrix entry must be a number or a [re, im] pair");
}

Json scalar_to_json(cplx z) { return Json::array({z.real(), z.imag()}); }

MultiDegree degree_from_json(const Json& j, const std::string& ctx) {
  try {
    return MultiDegree(j.get<std::vector<int>>());
  } catch (const nlohmann::json::exception&) {
    schema(ctx + ": multidegree must be an integer array");
  }
}

std::string model_name(FockModel m) { return to_string(m); }

}  // namespace

Json parse_json(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    // the message already carries "line L, column C"
    fail(ErrorKind::parse_error, source + ": " + e.what());
  }
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::parse_error, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_json(ss.str(), path);
}

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(scalar_to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const Json& j, Eigen::Index rows, Eigen::Index cols) {
  if (!j.is_array()) schema("matrix must be an array");
  // flat row-major lists start with a scalar; nested rows start with a row
  const bool pair0 = !j.empty() && j[0].is_array() && j[0].size() == 2 && j[0][0].is_number() && j[0][1].is_number();
  const auto size = static_cast<Eigen::Index>(j.size());
  const bool sized = rows >= 0 && cols >= 0 && size == rows * cols && size > 0;
  const bool flat = sized && ((!j.empty() && j[0].is_number()) || (pair0 && !(size == rows && cols == 2)));
  if (flat) {
    Matrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = scalar_from_json(j[static_cast<std::size_t>(r * cols + c)]);
    return m;
  }
  const auto r = static_cast<Eigen::Index>(j.size());
  const Eigen::Index c = r == 0 ? std::max<Eigen::Index>(cols, 0) : static_cast<Eigen::Index>(j[0].is_array() ? j[0].size() : 0);
  if (rows >= 0 && r != rows) schema("matrix has " + std::to_string(r) + " rows, expected " + std::to_string(rows));
  if (cols >= 0 && c != cols) schema("matrix has " + std::to_string(c) + " columns, expected " + std::to_string(cols));
  Matrix m(r, c);
  for (Eigen::Index a = 0; a < r; ++a) {
    const Json& row = j[static_cast<std::size_t>(a)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != c) schema("matrix rows must have equal length");
    for (Eigen::Index b = 0; b < c; ++b) m(a, b) = scalar_from_json(row[static_cast<std::size_t>(b)]);
  }
  return m;
}

Json tuple_to_json(const OperatorTuple& t) {
  Json factors = Json::array();
  for (int i = 0; i < t.k(); ++i) {
    Json f = Json::array();
    for (const auto& m : t.factor(i)) f.push_back(matrix_to_json(m));
    factors.push_back(std::move(f));
  }
  return Json{{"n", t.n()}, {"dimH", t.dimH()}, {"factors", std::move(factors)}};
}

OperatorTuple tuple_from_json(const Json& j) {
  const auto n = get<std::vector<int>>(j, "n", "tuple");
  const int d = get<int>(j, "dimH", "tuple");
  const Json& fs = field(j, "factors", "tuple");
  if (!fs.is_array() || fs.size() != n.size()) schema("tuple: need one factor list per entry of n");
  std::vector<std::vector<Matrix>> factors(n.size());
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (!fs[i].is_array() || static_cast<int>(fs[i].size()) != n[i])
      schema("tuple: factor " + std::to_string(i + 1) + " needs " + std::to_string(n[i]) + " matrices");
    for (const auto& m : fs[i]) factors[i].push_back(matrix_from_json(m, d, d));
  }
  return OperatorTuple(n, d, std::move(factors));
}

FockModel model_from_string(const std::string& s) {
  if (s == "full") return FockModel::full;
  if (s == "symmetric") return FockModel::symmetric;
  fail(ErrorKind::parse_error, "unknown model: " + s);
}

namespace {

Json profile_to_json(const FactorProfile& p) {
  Json j{{"kind", to_string(p.kind)}, {"n", p.n}, {"coeff_dim", p.coeff_dim}};
  if (!p.words.empty()) j["words"] = p.words;
  if (p.kind == FactorProfile::Kind::min_length) j["min_length"] = p.min_length;
  if (p.expansion)
    j["expansion"] = Json{{"base", p.expansion->base},
                          {"target", p.expansion->target},
                          {"exponents", p.expansion->exponents},
                          {"digits", p.expansion->digits}};
  return j;
}

FactorProfile profile_from_json(const Json& j, FockModel model) {
  FactorProfile p;
  p.kind = profile_kind_from_string(get<std::string>(j, "kind", "factor"));
  p.n = get<int>(j, "n", "factor");
  p.coeff_dim = get_or<int>(j, "coeff_dim", 1, "factor");
  p.model = model;
  p.words = get_or<std::vector<std::vector<int>>>(j, "words", {}, "factor");
  p.min_length = get_or<int>(j, "min_length", 0, "factor");
  if (j.contains("expansion")) {
    const Json& e = j["expansion"];
    NAdicExpansion x;
    x.base = get<int>(e, "base", "expansion");
    x.target = get<double>(e, "target", "expansion");
    x.exponents = get<std::vector<int>>(e, "exponents", "expansion");
    x.digits = get<std::vector<int>>(e, "digits", "expansion");
    p.expansion = x;
  }
  return p;
}

bool is_layer_grouping(const GradedSubspace& s) {
  const auto& ft = s.truncation();
  for (std::size_t g = 0; g < s.groups().size(); ++g) {
    const auto& grp = s.groups()[g];
    if (grp.empty()) return false;
    const int m = ft.grades()[grp.front()].total();
    std::size_t count = 0;
    for (int a = 0; a < ft.grade_count(); ++a)
      if (ft.grades()[a].total() == m) ++count;
    if (count != grp.size()) return false;
    for (int a : grp)
      if (ft.grades()[a].total() != m) return false;
  }
  return true;
}

std::vector<int> int_list(const Json& j, const char* key, const std::string& ctx) {
  const Json& v = field(j, key, ctx);
  if (v.is_number_integer()) return {v.get<int>()};
  return get<std::vector<int>>(j, key, ctx);
}

}  // namespace

Json subspace_to_json(const GradedSubspace& s) {
  Json j{{"mode", s.mode() == GradedSubspace::Mode::structured ? "structured" : "basis"},
         {"model", model_name(s.model())},
         {"kind", s.label()},
         {"n", s.n()},
         {"caps", s.caps()}};
  if (s.mode() == GradedSubspace::Mode::structured) {
    j["min_total"] = s.min_total();
    Json fs = Json::array();
    for (const auto& p : s.profiles()) fs.push_back(profile_to_json(p));
    j["factors"] = std::move(fs);
    return j;
  }
  const auto& ft = s.truncation();
  j["max_total"] = ft.max_total();
  j["coeff_dim"] = ft.coeff_dim();
  bool single = true;
  for (const auto& g : s.groups()) single = single && g.size() == 1;
  if (single) {
    Json gs = Json::array();
    for (std::size_t g = 0; g < s.groups().size(); ++g)
      gs.push_back(Json{{"q", ft.grades()[s.groups()[g][0]].values()}, {"basis", matrix_to_json(s.bases()[g])}});
    j["grades"] = std::move(gs);
  } else if (is_layer_grouping(s)) {
    Json ls = Json::array();
    for (std::size_t g = 0; g < s.groups().size(); ++g)
      ls.push_back(Json{{"m", ft.grades()[s.groups()[g][0]].total()}, {"basis", matrix_to_json(s.bases()[g])}});
    j["layers"] = std::move(ls);
  } else {
    Json gs = Json::array();
    for (std::size_t g = 0; g < s.groups().size(); ++g) {
      Json qs = Json::array();
      for (int a : s.groups()[g]) qs.push_back(ft.grades()[a].values());
      gs.push_back(Json{{"grades", std::move(qs)}, {"basis", matrix_to_json(s.bases()[g])}});
    }
    j["groups"] = std::move(gs);
  }
  return j;
}

GradedSubspace subspace_from_json(const Json& j) {
  const std::string ctx = "subspace";
  const std::string mode = get<std::string>(j, "mode", ctx);
  const FockModel model = model_from_string(get_or<std::string>(j, "model", "full", ctx));
  if (mode == "structured") {
    const std::string kind = get_or<std::string>(j, "kind", "", ctx);
    if (j.contains("factors")) {
      std::vector<FactorProfile> ps;
      for (const auto& f : field(j, "factors", ctx)) ps.push_back(profile_from_json(f, model));
      return GradedSubspace::structured(std::move(ps), get<std::vector<int>>(j, "caps", ctx),
                                        get_or<int>(j, "min_total", 0, ctx), kind.empty() ? "structured" : kind);
    }
    if (kind == "mt") {
      const auto exp = construct_nadic(int_list(j, "n", ctx).at(0), get<double>(j, "t", ctx),
                                       get_or<int>(j, "terms", 20, ctx));
      return construct_Mt(exp, int_list(j, "caps", ctx).at(0));
    }
    if (kind == "tensor") {
      std::vector<GradedSubspace> parts;
      for (const auto& p : field(j, "parts", ctx)) parts.push_back(subspace_from_json(p));
      return tensor_subspace(parts);
    }
    if (kind == "cur0") return cur0_subspace(int_list(j, "n", ctx), int_list(j, "caps", ctx));
    if (kind == "uncountable")
      return uncountable_family(get<double>(j, "t", ctx), get<double>(j, "omega", ctx), int_list(j, "n", ctx),
                                int_list(j, "caps", ctx), get_or<int>(j, "terms", 20, ctx));
    if (kind == "finite_codim")
      return finite_codim_subspace(model, int_list(j, "n", ctx), int_list(j, "caps", ctx), get<int>(j, "L", ctx),
                                   get_or<int>(j, "coeff_dim", 1, ctx));
    if (kind == "zero")
      return zero_subspace(model, int_list(j, "n", ctx), int_list(j, "caps", ctx), get_or<int>(j, "coeff_dim", 1, ctx));
    if (kind == "full")
      return full_subspace(model, int_list(j, "n", ctx), int_list(j, "caps", ctx), get_or<int>(j, "coeff_dim", 1, ctx));
    if (kind == "monomial")
      return monomial_subspace(int_list(j, "n", ctx), int_list(j, "caps", ctx), get_or<int>(j, "factor", 0, ctx),
                               get<std::vector<std::vector<int>>>(j, "suffixes", ctx));
    if (kind == "monomial_ideal")
      return monomial_ideal_subspace(int_list(j, "n", ctx), int_list(j, "caps", ctx), get_or<int>(j, "factor", 0, ctx),
                                     get<std::vector<std::vector<int>>>(j, "generators", ctx));
    schema(ctx + ": unknown structured kind \"" + kind + "\"");
  }
  if (mode == "generated") {
    std::vector<std::vector<GeneratorTerm>> gens;
    for (const auto& g : field(j, "generators", ctx)) {
      std::vector<GeneratorTerm> terms;
      for (const auto& t : g) {
        GeneratorTerm term;
        term.grade = degree_from_json(field(t, "q", "generator term"), "generator term");
        term.index = get<std::uint64_t>(t, "index", "generator term");
        term.e = get_or<int>(t, "e", 0, "generator term");
        term.value = scalar_from_json(field(t, "value", "generator term"));
        terms.push_back(term);
      }
      gens.push_back(std::move(terms));
    }
    return generated_subspace(model, int_list(j, "n", ctx), get<int>(j, "L", ctx), get_or<int>(j, "coeff_dim", 1, ctx),
                              gens);
  }
  if (mode == "basis") {
    FockTruncation ft(Shape(int_list(j, "n", ctx), int_list(j, "caps", ctx)), get_or<int>(j, "coeff_dim", 1, ctx), model,
                      get_or<int>(j, "max_total", -1, ctx));
    std::vector<std::vector<int>> groups;
    std::vector<Matrix> bases;
    auto rows_of = [&](const std::vector<int>& grp) {
      Eigen::Index r = 0;
      for (int a : grp) r += ft.block_dim(a);
      return r;
    };
    auto grade_of = [&](const Json& q) {
      const int a = ft.grade_index(degree_from_json(q, ctx));
      if (a < 0) schema(ctx + ": grade outside the truncation");
      return a;
    };
    if (j.contains("grades")) {
      for (const auto& g : j["grades"]) groups.push_back({grade_of(field(g, "q", ctx))});
    } else if (j.contains("layers")) {
      for (const auto& l : j["layers"]) {
        const int m = get<int>(l, "m", ctx);
        std::vector<int> grp;
        for (int a = 0; a < ft.grade_count(); ++a)
          if (ft.grades()[a].total() == m) grp.push_back(a);
        groups.push_back(std::move(grp));
      }
    } else if (j.contains("groups")) {
      for (const auto& g : j["groups"]) {
        std::vector<int> grp;
        for (const auto& q : field(g, "grades", ctx)) grp.push_back(grade_of(q));
        groups.push_back(std::move(grp));
      }
    } else {
      schema(ctx + ": basis mode needs \"grades\", \"layers\" or \"groups\"");
    }
    const Json& list = j.contains("grades") ? j["grades"] : j.contains("layers") ? j["layers"] : j["groups"];
    for (std::size_t g = 0; g < groups.size(); ++g)
      bases.push_back(matrix_from_json(field(list[g], "basis", ctx), rows_of(groups[g])));
    return GradedSubspace::materialized(std::move(ft), std::move(groups), std::move(bases),
                                        get_or<std::string>(j, "kind", "basis", ctx));
  }
  schema(ctx + ": unknown mode \"" + mode + "\"");
}

Json multiplier_to_json(const InnerMultiplier& psi) {
  Json blocks = Json::array();
  for (const auto& [s, m] : psi.coeffs)
    blocks.push_back(Json{{"source", std::vector<int>(psi.n.size(), 0)}, {"target", s.values()}, {"matrix", matrix_to_json(m)}});
  return Json{{"model", model_name(psi.model)},   {"n", psi.n},
              {"source_dim", psi.source_dim},     {"target_dim", psi.target_dim},
              {"isometric", psi.isometric},       {"blocks", std::move(blocks)}};
}

InnerMultiplier multiplier_from_json(const Json& j) {
  const std::string ctx = "multiplier";
  InnerMultiplier psi;
  psi.model = model_from_string(get_or<std::string>(j, "model", "full", ctx));
  psi.n = int_list(j, "n", ctx);
  psi.source_dim = get<int>(j, "source_dim", ctx);
  psi.target_dim = get<int>(j, "target_dim", ctx);
  psi.isometric = get_or<bool>(j, "isometric", false, ctx);
  const Shape shape = Shape::uncapped(psi.n);
  for (const auto& b : field(j, "blocks", ctx)) {
    if (b.contains("source")) {
      const auto src = degree_from_json(b["source"], ctx);
      if (src.total() != 0) schema(ctx + ": only blocks with source multidegree 0 are supported");
    }
    const auto s = degree_from_json(field(b, "target", ctx), ctx);
    if (s.k() != static_cast<int>(psi.n.size())) schema(ctx + ": target multidegree has the wrong length");
    std::uint64_t gd = 1;
    for (int i = 0; i < s.k(); ++i)
      gd *= psi.model == FockModel::full ? checked_pow(psi.n[i], s[i]) : binomial(s[i] + psi.n[i] - 1, psi.n[i] - 1);
    const Matrix m = matrix_from_json(field(b, "matrix", ctx), static_cast<Eigen::Index>(gd) * psi.target_dim, psi.source_dim);
    if (psi.coeffs.count(s)) schema(ctx + ": duplicate block for " + s.str());
    psi.coeffs.emplace(s, m);
  }
  return psi;
}

}  // namespace polyball
