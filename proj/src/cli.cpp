#include "polyball/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <sstream>

#include "polyball/curvature.hpp"
#include "polyball/errors.hpp"
#include "polyball/io.hpp"
#include "polyball/symmetric.hpp"

namespace polyball {

namespace {

struct RunConfig {
  std::string input;
  std::string theta;
  std::string out;
  std::vector<int> caps;
  int q_max = 6;
  double tol = -1.0;
  std::string formula = "ratio";
  std::string format = "json";
  std::string model = "full";
  int threads = 0;
  bool extrapolate = false;
  int kernel_cap = 3;
  // construct parameters
  std::vector<int> n;
  double t = 0.5;
  double omega = 0.875;
  int terms = 20;
  int L = 1;
  int coeff_dim = 1;
  int factor = 0;
  std::vector<std::string> suffixes;
  std::string generators;
  std::vector<std::string> parts;
};

Tolerances tolerances(const RunConfig& c) {
  Tolerances tol = default_tolerances();
  if (c.tol > 0) tol.psd = c.tol;
  return tol;
}

Json sequence(const std::vector<double>& v, std::size_t from = 0) {
  Json a = Json::array();
  for (std::size_t i = from; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Json estimate_json(const CurvEstimate& est, const char* value_name) {
  Json grades = Json::array();
  for (std::size_t g = 0; g < est.grades.size(); ++g)
    grades.push_back(Json{{"q", est.grades[g].values()}, {value_name, est.grade_values[g]}});
  Json j{{"estimate", est.estimate},
         {"error_proxy", est.error_proxy},
         {"monotone_ok", est.monotone_ok},
         {"corner_seq", sequence(est.corner_seq)},
         {"cesaro_seq", sequence(est.cesaro_seq)},
         {"defect_product_seq", sequence(est.defect_product_seq)},
         {"grades", std::move(grades)},
         {"caveats", est.caveats}};
  if (est.extrapolated) j["extrapolated"] = *est.extrapolated;
  return j;
}

std::vector<int> caps_or(const RunConfig& c, int k, int fallback) {
  if (c.caps.empty()) return std::vector<int>(k, fallback);
  if (c.caps.size() == 1) return std::vector<int>(k, c.caps[0]);
  if (static_cast<int>(c.caps.size()) != k) fail(ErrorKind::invalid_argument, "--caps needs one value per factor");
  return c.caps;
}

void emit(const RunConfig& c, const std::string& text, std::ostream& out) {
  if (c.out.empty()) {
    out << text;
    return;
  }
  std::ofstream f(c.out);
  if (!f) fail(ErrorKind::invalid_argument, "cannot write " + c.out);
  f << text;
}

GradedSubspace load_subspace(const std::string& path) {
  if (path.empty()) fail(ErrorKind::invalid_argument, "--input is required");
  return subspace_from_json(read_json_file(path));
}

// membership failure is reported with the offending p before anything else runs
int require_member(const OperatorTuple& t, const RunConfig& c, std::ostream& err) {
  const auto v = check_polyball(t, tolerances(c));
  if (v.member) return 0;
  err << dump_json(Json{{"error", "not_in_polyball"}, {"worst_p", v.worst_p}, {"worst_eig", v.worst_eig}});
  return 2;
}

double selected(const RunConfig& c, const CurvEstimate& est, const Json& formulas) {
  const std::string key = c.formula == "defect-product" ? "defect_product"
                          : c.formula == "operator-trace" ? "operator_trace"
                                                          : c.formula;
  if (!formulas.contains(key)) fail(ErrorKind::invalid_argument, "unknown formula " + c.formula);
  (void)est;
  return formulas[key].get<double>();
}

Json formulas_for(const RunConfig& c, const OperatorTuple& t, const CurvEstimate& est, FockModel model) {
  Json f{{"ratio", est.corner_seq.back()},
         {"cesaro", est.cesaro_seq.back()},
         {"defect_product", est.defect_product_seq.back()}};
  if (c.formula == "operator-trace") {
    KernelOptions ko;
    ko.model = model;
    const auto kb = berezin_kernel(t, caps_or(c, t.k(), c.q_max + 1), ko);
    f["operator_trace"] = curvature_operator_trace(kb, MultiDegree::constant(t.k(), c.q_max)).operator_route;
  }
  return f;
}

// a subspace file stands for the compression of S x I to its complement
int cmd_curv_subspace(const Json& input, const RunConfig& c, bool commutative, std::ostream& out) {
  const GradedSubspace sub = subspace_from_json(input);
  if (commutative != (sub.model() == FockModel::symmetric))
    fail(ErrorKind::invalid_argument, commutative ? "curv-c needs a symmetric subspace" : "curv needs a full-model subspace");
  const auto est = subspace_curvature(sub, c.q_max);
  if (c.format == "csv") {
    std::ostringstream ss;
    write_csv(ss, est);
    emit(c, ss.str(), out);
    return 0;
  }
  const Json formulas{{"ratio", est.corner_seq.back()},
                      {"cesaro", est.cesaro_seq.back()},
                      {"defect_product", est.defect_product_seq.back()}};
  Json j{{"command", commutative ? "curv-c" : "curv"}, {"model", to_string(sub.model())}, {"kind", sub.label()},
         {"n", sub.n()}, {"q_max", c.q_max}, {"formula", c.formula}, {"value", selected(c, est, formulas)}};
  j.update(estimate_json(est, "x"));
  j["formulas"] = formulas;
  emit(c, dump_json(j), out);
  return 0;
}

Json load_input(const RunConfig& c) {
  if (c.input.empty()) fail(ErrorKind::invalid_argument, "--input is required");
  return read_json_file(c.input);
}

int cmd_curv(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const Json input = load_input(c);
  if (input.contains("mode")) return cmd_curv_subspace(input, c, false, out);
  const OperatorTuple t = tuple_from_json(input);
  if (int code = require_member(t, c, err)) return code;
  EstimateOptions eo;
  eo.extrapolate = c.extrapolate;
  const auto est = curvature_estimate(t, c.q_max, eo);
  const auto bounds = bounds_report(t, est);
  if (c.format == "csv") {
    std::ostringstream ss;
    write_csv(ss, est);
    emit(c, ss.str(), out);
    return 0;
  }
  const Json formulas = formulas_for(c, t, est, FockModel::full);
  Json j{{"command", "curv"}, {"model", "full"}, {"n", t.n()}, {"q_max", c.q_max}, {"formula", c.formula},
         {"value", selected(c, est, formulas)}};
  j.update(estimate_json(est, "x"));
  j["formulas"] = formulas;
  j["formula_spread"] = est.formula_spread;
  j["bounds"] = Json{{"lower", bounds.lower}, {"curvature", bounds.curvature}, {"trace_defect", bounds.trace_defect},
                     {"rank", bounds.rank}};
  emit(c, dump_json(j), out);
  return 0;
}

int cmd_curvc(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const Json input = load_input(c);
  if (input.contains("mode")) return cmd_curv_subspace(input, c, true, out);
  const OperatorTuple t = tuple_from_json(input);
  if (int code = require_member(t, c, err)) return code;
  CurvCOptions co;
  co.extrapolate = c.extrapolate;
  co.kernel_cap = c.kernel_cap;
  const auto rep = curv_c_estimate(t, c.q_max, co);
  const auto& est = rep.estimate;
  if (c.format == "csv") {
    std::ostringstream ss;
    write_csv(ss, est);
    emit(c, ss.str(), out);
    return 0;
  }
  const Json formulas = formulas_for(c, t, est, FockModel::symmetric);
  Json j{{"command", "curv-c"}, {"model", "symmetric"}, {"n", t.n()}, {"q_max", c.q_max}, {"formula", c.formula},
         {"value", selected(c, est, formulas)}};
  j.update(estimate_json(est, "x"));
  j["formulas"] = formulas;
  j["arveson_seq"] = sequence(est.arveson_seq, 1);
  j["characteristic"] = Json{{"checked", rep.characteristic_checked}, {"verdict", rep.has_characteristic},
                             {"min_eig", rep.characteristic_min_eig}};
  emit(c, dump_json(j), out);
  return 0;
}

int cmd_mult(const RunConfig& c, std::ostream& out) {
  const GradedSubspace sub = load_subspace(c.input);
  const auto rep = sub.model() == FockModel::symmetric ? m_c_estimate(sub, c.q_max) : multiplicity_estimate(sub, c.q_max);
  if (c.format == "csv") {
    std::ostringstream ss;
    write_csv(ss, rep.multiplicity);
    emit(c, ss.str(), out);
    return 0;
  }
  Json j{{"command", "mult"}, {"model", to_string(sub.model())}, {"kind", sub.label()}, {"n", sub.n()},
         {"q_max", c.q_max}, {"estimate", rep.estimate}};
  j["multiplicity"] = estimate_json(rep.multiplicity, "y");
  j["compression_curvature"] = estimate_json(rep.compression, "x");
  j["route_residual"] = rep.route_residual;
  j["complement_exact"] = rep.complement_exact;
  j["complement_residual"] = rep.complement_residual;
  j["invariance_residual"] = rep.invariance_residual;
  emit(c, dump_json(j), out);
  return 0;
}

std::vector<std::vector<int>> parse_words(const std::vector<std::string>& items) {
  std::vector<std::vector<int>> words;
  for (const auto& s : items) {
    std::vector<int> w;
    for (char ch : s) {
      if (ch < '1' || ch > '9') fail(ErrorKind::invalid_argument, "suffix words are strings of letters 1-9: " + s);
      w.push_back(ch - '0');
    }
    words.push_back(std::move(w));
  }
  return words;
}

// "1,0;0,2" -> {{1,0},{0,2}}
std::vector<std::vector<int>> parse_exponents(const std::string& s) {
  std::vector<std::vector<int>> out;
  std::stringstream rows(s);
  std::string row;
  while (std::getline(rows, row, ';')) {
    std::vector<int> a;
    std::stringstream cells(row);
    std::string cell;
    while (std::getline(cells, cell, ',')) a.push_back(std::stoi(cell));
    out.push_back(std::move(a));
  }
  return out;
}

int cmd_construct(const std::string& kind, const RunConfig& c, std::ostream& out) {
  const FockModel model = model_from_string(c.model);
  auto need_n = [&]() {
    if (c.n.empty()) fail(ErrorKind::invalid_argument, "--n is required");
    return c.n;
  };
  GradedSubspace sub;
  if (kind == "mt") {
    sub = construct_Mt(construct_nadic(need_n()[0], c.t, c.terms), caps_or(c, 1, 8)[0]);
  } else if (kind == "tensor") {
    std::vector<GradedSubspace> parts;
    for (const auto& p : c.parts) parts.push_back(load_subspace(p));
    sub = tensor_subspace(parts);
  } else if (kind == "cur0") {
    sub = cur0_subspace(need_n(), caps_or(c, static_cast<int>(need_n().size()), 8));
  } else if (kind == "uncountable") {
    const auto n = c.n.empty() ? std::vector<int>{2, 2} : c.n;
    sub = uncountable_family(c.t, c.omega, n, caps_or(c, static_cast<int>(n.size()), 8), c.terms);
  } else if (kind == "finite_codim") {
    sub = finite_codim_subspace(model, need_n(), caps_or(c, static_cast<int>(need_n().size()), 8), c.L, c.coeff_dim);
  } else if (kind == "monomial") {
    sub = monomial_subspace(need_n(), caps_or(c, static_cast<int>(need_n().size()), 8), c.factor, parse_words(c.suffixes));
  } else if (kind == "monomial_ideal") {
    sub = monomial_ideal_subspace(need_n(), caps_or(c, static_cast<int>(need_n().size()), 8), c.factor,
                                  parse_exponents(c.generators));
  } else if (kind == "generated") {
    sub = load_subspace(c.input);
  } else {
    fail(ErrorKind::invalid_argument, "unknown construction " + kind);
  }
  emit(c, dump_json(subspace_to_json(sub)), out);
  return 0;
}

int cmd_check(const std::string& what, const RunConfig& c, std::ostream& out, std::ostream& err) {
  const double tol = c.tol > 0 ? c.tol : 1e-8;
  Json j{{"check", what}};
  if (what == "beurling") {
    const auto sub = load_subspace(c.input);
    const auto v = beurling_check(sub, tolerances(c));
    j["verdict"] = v.verdict;
    j["min_eig"] = v.min_eig;
    j["worst_grade"] = v.worst_grade.values();
    j["worst_layer"] = v.worst_layer;
    emit(c, dump_json(j), out);
    return 0;
  }
  const Json input = load_input(c);
  KernelOptions ko;
  ko.model = model_from_string(c.model);
  OperatorTuple t;
  std::vector<int> caps;
  if (input.contains("mode")) {
    // compression to the complement of a subspace, vacuum frame from the model
    const auto sub = subspace_from_json(input);
    auto comp = compression_tuple(sub);
    t = std::move(comp.tuple);
    ko.model = sub.model();
    ko.frame = comp.frame;
    caps = sub.caps();
  } else {
    t = tuple_from_json(input);
    if (int code = require_member(t, c, err)) return code;
    caps = caps_or(c, t.k(), std::max(c.q_max + 1, 2));
  }
  const auto kb = berezin_kernel(t, caps, ko);
  if (what == "connection") {
    double worst = 0.0;
    for (const auto& q : kb.truncation.grades())
      if (q.total() <= c.q_max * t.k() && q.leq(MultiDegree::constant(t.k(), c.q_max)))
        worst = std::max(worst, connection_identity(kb, q).residual);
    j["residual"] = worst;
    j["verdict"] = worst < tol;
  } else if (what == "intertwine") {
    const double r = verify_intertwining(kb);
    j["residual"] = r;
    j["verdict"] = r < tol;
  } else if (what == "index") {
    InnerMultiplier theta;
    if (c.theta.empty()) {
      theta.model = ko.model;
      theta.n = t.n();
      theta.source_dim = 1;
      theta.target_dim = kb.defect.rank;
    } else {
      theta = multiplier_from_json(read_json_file(c.theta));
    }
    std::vector<int> qv(t.k());
    for (int i = 0; i < t.k(); ++i) qv[i] = std::min(c.q_max, caps[i] - 1);  // one step inside the caps
    const MultiDegree q(qv);
    const auto r = ko.model == FockModel::symmetric ? index3_check(kb, theta, q) : index_formula_check(kb, theta, q);
    j["q"] = q.values();
    j["lhs"] = r.lhs;
    j["rhs"] = r.rhs;
    j["residual"] = r.residual;
    j["completion_residual"] = r.completion_residual;
    j["rank"] = r.rank;
    j["verdict"] = r.residual < tol;
  } else {
    fail(ErrorKind::invalid_argument, "unknown check " + what);
  }
  emit(c, dump_json(j), out);
  return 0;
}

int cmd_demo(const RunConfig& c, std::ostream& out) {
  Json runs = Json::array();
  const OperatorTuple scalar({1}, 1, {{Matrix::Constant(1, 1, 0.5)}});
  const auto est = curvature_estimate(scalar, c.q_max);
  runs.push_back(Json{{"what", "scalar tuple [0.5]"}, {"curvature", est.estimate}, {"corner_seq", sequence(est.corner_seq)}});
  const auto mt = construct_Mt(construct_nadic(2, 0.5, 20), std::max(c.q_max, 1));
  const auto rep = multiplicity_estimate(mt, c.q_max);
  runs.push_back(Json{{"what", "M_t with n = 2, t = 0.5"}, {"multiplicity", rep.estimate},
                      {"per_grade", sequence(rep.multiplicity.corner_seq)}});
  const auto c0 = cur0_subspace({2}, {std::max(c.q_max, 1)});
  const auto cc = subspace_curvature(c0, c.q_max);
  runs.push_back(Json{{"what", "cur0 with n = 2"}, {"compression_curvature", cc.estimate},
                      {"per_grade", sequence(cc.corner_seq)}});
  emit(c, dump_json(Json{{"demo", std::move(runs)}}), out);
  return 0;
}

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::parse_error:
    case ErrorKind::invalid_argument:
    case ErrorKind::dimension_mismatch: return 1;
    case ErrorKind::not_in_polyball: return 2;
    case ErrorKind::numerical_instability:
    case ErrorKind::indefinite_defect: return 3;
    default: return 4;
  }
}

void add_common(CLI::App* sub, RunConfig& c) {
  sub->add_option("--input", c.input, "input JSON file");
  sub->add_option("--caps", c.caps, "truncation caps a,b,...")->delimiter(',');
  sub->add_option("--qmax", c.q_max, "largest corner grade")->check(CLI::NonNegativeNumber);
  sub->add_option("--tol", c.tol, "tolerance override");
  sub->add_option("--formula", c.formula, "ratio|cesaro|defect-product|operator-trace")
      ->check(CLI::IsMember({"ratio", "cesaro", "defect-product", "operator-trace"}));
  sub->add_option("--format", c.format, "json|csv")->check(CLI::IsMember({"json", "csv"}));
  sub->add_option("--threads", c.threads, "worker threads (POLYBALL_THREADS otherwise)");
  sub->add_option("--out", c.out, "write the report here instead of stdout");
  sub->add_option("--model", c.model, "full|symmetric")->check(CLI::IsMember({"full", "symmetric"}));
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"polyball: curvature and multiplicity invariants of polyball tuples"};
  app.require_subcommand(1);
  RunConfig c;
  std::string target;

  auto* curv = app.add_subcommand("curv", "curvature of a tuple");
  auto* curvc = app.add_subcommand("curv-c", "commutative curvature of a tuple");
  auto* mult = app.add_subcommand("mult", "multiplicity of an invariant subspace");
  auto* construct = app.add_subcommand("construct", "write a subspace JSON");
  auto* check = app.add_subcommand("check", "identity and positivity checks");
  auto* demo = app.add_subcommand("demo", "small worked examples");
  for (auto* s : {curv, curvc, mult, construct, check, demo}) add_common(s, c);
  for (auto* s : {curv, curvc}) s->add_flag("--extrapolate", c.extrapolate, "Aitken extrapolation of the corner sequence");
  curvc->add_option("--kernel-cap", c.kernel_cap, "caps of the characteristic-function test (0 skips it)");
  construct->add_option("kind", target, "mt|tensor|cur0|uncountable|finite_codim|monomial|monomial_ideal|generated")
      ->required();
  construct->add_option("--n", c.n, "generator counts")->delimiter(',');
  construct->add_option("--t", c.t, "target value");
  construct->add_option("--omega", c.omega, "splitting parameter of the uncountable family");
  construct->add_option("--terms", c.terms, "number of n-adic terms");
  construct->add_option("--L", c.L, "codimension degree");
  construct->add_option("--coeff-dim", c.coeff_dim, "coefficient dimension");
  construct->add_option("--factor", c.factor, "0-based factor carrying the constraint");
  construct->add_option("--suffixes", c.suffixes, "suffix words such as 1,21")->delimiter(',');
  construct->add_option("--generators", c.generators, "monomial exponents such as 1,0;0,2");
  construct->add_option("--parts", c.parts, "subspace JSON files to tensor")->delimiter(',');
  check->add_option("what", target, "beurling|connection|index|intertwine")
      ->required()
      ->check(CLI::IsMember({"beurling", "connection", "index", "intertwine"}));
  check->add_option("--theta", c.theta, "inner multiplier JSON completing the kernel");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << Json{{"error", "usage"}, {"message", e.what()}}.dump() << "\n";
    return 1;
  }

  try {
    if (c.threads > 0) set_thread_count(c.threads);
    if (*curv) return cmd_curv(c, out, err);
    if (*curvc) return cmd_curvc(c, out, err);
    if (*mult) return cmd_mult(c, out);
    if (*construct) return cmd_construct(target, c, out);
    if (*check) return cmd_check(target, c, out, err);
    if (*demo) return cmd_demo(c, out);
  } catch (const Error& e) {
    err << Json{{"error", to_string(e.kind())}, {"message", e.what()}}.dump() << "\n";
    return exit_code(e.kind());
  }
  return 1;
}

}  // namespace polyball
