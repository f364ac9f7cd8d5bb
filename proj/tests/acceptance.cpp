// One line per acceptance criterion; exit status 1 if any of them fails.

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <sstream>

#include "polyball/errors.hpp"
#include "polyball/io.hpp"
#include "polyball/random_tuples.hpp"
#include "polyball/symmetric.hpp"

using namespace polyball;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

InnerMultiplier suffix_row(int n, const std::vector<std::vector<int>>& words) {
  InnerMultiplier th;
  th.n = {n};
  th.source_dim = static_cast<int>(words.size());
  for (std::size_t c = 0; c < words.size(); ++c) {
    const MultiDegree s({static_cast<int>(words[c].size())});
    auto it = th.coeffs.find(s);
    if (it == th.coeffs.end())
      it = th.coeffs.emplace(s, Matrix::Zero(static_cast<Eigen::Index>(checked_pow(n, s[0])), th.source_dim)).first;
    it->second(static_cast<Eigen::Index>(word_index(n, words[c])), static_cast<Eigen::Index>(c)) = 1.0;
  }
  th.isometric = true;
  return th;
}

BerezinKernel compression_kernel(const GradedSubspace& sub, FockModel model) {
  const auto comp = compression_tuple(sub);
  KernelOptions ko;
  ko.model = model;
  ko.frame = comp.frame;
  return berezin_kernel(comp.tuple, sub.caps(), ko);
}

// 1. universal model: x_q = m for M = {0}
void criterion1(Outcome& o) {
  const int m = 3;
  const auto t0 = std::chrono::steady_clock::now();
  const auto est = subspace_curvature(zero_subspace(FockModel::full, {2, 3}, {8, 8}, m), 8);
  const double secs = seconds_since(t0);
  bool all = true;
  for (double x : est.grade_values) all = all && x == m;
  o.require(all, "x_q = m at every grade");
  o.require(est.estimate == m, "estimate = m");
  o.require(secs < 1.0, "runtime < 1 s");
  o.detail << "m = " << m << ", " << est.grades.size() << " grades, estimate " << fmt(est.estimate) << ", " << secs << " s";
}

// 2. the uncountable family reaches t
void criterion2(Outcome& o) {
  const double omega = 0.875;
  const auto t0 = std::chrono::steady_clock::now();
  for (double t : {0.25, 0.5, 0.3}) {
    const auto sub = uncountable_family(t, omega, {2, 2}, {12, 12}, 20);
    const auto est = subspace_curvature(sub, 12);
    const auto& e1 = *sub.profiles()[0].expansion;
    const auto& e2 = *sub.profiles()[1].expansion;
    const int kN = std::min(e1.exponents.back(), e2.exponents.back());
    const double err = std::abs(est.estimate - t);
    o.require(err <= std::ldexp(1.0, -kN), "estimate within 2^-k_N of t = " + fmt(t));
    o.detail << "t=" << t << ": |curv - t| = " << err << " (k_N " << kN << "); ";
    const bool dyadic = e1.remainder == 0.0L && e2.remainder == 0.0L;
    if (!dyadic) continue;
    // closed form: single factor 1 - sum d_p 2^-k_p, product of the two factors
    const auto single = subspace_curvature(construct_Mt(construct_nadic(2, t, 20), 12), 12);
    for (int q = 0; q <= 12; ++q) {
      long double cf = 1.0L;
      const auto e = construct_nadic(2, t, 20);
      for (std::size_t p = 0; p < e.exponents.size(); ++p)
        if (e.exponents[p] <= q) cf -= e.digits[p] / std::pow(2.0L, e.exponents[p]);
      o.require(single.value(MultiDegree({q})) == static_cast<double>(cf), "single-factor closed form at q = " + std::to_string(q));
    }
    for (std::size_t g = 0; g < est.grades.size(); ++g) {
      const auto& q = est.grades[g];
      const double cf = static_cast<double>(1.0L - e1.partial_sum(q[0]) * e2.partial_sum(q[1]));
      o.require(std::abs(est.grade_values[g] - cf) <= 1e-15, "product closed form at " + q.str());
    }
  }
  const double secs = seconds_since(t0);
  o.require(secs < 5.0, "runtime < 5 s");
  o.detail << secs << " s";
}

// 3. connection identity on random pure tuples
void criterion3(Outcome& o) {
  Rng rng(20240901);
  const std::vector<std::vector<int>> shapes = {{1, 1}, {2, 1}, {1, 2}, {2, 2}};
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const auto& n = shapes[trial % shapes.size()];
    const int dim = 2 + trial % 5;
    const auto t = random_pure_tuple(n, dim, 0.6, rng);
    const auto kb = berezin_kernel(t, {6, 6});
    for_each_leq(MultiDegree({3, 3}), [&](const MultiDegree& q) { worst = std::max(worst, connection_identity(kb, q).residual); });
  }
  o.require(worst < 1e-8, "max residual < 1e-8");
  o.detail << "max residual " << worst << " over 10 tuples";
}

// 4. additivity under direct sums, factorization under ampliation
void criterion4(Outcome& o) {
  Rng rng(404);
  double add = 0.0, mul = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    const auto a = random_pure_tuple({2, 2}, 3, 0.6, rng);
    const auto b = random_pure_tuple({2, 2}, 2 + trial % 3, 0.7, rng);
    const auto ea = curvature_estimate(a, 4), eb = curvature_estimate(b, 4), es = curvature_estimate(direct_sum(a, b), 4);
    for (std::size_t g = 0; g < es.grades.size(); ++g)
      add = std::max(add, std::abs(es.grade_values[g] - ea.grade_values[g] - eb.grade_values[g]));
    const auto x = random_pure_tuple({2}, 2, 0.6, rng);
    const auto y = random_pure_tuple({3}, 3, 0.5, rng);
    const auto ex = curvature_estimate(x, 4), ey = curvature_estimate(y, 4), ep = curvature_estimate(ampliation({x, y}), 4);
    for (std::size_t g = 0; g < ep.grades.size(); ++g) {
      const auto& q = ep.grades[g];
      mul = std::max(mul, std::abs(ep.grade_values[g] - ex.value(MultiDegree({q[0]})) * ey.value(MultiDegree({q[1]}))));
    }
  }
  o.require(add <= 1e-12, "direct sum additivity");
  o.require(mul <= 1e-12, "ampliation factorization");
  o.detail << "additivity gap " << add << ", factorization gap " << mul;
}

// 5. y_q(M) + y_q(M perp) = dim E
void criterion5(Outcome& o) {
  const std::vector<GradedSubspace> structured = {
      construct_Mt(construct_nadic(2, 0.3, 20), 8),
      construct_Mt(construct_nadic(3, 0.5, 20), 6),
      tensor_subspace({construct_Mt(construct_nadic(2, 0.25, 20), 5), construct_Mt(construct_nadic(2, 0.5, 20), 5)}),
      cur0_subspace({2, 2}, {5, 5}),
      uncountable_family(0.3, 0.875, {2, 2}, {6, 6}),
      finite_codim_subspace(FockModel::full, {2, 3}, {4, 4}, 3, 2),
      finite_codim_subspace(FockModel::symmetric, {3}, {8}, 2, 3),
      monomial_subspace({2, 2}, {5, 4}, 1, {{1}, {2, 2}}),
      monomial_ideal_subspace({3}, {6}, 0, {{1, 0, 0}, {0, 2, 0}}),
      zero_subspace(FockModel::full, {2, 3}, {4, 4}, 2),
      full_subspace(FockModel::symmetric, {2, 2}, {4, 4}, 1)};
  std::size_t grades = 0;
  for (const auto& s : structured)
    for (const auto& q : s.truncation().grades()) {
      ++grades;
      o.require(s.count(q) + s.perp_count(q) == s.truncation().grade_dim(q) * static_cast<std::uint64_t>(s.coeff_dim()),
                s.label() + " at " + q.str());
    }
  const auto gen = subspace_from_json(read_json_file(std::string(POLYBALL_FIXTURES) + "/z1_minus_z2.json"));
  double worst = 0.0;
  for (const auto& q : gen.truncation().grades()) worst = std::max(worst, std::abs(gen.ratio(q) + gen.perp_ratio(q) - 1.0));
  o.require(worst < 1e-12, "generated subspace");
  o.detail << structured.size() << " structured subspaces, " << grades << " grades exact; generated residual " << worst;
}

// 6. product law for tensor products
void criterion6(Outcome& o) {
  const auto m1 = construct_Mt(construct_nadic(2, 0.3, 20), 8);
  const auto m2 = construct_Mt(construct_nadic(2, 0.25, 20), 8);
  const auto m = tensor_subspace({m1, m2});
  const auto c1 = subspace_curvature(m1, 8), c2 = subspace_curvature(m2, 8), c = subspace_curvature(m, 8);
  for (std::size_t g = 0; g < c.grades.size(); ++g) {
    const auto& q = c.grades[g];
    const MultiDegree a({q[0]}), b({q[1]});
    // exact: |M cap grade q| = |M_1 cap q_1| |M_2 cap q_2|
    o.require(m.truncation().grade_dim(q) - m.perp_count(q) == m1.count(a) * m2.count(b), "integer law at " + q.str());
    const double law = 1.0 - (1.0 - c1.value(a)) * (1.0 - c2.value(b));
    o.require(std::abs(c.grade_values[g] - law) <= 1e-15, "per-grade law at " + q.str());
  }
  o.detail << c.grades.size() << " grades checked";
}

// 7. cur0 with n_1 = 2
void criterion7(Outcome& o) {
  const int Q = 12;
  const auto est = subspace_curvature(cur0_subspace({2}, {Q}), Q);
  for (int q = 0; q <= Q; ++q) o.require(est.value(MultiDegree({q})) == std::ldexp(1.0, -q), "2^-q at q = " + std::to_string(q));
  o.require(est.estimate <= std::ldexp(1.0, -Q), "estimate <= 2^-Q");
  o.detail << "values 1, 1/2, ..., 2^-" << Q << "; estimate " << fmt(est.estimate);
}

// 8. Beurling discrimination
void criterion8(Outcome& o) {
  const std::vector<GradedSubspace> beurling = {
      monomial_subspace({2}, {6}, 0, {{1}}),
      monomial_subspace({2, 2}, {4, 4}, 0, {{1, 2}, {2, 2}}),
      construct_Mt(construct_nadic(2, 0.3, 20), 6),
      cur0_subspace({2, 2}, {4, 4}),
      finite_codim_subspace(FockModel::full, {2}, {6}, 2),
      monomial_ideal_subspace({2}, {6}, 0, {{1, 0}}),
      generated_subspace(FockModel::full, {1, 1}, 5, 1, {{GeneratorTerm{MultiDegree({1, 0}), 0, 0, 1.0}}})};
  for (const auto& s : beurling) o.require(beurling_check(s).verdict, "Beurling verdict for " + s.label());

  const auto sub = subspace_from_json(read_json_file(std::string(POLYBALL_FIXTURES) + "/z1_minus_z2.json"));
  const auto v = beurling_check(sub);
  // brute force: explicit shifts and P_m = I - J/(m+1) on the window
  const auto& ft = sub.truncation();
  const Eigen::Index dim = ft.total_dim();
  Matrix p = Matrix::Zero(dim, dim), s1 = Matrix::Zero(dim, dim), s2 = Matrix::Zero(dim, dim);
  for (int g = 0; g < ft.grade_count(); ++g) {
    const auto& q = ft.grades()[g];
    for (int h = 0; h < ft.grade_count(); ++h)
      if (ft.grades()[h].total() == q.total() && q.total() > 0)
        p(ft.offset(g), ft.offset(h)) = (g == h ? 1.0 : 0.0) - 1.0 / (q.total() + 1);
    if (const int a = ft.grade_index(q.plus_unit(0)); a >= 0) s1(ft.offset(a), ft.offset(g)) = 1.0;
    if (const int b = ft.grade_index(q.plus_unit(1)); b >= 0) s2(ft.offset(b), ft.offset(g)) = 1.0;
  }
  const Matrix d = p - s1 * p * s1.adjoint() - s2 * p * s2.adjoint() + s1 * s2 * p * s2.adjoint() * s1.adjoint();
  double oracle = 0.0;
  int oracle_layer = -1;
  for (int m = 0; m <= 4; ++m) {
    std::vector<Eigen::Index> idx;
    for (int g : ft.interior_grades(1))
      if (ft.grades()[g].total() == m) idx.push_back(ft.offset(g));
    Matrix block(idx.size(), idx.size());
    for (std::size_t a = 0; a < idx.size(); ++a)
      for (std::size_t b = 0; b < idx.size(); ++b) block(a, b) = d(idx[a], idx[b]);
    const double lo = min_eigenvalue(block);
    if (lo < oracle - 1e-12) {
      oracle = lo;
      oracle_layer = m;
    }
  }
  o.require(!v.verdict, "z1 - z2 rejected");
  o.require(v.min_eig < -1e-3, "negative eigenvalue below -1e-3");
  o.require(std::abs(v.min_eig - oracle) < 1e-10, "matches brute force");
  o.require(v.worst_layer <= 4, "found at grade <= 4");
  o.detail << beurling.size() << " Beurling fixtures accepted; z1 - z2 min eigenvalue " << fmt(v.min_eig) << " at "
           << v.worst_grade.str() << " (brute force " << fmt(oracle) << ", layer " << oracle_layer << ")";
}

// 9. symmetric model
void criterion9(Outcome& o) {
  // (a) grade dimensions against multiset enumeration
  std::function<std::uint64_t(int, int)> multisets = [&](int n, int q) -> std::uint64_t {
    if (n == 1 || q == 0) return 1;
    std::uint64_t c = 0;
    for (int top = 0; top <= q; ++top) c += multisets(n - 1, q - top);
    return c;
  };
  for (int n = 1; n <= 4; ++n)
    for (int q = 0; q <= 10; ++q) o.require(sym_grade_dim(n, q) == multisets(n, q), "grade dimension");
  // (b) curv_c of B: ratio 1 at every grade, word-to-monomial oracle
  const auto est = subspace_curvature(zero_subspace(FockModel::symmetric, {3}, {8}, 1), 8);
  for (int q = 0; q <= 8; ++q) {
    long double words = 0.0L;
    for (const auto& a : enumerate_monomials(3, q)) words += static_cast<long double>(multinomial(a)) / multinomial(a);
    o.require(words == static_cast<long double>(sym_grade_dim(3, q)), "word-to-monomial count");
    o.require(est.value(MultiDegree({q})) == 1.0, "per-grade ratio 1");
  }
  o.require(symmetrization_residual(3, 4) < 1e-14, "B equals the compression of S");
  // (c) counting identity
  double id2 = 0.0;
  for (int n = 1; n <= 3; ++n)
    for (int q = 0; q <= 4; ++q) id2 = std::max(id2, identity2_residual(n, q));
  o.require(id2 < 1e-13, "counting identity");
  // (d) Arveson form of M = {0}, k = 1
  const int Q = 50;
  const auto ar = subspace_curvature(zero_subspace(FockModel::symmetric, {1}, {Q}, 1), Q);
  const double err1 = std::abs(ar.arveson_seq[Q] - 1.0);
  o.require(err1 <= (1.0 / Q) * (1.0 + 1e-12), "n = 1 Arveson form within 1/q");
  o.detail << "dims ok, ratio 1 for n=3 q<=8, identity residual " << id2 << "; Arveson n=1 error " << err1 << " (1/q = "
           << 1.0 / Q << ")";
  for (int n : {2, 3}) {
    const auto e = subspace_curvature(zero_subspace(FockModel::symmetric, {n}, {Q}, 1), Q);
    o.require(std::abs(e.defect_product_seq[Q] - 1.0) < 1e-12, "normalized partial sums for n = " + std::to_string(n));
    o.detail << "; n=" << n << " normalized " << fmt(e.defect_product_seq[Q]) << ", literal error "
             << std::abs(e.arveson_seq[Q] - 1.0);
  }
}

// 10. index formulas on monomial Beurling fixtures; theta = 0 gives rank
void criterion10(Outcome& o) {
  double worst = 0.0;
  const std::vector<std::vector<std::vector<int>>> suffixes = {{{1}}, {{1, 2}}, {{2, 1}, {2, 2, 2}}};
  for (const auto& words : suffixes) {
    const auto sub = monomial_subspace({2}, {6}, 0, words);
    const auto kb = compression_kernel(sub, FockModel::full);
    const auto th = suffix_row(2, words);
    for (int q = 0; q <= 5; ++q) worst = std::max(worst, index_formula_check(kb, th, MultiDegree({q})).residual);
  }
  for (int n : {2, 3})
    for (int L : {1, 2}) {
      const auto sub = finite_codim_subspace(FockModel::symmetric, {n}, {5}, L);
      const auto kb = compression_kernel(sub, FockModel::symmetric);
      InnerMultiplier th;
      th.model = FockModel::symmetric;
      th.n = {n};
      const auto d = static_cast<Eigen::Index>(sym_grade_dim(n, L));
      th.source_dim = static_cast<int>(d);
      th.coeffs[MultiDegree({L})] = Matrix::Identity(d, d);
      for (int q = 0; q <= 4; ++q) worst = std::max(worst, index3_check(kb, th, MultiDegree({q})).residual);
    }
  o.require(worst < 1e-8, "lhs = rhs within 1e-8");
  double zero_gap = 0.0;
  for (FockModel model : {FockModel::full, FockModel::symmetric}) {
    const auto kb = compression_kernel(zero_subspace(model, {2}, {4}, 1), model);
    InnerMultiplier none;
    none.model = model;
    none.n = {2};
    for (int q = 0; q <= 3; ++q) {
      const auto ic = model == FockModel::full ? index_formula_check(kb, none, MultiDegree({q}))
                                               : index3_check(kb, none, MultiDegree({q}));
      o.require(ic.rhs == ic.rank, "theta = 0 gives rank");
      zero_gap = std::max(zero_gap, std::abs(ic.lhs - ic.rank));
    }
  }
  o.require(zero_gap < 1e-12, "theta = 0: curv = rank");
  o.detail << "max residual " << worst << "; theta = 0 gap " << zero_gap;
}

// 11. property suite
void criterion11(Outcome& o) {
  Rng rng(1111);
  int mono = 0, chain = 0, cp = 0;
  for (int trial = 0; trial < 10; ++trial) {
    const auto t = random_pure_tuple({2, 2}, 3 + trial % 3, 0.5 + 0.04 * trial, rng);
    const auto est = curvature_estimate(t, 5);
    for (std::size_t g = 0; g < est.grades.size(); ++g)
      for (int i = 0; i < 2; ++i) {
        const auto up = est.grades[g].plus_unit(i);
        if (up[i] <= 5 && est.value(up) > est.grade_values[g] + 1e-12) ++mono;
      }
    const auto b = bounds_report(t, est);
    if (!(0.0 <= b.curvature && b.curvature <= b.trace_defect + 1e-12 && b.trace_defect <= b.rank + 1e-12)) ++chain;
  }
  const auto t = random_pure_tuple({2, 3}, 5, 0.9, rng);
  for (int trial = 0; trial < 100; ++trial) {
    const Matrix x = random_psd(5, rng);
    for (int i = 0; i < 2; ++i)
      if (cp_apply(t, i, x).trace().real() > t.n()[i] * x.trace().real() + 1e-12) ++cp;
  }
  o.require(mono == 0 && chain == 0 && cp == 0, "zero violations");
  o.detail << "violations: monotonicity " << mono << ", bounds chain " << chain << ", CP trace " << cp;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, void (*)(Outcome&)>> criteria = {
      {"universal-model curvature", criterion1},      {"uncountable family", criterion2},
      {"connection identity", criterion3},            {"additivity and multiplicativity", criterion4},
      {"complement identity", criterion5},            {"product law for complements", criterion6},
      {"cur0 sequence", criterion7},                  {"Beurling discrimination", criterion8},
      {"symmetric model", criterion9},                {"index formulas", criterion10},
      {"property suite", criterion11}};
  int failures = 0;
  for (std::size_t c = 0; c < criteria.size(); ++c) {
    Outcome o;
    try {
      criteria[c].second(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    failures += !o.pass;
    std::cout << "criterion " << c + 1 << " (" << criteria[c].first << "): " << (o.pass ? "PASS" : "FAIL") << ": "
              << o.detail.str() << "\n";
  }
  return failures == 0 ? 0 : 1;
}
