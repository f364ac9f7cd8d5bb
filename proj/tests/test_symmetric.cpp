#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <functional>

#include "polyball/errors.hpp"
#include "polyball/random_tuples.hpp"
#include "polyball/symmetric.hpp"

using namespace polyball;

namespace {
// multisets of size q from n letters, counted by recursion on the largest letter
std::uint64_t multisets(int n, int q) {
  if (n == 1 || q == 0) return 1;
  std::uint64_t c = 0;
  for (int top = 0; top <= q; ++top) c += multisets(n - 1, q - top);
  return c;
}

// Theta = row of normalized monomials of degree L, so Theta Theta^* = P_{>= L}
InnerMultiplier monomial_row(int n, int L) {
  InnerMultiplier th;
  th.model = FockModel::symmetric;
  th.n = {n};
  const auto d = static_cast<Eigen::Index>(sym_grade_dim(n, L));
  th.source_dim = static_cast<int>(d);
  th.coeffs[MultiDegree({L})] = Matrix::Identity(d, d);
  th.isometric = false;
  return th;
}
}  // namespace

TEST_CASE("symmetric grade dimensions") {
  for (int n = 1; n <= 4; ++n)
    for (int q = 0; q <= 10; ++q) CHECK(sym_grade_dim(n, q) == multisets(n, q));
  CHECK(sym_grade_dim(2, 3) == 4);
  CHECK(sym_grade_dim(3, 2) == 6);
  // sum_{s<=q} trace Q_s = (q+1)...(q+n)/n!
  for (int n = 1; n <= 4; ++n)
    for (int q = 0; q <= 8; ++q) {
      std::uint64_t sum = 0;
      for (int s = 0; s <= q; ++s) sum += sym_grade_dim(n, s);
      std::uint64_t num = 1, den = 1;
      for (int a = 1; a <= n; ++a) {
        num *= static_cast<std::uint64_t>(q + a);
        den *= static_cast<std::uint64_t>(a);
      }
      CHECK(sum == num / den);
    }
}

TEST_CASE("B is the compression of S to symmetric tensors") {
  for (int n = 1; n <= 3; ++n) CHECK(symmetrization_residual(n, 4) < 1e-14);
  const FockTruncation ft(Shape({3}, {4}), 1, FockModel::symmetric);
  const Matrix b1 = b_operator(ft, 0, 1).to_dense(), b2 = b_operator(ft, 0, 2).to_dense();
  CHECK((b1 * b2 - b2 * b1).norm() < 1e-14);
  // B_1 on the vacuum is z_1
  const Matrix v = b1.col(0);
  CHECK(std::abs(v(ft.offset(ft.grade_index(MultiDegree({1}))))) == doctest::Approx(1.0));
  CHECK_THROWS_AS(b_operator(FockTruncation(Shape({2}, {2}), 1), 0, 1), Error);
}

TEST_CASE("curv_c of the universal model is 1 at every grade") {
  const auto zero = zero_subspace(FockModel::symmetric, {3}, {8}, 1);
  const auto est = subspace_curvature(zero, 8);
  for (double x : est.grade_values) CHECK(x == 1.0);
  // word-to-monomial oracle: sum over monomials of (q!/a!)(a!/q!) counts the monomials
  for (int q = 0; q <= 8; ++q) {
    double sum = 0.0;
    for (const auto& a : enumerate_monomials(3, q)) sum += static_cast<double>(multinomial(a)) * monomial_norm_sq(a);
    CHECK(sum == doctest::Approx(static_cast<double>(sym_grade_dim(3, q))).epsilon(1e-14));
  }
}

TEST_CASE("counting identity over words") {
  for (int n = 1; n <= 3; ++n)
    for (int q = 0; q <= 4; ++q) CHECK(identity2_residual(n, q) < 1e-13);
}

TEST_CASE("scalar curv_c equals curv") {
  const double r = 0.5;
  const OperatorTuple t({1}, 1, {{Matrix::Constant(1, 1, r)}});
  const auto rep = curv_c_estimate(t, 6);
  CHECK(rep.has_characteristic);
  for (int q = 0; q <= 6; ++q)
    CHECK(rep.estimate.value(MultiDegree({q})) == doctest::Approx((1 - r * r) * std::pow(r, 2 * q)));
}

TEST_CASE("commutative trace bound on random PSD inputs") {
  Rng rng(31);
  const auto t = random_pure_tuple({3}, 4, 0.95, rng, true);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix x = random_psd(4, rng);
    for (int q = 0; q <= 4; ++q)
      CHECK(cp_multi(t, MultiDegree({q}), x).trace().real() <= sym_grade_dim(3, q) * x.trace().real() + 1e-12);
  }
}

TEST_CASE("constrained kernel of a commuting pair") {
  Rng rng(12);
  const auto t = random_pure_tuple({2}, 2, 0.6, rng, true);
  const auto ck = constrained_berezin(t, {6});
  CHECK(ck.intertwining_residual < 1e-10);
  CHECK(ck.connection_residual < 1e-8);
  Matrix a = Matrix::Zero(2, 2), b = Matrix::Zero(2, 2);
  a(0, 1) = 0.5;
  b(1, 0) = 0.5;
  CHECK_THROWS_AS(constrained_berezin(OperatorTuple({2}, 2, {{a, b}}), {3}), Error);
  CHECK_THROWS_AS(curv_c_estimate(OperatorTuple({2}, 2, {{a, b}}), 3), Error);
}

TEST_CASE("n = k = 1: constrained kernel is the full kernel") {
  const OperatorTuple t({1}, 1, {{Matrix::Constant(1, 1, 0.7)}});
  const auto ck = constrained_berezin(t, {5});
  const auto kb = berezin_kernel(t, {5});
  CHECK((ck.kernel.dense() - kb.dense()).norm() < 1e-15);
}

TEST_CASE("characteristic function of a Beurling compression") {
  const auto sub = monomial_ideal_subspace({2}, {5}, 0, {{1, 0}});
  const auto comp = compression_tuple(sub);
  KernelOptions ko;
  ko.model = FockModel::symmetric;
  ko.frame = comp.frame;
  const auto kb = berezin_kernel(comp.tuple, {5}, ko);
  CHECK(has_characteristic_function(kb).verdict);
  CHECK((kb.dense() - comp.basis).norm() < 1e-12);
}

TEST_CASE("m_c values") {
  CHECK(m_c_estimate(full_subspace(FockModel::symmetric, {2}, {5}, 2), 5).estimate == 2.0);
  // z_1 F_s^2(H_2): grade q holds q of the q + 1 monomials
  const auto z1 = monomial_ideal_subspace({2}, {8}, 0, {{1, 0}});
  const auto rep = m_c_estimate(z1, 8);
  for (int q = 0; q <= 8; ++q) {
    CHECK(z1.count(MultiDegree({q})) == (q == 0 ? 0 : sym_grade_dim(2, q - 1)));
    CHECK(rep.multiplicity.value(MultiDegree({q})) == doctest::Approx(q / (q + 1.0)));
  }
  // polydisc z_1 H^2(D^2)
  const auto pd = monomial_ideal_subspace({1, 1}, {6, 6}, 0, {{1}});
  CHECK(m_c_estimate(pd, 6).multiplicity.corner_seq.back() == 1.0);
  CHECK_THROWS_AS(m_c_estimate(cur0_subspace({2}, {3}), 2), Error);
}

TEST_CASE("index formula on the symmetric model") {
  for (int n : {2, 3})
    for (int L : {1, 2}) {
      const auto sub = finite_codim_subspace(FockModel::symmetric, {n}, {4}, L);
      const auto comp = compression_tuple(sub);
      KernelOptions ko;
      ko.model = FockModel::symmetric;
      ko.frame = comp.frame;
      const auto kb = berezin_kernel(comp.tuple, {4}, ko);
      for (int q = 0; q <= 3; ++q) {
        const auto ic = index3_check(kb, monomial_row(n, L), MultiDegree({q}));
        CHECK(ic.residual < 1e-8);
        CHECK(ic.rhs == doctest::Approx(q < L ? 1.0 : 0.0));
      }
      InnerMultiplier zero;
      zero.model = FockModel::symmetric;
      zero.n = {n};
      CHECK_THROWS_AS(index3_check(kb, zero, MultiDegree({1})), Error);
    }
}

TEST_CASE("polydisc: the symmetric and full index checks coincide") {
  const auto full = monomial_subspace({1, 1}, {4, 4}, 0, {{1}});
  const auto sym = monomial_ideal_subspace({1, 1}, {4, 4}, 0, {{1}});
  InnerMultiplier th;
  th.n = {1, 1};
  th.coeffs[MultiDegree({1, 0})] = Matrix::Identity(1, 1);
  InnerMultiplier ths = th;
  ths.model = FockModel::symmetric;
  const auto cf = compression_tuple(full), cs = compression_tuple(sym);
  KernelOptions kf, ks;
  kf.frame = cf.frame;
  ks.model = FockModel::symmetric;
  ks.frame = cs.frame;
  const auto kbf = berezin_kernel(cf.tuple, {4, 4}, kf), kbs = berezin_kernel(cs.tuple, {4, 4}, ks);
  for_each_leq(MultiDegree({3, 3}), [&](const MultiDegree& q) {
    const auto a = index_formula_check(kbf, th, q), b = index3_check(kbs, ths, q);
    CHECK(a.lhs == doctest::Approx(b.lhs));
    CHECK(a.rhs == doctest::Approx(b.rhs));
    CHECK(a.residual < 1e-12);
  });
}
