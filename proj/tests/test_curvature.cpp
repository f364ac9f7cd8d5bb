#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "polyball/curvature.hpp"
#include "polyball/errors.hpp"
#include "polyball/random_tuples.hpp"

using namespace polyball;

namespace {
double brute_grade_value(const OperatorTuple& t, const MultiDegree& q) {
  const Shape shape = Shape::uncapped(t.n());
  return cp_multi(t, q, defect_operator(t)).trace().real() / static_cast<double>(grade_dim(shape, q));
}
}  // namespace

TEST_CASE("scalar tuple: x_q = (1 - r^2) r^(2q)") {
  const double r = 0.5;
  const OperatorTuple t({1}, 1, {{Matrix::Constant(1, 1, r)}});
  const auto est = curvature_estimate(t, 8);
  for (int q = 0; q <= 8; ++q) CHECK(est.value(MultiDegree({q})) == doctest::Approx((1 - r * r) * std::pow(r, 2 * q)));
  CHECK(est.monotone_ok);
  CHECK(est.estimate == doctest::Approx(0.75 * std::pow(0.25, 8)));
  // partial sums telescope to 1 - r^(2(Q+1))
  for (std::size_t Q = 0; Q < est.partial_sum_residual.size(); ++Q) CHECK(est.partial_sum_residual[Q] < 1e-14);
}

TEST_CASE("grade values match brute force CP iteration") {
  Rng rng(13);
  const auto t = random_pure_tuple({2, 3}, 5, 0.7, rng);
  const auto est = curvature_estimate(t, 4);
  for (std::size_t g = 0; g < est.grades.size(); ++g)
    CHECK(est.grade_values[g] == doctest::Approx(brute_grade_value(t, est.grades[g])).epsilon(1e-12));
  CHECK(grade_trace(t, MultiDegree({2, 1})) == doctest::Approx(brute_grade_value(t, MultiDegree({2, 1}))).epsilon(1e-12));
}

TEST_CASE("direct sums add and ampliations multiply per grade") {
  Rng rng(17);
  const auto a = random_pure_tuple({2, 2}, 3, 0.6, rng);
  const auto b = random_pure_tuple({2, 2}, 2, 0.6, rng);
  const auto ea = curvature_estimate(a, 3), eb = curvature_estimate(b, 3);
  const auto es = curvature_estimate(direct_sum(a, b), 3);
  for (std::size_t g = 0; g < es.grades.size(); ++g)
    CHECK(std::abs(es.grade_values[g] - ea.grade_values[g] - eb.grade_values[g]) < 1e-12);

  const auto x = random_pure_tuple({2}, 2, 0.6, rng);
  const auto y = random_pure_tuple({3}, 2, 0.5, rng);
  const auto ex = curvature_estimate(x, 3), ey = curvature_estimate(y, 3);
  const auto eamp = curvature_estimate(ampliation({x, y}), 3);
  for (std::size_t g = 0; g < eamp.grades.size(); ++g) {
    const auto& q = eamp.grades[g];
    CHECK(std::abs(eamp.grade_values[g] - ex.value(MultiDegree({q[0]})) * ey.value(MultiDegree({q[1]}))) < 1e-12);
  }
}

TEST_CASE("monotone values and the bounds chain") {
  Rng rng(99);
  for (int trial = 0; trial < 5; ++trial) {
    const auto t = random_pure_tuple({2, 2}, 4, 0.8, rng);
    const auto est = curvature_estimate(t, 5);
    CHECK(est.monotone_ok);
    for (std::size_t g = 0; g < est.grades.size(); ++g)
      for (int i = 0; i < 2; ++i) {
        const auto up = est.grades[g].plus_unit(i);
        if (up[i] <= 5) CHECK(est.value(up) <= est.grade_values[g] + 1e-12);
      }
    const auto b = bounds_report(t, est);
    CHECK(b.lower <= b.curvature);
    CHECK(b.curvature <= b.trace_defect + 1e-12);
    CHECK(b.trace_defect <= b.rank + 1e-12);
  }
}

TEST_CASE("cesaro and corner sequences share the limit of a nilpotent tuple") {
  Matrix nil = Matrix::Zero(2, 2);
  nil(0, 1) = 0.8;
  const auto est = curvature_estimate(OperatorTuple({1}, 2, {{nil}}), 6);
  CHECK(est.corner_seq.back() == 0.0);
  // x_0 = trace(I - T T^*) = 1.36, x_1 = 0.64 * 1, x_q = 0 beyond
  CHECK(est.cesaro_seq.back() == doctest::Approx((1.36 + 0.64) / 7.0));
}

TEST_CASE("non-members are rejected") {
  const OperatorTuple t({1}, 1, {{Matrix::Constant(1, 1, 1.2)}});
  try {
    curvature_estimate(t, 3);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::not_in_polyball);
  }
}

TEST_CASE("csv layout") {
  const OperatorTuple t({1, 1}, 1, {{Matrix::Constant(1, 1, 0.5)}, {Matrix::Constant(1, 1, 0.5)}});
  const auto est = curvature_estimate(t, 1);
  std::ostringstream os;
  write_csv(os, est);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "q_1,q_2,x_q,cesaro,defect_product");
  std::getline(is, line);
  CHECK(line.rfind("0,0,0.5625,", 0) == 0);
  int rows = 1;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == 4);
  CHECK(fmt(0.1) == "0.10000000000000001");
}

TEST_CASE("aitken extrapolation of a geometric corner sequence") {
  const OperatorTuple t({1}, 1, {{Matrix::Constant(1, 1, 0.9)}});
  EstimateOptions opts;
  opts.extrapolate = true;
  const auto est = curvature_estimate(t, 10, opts);
  REQUIRE(est.extrapolated.has_value());
  CHECK(std::abs(*est.extrapolated) < 1e-10);
}
