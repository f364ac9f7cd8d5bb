#include "polyball/symmetric.hpp"

#include <cmath>

#include "polyball/errors.hpp"

namespace polyball {

std::uint64_t sym_grade_dim(int n, int q) {
  if (n < 1 || q < 0) fail(ErrorKind::invalid_argument, "sym_grade_dim needs n >= 1, q >= 0");
  return binomial(q + n - 1, n - 1);
}

namespace {
void require_symmetric(const FockTruncation& ft) {
  if (ft.model() != FockModel::symmetric) fail(ErrorKind::invalid_argument, "expected a symmetric truncation");
}

// columns: normalized monomials of degree q written in the word basis
Matrix symmetrizer(int n, int q) {
  const auto monos = enumerate_monomials(n, q);
  const auto words = checked_pow(n, q);
  Matrix e = Matrix::Zero(static_cast<Eigen::Index>(words), static_cast<Eigen::Index>(monos.size()));
  for (std::uint64_t w = 0; w < words; ++w) {
    std::vector<int> alpha(n, 0);
    for (int l : word_at(n, q, w)) ++alpha[l - 1];
    const double c = 1.0 / std::sqrt(static_cast<double>(multinomial(alpha)));
    e(static_cast<Eigen::Index>(w), static_cast<Eigen::Index>(monomial_index(alpha))) = c;
  }
  return e;
}
}  // namespace

GradedOperator b_operator(const FockTruncation& sym_ft, int i, int j) {
  require_symmetric(sym_ft);
  return creation_op(sym_ft, i, j);
}

double symmetrization_residual(int n, int cap) {
  const FockTruncation full(Shape({n}, {cap}), 1, FockModel::full);
  const FockTruncation sym(Shape({n}, {cap}), 1, FockModel::symmetric);
  double worst = 0.0;
  for (int q = 0; q < cap; ++q) {
    const Matrix lo = symmetrizer(n, q);
    const Matrix hi = symmetrizer(n, q + 1);
    const MultiDegree g(std::vector<int>{q});
    for (int j = 1; j <= n; ++j) {
      const Matrix s = apply_creation(full, 0, j, g, lo);
      const Matrix b = apply_creation(sym, 0, j, g, Matrix::Identity(lo.cols(), lo.cols()));
      worst = std::max(worst, (hi.adjoint() * s - b).norm());
    }
  }
  return worst;
}

double identity2_residual(int n, int q) {
  const FockTruncation sym(Shape({n}, {q}), 1, FockModel::symmetric);
  const double tq = static_cast<double>(sym_grade_dim(n, q));
  double worst = 0.0;
  for (int s = 0; s <= q; ++s) {
    const auto dlo = static_cast<Eigen::Index>(sym_grade_dim(n, q - s));
    Matrix sum = Matrix::Zero(dlo, dlo);
    for (std::uint64_t w = 0; w < checked_pow(n, s); ++w) {
      Matrix x = Matrix::Identity(dlo, dlo);
      int d = q - s;
      const auto letters = word_at(n, s, w);
      for (auto it = letters.rbegin(); it != letters.rend(); ++it, ++d)
        x = apply_creation(sym, 0, *it, MultiDegree(std::vector<int>{d}), x);
      sum += x.adjoint() * x;  // Q_q acts as the identity on grade q
    }
    const double ratio = tq / static_cast<double>(sym_grade_dim(n, q - s));
    worst = std::max(worst, (sum - ratio * Matrix::Identity(dlo, dlo)).norm() / ratio);
  }
  return worst;
}

CurvCReport curv_c_estimate(const OperatorTuple& t, int q_max, const CurvCOptions& opts) {
  const double intra = t.intra_commutation_residual();
  if (intra > default_tolerances().commutation)
    fail(ErrorKind::invalid_argument, "tuple entries do not commute within a factor (residual " + fmt(intra) + ")");
  CurvCReport rep;
  if (opts.kernel_cap > 0) {
    const auto verdict = check_polyball(t);
    if (!verdict.member) fail(ErrorKind::not_in_polyball, "tuple is not in the polyball");
    const auto kb = berezin_kernel(t, std::vector<int>(t.k(), opts.kernel_cap), {FockModel::symmetric, std::nullopt, -1});
    const auto pv = has_characteristic_function(kb);
    rep.characteristic_checked = true;
    rep.has_characteristic = pv.verdict;
    rep.characteristic_min_eig = pv.min_eig;
  }
  EstimateOptions eo;
  eo.model = FockModel::symmetric;
  eo.extrapolate = opts.extrapolate;
  eo.assert_monotone = rep.characteristic_checked && rep.has_characteristic;
  rep.estimate = curvature_estimate(t, q_max, eo);
  if (!rep.characteristic_checked)
    rep.estimate.caveats.push_back("characteristic-function test skipped; existence of the limit is assumed");
  else if (!rep.has_characteristic)
    rep.estimate.caveats.push_back("no constrained characteristic function detected; existence of the limit is not established");
  if (!rep.estimate.monotone_ok) rep.estimate.caveats.push_back("per-grade values are not monotone");
  return rep;
}

ConstrainedKernel constrained_berezin(const OperatorTuple& t, const std::vector<int>& caps) {
  if (t.intra_commutation_residual() > default_tolerances().commutation)
    fail(ErrorKind::invalid_argument, "constrained kernel needs commuting entries within each factor");
  ConstrainedKernel out{berezin_kernel(t, caps, {FockModel::symmetric, std::nullopt, -1}), 0.0, 0.0};
  out.intertwining_residual = verify_intertwining(out.kernel);
  const auto& ft = out.kernel.truncation;
  for (int g : ft.interior_grades(1))
    out.connection_residual = std::max(out.connection_residual, connection_identity(out.kernel, ft.grades()[g]).residual);
  return out;
}

MultiplicityReport m_c_estimate(const GradedSubspace& sub, int q_max) {
  if (sub.model() != FockModel::symmetric) fail(ErrorKind::invalid_argument, "m_c needs a symmetric subspace");
  return multiplicity_estimate(sub, q_max);
}

IndexCheck index3_check(const BerezinKernel& kb, const InnerMultiplier& theta, const MultiDegree& q,
                        double completion_tol) {
  require_symmetric(kb.truncation);
  if (theta.model != FockModel::symmetric) fail(ErrorKind::invalid_argument, "theta must live on the symmetric model");
  return index_formula_check(kb, theta, q, completion_tol);
}

}  // namespace polyball
