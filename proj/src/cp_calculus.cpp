#include "polyball/cp_calculus.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "polyball/errors.hpp"

namespace polyball {

namespace {

double rel_commutator(const Matrix& a, const Matrix& b) {
  const double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return (a * b - b * a).norm() / (na * nb);
}

void require_square(const OperatorTuple& t, const Matrix& y) {
  if (y.rows() != t.dimH() || y.cols() != t.dimH())
    fail(ErrorKind::dimension_mismatch, "matrix must be " + std::to_string(t.dimH()) + "x" +
                                            std::to_string(t.dimH()));
}

}  // namespace

OperatorTuple::OperatorTuple(std::vector<int> n, int dimH, std::vector<std::vector<Matrix>> factors,
                             const Tolerances& tol)
    : n_(std::move(n)), dimH_(dimH), factors_(std::move(factors)) {
  if (n_.empty()) fail(ErrorKind::invalid_argument, "tuple needs at least one factor");
  if (dimH_ < 0) fail(ErrorKind::invalid_argument, "dimH must be nonnegative");
  if (factors_.size() != n_.size()) fail(ErrorKind::dimension_mismatch, "factor count differs from n");
  for (int i = 0; i < k(); ++i) {
    if (n_[i] < 1) fail(ErrorKind::invalid_argument, "generator counts must be positive");
    if (static_cast<int>(factors_[i].size()) != n_[i])
      fail(ErrorKind::dimension_mismatch, "factor " + std::to_string(i + 1) + " has wrong entry count");
    for (const auto& m : factors_[i])
      if (m.rows() != dimH_ || m.cols() != dimH_)
        fail(ErrorKind::dimension_mismatch, "tuple entries must be dimH x dimH");
  }
  const double r = cross_commutation_residual();
  if (r > tol.commutation)
    fail(ErrorKind::invalid_argument, "entries of distinct factors do not commute (relative residual " +
                                          std::to_string(r) + ")");
}

double OperatorTuple::cross_commutation_residual() const {
  double worst = 0.0;
  for (int s = 0; s < k(); ++s)
    for (int t = s + 1; t < k(); ++t)
      for (const auto& a : factors_[s])
        for (const auto& b : factors_[t]) worst = std::max(worst, rel_commutator(a, b));
  return worst;
}

double OperatorTuple::intra_commutation_residual() const {
  double worst = 0.0;
  for (const auto& f : factors_)
    for (std::size_t a = 0; a < f.size(); ++a)
      for (std::size_t b = a + 1; b < f.size(); ++b) worst = std::max(worst, rel_commutator(f[a], f[b]));
  return worst;
}

Matrix cp_apply(const OperatorTuple& t, int i, const Matrix& y) {
  require_square(t, y);
  Matrix out = Matrix::Zero(t.dimH(), t.dimH());
  for (const auto& x : t.factor(i)) out.noalias() += x * y * x.adjoint();
  return out;
}

Matrix cp_power(const OperatorTuple& t, int i, int s, const Matrix& y) {
  Matrix out = y;
  for (int r = 0; r < s; ++r) out = cp_apply(t, i, out);
  return out;
}

Matrix cp_multi(const OperatorTuple& t, const MultiDegree& q, const Matrix& y) {
  if (q.k() != t.k()) fail(ErrorKind::dimension_mismatch, "multidegree length differs from k");
  Matrix out = y;
  for (int i = t.k() - 1; i >= 0; --i) out = cp_power(t, i, q[i], out);
  return out;
}

Matrix defect_map(const OperatorTuple& t, const std::vector<int>& p, const Matrix& y) {
  require_square(t, y);
  if (static_cast<int>(p.size()) != t.k()) fail(ErrorKind::dimension_mismatch, "p has wrong length");
  Matrix out = y;
  for (int i = t.k() - 1; i >= 0; --i) {
    if (p[i] == 0) continue;
    if (p[i] != 1) fail(ErrorKind::invalid_argument, "p entries must be 0 or 1");
    out = out - cp_apply(t, i, out);
  }
  return out;
}

Matrix defect_map_expansion(const OperatorTuple& t, const std::vector<int>& p, const Matrix& y) {
  require_square(t, y);
  if (static_cast<int>(p.size()) != t.k()) fail(ErrorKind::dimension_mismatch, "p has wrong length");
  for (int v : p)
    if (v != 0 && v != 1) fail(ErrorKind::invalid_argument, "p entries must be 0 or 1");
  Matrix out = Matrix::Zero(t.dimH(), t.dimH());
  for_each_leq(MultiDegree(p), [&](const MultiDegree& s) {
    const double sign = (s.total() % 2) ? -1.0 : 1.0;
    out += sign * cp_multi(t, s, y);
  });
  return out;
}

Matrix defect_operator(const OperatorTuple& t) {
  return defect_map(t, std::vector<int>(t.k(), 1), Matrix::Identity(t.dimH(), t.dimH()));
}

PolyballVerdict check_polyball(const OperatorTuple& t, const Tolerances& tol) {
  PolyballVerdict v;
  v.cross_residual = t.cross_commutation_residual();
  if (v.cross_residual > tol.commutation)
    fail(ErrorKind::invalid_argument, "cross-factor entries do not commute");
  v.member = true;
  v.worst_eig = 0.0;
  bool first = true;
  const Matrix id = Matrix::Identity(t.dimH(), t.dimH());
  for_each_leq(MultiDegree::constant(t.k(), 1), [&](const MultiDegree& p) {
    double lo = 0.0;
    const bool ok = is_psd(defect_map(t, p.values(), id), tol.psd, &lo);
    v.ps.push_back(p.values());
    v.min_eigs.push_back(lo);
    if (!ok) v.member = false;
    if (first || lo < v.worst_eig) {
      v.worst_eig = lo;
      v.worst_p = p.values();
      first = false;
    }
  });
  return v;
}

const char* to_string(Purity p) {
  switch (p) {
    case Purity::pure: return "pure";
    case Purity::not_pure: return "not_pure";
    case Purity::undetermined: return "undetermined";
  }
  return "undetermined";
}

PurityReport check_pure(const OperatorTuple& t, const Tolerances& tol) {
  PurityReport rep;
  bool all_pure = true, any_not = false;
  for (int i = 0; i < t.k(); ++i) {
    Matrix y = Matrix::Identity(t.dimH(), t.dimH());
    double prev = spectral_norm(y);
    Purity verdict = Purity::undetermined;
    int it = 0;
    if (t.dimH() == 0) verdict = Purity::pure;
    while (verdict == Purity::undetermined && it < tol.max_iter) {
      y = cp_apply(t, i, y);
      ++it;
      const double nrm = spectral_norm(y);
      if (nrm < tol.purity) {
        verdict = Purity::pure;
      } else if (nrm > 10 * tol.purity && std::abs(nrm - prev) <= tol.stall * prev) {
        verdict = Purity::not_pure;
      }
      prev = nrm;
    }
    rep.per_factor.push_back(verdict);
    rep.iterations.push_back(it);
    rep.final_norms.push_back(prev);
    all_pure = all_pure && verdict == Purity::pure;
    any_not = any_not || verdict == Purity::not_pure;
  }
  rep.overall = all_pure ? Purity::pure : (any_not ? Purity::not_pure : Purity::undetermined);
  return rep;
}

DefectData defect_data(const OperatorTuple& t, const Tolerances& tol) {
  DefectData d;
  d.defect = hermitian_part(defect_operator(t));
  auto spec = hermitian_eig(d.defect);
  d.eigenvalues = spec.values;
  const Eigen::Index m = spec.values.size();
  const double lmax = m ? std::max(spec.values(m - 1), 0.0) : 0.0;
  const double scale = m ? std::max(std::abs(spec.values(0)), lmax) : 0.0;
  if (m && spec.values(0) < -tol.psd * std::max(scale, 1e-300)) {
    std::ostringstream os;
    os.precision(17);
    os << "defect is indefinite: eigenvalue " << spec.values(0);
    fail(ErrorKind::indefinite_defect, os.str());
  }
  RealVector clipped = spec.values.cwiseMax(0.0);
  d.sqrt = spec.vectors * clipped.cwiseSqrt().cast<cplx>().asDiagonal() * spec.vectors.adjoint();
  std::vector<Eigen::Index> keep;
  for (Eigen::Index j = m - 1; j >= 0; --j)
    if (spec.values(j) > tol.rank * lmax && spec.values(j) > 0) keep.push_back(j);
  d.rank = static_cast<int>(keep.size());
  d.range_basis.resize(t.dimH(), d.rank);
  for (int c = 0; c < d.rank; ++c) d.range_basis.col(c) = spec.vectors.col(keep[c]);
  return d;
}

OperatorTuple direct_sum(const OperatorTuple& a, const OperatorTuple& b) {
  if (a.n() != b.n()) fail(ErrorKind::dimension_mismatch, "direct_sum: shapes differ");
  const int d = a.dimH() + b.dimH();
  std::vector<std::vector<Matrix>> f(a.k());
  for (int i = 0; i < a.k(); ++i)
    for (int j = 0; j < a.n()[i]; ++j) {
      Matrix m = Matrix::Zero(d, d);
      m.topLeftCorner(a.dimH(), a.dimH()) = a.op(i, j);
      m.bottomRightCorner(b.dimH(), b.dimH()) = b.op(i, j);
      f[i].push_back(std::move(m));
    }
  return OperatorTuple(a.n(), d, std::move(f));
}

OperatorTuple ampliation(const std::vector<OperatorTuple>& tuples, const Tolerances& tol) {
  if (tuples.empty()) fail(ErrorKind::invalid_argument, "ampliation needs at least one tuple");
  std::vector<int> dims;
  for (const auto& t : tuples) {
    if (!check_polyball(t, tol).member) fail(ErrorKind::not_in_polyball, "ampliation input not in its polyball");
    dims.push_back(t.dimH());
  }
  std::vector<int> n;
  std::vector<std::vector<Matrix>> f;
  int total = 1;
  for (int d : dims) total *= d;
  for (std::size_t r = 0; r < tuples.size(); ++r) {
    int before = 1, after = 1;
    for (std::size_t s = 0; s < r; ++s) before *= dims[s];
    for (std::size_t s = r + 1; s < dims.size(); ++s) after *= dims[s];
    const Matrix ib = Matrix::Identity(before, before), ia = Matrix::Identity(after, after);
    for (int i = 0; i < tuples[r].k(); ++i) {
      n.push_back(tuples[r].n()[i]);
      std::vector<Matrix> entries;
      for (const auto& x : tuples[r].factor(i)) entries.push_back(kron(kron(ib, x), ia));
      f.push_back(std::move(entries));
    }
  }
  OperatorTuple out(std::move(n), total, std::move(f), tol);
  Matrix expected = defect_operator(tuples[0]);
  for (std::size_t r = 1; r < tuples.size(); ++r) expected = kron(expected, defect_operator(tuples[r]));
  const double resid = (defect_operator(out) - expected).norm();
  if (resid > 1e-10 * std::max(1.0, expected.norm()))
    fail(ErrorKind::numerical_instability, "ampliation defect does not factor (residual " +
                                               std::to_string(resid) + ")");
  return out;
}

Matrix cp_superoperator(const OperatorTuple& t, int i) {
  if (t.dimH() > 16) fail(ErrorKind::invalid_argument, "superoperator path limited to dimH <= 16");
  // vec(X Y X^*) = (conj(X) kron X) vec(Y) for column stacking
  const int d = t.dimH();
  Matrix out = Matrix::Zero(d * d, d * d);
  for (const auto& x : t.factor(i)) out += kron(x.conjugate(), x);
  return out;
}

OperatorTuple zero_tuple(std::vector<int> n, int dimH) {
  std::vector<std::vector<Matrix>> f;
  for (int ni : n) f.emplace_back(ni, Matrix::Zero(dimH, dimH));
  return OperatorTuple(std::move(n), dimH, std::move(f));
}

}  // namespace polyball
