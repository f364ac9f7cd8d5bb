#include "polyball/berezin.hpp"

#include <cmath>

#include "polyball/errors.hpp"

namespace polyball {

namespace {

// Per-factor row factors: full model T^*_beta for |beta| = d in word order,
// symmetric model sqrt(d!/alpha!) T^{*alpha} in monomial order.
std::vector<std::vector<Matrix>> factor_rows(const OperatorTuple& t, int i, int cap, FockModel model) {
  const int n = t.n()[i];
  const int d0 = t.dimH();
  std::vector<Matrix> adj;
  for (const auto& x : t.factor(i)) adj.push_back(x.adjoint());
  std::vector<std::vector<Matrix>> rows(cap + 1);
  rows[0] = {Matrix::Identity(d0, d0)};
  if (model == FockModel::full) {
    for (int d = 1; d <= cap; ++d) {
      const auto& prev = rows[d - 1];
      rows[d].reserve(prev.size() * n);
      for (std::size_t p = 0; p < prev.size(); ++p)
        for (int j = 0; j < n; ++j) rows[d].push_back(adj[j] * prev[p]);
    }
    return rows;
  }
  std::vector<std::vector<Matrix>> plain(cap + 1);
  plain[0] = rows[0];
  for (int d = 1; d <= cap; ++d) {
    for (const auto& alpha : enumerate_monomials(n, d)) {
      int j = 0;
      while (alpha[j] == 0) ++j;
      auto lower = alpha;
      --lower[j];
      plain[d].push_back(adj[j] * plain[d - 1][monomial_index(lower)]);
      rows[d].push_back(plain[d].back() / std::sqrt(monomial_norm_sq(alpha)));
    }
  }
  return rows;
}

double diag_weight(const FockTruncation& ft, const MultiDegree& s) { return 1.0 / static_cast<double>(ft.grade_dim(s)); }

// K K^*, optionally only its diagonal blocks on grades <= bound
GradedOperator kernel_outer(const BerezinKernel& kb, bool diagonal_only, const MultiDegree* bound = nullptr) {
  const auto& ft = kb.truncation;
  GradedOperator y(ft, ft);
  for (int r = 0; r < ft.grade_count(); ++r)
    for (int c = 0; c < ft.grade_count(); ++c) {
      if (diagonal_only && r != c) continue;
      if (bound && !(ft.grades()[r].leq(*bound) && ft.grades()[c].leq(*bound))) continue;
      y.set_block(r, c, kb.blocks[r] * kb.blocks[c].adjoint());
    }
  return y;
}

}  // namespace

Matrix BerezinKernel::gram() const {
  Matrix g = Matrix::Zero(tuple.dimH(), tuple.dimH());
  for (const auto& b : blocks) g.noalias() += b.adjoint() * b;
  return g;
}

Matrix BerezinKernel::dense() const {
  Matrix out(truncation.total_dim(), tuple.dimH());
  for (int g = 0; g < truncation.grade_count(); ++g)
    out.middleRows(truncation.offset(g), blocks[g].rows()) = blocks[g];
  return out;
}

const Matrix& BerezinKernel::block(const MultiDegree& q) const {
  const int g = truncation.grade_index(q);
  if (g < 0) fail(ErrorKind::invalid_argument, "grade outside the kernel truncation: " + q.str());
  return blocks[g];
}

BerezinKernel berezin_kernel(const OperatorTuple& t, const std::vector<int>& caps, const KernelOptions& opts) {
  BerezinKernel kb;
  kb.tuple = t;
  kb.defect = defect_data(t);
  if (opts.frame) {
    const Matrix& f = *opts.frame;
    if (f.rows() != t.dimH()) fail(ErrorKind::dimension_mismatch, "frame must have dimH rows");
    const double ortho = (f.adjoint() * f - Matrix::Identity(f.cols(), f.cols())).norm();
    const double range = (f * f.adjoint() * kb.defect.defect - kb.defect.defect).norm();
    if (ortho > 1e-8 || range > 1e-8 * std::max(1.0, kb.defect.defect.norm()) || f.cols() != kb.defect.rank)
      fail(ErrorKind::invalid_argument, "frame must be an orthonormal basis of the defect range");
    kb.frame = f;
  } else {
    kb.frame = kb.defect.range_basis;
  }
  const int r = static_cast<int>(kb.frame.cols());
  kb.truncation = FockTruncation(Shape(t.n(), caps), r, opts.model, opts.max_total);
  if (opts.model == FockModel::symmetric && t.intra_commutation_residual() > 1e-8)
    fail(ErrorKind::invalid_argument, "constrained kernel needs commuting entries within each factor");

  std::vector<std::vector<std::vector<Matrix>>> rows;
  for (int i = 0; i < t.k(); ++i) rows.push_back(factor_rows(t, i, caps[i], opts.model));
  const Matrix base = kb.frame.adjoint() * kb.defect.sqrt;

  const auto& ft = kb.truncation;
  kb.blocks.assign(ft.grade_count(), Matrix());
  parallel_for(static_cast<std::size_t>(ft.grade_count()), [&](std::size_t g) {
    const auto& q = ft.grades()[g];
    std::vector<Matrix> items{base};
    for (int i = 0; i < t.k(); ++i) {
      std::vector<Matrix> next;
      next.reserve(items.size() * rows[i][q[i]].size());
      for (const auto& x : items)
        for (const auto& w : rows[i][q[i]]) next.push_back(x * w);
      items.swap(next);
    }
    Matrix blk(static_cast<Eigen::Index>(items.size()) * r, t.dimH());
    for (std::size_t a = 0; a < items.size(); ++a) blk.middleRows(static_cast<Eigen::Index>(a) * r, r) = items[a];
    kb.blocks[g] = std::move(blk);
  });

  const Matrix id = Matrix::Identity(t.dimH(), t.dimH());
  for (int i = 0; i < t.k(); ++i) {
    const double v = spectral_norm(cp_power(t, i, caps[i] + 1, id));
    kb.tail_bound_max = std::max(kb.tail_bound_max, v);
    kb.tail_bound_sum += v;
  }
  kb.tail_residual = spectral_norm(id - kb.gram());
  return kb;
}

double verify_intertwining(const BerezinKernel& kb) {
  const auto& ft = kb.truncation;
  const auto& t = kb.tuple;
  double worst = 0.0;
  for (int g = 0; g < ft.grade_count(); ++g) {
    const auto& q = ft.grades()[g];
    for (int i = 0; i < t.k(); ++i) {
      const int up = ft.grade_index(q.plus_unit(i));
      if (up < 0) continue;
      for (int j = 1; j <= t.n()[i]; ++j) {
        const Matrix lhs = kb.blocks[g] * t.op(i, j - 1).adjoint();
        const Matrix rhs = apply_creation_adjoint(ft, i, j, q, kb.blocks[up]);
        worst = std::max(worst, spectral_norm(lhs - rhs));
      }
    }
  }
  return worst;
}

IdentityCheck connection_identity(const BerezinKernel& kb, const MultiDegree& q) {
  IdentityCheck c;
  const Matrix& b = kb.block(q);
  c.lhs = b.adjoint() * b;
  c.rhs = cp_multi(kb.tuple, q, kb.defect.defect);
  c.residual = spectral_norm(c.lhs - c.rhs);
  return c;
}

PsdVerdict has_characteristic_function(const BerezinKernel& kb, const Tolerances& tol) {
  const auto& ft = kb.truncation;
  const GradedOperator y = GradedOperator::identity(ft) - kernel_outer(kb, false);
  const Matrix d = defect_shift(y).dense_on(ft.interior_grades(1));
  PsdVerdict v;
  if (d.size() == 0) {
    v.verdict = true;
    return v;
  }
  const auto spec = hermitian_eig(d);
  v.min_eig = spec.values(0);
  const double scale = std::max({1.0, std::abs(spec.values(0)), std::abs(spec.values(spec.values.size() - 1))});
  v.verdict = v.min_eig >= -tol.psd * scale;
  return v;
}

TraceRoutes curvature_operator_trace(const BerezinKernel& kb, const MultiDegree& q) {
  const auto& ft = kb.truncation;
  if (!ft.contains(q)) fail(ErrorKind::invalid_argument, "grade outside the kernel truncation: " + q.str());
  const GradedOperator d = defect_shift(kernel_outer(kb, true, &q));
  TraceRoutes tr;
  for (int g = 0; g < ft.grade_count(); ++g) {
    const auto& s = ft.grades()[g];
    if (!s.leq(q)) continue;
    if (const Matrix* b = d.block(g, g)) tr.operator_route += b->trace().real() * diag_weight(ft, s);
  }
  const Matrix& b = kb.block(q);
  tr.grade_route = b.squaredNorm() * diag_weight(ft, q);
  tr.residual = std::abs(tr.operator_route - tr.grade_route);
  return tr;
}

GradedOperator multiplier_operator(const InnerMultiplier& psi, const FockTruncation& target_ft) {
  if (psi.n != target_ft.shape().n || psi.model != target_ft.model() || psi.target_dim != target_ft.coeff_dim())
    fail(ErrorKind::dimension_mismatch, "multiplier does not match the truncation");
  const FockTruncation src = target_ft.with_coeff_dim(psi.source_dim);
  const int k = target_ft.k();
  const int tdim = psi.target_dim, sdim = psi.source_dim;
  GradedOperator op(src, target_ft);
  for (const auto& [s, theta] : psi.coeffs) {
    if (theta.rows() != static_cast<Eigen::Index>(target_ft.grade_dim(s)) * tdim || theta.cols() != sdim)
      fail(ErrorKind::dimension_mismatch, "symbol coefficient has the wrong shape at " + s.str());
    for (int u_g = 0; u_g < src.grade_count(); ++u_g) {
      const auto& u = src.grades()[u_g];
      const int a_g = target_ft.grade_index(u + s);
      if (a_g < 0) continue;
      const auto& a = target_ft.grades()[a_g];
      // per-factor (source, symbol) -> (target, coefficient)
      std::vector<std::vector<std::pair<std::uint64_t, double>>> table(k);
      for (int i = 0; i < k; ++i) {
        const auto fu = target_ft.factor_dim(i, u[i]), fs = target_ft.factor_dim(i, s[i]);
        table[i].resize(fu * fs);
        if (psi.model == FockModel::full) {
          for (std::uint64_t mu = 0; mu < fu; ++mu)
            for (std::uint64_t ga = 0; ga < fs; ++ga) table[i][mu * fs + ga] = {mu * fs + ga, 1.0};
        } else {
          const auto mus = enumerate_monomials(target_ft.shape().n[i], u[i]);
          const auto gas = enumerate_monomials(target_ft.shape().n[i], s[i]);
          for (std::uint64_t mu = 0; mu < fu; ++mu)
            for (std::uint64_t ga = 0; ga < fs; ++ga) {
              auto sum = mus[mu];
              for (std::size_t j = 0; j < sum.size(); ++j) sum[j] += gas[ga][j];
              const double c = std::sqrt(monomial_norm_sq(sum) / (monomial_norm_sq(mus[mu]) * monomial_norm_sq(gas[ga])));
              table[i][mu * fs + ga] = {monomial_index(sum), c};
            }
        }
      }
      Matrix blk = Matrix::Zero(target_ft.block_dim(a_g), src.block_dim(u_g));
      const std::uint64_t gu = target_ft.grade_dim(u), gs = target_ft.grade_dim(s);
      for (std::uint64_t S = 0; S < gu; ++S)
        for (std::uint64_t G = 0; G < gs; ++G) {
          std::uint64_t rs = S, rg = G, tidx = 0, tmul = 1;
          double coef = 1.0;
          for (int i = k - 1; i >= 0; --i) {
            const auto fu = target_ft.factor_dim(i, u[i]), fs = target_ft.factor_dim(i, s[i]);
            const auto mu = rs % fu, ga = rg % fs;
            rs /= fu;
            rg /= fs;
            const auto& [ti, ci] = table[i][mu * fs + ga];
            tidx += ti * tmul;
            tmul *= target_ft.factor_dim(i, a[i]);
            coef *= ci;
          }
          blk.block(static_cast<Eigen::Index>(tidx) * tdim, static_cast<Eigen::Index>(S) * sdim, tdim, sdim) +=
              coef * theta.block(static_cast<Eigen::Index>(G) * tdim, 0, tdim, sdim);
        }
      op.add_to_block(a_g, u_g, blk);
    }
  }
  return op;
}

double multiplier_intertwining_residual(const InnerMultiplier& psi, const std::vector<int>& caps) {
  const FockTruncation tgt(Shape(psi.n, caps), psi.target_dim, psi.model);
  const FockTruncation src = tgt.with_coeff_dim(psi.source_dim);
  const GradedOperator op = multiplier_operator(psi, tgt);
  double worst = 0.0;
  for (int i = 0; i < tgt.k(); ++i)
    for (int j = 1; j <= psi.n[i]; ++j) {
      const GradedOperator diff = op * creation_op(src, i, j) - creation_op(tgt, i, j) * op;
      worst = std::max(worst, diff.max_block_norm());
    }
  return worst;
}

double multiplier_isometry_residual(const InnerMultiplier& psi, const std::vector<int>& caps) {
  const FockTruncation tgt(Shape(psi.n, caps), psi.target_dim, psi.model);
  const GradedOperator op = multiplier_operator(psi, tgt);
  const GradedOperator g = op.adjoint() * op;
  const auto& src = g.domain();
  std::vector<int> inner;
  for (int u = 0; u < src.grade_count(); ++u) {
    bool ok = true;
    for (const auto& [s, theta] : psi.coeffs) ok = ok && tgt.contains(src.grades()[u] + s);
    if (ok) inner.push_back(u);
  }
  const Matrix d = g.dense_on(inner);
  if (d.size() == 0) return 0.0;
  return spectral_norm(d - Matrix::Identity(d.rows(), d.cols()));
}

IndexCheck index_formula_check(const BerezinKernel& kb, const InnerMultiplier& theta, const MultiDegree& q,
                               double completion_tol) {
  const auto& ft = kb.truncation;
  if (!ft.contains(q)) fail(ErrorKind::invalid_argument, "grade outside the kernel truncation: " + q.str());
  IndexCheck ic;
  ic.rank = ft.coeff_dim();
  GradedOperator sum = kernel_outer(kb, false) - GradedOperator::identity(ft);
  if (!theta.coeffs.empty()) {
    if (theta.target_dim != ft.coeff_dim())
      fail(ErrorKind::dimension_mismatch, "theta target dimension must equal the defect rank");
    for (const auto& [s, c] : theta.coeffs)
      if (s.total() < 0) fail(ErrorKind::invalid_argument, "bad symbol degree");
    const GradedOperator op = multiplier_operator(theta, ft);
    sum = sum + op * op.adjoint();
  }
  ic.completion_residual = sum.max_block_norm();
  if (ic.completion_residual > completion_tol)
    fail(ErrorKind::completion_failed,
         "K K^* + Theta Theta^* differs from I (residual " + std::to_string(ic.completion_residual) + ")");
  ic.lhs = kb.block(q).squaredNorm() * diag_weight(ft, q);
  for (const auto& [s, c] : theta.coeffs)
    if (s.leq(q)) ic.theta_term += c.squaredNorm() * diag_weight(ft, s);
  ic.rhs = ic.rank - ic.theta_term;
  ic.residual = std::abs(ic.lhs - ic.rhs);
  return ic;
}

}  // namespace polyball
