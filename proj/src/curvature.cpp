#include "polyball/curvature.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "polyball/errors.hpp"

namespace polyball {

namespace {

double model_grade_dim(FockModel model, const std::vector<int>& n, const MultiDegree& q) {
  double d = 1.0;
  for (std::size_t i = 0; i < n.size(); ++i)
    d *= model == FockModel::full ? std::pow(static_cast<double>(n[i]), q[static_cast<int>(i)])
                                  : static_cast<double>(binomial(q[static_cast<int>(i)] + n[i] - 1, n[i] - 1));
  return d;
}

std::size_t box_index(const MultiDegree& q, int q_max) {
  std::size_t idx = 0;
  for (int i = 0; i < q.k(); ++i) idx = idx * static_cast<std::size_t>(q_max + 1) + static_cast<std::size_t>(q[i]);
  return idx;
}

}  // namespace

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

double CurvEstimate::value(const MultiDegree& q) const {
  for (int i = 0; i < q.k(); ++i)
    if (q[i] > q_max) fail(ErrorKind::invalid_argument, "grade outside the estimate box: " + q.str());
  return grade_values[box_index(q, q_max)];
}

double grade_trace(const OperatorTuple& t, const MultiDegree& q, FockModel model) {
  const Matrix d = defect_data(t).defect;
  const cplx tr = cp_multi(t, q, d).trace();
  if (std::abs(tr.imag()) > 1e-12 * std::max(1.0, std::abs(tr.real())))
    fail(ErrorKind::numerical_instability, "grade trace has a non-negligible imaginary part");
  return tr.real() / model_grade_dim(model, t.n(), q);
}

CurvEstimate assemble_estimate(FockModel model, const std::vector<int>& n, int q_max, std::vector<double> values,
                               const EstimateOptions& opts, const std::vector<double>* partial_sum_literal) {
  CurvEstimate e;
  e.model = model;
  e.n = n;
  e.q_max = q_max;
  const int k = static_cast<int>(n.size());
  e.grades = multidegrees_leq(MultiDegree::constant(k, q_max));
  if (values.size() != e.grades.size()) fail(ErrorKind::dimension_mismatch, "one value per box grade required");
  e.grade_values = std::move(values);

  // monotonicity in each coordinate
  for (std::size_t g = 0; g < e.grades.size(); ++g) {
    const auto& q = e.grades[g];
    for (int i = 0; i < k; ++i) {
      if (q[i] == 0) continue;
      const double lower = e.grade_values[box_index(q.minus_unit(i), q_max)];
      const double excess = e.grade_values[g] - lower;
      if (excess > 1e-12 * std::max(1.0, std::abs(lower))) {
        e.monotone_ok = false;
        e.worst_monotone_violation = std::max(e.worst_monotone_violation, excess);
      }
    }
  }
  if (opts.assert_monotone && e.worst_monotone_violation > 1e-10)
    fail(ErrorKind::numerical_instability,
         "per-grade values increase along a coordinate by " + fmt(e.worst_monotone_violation));

  // partial sums of trace values and trace weights over {s <= q}, by inclusion-exclusion on the box
  const std::size_t box = e.grades.size();
  std::vector<double> weight(box), num(box, 0.0), den(box, 0.0);
  for (std::size_t g = 0; g < box; ++g) weight[g] = model_grade_dim(model, n, e.grades[g]);
  for (std::size_t g = 0; g < box; ++g) {
    num[g] = e.grade_values[g] * weight[g];
    den[g] = weight[g];
  }
  for (int i = 0; i < k; ++i)
    for (std::size_t g = 0; g < box; ++g) {
      const auto& q = e.grades[g];
      if (q[i] == 0) continue;
      const std::size_t prev = box_index(q.minus_unit(i), q_max);
      num[g] += num[prev];
      den[g] += den[prev];
    }
  e.defect_product_grid.resize(box);
  for (std::size_t g = 0; g < box; ++g) e.defect_product_grid[g] = num[g] / den[g];

  std::vector<double> layer_sum(q_max + 1, 0.0);
  std::vector<double> layer_cnt(q_max + 1, 0.0);
  for (std::size_t g = 0; g < box; ++g) {
    const int m = e.grades[g].total();
    if (m > q_max) continue;
    layer_sum[m] += e.grade_values[g];
    layer_cnt[m] += 1.0;
  }
  double cum = 0.0;
  for (int m = 0; m <= q_max; ++m) {
    const auto sc = simplex_count(m, k);
    cum += layer_sum[m];
    e.layer_seq.push_back(layer_sum[m] / static_cast<double>(sc.layer));
    e.cesaro_seq.push_back(cum / static_cast<double>(sc.cumulative));
  }

  double fact = 1.0;
  int power = 0;
  for (int ni : n) {
    for (int j = 2; j <= ni; ++j) fact *= j;
    power += ni;
  }
  for (int Q = 0; Q <= q_max; ++Q) {
    const std::size_t c = box_index(MultiDegree::constant(k, Q), q_max);
    e.corner_seq.push_back(e.grade_values[c]);
    e.defect_product_seq.push_back(e.defect_product_grid[c]);
    e.arveson_seq.push_back(Q == 0 ? 0.0 : fact * num[c] / std::pow(static_cast<double>(Q), power));
    if (partial_sum_literal)
      e.partial_sum_residual.push_back(std::abs((*partial_sum_literal)[Q] - num[c]));
  }

  e.estimate = e.corner_seq.back();
  e.error_proxy = q_max > 0 ? e.corner_seq[q_max - 1] - e.corner_seq[q_max] : 0.0;
  const double a = e.corner_seq.back(), b = e.cesaro_seq.back(), d = e.defect_product_seq.back();
  e.formula_spread = std::max({std::abs(a - b), std::abs(a - d), std::abs(b - d)});
  if (opts.extrapolate && q_max >= 2) {
    const double x0 = e.corner_seq[q_max - 2], x1 = e.corner_seq[q_max - 1], x2 = e.corner_seq[q_max];
    const double denom = (x2 - x1) - (x1 - x0);
    e.extrapolated = std::abs(denom) > 1e-300 ? x2 - (x2 - x1) * (x2 - x1) / denom : x2;
  }
  return e;
}

CurvEstimate curvature_estimate(const OperatorTuple& t, int q_max, const EstimateOptions& opts) {
  if (q_max < 0) fail(ErrorKind::invalid_argument, "q_max must be nonnegative");
  const auto verdict = check_polyball(t);
  if (!verdict.member)
    fail(ErrorKind::not_in_polyball, "tuple is not in the polyball (worst eigenvalue " + fmt(verdict.worst_eig) + ")");
  const Matrix delta = defect_data(t).defect;
  const int k = t.k();
  const auto grades = multidegrees_leq(MultiDegree::constant(k, q_max));
  std::vector<Matrix> phi(grades.size());
  // Phi^q(Delta) from Phi^{q - e_i}(Delta), i the first nonzero coordinate;
  // layers by total degree run one after another.
  std::vector<std::vector<std::size_t>> layers(static_cast<std::size_t>(k * q_max + 1));
  for (std::size_t g = 0; g < grades.size(); ++g) layers[grades[g].total()].push_back(g);
  phi[0] = delta;
  for (std::size_t m = 1; m < layers.size(); ++m) {
    const auto& layer = layers[m];
    parallel_for(layer.size(), [&](std::size_t a) {
      const auto& q = grades[layer[a]];
      int i = 0;
      while (q[i] == 0) ++i;
      phi[layer[a]] = cp_apply(t, i, phi[box_index(q.minus_unit(i), q_max)]);
    });
  }
  std::vector<double> values(grades.size());
  for (std::size_t g = 0; g < grades.size(); ++g) {
    const cplx tr = phi[g].trace();
    if (std::abs(tr.imag()) > 1e-12 * std::max(1.0, std::abs(tr.real())))
      fail(ErrorKind::numerical_instability, "grade trace has a non-negligible imaginary part");
    values[g] = tr.real() / model_grade_dim(opts.model, t.n(), grades[g]);
  }
  std::vector<double> literal;
  const Matrix id = Matrix::Identity(t.dimH(), t.dimH());
  for (int Q = 0; Q <= q_max; ++Q) {
    Matrix m = id;
    for (int i = k - 1; i >= 0; --i) m = m - cp_power(t, i, Q + 1, m);
    literal.push_back(m.trace().real());
  }
  return assemble_estimate(opts.model, t.n(), q_max, std::move(values), opts, &literal);
}

BoundsReport bounds_report(const OperatorTuple& t, const CurvEstimate& est) {
  BoundsReport b;
  const auto d = defect_data(t);
  b.curvature = est.estimate;
  b.trace_defect = d.defect.trace().real();
  b.rank = d.rank;
  const double slack = 1e-10 * std::max(1.0, static_cast<double>(b.rank));
  if (b.curvature < -slack || b.curvature > b.trace_defect + slack || b.trace_defect > b.rank + slack)
    fail(ErrorKind::numerical_instability, "bounds chain 0 <= curv <= trace <= rank violated: " + fmt(b.curvature) +
                                               ", " + fmt(b.trace_defect) + ", " + std::to_string(b.rank));
  return b;
}

void write_csv(std::ostream& os, const CurvEstimate& est) {
  for (int i = 0; i < est.k(); ++i) os << "q_" << (i + 1) << ',';
  os << "x_q,cesaro,defect_product\n";
  for (std::size_t g = 0; g < est.grades.size(); ++g) {
    const auto& q = est.grades[g];
    for (int i = 0; i < est.k(); ++i) os << q[i] << ',';
    os << fmt(est.grade_values[g]) << ',';
    if (q.total() <= est.q_max) os << fmt(est.cesaro_seq[q.total()]);
    os << ',' << fmt(est.defect_product_grid[g]) << '\n';
  }
}

}  // namespace polyball
