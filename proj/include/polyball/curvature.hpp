#pragma once

// Curvature estimators: per-grade normalized traces and the corner, Cesaro
// and defect-product sequences built from them.

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "polyball/cp_calculus.hpp"
#include "polyball/fock_model.hpp"

namespace polyball {

struct CurvEstimate {
  FockModel model = FockModel::full;
  std::vector<int> n;
  int q_max = 0;
  std::vector<MultiDegree> grades;           // the box {q <= (Q..Q)}, lexicographic
  std::vector<double> grade_values;          // x_q
  std::vector<double> defect_product_grid;   // sum_{s<=q} x_s tr(s) / sum_{s<=q} tr(s), per grade
  std::vector<double> corner_seq;            // x_{(Q..Q)}, Q = 0..q_max
  std::vector<double> cesaro_seq;            // mean of x_q over |q| <= m, m = 0..q_max
  std::vector<double> layer_seq;             // mean of x_q over |q| = m
  std::vector<double> defect_product_seq;    // defect-product form at the corners
  std::vector<double> partial_sum_residual;  // product form vs partial sums (tuples only)
  std::vector<double> arveson_seq;           // n_1!..n_k! * partial sum / Q^{n_1+..+n_k}; entry 0 unused
  double estimate = 0.0;
  double error_proxy = 0.0;
  bool monotone_ok = true;
  double worst_monotone_violation = 0.0;
  double formula_spread = 0.0;  // max pairwise gap of corner/cesaro/defect-product at q_max
  std::optional<double> extrapolated;
  std::vector<std::string> caveats;

  double value(const MultiDegree& q) const;
  int k() const { return static_cast<int>(n.size()); }
};

struct EstimateOptions {
  FockModel model = FockModel::full;
  bool extrapolate = false;
  /// Throw numerical_instability on monotonicity violations above 1e-10.
  bool assert_monotone = true;
};

/// trace[Phi^q(Delta_T(I))] / trace P_q (trace Q_q for the symmetric model).
double grade_trace(const OperatorTuple& t, const MultiDegree& q, FockModel model = FockModel::full);

/// Builds every sequence from per-grade values on the box; `partial_sum_literal`
/// optionally supplies trace[(id-Phi_1^{Q+1})o..(I)] per corner Q for cross-checking.
CurvEstimate assemble_estimate(FockModel model, const std::vector<int>& n, int q_max, std::vector<double> values,
                               const EstimateOptions& opts, const std::vector<double>* partial_sum_literal = nullptr);

CurvEstimate curvature_estimate(const OperatorTuple& t, int q_max, const EstimateOptions& opts = {});

struct BoundsReport {
  double lower = 0.0;
  double curvature = 0.0;
  double trace_defect = 0.0;
  int rank = 0;
};
/// 0 <= curv <= trace Delta <= rank; throws numerical_instability if the chain breaks.
BoundsReport bounds_report(const OperatorTuple& t, const CurvEstimate& est);

/// Columns q_1..q_k, x_q, cesaro, defect_product; cesaro is left empty when |q| > q_max.
void write_csv(std::ostream& os, const CurvEstimate& est);

/// Format used for every floating value written by the library (17 significant digits).
std::string fmt(double v);

}  // namespace polyball
