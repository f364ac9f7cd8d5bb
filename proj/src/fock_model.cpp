#include "polyball/fock_model.hpp"

#include <cmath>

#include "polyball/errors.hpp"

namespace polyball {

const char* to_string(FockModel m) { return m == FockModel::full ? "full" : "symmetric"; }

FockTruncation::FockTruncation(Shape shape, int coeff_dim, FockModel model, int max_total)
    : shape_(std::move(shape)), coeff_dim_(coeff_dim), model_(model), max_total_(max_total) {
  if (coeff_dim_ < 0) fail(ErrorKind::invalid_argument, "coefficient dimension must be nonnegative");
  for_each_leq(shape_.cap_degree(), [&](const MultiDegree& q) {
    if (max_total_ >= 0 && q.total() > max_total_) return;
    index_.emplace(q, static_cast<int>(grades_.size()));
    grades_.push_back(q);
    offsets_.push_back(total_);
    const std::uint64_t d = checked_mul(grade_dim(q), static_cast<std::uint64_t>(coeff_dim_));
    if (d > (1ull << 40)) fail(ErrorKind::overflow, "truncation too large to materialize");
    block_dims_.push_back(static_cast<Eigen::Index>(d));
    total_ += static_cast<Eigen::Index>(d);
  });
}

std::uint64_t FockTruncation::factor_dim(int i, int d) const {
  const int n = shape_.n[i];
  return model_ == FockModel::full ? checked_pow(n, d) : binomial(d + n - 1, n - 1);
}

std::uint64_t FockTruncation::grade_dim(const MultiDegree& q) const {
  std::uint64_t r = 1;
  for (int i = 0; i < k(); ++i) r = checked_mul(r, factor_dim(i, q[i]));
  return r;
}

Eigen::Index FockTruncation::block_dim(const MultiDegree& q) const {
  return static_cast<Eigen::Index>(grade_dim(q) * static_cast<std::uint64_t>(coeff_dim_));
}

int FockTruncation::grade_index(const MultiDegree& q) const {
  auto it = index_.find(q);
  return it == index_.end() ? -1 : it->second;
}

std::vector<int> FockTruncation::interior_grades(int margin) const {
  std::vector<int> out;
  for (int g = 0; g < grade_count(); ++g) {
    const auto& q = grades_[g];
    bool ok = true;
    for (int i = 0; i < k(); ++i) ok = ok && q[i] <= shape_.caps[i] - margin;
    if (max_total_ >= 0) ok = ok && q.total() <= max_total_ - margin;
    if (ok) out.push_back(g);
  }
  return out;
}

std::vector<LocalEntry> FockTruncation::local_creation(int i, int j, int d) const {
  const int n = shape_.n[i];
  if (j < 1 || j > n) fail(ErrorKind::invalid_argument, "generator index out of range");
  std::vector<LocalEntry> out;
  if (model_ == FockModel::full) {
    const std::uint64_t m = checked_pow(n, d);
    out.reserve(m);
    for (std::uint64_t w = 0; w < m; ++w) out.push_back({static_cast<std::uint64_t>(j - 1) * m + w, w, 1.0});
    return out;
  }
  // B_{i,j} z^a = sqrt((a_j+1)/(d+1)) z^{a+e_j} in the normalized monomial basis
  const auto monos = enumerate_monomials(n, d);
  out.reserve(monos.size());
  for (std::size_t c = 0; c < monos.size(); ++c) {
    auto beta = monos[c];
    const double v = std::sqrt(static_cast<double>(beta[j - 1] + 1) / static_cast<double>(d + 1));
    ++beta[j - 1];
    out.push_back({monomial_index(beta), c, v});
  }
  return out;
}

FockTruncation::Strides FockTruncation::strides(const MultiDegree& q, int i) const {
  Strides s{1, factor_dim(i, q[i]), static_cast<std::uint64_t>(coeff_dim_)};
  for (int t = 0; t < i; ++t) s.pre *= factor_dim(t, q[t]);
  for (int t = i + 1; t < k(); ++t) s.post *= factor_dim(t, q[t]);
  return s;
}

bool FockTruncation::same_layout(const FockTruncation& other) const {
  return shape_.n == other.shape_.n && shape_.caps == other.shape_.caps && coeff_dim_ == other.coeff_dim_ &&
         model_ == other.model_ && max_total_ == other.max_total_;
}

Matrix apply_creation(const FockTruncation& ft, int i, int j, const MultiDegree& q, const Matrix& x) {
  const MultiDegree up = q.plus_unit(i);
  const auto s = ft.strides(q, i);
  const std::uint64_t local_up = ft.factor_dim(i, up[i]);
  if (x.rows() != static_cast<Eigen::Index>(s.pre * s.local * s.post))
    fail(ErrorKind::dimension_mismatch, "apply_creation: row count does not match grade");
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(s.pre * local_up * s.post), x.cols());
  const auto post = static_cast<Eigen::Index>(s.post);
  for (const auto& e : ft.local_creation(i, j, q[i]))
    for (std::uint64_t a = 0; a < s.pre; ++a)
      out.middleRows(static_cast<Eigen::Index>((a * local_up + e.row) * s.post), post) +=
          e.value * x.middleRows(static_cast<Eigen::Index>((a * s.local + e.col) * s.post), post);
  return out;
}

Matrix apply_creation_adjoint(const FockTruncation& ft, int i, int j, const MultiDegree& q, const Matrix& x) {
  const MultiDegree up = q.plus_unit(i);
  const auto s = ft.strides(q, i);
  const std::uint64_t local_up = ft.factor_dim(i, up[i]);
  if (x.rows() != static_cast<Eigen::Index>(s.pre * local_up * s.post))
    fail(ErrorKind::dimension_mismatch, "apply_creation_adjoint: row count does not match grade");
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(s.pre * s.local * s.post), x.cols());
  const auto post = static_cast<Eigen::Index>(s.post);
  for (const auto& e : ft.local_creation(i, j, q[i]))
    for (std::uint64_t a = 0; a < s.pre; ++a)
      out.middleRows(static_cast<Eigen::Index>((a * s.local + e.col) * s.post), post) +=
          e.value * x.middleRows(static_cast<Eigen::Index>((a * local_up + e.row) * s.post), post);
  return out;
}

GradedOperator::GradedOperator(FockTruncation domain, FockTruncation codomain)
    : domain_(std::move(domain)), codomain_(std::move(codomain)) {}

GradedOperator GradedOperator::identity(const FockTruncation& ft) {
  GradedOperator op(ft, ft);
  for (int g = 0; g < ft.grade_count(); ++g)
    op.set_block(g, g, Matrix::Identity(ft.block_dim(g), ft.block_dim(g)));
  return op;
}

const Matrix* GradedOperator::block(int row_grade, int col_grade) const {
  auto it = blocks_.find({row_grade, col_grade});
  return it == blocks_.end() ? nullptr : &it->second;
}

void GradedOperator::set_block(int row_grade, int col_grade, Matrix m) {
  if (m.rows() != codomain_.block_dim(row_grade) || m.cols() != domain_.block_dim(col_grade))
    fail(ErrorKind::dimension_mismatch, "block shape does not match grade dimensions");
  blocks_[{row_grade, col_grade}] = std::move(m);
}

void GradedOperator::add_to_block(int row_grade, int col_grade, const Matrix& m) {
  auto it = blocks_.find({row_grade, col_grade});
  if (it == blocks_.end())
    set_block(row_grade, col_grade, m);
  else
    it->second += m;
}

GradedOperator GradedOperator::adjoint() const {
  GradedOperator out(codomain_, domain_);
  for (const auto& [key, m] : blocks_) out.blocks_[{key.second, key.first}] = m.adjoint();
  return out;
}

GradedOperator GradedOperator::operator*(const GradedOperator& rhs) const {
  if (!domain_.same_layout(rhs.codomain_)) fail(ErrorKind::dimension_mismatch, "operator product layout");
  GradedOperator out(rhs.domain_, codomain_);
  std::map<int, std::vector<std::pair<int, const Matrix*>>> by_row;
  for (const auto& [key, m] : rhs.blocks_) by_row[key.first].push_back({key.second, &m});
  for (const auto& [key, a] : blocks_) {
    auto it = by_row.find(key.second);
    if (it == by_row.end()) continue;
    for (const auto& [col, b] : it->second) out.add_to_block(key.first, col, a * (*b));
  }
  return out;
}

GradedOperator GradedOperator::operator+(const GradedOperator& rhs) const {
  if (!domain_.same_layout(rhs.domain_) || !codomain_.same_layout(rhs.codomain_))
    fail(ErrorKind::dimension_mismatch, "operator sum layout");
  GradedOperator out = *this;
  for (const auto& [key, m] : rhs.blocks_) out.add_to_block(key.first, key.second, m);
  return out;
}

GradedOperator GradedOperator::operator-(const GradedOperator& rhs) const { return *this + rhs.scaled(-1.0); }

GradedOperator GradedOperator::scaled(cplx s) const {
  GradedOperator out = *this;
  for (auto& [key, m] : out.blocks_) m *= s;
  return out;
}

cplx GradedOperator::trace() const {
  cplx t = 0.0;
  for (const auto& [key, m] : blocks_)
    if (key.first == key.second) t += m.trace();
  return t;
}

Matrix GradedOperator::to_dense() const {
  Matrix out = Matrix::Zero(codomain_.total_dim(), domain_.total_dim());
  for (const auto& [key, m] : blocks_)
    out.block(codomain_.offset(key.first), domain_.offset(key.second), m.rows(), m.cols()) = m;
  return out;
}

Matrix GradedOperator::dense_on(const std::vector<int>& grades) const {
  std::vector<Eigen::Index> offs;
  Eigen::Index total = 0;
  std::map<int, std::size_t> pos;
  for (std::size_t a = 0; a < grades.size(); ++a) {
    pos[grades[a]] = a;
    offs.push_back(total);
    total += codomain_.block_dim(grades[a]);
  }
  Matrix out = Matrix::Zero(total, total);
  for (const auto& [key, m] : blocks_) {
    auto r = pos.find(key.first), c = pos.find(key.second);
    if (r == pos.end() || c == pos.end()) continue;
    out.block(offs[r->second], offs[c->second], m.rows(), m.cols()) = m;
  }
  return out;
}

double GradedOperator::max_block_norm() const {
  double worst = 0.0;
  for (const auto& [key, m] : blocks_) worst = std::max(worst, m.norm());
  return worst;
}

GradedOperator creation_op(const FockTruncation& ft, int i, int j) {
  GradedOperator op(ft, ft);
  for (int g = 0; g < ft.grade_count(); ++g) {
    const auto& q = ft.grades()[g];
    const int up = ft.grade_index(q.plus_unit(i));
    if (up < 0) continue;  // cap grade: truncated to zero
    op.set_block(up, g, apply_creation(ft, i, j, q, Matrix::Identity(ft.block_dim(g), ft.block_dim(g))));
  }
  return op;
}

namespace {
GradedOperator diagonal_projection(const FockTruncation& ft, const std::function<double(const MultiDegree&)>& w) {
  GradedOperator op(ft, ft);
  for (int g = 0; g < ft.grade_count(); ++g) {
    const double v = w(ft.grades()[g]);
    if (v != 0.0) op.set_block(g, g, v * Matrix::Identity(ft.block_dim(g), ft.block_dim(g)));
  }
  return op;
}
}  // namespace

GradedOperator graded_projection(const FockTruncation& ft, const MultiDegree& q) {
  if (!ft.contains(q)) fail(ErrorKind::invalid_argument, "grade beyond caps: " + q.str());
  return diagonal_projection(ft, [&](const MultiDegree& s) { return s == q ? 1.0 : 0.0; });
}

GradedOperator cumulative_projection(const FockTruncation& ft, const MultiDegree& q) {
  if (!ft.shape().within_caps(q)) fail(ErrorKind::invalid_argument, "grade beyond caps: " + q.str());
  return diagonal_projection(ft, [&](const MultiDegree& s) { return s.leq(q) ? 1.0 : 0.0; });
}

GradedOperator total_degree_projection(const FockTruncation& ft, int m) {
  return diagonal_projection(ft, [&](const MultiDegree& s) { return s.total() <= m ? 1.0 : 0.0; });
}

GradedOperator vacuum_projection(const FockTruncation& ft) {
  return diagonal_projection(ft, [&](const MultiDegree& s) { return s.total() == 0 ? 1.0 : 0.0; });
}

GradedOperator n_weight(const FockTruncation& ft, const MultiDegree& q) {
  if (!ft.shape().within_caps(q)) fail(ErrorKind::invalid_argument, "grade beyond caps: " + q.str());
  return diagonal_projection(ft, [&](const MultiDegree& s) {
    return s.leq(q) ? 1.0 / static_cast<double>(ft.grade_dim(s)) : 0.0;
  });
}

GradedOperator apply_cp_shift(const GradedOperator& y, int i) {
  const auto& ft = y.domain();
  if (!ft.same_layout(y.codomain())) fail(ErrorKind::dimension_mismatch, "apply_cp_shift needs a square operator");
  std::vector<std::pair<GradedOperator::Key, const Matrix*>> work;
  for (const auto& [key, m] : y.blocks()) work.push_back({key, &m});
  std::vector<std::pair<GradedOperator::Key, Matrix>> results(work.size());
  std::vector<char> present(work.size(), 0);
  parallel_for(work.size(), [&](std::size_t w) {
    const auto [r, c] = work[w].first;
    const auto& qr = ft.grades()[r];
    const auto& qc = ft.grades()[c];
    const int r_up = ft.grade_index(qr.plus_unit(i));
    const int c_up = ft.grade_index(qc.plus_unit(i));
    if (r_up < 0 || c_up < 0) return;
    Matrix acc = Matrix::Zero(ft.block_dim(r_up), ft.block_dim(c_up));
    for (int j = 1; j <= ft.shape().n[i]; ++j) {
      const Matrix left = apply_creation(ft, i, j, qr, *work[w].second);
      acc += apply_creation(ft, i, j, qc, left.adjoint()).adjoint();
    }
    results[w] = {{r_up, c_up}, std::move(acc)};
    present[w] = 1;
  });
  GradedOperator out(ft, ft);
  for (std::size_t w = 0; w < work.size(); ++w)
    if (present[w]) out.add_to_block(results[w].first.first, results[w].first.second, results[w].second);
  return out;
}

GradedOperator defect_shift(const GradedOperator& y, std::vector<int> p) {
  const int k = y.domain().k();
  if (p.empty()) p.assign(k, 1);
  if (static_cast<int>(p.size()) != k) fail(ErrorKind::dimension_mismatch, "p has wrong length");
  GradedOperator out = y;
  for (int i = k - 1; i >= 0; --i)
    if (p[i]) out = out - apply_cp_shift(out, i);
  return out;
}

}  // namespace polyball
