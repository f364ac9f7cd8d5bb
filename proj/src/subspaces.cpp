#include "polyball/subspaces.hpp"

#include <cmath>
#include <map>
#include <numeric>

#include "polyball/errors.hpp"

namespace polyball {

// n-adic expansions -----------------------------------------------------------

long double NAdicExpansion::partial_sum(int q) const {
  long double s = 0.0L;
  for (std::size_t p = 0; p < exponents.size(); ++p)
    if (exponents[p] <= q) s += digits[p] / std::pow(static_cast<long double>(base), exponents[p]);
  return s;
}

long double NAdicExpansion::sum() const {
  return partial_sum(exponents.empty() ? 0 : exponents.back());
}

NAdicExpansion construct_nadic(int n, double t, int n_terms) {
  if (n < 2) fail(ErrorKind::invalid_argument, "n-adic expansion needs n >= 2");
  if (!(t >= 0.0 && t < 1.0)) fail(ErrorKind::invalid_argument, "target t must lie in [0, 1)");
  if (n_terms < 1) fail(ErrorKind::invalid_argument, "need at least one term");
  NAdicExpansion e;
  e.base = n;
  e.target = t;
  long double x = 1.0L - static_cast<long double>(t);
  long double scale = 1.0L;
  for (int k = 1; k <= 200 && x > 0.0L && static_cast<int>(e.digits.size()) < n_terms; ++k) {
    scale *= n;
    const long double d = std::floor(x * scale);
    const int digit = static_cast<int>(std::min<long double>(d, n - 1));
    if (digit <= 0) continue;  // zero digits are skipped by advancing k
    e.exponents.push_back(k);
    e.digits.push_back(digit);
    x -= digit / scale;
  }
  e.remainder = x;
  e.tail_bound = x > 0.0L && !e.exponents.empty() ? 1.0L / std::pow(static_cast<long double>(n), e.exponents.back()) : 0.0L;
  if (x > 0.0L && e.exponents.empty()) e.tail_bound = 1.0L;
  return e;
}

// factor profiles ---------------------------------------------------------------

const char* to_string(FactorProfile::Kind k) {
  switch (k) {
    case FactorProfile::Kind::full: return "full";
    case FactorProfile::Kind::zero: return "zero";
    case FactorProfile::Kind::suffix: return "suffix";
    case FactorProfile::Kind::min_length: return "min_length";
    case FactorProfile::Kind::cur0: return "cur0";
    case FactorProfile::Kind::monomial_ideal: return "monomial_ideal";
  }
  return "full";
}

FactorProfile::Kind profile_kind_from_string(const std::string& s) {
  for (auto k : {FactorProfile::Kind::full, FactorProfile::Kind::zero, FactorProfile::Kind::suffix,
                 FactorProfile::Kind::min_length, FactorProfile::Kind::cur0, FactorProfile::Kind::monomial_ideal})
    if (s == to_string(k)) return k;
  fail(ErrorKind::parse_error, "unknown factor profile kind: " + s);
}

std::uint64_t FactorProfile::basis_dim(int q) const {
  return model == FockModel::full ? checked_pow(n, q) : binomial(q + n - 1, n - 1);
}

namespace {
bool divides(const std::vector<int>& g, const std::vector<int>& a) {
  for (std::size_t j = 0; j < g.size(); ++j)
    if (g[j] > a[j]) return false;
  return true;
}
}  // namespace

std::uint64_t FactorProfile::count(int q) const {
  switch (kind) {
    case Kind::full: return basis_dim(q);
    case Kind::zero: return 0;
    case Kind::min_length: return q >= min_length ? basis_dim(q) : 0;
    case Kind::cur0: return basis_dim(q) - 1;
    case Kind::suffix: {
      std::uint64_t c = 0;
      for (const auto& w : words)
        if (static_cast<int>(w.size()) <= q) c += checked_pow(n, q - static_cast<int>(w.size()));
      return c;
    }
    case Kind::monomial_ideal: {
      std::uint64_t c = 0;
      for (const auto& a : enumerate_monomials(n, q))
        for (const auto& g : words)
          if (divides(g, a)) {
            ++c;
            break;
          }
      return c;
    }
  }
  return 0;
}

long double FactorProfile::ratio(int q) const {
  switch (kind) {
    case Kind::full: return 1.0L;
    case Kind::zero: return 0.0L;
    case Kind::min_length: return q >= min_length ? 1.0L : 0.0L;
    case Kind::cur0: return 1.0L - 1.0L / std::pow(static_cast<long double>(n), q);
    case Kind::suffix: {
      // the cones of distinct suffix words are disjoint
      long double r = 0.0L;
      for (const auto& w : words)
        if (static_cast<int>(w.size()) <= q) r += 1.0L / std::pow(static_cast<long double>(n), static_cast<int>(w.size()));
      return r;
    }
    case Kind::monomial_ideal:
      return static_cast<long double>(count(q)) / static_cast<long double>(basis_dim(q));
  }
  return 0.0L;
}

bool FactorProfile::contains(std::uint64_t basis_index, int q) const {
  switch (kind) {
    case Kind::full: return true;
    case Kind::zero: return false;
    case Kind::min_length: return q >= min_length;
    case Kind::cur0: return basis_index != 0;  // index 0 is the word g_1^q
    case Kind::suffix: {
      const auto letters = word_at(n, q, basis_index);
      for (const auto& w : words) {
        if (static_cast<int>(w.size()) > q) continue;
        if (std::equal(w.begin(), w.end(), letters.end() - static_cast<std::ptrdiff_t>(w.size()))) return true;
      }
      return false;
    }
    case Kind::monomial_ideal: {
      const auto a = enumerate_monomials(n, q)[basis_index];
      for (const auto& g : words)
        if (divides(g, a)) return true;
      return false;
    }
  }
  return false;
}

std::optional<int> FactorProfile::stable_degree() const {
  switch (kind) {
    case Kind::full:
    case Kind::zero: return 0;
    case Kind::min_length: return min_length;
    case Kind::suffix: {
      int m = 0;
      for (const auto& w : words) m = std::max(m, static_cast<int>(w.size()));
      return m;
    }
    case Kind::cur0:
    case Kind::monomial_ideal: return std::nullopt;
  }
  return std::nullopt;
}

// GradedSubspace ---------------------------------------------------------------

namespace {
// log2 of the grade size, so deep grades never touch 64-bit arithmetic
double log2_grade_dim(const FockTruncation& ft, const MultiDegree& q) {
  double l = 0.0;
  for (int i = 0; i < ft.k(); ++i) {
    const int n = ft.shape().n[i];
    l += ft.model() == FockModel::full ? q[i] * std::log2(static_cast<double>(n))
                                       : (std::lgamma(q[i] + n) - std::lgamma(q[i] + 1.0) - std::lgamma(n)) / std::log(2.0);
  }
  return l;
}
}  // namespace

GradedSubspace GradedSubspace::structured(std::vector<FactorProfile> profiles, std::vector<int> caps, int min_total,
                                          std::string label) {
  if (profiles.empty()) fail(ErrorKind::invalid_argument, "structured subspace needs at least one factor");
  if (caps.size() != profiles.size()) fail(ErrorKind::dimension_mismatch, "one cap per factor");
  std::vector<int> n;
  int e = 1;
  const FockModel model = profiles[0].model;
  for (const auto& p : profiles) {
    if (p.model != model) fail(ErrorKind::invalid_argument, "factor profiles mix Fock models");
    if (p.coeff_dim < 1) fail(ErrorKind::invalid_argument, "coefficient dimensions must be positive");
    if (p.model == FockModel::symmetric && (p.kind == FactorProfile::Kind::suffix || p.kind == FactorProfile::Kind::cur0))
      fail(ErrorKind::invalid_argument, "suffix and cur0 profiles need the full model");
    if (p.model == FockModel::full && p.kind == FactorProfile::Kind::monomial_ideal)
      fail(ErrorKind::invalid_argument, "monomial ideals need the symmetric model");
    if (p.kind == FactorProfile::Kind::cur0 && p.n < 2) fail(ErrorKind::invalid_argument, "cur0 needs n >= 2");
    n.push_back(p.n);
    e *= p.coeff_dim;
  }
  GradedSubspace s;
  s.mode_ = Mode::structured;
  s.label_ = std::move(label);
  s.ft_ = FockTruncation(Shape(n, caps), e, model);
  s.profiles_ = std::move(profiles);
  s.min_total_ = min_total;
  return s;
}

GradedSubspace GradedSubspace::materialized(FockTruncation ft, std::vector<std::vector<int>> groups,
                                            std::vector<Matrix> bases, std::string label) {
  if (groups.size() != bases.size()) fail(ErrorKind::dimension_mismatch, "one basis per group");
  std::vector<int> seen(ft.grade_count(), 0);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    Eigen::Index rows = 0;
    for (int grade : groups[g]) {
      if (grade < 0 || grade >= ft.grade_count()) fail(ErrorKind::invalid_argument, "group lists an unknown grade");
      if (seen[grade]++) fail(ErrorKind::invalid_argument, "grade listed in two groups");
      rows += ft.block_dim(grade);
    }
    if (bases[g].rows() != rows) fail(ErrorKind::dimension_mismatch, "basis rows do not match its group");
    if (bases[g].cols() > 0) {
      const double gram = (bases[g].adjoint() * bases[g] - Matrix::Identity(bases[g].cols(), bases[g].cols())).norm();
      if (gram > 1e-10) fail(ErrorKind::invalid_argument, "basis columns are not orthonormal");
    }
  }
  GradedSubspace s;
  s.mode_ = Mode::materialized;
  s.label_ = std::move(label);
  s.ft_ = std::move(ft);
  s.groups_ = std::move(groups);
  s.bases_ = std::move(bases);
  return s;
}

std::uint64_t GradedSubspace::count(const MultiDegree& q) const {
  if (mode_ != Mode::structured) fail(ErrorKind::invalid_argument, "exact counts need a structured subspace");
  if (q.total() < min_total_) return 0;
  std::uint64_t c = static_cast<std::uint64_t>(coeff_dim());
  for (int i = 0; i < k(); ++i) c = checked_mul(c, profiles_[i].count(q[i]));
  return c;
}

std::uint64_t GradedSubspace::perp_count(const MultiDegree& q) const {
  if (mode_ != Mode::structured) fail(ErrorKind::invalid_argument, "exact counts need a structured subspace");
  const std::uint64_t gd = ft_.grade_dim(q);
  const std::uint64_t e = static_cast<std::uint64_t>(coeff_dim());
  if (q.total() < min_total_) return checked_mul(gd, e);
  if (gd > (1ull << 20)) return checked_mul(gd, e) - count(q);
  std::uint64_t missing = 0;
  std::vector<std::uint64_t> dims(k());
  for (int i = 0; i < k(); ++i) dims[i] = profiles_[i].basis_dim(q[i]);
  for (std::uint64_t idx = 0; idx < gd; ++idx) {
    std::uint64_t rest = idx;
    bool in = true;
    for (int i = k() - 1; i >= 0; --i) {
      in = in && profiles_[i].contains(rest % dims[i], q[i]);
      rest /= dims[i];
    }
    if (!in) ++missing;
  }
  return missing * e;
}

namespace {
// (group, row offset inside the group) for every grade of the truncation
std::vector<std::pair<int, Eigen::Index>> locate(const FockTruncation& ft, const std::vector<std::vector<int>>& groups) {
  std::vector<std::pair<int, Eigen::Index>> where(ft.grade_count(), {-1, 0});
  for (std::size_t g = 0; g < groups.size(); ++g) {
    Eigen::Index off = 0;
    for (int grade : groups[g]) {
      where[grade] = {static_cast<int>(g), off};
      off += ft.block_dim(grade);
    }
  }
  return where;
}
}  // namespace

double GradedSubspace::ratio(const MultiDegree& q) const {
  if (mode_ == Mode::structured) {
    if (q.total() < min_total_) return 0.0;
    long double r = coeff_dim();
    for (int i = 0; i < k(); ++i) r *= profiles_[i].ratio(q[i]);
    return static_cast<double>(r);
  }
  const int grade = ft_.grade_index(q);
  const auto where = locate(ft_, groups_);
  if (grade < 0 || where[grade].first < 0) fail(ErrorKind::invalid_argument, "grade beyond caps: " + q.str());
  const Matrix& v = bases_[where[grade].first];
  return v.middleRows(where[grade].second, ft_.block_dim(grade)).squaredNorm() / static_cast<double>(ft_.grade_dim(q));
}

double GradedSubspace::perp_ratio(const MultiDegree& q) const {
  if (mode_ == Mode::structured) {
    if (log2_grade_dim(ft_, q) <= 20.0)
      return static_cast<double>(perp_count(q)) / static_cast<double>(ft_.grade_dim(q));
    if (q.total() < min_total_) return coeff_dim();
    long double r = 1.0L;
    for (int i = 0; i < k(); ++i) r *= profiles_[i].ratio(q[i]);
    return static_cast<double>(coeff_dim() * (1.0L - r));
  }
  const int grade = ft_.grade_index(q);
  const auto where = locate(ft_, groups_);
  if (grade < 0 || where[grade].first < 0) fail(ErrorKind::invalid_argument, "grade beyond caps: " + q.str());
  const Matrix c = complement_bases()[where[grade].first];
  return c.middleRows(where[grade].second, ft_.block_dim(grade)).squaredNorm() / static_cast<double>(ft_.grade_dim(q));
}

std::optional<MultiDegree> GradedSubspace::stable_degree() const {
  if (mode_ != Mode::structured) return std::nullopt;
  int d = 0;
  for (const auto& p : profiles_) {
    const auto s = p.stable_degree();
    if (!s) return std::nullopt;
    d = std::max(d, *s);
  }
  d = std::max(d, (min_total_ + k() - 1) / k());
  return MultiDegree::constant(k(), d);
}

bool GradedSubspace::has_grade(const MultiDegree& q) const {
  if (mode_ == Mode::structured) return q.k() == k();
  const int grade = ft_.grade_index(q);
  return grade >= 0 && locate(ft_, groups_)[grade].first >= 0;
}

GradedSubspace GradedSubspace::materialize() const {
  if (mode_ == Mode::materialized) return *this;
  std::vector<std::vector<int>> groups;
  std::vector<Matrix> bases;
  const auto e = static_cast<std::uint64_t>(coeff_dim());
  for (int g = 0; g < ft_.grade_count(); ++g) {
    const auto& q = ft_.grades()[g];
    const std::uint64_t gd = ft_.grade_dim(q);
    std::vector<Eigen::Index> rows;
    std::vector<std::uint64_t> dims(k());
    for (int i = 0; i < k(); ++i) dims[i] = profiles_[i].basis_dim(q[i]);
    for (std::uint64_t idx = 0; idx < gd && q.total() >= min_total_; ++idx) {
      std::uint64_t rest = idx;
      bool in = true;
      for (int i = k() - 1; i >= 0; --i) {
        in = in && profiles_[i].contains(rest % dims[i], q[i]);
        rest /= dims[i];
      }
      if (in)
        for (std::uint64_t c = 0; c < e; ++c) rows.push_back(static_cast<Eigen::Index>(idx * e + c));
    }
    Matrix v = Matrix::Zero(ft_.block_dim(g), static_cast<Eigen::Index>(rows.size()));
    for (std::size_t c = 0; c < rows.size(); ++c) v(rows[c], static_cast<Eigen::Index>(c)) = 1.0;
    groups.push_back({g});
    bases.push_back(std::move(v));
  }
  return materialized(ft_, std::move(groups), std::move(bases), label_);
}

std::vector<Matrix> GradedSubspace::complement_bases() const {
  if (mode_ == Mode::structured) return materialize().complement_bases();
  std::vector<Matrix> out;
  for (const auto& v : bases_) out.push_back(orthonormal_complement(v, v.rows()));
  return out;
}

GradedOperator GradedSubspace::projection() const {
  if (mode_ == Mode::structured) {
    GradedOperator p(ft_, ft_);
    const auto e = static_cast<std::uint64_t>(coeff_dim());
    for (int g = 0; g < ft_.grade_count(); ++g) {
      const auto& q = ft_.grades()[g];
      if (q.total() < min_total_) continue;
      std::vector<std::uint64_t> dims(k());
      for (int i = 0; i < k(); ++i) dims[i] = profiles_[i].basis_dim(q[i]);
      Matrix d = Matrix::Zero(ft_.block_dim(g), ft_.block_dim(g));
      bool any = false;
      for (std::uint64_t idx = 0; idx < ft_.grade_dim(q); ++idx) {
        std::uint64_t rest = idx;
        bool in = true;
        for (int i = k() - 1; i >= 0; --i) {
          in = in && profiles_[i].contains(rest % dims[i], q[i]);
          rest /= dims[i];
        }
        if (!in) continue;
        any = true;
        for (std::uint64_t c = 0; c < e; ++c) d(static_cast<Eigen::Index>(idx * e + c), static_cast<Eigen::Index>(idx * e + c)) = 1.0;
      }
      if (any) p.set_block(g, g, std::move(d));
    }
    return p;
  }
  GradedOperator p(ft_, ft_);
  for (std::size_t g = 0; g < groups_.size(); ++g) {
    const Matrix& v = bases_[g];
    if (v.cols() == 0) continue;
    const Matrix full = v * v.adjoint();
    Eigen::Index ro = 0;
    for (int r : groups_[g]) {
      Eigen::Index co = 0;
      for (int c : groups_[g]) {
        p.set_block(r, c, full.block(ro, co, ft_.block_dim(r), ft_.block_dim(c)));
        co += ft_.block_dim(c);
      }
      ro += ft_.block_dim(r);
    }
  }
  return p;
}

double GradedSubspace::invariance_residual() const {
  if (mode_ == Mode::structured) {
    // coordinate subspaces: a contained word must map to a contained word
    double worst = 0.0;
    for (int g = 0; g < ft_.grade_count(); ++g) {
      const auto& q = ft_.grades()[g];
      if (log2_grade_dim(ft_, q) > 16.0) continue;
      for (int i = 0; i < k(); ++i) {
        const int up = ft_.grade_index(q.plus_unit(i));
        if (up < 0) continue;
        const auto& qu = ft_.grades()[up];
        for (int j = 1; j <= n()[i]; ++j) {
          std::vector<std::uint64_t> image(ft_.factor_dim(i, q[i]));
          for (const auto& entry : ft_.local_creation(i, j, q[i])) image[entry.col] = entry.row;
          for (std::uint64_t idx = 0; idx < ft_.grade_dim(q); ++idx) {
            std::vector<std::uint64_t> parts(k());
            std::uint64_t rest = idx;
            for (int s = k() - 1; s >= 0; --s) {
              const auto d = profiles_[s].basis_dim(q[s]);
              parts[s] = rest % d;
              rest /= d;
            }
            bool in = q.total() >= min_total_;
            for (int s = 0; s < k(); ++s) in = in && profiles_[s].contains(parts[s], q[s]);
            if (!in) continue;
            parts[i] = image[parts[i]];
            bool img = qu.total() >= min_total_;
            for (int s = 0; s < k(); ++s) img = img && profiles_[s].contains(parts[s], qu[s]);
            if (!img) worst = 1.0;
          }
        }
      }
    }
    return worst;
  }
  const auto where = locate(ft_, groups_);
  const auto comps = complement_bases();
  double worst = 0.0;
  for (std::size_t g = 0; g < groups_.size(); ++g) {
    const Matrix& v = bases_[g];
    if (v.cols() == 0) continue;
    for (int i = 0; i < k(); ++i)
      for (int j = 1; j <= n()[i]; ++j) {
        std::map<int, Matrix> images;  // target group -> image rows
        bool lost = false;
        Eigen::Index off = 0;
        for (int grade : groups_[g]) {
          const auto& q = ft_.grades()[grade];
          const Matrix part = v.middleRows(off, ft_.block_dim(grade));
          off += ft_.block_dim(grade);
          const int up = ft_.grade_index(q.plus_unit(i));
          if (up < 0 || where[up].first < 0) {
            if (part.norm() > 0) lost = true;
            continue;
          }
          const auto [tg, toff] = where[up];
          auto it = images.find(tg);
          if (it == images.end()) it = images.emplace(tg, Matrix::Zero(bases_[tg].rows(), v.cols())).first;
          it->second.middleRows(toff, ft_.block_dim(up)) += apply_creation(ft_, i, j, q, part);
        }
        if (lost) continue;  // image leaves the truncation
        double sq = 0.0;
        for (const auto& [tg, img] : images) sq += (comps[tg].adjoint() * img).colwise().squaredNorm().maxCoeff();
        worst = std::max(worst, std::sqrt(sq));
      }
  }
  return worst;
}

void GradedSubspace::certify(double tol) const {
  const double r = invariance_residual();
  if (r > tol) fail(ErrorKind::not_invariant, "subspace is not invariant (residual " + fmt(r) + ")");
}

// constructors ------------------------------------------------------------------

namespace {
FactorProfile simple_profile(FactorProfile::Kind kind, int n, FockModel model, int coeff_dim = 1) {
  FactorProfile p;
  p.kind = kind;
  p.n = n;
  p.model = model;
  p.coeff_dim = coeff_dim;
  return p;
}
}  // namespace

GradedSubspace zero_subspace(FockModel model, std::vector<int> n, std::vector<int> caps, int coeff_dim) {
  std::vector<FactorProfile> ps;
  for (std::size_t i = 0; i < n.size(); ++i)
    ps.push_back(simple_profile(FactorProfile::Kind::zero, n[i], model, i == 0 ? coeff_dim : 1));
  return GradedSubspace::structured(std::move(ps), std::move(caps), 0, "zero");
}

GradedSubspace full_subspace(FockModel model, std::vector<int> n, std::vector<int> caps, int coeff_dim) {
  std::vector<FactorProfile> ps;
  for (std::size_t i = 0; i < n.size(); ++i)
    ps.push_back(simple_profile(FactorProfile::Kind::full, n[i], model, i == 0 ? coeff_dim : 1));
  return GradedSubspace::structured(std::move(ps), std::move(caps), 0, "full");
}

FactorProfile mt_profile(const NAdicExpansion& exp) {
  FactorProfile p = simple_profile(FactorProfile::Kind::suffix, exp.base, FockModel::full);
  const int n = exp.base;
  for (std::size_t q = 0; q < exp.exponents.size(); ++q) {
    const int kp = exp.exponents[q];
    const int prev = q == 0 ? 0 : exp.exponents[q - 1];
    for (int j = 1; j <= exp.digits[q]; ++j) {
      std::vector<int> w(static_cast<std::size_t>(kp - prev), j);
      w.insert(w.end(), static_cast<std::size_t>(prev), n);
      p.words.push_back(std::move(w));
    }
  }
  p.expansion = exp;
  return p;
}

GradedSubspace construct_Mt(const NAdicExpansion& exp, int cap) {
  if (!exp.exponents.empty() && cap < exp.exponents.front())
    fail(ErrorKind::invalid_argument, "cap below the first exponent k_1");
  return GradedSubspace::structured({mt_profile(exp)}, {cap}, 0, "mt");
}

GradedSubspace tensor_subspace(const std::vector<GradedSubspace>& parts) {
  std::vector<FactorProfile> ps;
  std::vector<int> caps;
  for (const auto& part : parts) {
    if (part.mode() != GradedSubspace::Mode::structured || part.min_total() != 0)
      fail(ErrorKind::invalid_argument, "tensor products are formed from structured product parts");
    for (const auto& p : part.profiles()) ps.push_back(p);
    for (int c : part.caps()) caps.push_back(c);
  }
  return GradedSubspace::structured(std::move(ps), std::move(caps), 0, "tensor");
}

GradedSubspace uncountable_family(double t, double omega, std::vector<int> n, std::vector<int> caps, int n_terms) {
  if (!(t > 0.0 && t < 1.0)) fail(ErrorKind::invalid_argument, "t must lie in (0, 1)");
  if (!(omega > 1.0 - t && omega < 1.0)) fail(ErrorKind::invalid_argument, "omega must lie in (1 - t, 1)");
  if (n.size() < 2 || n[0] < 2 || n[1] < 2) fail(ErrorKind::invalid_argument, "need n_1, n_2 >= 2");
  if (caps.size() != n.size()) fail(ErrorKind::dimension_mismatch, "one cap per factor");
  std::vector<FactorProfile> ps;
  ps.push_back(mt_profile(construct_nadic(n[0], 1.0 - omega, n_terms)));
  ps.push_back(mt_profile(construct_nadic(n[1], 1.0 - (1.0 - t) / omega, n_terms)));
  for (std::size_t i = 2; i < n.size(); ++i) ps.push_back(simple_profile(FactorProfile::Kind::full, n[i], FockModel::full));
  return GradedSubspace::structured(std::move(ps), std::move(caps), 0, "uncountable");
}

GradedSubspace cur0_subspace(std::vector<int> n, std::vector<int> caps) {
  if (n.empty() || n[0] < 2) fail(ErrorKind::invalid_argument, "cur0 needs n_1 >= 2");
  std::vector<FactorProfile> ps;
  ps.push_back(simple_profile(FactorProfile::Kind::cur0, n[0], FockModel::full));
  for (std::size_t i = 1; i < n.size(); ++i) ps.push_back(simple_profile(FactorProfile::Kind::full, n[i], FockModel::full));
  return GradedSubspace::structured(std::move(ps), std::move(caps), 0, "cur0");
}

GradedSubspace finite_codim_subspace(FockModel model, std::vector<int> n, std::vector<int> caps, int L, int coeff_dim) {
  if (L < 0) fail(ErrorKind::invalid_argument, "L must be nonnegative");
  std::vector<FactorProfile> ps;
  for (std::size_t i = 0; i < n.size(); ++i)
    ps.push_back(simple_profile(FactorProfile::Kind::full, n[i], model, i == 0 ? coeff_dim : 1));
  return GradedSubspace::structured(std::move(ps), std::move(caps), L, "finite_codim");
}

GradedSubspace monomial_subspace(std::vector<int> n, std::vector<int> caps, int factor,
                                 std::vector<std::vector<int>> suffixes) {
  if (factor < 0 || factor >= static_cast<int>(n.size())) fail(ErrorKind::invalid_argument, "factor out of range");
  std::vector<FactorProfile> ps;
  for (std::size_t i = 0; i < n.size(); ++i) ps.push_back(simple_profile(FactorProfile::Kind::full, n[i], FockModel::full));
  ps[factor].kind = FactorProfile::Kind::suffix;
  for (const auto& w : suffixes)
    for (int l : w)
      if (l < 1 || l > n[factor]) fail(ErrorKind::invalid_argument, "suffix letter out of range");
  ps[factor].words = std::move(suffixes);
  return GradedSubspace::structured(std::move(ps), std::move(caps), 0, "monomial");
}

GradedSubspace monomial_ideal_subspace(std::vector<int> n, std::vector<int> caps, int factor,
                                       std::vector<std::vector<int>> generators) {
  if (factor < 0 || factor >= static_cast<int>(n.size())) fail(ErrorKind::invalid_argument, "factor out of range");
  std::vector<FactorProfile> ps;
  for (std::size_t i = 0; i < n.size(); ++i) ps.push_back(simple_profile(FactorProfile::Kind::full, n[i], FockModel::symmetric));
  ps[factor].kind = FactorProfile::Kind::monomial_ideal;
  for (const auto& g : generators)
    if (static_cast<int>(g.size()) != n[factor]) fail(ErrorKind::invalid_argument, "generator exponent length");
  ps[factor].words = std::move(generators);
  return GradedSubspace::structured(std::move(ps), std::move(caps), 0, "monomial_ideal");
}

GradedSubspace generated_subspace(FockModel model, std::vector<int> n, int L, int coeff_dim,
                                  const std::vector<std::vector<GeneratorTerm>>& generators) {
  const int k = static_cast<int>(n.size());
  FockTruncation ft(Shape(n, std::vector<int>(k, L)), coeff_dim, model, L);
  std::vector<std::vector<int>> groups(L + 1);
  for (int g = 0; g < ft.grade_count(); ++g) groups[ft.grades()[g].total()].push_back(g);
  const auto where = locate(ft, groups);
  auto layer_rows = [&](int m) {
    Eigen::Index r = 0;
    for (int g : groups[m]) r += ft.block_dim(g);
    return r;
  };
  std::vector<std::vector<Vector>> gens(L + 1);
  for (const auto& gen : generators) {
    if (gen.empty()) continue;
    const int m = gen.front().grade.total();
    if (m > L) fail(ErrorKind::invalid_argument, "generator degree beyond the window");
    Vector v = Vector::Zero(layer_rows(m));
    for (const auto& term : gen) {
      if (term.grade.total() != m) fail(ErrorKind::invalid_argument, "generators must be homogeneous in total degree");
      const int g = ft.grade_index(term.grade);
      if (g < 0 || term.e < 0 || term.e >= coeff_dim || term.index >= ft.grade_dim(term.grade))
        fail(ErrorKind::invalid_argument, "generator term out of range");
      v(where[g].second + static_cast<Eigen::Index>(term.index) * coeff_dim + term.e) += term.value;
    }
    gens[m].push_back(v);
  }
  std::vector<Matrix> bases(L + 1);
  for (int m = 0; m <= L; ++m) {
    std::vector<Vector> cols = gens[m];
    if (m > 0 && bases[m - 1].cols() > 0) {
      const Matrix& prev = bases[m - 1];
      for (int i = 0; i < k; ++i)
        for (int j = 1; j <= n[i]; ++j) {
          Matrix img = Matrix::Zero(layer_rows(m), prev.cols());
          Eigen::Index off = 0;
          for (int g : groups[m - 1]) {
            const auto& q = ft.grades()[g];
            const int up = ft.grade_index(q.plus_unit(i));
            img.middleRows(where[up].second, ft.block_dim(up)) +=
                apply_creation(ft, i, j, q, prev.middleRows(off, ft.block_dim(g)));
            off += ft.block_dim(g);
          }
          for (Eigen::Index c = 0; c < img.cols(); ++c) cols.push_back(img.col(c));
        }
    }
    Matrix stack(layer_rows(m), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) stack.col(static_cast<Eigen::Index>(c)) = cols[c];
    bases[m] = orthonormal_columns(stack);
  }
  return GradedSubspace::materialized(std::move(ft), std::move(groups), std::move(bases), "generated");
}

// invariants --------------------------------------------------------------------

namespace {
std::vector<MultiDegree> box_grades(const GradedSubspace& sub, int q_max) {
  auto grades = multidegrees_leq(MultiDegree::constant(sub.k(), q_max));
  for (const auto& q : grades)
    if (!sub.has_grade(q)) fail(ErrorKind::invalid_argument, "grade beyond caps requested: " + q.str());
  return grades;
}
}  // namespace

CurvEstimate subspace_curvature(const GradedSubspace& sub, int q_max) {
  const auto grades = box_grades(sub, q_max);
  std::vector<double> values;
  values.reserve(grades.size());
  for (const auto& q : grades) values.push_back(sub.perp_ratio(q));
  EstimateOptions opts;
  opts.model = sub.model();
  opts.assert_monotone = sub.model() == FockModel::full;
  auto est = assemble_estimate(sub.model(), sub.n(), q_max, std::move(values), opts);
  if (const auto stable = sub.stable_degree(); stable && sub.mode() == GradedSubspace::Mode::structured) {
    est.estimate = sub.perp_ratio(*stable);
    est.error_proxy = 0.0;
    est.caveats.push_back("estimate read at the stabilized grade " + stable->str());
  }
  if (sub.model() == FockModel::symmetric && !est.monotone_ok)
    est.caveats.push_back("per-grade values are not monotone; existence of the limit is not established");
  return est;
}

MultiplicityReport multiplicity_estimate(const GradedSubspace& sub, int q_max) {
  MultiplicityReport rep;
  rep.invariance_residual = sub.invariance_residual();
  if (rep.invariance_residual > 1e-10)
    fail(ErrorKind::not_invariant, "invariance certificate failed (residual " + fmt(rep.invariance_residual) + ")");
  const auto grades = box_grades(sub, q_max);
  std::vector<double> values;
  for (const auto& q : grades) values.push_back(sub.ratio(q));
  EstimateOptions opts;
  opts.model = sub.model();
  opts.assert_monotone = false;
  rep.multiplicity = assemble_estimate(sub.model(), sub.n(), q_max, values, opts);
  rep.multiplicity.monotone_ok = true;
  rep.multiplicity.worst_monotone_violation = 0.0;
  rep.compression = subspace_curvature(sub, q_max);
  const double e = sub.coeff_dim();
  for (std::size_t g = 0; g < grades.size(); ++g)
    rep.route_residual = std::max(rep.route_residual, std::abs(e - rep.compression.grade_values[g] - values[g]));
  if (sub.mode() == GradedSubspace::Mode::structured) {
    for (const auto& q : sub.truncation().grades()) {
      if (log2_grade_dim(sub.truncation(), q) > 20.0) continue;
      if (sub.count(q) + sub.perp_count(q) != sub.truncation().grade_dim(q) * static_cast<std::uint64_t>(sub.coeff_dim()))
        rep.complement_exact = false;
    }
  } else {
    for (const auto& q : sub.truncation().grades()) {
      if (!sub.has_grade(q)) continue;
      rep.complement_residual = std::max(rep.complement_residual, std::abs(sub.ratio(q) + sub.perp_ratio(q) - e));
    }
    rep.complement_exact = rep.complement_residual < 1e-10;
  }
  rep.estimate = e - rep.compression.estimate;
  if (sub.model() == FockModel::symmetric && !beurling_check(sub).verdict)
    rep.multiplicity.caveats.push_back("subspace is not of Beurling type; existence of the limit is not established");
  return rep;
}

BeurlingVerdict beurling_check(const GradedSubspace& sub, const Tolerances& tol) {
  const auto& ft = sub.truncation();
  const auto interior = ft.interior_grades(1);
  if (interior.empty()) fail(ErrorKind::invalid_argument, "caps leave no interior grades for the Beurling test");
  const GradedOperator d = defect_shift(sub.projection());
  // connected components of the block pattern among interior grades
  std::vector<int> parent(ft.grade_count());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
  std::vector<char> inside(ft.grade_count(), 0);
  for (int g : interior) inside[g] = 1;
  for (const auto& [key, m] : d.blocks())
    if (inside[key.first] && inside[key.second]) parent[find(key.first)] = find(key.second);
  std::map<int, std::vector<int>> comps;
  for (int g : interior) comps[find(g)].push_back(g);
  BeurlingVerdict v;
  v.verdict = true;
  v.min_eig = 0.0;
  bool first = true;
  for (const auto& [root, members] : comps) {
    const Matrix block = d.dense_on(members);
    double lo = 0.0;
    if (block.size() == 0) continue;
    if ((block - Matrix(block.diagonal().asDiagonal())).norm() == 0.0)
      lo = block.diagonal().real().minCoeff();
    else
      lo = min_eigenvalue(block);
    if (first || lo < v.min_eig) {
      v.min_eig = lo;
      v.worst_grade = ft.grades()[members.front()];
      v.worst_layer = ft.grades()[members.front()].total();
      first = false;
    }
  }
  v.verdict = v.min_eig >= -tol.psd;
  return v;
}

InnerSequenceReport inner_sequence_check(const GradedSubspace& sub, const std::vector<InnerMultiplier>& psis, int q_max) {
  const auto& ft = sub.truncation();
  GradedOperator sum(ft, ft);
  for (const auto& psi : psis) {
    const GradedOperator op = multiplier_operator(psi, ft);
    sum = sum + op * op.adjoint();
  }
  InnerSequenceReport rep;
  rep.decomposition_residual = (sub.projection() - sum).max_block_norm();
  rep.grades = box_grades(sub, q_max);
  for (const auto& q : rep.grades) {
    const int g = ft.grade_index(q);
    const Matrix* b = sum.block(g, g);
    rep.normalized_sums.push_back(b ? b->trace().real() / static_cast<double>(ft.grade_dim(q)) : 0.0);
  }
  for (int Q = 0; Q <= q_max; ++Q) {
    const auto c = MultiDegree::constant(sub.k(), Q);
    for (std::size_t a = 0; a < rep.grades.size(); ++a)
      if (rep.grades[a] == c) rep.corner_seq.push_back(rep.normalized_sums[a]);
  }
  rep.limit_estimate = rep.corner_seq.back();
  rep.verdict = rep.decomposition_residual < 1e-10 && std::abs(rep.limit_estimate - 1.0) < 1e-9;
  return rep;
}

Compression compression_tuple(const GradedSubspace& sub, int max_dim) {
  const GradedSubspace mat = sub.materialize();
  const auto& ft = mat.truncation();
  const auto comps = mat.complement_bases();
  Eigen::Index h = 0;
  for (const auto& c : comps) h += c.cols();
  if (h > max_dim) fail(ErrorKind::invalid_argument, "compression window too large (" + std::to_string(h) + ")");
  Compression out;
  out.ambient = ft;
  out.basis = Matrix::Zero(ft.total_dim(), h);
  Eigen::Index col = 0;
  for (std::size_t g = 0; g < mat.groups().size(); ++g) {
    Eigen::Index off = 0;
    for (int grade : mat.groups()[g]) {
      out.basis.block(ft.offset(grade), col, ft.block_dim(grade), comps[g].cols()) =
          comps[g].middleRows(off, ft.block_dim(grade));
      off += ft.block_dim(grade);
    }
    col += comps[g].cols();
  }
  std::vector<std::vector<Matrix>> f(mat.k());
  for (int i = 0; i < mat.k(); ++i)
    for (int j = 1; j <= mat.n()[i]; ++j)
      f[i].push_back(out.basis.adjoint() * creation_op(ft, i, j).to_dense() * out.basis);
  out.tuple = OperatorTuple(mat.n(), static_cast<int>(h), std::move(f));
  const Matrix g = out.basis.topRows(ft.coeff_dim()).adjoint();  // W^*(vacuum x E)
  const auto spec = hermitian_eig(g.adjoint() * g);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index j = spec.values.size() - 1; j >= 0; --j)
    if (spec.values(j) > 0.5) keep.push_back(j);
  Matrix u(g.cols(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) u.col(static_cast<Eigen::Index>(c)) = spec.vectors.col(keep[c]);
  out.frame = g * u;
  return out;
}

}  // namespace polyball
