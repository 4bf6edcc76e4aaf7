#include "wmds/series.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace wmds {

// ---------------------------------------------------------------- USeries

USeries::USeries(const CycField& K, int T) : K_(&K), c_(std::size_t(std::max(T, -1) + 1), CycNum::zero(K)) {}

USeries::USeries(const CycField& K, std::vector<CycNum> c) : K_(&K), c_(std::move(c)) {}

USeries USeries::one(const CycField& K, int T) {
  USeries s(K, T);
  if (T >= 0) s.c_[0] = CycNum::one(K);
  return s;
}

USeries USeries::monomial(const CycField& K, int T, int d, const CycNum& c) {
  USeries s(K, T);
  if (d >= 0 && d <= T) s.c_[std::size_t(d)] = c;
  return s;
}

bool USeries::is_zero() const {
  return std::all_of(c_.begin(), c_.end(), [](const CycNum& x) { return x.is_zero(); });
}

USeries& USeries::operator+=(const USeries& o) {
  if (o.c_.size() < c_.size()) c_.resize(o.c_.size());
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  return *this;
}

USeries& USeries::operator-=(const USeries& o) {
  if (o.c_.size() < c_.size()) c_.resize(o.c_.size());
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
  return *this;
}

USeries operator*(const USeries& a, const USeries& b) {
  const int T = std::min(a.truncation(), b.truncation());
  USeries r(*a.K_, T);
  for (int i = 0; i <= T; ++i) {
    if (a[i].is_zero()) continue;
    for (int j = 0; i + j <= T; ++j)
      if (!b[j].is_zero()) r.c_[std::size_t(i + j)] += a[i] * b[j];
  }
  return r;
}

USeries USeries::scaled(const CycNum& c) const {
  USeries r = *this;
  for (auto& x : r.c_) x = x * c;
  return r;
}

USeries USeries::scaled(const Rational& c) const {
  USeries r = *this;
  for (auto& x : r.c_) x *= c;
  return r;
}

USeries USeries::shifted(int k) const {
  USeries r(*K_, truncation());
  for (int d = 0; d <= truncation(); ++d)
    if (d - k >= 0 && d - k <= truncation()) r.c_[std::size_t(d)] = c_[std::size_t(d - k)];
  return r;
}

USeries USeries::truncated(int T) const {
  USeries r = *this;
  if (T + 1 < int(r.c_.size())) r.c_.resize(std::size_t(T + 1));
  return r;
}

USeries USeries::inverse() const {
  if (c_.empty() || c_[0].is_zero()) throw std::domain_error("USeries::inverse: constant term is zero");
  USeries r(*K_, truncation());
  const CycNum inv0 = c_[0].inverse();
  r.c_[0] = inv0;
  for (int d = 1; d <= truncation(); ++d) {
    CycNum acc = CycNum::zero(*K_);
    for (int j = 1; j <= d; ++j)
      if (!c_[std::size_t(j)].is_zero()) acc += c_[std::size_t(j)] * r.c_[std::size_t(d - j)];
    r.c_[std::size_t(d)] = -(acc * inv0);
  }
  return r;
}

USeries USeries::residue_class(int i, int n) const {
  USeries r = *this;
  for (int d = 0; d <= truncation(); ++d)
    if (((d - i) % n + n) % n != 0) r.c_[std::size_t(d)] = CycNum::zero(*K_);
  return r;
}

USeries USeries::compose_power(int e, int T) const {
  if (e < 1) throw std::invalid_argument("USeries::compose_power: exponent must be positive");
  USeries r(*K_, T);
  for (int d = 0; d <= truncation() && d * e <= T; ++d) r.c_[std::size_t(d * e)] = c_[std::size_t(d)];
  if (truncation() < T / e) throw std::invalid_argument("USeries::compose_power: source truncation too short");
  return r;
}

bool operator==(const USeries& a, const USeries& b) { return a.c_ == b.c_; }

int first_mismatch(const USeries& a, const USeries& b) {
  const int T = std::min(a.truncation(), b.truncation());
  for (int d = 0; d <= T; ++d)
    if (!(a[d] == b[d])) return d;
  return -1;
}

nlohmann::json USeries::to_json() const {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& x : c_) j.push_back(x.to_json());
  return {{"truncation", truncation()}, {"coefficients", j}};
}

std::string USeries::to_csv() const {
  std::ostringstream os;
  os << "degree,value\n";
  for (int d = 0; d <= truncation(); ++d) os << d << ",\"" << c_[std::size_t(d)].str() << "\"\n";
  return os.str();
}

USeries geometric(const CycField& K, const Rational& c, int e, int T) {
  USeries s(K, T);
  Rational v(1);
  for (int d = 0; d <= T; d += e) {
    s.coeff(d) = CycNum(K, v);
    v *= c;
  }
  return s;
}

// ---------------------------------------------------------------- BiSeries

BiSeries::BiSeries(const CycField& K, int T1, int T2)
    : K_(&K), T1_(T1), T2_(T2), c_(std::size_t(T1 + 1) * std::size_t(T2 + 1), CycNum::zero(K)) {}

BiSeries& BiSeries::operator+=(const BiSeries& o) {
  if (o.T1_ != T1_ || o.T2_ != T2_) throw std::invalid_argument("BiSeries: truncation mismatch");
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  return *this;
}

bool operator==(const BiSeries& a, const BiSeries& b) {
  return a.T1_ == b.T1_ && a.T2_ == b.T2_ && a.c_ == b.c_;
}

BiSeries BiSeries::divided_by_binomial(const Rational& c, int e1, int e2) const {
  // r = s + c x^e1 y^e2 r, solved in increasing (a, b).
  BiSeries r = *this;
  for (int a = 0; a <= T1_; ++a)
    for (int b = 0; b <= T2_; ++b)
      if (a >= e1 && b >= e2) r.at(a, b) += r.at(a - e1, b - e2) * c;
  return r;
}

USeries BiSeries::row(int a) const {
  std::vector<CycNum> c(std::size_t(T2_ + 1));
  for (int b = 0; b <= T2_; ++b) c[std::size_t(b)] = at(a, b);
  return USeries(*K_, std::move(c));
}

nlohmann::json BiSeries::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (int a = 0; a <= T1_; ++a) {
    nlohmann::json r = nlohmann::json::array();
    for (int b = 0; b <= T2_; ++b) r.push_back(at(a, b).to_json());
    rows.push_back(r);
  }
  return {{"T1", T1_}, {"T2", T2_}, {"coefficients", rows}};
}

std::string BiSeries::to_csv() const {
  std::ostringstream os;
  os << "a,b,value\n";
  for (int a = 0; a <= T1_; ++a)
    for (int b = 0; b <= T2_; ++b) os << a << "," << b << ",\"" << at(a, b).str() << "\"\n";
  return os.str();
}

// ---------------------------------------------------------------- UPoly

UPoly::UPoly(const CycField& K, std::vector<CycNum> c) : K_(&K), c_(std::move(c)) { trim(); }

UPoly UPoly::constant(const CycField& K, const CycNum& c) { return UPoly(K, {c}); }

UPoly UPoly::monomial(const CycField& K, int d, const CycNum& c) {
  std::vector<CycNum> v(std::size_t(d + 1), CycNum::zero(K));
  v[std::size_t(d)] = c;
  return UPoly(K, std::move(v));
}

UPoly UPoly::binomial(const CycField& K, const Rational& c, int e) {
  std::vector<CycNum> v(std::size_t(e + 1), CycNum::zero(K));
  v[0] = CycNum::one(K);
  v[std::size_t(e)] += CycNum(K, -c);
  return UPoly(K, std::move(v));
}

void UPoly::trim() {
  while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
}

CycNum UPoly::coeff(int d) const {
  if (d < 0 || d > degree()) return CycNum::zero(*K_);
  return c_[std::size_t(d)];
}

UPoly operator+(const UPoly& a, const UPoly& b) {
  const CycField& K = a.K_ ? *a.K_ : *b.K_;
  std::vector<CycNum> c(std::max(a.c_.size(), b.c_.size()), CycNum::zero(K));
  for (std::size_t i = 0; i < a.c_.size(); ++i) c[i] += a.c_[i];
  for (std::size_t i = 0; i < b.c_.size(); ++i) c[i] += b.c_[i];
  return UPoly(K, std::move(c));
}

UPoly operator-(const UPoly& a, const UPoly& b) { return a + b.scaled(CycNum(b.field(), Rational(-1))); }

UPoly operator*(const UPoly& a, const UPoly& b) {
  const CycField& K = a.K_ ? *a.K_ : *b.K_;
  if (a.is_zero() || b.is_zero()) return UPoly(K);
  std::vector<CycNum> c(a.c_.size() + b.c_.size() - 1, CycNum::zero(K));
  for (std::size_t i = 0; i < a.c_.size(); ++i) {
    if (a.c_[i].is_zero()) continue;
    for (std::size_t j = 0; j < b.c_.size(); ++j)
      if (!b.c_[j].is_zero()) c[i + j] += a.c_[i] * b.c_[j];
  }
  return UPoly(K, std::move(c));
}

UPoly UPoly::scaled(const CycNum& c) const {
  std::vector<CycNum> v = c_;
  for (auto& x : v) x = x * c;
  return UPoly(*K_, std::move(v));
}

UPoly UPoly::shifted(int k) const {
  if (is_zero()) return *this;
  std::vector<CycNum> v(std::size_t(k), CycNum::zero(*K_));
  v.insert(v.end(), c_.begin(), c_.end());
  return UPoly(*K_, std::move(v));
}

UPoly UPoly::reflected(const Rational& c, int D) const {
  if (D < degree()) throw std::invalid_argument("UPoly::reflected: D below degree");
  std::vector<CycNum> v(std::size_t(D + 1), CycNum::zero(*K_));
  Rational ck(1);
  for (int k = 0; k <= degree(); ++k) {
    v[std::size_t(D - k)] = c_[std::size_t(k)] * ck;
    ck *= c;
  }
  return UPoly(*K_, std::move(v));
}

USeries UPoly::series(int T) const {
  USeries s(*K_, T);
  for (int d = 0; d <= std::min(T, degree()); ++d) s.coeff(d) = c_[std::size_t(d)];
  return s;
}

nlohmann::json UPoly::to_json() const {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& x : c_) j.push_back(x.to_json());
  return j;
}

// ---------------------------------------------------------------- RationalModel

USeries RationalModel::series(int T) const { return num.series(T) * den.series(T).inverse(); }

RationalModel RationalModel::reflected(const Rational& c) const {
  const int D = std::max(num.degree(), den.degree());
  return {num.reflected(c, D), den.reflected(c, D)};
}

RationalModel operator+(const RationalModel& a, const RationalModel& b) {
  if (a.den == b.den) return {a.num + b.num, a.den};
  return {a.num * b.den + b.num * a.den, a.den * b.den};
}

RationalModel operator*(const RationalModel& a, const RationalModel& b) { return {a.num * b.num, a.den * b.den}; }

bool operator==(const RationalModel& a, const RationalModel& b) { return a.num * b.den == b.num * a.den; }

nlohmann::json RationalModel::to_json() const { return {{"numerator", num.to_json()}, {"denominator", den.to_json()}}; }

// ---------------------------------------------------------------- linear algebra

namespace {

using Matrix = std::vector<std::vector<CycNum>>;

// Reduced row echelon form in place; returns the pivot columns.
std::vector<int> rref(Matrix& A, int cols) {
  std::vector<int> pivots;
  std::size_t r = 0;
  for (int c = 0; c < cols && r < A.size(); ++c) {
    std::size_t piv = r;
    while (piv < A.size() && A[piv][std::size_t(c)].is_zero()) ++piv;
    if (piv == A.size()) continue;
    std::swap(A[r], A[piv]);
    const CycNum inv = A[r][std::size_t(c)].inverse();
    for (auto& x : A[r]) x = x * inv;
    for (std::size_t i = 0; i < A.size(); ++i) {
      if (i == r || A[i][std::size_t(c)].is_zero()) continue;
      const CycNum f = A[i][std::size_t(c)];
      for (std::size_t j = 0; j < A[i].size(); ++j)
        if (!A[r][j].is_zero()) A[i][j] -= f * A[r][j];
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

}  // namespace

std::optional<std::vector<CycNum>> solve_linear(const CycField& K, std::vector<std::vector<CycNum>> A,
                                                const std::vector<CycNum>& b, int cols) {
  for (std::size_t i = 0; i < A.size(); ++i) A[i].push_back(b[i]);
  std::vector<int> piv = rref(A, cols + 1);
  if (!piv.empty() && piv.back() == cols) return std::nullopt;
  std::vector<CycNum> x(std::size_t(cols), CycNum::zero(K));
  for (std::size_t r = 0; r < piv.size(); ++r) x[std::size_t(piv[r])] = A[r][std::size_t(cols)];
  return x;
}

std::vector<std::vector<CycNum>> nullspace(const CycField& K, std::vector<std::vector<CycNum>> A, int cols) {
  std::vector<int> piv = rref(A, cols);
  std::vector<bool> is_piv(std::size_t(cols), false);
  for (int c : piv) is_piv[std::size_t(c)] = true;
  std::vector<std::vector<CycNum>> basis;
  for (int f = 0; f < cols; ++f) {
    if (is_piv[std::size_t(f)]) continue;
    std::vector<CycNum> v(std::size_t(cols), CycNum::zero(K));
    v[std::size_t(f)] = CycNum::one(K);
    for (std::size_t r = 0; r < piv.size(); ++r) v[std::size_t(piv[r])] = -A[r][std::size_t(f)];
    basis.push_back(std::move(v));
  }
  return basis;
}

RationalFit rationalize(const USeries& s, int max_den_deg) {
  const CycField& K = s.field();
  const int T = s.truncation();
  if (T < 2 * max_den_deg + 2) throw std::invalid_argument("rationalize: too few coefficients for the bound");
  for (int b = 0; b <= max_den_deg; ++b)
    for (int a = 0; a + b + 1 <= T; ++a) {
      // sum_{j=1..b} q_j s_{d-j} = -s_d for a < d <= T.
      std::vector<std::vector<CycNum>> A;
      std::vector<CycNum> rhs;
      for (int d = a + 1; d <= T; ++d) {
        std::vector<CycNum> row(std::size_t(b), CycNum::zero(K));
        for (int j = 1; j <= b; ++j)
          if (d - j >= 0) row[std::size_t(j - 1)] = s[d - j];
        A.push_back(std::move(row));
        rhs.push_back(-s[d]);
      }
      auto x = solve_linear(K, A, rhs, b);
      if (!x) continue;
      std::vector<CycNum> qc{CycNum::one(K)};
      qc.insert(qc.end(), x->begin(), x->end());
      UPoly Q(K, qc);
      UPoly P(K, (s * Q.series(T)).truncated(a).coeffs());
      return {RationalModel{P, Q}, T - a - b};
    }
  return {};
}

RationalFit rationalize_over(const USeries& s, const UPoly& den, int min_checks) {
  const int T = s.truncation();
  UPoly num(s.field(), (s * den.series(T)).coeffs());
  const int checks = T - std::max(num.degree(), 0);
  if (checks < min_checks) return {};
  return {RationalModel{num, den}, checks};
}

nlohmann::json TransitionMatrix::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < n; ++i) {
    nlohmann::json r = nlohmann::json::array();
    for (int j = 0; j < n; ++j) r.push_back(entry[std::size_t(i)][std::size_t(j)].to_json());
    rows.push_back(r);
  }
  return {{"n", n}, {"entries", rows}};
}

namespace {

// Polynomials whose coefficients are the columns of one instance's equations.
struct FeColumns {
  UPoly b;               // multiplies B
  std::vector<UPoly> a;  // multiplies A_r
};

FeColumns fe_columns(const CycField& K, std::uint32_t q, const FeInstance& x, int slots, int shift) {
  std::vector<UPoly> dens;
  for (const auto& r : x.rhs)
    if (std::find(dens.begin(), dens.end(), r.den) == dens.end()) dens.push_back(r.den);
  UPoly C = UPoly::constant(K, CycNum::one(K));
  for (const auto& d : dens) C = C * d;
  FeColumns c;
  c.b = (x.lhs.num * C).shifted(shift);
  c.a.assign(std::size_t(slots), UPoly(K));
  const CycNum qk(K, Rational::pow(Rational(std::int64_t(q)), x.k));
  for (std::size_t i = 0; i < x.rhs.size(); ++i) {
    UPoly Ci = UPoly::constant(K, CycNum::one(K));
    bool skipped = false;
    for (const auto& d : dens) {
      if (!skipped && d == x.rhs[i].den) {
        skipped = true;
        continue;
      }
      Ci = Ci * d;
    }
    UPoly term = (x.lhs.den * x.rhs[i].num * Ci).shifted(x.k).scaled(-qk);
    c.a[std::size_t(x.slot[i])] = c.a[std::size_t(x.slot[i])] + term;
  }
  return c;
}

}  // namespace

FitOutcome fit_functional_equation(const CycField& K, std::uint32_t q, const std::vector<FeInstance>& inst,
                                   int slots, int shift, FitBounds start, FitBounds limit) {
  std::vector<FeColumns> cols;
  for (const auto& x : inst) cols.push_back(fe_columns(K, q, x, slots, shift));
  FitOutcome out;
  for (int total = start.num + start.den; total <= limit.num + limit.den; ++total)
    for (int b = start.den; b <= std::min(limit.den, total); ++b) {
      const int a = total - b;
      if (a < start.num || a > limit.num) continue;
      const int ncols = (b + 1) + slots * (a + 1);
      std::vector<std::vector<CycNum>> basis;
      int equations = 0;
      for (const auto& c : cols) {
        int top = c.b.degree() + b;
        for (const auto& p : c.a) top = std::max(top, p.degree() + a);
        for (int d = 0; d <= top; ++d) {
          std::vector<CycNum> row(std::size_t(ncols), CycNum::zero(K));
          bool any = false;
          for (int t = 0; t <= b; ++t) {
            row[std::size_t(t)] = c.b.coeff(d - t);
            any = any || !row[std::size_t(t)].is_zero();
          }
          for (int r = 0; r < slots; ++r)
            for (int t = 0; t <= a; ++t) {
              CycNum& x = row[std::size_t(b + 1 + r * (a + 1) + t)];
              x = c.a[std::size_t(r)].coeff(d - t);
              any = any || !x.is_zero();
            }
          if (!any) continue;
          basis.push_back(std::move(row));
          ++equations;
        }
        // Keep the system in reduced form so it never grows past ncols rows.
        rref(basis, ncols);
        basis.erase(std::remove_if(basis.begin(), basis.end(),
                                   [](const std::vector<CycNum>& r) {
                                     return std::all_of(r.begin(), r.end(), [](const CycNum& v) { return v.is_zero(); });
                                   }),
                    basis.end());
      }
      auto ns = nullspace(K, basis, ncols);
      out.bounds = {a, b};
      out.nullity = int(ns.size());
      out.equations = equations;
      if (ns.empty()) continue;
      if (ns.size() > 1) {
        out.diagnostics = "solution space of dimension " + std::to_string(ns.size()) + " at bounds (" +
                          std::to_string(a) + ", " + std::to_string(b) + ")";
        return out;
      }
      std::vector<CycNum> v = ns[0];
      // Normalize the lowest nonzero coefficient of B to 1.
      int lead = -1;
      for (int t = 0; t <= b && lead < 0; ++t)
        if (!v[std::size_t(t)].is_zero()) lead = t;
      if (lead < 0) {
        out.diagnostics = "degenerate solution with zero denominator in slots";
        for (int r = 0; r < slots; ++r)
          for (int t = 0; t <= a; ++t)
            if (!v[std::size_t(b + 1 + r * (a + 1) + t)].is_zero()) {
              out.diagnostics += " " + std::to_string(r) + ":" + std::to_string(t);
            }
        return out;
      }
      const CycNum inv = v[std::size_t(lead)].inverse();
      for (auto& x : v) x = x * inv;
      UPoly B(K, std::vector<CycNum>(v.begin(), v.begin() + b + 1));
      std::vector<RationalModel> res;
      for (int r = 0; r < slots; ++r) {
        auto first = v.begin() + b + 1 + r * (a + 1);
        res.push_back({UPoly(K, std::vector<CycNum>(first, first + a + 1)), B.shifted(shift)});
      }
      out.unknowns = std::move(res);
      return out;
    }
  out.diagnostics = "no solution within bounds";
  return out;
}

nlohmann::json Report::to_json() const {
  nlohmann::json j{{"identity", identity},
                   {"configuration", configuration},
                   {"truncation", truncation},
                   {"status", passed ? "pass" : "fail"},
                   {"first_mismatch", passed ? nlohmann::json(nullptr) : first_mismatch}};
  if (!details.is_null()) j["details"] = details;
  return j;
}

// ---------------------------------------------------------------- SeriesEngine

SeriesEngine::SeriesEngine(HCoeff& H, int max_degree, int workers)
    : H_(&H), T_(max_degree), workers_(std::max(workers, 1)), S_(H.engine(), max_degree, workers_) {}

const PrimeSymbolTable& SeriesEngine::table(const PolyFq& p) {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = tables_.find(p);
  if (it == tables_.end()) it = tables_.emplace(p, std::make_unique<PrimeSymbolTable>(fq(), p, T_)).first;
  return *it->second;
}

USeries SeriesEngine::normalizer(int T) const {
  return geometric(field(), Rational::pow(Rational(std::int64_t(q())), n()), n(), T);
}

namespace {

void check_monic(const PolyFq& m, const char* who) {
  if (m.is_zero() || !m.is_monic()) throw std::domain_error(std::string(who) + ": expected a monic polynomial");
}

USeries row_to_series(const CycField& K, const std::vector<__int128>& row, int T) {
  USeries s(K, T);
  for (int a = 0; a <= T; ++a) s.coeff(a) = cyc_from_wide(K, row.data() + std::size_t(a) * std::size_t(K.phi()));
  return s;
}

}  // namespace

USeries SeriesEngine::raw_D(const PolyFq& m, const std::vector<PolyFq>& S, int T) {
  check_monic(m, "raw_D");
  if (T > T_) throw std::invalid_argument("raw_D: truncation beyond the engine's Gauss table");
  std::vector<PolyFq> Ssorted = S;
  std::sort(Ssorted.begin(), Ssorted.end());
  Ssorted.erase(std::unique(Ssorted.begin(), Ssorted.end()), Ssorted.end());
  auto key = std::make_pair(m, Ssorted);
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = d_memo_.find(key);
    if (it != d_memo_.end() && it->second.truncation() >= T) return it->second.truncated(T);
  }
  GaussEngine& G = engine();
  const FqConfig& F = fq();
  const CycField& K = field();

  // Primes of m (free to appear in d1 unless listed in S), then S-only primes.
  Factorization fm = G.factorization(m);
  std::vector<PolyFq> primes;
  std::vector<int> l, kmax;
  for (const auto& [p, e] : fm.factors) {
    primes.push_back(p);
    l.push_back(e);
    kmax.push_back(std::binary_search(Ssorted.begin(), Ssorted.end(), p) ? 0 : e + 1);
  }
  for (const PolyFq& p : Ssorted)
    if (std::find(primes.begin(), primes.end(), p) == primes.end()) {
      primes.push_back(p);
      l.push_back(0);
      kmax.push_back(0);
    }
  std::vector<const PrimeSymbolTable*> tabs;
  for (const PolyFq& p : primes) tabs.push_back(&table(p));

  // g(m, d1 d0) = g(m, d1) g(1, d0) (d0/m)^-1 (d0/d1)^2.
  std::vector<TwistedDivisor> divs;
  std::vector<int> k(primes.size(), 0);
  std::vector<std::int64_t> iv;
  for (;;) {
    int deg = 0;
    PolyFq d1 = PolyFq::constant(1);
    for (std::size_t j = 0; j < primes.size(); ++j) {
      deg += k[j] * primes[j].degree();
      if (k[j] > 0) d1 = poly::mul(F, d1, poly::pow(F, primes[j], unsigned(k[j])));
    }
    if (deg <= T) {
      CycNum v = G.gauss(1, m, d1);
      if (!v.is_zero()) {
        if (!v.to_ints(iv)) throw std::overflow_error("raw_D: Gauss sum is not integral");
        std::vector<int> coef(primes.size());
        for (std::size_t j = 0; j < primes.size(); ++j) coef[j] = 2 * k[j] - l[j];
        divs.push_back({deg, coef, iv});
      }
    }
    std::size_t j = 0;
    while (j < k.size() && ++k[j] > kmax[j]) k[j++] = 0;
    if (j == k.size()) break;
  }

  std::vector<__int128> row(std::size_t(T + 1) * std::size_t(K.phi()), 0);
  twisted_row(F, G.embedding(), S_, tabs, divs, T, row.data());
  USeries s = row_to_series(K, row, T);
  std::lock_guard<std::mutex> lock(mu_);
  d_memo_[key] = s;
  return s;
}

USeries SeriesEngine::raw_E(const PolyFq& m, int T) {
  check_monic(m, "raw_E");
  if (T > T_) throw std::invalid_argument("raw_E: truncation beyond the engine's Gauss table");
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = e_memo_.find(m);
    if (it != e_memo_.end() && it->second.truncation() >= T) return it->second.truncated(T);
  }
  HCoeff& H = *H_;
  const FqConfig& F = fq();
  const CycField& K = field();
  std::vector<HBlock> mb = H.blocks(PolyFq::constant(1), m);
  USeries s(K, T);
  bool vanishes = false;
  for (const HBlock& x : mb)
    if (x.l > 2) vanishes = true;
  if (!vanishes) {
    std::vector<const PrimeSymbolTable*> tabs;
    for (const HBlock& x : mb) tabs.push_back(&table(x.prime));
    // H(d1 d0, m) = H(d1, m) g(1, d0) (d0/m)^-1 (d0/d1)^2.
    std::vector<TwistedDivisor> divs;
    std::vector<int> k(mb.size(), 0);
    std::vector<std::int64_t> iv;
    for (;;) {
      int deg = 0;
      bool ok = true;
      for (std::size_t j = 0; j < mb.size(); ++j) {
        deg += k[j] * mb[j].prime.degree();
        if (H.ppart(mb[j].prime).at(k[j], mb[j].l).is_zero()) ok = false;
      }
      if (ok && deg <= T) {
        std::vector<HBlock> blk = mb;
        for (std::size_t j = 0; j < mb.size(); ++j) blk[j].k = k[j];
        CycNum v = H.combine(blk);
        if (!v.is_zero()) {
          if (!v.to_ints(iv)) throw std::overflow_error("raw_E: H value is not integral");
          std::vector<int> coef(mb.size());
          for (std::size_t j = 0; j < mb.size(); ++j) coef[j] = 2 * k[j] - mb[j].l;
          divs.push_back({deg, coef, iv});
        }
      }
      std::size_t j = 0;
      while (j < k.size() && ++k[j] > 2) k[j++] = 0;
      if (j == k.size()) break;
    }
    std::vector<__int128> row(std::size_t(T + 1) * std::size_t(K.phi()), 0);
    twisted_row(F, H.engine().embedding(), S_, tabs, divs, T, row.data());
    s = row_to_series(K, row, T);
  }
  std::lock_guard<std::mutex> lock(mu_);
  e_memo_[m] = s;
  return s;
}

USeries SeriesEngine::kubota_D(const PolyFq& m, const std::vector<PolyFq>& S, int i_class, int T) {
  USeries s = raw_D(m, S, T) * normalizer(T);
  return i_class < 0 ? s : s.residue_class(i_class, n());
}

USeries SeriesEngine::E_series(const PolyFq& m, int i_class, int T) {
  USeries s = raw_E(m, T) * normalizer(T);
  return i_class < 0 ? s : s.residue_class(i_class, n());
}

UPoly SeriesEngine::model_denominator() const {
  return UPoly::binomial(field(), Rational::pow(Rational(std::int64_t(q())), n() + 1), n());
}

std::optional<RationalModel> SeriesEngine::D_model(const PolyFq& m, int i_class, int T) {
  return rationalize_over(kubota_D(m, {}, i_class, T), model_denominator()).model;
}

std::optional<RationalModel> SeriesEngine::E_model(const PolyFq& m, int i_class, int T) {
  return rationalize_over(E_series(m, i_class, T), model_denominator()).model;
}

}  // namespace wmds
