#include "wmds/weylact.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace wmds {

int mod_n(std::int64_t a, int n) { return int(((a % n) + n) % n); }

RootSystemDesc RootSystemDesc::A(int rank) {
  if (rank < 1) throw std::invalid_argument("RootSystemDesc: rank must be positive");
  RootSystemDesc R;
  R.rank = rank;
  R.adjacent.assign(std::size_t(rank), std::vector<bool>(std::size_t(rank), false));
  for (int i = 0; i + 1 < rank; ++i) {
    R.adjacent[std::size_t(i)][std::size_t(i + 1)] = true;
    R.adjacent[std::size_t(i + 1)][std::size_t(i)] = true;
  }
  return R;
}

int RootSystemDesc::order(int i, int j) const {
  if (i == j) return 1;
  return adj(i, j) ? 3 : 2;
}

std::vector<int> RootSystemDesc::neighbors(int k) const {
  std::vector<int> out;
  for (int j = 0; j < rank; ++j)
    if (j != k && adj(k, j)) out.push_back(j);
  return out;
}

int MonomialKey::height() const {
  int s = 0;
  for (int b : beta) s += b;
  return s;
}

int MonomialKey::d(const RootSystemDesc& R, int j) const {
  int s = 0;
  for (int i : R.neighbors(j)) s += beta[std::size_t(i)];
  return s;
}

std::vector<int> MonomialKey::support() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < beta.size(); ++i)
    if (beta[i] != 0) out.push_back(int(i));
  return out;
}

bool MonomialKey::nonnegative() const {
  return std::all_of(beta.begin(), beta.end(), [](int b) { return b >= 0; });
}

bool MonomialKey::dominates(const MonomialKey& o) const {
  for (std::size_t i = 0; i < beta.size(); ++i)
    if (beta[i] < o.beta[i]) return false;
  return true;
}

// ---------------------------------------------------------------- LPoly

LPoly LPoly::constant(const CycField& K, int rank, const CycNum& c) {
  return monomial(K, rank, Exps(std::size_t(rank), 0), c);
}

LPoly LPoly::monomial(const CycField& K, int rank, const Exps& e, const CycNum& c) {
  LPoly p(K, rank);
  p.add_term(e, c);
  return p;
}

CycNum LPoly::coeff(const Exps& e) const {
  auto it = t_.find(e);
  return it == t_.end() ? CycNum::zero(*K_) : it->second;
}

void LPoly::add_term(const Exps& e, const CycNum& c) {
  if (c.is_zero()) return;
  auto [it, inserted] = t_.emplace(e, c);
  if (inserted) return;
  it->second += c;
  if (it->second.is_zero()) t_.erase(it);
}

LPoly LPoly::operator-() const {
  LPoly r(*this);
  for (auto& [e, c] : r.t_) c = -c;
  return r;
}

LPoly& LPoly::operator+=(const LPoly& o) {
  if (K_ == nullptr) {
    K_ = o.K_;
    r_ = o.r_;
  }
  for (const auto& [e, c] : o.t_) add_term(e, c);
  return *this;
}

LPoly& LPoly::operator-=(const LPoly& o) {
  if (K_ == nullptr) {
    K_ = o.K_;
    r_ = o.r_;
  }
  for (const auto& [e, c] : o.t_) add_term(e, -c);
  return *this;
}

LPoly operator*(const LPoly& a, const LPoly& b) {
  LPoly r(a.K_ ? *a.K_ : *b.K_, std::max(a.r_, b.r_));
  Exps e(static_cast<std::size_t>(r.r_));
  for (const auto& [ea, ca] : a.t_)
    for (const auto& [eb, cb] : b.t_) {
      for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
      r.t_[e].add_product(ca, cb);
    }
  for (auto it = r.t_.begin(); it != r.t_.end();) it = it->second.is_zero() ? r.t_.erase(it) : std::next(it);
  return r;
}

LPoly LPoly::scaled(const CycNum& c) const {
  LPoly r(*K_, r_);
  if (c.is_zero()) return r;
  for (const auto& [e, v] : t_) r.t_.emplace(e, v * c);
  return r;
}

LPoly LPoly::scaled(const Rational& c) const {
  LPoly r(*K_, r_);
  if (c.is_zero()) return r;
  for (const auto& [e, v] : t_) r.t_.emplace(e, v * c);
  return r;
}

LPoly LPoly::shifted(const Exps& s) const {
  LPoly r(*K_, r_);
  for (const auto& [e, v] : t_) {
    Exps f = e;
    for (std::size_t i = 0; i < f.size(); ++i) f[i] += s[i];
    r.t_.emplace(std::move(f), v);
  }
  return r;
}

LPoly LPoly::substitute(const std::vector<Exps>& A, const std::vector<Rational>& coef) const {
  LPoly r(*K_, r_);
  for (const auto& [e, v] : t_) {
    Exps f(std::size_t(r_), 0);
    Rational s(1);
    for (int j = 0; j < r_; ++j) {
      if (e[std::size_t(j)] == 0) continue;
      for (int i = 0; i < r_; ++i) f[std::size_t(i)] += e[std::size_t(j)] * A[std::size_t(j)][std::size_t(i)];
      if (!coef[std::size_t(j)].is_one()) s *= Rational::pow(coef[std::size_t(j)], e[std::size_t(j)]);
    }
    r.add_term(f, v * s);
  }
  return r;
}

LPoly LPoly::twist(const RootEmbedding& E, const std::vector<int>& t) const {
  LPoly r(*K_, r_);
  for (const auto& [e, v] : t_) {
    std::int64_t k = 0;
    for (int j = 0; j < r_; ++j) k += std::int64_t(t[std::size_t(j)]) * e[std::size_t(j)];
    r.t_.emplace(e, v.mul_zeta(E.mu_exponent(k)));
  }
  return r;
}

Exps LPoly::min_exps() const {
  Exps m(std::size_t(r_), 0);
  bool first = true;
  for (const auto& [e, v] : t_) {
    for (int i = 0; i < r_; ++i) m[std::size_t(i)] = first ? e[std::size_t(i)] : std::min(m[std::size_t(i)], e[std::size_t(i)]);
    first = false;
  }
  return m;
}

bool LPoly::in_power_form(int n) const {
  for (const auto& [e, v] : t_)
    for (int x : e)
      if (mod_n(x, n) != 0) return false;
  return true;
}

std::optional<LPoly> LPoly::divide_exact(const LPoly& d) const {
  if (d.is_zero()) throw std::domain_error("divide_exact: zero divisor");
  if (is_zero()) return *this;
  Exps mn = min_exps(), md = d.min_exps();
  Exps neg_mn = mn, neg_md = md;
  for (auto& x : neg_mn) x = -x;
  for (auto& x : neg_md) x = -x;
  LPoly rem = shifted(neg_mn);
  LPoly dd = d.shifted(neg_md);
  const auto& [ed, cd] = *dd.t_.rbegin();
  CycNum cinv = cd.inverse();
  LPoly quo(*K_, r_);
  Exps diff(static_cast<std::size_t>(r_));
  while (!rem.is_zero()) {
    const auto& [er, cr] = *rem.t_.rbegin();
    for (int i = 0; i < r_; ++i) {
      diff[std::size_t(i)] = er[std::size_t(i)] - ed[std::size_t(i)];
      if (diff[std::size_t(i)] < 0) return std::nullopt;
    }
    CycNum c = cr * cinv;
    quo.add_term(diff, c);
    Exps f(static_cast<std::size_t>(r_));
    for (const auto& [e, v] : dd.t_) {
      for (int i = 0; i < r_; ++i) f[std::size_t(i)] = e[std::size_t(i)] + diff[std::size_t(i)];
      rem.add_term(f, -(v * c));
    }
  }
  Exps s(static_cast<std::size_t>(r_));
  for (int i = 0; i < r_; ++i) s[std::size_t(i)] = mn[std::size_t(i)] - md[std::size_t(i)];
  return quo.shifted(s);
}

nlohmann::json LPoly::to_json() const {
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& [e, v] : t_) terms.push_back({{"exps", e}, {"coeff", v.to_json()}});
  return terms;
}

std::string LPoly::str() const {
  if (t_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto it = t_.rbegin(); it != t_.rend(); ++it) {
    if (!first) os << " + ";
    first = false;
    os << it->second.str();
    for (int i = 0; i < r_; ++i)
      if (it->first[std::size_t(i)] != 0) os << "*x" << (i + 1) << "^" << it->first[std::size_t(i)];
  }
  return os.str();
}

// ---------------------------------------------------------------- RatFun

namespace {

LPoly product(const std::vector<LPoly>& fs, const CycField& K, int rank) {
  LPoly r = LPoly::constant(K, rank, CycNum::one(K));
  for (const LPoly& f : fs) r = r * f;
  return r;
}

// Rewrites 1/F as x^-m c^-1 / F' with F' a polynomial, constant term 1 when
// present and otherwise leading coefficient 1. Returns F' and applies the
// monomial and scalar to num.
LPoly normalize_factor(const LPoly& F, LPoly& num) {
  Exps m = F.min_exps();
  Exps neg = m;
  for (auto& x : neg) x = -x;
  LPoly G = F.shifted(neg);
  CycNum c = G.coeff(Exps(std::size_t(F.rank()), 0));
  if (c.is_zero()) c = G.terms().rbegin()->second;
  CycNum ci = c.inverse();
  num = num.shifted(neg).scaled(ci);
  return G.scaled(ci);
}

// All twist vectors in (Z/n)^r except zero.
std::vector<std::vector<int>> nonzero_twists(int n, int r) {
  std::vector<std::vector<int>> out;
  std::vector<int> t(std::size_t(r), 0);
  for (;;) {
    std::size_t j = 0;
    while (j < t.size() && ++t[j] == n) t[j++] = 0;
    if (j == t.size()) break;
    out.push_back(t);
  }
  return out;
}

bool is_one(const LPoly& f) {
  return f.terms().size() == 1 && f.terms().begin()->first == Exps(std::size_t(f.rank()), 0) &&
         f.terms().begin()->second == CycNum::one(f.field());
}

}  // namespace

RatFun RatFun::from_parts(int n, LPoly num, std::vector<LPoly> den) {
  RatFun f;
  f.n_ = n;
  f.num_ = std::move(num);
  f.den_ = std::move(den);
  return f;
}

RatFun RatFun::polynomial(int n, const LPoly& num) { return from_parts(n, num, {}); }

RatFun RatFun::make(const RootEmbedding& E, const LPoly& num, const LPoly& den) {
  return make(E, num, std::vector<LPoly>{den});
}

RatFun RatFun::make(const RootEmbedding& E, const LPoly& num, const std::vector<LPoly>& den) {
  const int n = E.n();
  LPoly N = num;
  std::vector<LPoly> factors;
  for (const LPoly& D : den) {
    if (D.is_zero()) throw std::domain_error("RatFun: zero denominator");
    LPoly F = D;
    if (!F.in_power_form(n)) {
      LPoly T = LPoly::constant(D.field(), D.rank(), CycNum::one(D.field()));
      for (const auto& t : nonzero_twists(n, D.rank())) T = T * D.twist(E, t);
      F = D * T;
      N = N * T;
      if (!F.in_power_form(n)) throw std::logic_error("RatFun: twist product is not in x^n form");
    }
    F = normalize_factor(F, N);
    if (!is_one(F)) factors.push_back(std::move(F));
  }
  return from_parts(n, std::move(N), std::move(factors));
}

LPoly RatFun::den() const { return product(den_, num_.field(), num_.rank()); }

namespace {

// Splits the factors of b into those matched by an equal factor of a and the rest.
void match_factors(const std::vector<LPoly>& a, const std::vector<LPoly>& b, std::vector<bool>& a_used,
                   std::vector<LPoly>& b_extra) {
  a_used.assign(a.size(), false);
  for (const LPoly& f : b) {
    bool found = false;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (!a_used[i] && a[i] == f) {
        a_used[i] = true;
        found = true;
        break;
      }
    if (!found) b_extra.push_back(f);
  }
}

}  // namespace

RatFun operator+(const RatFun& a, const RatFun& b) {
  if (a.rank() == 0) return b;
  if (b.rank() == 0) return a;
  std::vector<bool> used;
  std::vector<LPoly> b_extra, a_extra;
  match_factors(a.den_, b.den_, used, b_extra);
  for (std::size_t i = 0; i < a.den_.size(); ++i)
    if (!used[i]) a_extra.push_back(a.den_[i]);
  const CycField& K = a.num_.field();
  const int r = std::max(a.rank(), b.rank());
  LPoly num = a.num_ * product(b_extra, K, r) + b.num_ * product(a_extra, K, r);
  std::vector<LPoly> den = a.den_;
  den.insert(den.end(), b_extra.begin(), b_extra.end());
  return RatFun::from_parts(a.n_, std::move(num), std::move(den));
}

RatFun operator-(const RatFun& a, const RatFun& b) { return a + b.scaled(-CycNum::one(b.num_.field())); }

RatFun operator*(const RatFun& a, const RatFun& b) {
  std::vector<LPoly> den = a.den_;
  den.insert(den.end(), b.den_.begin(), b.den_.end());
  return RatFun::from_parts(a.n_, a.num_ * b.num_, std::move(den));
}

RatFun RatFun::scaled(const CycNum& c) const { return from_parts(n_, num_.scaled(c), den_); }

RatFun RatFun::shifted(const Exps& e) const { return from_parts(n_, num_.shifted(e), den_); }

bool operator==(const RatFun& a, const RatFun& b) {
  if (a.rank() != b.rank()) return false;
  std::vector<bool> used;
  std::vector<LPoly> b_extra, a_extra;
  match_factors(a.den_, b.den_, used, b_extra);
  for (std::size_t i = 0; i < a.den_.size(); ++i)
    if (!used[i]) a_extra.push_back(a.den_[i]);
  const CycField& K = a.num_.field();
  return a.num_ * product(b_extra, K, a.rank()) == b.num_ * product(a_extra, K, a.rank());
}

void RatFun::cancel() {
  for (std::size_t i = 0; i < den_.size();) {
    auto q = num_.divide_exact(den_[i]);
    if (q) {
      num_ = std::move(*q);
      den_.erase(den_.begin() + std::ptrdiff_t(i));
    } else {
      ++i;
    }
  }
}

std::vector<CycNum> RatFun::series(int T) const {
  if (rank() != 1) throw std::invalid_argument("series: rank-one functions only");
  const CycField& K = num_.field();
  std::vector<CycNum> s(std::size_t(T) + 1, CycNum::zero(K));
  for (const auto& [e, c] : num_.terms()) {
    if (e[0] < 0) throw std::domain_error("series: numerator has negative exponents");
    if (e[0] <= T) s[std::size_t(e[0])] = c;
  }
  for (const LPoly& F : den_) {
    std::vector<CycNum> f(std::size_t(T) + 1, CycNum::zero(K));
    for (const auto& [e, c] : F.terms())
      if (e[0] <= T) f[std::size_t(e[0])] = c;
    if (f[0] != CycNum::one(K)) throw std::domain_error("series: denominator constant term is not 1");
    // s <- s / F, solving in place.
    for (int k = 0; k <= T; ++k)
      for (int j = 1; j <= k; ++j)
        if (!f[std::size_t(j)].is_zero()) s[std::size_t(k)] -= f[std::size_t(j)] * s[std::size_t(k - j)];
  }
  return s;
}

std::vector<std::vector<CycNum>> RatFun::series2(int T1, int T2) const {
  if (rank() != 2) throw std::invalid_argument("series2: rank-two functions only");
  const CycField& K = num_.field();
  std::vector<std::vector<CycNum>> s(std::size_t(T1) + 1, std::vector<CycNum>(std::size_t(T2) + 1, CycNum::zero(K)));
  for (const auto& [e, c] : num_.terms()) {
    if (e[0] < 0 || e[1] < 0) throw std::domain_error("series2: numerator has negative exponents");
    if (e[0] <= T1 && e[1] <= T2) s[std::size_t(e[0])][std::size_t(e[1])] = c;
  }
  for (const LPoly& F : den_) {
    if (F.coeff({0, 0}) != CycNum::one(K)) throw std::domain_error("series2: denominator constant term is not 1");
    for (int a = 0; a <= T1; ++a)
      for (int b = 0; b <= T2; ++b)
        for (const auto& [e, c] : F.terms()) {
          if ((e[0] == 0 && e[1] == 0) || e[0] > a || e[1] > b) continue;
          s[std::size_t(a)][std::size_t(b)] -= c * s[std::size_t(a - e[0])][std::size_t(b - e[1])];
        }
  }
  return s;
}

nlohmann::json RatFun::to_json() const {
  nlohmann::json den = nlohmann::json::array();
  for (const LPoly& f : den_) den.push_back(f.to_json());
  return {{"numerator", num_.to_json()}, {"denominator", den}};
}

// ---------------------------------------------------------------- action

namespace {

RatFun substitute_monomial(const RatFun& f, const std::vector<Exps>& A, const std::vector<Rational>& coef) {
  LPoly num = f.num().substitute(A, coef);
  std::vector<LPoly> den;
  for (const LPoly& F : f.den_factors()) {
    LPoly G = normalize_factor(F.substitute(A, coef), num);
    if (!is_one(G)) den.push_back(std::move(G));
  }
  return RatFun::from_parts(f.n(), std::move(num), std::move(den));
}

// x -> 1/(p^2 x) in one variable.
RatFun invert_x(const RatFun& f, std::int64_t p) {
  return substitute_monomial(f, {Exps{-1}}, {Rational(1, p * p)});
}

// (p x)^e in one variable of a rank-r ring.
LPoly px_power(const CycField& K, int rank, int var, std::int64_t p, int e) {
  Exps ex(std::size_t(rank), 0);
  ex[std::size_t(var)] = e;
  return LPoly::monomial(K, rank, ex, CycNum(K, Rational::pow(Rational(p), e)));
}

}  // namespace

WeylAction::WeylAction(RootSystemDesc R, GaussEngine& G, PolyFq prime, std::vector<int> twist)
    : R_(std::move(R)), G_(&G), prime_(std::move(prime)), l_(std::move(twist)) {
  if (!is_irreducible(G.fq(), prime_) || !prime_.is_monic()) throw std::domain_error("WeylAction: expected a monic prime");
  p_ = std::int64_t(norm(G.fq(), prime_));
  if (l_.empty()) l_.assign(std::size_t(R_.rank), 0);
  if (int(l_.size()) != R_.rank) throw std::invalid_argument("WeylAction: twist parameter has the wrong length");
  for (int l : l_)
    if (l < 0) throw std::invalid_argument("WeylAction: twist parameter must be nonnegative");
}

LPoly WeylAction::var(int k) const {
  Exps e(std::size_t(R_.rank), 0);
  e[std::size_t(k)] = 1;
  return LPoly::monomial(field(), R_.rank, e, CycNum::one(field()));
}

namespace {

void sigma_data(const RootSystemDesc& R, int k, std::int64_t p, std::vector<Exps>& A, std::vector<Rational>& coef) {
  A.assign(std::size_t(R.rank), Exps(std::size_t(R.rank), 0));
  coef.assign(std::size_t(R.rank), Rational(1));
  for (int j = 0; j < R.rank; ++j) {
    if (j == k) {
      A[std::size_t(j)][std::size_t(k)] = -1;
      coef[std::size_t(j)] = Rational(1, p * p);
    } else if (R.adj(k, j)) {
      A[std::size_t(j)][std::size_t(k)] = 1;
      A[std::size_t(j)][std::size_t(j)] = 1;
      coef[std::size_t(j)] = Rational(p);
    } else {
      A[std::size_t(j)][std::size_t(j)] = 1;
    }
  }
}

}  // namespace

std::vector<RatFun> WeylAction::sigma_subst(int k) const {
  std::vector<Exps> A;
  std::vector<Rational> coef;
  sigma_data(R_, k, p_, A, coef);
  std::vector<RatFun> out;
  for (int j = 0; j < R_.rank; ++j)
    out.push_back(RatFun::polynomial(n(), LPoly::monomial(field(), R_.rank, A[std::size_t(j)], CycNum(field(), coef[std::size_t(j)]))));
  return out;
}

RatFun WeylAction::substitute(const RatFun& f, int k) const {
  std::vector<Exps> A;
  std::vector<Rational> coef;
  sigma_data(R_, k, p_, A, coef);
  return substitute_monomial(f, A, coef);
}

RatFun WeylAction::sieve(const RatFun& f, int k, int i, int j) const {
  const int nn = n();
  MonomialKey key;
  LPoly num(field(), R_.rank);
  for (const auto& [e, c] : f.num().terms()) {
    key.beta = e;
    if (mod_n(e[std::size_t(k)], nn) == mod_n(i, nn) && mod_n(key.d(R_, k), nn) == mod_n(j, nn)) num.add_term(e, c);
  }
  return RatFun::from_parts(nn, std::move(num), f.den_factors());
}

RatFun WeylAction::sieve_by_twists(const RatFun& f, int k, int i, int j) const {
  const int nn = n();
  const RootEmbedding& E = embedding();
  LPoly acc(field(), R_.rank);
  std::vector<int> t(std::size_t(R_.rank), 0);
  for (int a = 0; a < nn; ++a)
    for (int b = 0; b < nn; ++b) {
      std::fill(t.begin(), t.end(), 0);
      t[std::size_t(k)] = a;
      for (int m : R_.neighbors(k)) t[std::size_t(m)] = b;
      acc += f.num().twist(E, t).scaled(E.zeta_n(-std::int64_t(i) * a - std::int64_t(j) * b));
    }
  for (const LPoly& F : f.den_factors())
    for (int a = 0; a < nn; ++a) {
      std::fill(t.begin(), t.end(), a);
      if (!(F.twist(E, t) == F)) throw std::logic_error("sieve_by_twists: denominator is not twist invariant");
    }
  return RatFun::from_parts(nn, acc.scaled(Rational(1, std::int64_t(nn) * nn)), f.den_factors());
}

CycNum WeylAction::gstar(int i) const {
  if (mod_n(i, n()) == 0) return -CycNum::one(field());
  return G_->gauss_prime(i, prime_) * Rational(1, p_);
}

RatFun WeylAction::P(int i, int j) const {
  const int nn = n();
  const CycField& K = field();
  LPoly num = px_power(K, 1, 0, p_, 1 - mod_n(-2 * i + j + 1, nn)).scaled(Rational(p_ - 1, p_));
  LPoly den = LPoly::constant(K, 1, CycNum::one(K));
  den.add_term({nn}, CycNum(K, -Rational::pow(Rational(p_), nn - 1)));
  return RatFun::from_parts(nn, num, {den});
}

RatFun WeylAction::Q(int i, int j) const {
  const int nn = n();
  const CycField& K = field();
  LPoly tail = LPoly::constant(K, 1, CycNum::one(K));
  tail.add_term({nn}, CycNum(K, -Rational::pow(Rational(p_), nn)));
  LPoly num = (px_power(K, 1, 0, p_, 1 - nn) * tail).scaled(-gstar(2 * i - j - 1));
  LPoly den = LPoly::constant(K, 1, CycNum::one(K));
  den.add_term({nn}, CycNum(K, -Rational::pow(Rational(p_), nn - 1)));
  return RatFun::from_parts(nn, num, {den});
}

LPoly WeylAction::kernel_num(int k, int i0, int j) const {
  const int nn = n();
  const int r = R_.rank;
  const CycField& K = field();
  // P_{i0, j} + Q_{(j+1-i0), j}; both are indexed by j + 1 - 2 i0.
  const int c = j + 1 - 2 * i0;
  LPoly pn = px_power(K, r, k, p_, 1 - mod_n(c, nn)).scaled(Rational(p_ - 1, p_));
  LPoly tail = LPoly::constant(K, r, CycNum::one(K));
  Exps e(std::size_t(r), 0);
  e[std::size_t(k)] = nn;
  tail.add_term(e, CycNum(K, -Rational::pow(Rational(p_), nn)));
  LPoly qn = (px_power(K, r, k, p_, 1 - nn) * tail).scaled(-gstar(c));
  return pn + qn;
}

RatFun WeylAction::act(const RatFun& f, int k) const {
  const int nn = n();
  const int r = R_.rank;
  const CycField& K = field();
  if (f.rank() != r) throw std::invalid_argument("act: rank mismatch");
  std::vector<Exps> A;
  std::vector<Rational> coef;
  sigma_data(R_, k, p_, A, coef);

  std::map<std::pair<int, int>, LPoly> parts;
  MonomialKey key;
  for (const auto& [e, c] : f.num().terms()) {
    key.beta = e;
    auto ij = std::make_pair(mod_n(e[std::size_t(k)], nn), mod_n(key.d(R_, k), nn));
    auto it = parts.try_emplace(ij, K, r).first;
    it->second.add_term(e, c);
  }
  LPoly num(K, r);
  const int lk = l_[std::size_t(k)];
  for (const auto& [ij, part] : parts) {
    const int j = mod_n(ij.second + lk, nn);
    num += kernel_num(k, ij.first, j) * part.substitute(A, coef);
  }
  num = num * px_power(K, r, k, p_, lk);

  std::vector<LPoly> den;
  for (const LPoly& F : f.den_factors()) {
    LPoly G = normalize_factor(F.substitute(A, coef), num);
    if (!is_one(G)) den.push_back(std::move(G));
  }
  LPoly extra = LPoly::constant(K, r, CycNum::one(K));
  Exps e(std::size_t(r), 0);
  e[std::size_t(k)] = nn;
  extra.add_term(e, CycNum(K, -Rational::pow(Rational(p_), nn - 1)));
  den.push_back(extra);
  RatFun out = RatFun::from_parts(nn, std::move(num), std::move(den));
  out.cancel();
  return out;
}

RatFun WeylAction::act_word(const RatFun& f, const std::vector<int>& word) const {
  RatFun g = f;
  for (int k : word) g = act(g, k);
  return g;
}

// ---------------------------------------------------------------- h and its pieces

LPoly h_numerator(GaussEngine& G, const PolyFq& prime) {
  const CycField& K = G.field();
  const Rational p(std::int64_t(norm(G.fq(), prime)));
  CycNum g1 = G.gauss_prime(1, prime);
  CycNum g2 = G.gauss_prime(2, prime);
  CycNum pg12 = g1 * g2 * p;
  LPoly N(K, 2);
  N.add_term({0, 0}, CycNum::one(K));
  N.add_term({1, 0}, g1);
  N.add_term({0, 1}, g1);
  N.add_term({1, 2}, pg12);
  N.add_term({2, 1}, pg12);
  N.add_term({2, 2}, pg12 * g1);
  return N;
}

RatFun invariant_h(GaussEngine& G, const PolyFq& prime) {
  const CycField& K = G.field();
  const int n = G.n();
  const Rational p(std::int64_t(norm(G.fq(), prime)));
  auto binom = [&](Exps e, const Rational& c) {
    LPoly f = LPoly::constant(K, 2, CycNum::one(K));
    f.add_term(e, CycNum(K, -c));
    return f;
  };
  std::vector<LPoly> den = {binom({n, 0}, Rational::pow(p, n - 1)), binom({0, n}, Rational::pow(p, n - 1)),
                            binom({n, n}, Rational::pow(p, 2 * n - 1))};
  return RatFun::from_parts(n, h_numerator(G, prime), std::move(den));
}

RatFun y_coefficient(const RootEmbedding& E, const RatFun& f, int l) {
  if (f.rank() != 2) throw std::invalid_argument("y_coefficient: rank-two functions only");
  const CycField& K = E.field();
  std::vector<LPoly> xden;
  // Series in y with Laurent-polynomial coefficients in x, truncated at y^l.
  std::map<int, LPoly> s;
  for (const auto& [e, c] : f.num().terms()) {
    if (e[1] > l) continue;
    auto it = s.try_emplace(e[1], K, 1).first;
    it->second.add_term({e[0]}, c);
  }
  for (const LPoly& F : f.den_factors()) {
    bool has_y = false;
    for (const auto& [e, c] : F.terms()) has_y = has_y || e[1] != 0;
    if (!has_y) {
      LPoly g(K, 1);
      for (const auto& [e, c] : F.terms()) g.add_term({e[0]}, c);
      xden.push_back(std::move(g));
      continue;
    }
    if (F.terms().size() != 2 || F.coeff({0, 0}) != CycNum::one(K))
      throw std::domain_error("y_coefficient: y-dependent factor is not 1 - c x^a y^b");
    Exps ab;
    CycNum c;
    for (const auto& [e, v] : F.terms())
      if (e != Exps{0, 0}) {
        ab = e;
        c = -v;
      }
    if (ab[1] <= 0) throw std::domain_error("y_coefficient: expected a positive power of y");
    // Multiply by sum_m (c x^a y^b)^m.
    std::map<int, LPoly> t;
    for (const auto& [b, poly] : s) {
      LPoly term = poly;
      for (int m = 0; b + m * ab[1] <= l; ++m) {
        auto it = t.try_emplace(b + m * ab[1], K, 1).first;
        it->second += term;
        term = term.shifted({ab[0]}).scaled(c);
      }
    }
    s = std::move(t);
  }
  LPoly num = s.count(l) ? s.at(l) : LPoly(K, 1);
  return RatFun::make(E, num, xden);
}

RatFun x_residue_part(const RatFun& f, int i) {
  if (f.rank() != 1) throw std::invalid_argument("x_residue_part: rank-one functions only");
  LPoly num(f.num().field(), 1);
  for (const auto& [e, c] : f.num().terms())
    if (mod_n(e[0] - i, f.n()) == 0) num.add_term(e, c);
  for (const LPoly& F : f.den_factors())
    if (!F.in_power_form(f.n())) throw std::logic_error("x_residue_part: denominator not in x^n form");
  return RatFun::from_parts(f.n(), std::move(num), f.den_factors());
}

RatFun h_pl(GaussEngine& G, const PolyFq& prime, int l, int i, PieceSource src) {
  const int n = G.n();
  if (src == PieceSource::Invariant)
    return x_residue_part(y_coefficient(G.embedding(), invariant_h(G, prime), l), mod_n(i, n));
  const CycField& K = G.field();
  const std::int64_t p = std::int64_t(norm(G.fq(), prime));
  LPoly num(K, 1);
  const LPoly N = h_numerator(G, prime);
  for (const auto& [e, c] : N.terms())
    if (e[1] == l && mod_n(e[0], n) == mod_n(i, n)) num.add_term({e[0]}, c);
  LPoly den = LPoly::constant(K, 1, CycNum::one(K));
  den.add_term({n}, CycNum(K, -Rational::pow(Rational(p), n - 1)));
  return RatFun::make(G.embedding(), num, den);
}

RatFun f_pl(GaussEngine& G, const PolyFq& prime, int l, int i, PieceSource src) {
  const int n = G.n();
  const std::int64_t p = std::int64_t(norm(G.fq(), prime));
  RatFun h = h_pl(G, prime, l, i, src);
  if (mod_n(l - 2 * i, n) == n - 1) return h;
  CycNum c = G.gauss_prime(2 * i - l - 1, prime) * Rational::pow(Rational(p), mod_n(2 * i - l - 2, n));
  RatFun other = h_pl(G, prime, l, l + 1 - i, src).shifted({mod_n(2 * i - l - 1, n)}).scaled(c);
  return h - other;
}

std::pair<RatFun, RatFun> hpl_identity_sides(GaussEngine& G, const PolyFq& prime, int l, int i) {
  const int n = G.n();
  WeylAction W(RootSystemDesc::A(1), G, prime);
  const std::int64_t p = W.p();
  const int j = mod_n(l, n);
  const CycField& K = G.field();
  RatFun pre = RatFun::polynomial(n, px_power(K, 1, 0, p, l));
  RatFun rhs = pre * W.P(i, j) * invert_x(h_pl(G, prime, l, i), p) +
               pre * W.Q(i, j) * invert_x(h_pl(G, prime, l, l + 1 - i), p);
  return {h_pl(G, prime, l, i), rhs};
}

std::pair<RatFun, RatFun> fpl_identity_sides(GaussEngine& G, const PolyFq& prime, int l, int i) {
  const int n = G.n();
  const std::int64_t p = std::int64_t(norm(G.fq(), prime));
  RatFun f = f_pl(G, prime, l, i);
  RatFun pre = RatFun::polynomial(n, px_power(G.field(), 1, 0, p, l - mod_n(l - 2 * i, n)));
  return {f, pre * invert_x(f, p)};
}

}  // namespace wmds
