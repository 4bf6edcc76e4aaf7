#include "wmds/cyclo.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace wmds {

int euler_phi(int m) {
  int r = m;
  for (int p = 2; p * p <= m; ++p) {
    if (m % p) continue;
    while (m % p == 0) m /= p;
    r -= r / p;
  }
  if (m > 1) r -= r / m;
  return r;
}

namespace {

using IPoly = std::vector<std::int64_t>;

IPoly ipoly_divexact(IPoly a, const IPoly& b) {
  // b monic
  int da = int(a.size()) - 1, db = int(b.size()) - 1;
  IPoly qt(std::size_t(std::max(da - db + 1, 1)), 0);
  for (int i = da; i >= db; --i) {
    std::int64_t c = a[std::size_t(i)];
    qt[std::size_t(i - db)] = c;
    for (int j = 0; j <= db; ++j) a[std::size_t(i - db + j)] -= c * b[std::size_t(j)];
  }
  return qt;
}

IPoly cyclotomic(int M) {
  // x^M - 1 divided by Phi_d for every proper divisor d.
  IPoly f(std::size_t(M) + 1, 0);
  f[0] = -1;
  f[std::size_t(M)] = 1;
  for (int d = 1; d < M; ++d)
    if (M % d == 0) f = ipoly_divexact(f, cyclotomic(d));
  return f;
}

}  // namespace

CycField::CycField(int M) : M_(M), phi_(euler_phi(M)), poly_(cyclotomic(M)) {
  int top = std::max(M, 2 * phi_ - 1);
  pow_.assign(std::size_t(top), IPoly(std::size_t(phi_), 0));
  IPoly cur(std::size_t(phi_), 0);
  cur[0] = 1;
  if (phi_ == 1) cur[0] = 1;
  for (int k = 0; k < top; ++k) {
    pow_[std::size_t(k)] = cur;
    // multiply by z and reduce with z^phi = -sum poly_[j] z^j
    IPoly next(std::size_t(phi_), 0);
    std::int64_t carry = cur[std::size_t(phi_ - 1)];
    for (int j = phi_ - 1; j >= 1; --j) next[std::size_t(j)] = cur[std::size_t(j - 1)];
    for (int j = 0; j < phi_; ++j) next[std::size_t(j)] -= carry * poly_[std::size_t(j)];
    cur = std::move(next);
  }
}

void CycField::mul_int(const std::int64_t* a, const std::int64_t* b, std::int64_t* out) const {
  std::int64_t tmp[2 * kMaxPhi];
  const int len = 2 * phi_ - 1;
  std::fill(tmp, tmp + len, 0);
  for (int i = 0; i < phi_; ++i) {
    if (a[i] == 0) continue;
    for (int j = 0; j < phi_; ++j) tmp[i + j] += a[i] * b[j];
  }
  std::copy(tmp, tmp + phi_, out);
  for (int k = phi_; k < len; ++k) {
    if (tmp[k] == 0) continue;
    const auto& v = pow_[std::size_t(k)];
    for (int j = 0; j < phi_; ++j) out[j] += tmp[k] * v[std::size_t(j)];
  }
}

void CycField::mul_zeta_int(const std::int64_t* a, std::int64_t k, std::int64_t* out) const {
  std::int64_t kk = ((k % M_) + M_) % M_;
  std::fill(out, out + phi_, 0);
  for (int j = 0; j < phi_; ++j) {
    if (a[j] == 0) continue;
    const auto& v = pow_[std::size_t((j + kk) % M_)];
    for (int i = 0; i < phi_; ++i) out[i] += a[j] * v[std::size_t(i)];
  }
}

void CycField::add_root_counts(const std::int64_t* counts, std::int64_t* out) const {
  for (int k = 0; k < M_; ++k) {
    if (counts[k] == 0) continue;
    const auto& v = pow_[std::size_t(k)];
    for (int j = 0; j < phi_; ++j) out[j] += counts[k] * v[std::size_t(j)];
  }
}

const CycField& CycField::get(int M) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<CycField>> fields;
  if (M < 1) throw std::invalid_argument("CycField: M must be positive");
  if (euler_phi(M) > kMaxPhi) throw std::invalid_argument("CycField: M too large");
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = fields[M];
  if (!slot) slot.reset(new CycField(M));
  return *slot;
}

CycNum::CycNum(const CycField& field, const Rational& r) : f_(&field), c_(std::size_t(field.phi())) {
  c_[0] = r;
}

CycNum CycNum::zeta(const CycField& field, std::int64_t k) {
  std::int64_t M = field.M();
  std::int64_t e = ((k % M) + M) % M;
  CycNum r;
  r.f_ = &field;
  const auto& v = field.power(int(e));
  r.c_.reserve(v.size());
  for (auto x : v) r.c_.emplace_back(x);
  return r;
}

CycNum CycNum::from_root_counts(const CycField& field, const std::vector<std::int64_t>& counts) {
  if (int(counts.size()) != field.M()) throw std::invalid_argument("CycNum: counts must have length M");
  std::vector<std::int64_t> acc(std::size_t(field.phi()), 0);
  for (int k = 0; k < field.M(); ++k) {
    std::int64_t c = counts[std::size_t(k)];
    if (c == 0) continue;
    const auto& v = field.power(k);
    for (int j = 0; j < field.phi(); ++j) {
      std::int64_t t;
      if (__builtin_mul_overflow(c, v[std::size_t(j)], &t) ||
          __builtin_add_overflow(acc[std::size_t(j)], t, &acc[std::size_t(j)]))
        throw std::overflow_error("CycNum::from_root_counts: overflow");
    }
  }
  CycNum r;
  r.f_ = &field;
  r.c_.reserve(acc.size());
  for (auto x : acc) r.c_.emplace_back(x);
  return r;
}

CycNum CycNum::from_coeffs(const CycField& field, std::vector<Rational> coeffs) {
  if (int(coeffs.size()) != field.phi()) throw std::invalid_argument("CycNum: wrong coefficient count");
  CycNum r;
  r.f_ = &field;
  r.c_ = std::move(coeffs);
  return r;
}

void CycNum::adopt(const CycField* f) {
  if (f_ == nullptr && f != nullptr) {
    f_ = f;
    c_.assign(std::size_t(f->phi()), Rational(0));
  } else if (f != nullptr && f_ != f) {
    throw std::invalid_argument("CycNum: mixing different cyclotomic fields");
  }
}

bool CycNum::is_zero() const {
  for (const auto& x : c_)
    if (!x.is_zero()) return false;
  return true;
}

bool CycNum::is_rational() const {
  for (std::size_t j = 1; j < c_.size(); ++j)
    if (!c_[j].is_zero()) return false;
  return true;
}

Rational CycNum::rational_part() const { return c_.empty() ? Rational(0) : c_[0]; }

CycNum CycNum::operator-() const {
  CycNum r(*this);
  for (auto& x : r.c_) x = -x;
  return r;
}

CycNum& CycNum::operator+=(const CycNum& o) {
  if (o.f_ == nullptr) return *this;
  adopt(o.f_);
  for (std::size_t j = 0; j < c_.size(); ++j)
    if (!o.c_[j].is_zero()) c_[j] += o.c_[j];
  return *this;
}

CycNum& CycNum::operator-=(const CycNum& o) {
  if (o.f_ == nullptr) return *this;
  adopt(o.f_);
  for (std::size_t j = 0; j < c_.size(); ++j)
    if (!o.c_[j].is_zero()) c_[j] -= o.c_[j];
  return *this;
}

CycNum& CycNum::operator*=(const Rational& r) {
  if (r.is_one()) return *this;
  for (auto& x : c_)
    if (!x.is_zero()) x *= r;
  return *this;
}

void CycNum::add_product(const CycNum& a, const CycNum& b) {
  if (a.f_ == nullptr || b.f_ == nullptr) return;
  if (a.f_ != b.f_) throw std::invalid_argument("CycNum: mixing different cyclotomic fields");
  adopt(a.f_);
  const int phi = f_->phi();
  std::vector<Rational> prod(std::size_t(2 * phi - 1));
  bool any = false;
  for (int i = 0; i < phi; ++i) {
    const Rational& x = a.c_[std::size_t(i)];
    if (x.is_zero()) continue;
    for (int j = 0; j < phi; ++j) {
      const Rational& y = b.c_[std::size_t(j)];
      if (y.is_zero()) continue;
      prod[std::size_t(i + j)].add_product(x, y);
      any = true;
    }
  }
  if (!any) return;
  for (int k = 0; k < phi; ++k)
    if (!prod[std::size_t(k)].is_zero()) c_[std::size_t(k)] += prod[std::size_t(k)];
  for (int k = phi; k < 2 * phi - 1; ++k) {
    const Rational& x = prod[std::size_t(k)];
    if (x.is_zero()) continue;
    const auto& v = f_->power(k);
    for (int j = 0; j < phi; ++j)
      if (v[std::size_t(j)] != 0) c_[std::size_t(j)].add_product(x, Rational(v[std::size_t(j)]));
  }
}

CycNum operator*(const CycNum& a, const CycNum& b) {
  CycNum r;
  if (a.f_ == nullptr || b.f_ == nullptr) return r;
  r.adopt(a.f_);
  r.add_product(a, b);
  return r;
}

CycNum& CycNum::operator*=(const CycNum& o) {
  *this = *this * o;
  return *this;
}

bool operator==(const CycNum& a, const CycNum& b) {
  if (a.f_ == nullptr) return b.is_zero();
  if (b.f_ == nullptr) return a.is_zero();
  if (a.f_ != b.f_) return false;
  return a.c_ == b.c_;
}

CycNum CycNum::galois(std::int64_t k) const {
  if (f_ == nullptr) return *this;
  std::int64_t M = f_->M();
  std::int64_t kk = ((k % M) + M) % M;
  if (std::gcd(kk, M) != 1) throw std::domain_error("CycNum::galois: exponent not coprime to M");
  CycNum r = zero(*f_);
  for (int j = 0; j < f_->phi(); ++j) {
    const Rational& x = c_[std::size_t(j)];
    if (x.is_zero()) continue;
    const auto& v = f_->power(int((j * kk) % M));
    for (int i = 0; i < f_->phi(); ++i)
      if (v[std::size_t(i)] != 0) r.c_[std::size_t(i)].add_product(x, Rational(v[std::size_t(i)]));
  }
  return r;
}

CycNum CycNum::conj() const { return f_ == nullptr ? *this : galois(f_->M() - 1); }

CycNum CycNum::mul_zeta(std::int64_t k) const {
  if (f_ == nullptr) return *this;
  const std::int64_t M = f_->M();
  const std::int64_t kk = ((k % M) + M) % M;
  if (kk == 0) return *this;
  CycNum r = zero(*f_);
  for (int j = 0; j < f_->phi(); ++j) {
    const Rational& x = c_[std::size_t(j)];
    if (x.is_zero()) continue;
    const auto& v = f_->power(int((j + kk) % M));
    for (int i = 0; i < f_->phi(); ++i) {
      std::int64_t w = v[std::size_t(i)];
      if (w == 1) r.c_[std::size_t(i)] += x;
      else if (w == -1) r.c_[std::size_t(i)] -= x;
      else if (w != 0) r.c_[std::size_t(i)].add_product(x, Rational(w));
    }
  }
  return r;
}

CycNum CycNum::from_ints(const CycField& field, const std::int64_t* coeffs) {
  CycNum r;
  r.f_ = &field;
  r.c_.reserve(std::size_t(field.phi()));
  for (int j = 0; j < field.phi(); ++j) r.c_.emplace_back(coeffs[j]);
  return r;
}

bool CycNum::to_ints(std::vector<std::int64_t>& out) const {
  out.assign(c_.size(), 0);
  for (std::size_t j = 0; j < c_.size(); ++j) {
    const Rational& x = c_[j];
    if (!x.is_small() || !x.is_integer()) return false;
    out[j] = x.numerator().get_si();
  }
  return true;
}

CycNum CycNum::inverse() const {
  if (f_ == nullptr || is_zero()) throw std::domain_error("CycNum::inverse: zero");
  // a^-1 = prod_{k != 1} sigma_k(a) / N(a)
  CycNum others = one(*f_);
  const int M = f_->M();
  for (int k = 2; k < M + (M == 1 ? 1 : 0); ++k)
    if (std::gcd(k, M) == 1) others *= galois(k);
  CycNum nrm = *this * others;
  if (!nrm.is_rational()) throw std::logic_error("CycNum::inverse: norm is not rational");
  return others * nrm.rational_part().inverse();
}

CycNum CycNum::pow(std::int64_t e) const {
  if (e < 0) return inverse().pow(-e);
  if (f_ == nullptr) {
    if (e == 0) throw std::domain_error("CycNum::pow: field-less zero to the zeroth power");
    return *this;
  }
  CycNum r = one(*f_), b = *this;
  while (e) {
    if (e & 1) r *= b;
    e >>= 1;
    if (e) b *= b;
  }
  return r;
}

std::complex<double> CycNum::to_complex() const {
  std::complex<double> z(0, 0);
  if (f_ == nullptr) return z;
  for (int j = 0; j < f_->phi(); ++j) {
    double ang = 2.0 * std::numbers::pi * j / f_->M();
    z += c_[std::size_t(j)].to_double() * std::complex<double>(std::cos(ang), std::sin(ang));
  }
  return z;
}

std::string CycNum::str() const {
  if (f_ == nullptr) return "(0)";
  std::ostringstream os;
  os << "(";
  for (std::size_t j = 0; j < c_.size(); ++j) os << (j ? ", " : "") << c_[j];
  os << ")";
  return os.str();
}

nlohmann::json CycNum::to_json() const {
  nlohmann::json j;
  j["M"] = f_ == nullptr ? 1 : f_->M();
  nlohmann::json arr = nlohmann::json::array();
  if (f_ == nullptr) {
    arr.push_back({"0", "1"});
  } else {
    for (const auto& x : c_) arr.push_back({x.numerator().get_str(), x.denominator().get_str()});
  }
  j["coeffs"] = std::move(arr);
  return j;
}

CycNum CycNum::from_json(const nlohmann::json& j) {
  int M = j.at("M").get<int>();
  const CycField& f = CycField::get(M);
  const auto& arr = j.at("coeffs");
  if (int(arr.size()) != f.phi()) throw std::invalid_argument("CycNum::from_json: wrong coefficient count");
  std::vector<Rational> c;
  c.reserve(arr.size());
  for (const auto& pr : arr) {
    mpq_class q(mpz_class(pr.at(0).get<std::string>()), mpz_class(pr.at(1).get<std::string>()));
    c.emplace_back(q);
  }
  return from_coeffs(f, std::move(c));
}

std::ostream& operator<<(std::ostream& os, const CycNum& a) { return os << a.str(); }

RootEmbedding::RootEmbedding(const FqConfig& F, int eps_choice)
    : F_(&F), field_(&CycField::get(F.n() * int(F.q()))), eps_(eps_choice) {
  if (std::gcd(eps_choice, F.n()) != 1)
    throw std::invalid_argument("RootEmbedding: epsilon choice must be coprime to n");
}

std::int64_t RootEmbedding::mu_exponent(std::int64_t k) const {
  // zeta_n = zeta_M^q
  std::int64_t n = F_->n();
  std::int64_t kk = ((k * eps_) % n + n) % n;
  return kk * std::int64_t(F_->q());
}

CycNum RootEmbedding::embed_mu_n(FqElem z) const {
  if (z == 0) return CycNum::zero(*field_);
  return CycNum::zeta(*field_, mu_exponent(F_->mu_index(z)));
}

CycNum RootEmbedding::psi(FqElem a) const { return CycNum::zeta(*field_, psi_exponent(a % F_->q())); }

}  // namespace wmds
