#include "wmds/poly.hpp"

#include <algorithm>
#include <cctype>
#include <random>
#include <sstream>
#include <stdexcept>

namespace wmds {

PolyFq PolyFq::monomial(int k, FqElem a) {
  if (a == 0) return {};
  std::vector<FqElem> c(std::size_t(k) + 1, 0);
  c[std::size_t(k)] = a;
  return PolyFq(std::move(c));
}

bool operator<(const PolyFq& a, const PolyFq& b) {
  if (a.degree() != b.degree()) return a.degree() < b.degree();
  for (int i = a.degree(); i >= 0; --i)
    if (a.c_[i] != b.c_[i]) return a.c_[i] < b.c_[i];
  return false;
}

std::size_t PolyHash::operator()(const PolyFq& p) const noexcept {
  std::size_t h = 0x9e3779b97f4a7c15ULL;
  for (FqElem c : p.coeffs()) h = (h ^ c) * 0x100000001b3ULL + (h >> 29);
  return h ^ p.coeffs().size();
}

namespace poly {

PolyFq add(const FqConfig& F, const PolyFq& a, const PolyFq& b) {
  std::vector<FqElem> c(std::max(a.coeffs().size(), b.coeffs().size()), 0);
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = F.add(a[int(i)], b[int(i)]);
  return PolyFq(std::move(c));
}

PolyFq sub(const FqConfig& F, const PolyFq& a, const PolyFq& b) {
  std::vector<FqElem> c(std::max(a.coeffs().size(), b.coeffs().size()), 0);
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = F.sub(a[int(i)], b[int(i)]);
  return PolyFq(std::move(c));
}

PolyFq neg(const FqConfig& F, const PolyFq& a) {
  std::vector<FqElem> c(a.coeffs());
  for (auto& x : c) x = F.neg(x);
  return PolyFq(std::move(c));
}

PolyFq scale(const FqConfig& F, const PolyFq& a, FqElem s) {
  std::vector<FqElem> c(a.coeffs());
  for (auto& x : c) x = F.mul(x, s);
  return PolyFq(std::move(c));
}

PolyFq mul(const FqConfig& F, const PolyFq& a, const PolyFq& b) {
  if (a.is_zero() || b.is_zero()) return {};
  const auto& x = a.coeffs();
  const auto& y = b.coeffs();
  std::vector<std::uint64_t> acc(x.size() + y.size() - 1, 0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == 0) continue;
    for (std::size_t j = 0; j < y.size(); ++j) acc[i + j] += std::uint64_t(x[i]) * y[j];
  }
  std::vector<FqElem> c(acc.size());
  for (std::size_t i = 0; i < acc.size(); ++i) c[i] = FqElem(acc[i] % F.q());
  return PolyFq(std::move(c));
}

PolyFq pow(const FqConfig& F, const PolyFq& a, unsigned e) {
  PolyFq r = PolyFq::constant(1), b = a;
  while (e) {
    if (e & 1) r = mul(F, r, b);
    e >>= 1;
    if (e) b = mul(F, b, b);
  }
  return r;
}

std::pair<PolyFq, PolyFq> divmod(const FqConfig& F, const PolyFq& a, const PolyFq& b) {
  if (b.is_zero()) throw std::domain_error("poly::divmod: division by zero polynomial");
  int db = b.degree();
  if (a.degree() < db) return {PolyFq(), a};
  std::vector<FqElem> r(a.coeffs());
  std::vector<FqElem> qt(std::size_t(a.degree() - db) + 1, 0);
  FqElem linv = F.inv(b.lead());
  const auto& bc = b.coeffs();
  for (int i = a.degree(); i >= db; --i) {
    FqElem c = r[i];
    if (c == 0) continue;
    FqElem f = F.mul(c, linv);
    qt[std::size_t(i - db)] = f;
    for (int j = 0; j <= db; ++j) r[std::size_t(i - db + j)] = F.sub(r[std::size_t(i - db + j)], F.mul(f, bc[j]));
  }
  r.resize(std::size_t(db));
  return {PolyFq(std::move(qt)), PolyFq(std::move(r))};
}

PolyFq mod(const FqConfig& F, const PolyFq& a, const PolyFq& b) {
  if (b.is_zero()) throw std::domain_error("poly::mod: modulus is zero");
  int db = b.degree();
  if (a.degree() < db) return a;
  std::vector<FqElem> r(a.coeffs());
  FqElem linv = F.inv(b.lead());
  const auto& bc = b.coeffs();
  const std::uint32_t q = F.q();
  for (int i = a.degree(); i >= db; --i) {
    FqElem c = r[i];
    if (c == 0) continue;
    std::uint64_t f = q - F.mul(c, linv);
    for (int j = 0; j <= db; ++j) {
      std::size_t k = std::size_t(i - db + j);
      r[k] = FqElem((r[k] + f * bc[j]) % q);
    }
  }
  r.resize(std::size_t(db));
  return PolyFq(std::move(r));
}

PolyFq mulmod(const FqConfig& F, const PolyFq& a, const PolyFq& b, const PolyFq& m) {
  return mod(F, mul(F, a, b), m);
}

PolyFq powmod(const FqConfig& F, const PolyFq& a, std::uint64_t e, const PolyFq& m) {
  PolyFq r = mod(F, PolyFq::constant(1), m), b = mod(F, a, m);
  while (e) {
    if (e & 1) r = mulmod(F, r, b, m);
    e >>= 1;
    if (e) b = mulmod(F, b, b, m);
  }
  return r;
}

PolyFq monic(const FqConfig& F, const PolyFq& a) {
  if (a.is_zero() || a.lead() == 1) return a;
  return scale(F, a, F.inv(a.lead()));
}

PolyFq gcd(const FqConfig& F, PolyFq a, PolyFq b) {
  while (!b.is_zero()) {
    PolyFq r = mod(F, a, b);
    a = std::move(b);
    b = std::move(r);
  }
  return monic(F, a);
}

PolyFq derivative(const FqConfig& F, const PolyFq& a) {
  if (a.degree() < 1) return {};
  std::vector<FqElem> c(std::size_t(a.degree()), 0);
  for (int i = 1; i <= a.degree(); ++i) c[std::size_t(i - 1)] = F.mul(a[i], F.reduce(i));
  return PolyFq(std::move(c));
}

PolyFq exact_div(const FqConfig& F, const PolyFq& a, const PolyFq& b) {
  auto [qt, r] = divmod(F, a, b);
  if (!r.is_zero()) throw std::domain_error("poly::exact_div: not divisible");
  return qt;
}

FqElem eval(const FqConfig& F, const PolyFq& a, FqElem x) {
  FqElem r = 0;
  for (int i = a.degree(); i >= 0; --i) r = F.add(F.mul(r, x), a[i]);
  return r;
}

int valuation(const FqConfig& F, PolyFq a, const PolyFq& p) {
  if (a.is_zero()) throw std::domain_error("poly::valuation: zero polynomial");
  int v = 0;
  for (;;) {
    auto [qt, r] = divmod(F, a, p);
    if (!r.is_zero()) return v;
    a = std::move(qt);
    ++v;
  }
}

PolyFq parse(const FqConfig& F, const std::string& text) {
  std::string s;
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
  if (s.empty()) throw std::invalid_argument("poly::parse: empty input");
  std::vector<std::int64_t> acc;
  std::size_t i = 0;
  auto fail = [&](const std::string& why) {
    throw std::invalid_argument("poly::parse: " + why + " in '" + text + "'");
  };
  while (i < s.size()) {
    int sign = 1;
    while (i < s.size() && (s[i] == '+' || s[i] == '-')) {
      if (s[i] == '-') sign = -sign;
      ++i;
    }
    std::size_t j = i;
    while (j < s.size() && s[j] != '+' && s[j] != '-') ++j;
    std::string term = s.substr(i, j - i);
    i = j;
    if (term.empty()) fail("dangling sign");
    std::int64_t coef = 1;
    int expo = 0;
    std::size_t tpos = term.find('t');
    std::string cpart = tpos == std::string::npos ? term : term.substr(0, tpos);
    if (!cpart.empty() && cpart.back() == '*') cpart.pop_back();
    if (!cpart.empty()) {
      for (char ch : cpart)
        if (!std::isdigit(static_cast<unsigned char>(ch))) fail("bad coefficient '" + cpart + "'");
      coef = std::stoll(cpart);
    } else if (tpos == std::string::npos) {
      fail("empty term");
    }
    if (tpos != std::string::npos) {
      std::string rest = term.substr(tpos + 1);
      if (rest.empty()) {
        expo = 1;
      } else {
        if (rest[0] != '^' || rest.size() < 2) fail("bad exponent '" + rest + "'");
        for (std::size_t k = 1; k < rest.size(); ++k)
          if (!std::isdigit(static_cast<unsigned char>(rest[k]))) fail("bad exponent '" + rest + "'");
        expo = std::stoi(rest.substr(1));
      }
    }
    if (acc.size() <= std::size_t(expo)) acc.resize(std::size_t(expo) + 1, 0);
    acc[std::size_t(expo)] += sign * (coef % std::int64_t(F.q()));
  }
  std::vector<FqElem> c(acc.size());
  for (std::size_t k = 0; k < acc.size(); ++k) c[k] = F.reduce(acc[k]);
  return PolyFq(std::move(c));
}

std::string to_string(const PolyFq& a) {
  if (a.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (int i = 0; i <= a.degree(); ++i) {
    FqElem c = a[i];
    if (c == 0) continue;
    if (!first) os << " + ";
    first = false;
    if (i == 0) {
      os << c;
    } else {
      if (c != 1) os << c << "*";
      os << "t";
      if (i > 1) os << "^" << i;
    }
  }
  return os.str();
}

}  // namespace poly

std::uint64_t ipow(std::uint64_t b, unsigned e) {
  std::uint64_t r = 1;
  while (e--) r *= b;
  return r;
}

std::uint64_t norm(const FqConfig& F, const PolyFq& f) {
  if (f.is_zero()) throw std::domain_error("norm: zero polynomial");
  return ipow(F.q(), unsigned(f.degree()));
}

PolyFq monic_from_code(const FqConfig& F, int degree, std::uint64_t code) {
  std::vector<FqElem> c(std::size_t(degree) + 1);
  for (int i = 0; i < degree; ++i) {
    c[std::size_t(i)] = FqElem(code % F.q());
    code /= F.q();
  }
  c[std::size_t(degree)] = 1;
  return PolyFq(std::move(c));
}

std::uint64_t monic_code(const FqConfig& F, const PolyFq& f) {
  if (!f.is_monic()) throw std::domain_error("monic_code: polynomial is not monic");
  std::uint64_t code = 0;
  for (int i = f.degree() - 1; i >= 0; --i) code = code * F.q() + f[i];
  return code;
}

MonicRange::MonicRange(const FqConfig& F, int degree) : F_(&F), d_(degree), count_(ipow(F.q(), unsigned(degree))) {
  if (degree < 0) throw std::invalid_argument("enumerate_monic: negative degree");
}

MonicRange enumerate_monic(const FqConfig& F, int degree) { return MonicRange(F, degree); }

PolyFq Factorization::expand(const FqConfig& F) const {
  PolyFq r = PolyFq::constant(unit);
  for (const auto& [p, e] : factors) r = poly::mul(F, r, poly::pow(F, p, unsigned(e)));
  return r;
}

bool Factorization::is_squarefree() const {
  return std::all_of(factors.begin(), factors.end(), [](const auto& f) { return f.second == 1; });
}

namespace {

using poly::divmod;
using poly::gcd;
using poly::mod;
using poly::mul;
using poly::powmod;

// p-th root of a polynomial in t^p over the prime field.
PolyFq pth_root(const FqConfig& F, const PolyFq& f) {
  const int p = int(F.q());
  std::vector<FqElem> c(std::size_t(f.degree() / p) + 1, 0);
  for (int i = 0; i <= f.degree(); i += p) c[std::size_t(i / p)] = f[i];
  return PolyFq(std::move(c));
}

// Squarefree decomposition of a monic polynomial: pairs (g, i) with g
// squarefree and f = prod g^i.
void squarefree_parts(const FqConfig& F, const PolyFq& f, int mult, std::vector<std::pair<PolyFq, int>>& out) {
  if (f.degree() < 1) return;
  PolyFq d = poly::derivative(F, f);
  if (d.is_zero()) {
    squarefree_parts(F, pth_root(F, f), mult * int(F.q()), out);
    return;
  }
  PolyFq c = gcd(F, f, d);
  PolyFq w = poly::exact_div(F, f, c);
  int i = 1;
  while (w.degree() > 0) {
    PolyFq y = gcd(F, w, c);
    PolyFq z = poly::exact_div(F, w, y);
    if (z.degree() > 0) out.emplace_back(z, i * mult);
    ++i;
    w = y;
    c = poly::exact_div(F, c, y);
  }
  if (c.degree() > 0) squarefree_parts(F, pth_root(F, c), mult * int(F.q()), out);
}

// a^((q^d - 1)/2) mod g, computed through the norm to avoid huge exponents.
PolyFq half_power(const FqConfig& F, const PolyFq& a, int d, const PolyFq& g) {
  PolyFq acc = mod(F, a, g), z = acc;
  for (int j = 1; j < d; ++j) {
    z = powmod(F, z, F.q(), g);
    acc = poly::mulmod(F, acc, z, g);
  }
  // acc = a^(1 + q + ... + q^(d-1)); raise to (q-1)/2.
  return powmod(F, acc, (F.q() - 1) / 2, g);
}

void equal_degree_split(const FqConfig& F, const PolyFq& g, int d, std::mt19937_64& rng,
                        std::vector<PolyFq>& out) {
  if (g.degree() == d) {
    out.push_back(g);
    return;
  }
  std::uniform_int_distribution<std::uint32_t> coef(0, F.q() - 1);
  for (;;) {
    std::vector<FqElem> c(std::size_t(g.degree()));
    for (auto& x : c) x = coef(rng);
    PolyFq a(std::move(c));
    if (a.degree() < 1) continue;
    PolyFq h = gcd(F, a, g);
    if (h.degree() > 0 && h.degree() < g.degree()) {
      equal_degree_split(F, h, d, rng, out);
      equal_degree_split(F, poly::exact_div(F, g, h), d, rng, out);
      return;
    }
    PolyFq b = poly::sub(F, half_power(F, a, d, g), PolyFq::constant(1));
    h = gcd(F, b, g);
    if (h.degree() > 0 && h.degree() < g.degree()) {
      equal_degree_split(F, h, d, rng, out);
      equal_degree_split(F, poly::exact_div(F, g, h), d, rng, out);
      return;
    }
  }
}

// Distinct-degree factorization of a squarefree monic polynomial.
std::vector<std::pair<PolyFq, int>> distinct_degree(const FqConfig& F, PolyFq f) {
  std::vector<std::pair<PolyFq, int>> out;
  PolyFq t = PolyFq::monomial(1);
  PolyFq h = mod(F, t, f);
  int i = 0;
  while (f.degree() >= 2 * (i + 1)) {
    ++i;
    h = powmod(F, h, F.q(), f);
    PolyFq g = gcd(F, poly::sub(F, h, t), f);
    if (g.degree() > 0) {
      out.emplace_back(g, i);
      f = poly::exact_div(F, f, g);
      h = mod(F, h, f);
    }
  }
  if (f.degree() > 0) out.emplace_back(f, f.degree());
  return out;
}

}  // namespace

Factorization factor(const FqConfig& F, const PolyFq& f) {
  if (f.is_zero()) throw std::domain_error("factor: zero polynomial");
  Factorization result;
  result.unit = f.lead();
  PolyFq m = poly::monic(F, f);
  std::vector<std::pair<PolyFq, int>> parts;
  squarefree_parts(F, m, 1, parts);
  std::mt19937_64 rng(0x5eed + f.degree());
  for (const auto& [g, mult] : parts) {
    for (const auto& [block, d] : distinct_degree(F, g)) {
      std::vector<PolyFq> irr;
      equal_degree_split(F, block, d, rng, irr);
      for (auto& p : irr) result.factors.emplace_back(std::move(p), mult);
    }
  }
  std::sort(result.factors.begin(), result.factors.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  // Squarefree parts are pairwise coprime, but merge defensively for p-th powers.
  std::vector<std::pair<PolyFq, int>> merged;
  for (auto& fe : result.factors) {
    if (!merged.empty() && merged.back().first == fe.first)
      merged.back().second += fe.second;
    else
      merged.push_back(std::move(fe));
  }
  result.factors = std::move(merged);
  return result;
}

bool is_irreducible(const FqConfig& F, const PolyFq& f) {
  if (f.degree() < 1) return false;
  if (f.degree() == 1) return true;
  auto fac = factor(F, f);
  return fac.factors.size() == 1 && fac.factors[0].second == 1;
}

std::vector<PolyFq> monic_irreducibles(const FqConfig& F, int degree) {
  std::vector<PolyFq> out;
  for (PolyFq f : enumerate_monic(F, degree))
    if (is_irreducible(F, f)) out.push_back(std::move(f));
  return out;
}

namespace {

std::vector<std::uint64_t> prime_divisors(std::uint64_t v) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t d = 2; d * d <= v; ++d) {
    if (v % d) continue;
    out.push_back(d);
    while (v % d == 0) v /= d;
  }
  if (v > 1) out.push_back(v);
  return out;
}

}  // namespace

PolyFq primitive_residue(const FqConfig& F, const PolyFq& p) {
  const int k = p.degree();
  const std::uint64_t N = ipow(F.q(), unsigned(k));
  const auto ells = prime_divisors(N - 1);
  for (std::uint64_t code = 1; code < N; ++code) {
    std::vector<FqElem> c(std::size_t(k), 0);
    std::uint64_t v = code;
    for (int j = 0; j < k; ++j, v /= F.q()) c[std::size_t(j)] = FqElem(v % F.q());
    PolyFq g(std::move(c));
    bool ok = true;
    for (auto ell : ells) {
      if (poly::powmod(F, g, (N - 1) / ell, p).is_one()) {
        ok = false;
        break;
      }
    }
    if (ok) return g;
  }
  throw std::logic_error("primitive_residue: modulus is not irreducible");
}


FqElem residue_norm(const FqConfig& F, const PolyFq& x, const PolyFq& p) {
  PolyFq y = mod(F, x, p);
  if (y.is_zero()) return 0;
  PolyFq acc = y, z = y;
  for (int j = 1; j < p.degree(); ++j) {
    z = powmod(F, z, F.q(), p);
    acc = poly::mulmod(F, acc, z, p);
  }
  if (acc.degree() > 0) throw std::logic_error("residue_norm: modulus is not irreducible");
  return acc[0];
}

std::optional<int> symbol_index_euler(const FqConfig& F, const PolyFq& x, const Factorization& c) {
  const int n = F.n();
  int idx = 0;
  for (const auto& [p, e] : c.factors) {
    FqElem nm = residue_norm(F, x, p);
    if (nm == 0) return std::nullopt;
    // x^((|p|-1)/n) = N(x)^((q-1)/n) mod p.
    int k = F.mu_index(F.pow(nm, (F.q() - 1) / std::uint64_t(n)));
    idx = int((idx + std::int64_t(k) * e) % n);
  }
  return idx;
}

std::optional<int> symbol_index_euler(const FqConfig& F, const PolyFq& x, const PolyFq& c) {
  if (c.is_zero()) throw std::domain_error("residue_symbol: zero modulus");
  return symbol_index_euler(F, x, factor(F, c));
}

std::optional<int> symbol_index(const FqConfig& F, const PolyFq& x, const PolyFq& c) {
  if (c.is_zero()) throw std::domain_error("residue_symbol: zero modulus");
  const int n = F.n();
  PolyFq mod_c = poly::monic(F, c);
  PolyFq a = x;
  std::int64_t idx = 0;
  for (;;) {
    if (mod_c.degree() == 0) return int(idx % n);
    a = poly::mod(F, a, mod_c);
    if (a.is_zero()) return std::nullopt;
    FqElem lc = a.lead();
    if (lc != 1) {
      idx += std::int64_t(F.chi_index(lc)) * mod_c.degree();
      a = poly::scale(F, a, F.inv(lc));
    }
    // (a / c) = (c / a) for monic coprime a, c.
    std::swap(a, mod_c);
  }
}

FqElem residue_symbol(const FqConfig& F, const PolyFq& x, const PolyFq& c) {
  auto k = symbol_index(F, x, c);
  if (!k) return 0;
  return F.pow(F.omega(), std::uint64_t(*k));
}

}  // namespace wmds
