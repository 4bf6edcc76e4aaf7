#include "wmds/charsums.hpp"

#include <mutex>
#include <stdexcept>

namespace wmds {

namespace {

PolyFq poly_from_code(const FqConfig& F, int len, std::uint64_t code) {
  std::vector<FqElem> c(std::size_t(len), 0);
  for (int j = 0; j < len; ++j, code /= F.q()) c[std::size_t(j)] = FqElem(code % F.q());
  return PolyFq(std::move(c));
}

}  // namespace

GaussEngine::GaussEngine(const RootEmbedding& E) : E_(&E) {
  const FqConfig& F = E.fq();
  const int M = E.M();
  for (int i = 0; i < F.n(); ++i) {
    std::vector<std::int64_t> counts(std::size_t(M), 0);
    for (FqElem z = 1; z < F.q(); ++z) {
      std::int64_t ex = E.mu_exponent(std::int64_t(i) * F.chi_index(z)) + E.psi_exponent(z);
      ++counts[std::size_t(ex % M)];
    }
    g1_.push_back(CycNum::from_root_counts(E.field(), counts));
  }
}

CycNum GaussEngine::e_char(const PolyFq& x, const PolyFq& c) const {
  if (c.is_zero()) throw std::domain_error("e_char: zero modulus");
  const FqConfig& F = fq();
  const int k = c.degree();
  if (k == 0) return CycNum::one(field());
  PolyFq y = poly::mod(F, x, c);
  return E_->psi(F.mul(y[k - 1], F.inv(c.lead())));
}

int GaussEngine::symbol(const PolyFq& x, const PolyFq& c) const {
  auto s = symbol_index(fq(), x, c);
  return s ? *s : -1;
}

CycNum GaussEngine::gauss_direct(int i, const PolyFq& r, const PolyFq& c) const {
  if (!c.is_monic()) throw std::invalid_argument("gauss: modulus must be monic");
  const FqConfig& F = fq();
  const int k = c.degree();
  const int M = E_->M();
  std::vector<std::int64_t> counts(std::size_t(M), 0);
  const std::uint64_t total = ipow(F.q(), unsigned(k));
  for (std::uint64_t code = 0; code < total; ++code) {
    PolyFq y = poly_from_code(F, k, code);
    auto s = symbol_index(F, y, c);
    if (!s) continue;
    FqElem a = k == 0 ? 0 : poly::mod(F, poly::mul(F, r, y), c)[k - 1];
    std::int64_t ex = E_->mu_exponent(std::int64_t(i) * *s) + E_->psi_exponent(a);
    ++counts[std::size_t(ex % M)];
  }
  return CycNum::from_root_counts(field(), counts);
}

std::vector<CycNum> GaussEngine::gauss_prime_cyclic(const PolyFq& p) const {
  const FqConfig& F = fq();
  const int k = p.degree();
  const int n = F.n();
  const int M = E_->M();
  const std::uint64_t N = ipow(F.q(), unsigned(k));
  PolyFq gamma = primitive_residue(F, p);
  auto sg = symbol_index_euler(F, gamma, p);
  // counts[s * q + a]: residues with symbol omega^s and res(y/p) = a.
  std::vector<std::int64_t> table(std::size_t(n) * F.q(), 0);
  PolyFq y = PolyFq::constant(1);
  for (std::uint64_t e = 0; e + 1 < N; ++e) {
    int s = int((e % std::uint64_t(n)) * std::uint64_t(*sg) % std::uint64_t(n));
    ++table[std::size_t(s) * F.q() + y[k - 1]];
    y = poly::mulmod(F, y, gamma, p);
  }
  if (!y.is_one()) throw std::logic_error("gauss_prime_cyclic: generator order mismatch");
  std::vector<CycNum> out;
  for (int i = 0; i < n; ++i) {
    std::vector<std::int64_t> counts(std::size_t(M), 0);
    for (int s = 0; s < n; ++s)
      for (FqElem a = 0; a < F.q(); ++a) {
        std::int64_t c = table[std::size_t(s) * F.q() + a];
        if (c == 0) continue;
        counts[std::size_t((E_->mu_exponent(std::int64_t(i) * s) + E_->psi_exponent(a)) % M)] += c;
      }
    out.push_back(CycNum::from_root_counts(field(), counts));
  }
  return out;
}

std::vector<CycNum> GaussEngine::gauss_prime_lifted(const PolyFq& p) const {
  const FqConfig& F = fq();
  const int k = p.degree();
  // res(y/p) = Tr(y / p'(theta)), so the sum is the lifted sum rotated by
  // the character value at N(p'(theta)).
  int idx = F.chi_index(residue_norm(F, poly::derivative(F, p), p));
  std::vector<CycNum> out;
  for (int i = 0; i < F.n(); ++i) {
    CycNum v = (-g1_[std::size_t(i)]).pow(k);
    out.push_back((-v).mul_zeta(E_->mu_exponent(std::int64_t(i) * idx)));
  }
  return out;
}

const CycNum& GaussEngine::gauss_prime(int i, const PolyFq& p) {
  const int n = this->n();
  const std::size_t ii = std::size_t(((i % n) + n) % n);
  {
    std::shared_lock lock(mu_);
    auto it = prime_memo_.find(p);
    if (it != prime_memo_.end()) return it->second[ii];
  }
  if (!p.is_monic() || p.degree() < 1) throw std::invalid_argument("gauss_prime: expected a monic prime");
  auto vals = p.degree() <= kCyclicMaxDegree ? gauss_prime_cyclic(p) : gauss_prime_lifted(p);
  std::unique_lock lock(mu_);
  auto [it, inserted] = prime_memo_.emplace(p, std::move(vals));
  return it->second[ii];
}

Factorization GaussEngine::factorization(const PolyFq& c) {
  {
    std::shared_lock lock(mu_);
    auto it = factor_memo_.find(c);
    if (it != factor_memo_.end()) return it->second;
  }
  Factorization f = factor(fq(), c);
  if (c.degree() <= 4) {
    std::unique_lock lock(mu_);
    factor_memo_.emplace(c, f);
  }
  return f;
}

CycNum GaussEngine::gauss_prime_power(int i, const PolyFq& r, const PolyFq& p, int a, int k) {
  const FqConfig& F = fq();
  const int n = F.n();
  if (a < 0 || k < 0) throw std::invalid_argument("gauss_prime_power: negative exponent");
  if (k == 0) return CycNum::one(field());
  if (k <= a) {
    if ((std::int64_t(i) * k) % n != 0) return CycNum::zero(field());
    std::uint64_t pk = ipow(norm(F, p), unsigned(k));
    return CycNum(field(), Rational(std::int64_t(pk - pk / norm(F, p))));
  }
  if (k != a + 1) return CycNum::zero(field());
  int s = symbol(r, p);
  if (s < 0) throw std::invalid_argument("gauss_prime_power: r must be prime to p");
  const int j = ((i * (a + 1)) % n + n) % n;
  CycNum v = gauss_prime(j, p) * Rational(std::int64_t(ipow(norm(F, p), unsigned(a))));
  return v.mul_zeta(E_->mu_exponent(-std::int64_t(j) * s));
}

CycNum GaussEngine::gauss(int i, const PolyFq& r, const PolyFq& c) {
  if (!c.is_monic()) throw std::invalid_argument("gauss: modulus must be monic");
  const FqConfig& F = fq();
  if (c.degree() == 0) return CycNum::one(field());
  Factorization fac = factorization(c);
  CycNum prod = CycNum::one(field());
  for (const auto& [p, e] : fac.factors) {
    PolyFq pe = poly::pow(F, p, unsigned(e));
    PolyFq rr = poly::mod(F, r, pe);
    CycNum v;
    if (rr.is_zero()) {
      v = gauss_prime_power(i, PolyFq::constant(1), p, e, e);
    } else {
      int a = poly::valuation(F, rr, p);
      PolyFq unit_part = poly::exact_div(F, rr, poly::pow(F, p, unsigned(a)));
      v = gauss_prime_power(i, unit_part, p, a, e);
    }
    if (v.is_zero()) return CycNum::zero(field());
    prod *= v;
  }
  // (c/c')^{2i} between the prime-power blocks, left to right.
  std::int64_t tw = 0;
  const auto& fs = fac.factors;
  for (std::size_t j = 0; j < fs.size(); ++j)
    for (std::size_t l = j + 1; l < fs.size(); ++l)
      tw += 2 * std::int64_t(i) * fs[j].second * fs[l].second * symbol(fs[j].first, fs[l].first);
  return prod.mul_zeta(E_->mu_exponent(tw));
}

}  // namespace wmds
