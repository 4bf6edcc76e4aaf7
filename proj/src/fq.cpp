#include "wmds/fq.hpp"

#include <stdexcept>
#include <string>

namespace wmds {

bool is_prime(std::uint64_t v) {
  if (v < 2) return false;
  for (std::uint64_t d = 2; d * d <= v; ++d)
    if (v % d == 0) return false;
  return true;
}

FqConfig::FqConfig(std::uint32_t q, int n, FqElem gen) : q_(q), n_(n) {
  if (n < 1) throw std::invalid_argument("FqConfig: n must be positive");
  if (!is_prime(q)) throw std::invalid_argument("FqConfig: q=" + std::to_string(q) + " is not prime");
  if (q > 65521) throw std::invalid_argument("FqConfig: q too large for table-driven arithmetic");
  if ((q - 1) % (4u * unsigned(n)) != 0)
    throw std::invalid_argument("FqConfig: q=" + std::to_string(q) + " is not 1 mod 4n (n=" +
                                std::to_string(n) + ")");

  auto order = [&](FqElem g) {
    std::uint64_t x = g;
    for (std::uint32_t k = 1; k < q; ++k) {
      if (x == 1) return k;
      x = (x * g) % q;
    }
    return q;
  };
  if (gen == 0) {
    for (FqElem g = 2; g < q; ++g) {
      if (order(g) == q - 1) {
        gen = g;
        break;
      }
    }
    if (q == 2) gen = 1;
  }
  if (gen == 0 || gen >= q || order(gen) != q - 1)
    throw std::invalid_argument("FqConfig: " + std::to_string(gen) + " does not generate F_q^x");
  gen_ = gen;

  exp_.resize(q - 1);
  dlog_.assign(q, -1);
  std::uint64_t x = 1;
  for (std::uint32_t k = 0; k + 1 < q; ++k) {
    exp_[k] = FqElem(x);
    dlog_[x] = int(k);
    x = (x * gen) % q;
  }
  inv_.assign(q, 0);
  for (std::uint32_t a = 1; a < q; ++a) inv_[a] = exp_[(q - 1 - dlog_[a]) % (q - 1)];
  omega_ = exp_[(q - 1) / n];
}

FqElem FqConfig::inv(FqElem a) const {
  if (a == 0) throw std::domain_error("FqConfig: inverse of zero");
  return inv_[a];
}

FqElem FqConfig::pow(FqElem a, std::uint64_t e) const {
  if (a == 0) return e == 0 ? 1 : 0;
  std::uint64_t k = (std::uint64_t(dlog_[a]) * (e % (q_ - 1))) % (q_ - 1);
  return exp_[k];
}

int FqConfig::dlog(FqElem a) const {
  if (a == 0 || a >= q_) throw std::domain_error("FqConfig: dlog of zero");
  return dlog_[a];
}

FqElem FqConfig::exp(std::int64_t k) const {
  std::int64_t m = std::int64_t(q_) - 1;
  std::int64_t r = k % m;
  if (r < 0) r += m;
  return exp_[r];
}

int FqConfig::mu_index(FqElem z) const {
  if (z == 0 || z >= q_) throw std::domain_error("FqConfig: not an n-th root of unity");
  int d = dlog_[z];
  int step = int((q_ - 1) / n_);
  if (d % step != 0) throw std::domain_error("FqConfig: not an n-th root of unity");
  return d / step;
}

}  // namespace wmds
