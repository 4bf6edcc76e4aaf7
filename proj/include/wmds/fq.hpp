#ifndef WMDS_FQ_HPP
#define WMDS_FQ_HPP

#include <cstdint>
#include <vector>

namespace wmds {

// Residue in [0, q).
using FqElem = std::uint32_t;

// The prime field F_q together with the order n of the power residue symbol.
// q must be prime with q = 1 (mod 4n), so that mu_{2n} lies in F_q and the
// reciprocity law for monic polynomials carries no sign.
class FqConfig {
 public:
  // gen = 0 selects the smallest primitive root.
  FqConfig(std::uint32_t q, int n, FqElem gen = 0);

  std::uint32_t q() const { return q_; }
  int n() const { return n_; }
  FqElem gen() const { return gen_; }

  FqElem add(FqElem a, FqElem b) const {
    std::uint32_t s = a + b;
    return s >= q_ ? s - q_ : s;
  }
  FqElem sub(FqElem a, FqElem b) const { return a >= b ? a - b : a + q_ - b; }
  FqElem neg(FqElem a) const { return a == 0 ? 0 : q_ - a; }
  FqElem mul(FqElem a, FqElem b) const {
    return FqElem((std::uint64_t(a) * b) % q_);
  }
  FqElem inv(FqElem a) const;
  FqElem pow(FqElem a, std::uint64_t e) const;

  // Discrete log base gen; a must be nonzero.
  int dlog(FqElem a) const;
  FqElem exp(std::int64_t k) const;

  // omega = gen^((q-1)/n), the canonical generator of mu_n(F_q).
  FqElem omega() const { return omega_; }
  // k in [0, n) with z = omega^k; throws if z is not an n-th root of unity.
  int mu_index(FqElem z) const;
  // Index of a^((q-1)/n) in mu_n, i.e. dlog(a) mod n.
  int chi_index(FqElem a) const { return dlog(a) % n_; }

  FqElem reduce(std::int64_t v) const {
    std::int64_t r = v % std::int64_t(q_);
    return FqElem(r < 0 ? r + q_ : r);
  }

 private:
  std::uint32_t q_;
  int n_;
  FqElem gen_;
  FqElem omega_;
  std::vector<FqElem> inv_;
  std::vector<int> dlog_;
  std::vector<FqElem> exp_;
};

bool is_prime(std::uint64_t v);

}  // namespace wmds

#endif  // WMDS_FQ_HPP
