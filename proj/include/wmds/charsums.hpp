#ifndef WMDS_CHARSUMS_HPP
#define WMDS_CHARSUMS_HPP

#include <cstdint>
#include <memory>
#include <shared_mutex>
#include <unordered_map>
#include <vector>

#include "wmds/cyclo.hpp"
#include "wmds/poly.hpp"

namespace wmds {

// Gauss sums g_i(r, c) = sum_{y mod c} eps^i((y/c)) e(ry/c) over F_q[t].
//
// The additive character is e(x/c) = psi(res(x/c)), where res is the
// coefficient of t^-1 in the expansion at infinity. Non-coprime y contribute
// nothing for every i, so g_0(1, p) = -1 at a prime p.
//
// All memo tables are guarded by a shared mutex; inserts are idempotent, so
// concurrent callers always see the same exact values.
class GaussEngine {
 public:
  explicit GaussEngine(const RootEmbedding& E);

  const FqConfig& fq() const { return E_->fq(); }
  const RootEmbedding& embedding() const { return *E_; }
  const CycField& field() const { return E_->field(); }
  int n() const { return E_->n(); }

  CycNum e_char(const PolyFq& x, const PolyFq& c) const;

  // Literal summation over every residue y mod c. c must be monic.
  CycNum gauss_direct(int i, const PolyFq& r, const PolyFq& c) const;

  // g_i(1, p) for a monic irreducible p, memoized for all i at once.
  const CycNum& gauss_prime(int i, const PolyFq& p);
  // The two evaluation routes behind gauss_prime: summation over the cyclic
  // group (O/p)^x, and the Hasse-Davenport lift of the degree-one sum.
  std::vector<CycNum> gauss_prime_cyclic(const PolyFq& p) const;
  std::vector<CycNum> gauss_prime_lifted(const PolyFq& p) const;

  // g_i(r p^a, p^k) for r prime to p.
  CycNum gauss_prime_power(int i, const PolyFq& r, const PolyFq& p, int a, int k);

  // g_i(r, c) through factorization of c and twisted multiplicativity.
  CycNum gauss(int i, const PolyFq& r, const PolyFq& c);

  Factorization factorization(const PolyFq& c);

  // Exponent k with (x/c) = omega^k, or -1 when gcd(x, c) != 1.
  int symbol(const PolyFq& x, const PolyFq& c) const;

  // Primes above this degree use the lifted route in gauss_prime.
  static constexpr int kCyclicMaxDegree = 3;

 private:
  const RootEmbedding* E_;
  // Degree-one Gauss sums G_1(chi^i) indexed by i.
  std::vector<CycNum> g1_;

  mutable std::shared_mutex mu_;
  std::unordered_map<PolyFq, std::vector<CycNum>, PolyHash> prime_memo_;
  std::unordered_map<PolyFq, Factorization, PolyHash> factor_memo_;
};

}  // namespace wmds

#endif  // WMDS_CHARSUMS_HPP
