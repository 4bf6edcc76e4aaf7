#ifndef WMDS_ROWSUM_HPP
#define WMDS_ROWSUM_HPP

#include <cstdint>
#include <vector>

#include "wmds/charsums.hpp"

namespace wmds {

// Symbol index of every residue mod a monic prime p, addressed by residue code
// sum_j y_j q^j; -1 marks the zero residue. Built by walking the powers of a
// primitive residue, so construction costs |p| small multiplications.
class PrimeSymbolTable {
 public:
  PrimeSymbolTable(const FqConfig& F, const PolyFq& p, int max_degree);

  const PolyFq& prime() const { return p_; }
  int degree() const { return deg_; }
  int max_degree() const { return int(tpow_.size()) - 1; }
  int at(std::uint64_t code) const { return sym_[code]; }
  const std::vector<std::int8_t>& table() const { return sym_; }
  // t^j mod p as a coefficient vector of length degree(), for j <= max_degree.
  const std::vector<FqElem>& tpow(int j) const { return tpow_[std::size_t(j)]; }

 private:
  PolyFq p_;
  int deg_;
  std::vector<std::int8_t> sym_;
  std::vector<std::vector<FqElem>> tpow_;
};

// g(1, d) for every monic d of degree <= T as integer power-basis vectors,
// laid out by monic code. Entries vanish off the squarefree locus.
class SquarefreeGaussTable {
 public:
  SquarefreeGaussTable(GaussEngine& G, int max_degree, int workers = 1);

  int max_degree() const { return T_; }
  int phi() const { return phi_; }
  std::uint64_t count(int a) const { return levels_[std::size_t(a)].nz.size(); }
  bool nonzero(int a, std::uint64_t code) const { return levels_[std::size_t(a)].nz[code] != 0; }
  const std::int32_t* value(int a, std::uint64_t code) const {
    return levels_[std::size_t(a)].coords.data() + code * std::uint64_t(phi_);
  }

 private:
  struct Level {
    std::vector<std::int32_t> coords;
    std::vector<std::uint8_t> nz;
  };
  int T_;
  int phi_;
  std::vector<Level> levels_;
};

// sum of g(1, d) over monic d of degree a coprime to every listed prime,
// split by the joint symbol index sum_j (d/p_j) n^j. The result holds n^w
// buckets of phi coordinates each, w = primes.size().
std::vector<std::int64_t> bucket_sums(const FqConfig& F, const SquarefreeGaussTable& S, int a,
                                      const std::vector<const PrimeSymbolTable*>& primes);

// One d1 in a split d = d1 d0 with d0 squarefree and prime to the listed
// primes: the d0 sum picks up zeta_n^(sum_j coef[j] (d0/p_j)).
struct TwistedDivisor {
  int degree = 0;
  std::vector<int> coef;
  std::vector<std::int64_t> value;  // integral power-basis coordinates
};

// out[a * phi + t] += sum over divs and squarefree d0 of degree a - deg d1 of
// value(d1) * g(1, d0) * zeta_n^class, for a <= max_degree.
void twisted_row(const FqConfig& F, const RootEmbedding& E, const SquarefreeGaussTable& S,
                 const std::vector<const PrimeSymbolTable*>& primes, const std::vector<TwistedDivisor>& divs,
                 int max_degree, __int128* out);

// Exact conversion of a wide integer coordinate vector.
CycNum cyc_from_wide(const CycField& K, const __int128* coords);

// out += a * b in Z[zeta_M] with wide accumulation.
void mul_add_wide(const CycField& K, const std::int64_t* a, const std::int64_t* b, __int128* out);

}  // namespace wmds

#endif  // WMDS_ROWSUM_HPP
