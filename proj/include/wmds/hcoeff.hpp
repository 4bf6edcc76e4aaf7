#ifndef WMDS_HCOEFF_HPP
#define WMDS_HCOEFF_HPP

#include <array>
#include <cstdint>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"

#include "wmds/charsums.hpp"
#include "wmds/rowsum.hpp"

namespace wmds {

// H(p^k, p^l) for 0 <= k, l <= 2 at a monic prime p. Everything outside that
// square vanishes as well.
struct PPartTable {
  PolyFq prime;
  std::array<std::array<CycNum, 3>, 3> entries;

  CycNum at(int k, int l) const;
  friend bool operator==(const PPartTable& a, const PPartTable& b);
};

// One prime-power block (p^k, p^l) of a factored pair.
struct HBlock {
  PolyFq prime;
  int k = 0;
  int l = 0;
};

// The coefficient H(c1, c2) of the double series.
class HCoeff {
 public:
  explicit HCoeff(GaussEngine& G);

  GaussEngine& engine() const { return *G_; }
  const FqConfig& fq() const { return G_->fq(); }
  const CycField& field() const { return G_->field(); }

  // The table built from g(1,p) and g(p,p^2), and the one built from the
  // polynomial N with |p| g_2(1,p) in place of g(p,p^2).
  PPartTable ppart_from_gauss(const PolyFq& p);
  PPartTable ppart_from_n(const PolyFq& p);
  // Memoized; computes both constructions and throws std::logic_error if
  // they ever differ. Throws std::domain_error on reducible input.
  const PPartTable& ppart(const PolyFq& p);

  // Monic c1, c2 (std::domain_error otherwise). Blocks are combined left to
  // right over the sorted prime list.
  CycNum H(const PolyFq& c1, const PolyFq& c2);

  // Prime-power blocks of (c1, c2), sorted by prime.
  std::vector<HBlock> blocks(const PolyFq& c1, const PolyFq& c2);
  // Combines pairwise coprime blocks in the given order with
  // H(cc', dd') = H(c,d) H(c',d') (c/c')^2 (d/d')^2 (c/d')^-1 (c'/d)^-1.
  CycNum combine(const std::vector<HBlock>& blocks);
  // The same product written with the six symbols
  // (c1/d1)(d1/c1)(c2/d2)(d2/c2)(c1/d2)^-1 (d1/c2)^-1, no reciprocity used.
  CycNum combine_symmetric(const std::vector<HBlock>& blocks);

 private:
  GaussEngine* G_;
  mutable std::shared_mutex mu_;
  std::unordered_map<PolyFq, PPartTable, PolyHash> pparts_;
  struct PairHash {
    std::size_t operator()(const std::pair<PolyFq, PolyFq>& k) const {
      PolyHash h;
      return h(k.first) * 1000003u ^ h(k.second);
    }
  };
  std::unordered_map<std::pair<PolyFq, PolyFq>, CycNum, PairHash> memo_;
};

// Sums of H over monic pairs by degree: entry(a, b) = sum over deg c1 = a,
// deg c2 = b of H(c1, c2).
struct HGrid {
  int D1 = 0;
  int D2 = 0;
  int n = 0;
  std::vector<std::vector<CycNum>> entry;  // [a][b]

  // Entries with a = i and b = j (mod n), other cells omitted.
  std::vector<std::vector<CycNum>> refined(int i, int j) const;
  nlohmann::json to_json() const;
  // Reads the exact values back; the approximations are ignored.
  static HGrid from_json(const nlohmann::json& j);
  std::string to_csv() const;
  friend bool operator==(const HGrid& x, const HGrid& y) { return x.D1 == y.D1 && x.D2 == y.D2 && x.entry == y.entry; }
};

// Row by row over c2: for each c2 the c1 = d1 d0 split (d1 | c2^oo, d0
// squarefree and prime to c2) reduces to bucketed sums of g(1, d0).
// Workers take rows round-robin; partial grids are added in worker order.
HGrid h_grid(HCoeff& H, int D1, int D2, int workers = 1);
// Literal double loop over H; for cross-checks at small degree.
HGrid h_grid_naive(HCoeff& H, int D1, int D2);

}  // namespace wmds

#endif  // WMDS_HCOEFF_HPP
