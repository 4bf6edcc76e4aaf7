// Independent reference computations used by the unit and acceptance tests.
// Nothing here goes through the library's fast paths: symbols come from the
// Euler criterion by explicit powering, and the additive character from a
// long division that reads off the t^-1 coefficient directly.
#ifndef WMDS_TESTS_ORACLES_HPP
#define WMDS_TESTS_ORACLES_HPP

#include <map>
#include <optional>
#include <vector>

#include "wmds/cyclo.hpp"
#include "wmds/poly.hpp"

namespace oracle {

using namespace wmds;

// Coefficient of t^-1 of x/c at infinity: the constant term of the quotient
// of x*t by c.
inline FqElem laurent_residue(const FqConfig& F, const PolyFq& x, const PolyFq& c) {
  auto [q, r] = poly::divmod(F, poly::mul(F, x, PolyFq::monomial(1)), c);
  return q[0];
}

inline std::optional<int> euler_symbol(const FqConfig& F, const PolyFq& y, const Factorization& fc) {
  int idx = 0;
  for (const auto& [p, e] : fc.factors) {
    PolyFq red = poly::mod(F, y, p);
    if (red.is_zero()) return std::nullopt;
    PolyFq v = poly::powmod(F, red, (norm(F, p) - 1) / std::uint64_t(F.n()), p);
    idx = (idx + F.mu_index(v[0]) * e) % F.n();
  }
  return idx;
}

inline PolyFq residue_from_code(const FqConfig& F, int len, std::uint64_t code) {
  std::vector<FqElem> c(std::size_t(len), 0);
  for (int j = 0; j < len; ++j, code /= F.q()) c[std::size_t(j)] = FqElem(code % F.q());
  return PolyFq(std::move(c));
}

// All residues y mod c (code order) with their symbol index, -1 if not a unit.
struct ResidueSymbols {
  std::vector<PolyFq> y;
  std::vector<int> sym;
};

inline ResidueSymbols residue_symbols(const FqConfig& F, const PolyFq& c) {
  ResidueSymbols out;
  Factorization fc = factor(F, c);
  std::uint64_t total = ipow(F.q(), unsigned(c.degree()));
  for (std::uint64_t code = 0; code < total; ++code) {
    PolyFq y = residue_from_code(F, c.degree(), code);
    auto s = euler_symbol(F, y, fc);
    out.sym.push_back(s ? *s : -1);
    out.y.push_back(std::move(y));
  }
  return out;
}

// g_i(r, c) for every i, by literal summation over y mod c.
inline std::vector<CycNum> gauss_all(const RootEmbedding& E, const PolyFq& r, const PolyFq& c,
                                     const ResidueSymbols& rs) {
  const FqConfig& F = E.fq();
  const int n = F.n(), M = E.M();
  std::vector<std::vector<std::int64_t>> counts(std::size_t(n), std::vector<std::int64_t>(std::size_t(M), 0));
  for (std::size_t k = 0; k < rs.y.size(); ++k) {
    if (rs.sym[k] < 0) continue;
    FqElem a = laurent_residue(F, poly::mul(F, r, rs.y[k]), c);
    for (int i = 0; i < n; ++i)
      ++counts[std::size_t(i)][std::size_t((E.mu_exponent(std::int64_t(i) * rs.sym[k]) + E.psi_exponent(a)) % M)];
  }
  std::vector<CycNum> out;
  for (int i = 0; i < n; ++i) out.push_back(CycNum::from_root_counts(E.field(), counts[std::size_t(i)]));
  return out;
}

inline CycNum gauss(const RootEmbedding& E, int i, const PolyFq& r, const PolyFq& c) {
  return gauss_all(E, r, c, residue_symbols(E.fq(), c))[std::size_t(((i % E.n()) + E.n()) % E.n())];
}

// The same literal sum for many r against one modulus c, in integer
// power-basis coordinates. res(r y / c) is linear in the digits y_j of y:
// it equals sum_j y_j w_j with w_j = sum_m r_m res(t^(m+j) / c), so the
// residues are walked once per r with an odometer and nothing but counts.
class DirectGaussTable {
 public:
  DirectGaussTable(const RootEmbedding& E, const PolyFq& c) : E_(&E), c_(c), d_(c.degree()) {
    const FqConfig& F = E.fq();
    Factorization fc = factor(F, c);
    const std::uint64_t total = ipow(F.q(), unsigned(d_));
    sym_.resize(total);
    for (std::uint64_t code = 0; code < total; ++code) {
      auto s = euler_symbol(F, residue_from_code(F, d_, code), fc);
      sym_[code] = std::int8_t(s ? *s : -1);
    }
  }

  // g_i(r, c) for i = 0..n-1, phi coordinates each.
  std::vector<std::vector<std::int64_t>> eval(const PolyFq& r) {
    const FqConfig& F = E_->fq();
    const std::uint32_t q = F.q();
    const int n = F.n(), M = E_->M(), phi = E_->field().phi();
    const int top = std::max(r.degree(), 0) + d_;
    while (int(res_.size()) <= top) res_.push_back(laurent_residue(F, PolyFq::monomial(int(res_.size())), c_));
    std::vector<std::uint64_t> w(std::size_t(d_), 0);
    for (int j = 0; j < d_; ++j)
      for (int m = 0; m <= r.degree(); ++m) w[std::size_t(j)] += std::uint64_t(r[m]) * res_[std::size_t(m + j)];
    for (auto& x : w) x %= q;
    // counts[k * q + a]: residues with symbol index k and res(r y / c) = a.
    std::vector<std::int64_t> counts(std::size_t(n) * q, 0);
    std::vector<std::uint32_t> digit(std::size_t(d_), 0);
    std::uint64_t a = 0;
    for (std::uint64_t code = 0; code < sym_.size(); ++code) {
      if (sym_[code] >= 0) ++counts[std::size_t(sym_[code]) * q + a];
      // Advancing digit j, with or without wraparound, adds w_j mod q.
      for (int j = 0; j < d_; ++j) {
        a = (a + w[std::size_t(j)]) % q;
        if (++digit[std::size_t(j)] < q) break;
        digit[std::size_t(j)] = 0;
      }
    }
    std::vector<std::vector<std::int64_t>> out(std::size_t(n), std::vector<std::int64_t>(std::size_t(phi), 0));
    std::vector<std::int64_t> roots(static_cast<std::size_t>(M));
    for (int i = 0; i < n; ++i) {
      std::fill(roots.begin(), roots.end(), 0);
      for (int k = 0; k < n; ++k)
        for (std::uint32_t v = 0; v < q; ++v)
          roots[std::size_t((E_->mu_exponent(std::int64_t(i) * k) + E_->psi_exponent(v)) % M)] +=
              counts[std::size_t(k) * q + v];
      E_->field().add_root_counts(roots.data(), out[std::size_t(i)].data());
    }
    return out;
  }

 private:
  const RootEmbedding* E_;
  PolyFq c_;
  int d_;
  std::vector<std::int8_t> sym_;
  std::vector<FqElem> res_;
};

}  // namespace oracle

#endif  // WMDS_TESTS_ORACLES_HPP
