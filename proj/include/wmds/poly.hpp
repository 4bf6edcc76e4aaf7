#ifndef WMDS_POLY_HPP
#define WMDS_POLY_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wmds/fq.hpp"

namespace wmds {

// Element of F_q[t], little-endian coefficients with no trailing zeros.
// The zero polynomial has no coefficients.
class PolyFq {
 public:
  PolyFq() = default;
  explicit PolyFq(std::vector<FqElem> coeffs) : c_(std::move(coeffs)) { trim(); }
  static PolyFq constant(FqElem a) { return a == 0 ? PolyFq() : PolyFq({a}); }
  // t^k
  static PolyFq monomial(int k, FqElem a = 1);

  bool is_zero() const { return c_.empty(); }
  bool is_one() const { return c_.size() == 1 && c_[0] == 1; }
  bool is_constant() const { return c_.size() <= 1; }
  bool is_monic() const { return !c_.empty() && c_.back() == 1; }
  // -1 for the zero polynomial.
  int degree() const { return int(c_.size()) - 1; }
  FqElem lead() const { return c_.empty() ? 0 : c_.back(); }
  FqElem operator[](int i) const { return i < int(c_.size()) ? c_[i] : 0; }
  const std::vector<FqElem>& coeffs() const { return c_; }

  friend bool operator==(const PolyFq& a, const PolyFq& b) { return a.c_ == b.c_; }
  friend bool operator!=(const PolyFq& a, const PolyFq& b) { return a.c_ != b.c_; }
  // Degree first, then coefficients from the top down.
  friend bool operator<(const PolyFq& a, const PolyFq& b);

 private:
  void trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
  }
  std::vector<FqElem> c_;
};

struct PolyHash {
  std::size_t operator()(const PolyFq& p) const noexcept;
};

// Arithmetic over a fixed field.
namespace poly {

PolyFq add(const FqConfig& F, const PolyFq& a, const PolyFq& b);
PolyFq sub(const FqConfig& F, const PolyFq& a, const PolyFq& b);
PolyFq neg(const FqConfig& F, const PolyFq& a);
PolyFq scale(const FqConfig& F, const PolyFq& a, FqElem s);
PolyFq mul(const FqConfig& F, const PolyFq& a, const PolyFq& b);
PolyFq pow(const FqConfig& F, const PolyFq& a, unsigned e);
// Quotient and remainder; b must be nonzero.
std::pair<PolyFq, PolyFq> divmod(const FqConfig& F, const PolyFq& a, const PolyFq& b);
PolyFq mod(const FqConfig& F, const PolyFq& a, const PolyFq& b);
PolyFq mulmod(const FqConfig& F, const PolyFq& a, const PolyFq& b, const PolyFq& m);
PolyFq powmod(const FqConfig& F, const PolyFq& a, std::uint64_t e, const PolyFq& m);
// Monic gcd (zero if both are zero).
PolyFq gcd(const FqConfig& F, PolyFq a, PolyFq b);
PolyFq monic(const FqConfig& F, const PolyFq& a);
PolyFq derivative(const FqConfig& F, const PolyFq& a);
// Exact division; throws if b does not divide a.
PolyFq exact_div(const FqConfig& F, const PolyFq& a, const PolyFq& b);
FqElem eval(const FqConfig& F, const PolyFq& a, FqElem x);
// Multiplicity of the monic irreducible p in a (a nonzero).
int valuation(const FqConfig& F, PolyFq a, const PolyFq& p);

// "c0 + c1*t + c2*t^2" style; accepts any sum of terms "a", "a*t", "t^k",
// "a*t^k", with optional minus signs.
PolyFq parse(const FqConfig& F, const std::string& text);
std::string to_string(const PolyFq& a);

}  // namespace poly

// norm(f) = q^deg f, as an integer. Throws on the zero polynomial.
std::uint64_t norm(const FqConfig& F, const PolyFq& f);

// Monic polynomials of degree d are numbered by their lower coefficients
// read in base q: code = c_0 + c_1 q + ... + c_{d-1} q^{d-1}.
PolyFq monic_from_code(const FqConfig& F, int degree, std::uint64_t code);
std::uint64_t monic_code(const FqConfig& F, const PolyFq& f);
std::uint64_t ipow(std::uint64_t b, unsigned e);

// All q^d monic polynomials of degree d in increasing code order.
class MonicRange {
 public:
  MonicRange(const FqConfig& F, int degree);

  class iterator {
   public:
    using value_type = PolyFq;
    using difference_type = std::ptrdiff_t;
    iterator(const FqConfig* F, int degree, std::uint64_t code) : F_(F), d_(degree), code_(code) {}
    PolyFq operator*() const { return monic_from_code(*F_, d_, code_); }
    iterator& operator++() {
      ++code_;
      return *this;
    }
    bool operator==(const iterator& o) const { return code_ == o.code_; }
    bool operator!=(const iterator& o) const { return code_ != o.code_; }

   private:
    const FqConfig* F_;
    int d_;
    std::uint64_t code_;
  };

  iterator begin() const { return {F_, d_, 0}; }
  iterator end() const { return {F_, d_, count_}; }
  std::uint64_t size() const { return count_; }

 private:
  const FqConfig* F_;
  int d_;
  std::uint64_t count_;
};

MonicRange enumerate_monic(const FqConfig& F, int degree);

struct Factorization {
  FqElem unit = 1;
  // Monic irreducibles with positive multiplicity, sorted ascending.
  std::vector<std::pair<PolyFq, int>> factors;

  PolyFq expand(const FqConfig& F) const;
  bool is_squarefree() const;
};

Factorization factor(const FqConfig& F, const PolyFq& f);
bool is_irreducible(const FqConfig& F, const PolyFq& f);
// All monic irreducibles of the given degree, in code order.
std::vector<PolyFq> monic_irreducibles(const FqConfig& F, int degree);

// A generator of (O/p)^x for monic irreducible p: the first residue in code
// order whose order is |p| - 1.
PolyFq primitive_residue(const FqConfig& F, const PolyFq& p);

// Norm map F_q[t]/(p) -> F_q for monic irreducible p: product of the
// Frobenius conjugates of x mod p.
FqElem residue_norm(const FqConfig& F, const PolyFq& x, const PolyFq& p);

// n-th power residue symbol (x/c) as an exponent k of omega, or nullopt when
// gcd(x, c) != 1. The unit part of c is ignored; c must be nonzero.
// Euler criterion on the factorization of c.
std::optional<int> symbol_index_euler(const FqConfig& F, const PolyFq& x, const PolyFq& c);
std::optional<int> symbol_index_euler(const FqConfig& F, const PolyFq& x, const Factorization& c);
// Euclidean reduction using reciprocity for monic pairs plus the constant
// law (a/c) = chi(a)^deg c.
std::optional<int> symbol_index(const FqConfig& F, const PolyFq& x, const PolyFq& c);
// The symbol as an element of F_q: 0, or an n-th root of unity.
FqElem residue_symbol(const FqConfig& F, const PolyFq& x, const PolyFq& c);

}  // namespace wmds

#endif  // WMDS_POLY_HPP
