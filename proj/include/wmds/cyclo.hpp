#ifndef WMDS_CYCLO_HPP
#define WMDS_CYCLO_HPP

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "wmds/fq.hpp"
#include "wmds/rational.hpp"

namespace wmds {

// The cyclotomic field Q(zeta_M) in the power basis 1, z, ..., z^(phi-1)
// modulo the M-th cyclotomic polynomial. Instances are interned and live for
// the whole program, so raw pointers to them stay valid.
class CycField {
 public:
  static constexpr int kMaxPhi = 64;
  static const CycField& get(int M);

  int M() const { return M_; }
  int phi() const { return phi_; }
  // Coefficients of Phi_M, low to high, length phi + 1.
  const std::vector<std::int64_t>& cyclotomic_poly() const { return poly_; }
  // z^k reduced into the power basis, for 0 <= k < max(M, 2 phi - 1).
  const std::vector<std::int64_t>& power(int k) const { return pow_[std::size_t(k)]; }

  // Integer kernels on power-basis coordinate arrays of length phi, for hot
  // loops that stay inside Z[zeta_M]. out must not alias the inputs.
  void mul_int(const std::int64_t* a, const std::int64_t* b, std::int64_t* out) const;
  // out = a * zeta^k
  void mul_zeta_int(const std::int64_t* a, std::int64_t k, std::int64_t* out) const;
  // Folds sum_k counts[k] zeta^k (counts of length M) into out.
  void add_root_counts(const std::int64_t* counts, std::int64_t* out) const;

 private:
  explicit CycField(int M);
  int M_;
  int phi_;
  std::vector<std::int64_t> poly_;
  std::vector<std::vector<std::int64_t>> pow_;
};

// Exact element of Q(zeta_M). A default-constructed CycNum is the zero of no
// particular field and adopts the field of whatever it is combined with.
class CycNum {
 public:
  CycNum() = default;
  CycNum(const CycField& field, const Rational& r);
  static CycNum zero(const CycField& field) { return CycNum(field, Rational(0)); }
  static CycNum one(const CycField& field) { return CycNum(field, Rational(1)); }
  // zeta_M^k for any integer k.
  static CycNum zeta(const CycField& field, std::int64_t k);
  // sum_k counts[k] zeta_M^k, counts.size() == M.
  static CycNum from_root_counts(const CycField& field, const std::vector<std::int64_t>& counts);
  static CycNum from_coeffs(const CycField& field, std::vector<Rational> coeffs);
  static CycNum from_ints(const CycField& field, const std::int64_t* coeffs);

  const CycField* field() const { return f_; }
  const std::vector<Rational>& coeffs() const { return c_; }
  bool is_zero() const;
  bool is_rational() const;
  // Fills out with the coordinates when all are integers fitting in 64 bits.
  bool to_ints(std::vector<std::int64_t>& out) const;
  // Valid only when is_rational().
  Rational rational_part() const;

  CycNum operator-() const;
  CycNum& operator+=(const CycNum& o);
  CycNum& operator-=(const CycNum& o);
  CycNum& operator*=(const CycNum& o);
  CycNum& operator*=(const Rational& r);
  friend CycNum operator+(CycNum a, const CycNum& b) { return a += b; }
  friend CycNum operator-(CycNum a, const CycNum& b) { return a -= b; }
  friend CycNum operator*(const CycNum& a, const CycNum& b);
  friend CycNum operator*(CycNum a, const Rational& r) { return a *= r; }
  friend CycNum operator*(const Rational& r, CycNum a) { return a *= r; }
  friend bool operator==(const CycNum& a, const CycNum& b);
  friend bool operator!=(const CycNum& a, const CycNum& b) { return !(a == b); }

  // this += a * b
  void add_product(const CycNum& a, const CycNum& b);

  CycNum inverse() const;
  CycNum pow(std::int64_t e) const;
  // zeta -> zeta^k, gcd(k, M) = 1. k = M - 1 is complex conjugation.
  CycNum galois(std::int64_t k) const;
  CycNum conj() const;
  CycNum mul_zeta(std::int64_t k) const;

  std::complex<double> to_complex() const;
  // "(c0, c1, ...)" coordinate vector in the power basis.
  std::string str() const;

  nlohmann::json to_json() const;
  static CycNum from_json(const nlohmann::json& j);

 private:
  void adopt(const CycField* f);
  const CycField* f_ = nullptr;
  std::vector<Rational> c_;
};

std::ostream& operator<<(std::ostream& os, const CycNum& a);

// The character values used throughout: epsilon on mu_n(F_q) and the
// additive character psi(a) = zeta_p^a, both inside Q(zeta_{n p}).
class RootEmbedding {
 public:
  // eps_choice selects epsilon(omega) = zeta_n^eps_choice; must be coprime to n.
  explicit RootEmbedding(const FqConfig& F, int eps_choice = 1);

  const FqConfig& fq() const { return *F_; }
  const CycField& field() const { return *field_; }
  int M() const { return field_->M(); }
  int n() const { return F_->n(); }
  int eps_choice() const { return eps_; }

  // epsilon(z) for z in mu_n(F_q); 0 maps to 0.
  CycNum embed_mu_n(FqElem z) const;
  CycNum psi(FqElem a) const;
  // Exponent of zeta_M representing epsilon(omega^k).
  std::int64_t mu_exponent(std::int64_t k) const;
  // Exponent of zeta_M representing psi(a).
  std::int64_t psi_exponent(FqElem a) const { return std::int64_t(n()) * a % M(); }
  // epsilon(omega)^k as a field element.
  CycNum zeta_n(std::int64_t k) const { return CycNum::zeta(*field_, mu_exponent(k)); }

 private:
  const FqConfig* F_;
  const CycField* field_;
  int eps_;
};

int euler_phi(int m);

}  // namespace wmds

#endif  // WMDS_CYCLO_HPP
