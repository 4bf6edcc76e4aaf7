#ifndef WMDS_RATIONAL_HPP
#define WMDS_RATIONAL_HPP

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>

#include <gmpxx.h>

namespace wmds {

// Exact rational number. Values whose numerator and denominator fit in a
// signed 64-bit word are stored inline; everything else falls back to GMP.
// The representation is always canonical: gcd(num, den) = 1, den > 0, and a
// value that fits inline is never kept in GMP form.
class Rational {
 public:
  Rational() = default;
  Rational(std::int64_t n) : num_(n) {}  // NOLINT(implicit)
  Rational(std::int64_t n, std::int64_t d);
  explicit Rational(const mpz_class& n);
  explicit Rational(const mpq_class& q);

  Rational(const Rational& o) { copy_from(o); }
  Rational(Rational&& o) noexcept = default;
  Rational& operator=(const Rational& o) {
    if (this != &o) copy_from(o);
    return *this;
  }
  Rational& operator=(Rational&& o) noexcept = default;

  // Parses "a" or "a/b" in base 10.
  static Rational parse(const std::string& s);

  bool is_zero() const { return !big_ && num_ == 0; }
  bool is_one() const { return !big_ && num_ == 1 && den_ == 1; }
  bool is_integer() const;
  bool is_small() const { return !big_; }
  int sign() const;

  mpz_class numerator() const;
  mpz_class denominator() const;
  mpq_class to_mpq() const;
  double to_double() const;
  std::string str() const;

  Rational operator-() const;
  Rational inverse() const;

  Rational& operator+=(const Rational& o);
  Rational& operator-=(const Rational& o);
  Rational& operator*=(const Rational& o);
  Rational& operator/=(const Rational& o);

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

  friend bool operator==(const Rational& a, const Rational& b);
  friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
  friend bool operator<(const Rational& a, const Rational& b);

  // this += a * b, the hot operation of polynomial multiplication.
  void add_product(const Rational& a, const Rational& b);

  static Rational pow(const Rational& base, long e);

 private:
  void copy_from(const Rational& o);
  void set_big(mpq_class&& v);
  void set_from_i128(__int128 n, __int128 d);

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
  std::unique_ptr<mpq_class> big_;
};

std::ostream& operator<<(std::ostream& os, const Rational& r);

}  // namespace wmds

#endif  // WMDS_RATIONAL_HPP
