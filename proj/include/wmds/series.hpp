#ifndef WMDS_SERIES_HPP
#define WMDS_SERIES_HPP

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "wmds/hcoeff.hpp"
#include "wmds/rowsum.hpp"

namespace wmds {

// Truncated power series sum_{d <= T} c_d u^d over Q(zeta_M).
class USeries {
 public:
  USeries() = default;
  USeries(const CycField& K, int T);
  USeries(const CycField& K, std::vector<CycNum> c);
  static USeries one(const CycField& K, int T);
  static USeries monomial(const CycField& K, int T, int d, const CycNum& c);

  const CycField& field() const { return *K_; }
  int truncation() const { return int(c_.size()) - 1; }
  const std::vector<CycNum>& coeffs() const { return c_; }
  const CycNum& operator[](int d) const { return c_[std::size_t(d)]; }
  CycNum& coeff(int d) { return c_[std::size_t(d)]; }
  bool is_zero() const;

  USeries& operator+=(const USeries& o);
  USeries& operator-=(const USeries& o);
  friend USeries operator+(USeries a, const USeries& b) { return a += b; }
  friend USeries operator-(USeries a, const USeries& b) { return a -= b; }
  // Product truncated to the smaller of the two truncations.
  friend USeries operator*(const USeries& a, const USeries& b);
  USeries scaled(const CycNum& c) const;
  USeries scaled(const Rational& c) const;
  // u^k times the series; coefficients past T are dropped.
  USeries shifted(int k) const;
  USeries truncated(int T) const;
  // Requires an invertible constant term.
  USeries inverse() const;
  // Keeps the degrees = i (mod n).
  USeries residue_class(int i, int n) const;
  // f(u^e), truncated at T.
  USeries compose_power(int e, int T) const;
  friend bool operator==(const USeries& a, const USeries& b);

  nlohmann::json to_json() const;
  std::string to_csv() const;

 private:
  const CycField* K_ = nullptr;
  std::vector<CycNum> c_;
};

// First degree where a and b differ, compared up to the smaller truncation;
// -1 if none.
int first_mismatch(const USeries& a, const USeries& b);

// 1 / (1 - c u^e) to truncation T.
USeries geometric(const CycField& K, const Rational& c, int e, int T);

// Truncated sum c_{a,b} x^a y^b.
class BiSeries {
 public:
  BiSeries() = default;
  BiSeries(const CycField& K, int T1, int T2);

  const CycField& field() const { return *K_; }
  int trunc1() const { return T1_; }
  int trunc2() const { return T2_; }
  const CycNum& at(int a, int b) const { return c_[idx(a, b)]; }
  CycNum& at(int a, int b) { return c_[idx(a, b)]; }

  BiSeries& operator+=(const BiSeries& o);
  friend BiSeries operator+(BiSeries a, const BiSeries& b) { return a += b; }
  friend bool operator==(const BiSeries& a, const BiSeries& b);
  // Multiplies by 1 / (1 - c x^e1 y^e2).
  BiSeries divided_by_binomial(const Rational& c, int e1, int e2) const;
  // Row a as a series in y.
  USeries row(int a) const;

  nlohmann::json to_json() const;
  std::string to_csv() const;

 private:
  std::size_t idx(int a, int b) const { return std::size_t(a) * std::size_t(T2_ + 1) + std::size_t(b); }
  const CycField* K_ = nullptr;
  int T1_ = -1, T2_ = -1;
  std::vector<CycNum> c_;
};

// Dense polynomial in u; the zero polynomial has no coefficients.
class UPoly {
 public:
  UPoly() = default;
  explicit UPoly(const CycField& K) : K_(&K) {}
  UPoly(const CycField& K, std::vector<CycNum> c);
  static UPoly constant(const CycField& K, const CycNum& c);
  static UPoly monomial(const CycField& K, int d, const CycNum& c);
  // 1 - c u^e.
  static UPoly binomial(const CycField& K, const Rational& c, int e);

  const CycField& field() const { return *K_; }
  int degree() const { return int(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  const std::vector<CycNum>& coeffs() const { return c_; }
  CycNum coeff(int d) const;

  friend UPoly operator+(const UPoly& a, const UPoly& b);
  friend UPoly operator-(const UPoly& a, const UPoly& b);
  friend UPoly operator*(const UPoly& a, const UPoly& b);
  UPoly scaled(const CycNum& c) const;
  UPoly shifted(int k) const;
  friend bool operator==(const UPoly& a, const UPoly& b) { return a.c_ == b.c_; }
  // u^D p(c/u) with D = deg p: the reflected polynomial.
  UPoly reflected(const Rational& c, int D) const;
  USeries series(int T) const;

  nlohmann::json to_json() const;

 private:
  void trim();
  const CycField* K_ = nullptr;
  std::vector<CycNum> c_;
};

// num / den with den(0) != 0 unless the model came from a substitution.
struct RationalModel {
  UPoly num;
  UPoly den;

  // Power series; requires den(0) != 0.
  USeries series(int T) const;
  // u -> c/u, cleared to a polynomial quotient.
  RationalModel reflected(const Rational& c) const;
  RationalModel times(const UPoly& p) const { return {num * p, den}; }
  friend RationalModel operator+(const RationalModel& a, const RationalModel& b);
  friend RationalModel operator*(const RationalModel& a, const RationalModel& b);
  // Cross-multiplied equality.
  friend bool operator==(const RationalModel& a, const RationalModel& b);
  nlohmann::json to_json() const;
};

struct RationalFit {
  std::optional<RationalModel> model;
  int checked = 0;  // coefficients beyond the solved ones that were matched
};

// Smallest-denominator rational function reproducing every coefficient of s,
// with at least one coefficient left over as a check. Denominators are
// normalized to constant term 1.
RationalFit rationalize(const USeries& s, int max_den_deg);

// Rational model with a prescribed denominator: the numerator is the
// truncation of s * den, and every coefficient above its degree is a check.
// No model when fewer than min_checks coefficients are left over.
RationalFit rationalize_over(const USeries& s, const UPoly& den, int min_checks = 1);

// Exact linear algebra over Q(zeta_M). solve_linear returns some solution of
// A x = b (free variables zero) or nullopt when inconsistent.
std::optional<std::vector<CycNum>> solve_linear(const CycField& K, std::vector<std::vector<CycNum>> A,
                                                const std::vector<CycNum>& b, int cols);
std::vector<std::vector<CycNum>> nullspace(const CycField& K, std::vector<std::vector<CycNum>> A, int cols);

// Verification outcome. first_mismatch is null on success.
struct Report {
  std::string identity;
  nlohmann::json configuration;
  int truncation = 0;
  bool passed = true;
  nlohmann::json first_mismatch;
  nlohmann::json details;

  void fail(nlohmann::json where) {
    if (passed) first_mismatch = std::move(where);
    passed = false;
  }
  nlohmann::json to_json() const;
};

// T_ij(u) as rational functions, indexed [i][j].
struct TransitionMatrix {
  int n = 0;
  std::vector<std::vector<RationalModel>> entry;
  nlohmann::json to_json() const;
};

// One functional-equation instance lhs = (q u)^k sum_i T_i rhs[i], where the
// T_i are the unknowns and rhs[i] belongs to unknown slot[i].
struct FeInstance {
  RationalModel lhs;
  int k = 0;
  std::vector<RationalModel> rhs;
  std::vector<int> slot;
};

struct FitBounds {
  int num = 2;
  int den = 2;
};

struct FitOutcome {
  std::optional<std::vector<RationalModel>> unknowns;  // one per slot
  FitBounds bounds;
  int nullity = 0;
  int equations = 0;
  std::string diagnostics;
};

// Solves for slot functions A_r / (u^shift B) with deg A_r <= num and
// deg B <= den, trying bounds from `start` up to `limit` in order of total
// degree. Succeeds at the first bound with a one-dimensional solution space.
FitOutcome fit_functional_equation(const CycField& K, std::uint32_t q, const std::vector<FeInstance>& inst,
                                   int slots, int shift, FitBounds start = {}, FitBounds limit = {6, 6});

// Exact D, D_S and E series for one configuration, built from the same
// twisted row sums as the H grids. Rows are cached by (m, S).
class SeriesEngine {
 public:
  SeriesEngine(HCoeff& H, int max_degree, int workers = 1);

  HCoeff& hcoeff() { return *H_; }
  GaussEngine& engine() { return H_->engine(); }
  const FqConfig& fq() const { return H_->fq(); }
  const CycField& field() const { return H_->field(); }
  int n() const { return H_->fq().n(); }
  std::uint32_t q() const { return H_->fq().q(); }
  int max_degree() const { return T_; }
  int workers() const { return workers_; }
  const SquarefreeGaussTable& gauss_table() const { return S_; }
  nlohmann::json configuration() const {
    return {{"n", n()}, {"q", q()}, {"eps", H_->engine().embedding().eps_choice()}};
  }

  // sum over monic d of degree a prime to S of g(m, d), for a <= T.
  USeries raw_D(const PolyFq& m, const std::vector<PolyFq>& S, int T);
  // sum over monic d of degree a of H(d, m).
  USeries raw_E(const PolyFq& m, int T);

  // With the (1 - q^n u^n)^-1 normalizer; i_class < 0 keeps every degree.
  USeries kubota_D(const PolyFq& m, const std::vector<PolyFq>& S, int i_class, int T);
  USeries E_series(const PolyFq& m, int i_class, int T);
  USeries normalizer(int T) const;

  // 1 - q^(n+1) u^n, the denominator shared by the normalized D and E.
  UPoly model_denominator() const;
  // Rational models of kubota_D (S empty) and E_series over
  // model_denominator(); nullopt when no coefficient is left to check.
  std::optional<RationalModel> D_model(const PolyFq& m, int i_class, int T);
  std::optional<RationalModel> E_model(const PolyFq& m, int i_class, int T);

  const PrimeSymbolTable& table(const PolyFq& p);

 private:
  HCoeff* H_;
  int T_;
  int workers_;
  SquarefreeGaussTable S_;
  std::mutex mu_;
  std::map<PolyFq, std::unique_ptr<PrimeSymbolTable>> tables_;
  std::map<std::pair<PolyFq, std::vector<PolyFq>>, USeries> d_memo_;
  std::map<PolyFq, USeries> e_memo_;
};

}  // namespace wmds

#endif  // WMDS_SERIES_HPP
