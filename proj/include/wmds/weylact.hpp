#ifndef WMDS_WEYLACT_HPP
#define WMDS_WEYLACT_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "wmds/charsums.hpp"
#include "wmds/cyclo.hpp"

namespace wmds {

// Simply laced Dynkin diagram, nodes 0..rank-1.
struct RootSystemDesc {
  int rank = 0;
  std::vector<std::vector<bool>> adjacent;

  static RootSystemDesc A(int rank);
  bool adj(int i, int j) const { return adjacent[std::size_t(i)][std::size_t(j)]; }
  // Order of sigma_i sigma_j: 1 on the diagonal, 3 for adjacent nodes, else 2.
  int order(int i, int j) const;
  std::vector<int> neighbors(int k) const;
};

using Exps = std::vector<int>;

// Exponent-vector bookkeeping for x^beta, beta in the root lattice.
struct MonomialKey {
  Exps beta;

  int height() const;
  // d_j(beta) = sum of beta_i over the neighbors i of j.
  int d(const RootSystemDesc& R, int j) const;
  std::vector<int> support() const;
  bool nonnegative() const;
  // beta >= other in the dominance order.
  bool dominates(const MonomialKey& other) const;
};

// Sparse Laurent polynomial in x_1..x_r over Q(zeta_M).
class LPoly {
 public:
  LPoly() = default;
  LPoly(const CycField& K, int rank) : K_(&K), r_(rank) {}
  static LPoly constant(const CycField& K, int rank, const CycNum& c);
  static LPoly monomial(const CycField& K, int rank, const Exps& e, const CycNum& c);

  const CycField& field() const { return *K_; }
  int rank() const { return r_; }
  const std::map<Exps, CycNum>& terms() const { return t_; }
  bool is_zero() const { return t_.empty(); }
  CycNum coeff(const Exps& e) const;
  void add_term(const Exps& e, const CycNum& c);

  LPoly operator-() const;
  LPoly& operator+=(const LPoly& o);
  LPoly& operator-=(const LPoly& o);
  friend LPoly operator+(LPoly a, const LPoly& b) { return a += b; }
  friend LPoly operator-(LPoly a, const LPoly& b) { return a -= b; }
  friend LPoly operator*(const LPoly& a, const LPoly& b);
  LPoly scaled(const CycNum& c) const;
  LPoly scaled(const Rational& c) const;
  LPoly shifted(const Exps& e) const;
  friend bool operator==(const LPoly& a, const LPoly& b) { return a.t_ == b.t_; }

  // x_j -> coef[j] x^A[j].
  LPoly substitute(const std::vector<Exps>& A, const std::vector<Rational>& coef) const;
  // x_j -> zeta_n^t[j] x_j.
  LPoly twist(const RootEmbedding& E, const std::vector<int>& t) const;
  // Componentwise minimum exponent; zeros for the zero polynomial.
  Exps min_exps() const;
  bool in_power_form(int n) const;
  // q with q * d == *this, if it exists.
  std::optional<LPoly> divide_exact(const LPoly& d) const;

  nlohmann::json to_json() const;
  std::string str() const;

 private:
  const CycField* K_ = nullptr;
  int r_ = 0;
  std::map<Exps, CycNum> t_;
};

// num / prod(den). Every denominator factor is a polynomial in x_1^n..x_r^n,
// normalized to constant term 1 when it has one, so sieving never touches
// the denominator.
class RatFun {
 public:
  RatFun() = default;
  // den must be nonzero; it is replaced by the product of its twists
  // x_j -> zeta_n^a x_j when not already in x^n form.
  static RatFun make(const RootEmbedding& E, const LPoly& num, const LPoly& den);
  static RatFun make(const RootEmbedding& E, const LPoly& num, const std::vector<LPoly>& den);
  static RatFun polynomial(int n, const LPoly& num);

  int n() const { return n_; }
  int rank() const { return num_.rank(); }
  const LPoly& num() const { return num_; }
  const std::vector<LPoly>& den_factors() const { return den_; }
  LPoly den() const;
  bool is_zero() const { return num_.is_zero(); }

  friend RatFun operator+(const RatFun& a, const RatFun& b);
  friend RatFun operator-(const RatFun& a, const RatFun& b);
  friend RatFun operator*(const RatFun& a, const RatFun& b);
  RatFun scaled(const CycNum& c) const;
  RatFun shifted(const Exps& e) const;
  // Equality by cross-multiplication.
  friend bool operator==(const RatFun& a, const RatFun& b);
  friend bool operator!=(const RatFun& a, const RatFun& b) { return !(a == b); }

  // Drops denominator factors that divide the numerator.
  void cancel();
  // Power-series coefficients in a single variable up to x^T (rank 1 only).
  std::vector<CycNum> series(int T) const;
  // Coefficients x^a y^b, a <= T1, b <= T2 (rank 2 only).
  std::vector<std::vector<CycNum>> series2(int T1, int T2) const;

  nlohmann::json to_json() const;

  // Internal: assemble from parts already in normal form.
  static RatFun from_parts(int n, LPoly num, std::vector<LPoly> den);

 private:
  int n_ = 1;
  LPoly num_;
  std::vector<LPoly> den_;
};

// The action |_l sigma_k at a prime p of F_q[t].
class WeylAction {
 public:
  WeylAction(RootSystemDesc R, GaussEngine& G, PolyFq prime, std::vector<int> twist = {});

  const RootSystemDesc& root_system() const { return R_; }
  const RootEmbedding& embedding() const { return G_->embedding(); }
  const CycField& field() const { return G_->field(); }
  int n() const { return G_->n(); }
  std::int64_t p() const { return p_; }
  const std::vector<int>& twist_param() const { return l_; }

  // Images of x_1..x_r under sigma_k, as rational functions.
  std::vector<RatFun> sigma_subst(int k) const;
  // f(sigma_k x).
  RatFun substitute(const RatFun& f, int k) const;
  // f_k(x; i, j): the part with beta_k = i and d_k(beta) = j (mod n).
  RatFun sieve(const RatFun& f, int k, int i, int j) const;
  // Roots-of-unity average form of the same sieve, for cross-checks.
  RatFun sieve_by_twists(const RatFun& f, int k, int i, int j) const;
  RatFun act(const RatFun& f, int k) const;
  // Applies sigma_{word[0]}, then sigma_{word[1]}, ...
  RatFun act_word(const RatFun& f, const std::vector<int>& word) const;

  // g*_i(1, p): g_i(1, p)/p, or -1 when n | i.
  CycNum gstar(int i) const;
  // The univariate kernels, in the variable of a rank-one function.
  RatFun P(int i, int j) const;
  RatFun Q(int i, int j) const;

  LPoly var(int k) const;

 private:
  RootSystemDesc R_;
  GaussEngine* G_;
  PolyFq prime_;
  std::int64_t p_;
  std::vector<int> l_;
  // Numerator of P_ij + Q_{j+1-i,j}-style kernel for a residue class, over (1 - p^(n-1) x^n).
  LPoly kernel_num(int k, int i0, int j) const;
};

int mod_n(std::int64_t a, int n);

// h = N / ((1 - p^(n-1) x^n)(1 - p^(n-1) y^n)(1 - p^(2n-1) x^n y^n)) on A_2.
RatFun invariant_h(GaussEngine& G, const PolyFq& prime);
// The numerator N.
LPoly h_numerator(GaussEngine& G, const PolyFq& prime);

// Where the local pieces come from. Invariant: the y^l coefficient of h.
// Numerator: the y^l coefficient of N over (1 - p^(n-1) x^n) alone, which
// drops the y-denominators of h; the two agree for l < n.
enum class PieceSource { Invariant, Numerator };

// h^(p,l)(x; i): coefficient of y^l, then the x-exponents = i (mod n).
// Rank one, exact.
RatFun h_pl(GaussEngine& G, const PolyFq& prime, int l, int i, PieceSource src = PieceSource::Invariant);
RatFun f_pl(GaussEngine& G, const PolyFq& prime, int l, int i, PieceSource src = PieceSource::Invariant);
// Generic y^l coefficient of a rank-two function whose y-dependent
// denominator factors are all of the form 1 - c x^a y^b.
RatFun y_coefficient(const RootEmbedding& E, const RatFun& f, int l);
// Keeps the x-exponents = i (mod n) of a rank-one function.
RatFun x_residue_part(const RatFun& f, int i);

// Lemma checks: both sides as rank-one rational functions.
std::pair<RatFun, RatFun> hpl_identity_sides(GaussEngine& G, const PolyFq& prime, int l, int i);
std::pair<RatFun, RatFun> fpl_identity_sides(GaussEngine& G, const PolyFq& prime, int l, int i);

}  // namespace wmds

#endif  // WMDS_WEYLACT_HPP
