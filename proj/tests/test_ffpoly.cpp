#include <gtest/gtest.h>

#include <random>
#include <set>

#include "wmds/poly.hpp"

using namespace wmds;

namespace {

const FqConfig& F13() {
  static const FqConfig F(13, 3);
  return F;
}

PolyFq P(const std::string& s) { return poly::parse(F13(), s); }

// Euler criterion by brute force: x^((|p|-1)/n) mod p, no norm shortcut.
std::optional<int> euler_oracle(const FqConfig& F, const PolyFq& x, const PolyFq& c) {
  Factorization fc = factor(F, c);
  int idx = 0;
  for (const auto& [p, e] : fc.factors) {
    PolyFq r = poly::mod(F, x, p);
    if (r.is_zero()) return std::nullopt;
    std::uint64_t N = norm(F, p);
    PolyFq v = poly::powmod(F, r, (N - 1) / F.n(), p);
    EXPECT_EQ(v.degree(), 0);
    idx = (idx + F.mu_index(v[0]) * e) % F.n();
  }
  return idx;
}

}  // namespace

TEST(FqConfig, RejectsBadParameters) {
  EXPECT_THROW(FqConfig(15, 3), std::invalid_argument);
  EXPECT_THROW(FqConfig(7, 3), std::invalid_argument);
  EXPECT_THROW(FqConfig(13, 3, 3), std::invalid_argument);
  EXPECT_NO_THROW(FqConfig(17, 2));
}

TEST(FqConfig, GeneratorAndRootsOfUnity) {
  const auto& F = F13();
  EXPECT_EQ(F.gen(), 2u);
  EXPECT_EQ(F.omega(), 3u);
  std::set<FqElem> mu;
  for (int k = 0; k < 3; ++k) mu.insert(F.pow(F.omega(), k));
  EXPECT_EQ(mu, (std::set<FqElem>{1, 3, 9}));
  for (FqElem a = 1; a < 13; ++a) EXPECT_EQ(F.mul(a, F.inv(a)), 1u);
  for (FqElem a = 1; a < 13; ++a) EXPECT_EQ(F.exp(F.dlog(a)), a);
}

TEST(Poly, Norm) {
  const auto& F = F13();
  EXPECT_EQ(norm(F, P("1")), 1u);
  EXPECT_EQ(norm(F, P("t")), 13u);
  EXPECT_EQ(norm(F, P("1 + 3*t + t^2")), 169u);
  EXPECT_THROW(norm(F, PolyFq()), std::domain_error);
}

TEST(Poly, ParseAndPrint) {
  EXPECT_EQ(P("t - 2"), PolyFq({11, 1}));
  EXPECT_EQ(P("-t^2 + 3"), PolyFq({3, 0, 12}));
  EXPECT_EQ(poly::to_string(P("2 + t + 5*t^3")), "2 + t + 5*t^3");
  EXPECT_THROW(P("t^"), std::invalid_argument);
}

TEST(Poly, EnumerateMonicCounts) {
  const auto& F = F13();
  for (int d = 0; d <= 3; ++d) {
    std::set<PolyFq> seen;
    for (const PolyFq& f : enumerate_monic(F, d)) {
      EXPECT_TRUE(f.is_monic());
      EXPECT_EQ(f.degree(), d);
      seen.insert(f);
    }
    EXPECT_EQ(seen.size(), ipow(13, unsigned(d)));
  }
  auto r0 = enumerate_monic(F, 0);
  EXPECT_EQ(*r0.begin(), P("1"));
}

TEST(Poly, DivisionIdentity) {
  const auto& F = F13();
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<FqElem> coef(0, 12);
  for (int it = 0; it < 300; ++it) {
    std::vector<FqElem> a(std::size_t(1 + it % 7)), b(std::size_t(1 + it % 4));
    for (auto& x : a) x = coef(rng);
    for (auto& x : b) x = coef(rng);
    b.back() = 1 + coef(rng) % 12;
    PolyFq A(a), B(b);
    auto [qt, r] = poly::divmod(F, A, B);
    EXPECT_LT(r.degree(), B.degree());
    EXPECT_EQ(poly::add(F, poly::mul(F, qt, B), r), A);
  }
}

TEST(Factor, SpecExamples) {
  const auto& F = F13();
  Factorization f = factor(F, P("t^2 + 1"));
  ASSERT_EQ(f.factors.size(), 2u);
  EXPECT_EQ(f.factors[0].first, P("t + 5"));
  EXPECT_EQ(f.factors[1].first, P("t - 5"));
  EXPECT_EQ(f.expand(F), P("t^2 + 1"));

  Factorization g = factor(F, P("t"));
  ASSERT_EQ(g.factors.size(), 1u);
  EXPECT_EQ(g.factors[0].second, 1);

  Factorization h = factor(F, P("t^2 + 2*t + 1"));
  ASSERT_EQ(h.factors.size(), 1u);
  EXPECT_EQ(h.factors[0].first, P("t + 1"));
  EXPECT_EQ(h.factors[0].second, 2);
  EXPECT_THROW(factor(F, PolyFq()), std::domain_error);
}

TEST(Factor, ReconstructsExhaustivelyToDegree3) {
  const auto& F = F13();
  for (int d = 1; d <= 3; ++d) {
    for (const PolyFq& f : enumerate_monic(F, d)) {
      Factorization fac = factor(F, f);
      ASSERT_EQ(fac.expand(F), f);
      for (const auto& [p, e] : fac.factors) {
        EXPECT_TRUE(p.is_monic());
        EXPECT_GT(e, 0);
      }
    }
  }
}

TEST(Factor, ReconstructsRandomUpToDegree8) {
  const auto& F = F13();
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<FqElem> coef(0, 12);
  for (int it = 0; it < 400; ++it) {
    int d = 4 + it % 5;
    std::vector<FqElem> c(std::size_t(d) + 1);
    for (auto& x : c) x = coef(rng);
    c.back() = 1 + coef(rng) % 12;
    PolyFq f(c);
    Factorization fac = factor(F, f);
    ASSERT_EQ(fac.expand(F), f);
    for (std::size_t k = 0; k < fac.factors.size(); ++k) {
      const PolyFq& p = fac.factors[k].first;
      // irreducible: no root-type factor of lower degree divides it
      for (int e = 1; 2 * e <= p.degree(); ++e) {
        PolyFq xq = poly::powmod(F, PolyFq::monomial(1), ipow(13, unsigned(e)), p);
        PolyFq g = poly::gcd(F, poly::sub(F, xq, PolyFq::monomial(1)), p);
        EXPECT_TRUE(g.is_one());
      }
      if (k > 0) EXPECT_TRUE(fac.factors[k - 1].first < p);
    }
  }
}

TEST(Factor, IrreducibleCounts) {
  // Necklace counts: (q^d - sum_{e|d, e<d} e I_e) / d.
  const auto& F = F13();
  EXPECT_EQ(monic_irreducibles(F, 1).size(), 13u);
  EXPECT_EQ(monic_irreducibles(F, 2).size(), (169u - 13u) / 2);
  EXPECT_EQ(monic_irreducibles(F, 3).size(), (2197u - 13u) / 3);
}

TEST(Symbol, SpecExamples) {
  const auto& F = F13();
  EXPECT_EQ(residue_symbol(F, P("t"), P("t - 2")), 3u);
  EXPECT_EQ(residue_symbol(F, P("t"), P("t^2 + 1")), 1u);
  EXPECT_EQ(residue_symbol(F, P("t^2 + 1"), P("t")), 1u);
  EXPECT_EQ(residue_symbol(F, P("t^3 + 7"), P("1")), 1u);
  EXPECT_EQ(residue_symbol(F, P("t"), P("t^2 + t")), 0u);
  EXPECT_THROW(residue_symbol(F, P("t"), PolyFq()), std::domain_error);
}

TEST(Symbol, EulerPathMatchesBruteForcePowering) {
  const auto& F = F13();
  for (int dc = 1; dc <= 2; ++dc)
    for (const PolyFq& c : enumerate_monic(F, dc))
      for (int dx = 0; dx <= 2; ++dx)
        for (const PolyFq& x : enumerate_monic(F, dx))
          ASSERT_EQ(symbol_index_euler(F, x, c), euler_oracle(F, x, c));
}

TEST(Symbol, TwoPathsAgreeExhaustivelyToDegree3) {
  const auto& F = F13();
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<FqElem> unit(1, 12);
  for (int dc = 0; dc <= 3; ++dc) {
    for (const PolyFq& c : enumerate_monic(F, dc)) {
      Factorization fc = factor(F, c);
      for (int dx = 0; dx <= (dc == 3 ? 2 : 3); ++dx) {
        for (const PolyFq& xm : enumerate_monic(F, dx)) {
          // non-monic x exercises the constant law
          PolyFq x = poly::scale(F, xm, unit(rng));
          ASSERT_EQ(symbol_index(F, x, c), symbol_index_euler(F, x, fc))
              << poly::to_string(x) << " / " << poly::to_string(c);
        }
      }
    }
  }
  // degree 3 against degree 3 on a sample
  std::uniform_int_distribution<std::uint64_t> code(0, 2196);
  for (int it = 0; it < 3000; ++it) {
    PolyFq x = monic_from_code(F, 3, code(rng)), c = monic_from_code(F, 3, code(rng));
    ASSERT_EQ(symbol_index(F, x, c), symbol_index_euler(F, x, c));
  }
}

TEST(Symbol, ReciprocityMonicToDegree4) {
  for (auto [q, n] : {std::pair{13u, 3}, std::pair{17u, 2}}) {
    FqConfig F(q, n);
    for (int da = 0; da <= 2; ++da)
      for (const PolyFq& a : enumerate_monic(F, da))
        for (int db = 0; db <= 2; ++db)
          for (const PolyFq& b : enumerate_monic(F, db)) {
            if (!poly::gcd(F, a, b).is_one()) continue;
            ASSERT_EQ(symbol_index_euler(F, a, b), symbol_index_euler(F, b, a));
          }
    std::mt19937_64 rng(q);
    for (int it = 0; it < 4000; ++it) {
      int da = 3 + it % 2, db = 3 + (it / 2) % 2;
      PolyFq a = monic_from_code(F, da, rng() % ipow(q, unsigned(da)));
      PolyFq b = monic_from_code(F, db, rng() % ipow(q, unsigned(db)));
      if (!poly::gcd(F, a, b).is_one()) continue;
      ASSERT_EQ(symbol_index_euler(F, a, b), symbol_index_euler(F, b, a));
    }
  }
}

TEST(Symbol, ValueSetAndMultiplicativity) {
  const auto& F = F13();
  std::mt19937_64 rng(8);
  for (int it = 0; it < 2000; ++it) {
    PolyFq x = monic_from_code(F, 2, rng() % 169), y = monic_from_code(F, 2, rng() % 169);
    PolyFq c = monic_from_code(F, 1 + it % 3, rng() % ipow(13, unsigned(1 + it % 3)));
    PolyFq d = monic_from_code(F, 1 + it % 2, rng() % ipow(13, unsigned(1 + it % 2)));
    FqElem s = residue_symbol(F, x, c);
    if (s != 0) EXPECT_EQ(F.pow(s, 3), 1u);
    // multiplicative in the top argument
    EXPECT_EQ(residue_symbol(F, poly::mul(F, x, y), c), F.mul(s, residue_symbol(F, y, c)));
    // and in the bottom argument
    EXPECT_EQ(residue_symbol(F, x, poly::mul(F, c, d)), F.mul(s, residue_symbol(F, x, d)));
  }
}
