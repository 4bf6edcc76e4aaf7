#include "wmds/checks.hpp"

#include <set>
#include <stdexcept>
#include <thread>

namespace wmds {

namespace {

Report new_report(SeriesEngine& S, const char* identity, int T, nlohmann::json details) {
  Report r;
  r.identity = identity;
  r.configuration = S.configuration();
  r.truncation = T;
  r.details = std::move(details);
  return r;
}

// Records the first differing coefficient of lhs and rhs; true when equal.
bool compare(Report& r, const USeries& lhs, const USeries& rhs, nlohmann::json where = nlohmann::json::object()) {
  const int d = first_mismatch(lhs, rhs);
  if (d < 0) return true;
  where["degree"] = d;
  where["lhs"] = lhs[d].to_json();
  where["rhs"] = rhs[d].to_json();
  r.fail(std::move(where));
  return false;
}

PolyFq ppow(const FqConfig& F, const PolyFq& p, int e) { return poly::pow(F, p, unsigned(e)); }

std::vector<PolyFq> prime_set(GaussEngine& G, const PolyFq& m) {
  std::vector<PolyFq> out;
  for (const auto& [p, e] : G.factorization(m).factors) out.push_back(p);
  return out;
}

void require_coprime(const FqConfig& F, const std::vector<PolyFq>& xs, const char* who) {
  for (std::size_t a = 0; a < xs.size(); ++a)
    for (std::size_t b = a + 1; b < xs.size(); ++b)
      if (!poly::gcd(F, xs[a], xs[b]).is_one()) throw std::invalid_argument(std::string(who) + ": inputs not coprime");
}

void require_prime(const FqConfig& F, const PolyFq& p, const char* who) {
  if (!p.is_monic() || !is_irreducible(F, p)) throw std::invalid_argument(std::string(who) + ": expected a monic prime");
}

// A rank-one function of x = |p|^-s as a series in u.
USeries in_u(const CycField& K, const RatFun& f, int deg_p, int T) {
  return USeries(K, f.series(T / deg_p)).compose_power(deg_p, T);
}

// (p_a / p_b) as an exponent of zeta_n.
int sym(GaussEngine& G, const PolyFq& a, const PolyFq& b) {
  const int s = G.symbol(a, b);
  if (s < 0) throw std::invalid_argument("symbol of non-coprime primes");
  return s;
}

}  // namespace

RatFun n_piece(HCoeff& H, const PolyFq& p, int l, int j) {
  const CycField& K = H.field();
  const int n = H.fq().n();
  const PPartTable& t = H.ppart(p);
  LPoly num(K, 1);
  for (int k = 0; k <= 2; ++k)
    if (mod_n(k, n) == mod_n(j, n)) num.add_term({k}, t.at(k, l));
  return RatFun::polynomial(n, num);
}

Report check_lemma32(SeriesEngine& S, const PolyFq& p, const PolyFq& m1, const PolyFq& m2, int i, int T) {
  const FqConfig& F = S.fq();
  GaussEngine& G = S.engine();
  const int n = S.n();
  require_prime(F, p, "check_lemma32");
  require_coprime(F, {p, m1, m2}, "check_lemma32");
  if (i < 0 || i >= n) throw std::invalid_argument("check_lemma32: i out of range");
  Report r = new_report(S, "lemma32", T,
                        {{"p", poly::to_string(p)}, {"m1", poly::to_string(m1)}, {"m2", poly::to_string(m2)}, {"i", i}});
  std::vector<PolyFq> S1 = prime_set(G, m1);
  std::vector<PolyFq> S2 = S1;
  S2.push_back(p);
  const PolyFq a = poly::mul(F, m2, ppow(F, p, i));
  const PolyFq b = poly::mul(F, m2, ppow(F, p, mod_n(n - i - 2, n)));
  const CycNum g = G.gauss(1, a, ppow(F, p, i + 1));
  USeries lhs = S.kubota_D(a, S1, -1, T);
  USeries rhs = S.kubota_D(a, S2, -1, T) + S.kubota_D(b, S2, -1, T).shifted((i + 1) * p.degree()).scaled(g);
  compare(r, lhs, rhs);
  return r;
}

Report check_lemma32_subsets(SeriesEngine& S, const std::vector<PolyFq>& primes, const std::vector<int>& i,
                             const PolyFq& m2, int T) {
  const FqConfig& F = S.fq();
  GaussEngine& G = S.engine();
  const RootEmbedding& E = G.embedding();
  const int n = S.n();
  const std::size_t r = primes.size();
  if (i.size() != r) throw std::invalid_argument("check_lemma32_subsets: one exponent per prime");
  for (const auto& p : primes) require_prime(F, p, "check_lemma32_subsets");
  std::vector<PolyFq> all = primes;
  all.push_back(m2);
  require_coprime(F, all, "check_lemma32_subsets");
  for (int e : i)
    if (e < 0 || e >= n) throw std::invalid_argument("check_lemma32_subsets: exponent out of range");

  nlohmann::json ps = nlohmann::json::array();
  for (const auto& p : primes) ps.push_back(poly::to_string(p));
  Report rep = new_report(S, "lemma32_subsets", T, {{"primes", ps}, {"i", i}, {"m2", poly::to_string(m2)}});
  PolyFq m = m2;
  for (std::size_t a = 0; a < r; ++a) m = poly::mul(F, m, ppow(F, primes[a], i[a]));

  USeries lhs = S.kubota_D(m, {}, -1, T);
  USeries rhs(S.field(), T), literal(S.field(), T);
  for (std::uint32_t mask = 0; mask < (1u << r); ++mask) {
    PolyFq arg = m2;
    CycNum c = CycNum::one(S.field());
    int shift = 0;
    std::int64_t cross = 0;
    for (std::size_t a = 0; a < r; ++a) {
      if (mask >> a & 1u) {
        arg = poly::mul(F, arg, ppow(F, primes[a], mod_n(n - i[a] - 2, n)));
        c = c * G.gauss(1, m, ppow(F, primes[a], i[a] + 1));
        shift += (i[a] + 1) * primes[a].degree();
        for (std::size_t b = a + 1; b < r; ++b)
          if (mask >> b & 1u) cross += 2 * std::int64_t(i[a] + 1) * (i[b] + 1) * sym(G, primes[a], primes[b]);
      } else {
        arg = poly::mul(F, arg, ppow(F, primes[a], i[a]));
      }
    }
    USeries term = S.kubota_D(arg, primes, -1, T).shifted(shift).scaled(c);
    literal += term;
    rhs += term.scaled(E.zeta_n(cross));
  }
  compare(rep, lhs, rhs);
  rep.details["without_cross_symbol"] = first_mismatch(lhs, literal) < 0 ? "pass" : "fail";
  return rep;
}

Report check_lemma33(SeriesEngine& S, const PolyFq& p, const PolyFq& m1, const PolyFq& m2, int i, int T) {
  const FqConfig& F = S.fq();
  GaussEngine& G = S.engine();
  const int n = S.n();
  require_prime(F, p, "check_lemma33");
  require_coprime(F, {p, m1, m2}, "check_lemma33");
  if (i < 0 || i >= n) throw std::invalid_argument("check_lemma33: i out of range");
  Report r = new_report(S, "lemma33", T,
                        {{"p", poly::to_string(p)},
                         {"m1", poly::to_string(m1)},
                         {"m2", poly::to_string(m2)},
                         {"i", i},
                         {"branch", i == n - 1 ? "i = n-1" : "i <= n-2"}});
  std::vector<PolyFq> S1 = prime_set(G, m1);
  std::vector<PolyFq> S2 = S1;
  S2.push_back(p);
  const PolyFq a = poly::mul(F, m2, ppow(F, p, i));
  const Rational np(std::int64_t(norm(F, p)));
  USeries inv = geometric(S.field(), Rational::pow(np, n - 1), n * p.degree(), T);
  USeries num = S.kubota_D(a, S1, -1, T);
  if (i <= n - 2) {
    const PolyFq b = poly::mul(F, m2, ppow(F, p, n - i - 2));
    const CycNum g = G.gauss(1, a, ppow(F, p, i + 1));
    num -= S.kubota_D(b, S1, -1, T).shifted((i + 1) * p.degree()).scaled(g);
  }
  compare(r, S.kubota_D(a, S2, -1, T), num * inv);
  return r;
}

Report check_eq3(SeriesEngine& S, const PolyFq& p, int l, int T) {
  const FqConfig& F = S.fq();
  const CycField& K = S.field();
  GaussEngine& G = S.engine();
  const int n = S.n();
  require_prime(F, p, "check_eq3");
  if (l < 0) throw std::invalid_argument("check_eq3: negative exponent");
  Report r = new_report(S, "eq3", T, {{"p", poly::to_string(p)}, {"l", l}, {"pieces", "numerator"}});
  USeries lhs = S.E_series(ppow(F, p, l), -1, T);
  auto rhs = [&](PieceSource src) {
    USeries s(K, T);
    for (int j = 0; j < n; ++j)
      s += S.kubota_D(ppow(F, p, mod_n(l - 2 * j, n)), {}, -1, T) * in_u(K, f_pl(G, p, l, j, src), p.degree(), T);
    return s;
  };
  compare(r, lhs, rhs(PieceSource::Numerator));
  const USeries inv = rhs(PieceSource::Invariant);
  const int d = first_mismatch(lhs, inv);
  r.details["invariant_pieces"] = d < 0 ? nlohmann::json("pass") : nlohmann::json({{"status", "fail"}, {"degree", d}});
  return r;
}

Report check_eq13(SeriesEngine& S, const std::vector<std::pair<PolyFq, int>>& m, int T, bool iterate) {
  const FqConfig& F = S.fq();
  const CycField& K = S.field();
  GaussEngine& G = S.engine();
  HCoeff& H = S.hcoeff();
  const RootEmbedding& E = G.embedding();
  const int n = S.n();
  const std::size_t r = m.size();
  if (r == 0) throw std::invalid_argument("check_eq13: empty factorization");
  if (r == 1) {
    Report one = check_eq3(S, m[0].first, m[0].second, T);
    one.identity = "eq13";
    one.details["reduced_to"] = "eq3";
    return one;
  }
  std::vector<PolyFq> primes;
  for (const auto& [p, l] : m) {
    require_prime(F, p, "check_eq13");
    if (l < 1) throw std::invalid_argument("check_eq13: exponents must be positive");
    primes.push_back(p);
  }
  require_coprime(F, primes, "check_eq13");

  nlohmann::json desc = nlohmann::json::array();
  PolyFq mm = PolyFq::constant(1);
  for (const auto& [p, l] : m) {
    desc.push_back({poly::to_string(p), l});
    mm = poly::mul(F, mm, ppow(F, p, l));
  }
  Report rep = new_report(S, "eq13", T, {{"m", desc}});

  // sym[a][b] = (p_a / p_b) as an exponent of zeta_n.
  std::vector<std::vector<int>> sy(r, std::vector<int>(r, 0));
  for (std::size_t a = 0; a < r; ++a)
    for (std::size_t b = 0; b < r; ++b)
      if (a != b) sy[a][b] = sym(G, primes[a], primes[b]);
  std::int64_t kexp = 0;
  for (std::size_t a = 0; a < r; ++a)
    for (std::size_t b = 0; b < r; ++b)
      if (a != b) kexp += std::int64_t(sy[a][b]) * m[a].second * m[b].second;
  const CycNum Kc = E.zeta_n(kexp);
  rep.details["constant_exponent"] = mod_n(kexp, n);

  // Pieces as series in u, indexed [a][j].
  std::vector<std::vector<USeries>> f(r), h(r);
  for (std::size_t a = 0; a < r; ++a)
    for (int j = 0; j < n; ++j) {
      const int dp = primes[a].degree();
      f[a].push_back(in_u(K, f_pl(G, primes[a], m[a].second, j, PieceSource::Numerator), dp, T));
      h[a].push_back(in_u(K, n_piece(H, primes[a], m[a].second, j), dp, T));
    }
  const std::vector<PolyFq> rest(primes.begin() + 1, primes.end());

  USeries lhs = S.E_series(mm, -1, T);
  USeries peeled(K, T), full(K, T);
  std::vector<int> j(r, 0);
  for (;;) {
    std::int64_t cexp = 0;
    for (std::size_t a = 0; a < r; ++a)
      for (std::size_t b = 0; b < r; ++b)
        if (a != b) cexp += std::int64_t(sy[a][b]) * (j[a] * j[b] - j[a] * m[b].second);
    PolyFq arg = PolyFq::constant(1);
    for (std::size_t a = 0; a < r; ++a) arg = poly::mul(F, arg, ppow(F, primes[a], mod_n(m[a].second - 2 * j[a], n)));
    const CycNum C = E.zeta_n(cexp);
    USeries t1 = S.kubota_D(arg, rest, -1, T) * f[0][std::size_t(j[0])];
    for (std::size_t a = 1; a < r; ++a) t1 = t1 * h[a][std::size_t(j[a])];
    peeled += t1.scaled(C);
    if (iterate) {
      USeries t2 = S.kubota_D(arg, {}, -1, T);
      for (std::size_t a = 0; a < r; ++a) t2 = t2 * f[a][std::size_t(j[a])];
      full += t2.scaled(C);
    }
    std::size_t a = 0;
    while (a < r && ++j[a] == n) j[a++] = 0;
    if (a == r) break;
  }
  compare(rep, lhs, peeled.scaled(Kc));
  if (iterate) {
    // Exact match, or a constant multiple of lhs.
    nlohmann::json it;
    const USeries fullK = full.scaled(Kc);
    it["exact"] = first_mismatch(lhs, fullK) < 0;
    if (it["exact"]) {
      rep.details["all_primes_peeled"] = it;
      return rep;
    }
    int d0 = 0;
    while (d0 <= T && lhs[d0].is_zero()) ++d0;
    bool prop = false;
    if (d0 <= T && !fullK[d0].is_zero()) {
      const CycNum c = fullK[d0] * lhs[d0].inverse();
      prop = first_mismatch(lhs.scaled(c), fullK) < 0;
      if (prop) it["ratio"] = c.to_json();
    }
    it["constant_multiple"] = prop;
    rep.details["all_primes_peeled"] = it;
  }
  return rep;
}

BiSeries Z_series(const HGrid& grid, const CycField& K, std::uint32_t q, int i, int j, int T1, int T2) {
  const int n = grid.n;
  if (grid.D1 < T2 || grid.D2 < T1) throw std::invalid_argument("Z_series: grid too small");
  BiSeries z(K, T1, T2);
  for (int a = 0; a <= T1; ++a)
    for (int b = 0; b <= T2; ++b)
      if ((i < 0 || a % n == i) && (j < 0 || b % n == j))
        z.at(a, b) = grid.entry[std::size_t(b)][std::size_t(a)];
  const Rational qn = Rational::pow(Rational(std::int64_t(q)), n);
  return z.divided_by_binomial(qn, n, 0).divided_by_binomial(qn, 0, n).divided_by_binomial(qn * qn, n, n);
}

Report check_eq18(SeriesEngine& S, const HGrid& grid, int T1, int T2) {
  const CycField& K = S.field();
  const int n = S.n();
  Report rep = new_report(S, "eq18", T2, {{"T1", T1}, {"T2", T2}});
  std::vector<USeries> sums;
  for (int a = 0; a <= T1; ++a) {
    USeries s(K, T2);
    for (PolyFq m : enumerate_monic(S.fq(), a)) s += S.E_series(m, -1, T2);
    sums.push_back(std::move(s));
  }
  const Rational qn = Rational::pow(Rational(std::int64_t(S.q())), n);
  for (int i = 0; i < n && rep.passed; ++i) {
    BiSeries rhs(K, T1, T2);
    for (int a = i; a <= T1; a += n)
      for (int b = 0; b <= T2; ++b) rhs.at(a, b) = sums[std::size_t(a)][b];
    rhs = rhs.divided_by_binomial(qn, n, 0).divided_by_binomial(qn * qn, n, n);
    BiSeries lhs = Z_series(grid, K, S.q(), i, -1, T1, T2);
    for (int a = 0; a <= T1 && rep.passed; ++a)
      for (int b = 0; b <= T2; ++b)
        if (lhs.at(a, b) != rhs.at(a, b)) {
          rep.fail({{"i", i}, {"a", a}, {"b", b}});
          break;
        }
  }
  return rep;
}

Report verify_feZ(SeriesEngine& S, const TransitionMatrix& T, const HGrid& grid, int max_deg_m, int trunc) {
  const FqConfig& F = S.fq();
  const CycField& K = S.field();
  const int n = S.n();
  const std::int64_t q = S.q();
  Report rep = new_report(S, "feZ", trunc, {{"max_deg_m", max_deg_m}});

  std::vector<PolyFq> ms;
  for (int a = 0; a <= max_deg_m; ++a)
    for (PolyFq m : enumerate_monic(F, a)) ms.push_back(m);
  std::vector<Report> rows(ms.size());
  const int W = std::max(1, S.workers());
  std::vector<std::thread> pool;
  for (int w = 0; w < W; ++w)
    pool.emplace_back([&, w] {
      for (std::size_t k = std::size_t(w); k < ms.size(); k += std::size_t(W)) rows[k] = verify_feE(S, ms[k], T, trunc);
    });
  for (auto& t : pool) t.join();
  int failed = 0;
  for (const Report& r : rows)
    if (!r.passed) {
      ++failed;
      rep.fail({{"row", r.first_mismatch}});
    }
  rep.details["rows"] = ms.size();
  rep.details["rows_failed"] = failed;

  // (x, y) -> (q x y, 1 / (q^2 y)) exchanges 1 - q^n x^n and 1 - q^2n x^n y^n.
  const Rational qn = Rational::pow(Rational(q), n);
  LPoly Nx = LPoly::constant(K, 2, CycNum::one(K));
  Nx.add_term({n, 0}, CycNum(K, -qn));
  LPoly Nxy = LPoly::constant(K, 2, CycNum::one(K));
  Nxy.add_term({n, n}, CycNum(K, -qn * qn));
  const std::vector<Exps> A{{1, 1}, {0, -1}};
  const std::vector<Rational> c{Rational(q), Rational(1, q * q)};
  const bool exchange = Nx.substitute(A, c) == Nxy && Nxy.substitute(A, c) == Nx;
  rep.details["normalizer_exchange"] = exchange;
  if (!exchange) rep.fail({{"normalizer_exchange", false}});

  // Summed E rows against the grid columns.
  const int B = std::min(trunc, grid.D1);
  bool grid_rows = max_deg_m <= grid.D2;
  for (int a = 0; a <= std::min(max_deg_m, grid.D2) && grid_rows; ++a) {
    USeries s(K, B);
    for (PolyFq m : enumerate_monic(F, a)) s += S.raw_E(m, B);
    for (int b = 0; b <= B; ++b)
      if (s[b] != grid.entry[std::size_t(b)][std::size_t(a)]) {
        grid_rows = false;
        rep.fail({{"grid_row", a}, {"degree", b}});
        break;
      }
  }
  rep.details["grid_rows"] = grid_rows;

  const int G = std::min(grid.D1, grid.D2);
  bool symmetric = true;
  for (int a = 0; a <= G; ++a)
    for (int b = 0; b < a; ++b)
      if (grid.entry[std::size_t(a)][std::size_t(b)] != grid.entry[std::size_t(b)][std::size_t(a)]) symmetric = false;
  rep.details["sigma1"] = {{"transpose_symmetric", symmetric}, {"through", "sigma2 with the variables exchanged"}};
  if (!symmetric) rep.fail({{"sigma1", "grid is not transpose symmetric"}});
  return rep;
}

}  // namespace wmds
