#include "wmds/suites.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <numeric>
#include <random>
#include <thread>

#include "wmds/weylact.hpp"

#ifndef WMDS_VERSION
#define WMDS_VERSION "0.1.0"
#endif

namespace wmds {

void RunConfig::validate() const {
  if (n < 1) throw ConfigError("n must be positive");
  if (!is_prime(q)) throw ConfigError("q=" + std::to_string(q) + " is not prime");
  if ((q - 1) % (4u * unsigned(n)) != 0)
    throw ConfigError("q=" + std::to_string(q) + " is not 1 mod 4n for n=" + std::to_string(n));
  if (q > 65521) throw ConfigError("q is too large");
  if (euler_phi(n * int(q)) > CycField::kMaxPhi)
    throw ConfigError("Q(zeta_nq) has degree " + std::to_string(euler_phi(n * int(q))) + ", above the supported " +
                      std::to_string(CycField::kMaxPhi));
  if (generator != 0) {
    if (generator >= q) throw ConfigError("generator must lie in [1, q)");
    FqElem x = generator;
    std::uint32_t order = 1;
    while (x != 1) {
      x = FqElem(std::uint64_t(x) * generator % q);
      ++order;
    }
    if (order != q - 1) throw ConfigError("generator " + std::to_string(generator) + " is not a primitive root");
  }
  if (eps < 1 || eps >= std::max(n, 2) || std::gcd(eps, n) != 1)
    throw ConfigError("eps must lie in [1, n) and be coprime to n");
  if (n == 1 && eps != 1) throw ConfigError("eps must be 1 when n = 1");
  if (trunc < 1) throw ConfigError("trunc must be positive");
  if (fit_deg < 0 || fit_count < 1) throw ConfigError("fit bounds must be positive");
  if (fit_deg + 3 > trunc)
    throw ConfigError("fit-deg " + std::to_string(fit_deg) + " needs trunc >= " + std::to_string(fit_deg + 3));
  if (fit_bounds.num < 0 || fit_bounds.den < 0 || fit_max.num < fit_bounds.num || fit_max.den < fit_bounds.den)
    throw ConfigError("fit degree caps must satisfy 0 <= start <= max");
  if (samples < 1) throw ConfigError("samples must be positive");
  if (workers < 1) throw ConfigError("workers must be positive");
}

nlohmann::json RunConfig::to_json() const {
  return {{"n", n},
          {"q", q},
          {"generator", generator},
          {"eps", eps},
          {"trunc", trunc},
          {"fit_deg", fit_deg},
          {"fit_count", fit_count},
          {"fit_bounds", {fit_bounds.num, fit_bounds.den}},
          {"fit_max", {fit_max.num, fit_max.den}},
          {"samples", samples},
          {"seed", seed}};
}

std::string RunConfig::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : to_json().dump()) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string version_string() { return WMDS_VERSION; }

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"relations", "invariance", "lemma21", "lemma22", "prop31", "lemma32",
                                              "lemma33",   "eq3",        "eq13",    "feD",     "feE",    "feZ"};
  return names;
}

namespace {

const RunConfig& checked(const RunConfig& c) {
  c.validate();
  return c;
}

PolyFq linear(FqElem c) { return PolyFq({c, 1}); }

}  // namespace

SuiteContext::SuiteContext(RunConfig cfg)
    : cfg_(checked(cfg)), F_(cfg_.q, cfg_.n, cfg_.generator), E_(F_, cfg_.eps), G_(E_), H_(G_) {
  t_ = linear(0);
  partner_ = linear(1);
  for (FqElem c = 1; c < cfg_.q; ++c)
    if (G_.symbol(t_, linear(c)) > 0) {
      partner_ = linear(c);
      break;
    }
  quad_ = monic_irreducibles(F_, 2).front();
}

SuiteContext::~SuiteContext() = default;

SeriesEngine& SuiteContext::series() {
  if (!S_) S_ = std::make_unique<SeriesEngine>(H_, cfg_.trunc, cfg_.workers);
  return *S_;
}

std::vector<PolyFq> SuiteContext::training() const {
  return sample_monic(F_, cfg_.fit_deg, cfg_.fit_count, cfg_.seed);
}

const TransitionFit& SuiteContext::fit() {
  if (!fit_) {
    FitOptions opt{cfg_.trunc, -1, cfg_.fit_bounds, cfg_.fit_max};
    fit_ = std::make_unique<TransitionFit>(fit_T(series(), training(), opt));
  }
  return *fit_;
}

const HGrid& SuiteContext::grid() {
  if (!grid_) grid_ = std::make_unique<HGrid>(h_grid(H_, cfg_.trunc, std::min(3, cfg_.trunc - 2), cfg_.workers));
  return *grid_;
}

namespace {

Report base_report(SuiteContext& ctx, const std::string& identity, int truncation = 0) {
  Report r;
  r.identity = identity;
  r.configuration = {{"n", ctx.config().n}, {"q", ctx.config().q}, {"eps", ctx.config().eps}};
  r.truncation = truncation;
  return r;
}

LPoly random_poly(const CycField& K, std::mt19937_64& rng, bool unit_constant) {
  LPoly f(K, 2);
  for (int a = 0; a <= 2; ++a)
    for (int b = 0; a + b <= 2; ++b) {
      std::int64_t c = std::int64_t(rng() % 7) - 3;
      if (unit_constant && a == 0 && b == 0) c = 1;
      f.add_term({a, b}, CycNum(K, Rational(c)));
    }
  return f;
}

std::vector<Report> relations(SuiteContext& ctx) {
  Report r = base_report(ctx, "weyl_relations");
  WeylAction W(RootSystemDesc::A(2), ctx.gauss(), ctx.prime_t());
  std::mt19937_64 rng(ctx.config().seed);
  const std::vector<std::vector<int>> words{{0, 0}, {1, 1}, {0, 1, 0, 1, 0, 1}};
  for (int k = 0; k < ctx.config().samples; ++k) {
    const CycField& K = ctx.embedding().field();
    RatFun f = RatFun::make(ctx.embedding(), random_poly(K, rng, false), random_poly(K, rng, true));
    for (const auto& w : words)
      if (W.act_word(f, w) != f) r.fail({{"function", k}, {"word", w}});
  }
  r.details = {{"prime", poly::to_string(ctx.prime_t())}, {"functions", ctx.config().samples}, {"words", words}};
  return {r};
}

std::vector<PolyFq> invariance_primes(SuiteContext& ctx) {
  return {ctx.prime_t(), linear(1), ctx.prime_quadratic()};
}

std::vector<Report> invariance(SuiteContext& ctx) {
  std::vector<Report> out;
  for (const PolyFq& p : invariance_primes(ctx)) {
    Report r = base_report(ctx, "h_invariance");
    r.details = {{"prime", poly::to_string(p)}};
    WeylAction W(RootSystemDesc::A(2), ctx.gauss(), p);
    RatFun h = invariant_h(ctx.gauss(), p);
    for (int k = 0; k < 2; ++k)
      if (W.act(h, k) != h) r.fail({{"sigma", k + 1}});
    out.push_back(std::move(r));
  }
  return out;
}

template <class Sides>
std::vector<Report> piece_lemma(SuiteContext& ctx, const std::string& identity, Sides sides) {
  std::vector<Report> out;
  const int n = ctx.config().n;
  for (const PolyFq& p : {ctx.prime_t(), ctx.prime_quadratic()}) {
    Report r = base_report(ctx, identity);
    r.details = {{"prime", poly::to_string(p)}, {"l_max", 2 * n}};
    for (int l = 0; l <= 2 * n; ++l)
      for (int i = 0; i < n; ++i) {
        auto [lhs, rhs] = sides(ctx.gauss(), p, l, i);
        if (lhs != rhs) r.fail({{"l", l}, {"i", i}});
      }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<Report> prop31(SuiteContext& ctx) {
  GaussEngine& G = ctx.gauss();
  const FqConfig& F = ctx.fq();
  const RootEmbedding& E = ctx.embedding();
  const int n = ctx.config().n;
  std::vector<PolyFq> moduli;
  for (const PolyFq& c : sample_monic(F, 2, ctx.config().samples, ctx.config().seed))
    if (c.degree() >= 1) moduli.push_back(c);
  const std::vector<PolyFq> ms{PolyFq::constant(1), linear(2)};

  // (i): g_i(a m, c) = eps((a/c))^(-i) g_i(m, c) for units a.
  Report unit = base_report(ctx, "prop31_unit_twist");
  int literal_failures = 0;
  for (const PolyFq& c : moduli)
    for (const PolyFq& m : ms) {
      std::vector<CycNum> base;
      for (int i = 0; i < n; ++i) base.push_back(G.gauss_direct(i, m, c));
      for (FqElem a = 1; a < F.q(); ++a) {
        const int sym = G.symbol(PolyFq::constant(a), c);
        for (int i = 0; i < n; ++i) {
          const CycNum lhs = G.gauss_direct(i, poly::scale(F, m, a), c);
          if (lhs != base[std::size_t(i)] * E.zeta_n(-i * sym))
            unit.fail({{"c", poly::to_string(c)}, {"m", poly::to_string(m)}, {"a", a}, {"i", i}});
          if (lhs != base[std::size_t(i)] * E.zeta_n(-sym)) ++literal_failures;
        }
      }
    }
  unit.details = {{"moduli", moduli.size()}, {"exponent", "-i"}, {"exponent_minus_one_failures", literal_failures}};

  // (ii): g_i(m, c c') = g_i(m, c) g_i(m, c') eps((c/c'))^(2i), deg c c' <= 3.
  // At most samples/2 pairs of each product degree.
  Report prod = base_report(ctx, "prop31_coprime_product");
  int pairs = 0;
  std::map<int, int> per_degree;
  for (std::size_t x = 0; x < moduli.size(); ++x)
    for (std::size_t y = x + 1; y < moduli.size(); ++y) {
      const PolyFq &c = moduli[x], &d = moduli[y];
      const int deg = c.degree() + d.degree();
      if (deg > 3 || !poly::gcd(F, c, d).is_one() || per_degree[deg] >= std::max(1, ctx.config().samples / 2)) continue;
      ++per_degree[deg];
      ++pairs;
      const int sym = G.symbol(c, d);
      for (const PolyFq& m : ms)
        for (int i = 0; i < n; ++i) {
          const CycNum lhs = G.gauss_direct(i, m, poly::mul(F, c, d));
          const CycNum rhs = G.gauss_direct(i, m, c) * G.gauss_direct(i, m, d) * E.zeta_n(2 * i * sym);
          if (lhs != rhs) prod.fail({{"c", poly::to_string(c)}, {"c'", poly::to_string(d)}, {"m", poly::to_string(m)}, {"i", i}});
        }
    }
  prod.details = {{"pairs", pairs}};
  if (pairs == 0) prod.fail({{"reason", "no coprime pair sampled"}});

  // g(p, p^2) = |p| g_2(1, p), directly at degree 1 and through the prime
  // power route at degree 2.
  Report sq = base_report(ctx, "prop31_square_modulus");
  int primes = 0;
  for (int deg = 1; deg <= 2; ++deg)
    for (const PolyFq& p : monic_irreducibles(F, deg)) {
      ++primes;
      const CycNum rhs = G.gauss_prime(2 % n, p) * Rational(std::int64_t(norm(F, p)));
      const CycNum lhs = deg == 1 ? G.gauss_direct(1, p, poly::mul(F, p, p))
                                  : G.gauss_prime_power(1, PolyFq::constant(1), p, 1, 2);
      if (lhs != rhs) sq.fail({{"prime", poly::to_string(p)}});
    }
  sq.details = {{"primes", primes}};
  return {unit, prod, sq};
}

// Linear polynomials t + c coprime to every entry of `avoid`.
std::vector<PolyFq> coprime_linears(const FqConfig& F, const std::vector<PolyFq>& avoid, std::size_t count) {
  std::vector<PolyFq> out;
  for (FqElem c = 1; c < F.q() && out.size() < count; ++c) {
    PolyFq l = linear(c);
    bool ok = true;
    for (const PolyFq& a : avoid)
      if (!poly::gcd(F, l, a).is_one()) ok = false;
    if (ok) out.push_back(l);
  }
  return out;
}

std::vector<std::pair<PolyFq, PolyFq>> m_pairs(SuiteContext& ctx, const PolyFq& p) {
  auto l = coprime_linears(ctx.fq(), {p, ctx.prime_t()}, 2);
  std::vector<std::pair<PolyFq, PolyFq>> out{{PolyFq::constant(1), PolyFq::constant(1)}};
  if (l.size() == 2) out.emplace_back(l[0], l[1]);
  return out;
}

template <class Check>
std::vector<Report> lemma3x(SuiteContext& ctx, Check check) {
  std::vector<Report> out;
  SeriesEngine& S = ctx.series();
  for (const PolyFq& p : {ctx.prime_t(), ctx.prime_quadratic()})
    for (const auto& [m1, m2] : m_pairs(ctx, p))
      for (int i = 0; i < ctx.config().n; ++i) out.push_back(check(S, p, m1, m2, i, ctx.config().trunc));
  return out;
}

std::vector<Report> lemma32(SuiteContext& ctx) {
  std::vector<Report> out = lemma3x(ctx, check_lemma32);
  const int n = ctx.config().n;
  const std::vector<PolyFq> primes{ctx.prime_t(), ctx.prime_partner()};
  const PolyFq m2 = coprime_linears(ctx.fq(), primes, 1).at(0);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      out.push_back(check_lemma32_subsets(ctx.series(), primes, {a, b}, m2, ctx.config().trunc));
  return out;
}

std::vector<Report> eq3(SuiteContext& ctx) {
  std::vector<Report> out;
  for (const PolyFq& p : {ctx.prime_t(), ctx.prime_quadratic()})
    for (int l = 0; l <= ctx.config().n; ++l) out.push_back(check_eq3(ctx.series(), p, l, ctx.config().trunc));
  return out;
}

std::vector<Report> eq13(SuiteContext& ctx) {
  const PolyFq &a = ctx.prime_t(), &b = ctx.prime_partner(), &c = ctx.prime_quadratic();
  std::vector<std::vector<std::pair<PolyFq, int>>> cases{
      {{a, 1}, {b, 1}}, {{a, 2}, {b, 1}}, {{b, 2}, {a, 1}}, {{a, 1}, {c, 1}}};
  std::vector<Report> out;
  for (const auto& m : cases) out.push_back(check_eq13(ctx.series(), m, ctx.config().trunc, true));
  return out;
}

Report fit_report(SuiteContext& ctx) {
  Report r = base_report(ctx, "fit_T", ctx.config().trunc);
  const TransitionFit& f = ctx.fit();
  r.details = f.to_json();
  if (!f.matrix)
    r.fail({{"reason", "transition matrix not determined"}, {"diagnostics", f.outcome.diagnostics}});
  else if (!depends_only_on_2i_minus_j(*f.matrix))
    r.fail({{"reason", "entries do not depend on 2i - j alone"}});
  return r;
}

// Runs `check` on every m with results merged in input order.
std::vector<Report> parallel_reports(const std::vector<PolyFq>& ms, int workers,
                                     const std::function<Report(const PolyFq&)>& check) {
  std::vector<Report> out(ms.size());
  const int W = std::max(1, std::min<int>(workers, int(ms.size())));
  std::vector<std::thread> pool;
  for (int w = 0; w < W; ++w)
    pool.emplace_back([&, w] {
      for (std::size_t k = std::size_t(w); k < ms.size(); k += std::size_t(W)) out[k] = check(ms[k]);
    });
  for (auto& t : pool) t.join();
  return out;
}

std::vector<Report> feD(SuiteContext& ctx) {
  std::vector<Report> out{fit_report(ctx)};
  const TransitionFit& f = ctx.fit();
  if (!f.matrix) return out;
  SeriesEngine& S = ctx.series();
  const RunConfig& cfg = ctx.config();
  const int d = cfg.fit_deg + 1;
  std::vector<PolyFq> held_out;
  for (PolyFq m : enumerate_monic(ctx.fq(), d)) held_out.push_back(m);
  auto reports = parallel_reports(held_out, cfg.workers,
                                  [&](const PolyFq& m) { return verify_feD(S, m, *f.matrix, cfg.trunc); });
  Report sum = base_report(ctx, "feD_held_out", cfg.trunc);
  int passed = 0;
  for (const Report& r : reports) {
    if (r.passed)
      ++passed;
    else
      sum.fail(r.first_mismatch);
  }
  sum.details = {{"degree", d}, {"count", held_out.size()}, {"passed", passed}};
  out.push_back(std::move(sum));
  FitOptions opt{cfg.trunc, -1, cfg.fit_bounds, cfg.fit_max};
  out.push_back(check_transition_structure(S, *f.matrix, ctx.training(),
                                           sample_monic(ctx.fq(), d, cfg.fit_count, cfg.seed + 1), opt));
  return out;
}

std::vector<Report> feE(SuiteContext& ctx) {
  std::vector<Report> out{fit_report(ctx)};
  const TransitionFit& f = ctx.fit();
  if (!f.matrix) return out;
  const FqConfig& F = ctx.fq();
  for (const char* m : {"1", "t", "t^2 + t"}) out.push_back(verify_feE(ctx.series(), poly::parse(F, m), *f.matrix, ctx.config().trunc));
  return out;
}

std::vector<Report> feZ(SuiteContext& ctx) {
  std::vector<Report> out{fit_report(ctx)};
  const TransitionFit& f = ctx.fit();
  if (!f.matrix) return out;
  const int T = ctx.config().trunc, mz = std::min(3, T - 2);
  out.push_back(verify_feZ(ctx.series(), *f.matrix, ctx.grid(), mz, T));
  out.push_back(check_eq18(ctx.series(), ctx.grid(), mz, T));
  return out;
}

}  // namespace

std::vector<Report> run_suite(SuiteContext& ctx, const std::string& suite,
                              const std::function<void(const std::string&)>& log) {
  if (log) log("suite " + suite);
  if (suite == "relations") return relations(ctx);
  if (suite == "invariance") return invariance(ctx);
  if (suite == "lemma21") return piece_lemma(ctx, "lemma21", hpl_identity_sides);
  if (suite == "lemma22") return piece_lemma(ctx, "lemma22", fpl_identity_sides);
  if (suite == "prop31") return prop31(ctx);
  if (suite == "lemma32") return lemma32(ctx);
  if (suite == "lemma33") return lemma3x(ctx, check_lemma33);
  if (suite == "eq3") return eq3(ctx);
  if (suite == "eq13") return eq13(ctx);
  if (suite == "feD") return feD(ctx);
  if (suite == "feE") return feE(ctx);
  if (suite == "feZ") return feZ(ctx);
  throw ConfigError("unknown suite '" + suite + "'");
}

nlohmann::json verify(const RunConfig& cfg, const std::string& suite,
                      const std::function<void(const std::string&)>& log) {
  std::vector<std::string> names;
  if (suite == "all")
    names = suite_names();
  else if (std::find(suite_names().begin(), suite_names().end(), suite) != suite_names().end())
    names = {suite};
  else
    throw ConfigError("unknown suite '" + suite + "'");
  SuiteContext ctx(cfg);
  nlohmann::json suites = nlohmann::json::array();
  bool all_pass = true;
  for (const std::string& name : names) {
    nlohmann::json reports = nlohmann::json::array();
    bool pass = true;
    for (const Report& r : run_suite(ctx, name, log)) {
      pass = pass && r.passed;
      reports.push_back(r.to_json());
    }
    all_pass = all_pass && pass;
    suites.push_back({{"suite", name}, {"status", pass ? "pass" : "fail"}, {"reports", reports}});
  }
  return {{"tool", {{"name", "wmds"}, {"version", version_string()}}},
          {"config_hash", cfg.hash()},
          {"run_config", cfg.to_json()},
          {"suite", suite},
          {"suites", suites},
          {"status", all_pass ? "pass" : "fail"}};
}

}  // namespace wmds
