#include "wmds/hcoeff.hpp"

#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace wmds {

CycNum PPartTable::at(int k, int l) const {
  if (k < 0 || l < 0 || k > 2 || l > 2) return CycNum::zero(*entries[0][0].field());
  return entries[std::size_t(k)][std::size_t(l)];
}

bool operator==(const PPartTable& a, const PPartTable& b) {
  return a.prime == b.prime && a.entries == b.entries;
}

namespace {

PPartTable table_from(const PolyFq& p, const CycNum& g1, const CycNum& gpp) {
  const CycField& K = *g1.field();
  PPartTable t;
  t.prime = p;
  for (auto& row : t.entries) row.fill(CycNum::zero(K));
  t.entries[0][0] = CycNum::one(K);
  t.entries[1][0] = g1;
  t.entries[0][1] = g1;
  t.entries[1][2] = g1 * gpp;
  t.entries[2][1] = g1 * gpp;
  t.entries[2][2] = g1 * g1 * gpp;
  return t;
}

// g(p, p^2) is summed literally while |p|^2 stays below this.
constexpr std::uint64_t kDirectPPLimit = 10000;

}  // namespace

HCoeff::HCoeff(GaussEngine& G) : G_(&G) {}

PPartTable HCoeff::ppart_from_gauss(const PolyFq& p) {
  const FqConfig& F = fq();
  const PolyFq one = PolyFq::constant(1);
  CycNum g1 = G_->gauss(1, one, p);
  PolyFq p2 = poly::mul(F, p, p);
  std::uint64_t N = norm(F, p);
  CycNum gpp = N * N <= kDirectPPLimit ? G_->gauss_direct(1, p, p2) : G_->gauss(1, p, p2);
  return table_from(p, g1, gpp);
}

PPartTable HCoeff::ppart_from_n(const PolyFq& p) {
  const FqConfig& F = fq();
  CycNum g1 = G_->gauss_prime(1, p);
  CycNum pg2 = G_->gauss_prime(2, p) * Rational(std::int64_t(norm(F, p)));
  return table_from(p, g1, pg2);
}

const PPartTable& HCoeff::ppart(const PolyFq& p) {
  {
    std::shared_lock lock(mu_);
    auto it = pparts_.find(p);
    if (it != pparts_.end()) return it->second;
  }
  if (!p.is_monic() || !is_irreducible(fq(), p)) throw std::domain_error("ppart: expected a monic irreducible");
  PPartTable a = ppart_from_gauss(p);
  PPartTable b = ppart_from_n(p);
  if (!(a == b)) throw std::logic_error("ppart: the two constructions disagree at " + poly::to_string(p));
  std::unique_lock lock(mu_);
  return pparts_.emplace(p, std::move(a)).first->second;
}

std::vector<HBlock> HCoeff::blocks(const PolyFq& c1, const PolyFq& c2) {
  std::map<PolyFq, std::pair<int, int>> m;
  for (const auto& [p, e] : G_->factorization(c1).factors) m[p].first = e;
  for (const auto& [p, e] : G_->factorization(c2).factors) m[p].second = e;
  std::vector<HBlock> out;
  for (auto& [p, kl] : m) out.push_back({p, kl.first, kl.second});
  return out;
}

namespace {

int sym_or_throw(const GaussEngine& G, const PolyFq& x, const PolyFq& c) {
  int s = G.symbol(x, c);
  if (s < 0) throw std::invalid_argument("combine: blocks are not coprime");
  return s;
}

}  // namespace

CycNum HCoeff::combine(const std::vector<HBlock>& blocks) {
  const FqConfig& F = fq();
  const CycField& K = field();
  CycNum v = CycNum::one(K);
  PolyFq C = PolyFq::constant(1), D = PolyFq::constant(1);
  std::int64_t e = 0;
  for (const HBlock& b : blocks) {
    if (b.k > 2 || b.l > 2) return CycNum::zero(K);
    CycNum h = ppart(b.prime).at(b.k, b.l);
    if (h.is_zero()) return h;
    v *= h;
    PolyFq c1 = poly::pow(F, b.prime, unsigned(b.k));
    PolyFq d1 = poly::pow(F, b.prime, unsigned(b.l));
    e += 2 * sym_or_throw(*G_, C, c1) + 2 * sym_or_throw(*G_, D, d1) - sym_or_throw(*G_, C, d1) -
         sym_or_throw(*G_, c1, D);
    C = poly::mul(F, C, c1);
    D = poly::mul(F, D, d1);
  }
  return v.mul_zeta(G_->embedding().mu_exponent(e));
}

CycNum HCoeff::combine_symmetric(const std::vector<HBlock>& blocks) {
  const FqConfig& F = fq();
  const CycField& K = field();
  CycNum v = CycNum::one(K);
  PolyFq C1 = PolyFq::constant(1), C2 = PolyFq::constant(1);
  std::int64_t e = 0;
  for (const HBlock& b : blocks) {
    if (b.k > 2 || b.l > 2) return CycNum::zero(K);
    CycNum h = ppart(b.prime).at(b.k, b.l);
    if (h.is_zero()) return h;
    v *= h;
    PolyFq D1 = poly::pow(F, b.prime, unsigned(b.k));
    PolyFq D2 = poly::pow(F, b.prime, unsigned(b.l));
    e += sym_or_throw(*G_, C1, D1) + sym_or_throw(*G_, D1, C1) + sym_or_throw(*G_, C2, D2) +
         sym_or_throw(*G_, D2, C2) - sym_or_throw(*G_, C1, D2) - sym_or_throw(*G_, D1, C2);
    C1 = poly::mul(F, C1, D1);
    C2 = poly::mul(F, C2, D2);
  }
  return v.mul_zeta(G_->embedding().mu_exponent(e));
}

CycNum HCoeff::H(const PolyFq& c1, const PolyFq& c2) {
  if (!c1.is_monic() || !c2.is_monic()) throw std::domain_error("H: arguments must be monic");
  auto key = std::make_pair(c1, c2);
  {
    std::shared_lock lock(mu_);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
  }
  CycNum v = combine(blocks(c1, c2));
  if (c1.degree() + c2.degree() <= 6) {
    std::unique_lock lock(mu_);
    memo_.emplace(std::move(key), v);
  }
  return v;
}

std::vector<std::vector<CycNum>> HGrid::refined(int i, int j) const {
  std::vector<std::vector<CycNum>> out(entry.size());
  for (int a = 0; a <= D1; ++a)
    for (int b = 0; b <= D2; ++b)
      if (a % n == i && b % n == j) {
        out[std::size_t(a)].resize(std::size_t(D2) + 1);
        out[std::size_t(a)][std::size_t(b)] = entry[std::size_t(a)][std::size_t(b)];
      }
  return out;
}

nlohmann::json HGrid::to_json() const {
  nlohmann::json cells = nlohmann::json::array();
  for (int a = 0; a <= D1; ++a)
    for (int b = 0; b <= D2; ++b) {
      const CycNum& v = entry[std::size_t(a)][std::size_t(b)];
      auto z = v.to_complex();
      cells.push_back({{"deg_c1", a}, {"deg_c2", b}, {"value", v.to_json()}, {"approx", {z.real(), z.imag()}}});
    }
  return {{"D1", D1}, {"D2", D2}, {"n", n}, {"entries", cells}};
}

HGrid HGrid::from_json(const nlohmann::json& j) {
  HGrid g;
  g.D1 = j.at("D1").get<int>();
  g.D2 = j.at("D2").get<int>();
  g.n = j.at("n").get<int>();
  if (g.D1 < 0 || g.D2 < 0) throw std::invalid_argument("HGrid::from_json: negative dimension");
  g.entry.assign(std::size_t(g.D1 + 1), std::vector<CycNum>(std::size_t(g.D2 + 1)));
  std::vector<std::vector<bool>> seen(std::size_t(g.D1 + 1), std::vector<bool>(std::size_t(g.D2 + 1)));
  for (const auto& c : j.at("entries")) {
    const int a = c.at("deg_c1").get<int>(), b = c.at("deg_c2").get<int>();
    if (a < 0 || a > g.D1 || b < 0 || b > g.D2 || seen[std::size_t(a)][std::size_t(b)])
      throw std::invalid_argument("HGrid::from_json: bad or repeated cell");
    seen[std::size_t(a)][std::size_t(b)] = true;
    g.entry[std::size_t(a)][std::size_t(b)] = CycNum::from_json(c.at("value"));
  }
  for (const auto& row : seen)
    for (bool s : row)
      if (!s) throw std::invalid_argument("HGrid::from_json: missing cell");
  return g;
}

std::string HGrid::to_csv() const {
  std::string out = "deg_c1,deg_c2,re,im,exact\n";
  char buf[64];
  for (int a = 0; a <= D1; ++a)
    for (int b = 0; b <= D2; ++b) {
      const CycNum& v = entry[std::size_t(a)][std::size_t(b)];
      auto z = v.to_complex();
      std::snprintf(buf, sizeof buf, "%.17g,%.17g", z.real(), z.imag());
      out += std::to_string(a) + "," + std::to_string(b) + "," + buf + ",\"" + v.str() + "\"\n";
    }
  return out;
}

namespace {

struct RowContext {
  HCoeff* H;
  const SquarefreeGaussTable* S;
  const std::map<PolyFq, PrimeSymbolTable>* tables;
  int D1;
  int phi;
};

void accumulate_row(const RowContext& ctx, int b, const PolyFq& m, std::vector<__int128>& cells) {
  HCoeff& H = *ctx.H;
  GaussEngine& G = H.engine();
  const FqConfig& F = H.fq();
  const int phi = ctx.phi;
  const int D2p = int(cells.size() / std::size_t(phi)) / (ctx.D1 + 1);

  std::vector<HBlock> mb = H.blocks(PolyFq::constant(1), m);
  for (const HBlock& x : mb)
    if (x.l > 2) return;

  std::vector<PrimeSymbolTable> local;
  std::vector<const PrimeSymbolTable*> tabs;
  local.reserve(mb.size());
  for (const HBlock& x : mb) {
    auto it = ctx.tables->find(x.prime);
    if (it != ctx.tables->end()) {
      tabs.push_back(&it->second);
    } else {
      local.emplace_back(F, x.prime, ctx.D1);
      tabs.push_back(&local.back());
    }
  }

  // d1 ranges over prod p_j^k_j with (k_j, l_j) in the support.
  std::vector<TwistedDivisor> divs;
  std::vector<int> k(mb.size(), 0);
  std::vector<std::int64_t> iv;
  for (;;) {
    int deg = 0;
    bool ok = true;
    for (std::size_t j = 0; j < mb.size(); ++j) {
      deg += k[j] * mb[j].prime.degree();
      if (H.ppart(mb[j].prime).at(k[j], mb[j].l).is_zero()) ok = false;
    }
    if (ok && deg <= ctx.D1) {
      std::vector<HBlock> blk = mb;
      for (std::size_t j = 0; j < mb.size(); ++j) blk[j].k = k[j];
      CycNum v = H.combine(blk);
      if (!v.is_zero()) {
        if (!v.to_ints(iv)) throw std::overflow_error("h_grid: H value is not integral");
        std::vector<int> coef(mb.size());
        for (std::size_t j = 0; j < mb.size(); ++j) coef[j] = 2 * k[j] - mb[j].l;
        divs.push_back({deg, coef, iv});
      }
    }
    std::size_t j = 0;
    while (j < k.size() && ++k[j] > 2) k[j++] = 0;
    if (j == k.size()) break;
  }

  // Row b occupies the cells (a, b) for a <= D1, which are D2p apart.
  std::vector<__int128> row(std::size_t(ctx.D1 + 1) * std::size_t(phi), 0);
  twisted_row(F, G.embedding(), *ctx.S, tabs, divs, ctx.D1, row.data());
  for (int a = 0; a <= ctx.D1; ++a) {
    __int128* cell = cells.data() + (std::size_t(a) * std::size_t(D2p) + std::size_t(b)) * std::size_t(phi);
    for (int t = 0; t < phi; ++t) cell[t] += row[std::size_t(a) * std::size_t(phi) + std::size_t(t)];
  }
}

}  // namespace

HGrid h_grid(HCoeff& H, int D1, int D2, int workers) {
  if (D1 < 0 || D2 < 0) throw std::invalid_argument("h_grid: negative degree");
  GaussEngine& G = H.engine();
  const FqConfig& F = H.fq();
  const CycField& K = H.field();
  const int phi = K.phi();
  workers = std::max(workers, 1);

  SquarefreeGaussTable S(G, D1, workers);
  std::map<PolyFq, PrimeSymbolTable> tables;
  for (int d = 1; d <= std::min(D2, 3); ++d)
    for (const PolyFq& p : monic_irreducibles(F, d)) {
      tables.emplace(p, PrimeSymbolTable(F, p, D1));
      H.ppart(p);
    }

  std::vector<std::pair<int, std::uint64_t>> rows;
  for (int b = 0; b <= D2; ++b)
    for (std::uint64_t code = 0; code < ipow(F.q(), unsigned(b)); ++code) rows.emplace_back(b, code);

  RowContext ctx{&H, &S, &tables, D1, phi};
  const std::size_t ncells = std::size_t(D1 + 1) * std::size_t(D2 + 1) * std::size_t(phi);
  std::vector<std::vector<__int128>> partial(std::size_t(workers), std::vector<__int128>(ncells, 0));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t r = std::size_t(w); r < rows.size(); r += std::size_t(workers))
          accumulate_row(ctx, rows[r].first, monic_from_code(F, rows[r].first, rows[r].second), partial[std::size_t(w)]);
      } catch (...) {
        errors[std::size_t(w)] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  std::vector<__int128> total(ncells, 0);
  for (const auto& p : partial)
    for (std::size_t i = 0; i < ncells; ++i) total[i] += p[i];

  HGrid g;
  g.D1 = D1;
  g.D2 = D2;
  g.n = F.n();
  g.entry.assign(std::size_t(D1) + 1, std::vector<CycNum>(std::size_t(D2) + 1));
  for (int a = 0; a <= D1; ++a)
    for (int b = 0; b <= D2; ++b)
      g.entry[std::size_t(a)][std::size_t(b)] =
          cyc_from_wide(K, total.data() + (std::size_t(a) * std::size_t(D2 + 1) + std::size_t(b)) * std::size_t(phi));
  return g;
}

HGrid h_grid_naive(HCoeff& H, int D1, int D2) {
  const FqConfig& F = H.fq();
  HGrid g;
  g.D1 = D1;
  g.D2 = D2;
  g.n = F.n();
  g.entry.assign(std::size_t(D1) + 1, std::vector<CycNum>(std::size_t(D2) + 1, CycNum::zero(H.field())));
  for (int a = 0; a <= D1; ++a)
    for (const PolyFq& c1 : enumerate_monic(F, a))
      for (int b = 0; b <= D2; ++b)
        for (const PolyFq& c2 : enumerate_monic(F, b))
          g.entry[std::size_t(a)][std::size_t(b)] += H.combine(H.blocks(c1, c2));
  return g;
}

}  // namespace wmds
