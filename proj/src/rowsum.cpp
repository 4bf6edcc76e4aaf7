#include "wmds/rowsum.hpp"

#include <algorithm>
#include <stdexcept>
#include <thread>

namespace wmds {

namespace {

// a * b mod p for coefficient vectors of length k = deg p, p monic.
void mulmod_small(const FqConfig& F, const std::vector<FqElem>& a, const std::vector<FqElem>& b,
                  const PolyFq& p, std::vector<FqElem>& out, std::vector<std::uint64_t>& buf) {
  const std::size_t k = a.size();
  const std::uint64_t q = F.q();
  buf.assign(2 * k, 0);
  for (std::size_t i = 0; i < k; ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < k; ++j) buf[i + j] += std::uint64_t(a[i]) * b[j];
  }
  for (std::size_t d = 2 * k; d-- > k;) {
    std::uint64_t c = buf[d] % q;
    if (c == 0) continue;
    // t^d = t^(d-k) t^k and t^k = -sum p_j t^j.
    for (std::size_t j = 0; j < k; ++j) buf[d - k + j] += c * (q - p[int(j)]);
  }
  out.resize(k);
  for (std::size_t i = 0; i < k; ++i) out[i] = FqElem(buf[i] % q);
}

}  // namespace

PrimeSymbolTable::PrimeSymbolTable(const FqConfig& F, const PolyFq& p, int max_degree)
    : p_(p), deg_(p.degree()) {
  if (!p.is_monic() || deg_ < 1) throw std::invalid_argument("PrimeSymbolTable: expected a monic prime");
  const std::uint64_t q = F.q();
  const std::uint64_t N = ipow(q, unsigned(deg_));
  const int n = F.n();
  PolyFq gamma = primitive_residue(F, p);
  auto sg = symbol_index_euler(F, gamma, p);
  std::vector<FqElem> g(std::size_t(deg_), 0);
  for (int j = 0; j <= gamma.degree(); ++j) g[std::size_t(j)] = gamma[j];
  std::vector<std::uint64_t> buf;
  // Column j of the matrix of y -> gamma y is gamma t^j mod p.
  const std::size_t k = std::size_t(deg_);
  std::vector<std::uint32_t> A(k * k);
  {
    std::vector<FqElem> col = g, t(k, 0);
    if (k > 1) t[1] = 1; else t[0] = F.neg(p[0]);
    for (std::size_t j = 0; j < k; ++j) {
      for (std::size_t l = 0; l < k; ++l) A[l * k + j] = col[l];
      mulmod_small(F, col, t, p, col, buf);
    }
  }
  std::vector<std::uint32_t> yv(k, 0), yn(k);
  yv[0] = 1;
  sym_.assign(N, -1);
  const auto qq = std::uint32_t(q);
  std::uint64_t s = 0;
  const std::uint64_t step = std::uint64_t(*sg) % std::uint64_t(n);
  for (std::uint64_t e = 0; e + 1 < N; ++e) {
    std::uint64_t code = 0;
    for (std::size_t j = k; j-- > 0;) code = code * q + yv[j];
    sym_[code] = std::int8_t(s);
    s += step;
    if (s >= std::uint64_t(n)) s -= std::uint64_t(n);
    for (std::size_t l = 0; l < k; ++l) {
      std::uint32_t acc = 0;
      const std::uint32_t* row = A.data() + l * k;
      for (std::size_t j = 0; j < k; ++j) acc += row[j] * yv[j];
      yn[l] = acc % qq;
    }
    yv.swap(yn);
  }
  if (yv[0] != 1 || std::any_of(yv.begin() + 1, yv.end(), [](std::uint32_t c) { return c != 0; }))
    throw std::logic_error("PrimeSymbolTable: generator order mismatch");

  tpow_.resize(std::size_t(std::max(max_degree, 0)) + 1);
  std::vector<FqElem> t(std::size_t(deg_), 0), cur(std::size_t(deg_), 0);
  cur[0] = 1;
  if (deg_ > 1) {
    t[1] = 1;
  } else {
    t[0] = F.neg(p[0]);
  }
  for (std::size_t j = 0; j < tpow_.size(); ++j) {
    tpow_[j] = cur;
    mulmod_small(F, cur, t, p, cur, buf);
  }
}

SquarefreeGaussTable::SquarefreeGaussTable(GaussEngine& G, int max_degree, int workers)
    : T_(max_degree), phi_(G.field().phi()) {
  if (max_degree < 0) throw std::invalid_argument("SquarefreeGaussTable: negative degree");
  const FqConfig& F = G.fq();
  levels_.resize(std::size_t(T_) + 1);
  workers = std::max(workers, 1);
  for (int a = 0; a <= T_; ++a) {
    const std::uint64_t N = ipow(F.q(), unsigned(a));
    Level& L = levels_[std::size_t(a)];
    L.coords.assign(N * std::uint64_t(phi_), 0);
    L.nz.assign(N, 0);
    std::vector<std::thread> pool;
    std::vector<int> overflow(static_cast<std::size_t>(workers), 0);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        std::vector<std::int64_t> iv;
        for (std::uint64_t code = std::uint64_t(w); code < N; code += std::uint64_t(workers)) {
          CycNum v = G.gauss(1, PolyFq::constant(1), monic_from_code(F, a, code));
          if (v.is_zero()) continue;
          if (!v.to_ints(iv)) {
            overflow[std::size_t(w)] = 1;
            continue;
          }
          for (int j = 0; j < phi_; ++j) {
            if (iv[std::size_t(j)] > INT32_MAX || iv[std::size_t(j)] < INT32_MIN) overflow[std::size_t(w)] = 1;
            L.coords[code * std::uint64_t(phi_) + std::uint64_t(j)] = std::int32_t(iv[std::size_t(j)]);
          }
          L.nz[code] = 1;
        }
      });
    }
    for (auto& th : pool) th.join();
    for (int o : overflow)
      if (o) throw std::overflow_error("SquarefreeGaussTable: coordinates exceed 32 bits");
  }
}

std::vector<std::int64_t> bucket_sums(const FqConfig& F, const SquarefreeGaussTable& S, int a,
                                      const std::vector<const PrimeSymbolTable*>& primes) {
  const int n = F.n();
  const int phi = S.phi();
  const std::size_t w = primes.size();
  std::size_t nb = 1;
  for (std::size_t j = 0; j < w; ++j) nb *= std::size_t(n);
  std::vector<std::int64_t> acc(nb * std::size_t(phi), 0);
  if (a > S.max_degree()) throw std::invalid_argument("bucket_sums: degree beyond table");
  for (const auto* P : primes)
    if (P->max_degree() < a) throw std::invalid_argument("bucket_sums: prime table too short");

  auto add = [&](std::size_t bucket, std::uint64_t code) {
    const std::int32_t* v = S.value(a, code);
    std::int64_t* dst = acc.data() + bucket * std::size_t(phi);
    for (int j = 0; j < phi; ++j) dst[j] += v[j];
  };

  if (a == 0) {
    std::size_t bucket = 0, stride = 1;
    for (const auto* P : primes) {
      bucket += std::size_t(P->at(1)) * stride;
      stride *= std::size_t(n);
    }
    add(bucket, 0);
    return acc;
  }

  const std::uint32_t q = F.q();
  const std::uint64_t highs = ipow(q, unsigned(a - 1));
  std::vector<int> digits(std::size_t(a), 0);
  // Per prime: residue of the high part, its code without lane 0, and lane 0.
  std::vector<std::vector<std::uint32_t>> res(w);
  std::vector<std::uint64_t> base(w);
  std::vector<std::uint32_t> lane0(w);
  std::vector<const std::int8_t*> tab(w);
  std::vector<std::size_t> stride(w);
  for (std::size_t j = 0; j < w; ++j) {
    res[j].assign(std::size_t(primes[j]->degree()), 0);
    tab[j] = primes[j]->table().data();
    stride[j] = j == 0 ? 1 : stride[j - 1] * std::size_t(n);
  }

  for (std::uint64_t h = 0; h < highs; ++h) {
    std::uint64_t hh = h;
    for (int i = 1; i < a; ++i, hh /= q) digits[std::size_t(i)] = int(hh % q);
    for (std::size_t j = 0; j < w; ++j) {
      const PrimeSymbolTable& P = *primes[j];
      const int k = P.degree();
      auto& r = res[j];
      const auto& top = P.tpow(a);
      for (int l = 0; l < k; ++l) r[std::size_t(l)] = top[std::size_t(l)];
      for (int i = 1; i < a; ++i) {
        const std::uint32_t c = std::uint32_t(digits[std::size_t(i)]);
        if (c == 0) continue;
        const auto& ti = P.tpow(i);
        for (int l = 0; l < k; ++l) r[std::size_t(l)] += c * ti[std::size_t(l)];
      }
      std::uint64_t code = 0;
      for (int l = k - 1; l >= 1; --l) code = code * q + r[std::size_t(l)] % q;
      base[j] = code * q;
      lane0[j] = r[0] % q;
    }
    const std::uint64_t code0 = h * q;
    for (std::uint32_t c0 = 0; c0 < q; ++c0) {
      const std::uint64_t code = code0 + c0;
      if (!S.nonzero(a, code)) continue;
      std::size_t bucket = 0;
      bool coprime = true;
      for (std::size_t j = 0; j < w; ++j) {
        std::uint32_t l0 = lane0[j] + c0;
        if (l0 >= q) l0 -= q;
        const int s = tab[j][base[j] + l0];
        if (s < 0) {
          coprime = false;
          break;
        }
        bucket += std::size_t(s) * stride[j];
      }
      if (coprime) add(bucket, code);
    }
  }
  return acc;
}

void twisted_row(const FqConfig& F, const RootEmbedding& E, const SquarefreeGaussTable& S,
                 const std::vector<const PrimeSymbolTable*>& primes, const std::vector<TwistedDivisor>& divs,
                 int max_degree, __int128* out) {
  if (divs.empty()) return;
  const CycField& K = E.field();
  const int n = F.n();
  const int phi = K.phi();
  std::size_t nb = 1;
  for (std::size_t j = 0; j < primes.size(); ++j) nb *= std::size_t(n);
  int min_deg = max_degree + 1;
  for (const auto& d : divs) {
    if (d.coef.size() != primes.size()) throw std::invalid_argument("twisted_row: coefficient count mismatch");
    min_deg = std::min(min_deg, d.degree);
  }

  std::vector<std::int64_t> cls(static_cast<std::size_t>(n * phi)), rot(static_cast<std::size_t>(phi)),
      sum(static_cast<std::size_t>(phi));
  for (int a = 0; a + min_deg <= max_degree; ++a) {
    std::vector<std::int64_t> buckets = bucket_sums(F, S, a, primes);
    for (const auto& d : divs) {
      if (d.degree + a > max_degree) continue;
      std::fill(cls.begin(), cls.end(), 0);
      for (std::size_t bk = 0; bk < nb; ++bk) {
        std::size_t r = bk;
        std::int64_t c = 0;
        for (std::size_t j = 0; j < primes.size(); ++j, r /= std::size_t(n))
          c += std::int64_t(d.coef[j]) * std::int64_t(r % std::size_t(n));
        c = ((c % n) + n) % n;
        const std::int64_t* src = buckets.data() + bk * std::size_t(phi);
        std::int64_t* dst = cls.data() + std::size_t(c) * std::size_t(phi);
        for (int t = 0; t < phi; ++t) dst[t] += src[t];
      }
      std::fill(sum.begin(), sum.end(), 0);
      for (int c = 0; c < n; ++c) {
        K.mul_zeta_int(cls.data() + std::size_t(c * phi), E.mu_exponent(c), rot.data());
        for (int t = 0; t < phi; ++t) sum[std::size_t(t)] += rot[std::size_t(t)];
      }
      mul_add_wide(K, d.value.data(), sum.data(), out + std::size_t(d.degree + a) * std::size_t(phi));
    }
  }
}

CycNum cyc_from_wide(const CycField& K, const __int128* coords) {
  std::vector<Rational> c;
  c.reserve(std::size_t(K.phi()));
  for (int j = 0; j < K.phi(); ++j) {
    __int128 v = coords[j];
    if (v >= INT64_MIN && v <= INT64_MAX) {
      c.emplace_back(std::int64_t(v));
      continue;
    }
    const bool neg = v < 0;
    unsigned __int128 u = neg ? (unsigned __int128)(-(v + 1)) + 1 : (unsigned __int128)v;
    mpz_class hi(static_cast<unsigned long>(std::uint64_t(u >> 64)));
    mpz_class lo(static_cast<unsigned long>(std::uint64_t(u)));
    mpz_class z = (hi << 64) + lo;
    if (neg) z = -z;
    c.emplace_back(z);
  }
  return CycNum::from_coeffs(K, std::move(c));
}

void mul_add_wide(const CycField& K, const std::int64_t* a, const std::int64_t* b, __int128* out) {
  const int phi = K.phi();
  std::vector<__int128> prod(std::size_t(2 * phi - 1), 0);
  for (int i = 0; i < phi; ++i) {
    if (a[i] == 0) continue;
    for (int j = 0; j < phi; ++j) prod[std::size_t(i + j)] += (__int128)a[i] * b[j];
  }
  for (int k = 0; k < 2 * phi - 1; ++k) {
    if (prod[std::size_t(k)] == 0) continue;
    const auto& row = K.power(k);
    for (int j = 0; j < phi; ++j)
      if (row[std::size_t(j)] != 0) out[j] += prod[std::size_t(k)] * row[std::size_t(j)];
  }
}

}  // namespace wmds
