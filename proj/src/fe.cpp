#include "wmds/fe.hpp"

#include <random>
#include <set>
#include <stdexcept>

namespace wmds {

int transition_slot(int i, int j, int n) { return ((2 * i - j) % n + n) % n; }

nlohmann::json TransitionFit::to_json() const {
  nlohmann::json j{{"instances", instances},
                   {"columns", columns},
                   {"bounds", {outcome.bounds.num, outcome.bounds.den}},
                   {"nullity", outcome.nullity},
                   {"equations", outcome.equations}};
  if (!outcome.diagnostics.empty()) j["diagnostics"] = outcome.diagnostics;
  j["matrix"] = matrix ? matrix->to_json() : nlohmann::json(nullptr);
  return j;
}

namespace {

int shift_for(const SeriesEngine& S, const FitOptions& opt) { return opt.shift < 0 ? S.n() - 1 : opt.shift; }

Rational reflection(const SeriesEngine& S) {
  const std::int64_t q = S.q();
  return Rational(1, q * q);
}

// (q u)^k.
UPoly qu_power(const CycField& K, std::uint32_t q, int k) {
  return UPoly::monomial(K, k, CycNum(K, Rational::pow(Rational(std::int64_t(q)), k)));
}

std::optional<FeInstance> instance(SeriesEngine& S, const PolyFq& m, int trunc, bool joint, std::string& err) {
  const int n = S.n();
  FeInstance x;
  auto lhs = S.D_model(m, -1, trunc);
  if (!lhs) {
    err = "no rational model for D(s, " + poly::to_string(m) + ")";
    return std::nullopt;
  }
  x.lhs = *lhs;
  x.k = m.degree();
  const int j = x.k % n;
  for (int i = 0; i < n; ++i) {
    auto mi = S.D_model(m, i, trunc);
    if (!mi) {
      err = "no rational model for D(s, " + poly::to_string(m) + "; " + std::to_string(i) + ")";
      return std::nullopt;
    }
    x.rhs.push_back(mi->reflected(reflection(S)));
    x.slot.push_back(joint ? transition_slot(i, j, n) : i);
  }
  return x;
}

FitOutcome fit_with_caps(SeriesEngine& S, const std::vector<FeInstance>& inst, const FitOptions& opt) {
  FitBounds cap = opt.bounds;
  for (;;) {
    FitOutcome out = fit_functional_equation(S.field(), S.q(), inst, S.n(), shift_for(S, opt), {0, 0}, cap);
    if (out.unknowns || out.nullity > 1) return out;
    if (cap.num >= opt.max_bounds.num && cap.den >= opt.max_bounds.den) return out;
    cap = {std::min(cap.num + 1, opt.max_bounds.num), std::min(cap.den + 1, opt.max_bounds.den)};
  }
}

}  // namespace

TransitionFit fit_T(SeriesEngine& S, const std::vector<PolyFq>& training, const FitOptions& opt) {
  const int n = S.n();
  TransitionFit out;
  std::vector<FeInstance> inst;
  std::set<int> cols;
  for (const PolyFq& m : training) {
    std::string err;
    auto x = instance(S, m, opt.truncation, true, err);
    if (!x) {
      out.outcome.diagnostics = err;
      return out;
    }
    inst.push_back(std::move(*x));
    cols.insert(m.degree() % n);
  }
  out.instances = int(inst.size());
  out.columns.assign(cols.begin(), cols.end());
  out.outcome = fit_with_caps(S, inst, opt);
  if (out.outcome.unknowns) {
    TransitionMatrix T;
    T.n = n;
    T.entry.assign(std::size_t(n), std::vector<RationalModel>(std::size_t(n)));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        T.entry[std::size_t(i)][std::size_t(j)] = (*out.outcome.unknowns)[std::size_t(transition_slot(i, j, n))];
    out.matrix = std::move(T);
  }
  return out;
}

FitOutcome fit_T_column(SeriesEngine& S, int j, const std::vector<PolyFq>& training, const FitOptions& opt) {
  const int n = S.n();
  if (j < 0 || j >= n) throw std::invalid_argument("fit_T_column: column out of range");
  std::vector<FeInstance> inst;
  for (const PolyFq& m : training) {
    if (m.degree() % n != j) throw std::invalid_argument("fit_T_column: training degree outside the column");
    std::string err;
    auto x = instance(S, m, opt.truncation, false, err);
    if (!x) {
      FitOutcome bad;
      bad.diagnostics = err;
      return bad;
    }
    inst.push_back(std::move(*x));
  }
  return fit_with_caps(S, inst, opt);
}

bool depends_only_on_2i_minus_j(const TransitionMatrix& T) {
  const int n = T.n;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          if (transition_slot(i, j, n) == transition_slot(a, b, n) &&
              !(T.entry[std::size_t(i)][std::size_t(j)] == T.entry[std::size_t(a)][std::size_t(b)]))
            return false;
  return true;
}

namespace {

Report verify_fe(SeriesEngine& S, const PolyFq& m, const TransitionMatrix& T, int trunc, bool use_E) {
  const CycField& K = S.field();
  const int n = S.n();
  Report r;
  r.identity = use_E ? "feE" : "feD";
  r.configuration = S.configuration();
  r.truncation = trunc;
  r.details = {{"m", poly::to_string(m)}};
  if (T.n != n) throw std::invalid_argument("verify_fe: transition matrix of the wrong size");
  auto model = [&](int i) { return use_E ? S.E_model(m, i, trunc) : S.D_model(m, i, trunc); };
  auto lhs = model(-1);
  if (!lhs) {
    r.fail({{"m", poly::to_string(m)}, {"reason", "no rational model"}});
    return r;
  }
  const int j = m.degree() % n;
  RationalModel rhs{UPoly(K), UPoly::constant(K, CycNum::one(K))};
  for (int i = 0; i < n; ++i) {
    auto mi = model(i);
    if (!mi) {
      r.fail({{"m", poly::to_string(m)}, {"class", i}, {"reason", "no rational model"}});
      return r;
    }
    if (mi->num.is_zero()) continue;
    rhs = rhs + T.entry[std::size_t(i)][std::size_t(j)] * mi->reflected(reflection(S));
  }
  rhs = rhs.times(qu_power(K, S.q(), m.degree()));
  if (!(*lhs == rhs)) {
    UPoly diff = lhs->num * rhs.den - rhs.num * lhs->den;
    int low = 0;
    while (diff.coeff(low).is_zero()) ++low;
    r.fail({{"m", poly::to_string(m)}, {"reason", "rational functions differ"}, {"lowest_degree", low}});
  }
  return r;
}

}  // namespace

Report verify_feD(SeriesEngine& S, const PolyFq& m, const TransitionMatrix& T, int trunc) {
  return verify_fe(S, m, T, trunc, false);
}

Report verify_feE(SeriesEngine& S, const PolyFq& m, const TransitionMatrix& T, int trunc) {
  return verify_fe(S, m, T, trunc, true);
}

Report check_transition_structure(SeriesEngine& S, const TransitionMatrix& joint, const std::vector<PolyFq>& training,
                                  const std::vector<PolyFq>& validation, const FitOptions& opt) {
  const int n = S.n();
  Report r;
  r.identity = "transition_2i_minus_j";
  r.configuration = S.configuration();
  r.truncation = opt.truncation;
  int determined = 0;
  nlohmann::json cols = nlohmann::json::array(), holds = nlohmann::json::array();
  for (int j = 0; j < n; ++j) {
    std::vector<PolyFq> tr;
    for (const PolyFq& m : training)
      if (m.degree() % n == j) tr.push_back(m);
    nlohmann::json c{{"column", j}, {"training", tr.size()}};
    FitOutcome f = tr.empty() ? FitOutcome{} : fit_T_column(S, j, tr, opt);
    if (f.unknowns) {
      ++determined;
      bool same = true;
      for (int i = 0; i < n; ++i)
        if (!((*f.unknowns)[std::size_t(i)] == joint.entry[std::size_t(i)][std::size_t(j)])) same = false;
      c["status"] = same ? "agrees" : "disagrees";
      if (!same) r.fail({{"column", j}});
    } else {
      c["status"] = "underdetermined";
      c["diagnostics"] = tr.empty() ? std::string("no training data") : f.diagnostics;
    }
    cols.push_back(c);
  }
  for (int j0 = 0; j0 < n; ++j0) {
    std::vector<PolyFq> tr;
    for (const PolyFq& m : training)
      if (m.degree() % n != j0) tr.push_back(m);
    nlohmann::json h{{"held_out_column", j0}};
    TransitionFit f = fit_T(S, tr, opt);
    if (f.matrix) {
      ++determined;
      bool same = true;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          if (!(f.matrix->entry[std::size_t(i)][std::size_t(j)] == joint.entry[std::size_t(i)][std::size_t(j)]))
            same = false;
      int ok = 0, bad = 0;
      for (const PolyFq& m : validation)
        if (m.degree() % n == j0) (verify_feD(S, m, *f.matrix, opt.truncation).passed ? ok : bad)++;
      h["status"] = same && bad == 0 ? "agrees" : "disagrees";
      h["validated"] = ok;
      h["failed"] = bad;
      if (!same || bad > 0) r.fail({{"held_out_column", j0}});
    } else {
      h["status"] = "underdetermined";
      h["diagnostics"] = f.outcome.diagnostics;
    }
    holds.push_back(h);
  }
  r.details = {{"column_fits", cols}, {"held_out_fits", holds}, {"determined", determined}};
  if (determined == 0) r.fail({{"reason", "no determined fit"}});
  return r;
}

std::vector<PolyFq> sample_monic(const FqConfig& F, int max_degree, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<PolyFq> out;
  for (int d = 0; d <= max_degree; ++d) {
    const std::uint64_t total = ipow(F.q(), unsigned(d));
    std::set<std::uint64_t> codes;
    if (std::uint64_t(count) >= total) {
      for (std::uint64_t c = 0; c < total; ++c) codes.insert(c);
    } else {
      std::uniform_int_distribution<std::uint64_t> pick(0, total - 1);
      while (codes.size() < std::size_t(count)) codes.insert(pick(rng));
    }
    for (std::uint64_t c : codes) out.push_back(monic_from_code(F, d, c));
  }
  return out;
}

}  // namespace wmds
