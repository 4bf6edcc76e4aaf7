#ifndef WMDS_SUITES_HPP
#define WMDS_SUITES_HPP

#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "wmds/checks.hpp"

namespace wmds {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  int n = 3;
  std::uint32_t q = 13;
  FqElem generator = 0;  // 0: smallest primitive root
  int eps = 1;
  int trunc = 5;
  // Training set for the transition matrix: `fit_count` monic m per degree
  // up to `fit_deg`; validation uses degree fit_deg + 1.
  int fit_deg = 2;
  int fit_count = 6;
  FitBounds fit_bounds{2, 2};
  FitBounds fit_max{6, 6};
  int samples = 20;  // random test functions for the relations suite
  std::uint64_t seed = 1;
  int workers = 1;
  std::string out;

  // Throws ConfigError.
  void validate() const;
  // The fields that can change a result. Workers and paths are left out.
  nlohmann::json to_json() const;
  // FNV-1a of to_json().dump(), 16 hex digits.
  std::string hash() const;
};

std::string version_string();

const std::vector<std::string>& suite_names();

// Lazily built engines and shared results (fit, grid) for one RunConfig.
class SuiteContext {
 public:
  explicit SuiteContext(RunConfig cfg);
  ~SuiteContext();

  const RunConfig& config() const { return cfg_; }
  const FqConfig& fq() const { return F_; }
  const RootEmbedding& embedding() const { return E_; }
  GaussEngine& gauss() { return G_; }
  HCoeff& hcoeff() { return H_; }
  SeriesEngine& series();
  const TransitionFit& fit();
  const HGrid& grid();

  // Primes used by the checks: t, a linear prime with a nontrivial symbol
  // against t when one exists, and the first degree-2 irreducible.
  const PolyFq& prime_t() const { return t_; }
  const PolyFq& prime_partner() const { return partner_; }
  const PolyFq& prime_quadratic() const { return quad_; }
  std::vector<PolyFq> training() const;

 private:
  RunConfig cfg_;
  FqConfig F_;
  RootEmbedding E_;
  GaussEngine G_;
  HCoeff H_;
  PolyFq t_, partner_, quad_;
  std::unique_ptr<SeriesEngine> S_;
  std::unique_ptr<TransitionFit> fit_;
  std::unique_ptr<HGrid> grid_;
};

// Runs one suite; `all` is not accepted here. Progress lines go to `log`.
std::vector<Report> run_suite(SuiteContext& ctx, const std::string& suite,
                              const std::function<void(const std::string&)>& log = {});

// The full verification document for `suite` (a name or "all"):
// {tool, config_hash, run_config, suites: [{suite, status, reports}], status}.
// Byte-identical for identical configurations.
nlohmann::json verify(const RunConfig& cfg, const std::string& suite,
                      const std::function<void(const std::string&)>& log = {});

}  // namespace wmds

#endif  // WMDS_SUITES_HPP
