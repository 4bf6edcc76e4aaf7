// Command-line front end: single values, verification suites, grid export.
#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "wmds/suites.hpp"

using namespace wmds;

namespace {

enum Exit { kPass = 0, kFail = 1, kUsage = 2 };

std::string approx(const CycNum& v) {
  auto z = v.to_complex();
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.15g %c %.15gi", z.real(), z.imag() < 0 ? '-' : '+', std::abs(z.imag()));
  return buf;
}

nlohmann::json value_json(const CycNum& v) { return {{"exact", v.to_json()}, {"approx", approx(v)}}; }

void emit(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot write " + path);
  os << text;
}

PolyFq parse_poly(const FqConfig& F, const std::string& s) {
  try {
    return poly::parse(F, s);
  } catch (const std::exception& e) {
    throw ConfigError("cannot parse polynomial '" + s + "': " + e.what());
  }
}

PolyFq parse_monic(const FqConfig& F, const std::string& s) {
  PolyFq p = parse_poly(F, s);
  if (!p.is_monic()) throw ConfigError("'" + s + "' is not monic");
  return p;
}

struct Context {
  RunConfig cfg;
  std::string suite = "all";
  bool quiet = false;

  void log(const std::string& msg) const {
    if (!quiet) std::cerr << "[wmds] " << msg << "\n";
  }
};

nlohmann::json provenance(const RunConfig& cfg) {
  return {{"tool", "wmds"}, {"version", version_string()}, {"config_hash", cfg.hash()}, {"run_config", cfg.to_json()}};
}

int cmd_gauss(const Context& c, const std::string& r, const std::string& m, int i) {
  SuiteContext ctx(c.cfg);
  const PolyFq R = parse_poly(ctx.fq(), r), M = parse_monic(ctx.fq(), m);
  const CycNum g = ctx.gauss().gauss(i, R, M);
  nlohmann::json out{{"i", i}, {"r", poly::to_string(R)}, {"c", poly::to_string(M)}, {"gauss", value_json(g)}};
  emit(out.dump(2) + "\n", c.cfg.out);
  return kPass;
}

int cmd_symbol(const Context& c, const std::string& x, const std::string& m) {
  SuiteContext ctx(c.cfg);
  const PolyFq X = parse_poly(ctx.fq(), x), M = parse_monic(ctx.fq(), m);
  const int k = ctx.gauss().symbol(X, M);
  nlohmann::json out{{"x", poly::to_string(X)}, {"c", poly::to_string(M)}};
  if (k < 0) {
    out["index"] = nullptr;
    out["symbol"] = value_json(CycNum::zero(ctx.embedding().field()));
  } else {
    out["index"] = k;
    out["symbol"] = value_json(ctx.embedding().zeta_n(k));
  }
  emit(out.dump(2) + "\n", c.cfg.out);
  return kPass;
}

int cmd_H(const Context& c, const std::string& a, const std::string& b) {
  SuiteContext ctx(c.cfg);
  const PolyFq A = parse_monic(ctx.fq(), a), B = parse_monic(ctx.fq(), b);
  nlohmann::json out{{"c1", poly::to_string(A)}, {"c2", poly::to_string(B)}, {"H", value_json(ctx.hcoeff().H(A, B))}};
  emit(out.dump(2) + "\n", c.cfg.out);
  return kPass;
}

int cmd_verify(const Context& c) {
  c.cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  nlohmann::json rep = verify(c.cfg, c.suite, [&](const std::string& m) {
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    char buf[32];
    std::snprintf(buf, sizeof buf, "%8.1fs ", s);
    c.log(buf + m);
  });
  emit(rep.dump(2) + "\n", c.cfg.out);
  for (const auto& s : rep["suites"]) c.log(s["suite"].get<std::string>() + ": " + s["status"].get<std::string>());
  return rep["status"] == "pass" ? kPass : kFail;
}

int cmd_grid(const Context& c, int D1, int D2, const std::string& format) {
  if (D1 < 0 || D2 < 0) throw ConfigError("grid dimensions must be nonnegative");
  SuiteContext ctx(c.cfg);
  HGrid g = h_grid(ctx.hcoeff(), D1, D2, c.cfg.workers);
  if (format == "csv") {
    std::ostringstream os;
    os << "# tool wmds " << version_string() << "\n# config_hash " << c.cfg.hash() << "\n# run_config "
       << c.cfg.to_json().dump() << "\n";
    os << g.to_csv();
    emit(os.str(), c.cfg.out);
    return kPass;
  }
  nlohmann::json refined = nlohmann::json::array();
  const int n = c.cfg.n;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      nlohmann::json cells = nlohmann::json::array();
      for (int a = i; a <= D1; a += n)
        for (int b = j; b <= D2; b += n) cells.push_back({a, b});
      refined.push_back({{"i", i}, {"j", j}, {"cells", cells}});
    }
  nlohmann::json out{{"provenance", provenance(c.cfg)}, {"grid", g.to_json()}, {"refined", refined}};
  emit(out.dump(2) + "\n", c.cfg.out);
  return kPass;
}

// Reads a JSON grid export back and checks it.
int cmd_grid_check(const Context& c, const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read " + path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(is);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("not a JSON grid export: ") + e.what());
  }
  HGrid g = HGrid::from_json(doc.at("grid"));
  nlohmann::json res{{"file", path}, {"provenance", doc.at("provenance")}};
  const bool lossless = g.to_json() == doc.at("grid");
  const CycNum& c00 = g.entry[0][0];
  const bool corner = c00.field() != nullptr && c00 == CycNum::one(*c00.field());
  bool symmetric = true;
  const int D = std::min(g.D1, g.D2);
  for (int a = 0; a <= D; ++a)
    for (int b = 0; b <= D; ++b)
      if (g.entry[std::size_t(a)][std::size_t(b)] != g.entry[std::size_t(b)][std::size_t(a)]) symmetric = false;
  res["round_trip_lossless"] = lossless;
  res["corner_is_one"] = corner;
  res["transpose_symmetric"] = symmetric;
  const bool ok = lossless && corner && symmetric;
  res["status"] = ok ? "pass" : "fail";
  emit(res.dump(2) + "\n", c.cfg.out);
  return ok ? kPass : kFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact Gauss sums, H coefficients and double Dirichlet series over F_q(t)"};
  app.set_version_flag("--version", version_string());
  app.fallthrough();
  app.require_subcommand(1);
  app.set_config("--config", "", "Flat key = value file; flags override its keys")->envname("WMDS_CONFIG");

  Context c;
  RunConfig& r = c.cfg;
  app.add_option("--n", r.n, "Order of the residue symbol")->envname("WMDS_N");
  app.add_option("--q", r.q, "Prime field size, q = 1 mod 4n")->envname("WMDS_Q");
  app.add_option("--generator", r.generator, "Primitive root of F_q (0: smallest)")->envname("WMDS_GENERATOR");
  app.add_option("--eps", r.eps, "eps(omega) = zeta_n^eps, eps coprime to n")->envname("WMDS_EPS");
  app.add_option("--seed", r.seed, "Seed for sampled test data")->envname("WMDS_SEED");
  app.add_option("--trunc", r.trunc, "Series truncation degree")->envname("WMDS_TRUNC");
  app.add_option("--fit-deg", r.fit_deg, "Largest training degree for the transition matrix")->envname("WMDS_FIT_DEG");
  app.add_option("--fit-count", r.fit_count, "Training polynomials per degree")->envname("WMDS_FIT_COUNT");
  app.add_option("--samples", r.samples, "Random functions and moduli per sampled check")->envname("WMDS_SAMPLES");
  app.add_option("--workers", r.workers, "Worker threads")->envname("WMDS_WORKERS");
  app.add_option("--out", r.out, "Output file (default stdout)")->envname("WMDS_OUT");
  app.add_option("--suite", c.suite, "Verification suite or 'all'")->envname("WMDS_SUITE");
  app.add_flag("--quiet", c.quiet, "No progress on stderr")->envname("WMDS_QUIET");

  std::string r_arg, c_arg, x_arg, format = "json", grid_file;
  int i_arg = 1, D1 = 0, D2 = 0;
  auto* gauss = app.add_subcommand("gauss", "g_i(r, c)");
  gauss->add_option("r", r_arg)->required();
  gauss->add_option("c", c_arg)->required();
  gauss->add_option("i", i_arg);
  auto* symbol = app.add_subcommand("symbol", "Power residue symbol (x/c)");
  symbol->add_option("x", x_arg)->required();
  symbol->add_option("c", c_arg)->required();
  auto* hsub = app.add_subcommand("H", "H(c1, c2)");
  hsub->add_option("c1", x_arg)->required();
  hsub->add_option("c2", c_arg)->required();
  auto* ver = app.add_subcommand("verify", "Run verification suites, JSON report");
  auto* grid = app.add_subcommand("grid", "Export sums of H by degree");
  grid->add_option("D1", D1)->required();
  grid->add_option("D2", D2)->required();
  grid->add_option("--format", format)->check(CLI::IsMember({"json", "csv"}));
  auto* gcheck = app.add_subcommand("grid-check", "Re-read a JSON grid export and check it");
  gcheck->add_option("file", grid_file)->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    r.validate();
    if (*gauss) return cmd_gauss(c, r_arg, c_arg, i_arg);
    if (*symbol) return cmd_symbol(c, x_arg, c_arg);
    if (*hsub) return cmd_H(c, x_arg, c_arg);
    if (*ver) return cmd_verify(c);
    if (*grid) return cmd_grid(c, D1, D2, format);
    if (*gcheck) return cmd_grid_check(c, grid_file);
  } catch (const ConfigError& e) {
    std::cerr << "wmds: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "wmds: " << e.what() << "\n";
    return kUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "wmds: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
