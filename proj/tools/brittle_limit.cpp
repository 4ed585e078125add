// brittle-limit: command-line front end for the brittle-damage energy
// library. Subcommands wire JSON run configurations to library calls and
// emit CSV/JSON artifacts.
//
//   brittle-limit <density|converge|laminate|solve|verify>
//                 --config <path> [--jobs N] [--seed S] [--out DIR]
//
// Exit codes: 0 success; 2 config schema violation; 1 numeric failure.
// `verify` exits 0 when every oracle passes, otherwise 10 + the index of
// the first failing oracle (indices printed in the report).

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "brittle/csv.hpp"
#include "brittle/densities.hpp"
#include "brittle/envelopes.hpp"
#include "brittle/gammalab.hpp"
#include "brittle/microstructure.hpp"
#include "brittle/oracles.hpp"
#include "brittle/parallel.hpp"
#include "brittle/rng.hpp"
#include "brittle/symcalc.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CliOptions {
  std::string config_path;
  std::string out_dir;
  int jobs = 0;
  long long seed = -1;  // -1: take the config's seed (default 1)
};

void require_keys(const json& j, const std::string& ctx, const std::set<std::string>& allowed) {
  if (!j.is_object()) throw ConfigError(ctx + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key()))
      throw ConfigError(ctx + ": unknown key '" + it.key() + "'");
}

double need_number(const json& j, const std::string& ctx, const std::string& key) {
  if (!j.contains(key)) throw ConfigError(ctx + ": missing key '" + key + "'");
  if (!j[key].is_number()) throw ConfigError(ctx + "." + key + ": expected a number");
  return j[key].get<double>();
}

double opt_number(const json& j, const std::string& ctx, const std::string& key, double dflt) {
  if (!j.contains(key)) return dflt;
  if (!j[key].is_number()) throw ConfigError(ctx + "." + key + ": expected a number");
  return j[key].get<double>();
}

std::string opt_string(const json& j, const std::string& ctx, const std::string& key,
                       const std::string& dflt) {
  if (!j.contains(key)) return dflt;
  if (!j[key].is_string()) throw ConfigError(ctx + "." + key + ": expected a string");
  return j[key].get<std::string>();
}

brittle::ModelParams parse_params(const json& cfg) {
  if (!cfg.contains("params")) throw ConfigError("config: missing 'params'");
  const json& j = cfg["params"];
  require_keys(j, "params",
               {"lambda_w", "mu_w", "lambda_s", "mu_s", "kappa", "alpha", "eta"});
  brittle::ModelParams p;
  p.lambda_w = need_number(j, "params", "lambda_w");
  p.mu_w = need_number(j, "params", "mu_w");
  p.lambda_s = need_number(j, "params", "lambda_s");
  p.mu_s = need_number(j, "params", "mu_s");
  p.kappa = need_number(j, "params", "kappa");
  p.alpha = opt_number(j, "params", "alpha", 1.0);
  if (j.contains("eta")) {
    const json& e = j["eta"];
    require_keys(e, "params.eta", {"kind", "exponent"});
    const std::string kind = opt_string(e, "params.eta", "kind", "linear_alpha");
    if (kind == "linear_alpha") {
      p.eta.kind = brittle::EtaSchedule::Kind::LinearAlpha;
    } else if (kind == "power") {
      p.eta.kind = brittle::EtaSchedule::Kind::Power;
      p.eta.exponent = need_number(e, "params.eta", "exponent");
    } else {
      throw ConfigError("params.eta.kind: expected 'linear_alpha' or 'power'");
    }
  }
  try {
    p.validate();
  } catch (const std::exception& ex) {
    throw ConfigError(std::string("params: ") + ex.what());
  }
  return p;
}

brittle::SymMat parse_symmat(const json& j, int dim, const std::string& ctx) {
  const int want = dim == 2 ? 3 : 6;
  if (!j.is_array() || static_cast<int>(j.size()) != want)
    throw ConfigError(ctx + ": expected " + std::to_string(want) + " packed entries");
  brittle::SymMat m = brittle::SymMat::zero(dim);
  for (int k = 0; k < want; ++k) {
    if (!j[k].is_number()) throw ConfigError(ctx + ": entries must be numbers");
    m.v[k] = j[k].get<double>();
  }
  return m;
}

std::vector<double> parse_number_list(const json& j, const std::string& ctx) {
  if (!j.is_array() || j.empty()) throw ConfigError(ctx + ": expected a nonempty array");
  std::vector<double> out;
  for (const auto& v : j) {
    if (!v.is_number()) throw ConfigError(ctx + ": entries must be numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

json load_config(const CliOptions& opt) {
  std::ifstream in(opt.config_path);
  if (!in) throw ConfigError("cannot open config file: " + opt.config_path);
  json cfg;
  try {
    in >> cfg;
  } catch (const std::exception& ex) {
    throw ConfigError(std::string("config parse error: ") + ex.what());
  }
  return cfg;
}

std::string out_path(const CliOptions& opt, const std::string& name) {
  if (opt.out_dir.empty()) return name;
  fs::create_directories(opt.out_dir);
  return (fs::path(opt.out_dir) / name).string();
}

unsigned long long effective_seed(const CliOptions& opt, const json& cfg) {
  if (opt.seed >= 0) return static_cast<unsigned long long>(opt.seed);
  if (cfg.contains("seed")) {
    if (!cfg["seed"].is_number_integer()) throw ConfigError("seed: expected an integer");
    return cfg["seed"].get<unsigned long long>();
  }
  return 1;
}

// ---------------------------------------------------------------------------

int cmd_density(const CliOptions& opt) {
  const json cfg = load_config(opt);
  require_keys(cfg, "config",
               {"params", "eps", "dim", "xis", "sweep", "tresca", "output", "seed"});
  const brittle::ModelParams p = parse_params(cfg);
  const double eps = need_number(cfg, "config", "eps");
  const int dim = static_cast<int>(opt_number(cfg, "config", "dim", 2));
  if (dim != 2 && dim != 3) throw ConfigError("dim: must be 2 or 3");
  const bool tresca = cfg.value("tresca", false);
  if (tresca) p.validate_tresca();

  std::vector<brittle::SymMat> xis;
  if (cfg.contains("xis"))
    for (std::size_t i = 0; i < cfg["xis"].size(); ++i)
      xis.push_back(parse_symmat(cfg["xis"][i], dim, "xis[" + std::to_string(i) + "]"));
  if (cfg.contains("sweep")) {
    const json& sw = cfg["sweep"];
    require_keys(sw, "sweep", {"base", "t_min", "t_max", "count"});
    const brittle::SymMat base = parse_symmat(sw["base"], dim, "sweep.base");
    const double t0 = need_number(sw, "sweep", "t_min");
    const double t1 = need_number(sw, "sweep", "t_max");
    const int count = static_cast<int>(need_number(sw, "sweep", "count"));
    if (count < 2) throw ConfigError("sweep.count: must be >= 2");
    for (int i = 0; i < count; ++i)
      xis.push_back((t0 + (t1 - t0) * i / (count - 1)) * base);
    // report where A_s(t base) leaves K (w_bar switches quadratic -> linear)
    const double g = brittle::G_quad(p, brittle::apply_iso(p.A_s(), base));
    if (g > 0.0)
      std::printf("density: w_bar kink along sweep at t = %s\n",
                  brittle::format_double(std::sqrt(2.0 * p.alpha * p.kappa / g)).c_str());
  }
  if (xis.empty()) throw ConfigError("config: need 'xis' and/or 'sweep'");

  brittle::CsvTable table;
  if (dim == 2)
    table.header = {"xi11", "xi22", "xi12"};
  else
    table.header = {"xi11", "xi22", "xi33", "xi12", "xi13", "xi23"};
  for (const char* c : {"f", "g_eps", "w_eps", "G", "h", "support_K", "w_bar"})
    table.header.push_back(c);
  if (tresca)
    for (const char* c : {"G_tilde_eps", "G_tilde", "h_tilde_dev", "support_K_tilde_dev"})
      table.header.push_back(c);

  table.rows.assign(xis.size(), {});
  brittle::parallel_for(xis.size(), opt.jobs, [&](std::size_t i) {
    const brittle::SymMat& xi = xis[i];
    std::vector<double> row(xi.v.begin(), xi.v.begin() + xi.packed_size());
    row.push_back(brittle::f_strong(p, xi));
    row.push_back(brittle::g_weak(p, eps, xi));
    row.push_back(brittle::w_eps(p, eps, xi));
    row.push_back(brittle::G_quad(p, xi));
    row.push_back(brittle::h_density(p, xi));
    row.push_back(brittle::support_K(p, xi));
    row.push_back(brittle::w_bar_dual(p, xi).value);
    if (tresca) {
      row.push_back(brittle::G_tilde_eps(p, eps, xi));
      row.push_back(brittle::G_tilde(p, xi));
      const brittle::SymMat dev = brittle::dev_split(xi).deviator;
      row.push_back(brittle::h_tilde(p, dev));
      row.push_back(brittle::support_K_tilde(p, dev));
    }
    table.rows[i] = std::move(row);
  });
  const std::string path = out_path(opt, opt_string(cfg, "config", "output", "density.csv"));
  brittle::write_csv(path, table);
  std::printf("density: wrote %zu rows to %s\n", table.rows.size(), path.c_str());
  return 0;
}

int cmd_converge(const CliOptions& opt) {
  const json cfg = load_config(opt);
  require_keys(cfg, "config", {"params", "dim", "xis", "eps_list", "tresca", "output", "seed"});
  const brittle::ModelParams p = parse_params(cfg);
  const int dim = static_cast<int>(opt_number(cfg, "config", "dim", 2));
  if (dim != 2 && dim != 3) throw ConfigError("dim: must be 2 or 3");
  const bool tresca = cfg.value("tresca", false);
  if (!cfg.contains("xis")) throw ConfigError("config: missing 'xis'");
  std::vector<brittle::SymMat> xis;
  for (std::size_t i = 0; i < cfg["xis"].size(); ++i)
    xis.push_back(parse_symmat(cfg["xis"][i], dim, "xis[" + std::to_string(i) + "]"));
  const std::vector<double> eps_list = parse_number_list(cfg["eps_list"], "eps_list");

  brittle::CsvTable table;
  table.header = {"xi_id", "eps", "sqw", "limit", "gap"};
  table.rows.assign(xis.size() * eps_list.size(), {});
  brittle::parallel_for(table.rows.size(), opt.jobs, [&](std::size_t k) {
    const std::size_t i = k / eps_list.size();
    const double eps = eps_list[k % eps_list.size()];
    const double limit = tresca ? brittle::tresca_limit_bulk(p, xis[i])
                                : brittle::w_bar_dual(p, xis[i]).value;
    const double sqw = tresca ? brittle::sq_envelope_tresca(p, eps, xis[i]).value
                              : brittle::sq_envelope(p, eps, xis[i]).value;
    table.rows[k] = {double(i), eps, sqw, limit, std::abs(sqw - limit)};
  });
  const std::string path = out_path(opt, opt_string(cfg, "config", "output", "converge.csv"));
  brittle::write_csv(path, table);
  std::printf("converge: wrote %zu rows to %s\n", table.rows.size(), path.c_str());
  return 0;
}

int cmd_laminate(const CliOptions& opt) {
  const json cfg = load_config(opt);
  require_keys(cfg, "config",
               {"params", "case", "xi_diag", "a", "b", "eps_list", "layers", "output",
                "bands_output", "seed"});
  const brittle::ModelParams p = parse_params(cfg);
  const int which = static_cast<int>(need_number(cfg, "config", "case"));
  if (which != 1 && which != 2) throw ConfigError("case: must be 1 or 2");
  const std::vector<double> eps_list = parse_number_list(cfg["eps_list"], "eps_list");
  const int fixed_layers = static_cast<int>(opt_number(cfg, "config", "layers", 0));

  brittle::CsvTable table;
  table.header = {"eps", "layers", "energy", "damaged_volume", "limit_bound", "rel_gap"};
  brittle::CsvTable bands;
  bands.header = {"eps", "family", "center", "half_width"};

  for (double eps : eps_list) {
    const int layers = fixed_layers > 0 ? fixed_layers : brittle::default_layers(eps);
    brittle::LaminateSpec spec;
    if (which == 1) {
      if (!cfg.contains("xi_diag")) throw ConfigError("config: case 1 needs 'xi_diag'");
      const auto d = parse_number_list(cfg["xi_diag"], "xi_diag");
      if (d.size() != 2) throw ConfigError("xi_diag: expected 2 entries");
      spec = brittle::LaminateSpec::case_one(brittle::SymMat::diag2(d[0], d[1]), eps, layers, p);
    } else {
      if (!cfg.contains("a") || !cfg.contains("b"))
        throw ConfigError("config: case 2 needs 'a' and 'b'");
      const auto a = parse_number_list(cfg["a"], "a");
      const auto b = parse_number_list(cfg["b"], "b");
      if (a.size() != 2 || b.size() != 2) throw ConfigError("a/b: expected 2 entries each");
      spec = brittle::LaminateSpec::case_two({a[0], a[1]}, {b[0], b[1]}, eps, layers, p);
    }
    const brittle::LaminateResult res = brittle::laminate_energy(spec);
    const double rel_gap =
        std::abs(res.energy - res.limit_bound) / std::max(1e-300, std::abs(res.limit_bound));
    table.rows.push_back({eps, double(layers), res.energy, res.damaged_volume,
                          res.limit_bound, rel_gap});
    for (const auto& row : res.band_geometry)
      bands.rows.push_back({eps, row[0], row[1], row[2]});
  }
  const std::string path = out_path(opt, opt_string(cfg, "config", "output", "laminate.csv"));
  brittle::write_csv(path, table);
  const std::string bpath =
      out_path(opt, opt_string(cfg, "config", "bands_output", "laminate_bands.csv"));
  brittle::write_csv(bpath, bands);
  std::printf("laminate: wrote %zu rows to %s (bands: %s)\n", table.rows.size(), path.c_str(),
              bpath.c_str());
  return 0;
}

int cmd_solve(const CliOptions& opt) {
  const json cfg = load_config(opt);
  require_keys(cfg, "config",
               {"params", "regime", "xi_bc", "eps_list", "grid", "init", "am_tol",
                "am_max_iters", "output", "damage_output", "seed"});
  brittle::ModelParams p = parse_params(cfg);
  const std::string regime = opt_string(cfg, "config", "regime", "hencky");
  const brittle::SymMat xi_bc = parse_symmat(cfg.at("xi_bc"), 2, "xi_bc");
  const std::vector<double> eps_list = parse_number_list(cfg.at("eps_list"), "eps_list");

  brittle::SweepConfig sc;
  if (cfg.contains("grid")) {
    require_keys(cfg["grid"], "grid", {"nx", "ny"});
    sc.nx = static_cast<int>(need_number(cfg["grid"], "grid", "nx"));
    sc.ny = static_cast<int>(need_number(cfg["grid"], "grid", "ny"));
  }
  const std::string init = opt_string(cfg, "config", "init", "laminate");
  if (init == "laminate")
    sc.init = brittle::InitKind::Laminate;
  else if (init == "undamaged")
    sc.init = brittle::InitKind::Undamaged;
  else if (init == "random5")
    sc.init = brittle::InitKind::Random5;
  else
    throw ConfigError("init: expected 'laminate', 'undamaged' or 'random5'");
  sc.am_tol = opt_number(cfg, "config", "am_tol", 1e-8);
  sc.am_max_iters = static_cast<int>(opt_number(cfg, "config", "am_max_iters", 100));
  sc.seed = effective_seed(opt, cfg);

  // default eta schedules per regime when the config didn't pin one
  const bool eta_given = cfg.contains("params") && cfg["params"].contains("eta");
  brittle::RegimeReport rep;
  if (regime == "trivial") {
    if (!eta_given) {
      p.eta.kind = brittle::EtaSchedule::Kind::Power;
      p.eta.exponent = 2.0;
    }
    rep = brittle::regime_sweep(p, brittle::Regime::Trivial, xi_bc, eps_list, sc);
  } else if (regime == "hencky") {
    if (!eta_given) p.eta.kind = brittle::EtaSchedule::Kind::LinearAlpha;
    rep = brittle::regime_sweep(p, brittle::Regime::Hencky, xi_bc, eps_list, sc);
  } else if (regime == "elastic") {
    if (!eta_given) {
      p.eta.kind = brittle::EtaSchedule::Kind::Power;
      p.eta.exponent = 0.5;
    }
    rep = brittle::regime_sweep(p, brittle::Regime::Elastic, xi_bc, eps_list, sc);
  } else if (regime == "tresca") {
    rep = brittle::tresca_sweep(p, xi_bc, eps_list, sc);
  } else {
    throw ConfigError("regime: expected 'trivial', 'hencky', 'elastic' or 'tresca'");
  }

  brittle::CsvTable table;
  table.header = {"eps", "eta", "iters", "energy", "damaged_volume", "limit_reference"};
  for (const auto& r : rep.runs)
    table.rows.push_back(
        {r.eps, r.eta, double(r.iters), r.energy, r.damaged_volume, rep.limit_reference});
  const std::string path = out_path(opt, opt_string(cfg, "config", "output", "solve.csv"));
  brittle::write_csv(path, table);

  brittle::CsvTable dmg;
  dmg.header = {"cell_i", "cell_j", "chi"};
  for (int cj = 0; cj < rep.ny; ++cj)
    for (int ci = 0; ci < rep.nx; ++ci)
      dmg.rows.push_back({double(ci), double(cj), double(rep.final_damage[cj * rep.nx + ci])});
  const std::string dpath =
      out_path(opt, opt_string(cfg, "config", "damage_output", "damage.csv"));
  brittle::write_csv(dpath, dmg);

  if (rep.has_scaling_fit)
    std::printf("solve: fitted scaling exponent of E vs sqrt(eta/eps): %s\n",
                brittle::format_double(rep.scaling_exponent).c_str());
  std::printf("solve: wrote %zu runs to %s (damage: %s)\n", table.rows.size(), path.c_str(),
              dpath.c_str());
  return 0;
}

// ---------------------------------------------------------------------------
// verify: oracle suite. Exit 0 or 10 + index of the first failing oracle.
// ---------------------------------------------------------------------------

struct OracleOutcome {
  int index;
  std::string name;
  bool pass;
  double measure;
  double tolerance;
  std::string detail;
};

int cmd_verify(const CliOptions& opt) {
  const json cfg = load_config(opt);
  require_keys(cfg, "config", {"params", "quick", "output", "seed"});
  const brittle::ModelParams p = parse_params(cfg);
  try {
    p.validate_tresca();  // the suite exercises the Tresca family as well
  } catch (const std::exception& ex) {
    throw ConfigError(std::string("params: ") + ex.what());
  }
  const bool quick = cfg.value("quick", false);
  const unsigned long long seed = effective_seed(opt, cfg);

  std::vector<OracleOutcome> outcomes;
  int index = 0;
  auto record = [&](const std::string& name, bool pass, double measure, double tol,
                    const std::string& detail) {
    ++index;
    outcomes.push_back({index, name, pass, measure, tol, detail});
    std::printf("[%2d] %-34s %s  (measure %.3e, tol %.3e)\n", index, name.c_str(),
                pass ? "PASS" : "FAIL", measure, tol);
  };

  // 1: dual / primal / brute agreement
  {
    const int n_samples = quick ? 12 : 48;
    std::mt19937_64 rng(seed);
    double worst = 0.0;
    std::string detail;
    bool pass = true;
    for (int k = 0; k < n_samples; ++k) {
      const int dim = (k % 2) ? 3 : 2;
      const brittle::SymMat xi = brittle::random_symmat(rng, dim, 2.5);
      const auto dual = brittle::w_bar_dual(p, xi);
      const auto primal = brittle::w_bar_primal(p, xi);
      const auto brute =
          brittle::brute_inf_convolution(p, xi, quick ? 32 : 48, quick ? 500 : 2000, seed + k);
      worst = std::max(worst, primal.residual);
      if (brute.diag_grid_min < dual.value - 1e-6 * (1.0 + std::abs(dual.value))) pass = false;
      if (brute.diag_grid_min >
          dual.value + brute.grid_error_bound + 1e-6 * (1.0 + std::abs(dual.value)))
        pass = false;
      if (brute.rotated_min < dual.value - 1e-4 * (1.0 + std::abs(dual.value))) pass = false;
    }
    record("duality_triple", pass && worst <= 1e-6, worst, 1e-6, detail);
  }

  // 2-5: rotation robustness
  {
    const int s = quick ? 10 : 50, f = quick ? 4 : 8;
    for (auto [op, name, tol] :
         {std::tuple{brittle::RotationOp::FEpsInner, "rotation_F_eps_inner", 1e-6},
          std::tuple{brittle::RotationOp::WBarDual, "rotation_w_bar_dual", 1e-6},
          std::tuple{brittle::RotationOp::WBarPrimal, "rotation_w_bar_primal", 1e-6},
          std::tuple{brittle::RotationOp::WBarIsotropy, "rotation_w_bar_isotropy", 1e-8}}) {
      double worst = 0.0;
      std::string detail;
      for (int dim : {2, 3}) {
        const auto rep = brittle::rotation_robustness(
            p, op, dim, op == brittle::RotationOp::WBarPrimal ? std::max(2, s / 4) : s, f,
            seed + dim);
        if (rep.max_rel_gap > worst) {
          worst = rep.max_rel_gap;
          detail = rep.worst_case_input;
        }
      }
      record(name, worst <= tol, worst, tol, detail);
    }
  }

  // 6-7: grid conjugates
  {
    std::mt19937_64 rng(seed + 99);
    double worst = 0.0;
    for (int k = 0; k < (quick ? 4 : 10); ++k) {
      const int dim = (k % 2) ? 3 : 2;
      const brittle::SymMat xi = brittle::random_symmat(rng, dim, 2.0);
      const double brute = brittle::conjugate_bruteforce(p, brittle::ConjugateWhich::G, xi,
                                                         quick ? (dim == 2 ? 201 : 61) : 0);
      const double exact = brittle::h_density(p, xi);
      const double tol_here = (dim == 2 ? 5e-3 : 6e-2) * (1.0 + exact);
      worst = std::max(worst, std::abs(brute - exact) / (1.0 + exact));
      if (std::abs(brute - exact) > tol_here) worst = std::max(worst, 1.0);
    }
    record("conjugate_G_vs_h", worst <= 6e-2, worst, 6e-2, "");

    worst = 0.0;
    for (int k = 0; k < (quick ? 4 : 10); ++k) {
      const int dim = (k % 2) ? 3 : 2;
      const brittle::SymMat dev = brittle::dev_split(brittle::random_symmat(rng, dim, 2.0)).deviator;
      const double brute = brittle::conjugate_bruteforce(p, brittle::ConjugateWhich::GTilde, dev,
                                                         quick ? (dim == 2 ? 4001 : 301) : 0);
      const double exact = brittle::h_tilde(p, dev) / 4.0;
      worst = std::max(worst, std::abs(brute - exact) / (1.0 + exact));
    }
    record("conjugate_G_tilde_vs_h_tilde", worst <= 2e-2, worst, 2e-2, "");
  }

  // 8-10: convexity probes
  {
    const int s = quick ? 300 : 2000;
    auto rep = brittle::convexity_probe(p, brittle::ConvexityFn::WBar, 3, s, seed + 7);
    record("convexity_w_bar", rep.max_rel_gap <= 1e-8, rep.max_rel_gap, 1e-8,
           rep.worst_case_input);
    rep = brittle::convexity_probe(p, brittle::ConvexityFn::SqrtHr, 2, s, seed + 8);
    record("convexity_sqrt_h_r", rep.max_rel_gap <= 1e-8, rep.max_rel_gap, 1e-8,
           rep.worst_case_input);
    rep = brittle::convexity_probe(p, brittle::ConvexityFn::WEps, 2, quick ? 50 : 200, seed + 9);
    // W_eps is not convex: the probe must find a violating segment
    record("nonconvexity_W_eps_found", rep.max_abs_gap > 1e-6, rep.max_abs_gap, 1e-6,
           rep.worst_case_input);
  }

  json report = json::array();
  for (const auto& o : outcomes)
    report.push_back({{"index", o.index},
                      {"name", o.name},
                      {"pass", o.pass},
                      {"measure", o.measure},
                      {"tolerance", o.tolerance},
                      {"detail", o.detail},
                      {"seed", seed}});
  const std::string path =
      out_path(opt, opt_string(cfg, "config", "output", "verify_report.json"));
  std::ofstream out(path);
  out << report.dump(2) << "\n";
  std::printf("verify: report written to %s\n", path.c_str());

  for (const auto& o : outcomes)
    if (!o.pass) return 10 + o.index;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"brittle-limit: effective densities, laminates and regime sweeps "
               "for brittle-damage energies"};
  app.require_subcommand(1);

  CliOptions opt;
  std::string command;
  for (const char* name : {"density", "converge", "laminate", "solve", "verify"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", opt.config_path, "JSON run configuration")->required();
    sub->add_option("--jobs", opt.jobs, "worker threads (fallback: BRITTLE_LIMIT_JOBS)");
    sub->add_option("--seed", opt.seed, "override the config seed");
    sub->add_option("--out", opt.out_dir, "output directory");
    sub->callback([&command, name]() { command = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  try {
    if (command == "density") return cmd_density(opt);
    if (command == "converge") return cmd_converge(opt);
    if (command == "laminate") return cmd_laminate(opt);
    if (command == "solve") return cmd_solve(opt);
    if (command == "verify") return cmd_verify(opt);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "numeric failure: %s\n", e.what());
    return 1;
  }
  return 2;
}
