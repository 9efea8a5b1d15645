#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <ostream>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "checks.hpp"
#include "sphase/sphase.hpp"
#include "table.hpp"

namespace sphase::cli {

class IoError : public Error {
public:
  using Error::Error;
  int exit_code() const noexcept override { return 5; }
};

inline constexpr int exit_verification_failed = 4;

struct Settings {
  Tolerances tol;
  unsigned threads = 1;
};

namespace detail {

inline double env_double(const char* name, double fallback) {
  const char* raw = std::getenv(name);
  if (!raw || !*raw) return fallback;
  try {
    std::size_t used = 0;
    const double v = std::stod(raw, &used);
    if (used != std::string(raw).size() || !(v > 0.0)) throw std::invalid_argument(raw);
    return v;
  } catch (const std::logic_error&) {
    throw DomainError(std::string(name) + ": expected a positive number, got '" + raw + "'");
  }
}

inline unsigned env_threads() {
  const char* raw = std::getenv("SPHASE_THREADS");
  if (!raw || !*raw) return std::max(1u, std::thread::hardware_concurrency());
  try {
    const int v = std::stoi(raw);
    if (v < 1) throw std::invalid_argument(raw);
    return static_cast<unsigned>(v);
  } catch (const std::logic_error&) {
    throw DomainError(std::string("SPHASE_THREADS: expected a positive integer, got '") + raw + "'");
  }
}

inline Equilibrium witness_or_uniform(const MinimizerClassification& c, const ModelParams& p) {
  return c.witness ? *c.witness : Equilibrium{UniformState{p}};
}

inline bool same_branch(const Equilibrium& a, const Equilibrium& b) {
  if (a.index() != b.index()) return false;
  if (auto* x = std::get_if<StrictSupportEquilibrium>(&a)) return x->phi == std::get<StrictSupportEquilibrium>(b).phi;
  if (auto* x = std::get_if<FullSupportEquilibrium>(&a)) return x->eta == std::get<FullSupportEquilibrium>(b).eta;
  return true;
}

inline Cell eta_cell(const Equilibrium& e) {
  if (auto* x = std::get_if<FullSupportEquilibrium>(&e)) return x->eta;
  return {};
}

inline Cell phi_cell(const Equilibrium& e) {
  if (auto* x = std::get_if<StrictSupportEquilibrium>(&e)) return x->phi;
  return {};
}

inline double lambda_of(const Equilibrium& e) {
  return std::visit(
      [](const auto& x) -> double {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, UniformState>) return lambda_uniform(x.params.m(), x.params.d());
        else return x.lambda;
      },
      e);
}

inline std::vector<double> kappa_grid(double lo, double hi, int points, const std::string& spacing) {
  if (!(lo > 0.0) || !(hi > lo)) throw DomainError("sweep: need 0 < kappa-min < kappa-max");
  if (points < 2) throw DomainError("sweep: need at least 2 points");
  std::vector<double> k(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    const double t = static_cast<double>(i) / (points - 1);
    k[static_cast<std::size_t>(i)] =
        spacing == "log" ? std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo))) : lo + t * (hi - lo);
  }
  k.back() = hi;
  return k;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

inline Table cmd_critical(double m, int d, const Settings& cfg) {
  Table t{"critical", {"m", "d", "quantity", "value", "method"}, {}};
  const CriticalValues cv = critical_values(m, d, cfg.tol);
  const double from_f = 1.0 / F_fn(pi, m, d, cfg.tol.quad);
  if (std::abs(from_f / cv.kappa2 - 1.0) > 1e-8)
    throw ConsistencyError("critical: closed-form kappa2 " + format_double(cv.kappa2) + " disagrees with 1/F(pi) " +
                           format_double(from_f));
  const std::string unsupported = m > 2.0 ? "not analysed for d != 2" : "defined only for m > 2";
  auto row = [&](const char* q, std::optional<double> v, const std::string& method) {
    t.rows.push_back({m, static_cast<long long>(d), std::string(q), v ? Cell{*v} : Cell{}, v ? method : unsupported});
  };
  row("kappa1", cv.kappa1, "closed form");
  row("kappa2", cv.kappa2, "closed form (Gamma functions), checked against 1/F(pi)");
  row("kappa3", cv.kappa3, "1/F(bar_phi)");
  row("kappa_c", cv.kappa_c, "root of the first strict-support branch energy gap");
  row("bar_phi", cv.bar_phi, "closed form");
  return t;
}

inline Table cmd_solve(double m, int d, double kappa, int resolution, const Settings& cfg) {
  if (resolution < 2) throw DomainError("solve: resolution must be >= 2");
  const ModelParams params(m, d, kappa);
  std::vector<Equilibrium> eqs{UniformState{params}};
  for (auto& e : nonuniform_equilibria(params, cfg.tol)) eqs.push_back(std::move(e));
  const auto cls = classify(m, d, kappa, cfg.tol);
  const Equilibrium best = detail::witness_or_uniform(cls, params);

  Table t{"solve",
          {"branch", "type", "m", "d", "kappa", "eta", "phi", "s", "s_min", "s_max", "lambda", "energy", "gap",
           "regime", "global_min", "theta", "rho"},
          {}};
  for (std::size_t b = 0; b < eqs.size(); ++b) {
    const auto& e = eqs[b];
    const auto en = energy_of(e, cfg.tol.quad);
    Cell s_min, s_max;
    if (auto* f = std::get_if<M2Family>(&e)) {
      s_min = 0.0;
      s_max = f->s_max();
    }
    for (int j = 0; j < resolution; ++j) {
      const double theta = j == resolution - 1 ? pi : pi * j / (resolution - 1);
      t.rows.push_back({static_cast<long long>(b), std::string(kind_name(e)), m, static_cast<long long>(d), kappa,
                        detail::eta_cell(e), detail::phi_cell(e), s_of(e), s_min, s_max, detail::lambda_of(e),
                        en.total, en.gap_vs_uniform, std::string(regime_name(cls.regime)),
                        detail::same_branch(e, best), theta, density_eval(e, theta)});
    }
  }
  return t;
}

inline const std::set<std::string>& sweep_output_names() {
  static const std::set<std::string> names = {"s", "phi", "lambda", "energy", "gap", "classification"};
  return names;
}

inline Table cmd_sweep(double m, int d, double kappa_min, double kappa_max, int points, const std::string& spacing,
                       const std::set<std::string>& outputs, const Settings& cfg) {
  const ModelParams base(m, d);
  const auto kappas = detail::kappa_grid(kappa_min, kappa_max, points, spacing);
  auto want = [&](const char* k) { return outputs.count(k) > 0; };

  Table t{"sweep", {"kappa", "branch", "type"}, {}};
  if (want("s")) t.columns.push_back("s");
  if (want("phi")) {
    t.columns.push_back("eta");
    t.columns.push_back("phi");
  }
  if (want("lambda")) t.columns.push_back("lambda");
  if (want("energy")) t.columns.push_back("energy");
  if (want("gap")) t.columns.push_back("gap");
  if (want("classification")) {
    t.columns.push_back("regime");
    t.columns.push_back("global_min");
  }
  t.columns.insert(t.columns.end(), {"status", "error_code", "error"});
  const std::size_t width = t.columns.size();

  auto rows_at = [&](double kappa) {
    std::vector<std::vector<Cell>> rows;
    try {
      const ModelParams params = base.with_kappa(kappa);
      std::vector<Equilibrium> eqs{UniformState{params}};
      for (auto& e : nonuniform_equilibria(params, cfg.tol)) eqs.push_back(std::move(e));
      std::optional<MinimizerClassification> cls;
      if (want("classification")) cls = classify(m, d, kappa, cfg.tol);
      for (std::size_t b = 0; b < eqs.size(); ++b) {
        const auto& e = eqs[b];
        std::vector<Cell> row{kappa, static_cast<long long>(b), std::string(kind_name(e))};
        if (want("s")) row.push_back(s_of(e));
        if (want("phi")) {
          row.push_back(detail::eta_cell(e));
          row.push_back(detail::phi_cell(e));
        }
        if (want("lambda")) row.push_back(detail::lambda_of(e));
        if (want("energy") || want("gap")) {
          const auto en = energy_of(e, cfg.tol.quad);
          if (want("energy")) row.push_back(en.total);
          if (want("gap")) row.push_back(en.gap_vs_uniform);
        }
        if (cls) {
          row.push_back(std::string(regime_name(cls->regime)));
          row.push_back(detail::same_branch(e, detail::witness_or_uniform(*cls, params)));
        }
        row.insert(row.end(), {std::string("ok"), 0LL, std::string()});
        rows.push_back(std::move(row));
      }
    } catch (const Error& err) {
      std::vector<Cell> row(width);
      row[0] = kappa;
      row[width - 3] = std::string("error");
      row[width - 2] = static_cast<long long>(err.exit_code());
      row[width - 1] = std::string(err.what());
      rows.assign(1, std::move(row));
    }
    return rows;
  };

  // rows are computed concurrently and emitted in request order
  std::vector<std::vector<std::vector<Cell>>> per_kappa(kappas.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < kappas.size(); i = next++) per_kappa[i] = rows_at(kappas[i]);
  };
  const unsigned n_threads = std::max(1u, std::min<unsigned>(cfg.threads, static_cast<unsigned>(kappas.size())));
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < n_threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (auto& rows : per_kappa)
    for (auto& r : rows) t.rows.push_back(std::move(r));
  return t;
}

inline Table cmd_verify(const std::string& suite, std::uint64_t seed, int grid_size, const Settings& cfg, bool& all_pass) {
  std::vector<CheckResult> results;
  if (suite == "lemmas" || suite == "all") {
    auto r = lemma_checks(seed, cfg.tol);
    results.insert(results.end(), r.begin(), r.end());
  }
  if (suite == "oracle" || suite == "all") {
    auto r = oracle_checks(seed, grid_size, cfg.tol);
    results.insert(results.end(), r.begin(), r.end());
  }
  Table t{"verify", {"suite", "check", "status", "margin", "detail"}, {}};
  all_pass = true;
  for (const auto& r : results) {
    all_pass = all_pass && r.pass;
    const std::string kind = r.name.rfind("oracle_", 0) == 0 ? "oracle" : "lemmas";
    t.rows.push_back({kind, r.name, std::string(r.pass ? "PASS" : "FAIL"), r.margin, r.detail});
  }
  return t;
}

inline Table cmd_minimize(double m, int d, double kappa, int grid_size, std::uint64_t seed, int starts) {
  OracleOptions opt;
  opt.starts = starts;
  const auto res = minimize_energy(m, d, kappa, grid_size, seed, opt);
  Table t{"minimize",
          {"m", "d", "kappa", "seed", "grid_size", "energy", "converged", "best_start", "s", "support_radius", "theta",
           "weight", "rho"},
          {}};
  const double s = std::abs(res.density.first_moment());
  const double radius = support_radius(res.density);
  for (std::size_t i = 0; i < res.density.size(); ++i)
    t.rows.push_back({m, static_cast<long long>(d), kappa, static_cast<long long>(seed),
                      static_cast<long long>(grid_size), res.energy, res.converged,
                      static_cast<long long>(res.best_start), s, radius, res.density.nodes[i], res.density.weights[i],
                      res.density.values[i]});
  return t;
}

// ---------------------------------------------------------------------------
// Entry point
// ---------------------------------------------------------------------------

inline void emit(const Table& t, const std::string& format, const std::string& path, std::ostream& out) {
  const std::string text = format == "json" ? to_json(t) : to_csv(t);
  if (path.empty() || path == "-" || path == "stdout") {
    out << text;
    out.flush();
    if (!out) throw IoError("failed writing to standard output");
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open output file '" + path + "'");
  f << text;
  f.close();
  if (!f) throw IoError("failed writing output file '" + path + "'");
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Equilibria, critical values and global minimizers of the nonlinear-diffusion free energy on S^d"};
  app.require_subcommand(1);

  double m = 0.0, kappa = -1.0, kappa_min = 0.0, kappa_max = 0.0;
  int d = 2, points = 50, resolution = 181, grid_size = 800, starts = 5;
  std::uint64_t seed = 42;
  std::string format = "csv", spacing = "linear", out_path = "stdout", suite = "all";
  std::vector<std::string> outputs(sweep_output_names().begin(), sweep_output_names().end());
  std::optional<double> tol_root, tol_quad;
  std::optional<unsigned> threads;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--out", out_path, "output path, or 'stdout'");
    sub->add_option("--tol-root", tol_root, "root residual tolerance (env SPHASE_TOL_ROOT)");
    sub->add_option("--tol-quad", tol_quad, "quadrature tolerance (env SPHASE_TOL_QUAD)");
    sub->add_option("--threads", threads, "worker threads (env SPHASE_THREADS)");
  };
  auto model = [&](CLI::App* sub) {
    sub->add_option("--m", m, "diffusion exponent, > 1")->required();
    sub->add_option("--d", d, "sphere dimension")->capture_default_str();
  };

  auto* critical = app.add_subcommand("critical", "critical interaction strengths");
  model(critical);
  common(critical);

  auto* solve = app.add_subcommand("solve", "all equilibria at one kappa, with sampled densities");
  model(solve);
  solve->add_option("--kappa", kappa, "interaction strength")->required();
  solve->add_option("--resolution", resolution, "density samples per equilibrium")->capture_default_str();
  common(solve);

  auto* sweep = app.add_subcommand("sweep", "branches over a kappa grid");
  model(sweep);
  sweep->add_option("--kappa-min", kappa_min)->required();
  sweep->add_option("--kappa-max", kappa_max)->required();
  sweep->add_option("--points", points, "grid points")->capture_default_str();
  sweep->add_option("--spacing", spacing, "linear or log")->capture_default_str()->check(CLI::IsMember({"linear", "log"}));
  sweep->add_option("--outputs", outputs, "columns: s,phi,lambda,energy,gap,classification")
      ->delimiter(',')
      ->check(CLI::IsMember(std::vector<std::string>(sweep_output_names().begin(), sweep_output_names().end())));
  common(sweep);

  auto* verify = app.add_subcommand("verify", "property checks and oracle comparison");
  verify->add_option("--suite", suite, "lemmas, oracle or all")->capture_default_str()->check(CLI::IsMember({"lemmas", "oracle", "all"}));
  verify->add_option("--seed", seed, "random seed")->capture_default_str();
  verify->add_option("--grid-size", grid_size, "oracle grid nodes")->capture_default_str();
  common(verify);

  auto* minimize = app.add_subcommand("minimize", "direct minimization on a grid");
  model(minimize);
  minimize->add_option("--kappa", kappa, "interaction strength")->required();
  minimize->add_option("--seed", seed, "random seed")->capture_default_str();
  minimize->add_option("--grid-size", grid_size, "grid nodes")->capture_default_str();
  minimize->add_option("--starts", starts, "random starts")->capture_default_str();
  common(minimize);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    Settings cfg;
    cfg.tol.root = tol_root ? *tol_root : detail::env_double("SPHASE_TOL_ROOT", cfg.tol.root);
    cfg.tol.quad = tol_quad ? *tol_quad : detail::env_double("SPHASE_TOL_QUAD", cfg.tol.quad);
    cfg.threads = threads ? std::max(1u, *threads) : detail::env_threads();

    int status = 0;
    Table t;
    if (*critical) {
      t = cmd_critical(m, d, cfg);
    } else if (*solve) {
      t = cmd_solve(m, d, kappa, resolution, cfg);
    } else if (*sweep) {
      t = cmd_sweep(m, d, kappa_min, kappa_max, points, spacing, std::set<std::string>(outputs.begin(), outputs.end()), cfg);
    } else if (*verify) {
      bool pass = true;
      t = cmd_verify(suite, seed, grid_size, cfg, pass);
      if (!pass) status = exit_verification_failed;
    } else {
      t = cmd_minimize(m, d, kappa, grid_size, seed, starts);
    }
    emit(t, format, out_path, out);
    return status;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.exit_code();
  }
}

} // namespace sphase::cli
