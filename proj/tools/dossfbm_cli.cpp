// dossfbm: simulate / converge / verify.
// Exit codes: 0 pass, 1 numeric failure or failed claim, 2 usage or config error.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "dossfbm/bench.hpp"
#include "dossfbm/config.hpp"
#include "dossfbm/errors.hpp"
#include "dossfbm/scheme.hpp"

namespace fs = std::filesystem;
using namespace dossfbm;
using nlohmann::json;

namespace {

struct CommonFlags {
  std::string config;
  std::string out;
  std::optional<unsigned> workers;
  std::optional<std::uint64_t> seed_override;
  bool wall_ms = false;
};

RunConfig load(const CommonFlags& f) {
  RunConfig cfg = load_run_config(f.config);
  if (!f.out.empty()) cfg.output.dir = f.out;
  if (f.workers) cfg.workers = *f.workers;
  if (f.seed_override) {
    // The override replaces the run seed and shifts the bench seed list.
    cfg.scheme.seed = *f.seed_override;
    cfg.bench.seeds = BenchGrid::seed_range(*f.seed_override, static_cast<int>(cfg.bench.seeds.size()));
  }
  if (f.wall_ms) cfg.output.wall_ms_column = true;
  const std::string warning = validate(cfg.scheme);
  if (!warning.empty()) std::cerr << "warning: " << warning << '\n';
  return cfg;
}

fs::path prepare_dir(const RunConfig& cfg) {
  fs::path dir(cfg.output.dir);
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << content;
}

template <class Fn>
void write_stream(const fs::path& p, Fn&& fn) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  fn(out);
}

int cmd_simulate(const CommonFlags& flags) {
  const RunConfig cfg = load(flags);
  const SchemeConfig& sc = cfg.scheme;
  const CoefficientPair coeffs = make_coefficients(sc.coeffs);
  const SchemeRun run = solve_x_scheme(sc);
  const ReferenceRun ref = solve_x_reference_on(coeffs, run.path, sc.x0, sc.oracle_tol);
  Trajectory x_ref = restrict_to(ref.x_fine, static_cast<std::size_t>(sc.q));
  Trajectory y_ref = restrict_to(ref.y, static_cast<std::size_t>(sc.q));
  const double err = sup_error(run.x_n, x_ref);
  const double log_bound = run.constants.log_theorem_bound(sc.n);

  const fs::path dir = prepare_dir(cfg);
  json outputs = json::array();
  if (cfg.output.path_csv) {
    write_stream(dir / "path.csv", [&](std::ostream& os) { write_path_csv(os, run.path); });
    outputs.push_back("path.csv");
  }
  if (cfg.output.trajectories) {
    const std::pair<const char*, const Trajectory*> files[] = {
        {"X_n.csv", &run.x_n}, {"X_ref.csv", &x_ref}, {"Y_nn.csv", &run.y_nn}, {"Y_ref.csv", &y_ref}};
    for (const auto& [name, traj] : files) {
      write_stream(dir / name, [&](std::ostream& os) { write_trajectory_csv(os, *traj); });
      outputs.push_back(name);
    }
  }
  const json manifest = {{"command", "simulate"},
                         {"config", to_json(cfg)},
                         {"path_stats", to_json(run.stats)},
                         {"constants", to_json(run.constants)},
                         {"flow_radius", flow_radius(run.stats)},
                         {"flow_level", sc.level()},
                         {"sup_error", err},
                         {"theorem_bound_log", log_bound},
                         {"within_theorem_bound", err <= 1e-12 || std::log(err) <= log_bound},
                         {"outputs", outputs}};
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");
  std::printf("simulate: n=%d H=%.4g seed=%llu sup_error=%.6e log_bound=%.6g -> %s\n", sc.n,
              sc.hurst, static_cast<unsigned long long>(sc.seed), err, log_bound,
              dir.string().c_str());
  return 0;
}

int cmd_converge(const CommonFlags& flags) {
  const RunConfig cfg = load(flags);
  const ConvergenceReport report = run_convergence(convergence_config(cfg));
  const fs::path dir = prepare_dir(cfg);
  write_stream(dir / "convergence.csv", [&](std::ostream& os) {
    write_convergence_csv(os, report, cfg.output.wall_ms_column);
  });
  json summary = to_json(report);
  summary["run_config"] = to_json(cfg);
  write_file(dir / "convergence.json", summary.dump(2) + "\n");

  for (const auto& s : report.summaries) {
    if (s.exact_family) {
      std::printf("H=%.4g exact family: every error <= 1e-12, slope fit skipped\n", s.hurst);
    } else {
      std::printf("H=%.4g median order %.4f (threshold %.4f = %.3g * %.4f) %s, %d bound violations\n",
                  s.hurst, s.median_order, s.threshold, cfg.bench.slope_safety, s.target_order,
                  s.slope_ok ? "ok" : "BELOW", s.bound_violations);
    }
  }
  for (const auto& r : report.records) {
    if (!r.bound_ok) {
      std::fprintf(stderr, "bound violation: H=%.4g n=%d seed=%llu error=%.6e bound=%.6e\n",
                   r.hurst, r.n, static_cast<unsigned long long>(r.seed), r.sup_error, r.bound);
    }
  }
  std::printf("converge: %s (%.0f ms) -> %s\n", report.passed() ? "PASS" : "FAIL",
              report.total_wall_ms, dir.string().c_str());
  return report.passed() ? 0 : 1;
}

int cmd_verify(const CommonFlags& flags) {
  const RunConfig cfg = load(flags);
  const LemmaReport lemmas = run_lemma_suite(lemma_config(cfg));

  const double radius = flow_radius(lemmas.stats);
  const int level = cfg.bench.taylor_level;
  PiecewiseFlow flow(make_coefficients(cfg.scheme.coeffs), build_partition(radius, level));
  const PiecewiseC2Function fns[] = {kink_function(radius, level), smooth_function(radius, level),
                                     psi_function(flow, cfg.scheme.x0)};
  std::vector<TaylorReport> taylor;
  for (const auto& f : fns) {
    taylor.push_back(check_taylor_lemma(f, cfg.bench.taylor_samples, cfg.scheme.seed));
  }

  bool ok = lemmas.passed();
  json jl = json::array(), jt = json::array();
  for (const auto& r : lemmas.results) {
    jl.push_back(to_json(r));
    std::printf("%-18s worst ratio %.6g over %ld samples%s%s: %s\n", r.name.c_str(), r.worst_ratio,
                r.samples, r.vacuous ? " (vacuous)" : "", r.gating ? "" : " [informational]",
                r.passed ? "pass" : "FAIL");
    if (!r.passed) {
      std::fprintf(stderr, "%s violated: %s; witness %s (observed %.6e, bound %.6e)%s%s\n",
                   r.name.c_str(), r.statement.c_str(), r.witness.c_str(), r.worst_observed,
                   r.worst_bound, r.error.empty() ? "" : "; error: ", r.error.c_str());
    }
  }
  for (const auto& t : taylor) {
    jt.push_back(to_json(t));
    ok = ok && t.passed;
    std::printf("taylor/%-11s worst ratio %.6g over %ld samples: %s\n", t.name.c_str(),
                t.worst_ratio, t.samples, t.passed ? "pass" : "FAIL");
    if (!t.passed) {
      std::fprintf(stderr, "taylor bound violated for %s at x=%.17g y=%.17g\n", t.name.c_str(),
                   t.worst_x, t.worst_y);
    }
  }
  const fs::path dir = prepare_dir(cfg);
  const json out = {{"command", "verify"},
                    {"config", to_json(cfg)},
                    {"path_stats", to_json(lemmas.stats)},
                    {"constants", to_json(lemmas.constants)},
                    {"lemmas", jl},
                    {"taylor", jt},
                    {"passed", ok}};
  write_file(dir / "verify.json", out.dump(2) + "\n");
  std::printf("verify: %s -> %s\n", ok ? "PASS" : "FAIL", dir.string().c_str());
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Doss-Sussmann scheme for SDEs driven by fractional Brownian motion"};
  app.require_subcommand(1);
  CommonFlags flags;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", flags.config, "JSON run configuration")->required();
    sub->add_option("--out", flags.out, "output directory (overrides output.dir)");
    sub->add_option("--workers", flags.workers, "worker threads (0 = machine parallelism)");
    sub->add_option("--seed-override", flags.seed_override, "replace the configured seed");
  };
  CLI::App* sim = app.add_subcommand("simulate", "one seeded scheme run plus its reference");
  CLI::App* conv = app.add_subcommand("converge", "convergence study over the bench grid");
  CLI::App* ver = app.add_subcommand("verify", "lemma bound suite and the Taylor bound check");
  for (auto* sub : {sim, conv, ver}) add_common(sub);
  conv->add_flag("--wall-ms", flags.wall_ms, "add a wall_ms column to convergence.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*sim) return cmd_simulate(flags);
    if (*conv) return cmd_converge(flags);
    if (*ver) return cmd_verify(flags);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
