#include "dossfbm/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <ostream>
#include <random>
#include <string>
#include <thread>
#include <tuple>

#include "dossfbm/constants.hpp"
#include "dossfbm/driver.hpp"
#include "dossfbm/errors.hpp"

namespace dossfbm {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

// Runs fn(0..count-1) on up to `workers` threads. The first failure by task
// index is rethrown after all workers finish.
template <class Fn>
void parallel_for(std::size_t count, unsigned workers, Fn&& fn) {
  if (workers == 0) workers = default_workers();
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(count, 1)));
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto body = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    body();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(body);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b, c, d);
  return buf;
}

constexpr double kExactTolerance = 1e-12;

}  // namespace

unsigned default_workers() {
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : hc;
}

// ---------------------------------------------------------------- convergence

int ConvergenceConfig::reference_steps() const {
  if (n_ref > 0) return n_ref;
  if (n_list.empty()) return 0;
  return q * *std::max_element(n_list.begin(), n_list.end());
}

void validate(const ConvergenceConfig& cfg) {
  if (cfg.n_list.size() < 4) {
    throw ConfigError("n_list needs at least 4 entries for a slope fit", "bench.n_list");
  }
  for (std::size_t i = 0; i < cfg.n_list.size(); ++i) {
    if (cfg.n_list[i] < 1) throw ConfigError("n_list entries must be >= 1", "bench.n_list");
    if (i > 0 && cfg.n_list[i] <= cfg.n_list[i - 1]) {
      throw ConfigError("n_list must be strictly increasing", "bench.n_list");
    }
  }
  if (cfg.hurst_list.empty()) throw ConfigError("hurst_list is empty", "bench.hurst_list");
  if (cfg.seeds.empty()) throw ConfigError("no seeds", "bench.seeds");
  if (cfg.q < 2) throw ConfigError("q must be >= 2", "q");
  if (!(cfg.slope_safety > 0.0 && cfg.slope_safety <= 1.0)) {
    throw ConfigError("slope_safety must lie in (0, 1]", "bench.slope_safety");
  }
  const int n_ref = cfg.reference_steps();
  const int n_max = cfg.n_list.back();
  if (n_ref < 8 * n_max) {
    throw ConfigError("n_ref must be at least 8 * max(n_list)", "bench.n_ref");
  }
  for (int n : cfg.n_list) {
    if (n_ref % (cfg.q * n) != 0) {
      throw ConfigError("n_ref must be a multiple of q * n for every n (grid alignment)",
                        "bench.n_ref");
    }
  }
  for (double h : cfg.hurst_list) {
    SchemeConfig sc;
    sc.n = n_max;
    sc.q = cfg.q;
    sc.hurst = h;
    sc.horizon = cfg.horizon;
    sc.x0 = cfg.x0;
    sc.rho = cfg.rho;
    sc.coeffs = cfg.coeffs;
    sc.oracle_tol = cfg.oracle_tol;
    sc.generator = cfg.generator;
    sc.stat_inflation = cfg.stat_inflation;
    validate(sc);
  }
  if (cfg.generator == FbmGenerator::cholesky && static_cast<std::size_t>(n_ref) > kCholeskyCap) {
    throw ConfigError("n_ref exceeds the cholesky generator cap", "generator");
  }
}

double fit_loglog_slope(const std::vector<int>& ns, const std::vector<double>& errors) {
  if (ns.size() != errors.size() || ns.size() < 2) {
    throw DomainError("slope fit needs matching vectors with at least two points");
  }
  double sx = 0.0, sy = 0.0;
  const double m = static_cast<double>(ns.size());
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (!(errors[i] > 0.0)) throw DomainError("slope fit needs positive errors");
    sx += std::log(static_cast<double>(ns[i]));
    sy += std::log(errors[i]);
  }
  const double mx = sx / m, my = sy / m;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const double dx = std::log(static_cast<double>(ns[i])) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(errors[i]) - my);
  }
  if (sxx == 0.0) throw DomainError("slope fit needs distinct n values");
  return sxy / sxx;
}

bool ConvergenceReport::bounds_ok() const {
  return std::all_of(records.begin(), records.end(), [](const auto& r) { return r.bound_ok; });
}

bool ConvergenceReport::slopes_ok() const {
  return std::all_of(summaries.begin(), summaries.end(), [](const auto& s) { return s.slope_ok; });
}

ConvergenceReport run_convergence(const ConvergenceConfig& cfg) {
  validate(cfg);
  const auto start = Clock::now();
  const CoefficientPair coeffs = make_coefficients(cfg.coeffs);
  const int n_ref = cfg.reference_steps();
  const std::size_t n_seeds = cfg.seeds.size();
  const std::size_t n_count = cfg.n_list.size();

  ConvergenceReport report;
  report.config = cfg;
  report.records.resize(cfg.hurst_list.size() * n_seeds * n_count);

  parallel_for(cfg.hurst_list.size() * n_seeds, cfg.workers, [&](std::size_t task) {
    const std::size_t hi = task / n_seeds;
    const std::size_t si = task % n_seeds;
    const double hurst = cfg.hurst_list[hi];
    const std::uint64_t seed = cfg.seeds[si];

    const FbmPath path = generate_path(cfg.generator, static_cast<std::size_t>(n_ref),
                                       cfg.horizon, hurst, seed);
    const PathStats stats = path_stats(path, cfg.rho);
    const ConstantSet constants =
        compute_constants(coeffs.bounds(), cfg.horizon, cfg.x0, stats, cfg.stat_inflation);
    const ReferenceRun ref = solve_x_reference_on(coeffs, path, cfg.x0, cfg.oracle_tol);

    for (std::size_t ni = 0; ni < n_count; ++ni) {
      const auto t0 = Clock::now();
      const int n = cfg.n_list[ni];
      SchemeConfig sc;
      sc.n = n;
      sc.q = cfg.q;
      sc.hurst = hurst;
      sc.horizon = cfg.horizon;
      sc.x0 = cfg.x0;
      sc.rho = cfg.rho;
      sc.seed = seed;
      sc.coeffs = cfg.coeffs;
      sc.oracle_tol = cfg.oracle_tol;
      sc.generator = cfg.generator;
      sc.stat_inflation = cfg.stat_inflation;
      const FbmPath sub = path.subsample(static_cast<std::size_t>(n_ref / (cfg.q * n)));
      const SchemeRun run = solve_x_scheme_on(coeffs, sub, sc);
      const Trajectory ref_nodes = restrict_to(ref.x_fine, static_cast<std::size_t>(n_ref / n));

      ConvergenceRecord& rec = report.records[(hi * n_count + ni) * n_seeds + si];
      rec.hurst = hurst;
      rec.n = n;
      rec.seed = seed;
      rec.q = cfg.q;
      rec.rho = cfg.rho;
      rec.sup_error = sup_error(run.x_n, ref_nodes);
      rec.log_bound = constants.log_theorem_bound(n);
      rec.bound = std::exp(rec.log_bound);
      // Errors at roundoff level pass even when the bound is exactly zero.
      rec.bound_ok = rec.sup_error <= kExactTolerance || std::log(rec.sup_error) <= rec.log_bound;
      rec.wall_ms = elapsed_ms(t0);
    }
  });

  for (std::size_t hi = 0; hi < cfg.hurst_list.size(); ++hi) {
    SlopeSummary s;
    s.hurst = cfg.hurst_list[hi];
    s.target_order = 2.0 * (s.hurst - cfg.rho);
    s.threshold = cfg.slope_safety * s.target_order;
    bool all_exact = true;
    for (std::size_t si = 0; si < n_seeds; ++si) {
      std::vector<double> errs(n_count);
      bool exact = true;
      for (std::size_t ni = 0; ni < n_count; ++ni) {
        const auto& rec = report.records[(hi * n_count + ni) * n_seeds + si];
        errs[ni] = rec.sup_error;
        exact = exact && rec.sup_error <= kExactTolerance;
        if (!rec.bound_ok) ++s.bound_violations;
      }
      if (exact) continue;
      all_exact = false;
      std::vector<int> ns;
      std::vector<double> es;
      for (std::size_t ni = 0; ni < n_count; ++ni) {
        if (errs[ni] > 0.0) {
          ns.push_back(cfg.n_list[ni]);
          es.push_back(errs[ni]);
        }
      }
      if (ns.size() >= 4) s.seed_orders.push_back(-fit_loglog_slope(ns, es));
    }
    for (std::size_t ni = 0; ni < n_count; ++ni) {
      std::vector<double> errs;
      for (std::size_t si = 0; si < n_seeds; ++si) {
        errs.push_back(report.records[(hi * n_count + ni) * n_seeds + si].sup_error);
      }
      s.median_errors.push_back(median(errs));
    }
    s.median_error_decreasing = true;
    for (std::size_t ni = 1; ni < n_count; ++ni) {
      if (!(s.median_errors[ni] < s.median_errors[ni - 1])) s.median_error_decreasing = false;
    }
    s.exact_family = all_exact;
    if (all_exact) {
      s.median_order = std::numeric_limits<double>::quiet_NaN();
      s.slope_ok = true;
    } else {
      s.median_order = median(s.seed_orders);
      s.slope_ok = s.median_order >= s.threshold;
    }
    report.summaries.push_back(std::move(s));
  }

  std::sort(report.records.begin(), report.records.end(), [](const auto& a, const auto& b) {
    return std::tie(a.hurst, a.n, a.seed) < std::tie(b.hurst, b.n, b.seed);
  });
  report.total_wall_ms = elapsed_ms(start);
  return report;
}

void write_convergence_csv(std::ostream& os, const ConvergenceReport& report,
                           bool include_wall_ms) {
  os << "H,n,seed,q,rho,sup_error,bound,bound_ok";
  if (include_wall_ms) os << ",wall_ms";
  os << '\n';
  char line[256];
  for (const auto& r : report.records) {
    std::snprintf(line, sizeof line, "%.17g,%d,%llu,%d,%.17g,%.17g,%.17g,%d", r.hurst, r.n,
                  static_cast<unsigned long long>(r.seed), r.q, r.rho, r.sup_error, r.bound,
                  r.bound_ok ? 1 : 0);
    os << line;
    if (include_wall_ms) {
      std::snprintf(line, sizeof line, ",%.3f", r.wall_ms);
      os << line;
    }
    os << '\n';
  }
}

// ---------------------------------------------------------------- lemmas

void validate(const LemmaConfig& cfg) {
  if (cfg.samples < 100) throw ConfigError("samples must be >= 100 per lemma", "bench.samples");
  if (cfg.levels.empty()) throw ConfigError("no flow levels", "bench.lemma_levels");
  for (int l : cfg.levels) {
    if (l < 1) throw ConfigError("flow levels must be >= 1", "bench.lemma_levels");
  }
  if (cfg.ns.empty()) throw ConfigError("no trajectory resolutions", "bench.lemma_ns");
  if (cfg.trajectory_seeds < 1) {
    throw ConfigError("lemma_seeds must be >= 1", "bench.lemma_seeds");
  }
  for (int n : cfg.ns) {
    SchemeConfig sc;
    sc.n = n;
    sc.q = cfg.q;
    sc.hurst = cfg.hurst;
    sc.horizon = cfg.horizon;
    sc.x0 = cfg.x0;
    sc.rho = cfg.rho;
    sc.coeffs = cfg.coeffs;
    sc.oracle_tol = cfg.oracle_tol;
    sc.generator = cfg.generator;
    sc.stat_inflation = cfg.stat_inflation;
    validate(sc);
  }
}

bool LemmaReport::passed() const {
  return std::all_of(results.begin(), results.end(),
                     [](const auto& r) { return !r.gating || r.passed; });
}

namespace {

// Accumulates observed/bound ratios for one claim.
class RatioTracker {
 public:
  RatioTracker(std::string name, std::string statement, bool gating = true) {
    r_.name = std::move(name);
    r_.statement = std::move(statement);
    r_.gating = gating;
    r_.vacuous = true;
  }

  void add(double observed, double bound, double slack, const std::string& witness) {
    ++r_.samples;
    const bool ok = observed <= bound + slack;
    if (!ok) failed_ = true;
    if (bound > 0.0) r_.vacuous = false;
    // A failing sample has ratio > 1, so the worst ratio is also the witness.
    const double ratio = observed / (bound + slack);
    if (r_.samples == 1 || ratio > r_.worst_ratio) {
      r_.worst_ratio = ratio;
      r_.worst_observed = observed;
      r_.worst_bound = bound;
      r_.witness = witness;
    }
  }

  void merge(const RatioTracker& other) {
    r_.samples += other.r_.samples;
    r_.vacuous = r_.vacuous && other.r_.vacuous;
    failed_ = failed_ || other.failed_;
    if (other.r_.worst_ratio > r_.worst_ratio) {
      r_.worst_ratio = other.r_.worst_ratio;
      r_.worst_observed = other.r_.worst_observed;
      r_.worst_bound = other.r_.worst_bound;
      r_.witness = other.r_.witness;
    }
    if (r_.error.empty()) r_.error = other.r_.error;
  }

  void fail(const std::string& what) {
    failed_ = true;
    if (r_.error.empty()) r_.error = what;
  }

  LemmaResult finish() const {
    LemmaResult out = r_;
    out.passed = !failed_ && out.error.empty() && out.samples > 0;
    if (out.samples == 0 && out.error.empty()) out.error = "no samples evaluated";
    if (!std::isfinite(out.worst_ratio)) out.worst_ratio = std::numeric_limits<double>::max();
    return out;
  }

 private:
  LemmaResult r_;
  bool failed_ = false;
};

struct TrajectoryLemmas {
  RatioTracker l5{"lemma5", "|Y - Y^n| <= exp(C1 T) C2 / n^2"};
  RatioTracker l6{"lemma6", "|Y^{n,n}_s - Y^{n,n}_{t_k}| <= C4 (s - t_k)"};
  RatioTracker l7{"lemma7", "|Y^n - Y^{n,n}| <= C6 T (T/n)^{2(H-rho)} exp(C7 T)"};
  RatioTracker g_bound{"drift_bound", "|g^n(u, z)| <= M1 exp(M2 |u|)"};
  RatioTracker h1_bound{"correction_bound", "|h1^n(B_{t_k}, Y^{n,n}_{t_k})| <= C3", false};
  RatioTracker y_bound{"truncation_bound", "sup |Y|, |Y^n|, |Y^{n,n}| <= M"};
};

std::string sample_note(double z, double u, int l) {
  return fmt("z=%.17g u=%.17g l=%.0f", z, u, static_cast<double>(l));
}

}  // namespace

LemmaReport run_lemma_suite(const LemmaConfig& cfg) {
  validate(cfg);
  const CoefficientPair coeffs = make_coefficients(cfg.coeffs);
  const CoefficientBounds& mb = coeffs.bounds();
  LemmaReport report;

  const int n_max = *std::max_element(cfg.ns.begin(), cfg.ns.end());
  const FbmPath base = generate_path(cfg.generator, static_cast<std::size_t>(cfg.q * n_max),
                                     cfg.horizon, cfg.hurst, cfg.seed);
  report.stats = path_stats(base, cfg.rho);
  report.constants =
      compute_constants(mb, cfg.horizon, cfg.x0, report.stats, cfg.stat_inflation);
  const ConstantSet& cs = report.constants;
  const double R = flow_radius(report.stats);
  // z is sampled from [-M, M]; M = 0 (nothing moves) falls back to 1.
  const double M = cs.M > 0.0 ? cs.M : 1.0;

  RatioTracker l1{"lemma1", "|phi - phi^l| <= M2^2 M5 R^3 / (6 l^2) exp(M2 R)"};
  RatioTracker l2{"lemma2", "|phi^l - Psi^l| <= M3 M5^2 R^3 / (6 l^2) exp(2 M2 R)"};
  RatioTracker l3{"lemma3", "|Psi^l(z1,u) - Psi^l(z2,u)| <= |z1 - z2| exp(2 M2 R)"};
  RatioTracker l4{"lemma4", "|phi^l(z1,u) - phi^l(z2,u)| <= |z1 - z2| exp(2 M2 R)"};

  // Flow lemmas: the reference flow is accurate to about 1e-11, node
  // recursions accumulate a few ulp per cell.
  const double oracle_tol = 1e-13;
  for (int l : cfg.levels) {
    PiecewiseFlow flow(coeffs, build_partition(R, l), M, 4096);
    std::mt19937_64 rng(cfg.seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(l));
    std::uniform_real_distribution<double> zdist(-M, M), udist(-R, R);
    const double lip = cs.flow_lipschitz();
    const double b1 = cs.phi_vs_phil_bound(l);
    const double b2 = cs.phil_vs_psi_bound(l);
    for (int s = 0; s < cfg.samples; ++s) {
      double z1, z2, u;
      // Box corners first, then uniform samples.
      if (s < 4) {
        z1 = (s & 1) ? M : -M;
        u = (s & 2) ? R : -R;
        z2 = s == 0 ? z1 : -z1;
      } else {
        z1 = zdist(rng);
        z2 = zdist(rng);
        u = udist(rng);
      }
      const std::string note = sample_note(z1, u, l);
      try {
        const double scale = 1.0 + std::abs(z1) + std::abs(u);
        const double exact = solve_phi_reference(coeffs, z1, u, oracle_tol);
        const double phil1 = flow.phi_l(z1, u);
        const double psi1 = flow.psi(z1, u);
        l1.add(std::abs(exact - phil1), b1, 1e-11 * scale, note);
        l2.add(std::abs(phil1 - psi1), b2, 1e-12 * scale * l, note);
        const double dz = std::abs(z1 - z2);
        const std::string pair_note = note + fmt(" z2=%.17g", z2);
        const double scale2 = 1.0 + std::abs(z1) + std::abs(z2);
        l3.add(std::abs(psi1 - flow.psi(z2, u)), dz * lip, 1e-13 * scale2 * l, pair_note);
        l4.add(std::abs(phil1 - flow.phi_l(z2, u)), dz * lip, 1e-13 * scale2 * l, pair_note);
      } catch (const std::exception& e) {
        l1.fail(std::string(e.what()) + " at " + note);
      }
    }
  }

  // Trajectory lemmas, one task per (n, seed).
  const std::size_t n_seeds = static_cast<std::size_t>(cfg.trajectory_seeds);
  std::vector<TrajectoryLemmas> parts(cfg.ns.size() * n_seeds);
  parallel_for(parts.size(), cfg.workers, [&](std::size_t task) {
    const int n = cfg.ns[task / n_seeds];
    const std::uint64_t seed = cfg.seed + 1 + task % n_seeds;
    TrajectoryLemmas& out = parts[task];
    const std::string where = fmt("n=%.0f seed=%.0f", n, static_cast<double>(seed));
    try {
      const FbmPath path = generate_path(cfg.generator, static_cast<std::size_t>(cfg.q * n),
                                         cfg.horizon, cfg.hurst, seed);
      const PathStats st = path_stats(path, cfg.rho);
      const ConstantSet c = compute_constants(mb, cfg.horizon, cfg.x0, st, cfg.stat_inflation);
      const double guard = blowup_guard(c, cfg.x0);
      PiecewiseFlow flow(coeffs, build_partition(flow_radius(st), n), guard);

      const Trajectory y = integrate_y_exact(coeffs, path, cfg.x0, cfg.oracle_tol);
      const Trajectory yl = integrate_y_l(flow, path, cfg.x0, cfg.oracle_tol);
      SchemeStepOptions opts;
      opts.guard_bound = guard;
      const SchemeYResult ynn = step_scheme_y(flow, path, cfg.x0, n, opts);

      const double b5 = std::exp(c.log_y_vs_yl_bound(n));
      const double b7 = std::exp(c.log_yl_vs_ynn_bound(n));
      const double slack = 2.0 * cfg.oracle_tol + 1e-12;
      for (std::size_t i = 0; i < path.times.size(); ++i) {
        const std::string at = where + fmt(" t=%.17g", path.times[i]);
        out.l5.add(std::abs(y.values[i] - yl.values[i]), b5, slack, at);
        out.l7.add(std::abs(yl.values[i] - ynn.fine.values[i]), b7, slack, at);
        const double ymax = std::max({std::abs(y.values[i]), std::abs(yl.values[i]),
                                      std::abs(ynn.fine.values[i])});
        out.y_bound.add(ymax, c.M, 1e-12 * (1.0 + c.M), at);
      }
      const auto q = static_cast<std::size_t>(cfg.q);
      for (int k = 0; k < n; ++k) {
        const std::size_t base = static_cast<std::size_t>(k) * q;
        const double yk = ynn.fine.values[base];
        const double bk = path.values[base];
        for (std::size_t j = 1; j <= q; ++j) {
          const double ds = path.times[base + j] - path.times[base];
          out.l6.add(std::abs(ynn.fine.values[base + j] - yk), c.C4 * ds,
                     1e-12 * (1.0 + std::abs(yk)),
                     where + fmt(" k=%.0f s=%.17g", k, path.times[base + j]));
        }
        const DriftValue dv = drift(flow, bk, yk);
        const std::string at = where + fmt(" k=%.0f u=%.17g z=%.17g", k, bk, yk);
        out.g_bound.add(std::abs(dv.g), mb.M1 * std::exp(mb.M2 * std::abs(bk)),
                        1e-12 * (1.0 + mb.M1), at);
        out.h1_bound.add(std::abs(dv.h1), c.C3, 1e-12 * (1.0 + c.C3), at);
      }
    } catch (const std::exception& e) {
      out.l5.fail(std::string(e.what()) + " at " + where);
    }
  });

  TrajectoryLemmas total;
  for (const auto& p : parts) {
    total.l5.merge(p.l5);
    total.l6.merge(p.l6);
    total.l7.merge(p.l7);
    total.g_bound.merge(p.g_bound);
    total.h1_bound.merge(p.h1_bound);
    total.y_bound.merge(p.y_bound);
  }
  for (const auto* t : {&l1, &l2, &l3, &l4, &total.l5, &total.l6, &total.l7, &total.g_bound,
                        &total.h1_bound, &total.y_bound}) {
    report.results.push_back(t->finish());
  }
  return report;
}

// ---------------------------------------------------------------- Taylor bound

double taylor_bound(const PiecewiseC2Function& f, double x, double y) {
  double bound = 0.5 * f.second_derivative_bound * (y - x) * (y - x);
  // Nodes u_{j+1}..u_{j+k} with x in (u_j, u_{j+1}] and y in (u_{j+k}, u_{j+k+1}].
  const auto first = std::lower_bound(f.nodes.begin(), f.nodes.end(), x);
  for (auto it = first; it != f.nodes.end() && *it < y; ++it) {
    const double jump = std::abs(f.right_derivative(*it) - f.left_derivative(*it));
    bound += jump * (y - *it);
  }
  return bound;
}

TaylorReport check_taylor_lemma(const PiecewiseC2Function& f, long samples, std::uint64_t seed) {
  if (f.nodes.size() < 2 || !std::is_sorted(f.nodes.begin(), f.nodes.end()) ||
      std::adjacent_find(f.nodes.begin(), f.nodes.end()) != f.nodes.end()) {
    throw DomainError("Taylor check needs a strictly increasing partition with >= 2 nodes");
  }
  if (!(f.second_derivative_bound >= 0.0)) {
    throw DomainError("second derivative bound must be nonnegative");
  }
  TaylorReport rep;
  rep.name = f.name;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(f.nodes.front(), f.nodes.back());
  for (long s = 0; s < samples; ++s) {
    double x = dist(rng), y = dist(rng);
    if (x > y) std::swap(x, y);
    if (x == y || x == f.nodes.front()) continue;
    const double fx = f.value(x), fy = f.value(y);
    const double lin = f.right_derivative(x) * (y - x);
    const double observed = std::abs(fy - fx - lin);
    const double bound = taylor_bound(f, x, y);
    const double slack =
        64.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(fx) + std::abs(fy) +
                                                         std::abs(lin));
    ++rep.samples;
    if (observed > bound + slack) ++rep.violations;
    const double ratio = observed / (bound + slack);
    if (ratio > rep.worst_ratio) {
      rep.worst_ratio = ratio;
      rep.worst_x = x;
      rep.worst_y = y;
    }
  }
  rep.passed = rep.samples > 0 && rep.violations == 0;
  return rep;
}

PiecewiseC2Function kink_function(double radius, int level) {
  PiecewiseC2Function f;
  f.name = "kink";
  f.nodes = build_partition(radius, level).nodes();
  f.value = [](double x) { return std::abs(x); };
  f.right_derivative = [](double x) { return x >= 0.0 ? 1.0 : -1.0; };
  f.left_derivative = [](double x) { return x > 0.0 ? 1.0 : -1.0; };
  f.second_derivative_bound = 0.0;
  return f;
}

PiecewiseC2Function smooth_function(double radius, int level) {
  PiecewiseC2Function f;
  f.name = "smooth";
  f.nodes = build_partition(radius, level).nodes();
  f.value = [](double x) { return std::sin(x); };
  f.right_derivative = [](double x) { return std::cos(x); };
  f.left_derivative = f.right_derivative;
  f.second_derivative_bound = 1.0;
  return f;
}

PiecewiseC2Function psi_function(const PiecewiseFlow& flow, double z) {
  PiecewiseC2Function f;
  f.name = "psi";
  f.nodes = flow.partition().nodes();
  f.value = [&flow, z](double u) { return flow.psi(z, u); };
  f.right_derivative = [&flow, z](double u) { return flow.psi_du(z, u, Side::right); };
  f.left_derivative = [&flow, z](double u) { return flow.psi_du(z, u, Side::left); };
  // Each cell is a quadratic with second derivative sigma*sigma' at its anchor.
  const auto nodes = flow.psi_nodes(z);
  double c = 0.0;
  for (double v : nodes->sigma_dsigma) c = std::max(c, std::abs(v));
  f.second_derivative_bound = c;
  return f;
}

}  // namespace dossfbm
