#include "dossfbm/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <string>

#include "dossfbm/errors.hpp"

namespace dossfbm {

using nlohmann::json;

std::vector<std::uint64_t> BenchGrid::seed_range(std::uint64_t first, int count) {
  std::vector<std::uint64_t> out;
  for (int i = 0; i < count; ++i) out.push_back(first + static_cast<std::uint64_t>(i));
  return out;
}

namespace {

// 1-based line of the first occurrence of "key" in the source text, or 0.
int line_of_key(const std::string& text, const std::string& key) {
  const auto pos = text.find('"' + key + '"');
  if (pos == std::string::npos) return 0;
  int line = 1;
  for (std::size_t i = 0; i < pos; ++i) line += text[i] == '\n';
  return line;
}

class Reader {
 public:
  Reader(const json& obj, std::string prefix, const std::string& text)
      : obj_(obj), prefix_(std::move(prefix)), text_(text) {
    if (!obj_.is_object()) fail(prefix_.empty() ? "(root)" : prefix_, "expected an object");
  }

  [[noreturn]] void fail(const std::string& field, const std::string& what) const {
    const std::string leaf = field.substr(field.rfind('.') + 1);
    const int line = line_of_key(text_, leaf);
    std::string msg = "config field '" + field + "': " + what;
    if (line > 0) msg += " (line " + std::to_string(line) + ")";
    throw ConfigError(msg, field);
  }

  std::string path(const std::string& key) const {
    return prefix_.empty() ? key : prefix_ + "." + key;
  }

  const json* get(const std::string& key) {
    seen_.insert(key);
    const auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  void require(const std::string& key) {
    if (obj_.find(key) == obj_.end()) fail(path(key), "missing required field");
  }

  void number(const std::string& key, double& out) {
    if (const json* v = get(key)) {
      if (!v->is_number()) fail(path(key), "expected a number");
      out = v->get<double>();
    }
  }

  template <class Int>
  void integer(const std::string& key, Int& out) {
    if (const json* v = get(key)) {
      if (!v->is_number_integer()) fail(path(key), "expected an integer");
      if (std::is_unsigned_v<Int> && v->is_number_integer() && !v->is_number_unsigned() &&
          v->get<long long>() < 0) {
        fail(path(key), "expected a nonnegative integer");
      }
      out = v->get<Int>();
    }
  }

  void boolean(const std::string& key, bool& out) {
    if (const json* v = get(key)) {
      if (!v->is_boolean()) fail(path(key), "expected true or false");
      out = v->get<bool>();
    }
  }

  void string(const std::string& key, std::string& out) {
    if (const json* v = get(key)) {
      if (!v->is_string()) fail(path(key), "expected a string");
      out = v->get<std::string>();
    }
  }

  template <class T>
  void list(const std::string& key, std::vector<T>& out) {
    if (const json* v = get(key)) {
      if (!v->is_array()) fail(path(key), "expected an array");
      std::vector<T> tmp;
      for (const auto& e : *v) {
        if constexpr (std::is_floating_point_v<T>) {
          if (!e.is_number()) fail(path(key), "expected an array of numbers");
        } else {
          if (!e.is_number_integer()) fail(path(key), "expected an array of integers");
          if (std::is_unsigned_v<T> && !e.is_number_unsigned()) {
            fail(path(key), "expected nonnegative integers");
          }
        }
        tmp.push_back(e.get<T>());
      }
      out = std::move(tmp);
    }
  }

  /// Nested object reader, or nullopt-like empty pointer if absent.
  const json* object(const std::string& key) {
    const json* v = get(key);
    if (v && !v->is_object()) fail(path(key), "expected an object");
    return v;
  }

  void reject_unknown() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (!seen_.count(it.key())) fail(path(it.key()), "unknown field");
    }
  }

  const std::string& text() const { return text_; }

 private:
  const json& obj_;
  std::string prefix_;
  const std::string& text_;
  std::set<std::string> seen_;
};

void read_coeffs(Reader& parent, CoefficientSpec& spec) {
  const json* node = parent.object("coeffs");
  if (!node) return;
  Reader r(*node, parent.path("coeffs"), parent.text());
  r.string("family", spec.family);
  r.list("params", spec.params);
  if (const json* ov = r.object("bounds_override")) {
    Reader o(*ov, r.path("bounds_override"), parent.text());
    std::optional<double>* slots[] = {&spec.M1, &spec.M2, &spec.M3, &spec.M4, &spec.M5, &spec.M6};
    for (int i = 0; i < 6; ++i) {
      const std::string key = "M" + std::to_string(i + 1);
      if (o.get(key)) {
        double v = 0.0;
        o.number(key, v);
        *slots[i] = v;
      }
    }
    o.reject_unknown();
  }
  r.reject_unknown();
}

void read_bench(Reader& parent, BenchGrid& b) {
  const json* node = parent.object("bench");
  if (!node) return;
  Reader r(*node, parent.path("bench"), parent.text());
  r.list("hurst_list", b.hurst_list);
  r.list("n_list", b.n_list);
  if (const json* s = r.get("seeds")) {
    // Either an explicit list or a count meaning 0..count-1.
    if (s->is_number_integer()) {
      const long long count = s->get<long long>();
      if (count < 1) r.fail(r.path("seeds"), "seed count must be >= 1");
      b.seeds = BenchGrid::seed_range(0, static_cast<int>(count));
    } else {
      r.list("seeds", b.seeds);
    }
  }
  r.integer("n_ref", b.n_ref);
  r.number("slope_safety", b.slope_safety);
  r.list("lemma_levels", b.lemma_levels);
  r.list("lemma_ns", b.lemma_ns);
  r.integer("lemma_seeds", b.lemma_seeds);
  r.integer("samples", b.samples);
  r.integer("taylor_samples", b.taylor_samples);
  r.integer("taylor_level", b.taylor_level);
  r.reject_unknown();
}

void read_output(Reader& parent, OutputOptions& o) {
  const json* node = parent.object("output");
  if (!node) return;
  Reader r(*node, parent.path("output"), parent.text());
  r.string("dir", o.dir);
  if (const json* e = r.object("emit")) {
    Reader em(*e, r.path("emit"), parent.text());
    em.boolean("path_csv", o.path_csv);
    em.boolean("trajectories", o.trajectories);
    em.boolean("wall_ms_column", o.wall_ms_column);
    em.reject_unknown();
  }
  r.reject_unknown();
}

}  // namespace

RunConfig parse_run_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    int line = 1;
    for (std::size_t i = 0; i < e.byte && i < text.size(); ++i) line += text[i] == '\n';
    throw ConfigError("config is not valid JSON near line " + std::to_string(line) + ": " +
                          e.what(),
                      "(document)");
  }
  RunConfig cfg;
  SchemeConfig& s = cfg.scheme;
  Reader r(doc, "", text);
  r.require("hurst");
  r.number("hurst", s.hurst);
  r.number("T", s.horizon);
  r.number("x0", s.x0);
  r.number("rho", s.rho);
  r.integer("n", s.n);
  r.integer("q", s.q);
  r.integer("seed", s.seed);
  r.number("oracle_tol", s.oracle_tol);
  std::string gen(to_string(s.generator));
  r.string("generator", gen);
  try {
    s.generator = parse_generator(gen);
  } catch (const ConfigError& e) {
    r.fail("generator", e.what());
  }
  r.integer("flow_level", s.flow_level);
  r.number("stat_inflation", s.stat_inflation);
  r.boolean("compensated", s.compensated);
  r.integer("workers", cfg.workers);
  read_coeffs(r, s.coeffs);
  read_bench(r, cfg.bench);
  read_output(r, cfg.output);
  r.reject_unknown();

  // Field-level validation of the scheme part; family names are checked by
  // building the coefficients.
  try {
    validate(s);
    make_coefficients(s.coeffs);
  } catch (const ConfigError& e) {
    const std::string field = e.field().empty() ? "coeffs.family" : e.field();
    const int line = line_of_key(text, field.substr(field.rfind('.') + 1));
    throw ConfigError("config field '" + field + "': " + e.what() +
                          (line > 0 ? " (line " + std::to_string(line) + ")" : ""),
                      field);
  }
  if (cfg.bench.samples < 100) {
    throw ConfigError("config field 'bench.samples': must be >= 100 per lemma", "bench.samples");
  }
  if (cfg.bench.taylor_samples < 1) {
    throw ConfigError("config field 'bench.taylor_samples': must be >= 1", "bench.taylor_samples");
  }
  if (cfg.bench.taylor_level < 1) {
    throw ConfigError("config field 'bench.taylor_level': must be >= 1", "bench.taylor_level");
  }
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'", "--config");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_run_config(ss.str());
}

json to_json(const RunConfig& cfg) {
  const SchemeConfig& s = cfg.scheme;
  json coeffs = {{"family", s.coeffs.family}, {"params", s.coeffs.params}};
  if (s.coeffs.has_override()) {
    json ov = json::object();
    const std::optional<double>* slots[] = {&s.coeffs.M1, &s.coeffs.M2, &s.coeffs.M3,
                                            &s.coeffs.M4, &s.coeffs.M5, &s.coeffs.M6};
    for (int i = 0; i < 6; ++i) {
      if (*slots[i]) ov["M" + std::to_string(i + 1)] = **slots[i];
    }
    coeffs["bounds_override"] = ov;
  }
  const BenchGrid& b = cfg.bench;
  return json{
      {"hurst", s.hurst},
      {"T", s.horizon},
      {"x0", s.x0},
      {"rho", s.rho},
      {"n", s.n},
      {"q", s.q},
      {"seed", s.seed},
      {"oracle_tol", s.oracle_tol},
      {"generator", std::string(to_string(s.generator))},
      {"flow_level", s.flow_level},
      {"stat_inflation", s.stat_inflation},
      {"compensated", s.compensated},
      {"workers", cfg.workers},
      {"coeffs", coeffs},
      {"bench",
       {{"hurst_list", b.hurst_list},
        {"n_list", b.n_list},
        {"seeds", b.seeds},
        {"n_ref", b.n_ref},
        {"slope_safety", b.slope_safety},
        {"lemma_levels", b.lemma_levels},
        {"lemma_ns", b.lemma_ns},
        {"lemma_seeds", b.lemma_seeds},
        {"samples", b.samples},
        {"taylor_samples", b.taylor_samples},
        {"taylor_level", b.taylor_level}}},
      {"output",
       {{"dir", cfg.output.dir},
        {"emit",
         {{"path_csv", cfg.output.path_csv},
          {"trajectories", cfg.output.trajectories},
          {"wall_ms_column", cfg.output.wall_ms_column}}}}},
  };
}

std::string serialize(const RunConfig& cfg) { return to_json(cfg).dump(2) + "\n"; }

ConvergenceConfig convergence_config(const RunConfig& cfg) {
  const SchemeConfig& s = cfg.scheme;
  ConvergenceConfig c;
  c.hurst_list = cfg.bench.hurst_list;
  c.n_list = cfg.bench.n_list;
  c.seeds = cfg.bench.seeds;
  c.coeffs = s.coeffs;
  c.horizon = s.horizon;
  c.x0 = s.x0;
  c.rho = s.rho;
  c.q = s.q;
  c.n_ref = cfg.bench.n_ref;
  c.oracle_tol = s.oracle_tol;
  c.slope_safety = cfg.bench.slope_safety;
  c.stat_inflation = s.stat_inflation;
  c.generator = s.generator;
  c.workers = cfg.workers;
  return c;
}

LemmaConfig lemma_config(const RunConfig& cfg) {
  const SchemeConfig& s = cfg.scheme;
  LemmaConfig c;
  c.coeffs = s.coeffs;
  c.hurst = s.hurst;
  c.horizon = s.horizon;
  c.x0 = s.x0;
  c.rho = s.rho;
  c.seed = s.seed;
  c.levels = cfg.bench.lemma_levels;
  c.samples = cfg.bench.samples;
  c.ns = cfg.bench.lemma_ns;
  c.trajectory_seeds = cfg.bench.lemma_seeds;
  c.q = s.q;
  c.oracle_tol = s.oracle_tol;
  c.stat_inflation = s.stat_inflation;
  c.generator = s.generator;
  c.workers = cfg.workers;
  return c;
}

namespace {

// JSON has no infinity; non-finite values are written as strings.
json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

}  // namespace

json to_json(const PathStats& st) {
  return {{"sup_norm", number(st.sup_norm)},
          {"holder_norm", number(st.holder_norm)},
          {"rho", st.rho},
          {"hurst", st.hurst},
          {"note", "sup and Hoelder norms are taken over the discrete simulation grid"}};
}

json to_json(const ConstantSet& c) {
  json j = {{"M", number(c.M)},
            {"C1", number(c.C1)},
            {"C1_remark", number(c.C1_remark)},
            {"C1_lemma", number(c.C1_lemma)},
            {"C1_variant", c.C1_variant},
            {"C2", number(c.C2)},
            {"C2_lemma", number(c.C2_lemma)},
            {"C3", number(c.C3)},
            {"C4", number(c.C4)},
            {"C5", number(c.C5)},
            {"C6", number(c.C6)},
            {"C7", number(c.C7)},
            {"C8", number(c.C8)},
            {"C_total", number(c.C_total)},
            {"log_C_total", number(c.log_C_total)}};
  const auto& in = c.inputs;
  j["inputs"] = {{"M1", in.bounds.M1}, {"M2", in.bounds.M2},       {"M3", in.bounds.M3},
                 {"M4", in.bounds.M4}, {"M5", in.bounds.M5},       {"M6", in.bounds.M6},
                 {"T", in.horizon},    {"x0", in.x0},              {"sup_norm", in.sup_norm},
                 {"rho", in.rho},      {"holder_norm", in.holder_norm}, {"hurst", in.hurst}};
  if (!c.overflow_note.empty()) j["overflow_note"] = c.overflow_note;
  return j;
}

json to_json(const ConvergenceReport& report) {
  const ConvergenceConfig& c = report.config;
  json summaries = json::array();
  for (const auto& s : report.summaries) {
    json js = {{"hurst", s.hurst},
               {"target_order", s.target_order},
               {"slope_safety", c.slope_safety},
               {"threshold", s.threshold},
               {"median_order", number(s.median_order)},
               {"seed_orders", s.seed_orders},
               {"median_errors", s.median_errors},
               {"median_error_decreasing", s.median_error_decreasing},
               {"bound_violations", s.bound_violations},
               {"slope_ok", s.slope_ok},
               {"exact_family", s.exact_family}};
    if (s.exact_family) js["note"] = "exact family: every error <= 1e-12, slope fit skipped";
    summaries.push_back(js);
  }
  json walls = json::array();
  for (const auto& r : report.records) {
    walls.push_back({{"H", r.hurst}, {"n", r.n}, {"seed", r.seed}, {"wall_ms", r.wall_ms}});
  }
  return {{"config",
           {{"hurst_list", c.hurst_list},
            {"n_list", c.n_list},
            {"seeds", c.seeds},
            {"coeffs", {{"family", c.coeffs.family}, {"params", c.coeffs.params}}},
            {"T", c.horizon},
            {"x0", c.x0},
            {"rho", c.rho},
            {"q", c.q},
            {"n_ref", c.reference_steps()},
            {"oracle_tol", c.oracle_tol},
            {"slope_safety", c.slope_safety},
            {"stat_inflation", c.stat_inflation},
            {"generator", std::string(to_string(c.generator))}}},
          {"summaries", summaries},
          {"bounds_ok", report.bounds_ok()},
          {"slopes_ok", report.slopes_ok()},
          {"passed", report.passed()},
          {"total_wall_ms", report.total_wall_ms},
          {"wall_times", walls}};
}

json to_json(const LemmaResult& r) {
  json j = {{"name", r.name},
            {"statement", r.statement},
            {"worst_ratio", number(r.worst_ratio)},
            {"worst_observed", number(r.worst_observed)},
            {"worst_bound", number(r.worst_bound)},
            {"witness", r.witness},
            {"samples", r.samples},
            {"vacuous", r.vacuous},
            {"gating", r.gating},
            {"passed", r.passed}};
  if (!r.error.empty()) j["error"] = r.error;
  return j;
}

json to_json(const TaylorReport& r) {
  return {{"name", r.name},         {"samples", r.samples},   {"worst_ratio", number(r.worst_ratio)},
          {"worst_x", r.worst_x},   {"worst_y", r.worst_y},   {"violations", r.violations},
          {"passed", r.passed}};
}

}  // namespace dossfbm
