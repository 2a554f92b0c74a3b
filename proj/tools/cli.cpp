#include "kpzlab/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>

#include "kpzlab/asep.hpp"
#include "kpzlab/errors.hpp"
#include "kpzlab/kpz_exact.hpp"
#include "kpzlab/parallel.hpp"
#include "kpzlab/replica.hpp"
#include "kpzlab/rng.hpp"
#include "kpzlab/she.hpp"
#include "kpzlab/stats.hpp"

#ifndef KPZLAB_VERSION
#define KPZLAB_VERSION "0.0.0"
#endif

namespace kpz::cli {

const char* version() { return KPZLAB_VERSION; }

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

using json = nlohmann::ordered_json;

struct GlobalArgs {
  std::uint64_t seed = 1;
  std::string out;
  std::size_t trajectories = 1000;
  unsigned threads = 1;
};

struct ExactArgs {
  double t = 100.0;
  double s_min = -10.0, s_max = 10.0, s_step = 0.5;
  int m = FredholmDefaults::nodes;
};

struct TwArgs {
  double sigma_min = -6.0, sigma_max = 4.0, sigma_step = 0.1;
  int m = FredholmDefaults::nodes;
};

struct AsepArgs {
  double p = 0.0;
  double t = 100.0;
  long halfwidth = 0;
  std::vector<double> observe;
  std::vector<long> tags;
};

struct SheArgs {
  std::string solver = "lattice";
  double t = 1.0;
  double dt = 0.0;
  double dx = 0.05;
  long window = 0;
  std::vector<long> sites{0};
};

struct ReplicaArgs {
  int n = 1;
  double t = 1.0;
  double dx = 0.05;
  double dtau = 0.0;
  double half_width = 0.0;
  bool richardson = false;
};

struct CompareArgs {
  std::string samples;
  std::string column;
  std::string where;
  std::string reference = "tw-gue";
  std::string reference_column;
  std::string standardize = "auto";
  bool negate = false;
  double ks_threshold = 0.1;
  int bootstrap = 1000;
  double alpha = 0.05;
  std::string expect_skewness;
};

struct Column {
  std::string name, type, description;
};

/// Finished output of one subcommand, written only after all work succeeded.
struct Artifact {
  std::string extension;  // "csv" or "json"
  std::string body;
  std::vector<Column> columns;
  json config;
};

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::numeric: return kExitNumeric;
    case ErrorKind::resource:
    case ErrorKind::containment: return kExitResource;
    default: return kExitValidation;
  }
}

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::vector<double> make_grid(double lo, double hi, double step, const char* what) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(step > 0.0))
    throw ArgumentError(std::string(what) + ": grid needs finite bounds and a positive step",
                        {{"min", lo}, {"max", hi}, {"step", step}});
  if (hi < lo) throw ArgumentError(std::string(what) + ": empty grid (max < min)", {{"min", lo}, {"max", hi}});
  const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
  if (count > 1000000) throw ResourceError(std::string(what) + ": grid too large", {{"points", double(count)}});
  std::vector<double> grid(count);
  for (std::size_t i = 0; i < count; ++i) grid[i] = lo + static_cast<double>(i) * step;
  return grid;
}

// ---------------------------------------------------------------------------
// Subcommands

Artifact cmd_exact(const ExactArgs& a, const GlobalArgs& g) {
  CrossoverParams{0.0, a.t}.validate();
  const auto grid = make_grid(a.s_min, a.s_max, a.s_step, "exact");
  std::vector<DeterminantResult> rows(grid.size());
  parallel_for(grid.size(), g.threads, [&](std::size_t i) { rows[i] = kpz_genfun({grid[i], a.t}, a.m); });
  Artifact out{"csv", "s,t,det,doubling_gap\n", {}, {}};
  for (std::size_t i = 0; i < grid.size(); ++i)
    out.body += format_double(grid[i]) + "," + format_double(a.t) + "," + format_double(rows[i].value) + "," +
                format_double(rows[i].doubling_gap) + "\n";
  out.columns = {{"s", "float", "shift of the double-exponential test function"},
                 {"t", "float", "KPZ time"},
                 {"det", "float", "generating function det(1 - K_{s,t}) on [0, inf)"},
                 {"doubling_gap", "float", "|det_m - det_2m|"}};
  out.config = {{"t", a.t}, {"s_min", a.s_min}, {"s_max", a.s_max}, {"s_step", a.s_step}, {"m", a.m}};
  return out;
}

Artifact cmd_tw(const TwArgs& a, const GlobalArgs& g) {
  const auto grid = make_grid(a.sigma_min, a.sigma_max, a.sigma_step, "tw");
  std::vector<double> values(grid.size());
  parallel_for(grid.size(), g.threads, [&](std::size_t i) { values[i] = tw_gue_cdf(grid[i], a.m); });
  Artifact out{"csv", "sigma,F\n", {}, {}};
  for (std::size_t i = 0; i < grid.size(); ++i)
    out.body += format_double(grid[i]) + "," + format_double(values[i]) + "\n";
  out.columns = {{"sigma", "float", "argument"}, {"F", "float", "Tracy-Widom GUE distribution function"}};
  out.config = {{"sigma_min", a.sigma_min}, {"sigma_max", a.sigma_max}, {"sigma_step", a.sigma_step}, {"m", a.m}};
  return out;
}

void require_trajectories(const GlobalArgs& g) {
  if (g.trajectories == 0) throw ArgumentError("at least one trajectory is required", {{"trajectories", 0.0}});
}

Artifact cmd_asep(const AsepArgs& a, const GlobalArgs& g) {
  require_trajectories(g);
  const AsepParams params = AsepParams::from_p(a.p);
  params.validate();
  const long halfwidth = a.halfwidth > 0 ? a.halfwidth : min_step_halfwidth(a.t);

  std::vector<std::string> chunks(g.trajectories);
  parallel_for(g.trajectories, g.threads, [&](std::size_t i) {
    StepRunOptions options;
    options.observe_at = a.observe;
    options.tags = a.tags;
    options.trajectory = i;
    const auto run = simulate_step_ic(params, halfwidth, a.t, g.seed, options);
    std::string& text = chunks[i];
    for (const auto& obs : run.observations) {
      text += std::to_string(i) + "," + format_double(obs.time) + "," + std::to_string(obs.current) + "," +
              std::to_string(obs.height);
      for (const long x : obs.tagged_positions) text += "," + std::to_string(x);
      text += "\n";
    }
  });

  Artifact out{"csv", "trajectory,time,current,height", {}, {}};
  out.columns = {{"trajectory", "int", "trajectory index (random substream)"},
                 {"time", "float", "observation time"},
                 {"current", "int", "N(t): net particle crossings of bond (0,1), right to left"},
                 {"height", "int", "h(0,t) = 2 N(t)"}};
  for (const long tag : a.tags) {
    out.body += ",x_" + std::to_string(tag);
    out.columns.push_back({"x_" + std::to_string(tag), "int", "position of the particle starting at site " +
                                                               std::to_string(tag)});
  }
  out.body += "\n";
  for (const auto& c : chunks) out.body += c;
  out.config = {{"p", params.p},       {"q", params.q}, {"t", a.t}, {"halfwidth", halfwidth},
                {"observe", a.observe}, {"tags", a.tags}};
  return out;
}

Artifact cmd_she(const SheArgs& a, const GlobalArgs& g) {
  require_trajectories(g);
  if (a.sites.empty()) throw ArgumentError("she: at least one site is required");
  const bool semi = a.solver == "semidiscrete";
  if (!semi && a.solver != "lattice") throw ArgumentError("she: solver must be 'lattice' or 'semidiscrete'");

  json config = {{"solver", a.solver}, {"t", a.t}, {"sites", a.sites}};
  long window = 0;
  double dt = 0.0;
  LatticeSheParams lattice;
  if (semi) {
    window = a.window > 0 ? a.window : min_semidiscrete_window(a.t) + 8;
    dt = a.dt > 0.0 ? a.dt : 1e-3;
    config["dt"] = dt;
    config["window"] = window;
  } else {
    lattice.dx = a.dx;
    lattice.dt = a.dt;
    lattice.half_sites = a.window;
    lattice = lattice.resolved(a.t);
    config["dx"] = lattice.dx;
    config["dt"] = lattice.dt;
    config["window"] = lattice.half_sites;
  }

  std::vector<std::string> chunks(g.trajectories);
  parallel_for(g.trajectories, g.threads, [&](std::size_t i) {
    PolymerState state;
    if (semi) {
      SemiDiscreteOptions options;
      options.trajectory = i;
      state = simulate_semidiscrete(a.t, window, dt, g.seed, options);
    } else {
      state = simulate_lattice_she(lattice, a.t, g.seed, i);
    }
    std::string& text = chunks[i];
    for (const long site : a.sites) {
      text += std::to_string(i) + "," + std::to_string(site) + "," +
              format_double(static_cast<double>(site) * state.dx) + "," + format_double(state.at(site)) + "," +
              format_double(cole_hopf_height(state, site)) + "\n";
    }
  });

  Artifact out{"csv", "trajectory,site,x,z,h\n", {}, std::move(config)};
  for (const auto& c : chunks) out.body += c;
  out.columns = {{"trajectory", "int", "trajectory index (random substream)"},
                 {"site", "int", "lattice site"},
                 {"x", "float", "position site * dx"},
                 {"z", "float", "partition function Z at time t"},
                 {"h", "float", "log Z"}};
  return out;
}

Artifact cmd_replica(const ReplicaArgs& a, const GlobalArgs&) {
  const double dtau = a.dtau > 0.0 ? a.dtau : a.dx * a.dx / ReplicaDefaults::dtau_divisor;
  const double half_width = a.half_width > 0.0 ? a.half_width : default_replica_half_width(a.t);
  json result = {{"n", a.n}, {"t", a.t}, {"dx", a.dx}, {"dtau", dtau}, {"half_width", half_width}};
  Artifact out{"json", "", {}, {}};
  out.columns = {{"value", "float", "<0|exp(-t H_n)|0>; the Richardson extrapolation when requested"}};
  if (a.richardson) {
    if (a.dtau > 0.0) throw ArgumentError("replica: --dtau cannot be combined with --richardson");
    const auto r = propagate_richardson(a.n, a.t, a.dx, half_width);
    result["value"] = r.extrapolated;
    result["coarse"] = r.coarse;
    result["fine"] = r.fine;
    result["extrapolated"] = r.extrapolated;
    result["error_estimate"] = r.error_estimate;
    out.columns.push_back({"coarse", "float", "value at dx"});
    out.columns.push_back({"fine", "float", "value at dx/2"});
    out.columns.push_back({"error_estimate", "float", "|fine - coarse|"});
  } else {
    result["value"] = propagate(a.n, a.t, a.dx, dtau, half_width);
  }
  out.body = result.dump(2) + "\n";
  out.config = {{"n", a.n},           {"t", a.t},
                {"dx", a.dx},         {"dtau", dtau},
                {"half_width", half_width}, {"richardson", a.richardson}};
  return out;
}

// --- sample files ----------------------------------------------------------

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_number(const std::string& text, const std::string& where) {
  const char* begin = text.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (text.empty() || end != begin + text.size())
    throw ArgumentError("cannot parse '" + text + "' as a number in " + where);
  return v;
}

struct Filter {
  std::string key;
  double value = 0.0;
};

std::optional<Filter> parse_filter(const std::string& where) {
  if (where.empty()) return std::nullopt;
  const auto eq = where.find('=');
  if (eq == std::string::npos || eq == 0) throw ArgumentError("--where expects column=value");
  return Filter{where.substr(0, eq), parse_number(where.substr(eq + 1), "--where")};
}

std::vector<double> load_json_column(const std::string& path, std::string column,
                                     const std::optional<Filter>& filter) {
  std::ifstream in(path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ArgumentError("cannot parse JSON file " + path + ": " + e.what());
  }
  if (column.empty()) column = "value";
  std::vector<double> values;
  auto take = [&](const json& obj) {
    if (!obj.is_object() || !obj.contains(column)) throw ArgumentError("JSON record without field '" + column + "' in " + path);
    if (filter) {
      if (!obj.contains(filter->key) || !obj[filter->key].is_number())
        throw ArgumentError("JSON record without numeric field '" + filter->key + "' in " + path);
      if (obj[filter->key].get<double>() != filter->value) return;
    }
    const json& v = obj[column];
    if (v.is_number()) {
      values.push_back(v.get<double>());
    } else if (v.is_array()) {
      for (const auto& x : v) values.push_back(x.get<double>());
    } else {
      throw ArgumentError("field '" + column + "' is not numeric in " + path);
    }
  };
  if (doc.is_array()) {
    for (const auto& obj : doc) take(obj);
  } else {
    take(doc);
  }
  return values;
}

std::vector<double> load_column(const std::string& path, const std::string& column, const std::string& where) {
  if (!std::filesystem::is_regular_file(path)) throw ArgumentError("sample file not found: " + path);
  const auto filter = parse_filter(where);
  if (std::filesystem::path(path).extension() == ".json") return load_json_column(path, column, filter);

  std::ifstream in(path);
  std::string line;
  if (!std::getline(in, line)) throw ArgumentError("empty CSV file: " + path);
  const auto header = split_csv(line);
  auto index_of = [&](const std::string& name) -> std::size_t {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw ArgumentError("column '" + name + "' not found in " + path);
  };
  const std::size_t col = column.empty() ? header.size() - 1 : index_of(column);
  const std::size_t key = filter ? index_of(filter->key) : 0;
  std::vector<double> values;
  long row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    const std::string where_text = path + " row " + std::to_string(row);
    if (cells.size() != header.size()) throw ArgumentError("wrong number of cells in " + where_text);
    if (filter && parse_number(cells[key], where_text) != filter->value) continue;
    values.push_back(parse_number(cells[col], where_text));
  }
  return values;
}

Artifact cmd_compare(const CompareArgs& a, const GlobalArgs& g) {
  if (a.samples.empty()) throw ArgumentError("compare: --samples is required");
  const bool tw = a.reference == "tw-gue";
  bool standardized = tw;
  if (a.standardize == "yes") standardized = true;
  else if (a.standardize == "no") standardized = false;
  else if (a.standardize != "auto") throw ArgumentError("compare: --standardize must be auto, yes or no");
  if (a.expect_skewness != "" && a.expect_skewness != "negative" && a.expect_skewness != "positive")
    throw ArgumentError("compare: --expect-skewness must be negative or positive");

  SampleSet samples{load_column(a.samples, a.column, a.where), a.samples, {{"seed", std::to_string(g.seed)}}};
  if (a.negate)
    for (double& v : samples.values) v = -v;
  samples.validate();

  Statistic ks;
  std::unique_ptr<TwGueTable> table;
  SampleSet reference;
  if (tw) {
    table = std::make_unique<TwGueTable>();
    const TwGueTable* t = table.get();
    ks = [t, standardized](std::span<const double> v) {
      SampleSet s{{v.begin(), v.end()}, "resample", {}};
      if (standardized) return ks_distance(standardize(s), [t](double z) { return t->standardized_cdf(z); });
      return ks_distance(s, [t](double x) { return t->cdf(x); });
    };
  } else {
    reference = SampleSet{load_column(a.reference, a.reference_column.empty() ? a.column : a.reference_column, ""),
                          a.reference, {}};
    reference.validate();
    if (standardized) reference = standardize(reference);
    const SampleSet* ref = &reference;
    ks = [ref, standardized](std::span<const double> v) {
      SampleSet s{{v.begin(), v.end()}, "resample", {}};
      return ks_distance_two_sample(standardized ? standardize(s) : s, *ref);
    };
  }

  const double distance = ks(samples.values);
  const auto ci = bootstrap_ci(samples, ks, a.bootstrap, a.alpha, g.seed);
  json report;
  report["samples"] = a.samples;
  report["column"] = a.column;
  report["where"] = a.where;
  report["reference"] = a.reference;
  report["n"] = samples.values.size();
  report["standardized"] = standardized;
  report["negated"] = a.negate;
  report["ks"] = distance;
  report["ks_ci"] = {{"lo", ci.lo}, {"hi", ci.hi}, {"alpha", a.alpha}, {"resamples", a.bootstrap}};
  report["ks_threshold"] = a.ks_threshold;
  const std::size_t n = samples.values.size();
  report["mean"] = sample_mean(samples.values);
  report["variance"] = n >= 2 ? number(sample_variance(samples.values)) : json(nullptr);
  std::optional<double> skew;
  if (n >= 3 && sample_variance(samples.values) > 0.0) skew = sample_skewness(samples.values);
  report["skewness"] = skew ? json(*skew) : json(nullptr);
  json pass;
  pass["ks"] = distance < a.ks_threshold;
  if (a.expect_skewness.empty()) {
    pass["skewness"] = nullptr;
  } else {
    pass["skewness"] = skew.has_value() && (a.expect_skewness == "negative" ? *skew < 0.0 : *skew > 0.0);
  }
  report["pass"] = pass;

  Artifact out{"json", report.dump(2) + "\n", {}, {}};
  out.columns = {{"ks", "float", "Kolmogorov-Smirnov distance to the reference"},
                 {"ks_ci", "object", "percentile bootstrap interval of ks"},
                 {"mean", "float", "sample mean (after --negate)"},
                 {"variance", "float", "unbiased sample variance"},
                 {"skewness", "float", "moment skewness"},
                 {"pass", "object", "ks < ks_threshold; skewness sign when --expect-skewness is set"}};
  out.config = {{"samples", a.samples},
                {"column", a.column},
                {"where", a.where},
                {"reference", a.reference},
                {"reference_column", a.reference_column},
                {"standardize", a.standardize},
                {"negate", a.negate},
                {"ks_threshold", a.ks_threshold},
                {"bootstrap", a.bootstrap},
                {"alpha", a.alpha},
                {"expect_skewness", a.expect_skewness}};
  return out;
}

// ---------------------------------------------------------------------------
// Output

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw ResourceError("cannot open output file " + path.string());
  f << text;
  f.close();
  if (!f) throw ResourceError("cannot write output file " + path.string());
}

std::string resolve_out(const std::string& requested, const std::string& subcommand, const std::string& ext) {
  if (!requested.empty()) return requested;
  const char* dir = std::getenv(kOutDirEnv);
  std::filesystem::path base = dir && *dir ? dir : ".";
  return (base / (subcommand + "." + ext)).string();
}

void emit(const Artifact& artifact, const std::string& subcommand, const GlobalArgs& g, std::ostream& log) {
  const std::string path = resolve_out(g.out, subcommand, artifact.extension);
  json meta;
  meta["tool"] = "kpzlab";
  meta["version"] = version();
  meta["subcommand"] = subcommand;
  meta["rng_algorithm"] = kRngAlgorithm;
  meta["config"] = {{"global",
                     {{"seed", g.seed}, {"out", path}, {"format", artifact.extension},
                      {"trajectories", g.trajectories}, {"threads", g.threads}}},
                    {subcommand, artifact.config}};
  json schema;
  schema["subcommand"] = subcommand;
  schema["format"] = artifact.extension;
  schema["float_format"] = "%.17g";
  json cols = json::array();
  for (const auto& c : artifact.columns)
    cols.push_back({{"name", c.name}, {"type", c.type}, {"description", c.description}});
  schema["columns"] = cols;

  if (path == "-") {
    log << artifact.body;
    return;
  }
  const std::filesystem::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(p.parent_path(), ec);
    if (ec) throw ResourceError("cannot create output directory " + p.parent_path().string());
  }
  write_file(p, artifact.body);
  write_file(path + ".meta.json", meta.dump(2) + "\n");
  write_file(path + ".schema.json", schema.dump(2) + "\n");
}

void report_error(std::ostream& err, const std::string& kind, const std::string& message, int code,
                  const Error::Details& details = {}) {
  json d = json::object();
  for (const auto& [k, v] : details) d[k] = number(v);
  json record = {{"error", {{"kind", kind}, {"message", message}, {"details", d}}}, {"exit_code", code}};
  err << record.dump() << "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& log, std::ostream& err) {
  CLI::App app{"kpzlab: exact KPZ statistics and stochastic growth simulators", "kpzlab"};
  app.set_version_flag("--version", std::string(version()));
  app.set_config("--config", "", "TOML configuration file; command-line flags override its keys");
  app.fallthrough();
  app.require_subcommand(1);

  GlobalArgs g;
  app.add_option("--seed", g.seed, "master random seed")->capture_default_str();
  app.add_option("--out", g.out, "output file ('-' for stdout); default $KPZLAB_OUT_DIR/<subcommand>.<ext>");
  app.add_option("--trajectories", g.trajectories, "number of Monte Carlo trajectories")->capture_default_str();
  app.add_option("--threads", g.threads, "worker threads")->capture_default_str()->check(CLI::PositiveNumber);

  ExactArgs exact;
  auto* sub_exact = app.add_subcommand("exact", "crossover generating function on an s-grid");
  sub_exact->add_option("--t", exact.t, "KPZ time")->capture_default_str();
  sub_exact->add_option("--s-min", exact.s_min)->capture_default_str();
  sub_exact->add_option("--s-max", exact.s_max)->capture_default_str();
  sub_exact->add_option("--s-step", exact.s_step)->capture_default_str();
  sub_exact->add_option("--m", exact.m, "quadrature nodes")->capture_default_str();

  TwArgs tw;
  auto* sub_tw = app.add_subcommand("tw", "Tracy-Widom GUE distribution function on a grid");
  sub_tw->add_option("--sigma-min", tw.sigma_min)->capture_default_str();
  sub_tw->add_option("--sigma-max", tw.sigma_max)->capture_default_str();
  sub_tw->add_option("--sigma-step", tw.sigma_step)->capture_default_str();
  sub_tw->add_option("--m", tw.m, "quadrature nodes")->capture_default_str();

  AsepArgs asep;
  auto* sub_asep = app.add_subcommand("asep", "exclusion process from the step configuration");
  sub_asep->add_option("--p", asep.p, "right jump rate (q = 1 - p)")->capture_default_str();
  sub_asep->add_option("--t", asep.t, "final time")->capture_default_str();
  sub_asep->add_option("--halfwidth", asep.halfwidth, "window half-width (0: smallest admissible)");
  sub_asep->add_option("--observe", asep.observe, "extra observation times before --t");
  sub_asep->add_option("--tags", asep.tags, "labels of particles whose positions are recorded");

  SheArgs she;
  auto* sub_she = app.add_subcommand("she", "stochastic heat equation trajectories");
  sub_she->add_option("--solver", she.solver, "lattice or semidiscrete")->capture_default_str();
  sub_she->add_option("--t", she.t, "final time")->capture_default_str();
  sub_she->add_option("--dt", she.dt, "time step (0: solver default)");
  sub_she->add_option("--dx", she.dx, "lattice spacing (lattice solver)")->capture_default_str();
  sub_she->add_option("--window", she.window, "window size / half-size in sites (0: default)");
  sub_she->add_option("--sites", she.sites, "sites to record")->capture_default_str();

  ReplicaArgs replica;
  auto* sub_replica = app.add_subcommand("replica", "moment of the delta Bose gas propagator");
  sub_replica->add_option("--n", replica.n, "number of replicas (1-3)")->capture_default_str();
  sub_replica->add_option("--t", replica.t)->capture_default_str();
  sub_replica->add_option("--dx", replica.dx)->capture_default_str();
  sub_replica->add_option("--dtau", replica.dtau, "time step (0: dx^2/8)");
  sub_replica->add_option("--half-width", replica.half_width, "grid half-width (0: 6 sqrt(t) + 2)");
  sub_replica->add_flag("--richardson", replica.richardson, "also run at dx/2 and extrapolate");

  CompareArgs cmp;
  auto* sub_compare = app.add_subcommand("compare", "KS comparison of a sample column to a reference");
  sub_compare->add_option("--samples", cmp.samples, "CSV or JSON file emitted by kpzlab")->required();
  sub_compare->add_option("--column", cmp.column, "column to read (CSV default: last; JSON default: value)");
  sub_compare->add_option("--where", cmp.where, "keep rows with column=value");
  sub_compare->add_option("--reference", cmp.reference, "tw-gue or a sample file")->capture_default_str();
  sub_compare->add_option("--reference-column", cmp.reference_column);
  sub_compare->add_option("--standardize", cmp.standardize, "auto, yes or no")->capture_default_str();
  sub_compare->add_flag("--negate", cmp.negate, "flip the sign of the samples first");
  sub_compare->add_option("--ks-threshold", cmp.ks_threshold)->capture_default_str();
  sub_compare->add_option("--bootstrap", cmp.bootstrap, "bootstrap resamples")->capture_default_str();
  sub_compare->add_option("--alpha", cmp.alpha)->capture_default_str();
  sub_compare->add_option("--expect-skewness", cmp.expect_skewness, "negative or positive");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    log << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    log << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    log << version() << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    report_error(err, "argument", e.what(), kExitValidation);
    return kExitValidation;
  }

  try {
    const std::string name = app.get_subcommands().front()->get_name();
    Artifact artifact;
    if (name == "exact") artifact = cmd_exact(exact, g);
    else if (name == "tw") artifact = cmd_tw(tw, g);
    else if (name == "asep") artifact = cmd_asep(asep, g);
    else if (name == "she") artifact = cmd_she(she, g);
    else if (name == "replica") artifact = cmd_replica(replica, g);
    else artifact = cmd_compare(cmp, g);
    emit(artifact, name, g, log);
    return kExitOk;
  } catch (const Error& e) {
    const int code = exit_code_for(e.kind());
    report_error(err, to_string(e.kind()), e.what(), code, e.details());
    return code;
  } catch (const std::bad_alloc&) {
    report_error(err, "resource", "out of memory", kExitResource);
    return kExitResource;
  }
}

}  // namespace kpz::cli
