#include "fbmclt/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "fbmclt/cltlab.hpp"
#include "fbmclt/errors.hpp"
#include "fbmclt/iterint.hpp"
#include "fbmclt/quad.hpp"
#include "fbmclt/report.hpp"
#include "fbmclt/sampler.hpp"

namespace fbmclt {

int exit_code_for(std::string_view kind) {
  if (kind == "usage") return kExitUsage;
  if (kind == "configuration") return kExitConfig;
  if (kind == "domain") return kExitDomain;
  if (kind == "numerical") return kExitNumerical;
  if (kind == "convergence") return kExitConvergence;
  if (kind == "partial") return kExitPartial;
  if (kind == "io") return kExitIo;
  return kExitOther;
}

namespace {

// Raw flag values; unset optionals fall back to per-subcommand defaults.
struct Flags {
  std::optional<int> q;
  std::optional<double> h;
  std::vector<double> k;
  std::vector<double> t;
  std::optional<double> s;
  std::optional<double> big_t;
  std::optional<std::int64_t> reps;
  std::optional<std::int64_t> samples;
  std::uint64_t seed = 1;
  std::optional<double> tol;
  std::string scheme = "left_point";
  std::string method = "cholesky";
  std::optional<int> d;
  std::size_t resolution = 4096;
  double budget = 0.0;
  bool keep_samples = false;
  int threads = 0;
  std::string output = "-";
  std::string format = "json";
};

struct Outcome {
  Json json;
  std::string csv;
  std::string summary;
};

Json base_record(const std::string& command, const Json& params) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = command;
  j["params"] = params;
  return j;
}

Json quad_record(const std::string& command, const QuadResult& r, const Json& params) {
  Json j = base_record(command, params);
  const Json body = to_json(r);
  for (auto it = body.begin(); it != body.end(); ++it) j[it.key()] = it.value();
  return j;
}

std::string quad_csv(const QuadResult& r, const std::string& label = "") {
  std::ostringstream os;
  write_csv(os, r, label);
  return os.str();
}

std::string fmt(double v, int prec = 8) {
  std::ostringstream os;
  os.precision(prec);
  os << v;
  return os.str();
}

Hurst hurst_of(const Flags& f) { return Hurst(f.h.value_or(0.75)); }

int q_of(const Flags& f) {
  const int q = f.q.value_or(2);
  if (q < 2) throw ConfigError("q must be >= 2");
  return q;
}

std::int64_t positive(std::optional<std::int64_t> v, std::int64_t def, const char* name) {
  const std::int64_t x = v.value_or(def);
  if (x < 1) throw ConfigError(std::string(name) + " must be positive");
  return x;
}

double first_or(const std::vector<double>& v, double def) { return v.empty() ? def : v.front(); }

Outcome cmd_sigma(const Flags& f) {
  const Hurst h = hurst_of(f);
  const int q = q_of(f);
  Json params{{"q", q}, {"H", h.value()}};
  QuadResult r;
  if (q == 2) {
    const double tol = f.tol.value_or(1e-10);
    params["tol"] = tol;
    r = sigma2_squared(h, tol);
  } else {
    const std::int64_t n = positive(f.samples, 1 << 20, "samples");
    params["samples"] = n;
    params["seed"] = f.seed;
    r = sigmaq_squared(q, h, n, f.seed, Parallelism{f.threads});
  }
  return {quad_record("sigma", r, params), quad_csv(r, "sigma_sq"),
          "sigma_" + std::to_string(q) + "^2(H=" + fmt(h.value()) + ") = " + fmt(r.value, 12) + " +/- " +
              fmt(r.error_estimate, 3) + " [" + to_string(r.method) + ", " + std::to_string(r.n_evals) + " evals]"};
}

Outcome cmd_oracle(const Flags& f) {
  const Hurst h = hurst_of(f);
  const int q = q_of(f);
  const double k = first_or(f.k, 10.0);
  const double t = f.t.empty() ? 1.0 : f.t.back();
  const double s = f.s.value_or(f.t.size() >= 2 ? f.t.front() : t);
  Json params{{"q", q}, {"H", h.value()}, {"k", k}, {"s", s}, {"t", t}};
  McOptions mc;
  mc.n_samples = positive(f.samples, 1 << 20, "samples");
  mc.seed = f.seed;
  mc.parallel = Parallelism{f.threads};
  const double tol = f.tol.value_or(1e-8);
  if (q == 2) {
    params["tol"] = tol;
  } else {
    params["samples"] = mc.n_samples;
    params["seed"] = mc.seed;
  }
  const QuadResult r = variance_oracle(q, h, k, s, t, mc, tol);
  Json j = quad_record("oracle", r, params);
  j["over_log_k"] = r.value / std::log(k);
  return {j, quad_csv(r, "E[Y_s Y_t]"),
          "E[Y_{k^s} Y_{k^t}] = " + fmt(r.value, 10) + " +/- " + fmt(r.error_estimate, 3) +
              " (divided by log k: " + fmt(r.value / std::log(k), 8) + ")"};
}

Outcome cmd_simulate(const Flags& f) {
  const Hurst h = hurst_of(f);
  const int q = q_of(f);
  const double k = first_or(f.k, 10.0);
  const double t = f.t.empty() ? 1.0 : f.t.back();
  const int d = f.d.value_or(q);
  const SamplingMethod method = parse_sampling_method(f.method);
  const Scheme scheme = parse_scheme(f.scheme);
  const double horizon = std::exp(t * std::log(k));
  const TimeGrid grid = method == SamplingMethod::circulant ? TimeGrid::uniform(horizon, f.resolution)
                                                            : TimeGrid::geometric(k, t, f.resolution);
  const FbmPathSet paths = sample_fbm(grid, d, h, f.seed, method);
  Json params{{"q", q},   {"H", h.value()},         {"k", k},          {"t", f.t.empty() ? std::vector<double>{t} : f.t},
              {"d", d},   {"seed", f.seed},         {"method", f.method}, {"scheme", to_string(scheme)},
              {"resolution", f.resolution}};
  Json j = base_record("simulate", params);
  j["paths"] = to_json(paths);
  std::string summary = "sampled " + std::to_string(d) + " fBm components on " + std::to_string(grid.size()) + " points";
  if (d >= q) {
    IterConfig cfg{q, h, k, f.t.empty() ? std::vector<double>{t} : f.t, scheme, {}};
    const IterIntegralEstimate est = iterated_integral(paths, cfg);
    j["iterated_integral"] = Json{{"t", cfg.checkpoints},
                                  {"y", est.y_values},
                                  {"x", est.x_values},
                                  {"snap_error", est.snap_error}};
    summary += "; X_k(t_last) = " + fmt(est.x_values.back(), 10);
  }
  std::ostringstream csv;
  paths.write_csv(csv);
  return {j, csv.str(), summary};
}

Outcome cmd_clt(const Flags& f, McReport* partial_out) {
  ExperimentConfig cfg;
  cfg.q = q_of(f);
  cfg.h = hurst_of(f);
  cfg.k_list = f.k.empty() ? std::vector<double>{100.0} : f.k;
  cfg.t_list = f.t.empty() ? std::vector<double>{1.0} : f.t;
  cfg.reps = f.reps.value_or(2000);
  cfg.seed = f.seed;
  cfg.scheme = parse_scheme(f.scheme);
  cfg.resolution = f.resolution;
  cfg.keep_samples = f.keep_samples;
  cfg.budget_seconds = f.budget;
  cfg.parallel = Parallelism{f.threads};
  McReport report;
  try {
    report = run_experiment(cfg);
  } catch (const PartialReportError& e) {
    if (partial_out) *partial_out = e.partial();
    throw;
  }
  Json j = base_record("clt", Json::object());
  Json body = to_json(report);
  j["params"] = body["config"];
  j["partial"] = body["partial"];
  j["blocks"] = body["blocks"];
  std::ostringstream csv;
  write_csv(csv, report);
  const auto& last = report.blocks.back().cells.back();
  return {j, csv.str(),
          "k=" + fmt(report.blocks.back().k) + ", t=" + fmt(last.t) + ": Var[X] = " + fmt(last.var.value, 6) +
              " +/- " + fmt(last.var.se, 3) + ", gap = " + fmt(last.gap.gap, 5) + " +/- " + fmt(last.gap.se, 3)};
}

Outcome cmd_lemma41(const Flags& f) {
  const Hurst h = hurst_of(f);
  const double T = f.big_t.value_or(1e3);
  const std::int64_t n = positive(f.samples, 1 << 20, "samples");
  Json params{{"H", h.value()}, {"T", T}, {"samples", n}, {"seed", f.seed}};
  const QuadResult r = lemma41_integral(T, h, n, f.seed, Parallelism{f.threads});
  Json j = quad_record("lemma41", r, params);
  j["over_log_T"] = r.value / std::log(T);
  return {j, quad_csv(r, "lemma41"),
          "I(T=" + fmt(T) + ") = " + fmt(r.value, 8) + " +/- " + fmt(r.error_estimate, 3) +
              ", I/log T = " + fmt(r.value / std::log(T), 6)};
}

Outcome cmd_contraction(const Flags& f) {
  const Hurst h = hurst_of(f);
  const double k = first_or(f.k, 1e3);
  const std::int64_t n = positive(f.samples, 1 << 20, "samples");
  Json params{{"H", h.value()}, {"k", k}, {"samples", n}, {"seed", f.seed}};
  const ContractionNorms c = contraction_norm_q2(k, h, n, f.seed, Parallelism{f.threads});
  const double l2 = std::log(k) * std::log(k);
  const double coef = stein_gap_coefficient(2, 1);
  Json j = base_record("contraction", params);
  j["unsym"] = to_json(c.unsym);
  j["sym"] = to_json(c.sym);
  j["sym_over_log_k_sq"] = c.sym.value / l2;
  j["fourth_moment_gap_reconstruction"] =
      Json{{"value", coef * c.sym.value / l2}, {"se", coef * c.sym.error_estimate / l2}};
  std::ostringstream csv;
  csv << "quantity,value,error,n_evals,method\n";
  csv.precision(17);
  csv << "unsym," << c.unsym.value << ',' << c.unsym.error_estimate << ',' << c.unsym.n_evals << ','
      << to_string(c.unsym.method) << '\n';
  csv << "sym," << c.sym.value << ',' << c.sym.error_estimate << ',' << c.sym.n_evals << ','
      << to_string(c.sym.method) << '\n';
  return {j, csv.str(),
          "contraction norms at k=" + fmt(k) + ": unsym = " + fmt(c.unsym.value, 6) + " +/- " +
              fmt(c.unsym.error_estimate, 3) + ", sym = " + fmt(c.sym.value, 6) + " +/- " +
              fmt(c.sym.error_estimate, 3)};
}

Outcome cmd_windings(const Flags& f) {
  const Hurst h = hurst_of(f);
  const double t = f.t.empty() ? 1e4 : f.t.back();
  const std::int64_t reps = positive(f.reps, 5000, "reps");
  const Scheme scheme = parse_scheme(f.scheme);
  Json params{{"H", h.value()}, {"t", t}, {"reps", reps}, {"seed", f.seed}, {"scheme", to_string(scheme)},
              {"resolution", f.resolution}};
  const WindingStats w = winding_experiment(h, t, reps, f.seed, f.resolution, scheme, Parallelism{f.threads});
  Json j = base_record("windings", params);
  const Json body = to_json(w);
  for (auto it = body.begin(); it != body.end(); ++it) j[it.key()] = it.value();
  std::ostringstream csv;
  csv.precision(17);
  csv << "quantity,value,se\n";
  auto row = [&](const char* name, const Estimate& e) { csv << name << ',' << e.value << ',' << e.se << '\n'; };
  row("var_z_over_log_t", w.var_z);
  row("var_zprime_over_log_t", w.var_zprime);
  row("var_term_21_over_log_t", w.var_term_21);
  row("var_term_12_over_log_t", w.var_term_12);
  row("cov_terms_over_log_t", w.cov_terms);
  return {j, csv.str(),
          "Var[Z]/log t = " + fmt(w.var_z.value, 6) + ", Var[Z']/log t = " + fmt(w.var_zprime.value, 6) +
              " (t=" + fmt(t) + ", reps=" + std::to_string(reps) + ")"};
}

void emit(const Outcome& o, const Flags& f, std::ostream& out, std::ostream& err) {
  std::string body;
  if (f.format == "json") {
    body = o.json.dump(2) + "\n";
  } else if (f.format == "csv") {
    body = o.csv;
  } else {
    throw ConfigError("unknown format '" + f.format + "' (expected json or csv)");
  }
  if (f.output.empty() || f.output == "-") {
    out << body;
    out.flush();
    err << o.summary << '\n';
    return;
  }
  std::ofstream file(f.output, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot open output file '" + f.output + "' for writing");
  file << body;
  file.flush();
  if (!file) throw IoError("failed writing output file '" + f.output + "'");
  out << o.summary << '\n';
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical laboratory for the central limit theorem of iterated integrals of multidimensional "
               "fractional Brownian motion (1/2 < H < 1)."};
  app.name(args.empty() ? "fbmclt" : args.front());
  app.fallthrough();
  app.require_subcommand(1);
  app.set_config("--config", "", "Plain 'key = value' configuration file; flags and FBMCLT_* variables override it");

  Flags f;
  auto env = [](const char* n) { return std::string("FBMCLT_") + n; };
  app.add_option("--q", f.q, "Iteration order q >= 2 (default 2)")->envname(env("Q"));
  app.add_option("--H", f.h, "Hurst index in (1/2, 1) (default 0.75)")->envname(env("H"));
  app.add_option("--k", f.k, "Base k > 1; comma separated list for clt")->delimiter(',')->envname(env("K"));
  app.add_option("--t", f.t, "Checkpoint(s) t; comma separated list for clt, 's,t' for oracle")
      ->delimiter(',')
      ->envname(env("T"));
  app.add_option("--s", f.s, "First time argument of oracle (default: t)")->envname(env("S"));
  app.add_option("--T", f.big_t, "Upper scale T of lemma41 (default 1000)")->envname(env("BIG_T"));
  app.add_option("--reps", f.reps, "Monte Carlo replications of the path simulation")->envname(env("REPS"));
  app.add_option("--samples", f.samples, "Monte Carlo samples of a quadrature (default 2^20)")->envname(env("SAMPLES"));
  app.add_option("--seed", f.seed, "Master seed; all streams are derived from it")->envname(env("SEED"));
  app.add_option("--tol", f.tol, "Relative tolerance of deterministic quadrature")->envname(env("TOL"));
  app.add_option("--scheme", f.scheme, "Riemann sum scheme: left_point or trapezoid")->envname(env("SCHEME"));
  app.add_option("--method", f.method, "fBm sampler for simulate: cholesky or circulant")->envname(env("METHOD"));
  app.add_option("--d", f.d, "Number of fBm components for simulate (default q)")->envname(env("D"));
  app.add_option("--resolution", f.resolution, "Grid intervals on [1, k^t] (default 4096)")->envname(env("RESOLUTION"));
  app.add_option("--budget", f.budget, "Wall clock budget in seconds for clt (0 = none)")->envname(env("BUDGET"));
  app.add_flag("--keep-samples", f.keep_samples, "Include the X_k(t) samples in the clt JSON report");
  app.add_option("--threads", f.threads, "OpenMP threads (0 = default); results do not depend on it")
      ->envname(env("THREADS"));
  app.add_option("--output", f.output, "Report file ('-' = standard output)")->envname(env("OUTPUT"));
  app.add_option("--format", f.format, "Report format: json or csv")
      ->check(CLI::IsMember({"json", "csv"}))
      ->envname(env("FORMAT"));

  auto* sigma = app.add_subcommand("sigma", "Limit variance rate sigma_q^2");
  auto* oracle = app.add_subcommand("oracle", "Exact finite-k second moment E[Y_{k^s} Y_{k^t}]");
  auto* simulate = app.add_subcommand("simulate", "Sample fBm paths and the iterated integral");
  auto* clt = app.add_subcommand("clt", "Monte Carlo CLT experiment over k and t lists");
  auto* lemma41 = app.add_subcommand("lemma41", "Four-dimensional log-growth integral over [1/T, 1]^4");
  auto* contraction = app.add_subcommand("contraction", "q = 2 contraction norms at horizon k");
  auto* windings = app.add_subcommand("windings", "Planar winding functionals Z_t and Z'_t");

  // CLI11 lets a config file win over environment variables; environment
  // values are passed as arguments instead so they rank between the two.
  std::vector<std::string> full(args.begin(), args.end());
  if (full.empty()) full.emplace_back("fbmclt");
  for (const CLI::Option* opt : app.get_options()) {
    const std::string& var = opt->get_envname();
    const char* value = var.empty() ? nullptr : std::getenv(var.c_str());
    if (value == nullptr) continue;
    bool given = false;
    for (const std::string& name : opt->get_lnames()) {
      const std::string flag = "--" + name;
      for (std::size_t i = 1; i < args.size(); ++i) {
        if (args[i] == flag || args[i].rfind(flag + "=", 0) == 0) given = true;
      }
    }
    if (!given) full.insert(full.begin() + 1, "--" + opt->get_lnames().front() + "=" + value);
  }
  std::vector<const char*> argv;
  for (const auto& a : full) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error[usage]: " << e.what() << "\n" << "run with --help for usage\n";
    return kExitUsage;
  }

  McReport partial;
  try {
    Outcome o;
    if (sigma->parsed()) o = cmd_sigma(f);
    else if (oracle->parsed()) o = cmd_oracle(f);
    else if (simulate->parsed()) o = cmd_simulate(f);
    else if (clt->parsed()) o = cmd_clt(f, &partial);
    else if (lemma41->parsed()) o = cmd_lemma41(f);
    else if (contraction->parsed()) o = cmd_contraction(f);
    else if (windings->parsed()) o = cmd_windings(f);
    emit(o, f, out, err);
    return kExitOk;
  } catch (const PartialReportError& e) {
    // Still hand out what was completed.
    try {
      Json j = base_record("clt", Json::object());
      Json body = to_json(e.partial());
      j["params"] = body["config"];
      j["partial"] = true;
      j["blocks"] = body["blocks"];
      std::ostringstream csv;
      write_csv(csv, e.partial());
      emit(Outcome{j, csv.str(), "partial report"}, f, out, err);
    } catch (const Error& io) {
      err << "error[" << io.kind() << "]: " << io.what() << '\n';
    }
    err << "error[" << e.kind() << "]: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const Error& e) {
    err << "error[" << e.kind() << "]: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error[internal]: " << e.what() << '\n';
    return kExitOther;
  }
}

}  // namespace fbmclt
