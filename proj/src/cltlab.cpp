#include "fbmclt/cltlab.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <memory>

#include "fbmclt/grid.hpp"
#include "fbmclt/sampler.hpp"

namespace fbmclt {

namespace {

constexpr std::int64_t kRepsPerTask = 16;
constexpr std::uint64_t kWindingStream = 0x77696e64;

using Clock = std::chrono::steady_clock;

struct Deadline {
  bool active = false;
  Clock::time_point at{};
  bool passed() const { return active && Clock::now() > at; }
};

// X_k(t) samples for one k: out[ti][rep]. Returns false if the deadline cut
// the block short.
bool simulate_block(const ExperimentConfig& cfg, std::size_t ki, bool reference, const Deadline& deadline,
                    std::vector<std::vector<double>>& out, bool* jittered) {
  const double k = cfg.k_list[ki];
  const double t_max = cfg.t_list.back();
  auto grid = std::make_shared<const TimeGrid>(TimeGrid::geometric(k, t_max, cfg.resolution, cfg.warmup));
  IterConfig icfg{cfg.q, cfg.h, k, cfg.t_list, cfg.scheme, cfg.levels};
  const IterPlan plan(*grid, icfg);
  const FbmSampler sampler(grid, cfg.h, SamplingMethod::cholesky);
  if (jittered) *jittered = sampler.jittered();
  const int d = plan.components_needed();
  const std::size_t n_t = cfg.t_list.size();
  const double root_log_k = std::sqrt(std::log(k));
  out.assign(n_t, std::vector<double>(static_cast<std::size_t>(cfg.reps), 0.0));
  const std::int64_t n_tasks = (cfg.reps + kRepsPerTask - 1) / kRepsPerTask;
  std::atomic<bool> cut{false};

  auto task = [&](std::int64_t task_id) {
    if (deadline.passed()) {
      cut = true;
      return;
    }
    const std::int64_t first = task_id * kRepsPerTask;
    const std::int64_t count = std::min(kRepsPerTask, cfg.reps - first);
    std::vector<std::uint64_t> seeds;
    seeds.reserve(static_cast<std::size_t>(count * d));
    for (std::int64_t r = 0; r < count; ++r) {
      for (int c = 0; c < d; ++c) {
        seeds.push_back(path_stream_seed(cfg.seed, ki, static_cast<std::uint64_t>(first + r), static_cast<std::uint64_t>(c)));
      }
    }
    Eigen::MatrixXd paths;
    if (reference) {
      sampler.sample_columns_reference(seeds, paths);
    } else {
      sampler.sample_columns(seeds, paths);
    }
    std::vector<const double*> comps(static_cast<std::size_t>(d));
    std::vector<double> y(n_t);
    for (std::int64_t r = 0; r < count; ++r) {
      for (int c = 0; c < d; ++c) comps[static_cast<std::size_t>(c)] = paths.col(r * d + c).data();
      plan.evaluate(comps.data(), y.data());
      for (std::size_t ti = 0; ti < n_t; ++ti) out[ti][static_cast<std::size_t>(first + r)] = y[ti] / root_log_k;
    }
  };
  if (reference) {
    serial_for(n_tasks, task);
  } else {
    parallel_for(n_tasks, cfg.parallel, task);
  }
  return !cut;
}

Deadline make_deadline(double budget_seconds) {
  Deadline d;
  if (budget_seconds > 0.0) {
    d.active = true;
    d.at = Clock::now() + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(budget_seconds));
  }
  return d;
}

std::vector<std::vector<std::vector<double>>> simulate_all(const ExperimentConfig& cfg, bool reference) {
  cfg.validate();
  std::vector<std::vector<std::vector<double>>> all(cfg.k_list.size());
  for (std::size_t ki = 0; ki < cfg.k_list.size(); ++ki) simulate_block(cfg, ki, reference, Deadline{}, all[ki], nullptr);
  return all;
}

KBlock summarize_block(const ExperimentConfig& cfg, double k, std::vector<std::vector<double>>&& x,
                       const std::vector<double>& snap_errors) {
  KBlock b;
  b.k = k;
  const std::size_t n_t = cfg.t_list.size();
  for (std::size_t ti = 0; ti < n_t; ++ti) {
    const auto& v = x[ti];
    CellStats c;
    c.t = cfg.t_list[ti];
    c.snap_error = snap_errors[ti];
    const MomentSummary m = summarize_moments(v);
    c.mean = m.mean;
    c.var = m.var;
    c.second_moment = m.second_raw;
    c.fourth_moment = m.fourth_raw;
    c.gap = m.gap;
    // Standardised by the sample variance, not by sigma_q^2 t, so the test
    // measures shape only.
    const double sd = std::sqrt(m.var.value);
    std::vector<double> z(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) z[i] = sd > 0.0 ? v[i] / sd : 0.0;
    const KsResult ks = ks_normal(z);
    c.ks_statistic = ks.statistic;
    c.ks_p = ks.p_value;
    b.cells.push_back(c);
  }
  b.cov.resize(static_cast<Eigen::Index>(n_t), static_cast<Eigen::Index>(n_t));
  b.cov_se.resizeLike(b.cov);
  for (std::size_t i = 0; i < n_t; ++i) {
    for (std::size_t j = i; j < n_t; ++j) {
      const Estimate e = sample_covariance(x[i], x[j]);
      const auto ii = static_cast<Eigen::Index>(i), jj = static_cast<Eigen::Index>(j);
      b.cov(ii, jj) = b.cov(jj, ii) = e.value;
      b.cov_se(ii, jj) = b.cov_se(jj, ii) = e.se;
    }
  }
  b.tightness_slope = std::numeric_limits<double>::quiet_NaN();
  if (n_t >= 3) {
    std::vector<double> lx, ly;
    const auto& last = x[n_t - 1];
    for (std::size_t i = 0; i + 1 < n_t; ++i) {
      double m4 = 0.0;
      for (std::size_t r = 0; r < last.size(); ++r) m4 += std::pow(last[r] - x[i][r], 4);
      m4 /= static_cast<double>(last.size());
      if (m4 > 0.0) {
        lx.push_back(std::log(cfg.t_list[n_t - 1] - cfg.t_list[i]));
        ly.push_back(std::log(m4));
      }
    }
    if (lx.size() >= 2) b.tightness_slope = ols_slope(lx, ly);
  }
  if (cfg.keep_samples) b.samples = std::move(x);
  return b;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (q < 2) throw ConfigError("q must be >= 2");
  if (reps < 1) throw ConfigError("reps must be >= 1");
  if (reps < 8) throw ConfigError("reps must be >= 8 for the moment and KS statistics");
  if (k_list.empty()) throw ConfigError("k_list must not be empty");
  if (t_list.empty()) throw ConfigError("t_list must not be empty");
  for (std::size_t i = 0; i < k_list.size(); ++i) {
    if (!(k_list[i] > 1.0) || !std::isfinite(k_list[i])) throw ConfigError("every k must be a finite number > 1");
    if (i > 0 && !(k_list[i] > k_list[i - 1])) throw ConfigError("k_list must be strictly increasing");
  }
  for (std::size_t i = 0; i < t_list.size(); ++i) {
    if (!(t_list[i] > 0.0) || !std::isfinite(t_list[i])) throw ConfigError("every t must be positive");
    if (i > 0 && !(t_list[i] > t_list[i - 1])) throw ConfigError("t_list must be strictly increasing");
  }
  if (resolution < 1 || warmup < 1) throw ConfigError("grid resolution must be positive");
  if (budget_seconds < 0.0) throw ConfigError("budget must be non-negative");
  IterConfig{q, h, k_list.front(), t_list, scheme, levels}.validate();
}

std::vector<std::vector<std::vector<double>>> simulate_x(const ExperimentConfig& cfg) { return simulate_all(cfg, false); }

std::vector<std::vector<std::vector<double>>> simulate_x_reference(const ExperimentConfig& cfg) {
  return simulate_all(cfg, true);
}

McReport run_experiment(const ExperimentConfig& cfg) {
  if (cfg.reps < 1) throw ConfigError("reps must be >= 1");
  cfg.validate();
  McReport report;
  report.config = cfg;
  const Deadline deadline = make_deadline(cfg.budget_seconds);
  for (std::size_t ki = 0; ki < cfg.k_list.size(); ++ki) {
    std::vector<std::vector<double>> x;
    bool jittered = false;
    const bool complete = simulate_block(cfg, ki, false, deadline, x, &jittered);
    if (!complete) {
      report.partial = true;
      throw PartialReportError("time budget of " + std::to_string(cfg.budget_seconds) + " s exhausted after " +
                                   std::to_string(ki) + " of " + std::to_string(cfg.k_list.size()) + " k values",
                               report);
    }
    const auto grid = TimeGrid::geometric(cfg.k_list[ki], cfg.t_list.back(), cfg.resolution, cfg.warmup);
    const IterPlan plan(grid, IterConfig{cfg.q, cfg.h, cfg.k_list[ki], cfg.t_list, cfg.scheme, cfg.levels});
    KBlock block = summarize_block(cfg, cfg.k_list[ki], std::move(x), plan.snap_errors());
    block.jittered = jittered;
    report.blocks.push_back(std::move(block));
  }
  return report;
}

TightnessResult tightness_probe(int q, const Hurst& h, double k, const std::vector<std::pair<double, double>>& t_pairs,
                                std::int64_t reps, std::uint64_t seed, std::size_t resolution, Parallelism par) {
  std::vector<std::pair<double, double>> used;
  std::vector<double> times;
  for (const auto& [tau, t] : t_pairs) {
    if (!(tau > 0.0) || tau > t) throw DomainError("tightness pairs need 0 < tau <= t");
    if (tau == t) continue;
    used.emplace_back(tau, t);
    times.push_back(tau);
    times.push_back(t);
  }
  if (used.size() < 2) throw DomainError("tightness_probe needs at least 2 non-degenerate pairs");
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());

  ExperimentConfig cfg;
  cfg.q = q;
  cfg.h = h;
  cfg.k_list = {k};
  cfg.t_list = times;
  cfg.reps = reps;
  cfg.seed = seed;
  cfg.resolution = resolution;
  cfg.parallel = par;
  const auto x = simulate_x(cfg)[0];
  auto index_of = [&](double t) {
    return static_cast<std::size_t>(std::lower_bound(times.begin(), times.end(), t) - times.begin());
  };
  TightnessResult out;
  std::vector<double> lx, ly;
  for (const auto& [tau, t] : used) {
    const auto& a = x[index_of(tau)];
    const auto& b = x[index_of(t)];
    double m4 = 0.0;
    for (std::size_t r = 0; r < a.size(); ++r) m4 += std::pow(b[r] - a[r], 4);
    m4 /= static_cast<double>(a.size());
    out.gaps.push_back(t - tau);
    out.moments.push_back(m4);
    if (m4 > 0.0) {
      lx.push_back(std::log(t - tau));
      ly.push_back(std::log(m4));
    }
  }
  if (lx.size() < 2) throw DomainError("tightness_probe: fewer than 2 pairs with a positive moment");
  out.slope = ols_slope(lx, ly);
  return out;
}

RateResult rate_probe(const std::vector<McReport>& reports, double t, double sigma_sq) {
  if (!(sigma_sq > 0.0)) throw DomainError("rate_probe needs a positive sigma^2");
  RateResult out;
  std::vector<double> ks_seen;
  for (const auto& rep : reports) {
    for (const auto& b : rep.blocks) {
      const auto it = std::find_if(b.cells.begin(), b.cells.end(), [&](const CellStats& c) { return c.t == t; });
      if (it == b.cells.end()) continue;
      if (std::find(ks_seen.begin(), ks_seen.end(), b.k) != ks_seen.end()) continue;
      const double m2 = it->second_moment.value;
      if (!(m2 > 0.0)) continue;
      ks_seen.push_back(b.k);
      RatePoint p;
      p.k = b.k;
      p.log_log_k = std::log(std::log(b.k));
      double gap = it->gap.gap;
      if (!(gap > 0.0)) {
        gap = it->gap.se;
        p.clamped = true;
      }
      const double target = sigma_sq * t;
      p.moment_term = 2.0 * std::sqrt(gap / (3.0 * m2 * m2));
      p.variance_term = 2.0 * std::abs(m2 - target) / std::max(m2, target);
      p.bound = p.moment_term + p.variance_term;
      if (p.bound > 0.0) out.points.push_back(p);
    }
  }
  if (out.points.size() < 3) throw DomainError("rate_probe needs at least 3 distinct k with usable moments");
  std::sort(out.points.begin(), out.points.end(), [](const RatePoint& a, const RatePoint& b) { return a.k < b.k; });
  std::vector<double> lx, ly;
  for (const auto& p : out.points) {
    lx.push_back(p.log_log_k);
    ly.push_back(std::log(p.bound));
  }
  out.exponent = ols_slope(lx, ly);
  return out;
}

WindingStats winding_experiment(const Hurst& h, double t_end, std::int64_t reps, std::uint64_t seed,
                                std::size_t resolution, Scheme scheme, Parallelism par) {
  if (!(t_end > 1.0) || !std::isfinite(t_end)) throw ConfigError("winding t must be a finite number > 1");
  if (reps < 8) throw ConfigError("reps must be >= 8");
  auto grid = std::make_shared<const TimeGrid>(TimeGrid::geometric(t_end, 1.0, resolution));
  const FbmSampler sampler(grid, h, SamplingMethod::cholesky);
  std::vector<WindingTerms> terms(static_cast<std::size_t>(reps));
  const std::int64_t n_tasks = (reps + kRepsPerTask - 1) / kRepsPerTask;
  parallel_for(n_tasks, par, [&](std::int64_t task_id) {
    const std::int64_t first = task_id * kRepsPerTask;
    const std::int64_t count = std::min(kRepsPerTask, reps - first);
    std::vector<std::uint64_t> seeds;
    for (std::int64_t r = 0; r < count; ++r) {
      for (std::uint64_t c = 0; c < 2; ++c) {
        seeds.push_back(path_stream_seed(seed, kWindingStream, static_cast<std::uint64_t>(first + r), c));
      }
    }
    Eigen::MatrixXd paths;
    sampler.sample_columns(seeds, paths);
    for (std::int64_t r = 0; r < count; ++r) {
      terms[static_cast<std::size_t>(first + r)] =
          winding_terms(*grid, paths.col(2 * r).data(), paths.col(2 * r + 1).data(), h, t_end, scheme);
    }
  });
  const double log_t = std::log(t_end);
  std::vector<double> z, zp, a, b;
  for (const auto& w : terms) {
    z.push_back(w.z);
    zp.push_back(w.zprime());
    a.push_back(w.term_21);
    b.push_back(w.term_12);
  }
  auto scaled = [&](Estimate e) { return Estimate{e.value / log_t, e.se / log_t}; };
  WindingStats s;
  s.var_z = scaled(summarize_moments(z).var);
  s.var_zprime = scaled(summarize_moments(zp).var);
  s.var_term_21 = scaled(summarize_moments(a).var);
  s.var_term_12 = scaled(summarize_moments(b).var);
  s.cov_terms = scaled(sample_covariance(a, b));
  s.samples = std::move(terms);
  return s;
}

}  // namespace fbmclt
