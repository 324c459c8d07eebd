#include "fbmclt/iterint.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "fbmclt/errors.hpp"

namespace fbmclt {

std::string to_string(Scheme s) { return s == Scheme::left_point ? "left_point" : "trapezoid"; }

Scheme parse_scheme(const std::string& s) {
  if (s == "left_point" || s == "left") return Scheme::left_point;
  if (s == "trapezoid") return Scheme::trapezoid;
  throw ConfigError("unknown scheme '" + s + "' (expected left_point or trapezoid)");
}

void IterConfig::validate() const {
  if (q < 2) throw ConfigError("iteration order q must be >= 2");
  if (q > 17) throw ConfigError("iteration order q above 17 is not supported");
  if (!(k > 1.0) || !std::isfinite(k)) throw ConfigError("base k must be a finite number > 1");
  if (checkpoints.empty()) throw ConfigError("at least one checkpoint is required");
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    if (!(checkpoints[i] > 0.0) || !std::isfinite(checkpoints[i])) throw ConfigError("checkpoints must be positive");
    if (i > 0 && !(checkpoints[i] > checkpoints[i - 1])) throw ConfigError("checkpoints must be strictly increasing");
  }
  if (!levels.empty()) {
    if (static_cast<int>(levels.size()) != q) throw ConfigError("levels must assign one component per level");
    std::set<int> seen(levels.begin(), levels.end());
    if (static_cast<int>(seen.size()) != q || *seen.begin() < 0) {
      throw ConfigError("levels must be distinct non-negative component indices");
    }
  }
}

IterPlan::IterPlan(const TimeGrid& grid, const IterConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  levels_ = cfg_.levels;
  if (levels_.empty()) {
    for (int l = 0; l < cfg_.q; ++l) levels_.push_back(l);
  }
  needed_ = *std::max_element(levels_.begin(), levels_.end()) + 1;

  const double log_k = std::log(cfg_.k);
  const double horizon = std::exp(log_k * cfg_.checkpoints.back());
  if (horizon > grid.back() * (1.0 + 1e-12)) {
    throw DomainError("grid ends at " + std::to_string(grid.back()) + " but the largest checkpoint needs k^t = " +
                      std::to_string(horizon));
  }
  start_ = grid.index_at_or_above(1.0);
  for (double t : cfg_.checkpoints) {
    const double target = std::exp(log_k * t);
    const std::size_t idx = std::max(grid.index_at_or_below(target), start_);
    stops_.push_back(idx);
    snap_error_.push_back(std::max(0.0, (target - grid[idx]) / target));
  }
  const double qh = cfg_.q * cfg_.h.value();
  weight_.resize(grid.size());
  for (std::size_t m = 0; m < grid.size(); ++m) weight_[m] = m < start_ ? 0.0 : std::pow(grid[m], -qh);
}

void IterPlan::evaluate(const double* const* comps, double* y) const {
  const int q = cfg_.q;
  const std::size_t a = start_;
  const std::size_t last = stops_.back();
  const double* b1 = comps[levels_[0]];
  const double* bq = comps[levels_[static_cast<std::size_t>(q - 1)]];
  const double b1_start = b1[a];
  // j[l] holds J_{l+1}(m); j_next is used by the trapezoid update.
  double j[16] = {0.0};
  double j_next[16] = {0.0};
  double acc = 0.0;
  std::size_t next_cp = 0;
  const std::size_t n_cp = stops_.size();
  while (next_cp < n_cp && stops_[next_cp] == a) y[next_cp++] = 0.0;

  if (cfg_.scheme == Scheme::left_point) {
    for (std::size_t m = a; m < last; ++m) {
      j[0] = b1[m] - b1_start;
      acc += weight_[m] * j[q - 2] * (bq[m + 1] - bq[m]);
      // Descending order so J_{l-1}(m) is read before it is advanced.
      for (int l = q - 2; l >= 1; --l) {
        const double* bl = comps[levels_[static_cast<std::size_t>(l)]];
        j[l] += j[l - 1] * (bl[m + 1] - bl[m]);
      }
      while (next_cp < n_cp && stops_[next_cp] == m + 1) y[next_cp++] = acc;
    }
  } else {
    j[0] = 0.0;
    for (std::size_t m = a; m < last; ++m) {
      j_next[0] = b1[m + 1] - b1_start;
      for (int l = 1; l <= q - 2; ++l) {
        const double* bl = comps[levels_[static_cast<std::size_t>(l)]];
        j_next[l] = j[l] + 0.5 * (j[l - 1] + j_next[l - 1]) * (bl[m + 1] - bl[m]);
      }
      acc += 0.5 * (weight_[m] * j[q - 2] + weight_[m + 1] * j_next[q - 2]) * (bq[m + 1] - bq[m]);
      for (int l = 0; l <= q - 2; ++l) j[l] = j_next[l];
      while (next_cp < n_cp && stops_[next_cp] == m + 1) y[next_cp++] = acc;
    }
  }
}

IterIntegralEstimate iterated_integral(const FbmPathSet& paths, const IterConfig& cfg) {
  cfg.validate();
  if (paths.d < cfg.q) {
    throw ConfigError("path set has " + std::to_string(paths.d) + " components but q = " + std::to_string(cfg.q) +
                      " levels need distinct drivers");
  }
  IterPlan plan(*paths.grid, cfg);
  if (plan.components_needed() > paths.d) throw ConfigError("levels refer to a component beyond d");
  // values is d x n column-major, so copy rows into contiguous buffers.
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(paths.d));
  std::vector<const double*> comps(static_cast<std::size_t>(paths.d));
  for (int i = 0; i < paths.d; ++i) {
    auto& r = rows[static_cast<std::size_t>(i)];
    r.resize(paths.grid->size());
    for (std::size_t m = 0; m < r.size(); ++m) r[m] = paths.values(i, static_cast<Eigen::Index>(m));
    comps[static_cast<std::size_t>(i)] = r.data();
  }
  IterIntegralEstimate est;
  est.config = cfg;
  est.y_values.resize(cfg.checkpoints.size());
  plan.evaluate(comps.data(), est.y_values.data());
  const double root_log_k = std::sqrt(std::log(cfg.k));
  for (double y : est.y_values) est.x_values.push_back(y / root_log_k);
  est.snapped_index = plan.stops();
  est.snap_error = plan.snap_errors();
  return est;
}

WindingTerms winding_terms(const TimeGrid& grid, const double* b1, const double* b2, const Hurst& h, double t_end,
                           Scheme scheme) {
  if (!(t_end >= 1.0)) throw DomainError("winding functional needs t_end >= 1");
  if (t_end > grid.back() * (1.0 + 1e-12)) throw DomainError("grid does not reach t_end");
  const std::size_t a = grid.index_at_or_above(1.0);
  const std::size_t e = std::max(grid.index_at_or_below(t_end), a);
  const double two_h = 2.0 * h.value();
  WindingTerms out;
  const double b1a = b1[a];
  const double b2a = b2[a];
  double w_prev = std::pow(grid[a], -two_h);
  for (std::size_t m = a; m < e; ++m) {
    const double d1 = b1[m + 1] - b1[m];
    const double d2 = b2[m + 1] - b2[m];
    const double w_next = std::pow(grid[m + 1], -two_h);
    if (scheme == Scheme::left_point) {
      out.z += w_prev * (b2[m] * d1 - b1[m] * d2);
      out.term_21 += w_prev * (b2[m] - b2a) * d1;
      out.term_12 += w_prev * (b1[m] - b1a) * d2;
    } else {
      out.z += 0.5 * (w_prev * b2[m] + w_next * b2[m + 1]) * d1 - 0.5 * (w_prev * b1[m] + w_next * b1[m + 1]) * d2;
      out.term_21 += 0.5 * (w_prev * (b2[m] - b2a) + w_next * (b2[m + 1] - b2a)) * d1;
      out.term_12 += 0.5 * (w_prev * (b1[m] - b1a) + w_next * (b1[m + 1] - b1a)) * d2;
    }
    w_prev = w_next;
  }
  return out;
}

WindingTerms winding_terms(const FbmPathSet& paths, double t_end, Scheme scheme) {
  if (paths.d < 2) throw ConfigError("winding functionals need d >= 2 components");
  const std::size_t n = paths.grid->size();
  std::vector<double> b1(n), b2(n);
  for (std::size_t m = 0; m < n; ++m) {
    b1[m] = paths.values(0, static_cast<Eigen::Index>(m));
    b2[m] = paths.values(1, static_cast<Eigen::Index>(m));
  }
  return winding_terms(*paths.grid, b1.data(), b2.data(), paths.hurst, t_end, scheme);
}

double winding_functional(const FbmPathSet& paths, const Hurst& h, double t_end, Winding variant, Scheme scheme) {
  if (paths.d < 2) throw ConfigError("winding functionals need d >= 2 components");
  const std::size_t n = paths.grid->size();
  std::vector<double> b1(n), b2(n);
  for (std::size_t m = 0; m < n; ++m) {
    b1[m] = paths.values(0, static_cast<Eigen::Index>(m));
    b2[m] = paths.values(1, static_cast<Eigen::Index>(m));
  }
  const WindingTerms w = winding_terms(*paths.grid, b1.data(), b2.data(), h, t_end, scheme);
  return variant == Winding::Z ? w.z : w.zprime();
}

}  // namespace fbmclt
