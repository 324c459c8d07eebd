#include "fbmclt/report.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace fbmclt {

namespace {

Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json matrix(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(number(m(i, j)));
    rows.push_back(row);
  }
  return rows;
}

// Fixed 17 significant digits so CSV output is byte-stable.
std::string fmt(double v) {
  if (!std::isfinite(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

Json to_json(const QuadResult& r) {
  Json j;
  j["value"] = number(r.value);
  j["error"] = number(r.error_estimate);
  j["n_evals"] = r.n_evals;
  j["method"] = to_string(r.method);
  return j;
}

Json to_json(const Estimate& e) {
  Json j;
  j["value"] = number(e.value);
  j["se"] = number(e.se);
  return j;
}

Json to_json(const McReport& r) {
  const auto& c = r.config;
  Json cfg;
  cfg["q"] = c.q;
  cfg["H"] = c.h.value();
  cfg["k"] = c.k_list;
  cfg["t"] = c.t_list;
  cfg["reps"] = c.reps;
  cfg["seed"] = c.seed;
  cfg["scheme"] = to_string(c.scheme);
  cfg["resolution"] = c.resolution;
  cfg["warmup"] = c.warmup;
  cfg["levels"] = c.levels;
  Json blocks = Json::array();
  for (const auto& b : r.blocks) {
    Json jb;
    jb["k"] = b.k;
    Json cells = Json::array();
    for (const auto& cell : b.cells) {
      Json jc;
      jc["t"] = cell.t;
      jc["sample_mean"] = to_json(cell.mean);
      jc["sample_var"] = to_json(cell.var);
      jc["second_moment"] = to_json(cell.second_moment);
      jc["fourth_moment"] = to_json(cell.fourth_moment);
      jc["fourth_moment_gap"] = Json{{"value", number(cell.gap.gap)}, {"se", number(cell.gap.se)}};
      jc["ks_statistic"] = number(cell.ks_statistic);
      jc["ks_p"] = number(cell.ks_p);
      jc["snap_error"] = number(cell.snap_error);
      cells.push_back(jc);
    }
    jb["cells"] = cells;
    jb["cov"] = matrix(b.cov);
    jb["cov_se"] = matrix(b.cov_se);
    jb["tightness_slope"] = number(b.tightness_slope);
    jb["jittered"] = b.jittered;
    if (!b.samples.empty()) jb["samples"] = b.samples;
    blocks.push_back(jb);
  }
  Json j;
  j["config"] = cfg;
  j["partial"] = r.partial;
  j["blocks"] = blocks;
  return j;
}

Json to_json(const FbmPathSet& p) {
  Json j;
  j["H"] = p.hurst.value();
  j["d"] = p.d;
  j["seed"] = p.seed;
  j["method"] = to_string(p.method);
  j["spacing"] = to_string(p.grid->spacing());
  j["time"] = p.grid->points();
  Json comps = Json::array();
  for (int i = 0; i < p.d; ++i) {
    std::vector<double> row(p.grid->size());
    for (std::size_t m = 0; m < row.size(); ++m) row[m] = p.values(i, static_cast<Eigen::Index>(m));
    comps.push_back(row);
  }
  j["components"] = comps;
  return j;
}

Json to_json(const WindingStats& w) {
  Json j;
  j["var_z_over_log_t"] = to_json(w.var_z);
  j["var_zprime_over_log_t"] = to_json(w.var_zprime);
  j["var_term_21_over_log_t"] = to_json(w.var_term_21);
  j["var_term_12_over_log_t"] = to_json(w.var_term_12);
  j["cov_terms_over_log_t"] = to_json(w.cov_terms);
  return j;
}

void write_csv(std::ostream& os, const McReport& r) {
  os << "k,t,sample_mean,sample_mean_se,sample_var,sample_var_se,second_moment,second_moment_se,"
        "fourth_moment,fourth_moment_se,fourth_moment_gap,fourth_moment_gap_se,ks_statistic,ks_p,"
        "snap_error,tightness_slope\n";
  for (const auto& b : r.blocks) {
    for (const auto& c : b.cells) {
      os << fmt(b.k) << ',' << fmt(c.t) << ',' << fmt(c.mean.value) << ',' << fmt(c.mean.se) << ','
         << fmt(c.var.value) << ',' << fmt(c.var.se) << ',' << fmt(c.second_moment.value) << ','
         << fmt(c.second_moment.se) << ',' << fmt(c.fourth_moment.value) << ',' << fmt(c.fourth_moment.se) << ','
         << fmt(c.gap.gap) << ',' << fmt(c.gap.se) << ',' << fmt(c.ks_statistic) << ',' << fmt(c.ks_p) << ','
         << fmt(c.snap_error) << ',' << fmt(b.tightness_slope) << '\n';
    }
  }
}

void write_csv(std::ostream& os, const QuadResult& r, const std::string& label) {
  os << (label.empty() ? "" : "quantity,") << "value,error,n_evals,method\n";
  if (!label.empty()) os << label << ',';
  os << fmt(r.value) << ',' << fmt(r.error_estimate) << ',' << r.n_evals << ',' << to_string(r.method) << '\n';
}

}  // namespace fbmclt
