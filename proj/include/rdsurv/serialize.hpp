#pragma once

#include <charconv>
#include <cmath>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rdsurv/censoring.hpp"
#include "rdsurv/diagnostics.hpp"
#include "rdsurv/forest.hpp"
#include "rdsurv/logrank.hpp"
#include "rdsurv/rd.hpp"
#include "rdsurv/simulation.hpp"

namespace rdsurv {

inline constexpr int kSchemaVersion = 1;

using Json = nlohmann::ordered_json;

//! Shortest round-trip decimal form; "NA" for non-finite values.
inline std::string format_number(double v) {
  if (!std::isfinite(v))
    return "NA";
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

inline Json to_json(const RdFit& f) {
  return Json{{"estimate", f.estimate},
              {"estimate_bc", f.estimate_bc},
              {"se_robust", f.se_robust},
              {"ci_low", f.ci_low},
              {"ci_high", f.ci_high},
              {"bandwidth_h", f.bandwidth_h},
              {"bandwidth_b", f.bandwidth_b},
              {"n_eff_left", f.n_eff_left},
              {"n_eff_right", f.n_eff_right},
              {"alpha", f.alpha},
              {"degenerate_se", f.degenerate_se}};
}

inline Json to_json(const FuzzyFit& f) {
  return Json{{"ratio", f.ratio},       {"se_ratio", f.se_ratio}, {"ci_low", f.ci_low},
              {"ci_high", f.ci_high},   {"alpha", f.alpha},       {"itt", to_json(f.itt)},
              {"first_stage", to_json(f.first_stage)}};
}

inline Json to_json(const ForestConfig& c) {
  return Json{{"num_trees", c.num_trees},
              {"mtry", c.mtry},
              {"min_node_size", c.min_node_size},
              {"subsample_fraction", c.subsample_fraction},
              {"seed", c.seed},
              {"censor_floor", c.censor_floor}};
}

inline Json to_json(const DgpSetting& s) {
  return Json{{"id", s.id},
              {"n", s.n},
              {"horizon", s.horizon},
              {"seed", s.seed},
              {"censoring", s.censoring},
              {"treatment_scale", s.treatment_scale}};
}

inline Json to_json(const BiasSummary& b) {
  return Json{{"median", b.median}, {"q1", b.q1}, {"q3", b.q3}, {"mean", b.mean}};
}

inline Json to_json(const CellReport& c) {
  return Json{{"estimand", to_string(c.estimand)},
              {"method", to_string(c.method)},
              {"truth", c.truth.value},
              {"truth_se", c.truth.se},
              {"truth_draws", c.truth.draws},
              {"reps", c.reps},
              {"completed", c.completed},
              {"failed", c.failed},
              {"status", c.failure_budget_exceeded ? "failed" : "ok"},
              {"coverage", c.coverage},
              {"rmse", c.rmse},
              {"rmse_bc", c.rmse_bc},
              {"mean_ci_length", c.mean_ci_length},
              {"mean_estimate", c.mean_estimate},
              {"censoring_bias", to_json(c.censoring_bias)},
              {"censoring_bias_bc", to_json(c.censoring_bias_bc)}};
}

inline Json to_json(const SimReport& r) {
  Json cells = Json::array();
  for (const auto& c : r.cells)
    cells.push_back(to_json(c));
  return Json{{"setting", to_json(r.setting)}, {"reps", r.reps}, {"forest", to_json(r.forest)}, {"cells", cells}};
}

inline Json to_json(const LogRankResult& r) {
  return Json{{"statistic", r.statistic}, {"p_value", r.p_value}, {"observed", r.observed},
              {"expected", r.expected},   {"variance", r.variance}, {"n_group0", r.n_group0},
              {"n_group1", r.n_group1}};
}

inline Json to_json(const LogRankDiagnostic& d) {
  return Json{{"column", d.column},
              {"threshold", d.threshold},
              {"event", to_json(d.event)},
              {"censoring", to_json(d.censoring)}};
}

inline Json positivity_summary(const PositivityDiagnostic& d) {
  return Json{{"threshold", d.threshold},
              {"bandwidth", d.bandwidth},
              {"flagged", d.flagged},
              {"near_cutoff", d.near_cutoff},
              {"flagged_near_cutoff", d.flagged_near_cutoff},
              {"share_flagged_near_cutoff", d.share_flagged_near_cutoff}};
}

inline Json to_json(const std::vector<HistogramBin>& bins) {
  Json a = Json::array();
  for (const auto& b : bins)
    a.push_back(Json{{"low", b.low}, {"high", b.high}, {"events", b.events}, {"censored", b.censored}});
  return a;
}

inline Json error_json(const Error& e) {
  Json j{{"schema_version", kSchemaVersion},
         {"error", {{"code", std::string(to_string(e.code()))}, {"category", std::string(to_string(e.category()))}, {"message", e.what()}}}};
  if (auto* re = dynamic_cast<const RowError*>(&e))
    j["error"]["row"] = re->row();
  return j;
}

// ---------------------------------------------------------------------------
// CSV series

inline void write_curves_csv(std::ostream& os, const CurvePanel& panel) {
  os << "unit_id,t,s_event,s_censor\n";
  const TimeGrid& g = panel.grid();
  for (std::size_t i = 0; i < panel.size(); ++i) {
    const CurveView se = panel.event(i), sc = panel.censor(i);
    for (std::size_t k = 1; k <= g.size(); ++k)
      os << i << ',' << format_number(g.time(k)) << ',' << format_number(se.at(k)) << ','
         << format_number(sc.at(k)) << '\n';
  }
}

inline void write_scores_csv(std::ostream& os, const SurvivalDataset& ds, const DrScores& s) {
  os << "unit_id,z,gamma\n";
  for (std::size_t i = 0; i < ds.size(); ++i)
    os << i << ',' << format_number(ds.unit(i).z) << ',' << format_number(s.gamma[i]) << '\n';
}

inline void write_ipcw_csv(std::ostream& os, const SurvivalDataset& ds, const IpcwResult& r) {
  os << "unit_id,z,outcome,weight,included\n";
  for (std::size_t i = 0; i < ds.size(); ++i)
    os << i << ',' << format_number(ds.unit(i).z) << ',' << format_number(r.outcome[i]) << ','
       << format_number(r.weight[i]) << ',' << int(r.included[i]) << '\n';
}

inline void write_positivity_csv(std::ostream& os, const PositivityDiagnostic& d) {
  os << "unit_id,z,p_uncensored,flagged\n";
  for (std::size_t i = 0; i < d.units.size(); ++i)
    os << i << ',' << format_number(d.units[i].z) << ',' << format_number(d.units[i].p_uncensored) << ','
       << int(d.units[i].flagged) << '\n';
}

inline void write_histogram_csv(std::ostream& os, const std::vector<HistogramBin>& bins) {
  os << "low,high,events,censored\n";
  for (const auto& b : bins)
    os << format_number(b.low) << ',' << format_number(b.high) << ',' << b.events << ',' << b.censored << '\n';
}

inline void write_per_rep_csv(std::ostream& os, const SimReport& r) {
  os << "estimand,method,rep,estimate,estimate_bc,se,ci_low,ci_high,covered,censoring_bias,censoring_bias_bc,error\n";
  for (const auto& c : r.cells)
    for (const auto& p : c.per_rep) {
      std::string err = p.error;
      for (char& ch : err)
        if (ch == ',' || ch == '\n' || ch == '"')
          ch = ' ';
      os << to_string(c.estimand) << ',' << to_string(c.method) << ',' << p.rep << ',';
      if (p.ok)
        os << format_number(p.estimate) << ',' << format_number(p.estimate_bc) << ',' << format_number(p.se) << ','
           << format_number(p.ci_low) << ',' << format_number(p.ci_high) << ',' << int(p.covered) << ','
           << format_number(p.censoring_bias) << ',' << format_number(p.censoring_bias_bc);
      else
        os << "NA,NA,NA,NA,NA,NA,NA,NA";
      os << ',' << err << '\n';
    }
}

} // namespace rdsurv
