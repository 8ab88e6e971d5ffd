#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rdsurv/censoring.hpp"
#include "rdsurv/data.hpp"
#include "rdsurv/errors.hpp"
#include "rdsurv/forest.hpp"
#include "rdsurv/rd.hpp"

namespace rdsurv {

//! Censoring handling: doubly robust scores, IPCW with a pooled Kaplan-Meier
//! censoring curve, naive dropping of units censored before h, or the
//! complete-data benchmark (simulation only).
enum class Method { Dr, Ipcw, Naive, Complete };

inline std::string to_string(Method m) {
  switch (m) {
  case Method::Dr: return "dr";
  case Method::Ipcw: return "ipcw";
  case Method::Naive: return "naive";
  case Method::Complete: return "complete";
  }
  return "unknown";
}

inline Method parse_method(const std::string& s) {
  if (s == "dr")
    return Method::Dr;
  if (s == "ipcw")
    return Method::Ipcw;
  if (s == "naive")
    return Method::Naive;
  if (s == "complete")
    return Method::Complete;
  throw Error(ErrorCode::InvalidArgument, "unknown method '" + s + "'");
}

inline EstimandKind parse_estimand(const std::string& s) {
  if (s == "survival_probability" || s == "survival" || s == "pi")
    return EstimandKind::SurvivalProbability;
  if (s == "rmst" || s == "tau")
    return EstimandKind::Rmst;
  throw Error(ErrorCode::InvalidArgument, "unknown estimand '" + s + "'");
}

//! Fits event and censoring forests and returns their out-of-bag panel.
inline CurvePanel fit_oob_panel(const SurvivalDataset& ds, const ForestConfig& cfg) {
  const auto event_forest = fit_survival_forest(ds, SurvivalTarget::Event, cfg);
  const auto censor_forest = fit_survival_forest(ds, SurvivalTarget::Censoring, cfg);
  return predict_oob_curves(event_forest, censor_forest, ds, cfg.threads);
}

inline RdInput rd_input_from(const SurvivalDataset& ds, std::vector<double> outcome) {
  RdInput in;
  in.cutoff = ds.cutoff();
  in.z.reserve(ds.size());
  for (const auto& u : ds.units())
    in.z.push_back(u.z);
  in.outcome = std::move(outcome);
  return in;
}

//! Treatment-receipt input sharing z, weights and mask with `outcome`.
inline RdInput treatment_input_from(const SurvivalDataset& ds, const RdInput& outcome) {
  RdInput t = outcome;
  for (std::size_t i = 0; i < ds.size(); ++i)
    t.outcome[i] = ds.treated(i) ? 1.0 : 0.0;
  return t;
}

struct PipelineConfig {
  EstimandKind estimand = EstimandKind::SurvivalProbability;
  double horizon = 0.0;
  Method method = Method::Dr;
  ForestConfig forest;
  FuzzyOptions rd;
  bool allow_in_bag = false;
};

struct PipelineResult {
  Estimand estimand;
  Method method = Method::Dr;
  Design design = Design::Sharp;
  std::optional<RdFit> sharp;
  std::optional<FuzzyFit> fuzzy;
  RdInput input;
  std::optional<DrScores> scores;
  std::optional<IpcwResult> ipcw;
  std::optional<CurvePanel> panel;
  std::vector<std::string> warnings;
};

//! Builds the analysis outcome for one estimand from an existing panel
//! (required for Dr only).
inline RdInput censoring_adjusted_input(const SurvivalDataset& ds, const Estimand& est, Method method,
                                        const CurvePanel* panel, const PipelineConfig& cfg,
                                        PipelineResult* trace = nullptr) {
  switch (method) {
  case Method::Dr: {
    if (!panel)
      throw Error(ErrorCode::InvalidArgument, "doubly robust scores need a curve panel");
    DrOptions opt;
    opt.allow_in_bag = cfg.allow_in_bag;
    DrScores s = dr_scores(ds, est, *panel, opt);
    RdInput in = rd_input_from(ds, s.gamma);
    if (trace) {
      trace->warnings.insert(trace->warnings.end(), s.warnings.begin(), s.warnings.end());
      trace->scores = std::move(s);
    }
    return in;
  }
  case Method::Ipcw:
  case Method::Naive: {
    IpcwOptions opt;
    opt.censor_floor = cfg.forest.censor_floor;
    IpcwResult r = ipcw_transform(ds, est, opt);
    if (method == Method::Naive)
      for (std::size_t i = 0; i < ds.size(); ++i)
        r.weight[i] = r.included[i] ? 1.0 : 0.0;
    RdInput in = rd_input_from(ds, r.outcome);
    in.weight = r.weight;
    in.included = r.included;
    if (trace) {
      if (method == Method::Ipcw && r.clamped > 0)
        trace->warnings.push_back("IPCW weights clamped at 1/censor_floor for " + std::to_string(r.clamped) +
                                  " unit(s)");
      trace->ipcw = std::move(r);
    }
    return in;
  }
  case Method::Complete:
    break;
  }
  throw Error(ErrorCode::InvalidArgument, "the complete-data method needs uncensored event times");
}

//! Full estimation pipeline on a censored dataset.
inline PipelineResult run_pipeline(const SurvivalDataset& ds, const PipelineConfig& cfg) {
  PipelineResult res;
  res.method = cfg.method;
  res.design = ds.design();
  res.estimand = {cfg.estimand, make_horizon(ds, cfg.horizon)};
  if (res.estimand.horizon.snapped)
    res.warnings.push_back("horizon " + std::to_string(cfg.horizon) + " is not an observed time; using grid point " +
                           std::to_string(ds.grid().time(res.estimand.horizon.grid_index)));

  if (cfg.method == Method::Dr) {
    res.panel = fit_oob_panel(ds, cfg.forest);
    res.warnings.insert(res.warnings.end(), res.panel->meta.warnings.begin(), res.panel->meta.warnings.end());
  }
  res.input = censoring_adjusted_input(ds, res.estimand, cfg.method, res.panel ? &*res.panel : nullptr, cfg, &res);

  if (ds.design() == Design::Fuzzy) {
    res.fuzzy = fuzzy_estimate(res.input, treatment_input_from(ds, res.input), cfg.rd);
  } else {
    res.sharp = rd_estimate(res.input, cfg.rd.rd);
  }
  const RdFit& fit = res.sharp ? *res.sharp : res.fuzzy->itt;
  if (fit.degenerate_se)
    res.warnings.push_back("residuals vanish near the cutoff; standard error reported as 0");
  return res;
}

} // namespace rdsurv
