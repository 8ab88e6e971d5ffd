#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "rdsurv/data.hpp"
#include "rdsurv/errors.hpp"
#include "rdsurv/forest.hpp"
#include "rdsurv/survival.hpp"

namespace rdsurv {

enum class EstimandKind { SurvivalProbability, Rmst };

inline std::string to_string(EstimandKind k) {
  return k == EstimandKind::SurvivalProbability ? "survival_probability" : "rmst";
}

struct Estimand {
  EstimandKind kind = EstimandKind::SurvivalProbability;
  Horizon horizon;
};

//! Complete-data outcome for a unit with event time t: 1(t > h) or min(t, h).
inline double complete_outcome(EstimandKind kind, double t, double h) {
  return kind == EstimandKind::SurvivalProbability ? (t > h ? 1.0 : 0.0) : std::min(t, h);
}

// ---------------------------------------------------------------------------
// Inverse probability of censoring weighting

struct IpcwOptions {
  //! Censoring survival is clamped below at this value; 0 disables the clamp
  //! (a zero then raises ZeroCensorSurvival).
  double censor_floor = 0.05;
};

struct IpcwResult {
  std::vector<std::uint8_t> included; //!< event observed, or followed past h
  std::vector<double> weight;         //!< 1 / S_C(min(h, y)); 0 for excluded units
  std::vector<double> outcome;        //!< 1(y > h) or min(y, h)
  std::size_t clamped = 0;            //!< included units whose weight hit the clamp
};

namespace detail {

template <class CensorAt>
IpcwResult ipcw_impl(const SurvivalDataset& ds, const Estimand& est, const IpcwOptions& opt, CensorAt&& censor_at) {
  const double h = est.horizon.h;
  IpcwResult r;
  r.included.resize(ds.size());
  r.weight.resize(ds.size());
  r.outcome.resize(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const Unit& u = ds.unit(i);
    const HorizonStatus st = remap_unit(ds, est.horizon, i);
    r.outcome[i] = complete_outcome(est.kind, u.y, h);
    r.included[i] = st.observed ? 1 : 0;
    if (!st.observed) {
      r.weight[i] = 0.0;
      continue;
    }
    double sc = censor_at(i, st.grid_index);
    if (opt.censor_floor > 0.0 && sc <= opt.censor_floor) {
      sc = opt.censor_floor;
      ++r.clamped;
    }
    if (!(sc > 0.0))
      throw Error(ErrorCode::ZeroCensorSurvival,
                  "censoring survival is zero at unit " + std::to_string(i) + "; positivity is violated");
    r.weight[i] = 1.0 / std::min(sc, 1.0);
  }
  return r;
}

} // namespace detail

//! Weights from a single (typically unconditional Kaplan-Meier) censoring curve.
inline IpcwResult ipcw_transform(const SurvivalDataset& ds, const Estimand& est, const CurveView& censor_curve,
                                 IpcwOptions opt = {}) {
  if (censor_curve.size() != ds.grid().size())
    throw Error(ErrorCode::InvalidArgument, "censoring curve does not match the dataset grid");
  return detail::ipcw_impl(ds, est, opt, [&](std::size_t, std::size_t k) { return censor_curve.at(k); });
}

//! Weights from per-unit conditional censoring curves.
inline IpcwResult ipcw_transform(const SurvivalDataset& ds, const Estimand& est, const CurvePanel& panel,
                                 IpcwOptions opt = {}) {
  if (panel.size() != ds.size() || !(panel.grid() == ds.grid()))
    throw Error(ErrorCode::InvalidArgument, "panel does not match the dataset");
  return detail::ipcw_impl(ds, est, opt, [&](std::size_t i, std::size_t k) { return panel.censor(i).at(k); });
}

//! Weights from the pooled Kaplan-Meier censoring curve.
inline IpcwResult ipcw_transform(const SurvivalDataset& ds, const Estimand& est, IpcwOptions opt = {}) {
  const SurvivalCurve km = kaplan_meier(ds, /*censoring=*/true);
  return ipcw_transform(ds, est, km.view(), opt);
}

// ---------------------------------------------------------------------------
// Doubly robust scores

struct DrOptions {
  bool allow_in_bag = false;     //!< debugging only: accept panels that are not out-of-bag
  double survival_floor = 1e-12; //!< event-curve clamp where S_T reaches 0 before H
};

struct DrScores {
  std::vector<double> gamma;
  Estimand estimand;
  PanelMeta panel_meta;
  std::size_t zero_survival_units = 0; //!< units where S_T was clamped
  std::vector<std::string> warnings;
};

namespace detail {

inline void check_panel(const SurvivalDataset& ds, const CurvePanel& panel, const DrOptions& opt) {
  if (panel.size() != ds.size() || !(panel.grid() == ds.grid()))
    throw Error(ErrorCode::InvalidArgument, "panel does not match the dataset");
  if (!panel.oob() && !opt.allow_in_bag)
    throw Error(ErrorCode::PanelNotOob, "doubly robust scores require out-of-bag curves");
}

inline double inverse_censor(const CurveView& sc, std::size_t k, std::size_t unit) {
  const double v = sc.at(k);
  if (!(v > 0.0))
    throw Error(ErrorCode::ZeroCensorSurvival,
                "censoring survival is zero at unit " + std::to_string(unit) + "; positivity is violated");
  return 1.0 / v;
}

// Shared evaluation of
//   Gamma = c_0 + sum_{0<t<H} q_t (c_t - c_{t-1}) + obs q_H (target - c_{H-1})
// written relative to the observed target so that q == 1 reproduces it
// exactly: with b = obs ? target : c_{H-1},
//   Gamma = b + sum_{0<t<H} (q_t - 1)(c_t - c_{t-1}) + obs (q_H - 1)(target - c_{H-1}).
template <class Cond>
double dr_score(const CurveView& sc, const HorizonStatus& st, double target, Cond&& cond, std::size_t unit) {
  const std::size_t H = st.grid_index;
  double correction = 0.0;
  double prev = cond(0);
  for (std::size_t t = 1; t < H; ++t) {
    const double cur = cond(t);
    correction += (inverse_censor(sc, t, unit) - 1.0) * (cur - prev);
    prev = cur;
  }
  // prev is now c_{H-1}
  if (st.observed) {
    correction += (inverse_censor(sc, H, unit) - 1.0) * (target - prev);
    return target + correction;
  }
  return prev + correction;
}

inline void check_envelope(const DrScores& s, double censor_floor) {
  for (std::size_t i = 0; i < s.gamma.size(); ++i) {
    const double g = s.gamma[i];
    if (!std::isfinite(g))
      throw std::logic_error("doubly robust score is not finite at unit " + std::to_string(i));
    if (s.estimand.kind == EstimandKind::SurvivalProbability && censor_floor > 0.0) {
      const double lo = -1.0 / censor_floor - 1e-9, hi = 1.0 + 2.0 / censor_floor + 1e-9;
      if (g < lo || g > hi)
        throw std::logic_error("doubly robust score outside its envelope at unit " + std::to_string(i));
    }
  }
}

} // namespace detail

//! Scores whose mean estimates P(T > h), from per-unit event and censoring
//! curves. Sums run over grid points strictly before H = min(y, h).
inline DrScores dr_scores_survival(const SurvivalDataset& ds, const Horizon& hz, const CurvePanel& panel,
                                   DrOptions opt = {}) {
  detail::check_panel(ds, panel, opt);
  DrScores out;
  out.estimand = {EstimandKind::SurvivalProbability, hz};
  out.panel_meta = panel.meta;
  out.gamma.resize(ds.size());
  const std::size_t kh = hz.grid_index;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const HorizonStatus st = remap_unit(ds, hz, i);
    const CurveView se = panel.event(i);
    const CurveView sc = panel.censor(i);
    const double s_h = se.at(kh);
    bool clamped = false;
    auto cond = [&](std::size_t t) {
      double s = se.at(t);
      if (!(s > opt.survival_floor)) {
        s = opt.survival_floor;
        clamped = true;
      }
      return std::min(s_h / s, 1.0);
    };
    const double target = ds.unit(i).y > hz.h ? 1.0 : 0.0;
    out.gamma[i] = detail::dr_score(sc, st, target, cond, i);
    if (clamped)
      ++out.zero_survival_units;
  }
  if (out.zero_survival_units > 0)
    out.warnings.push_back("ZeroSurvival: event curve reached 0 before H for " +
                           std::to_string(out.zero_survival_units) + " unit(s); clamped");
  detail::check_envelope(out, panel.meta.censor_floor);
  return out;
}

//! Scores whose mean estimates E[min(T, h)]: conditional restricted means
//! m(t) = E[min(T, h) | T > t] take the place of S(h) / S(t).
inline DrScores dr_scores_rmst(const SurvivalDataset& ds, const Horizon& hz, const CurvePanel& panel,
                               DrOptions opt = {}) {
  detail::check_panel(ds, panel, opt);
  DrScores out;
  out.estimand = {EstimandKind::Rmst, hz};
  out.panel_meta = panel.meta;
  out.gamma.resize(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const HorizonStatus st = remap_unit(ds, hz, i);
    const CurveView se = panel.event(i);
    const CurveView sc = panel.censor(i);
    bool clamped = false;
    for (std::size_t t = 0; t < st.grid_index; ++t)
      if (!(se.at(t) > opt.survival_floor)) {
        clamped = true;
        break;
      }
    const std::vector<double> m = conditional_rmst_profile(se, hz, opt.survival_floor);
    const double target = std::min(ds.unit(i).y, hz.h);
    out.gamma[i] = detail::dr_score(sc, st, target, [&](std::size_t t) { return m[t]; }, i);
    if (clamped)
      ++out.zero_survival_units;
  }
  if (out.zero_survival_units > 0)
    out.warnings.push_back("ZeroSurvival: event curve reached 0 before H for " +
                           std::to_string(out.zero_survival_units) + " unit(s); clamped");
  detail::check_envelope(out, panel.meta.censor_floor);
  return out;
}

inline DrScores dr_scores(const SurvivalDataset& ds, const Estimand& est, const CurvePanel& panel,
                          DrOptions opt = {}) {
  return est.kind == EstimandKind::SurvivalProbability ? dr_scores_survival(ds, est.horizon, panel, opt)
                                                       : dr_scores_rmst(ds, est.horizon, panel, opt);
}

} // namespace rdsurv
