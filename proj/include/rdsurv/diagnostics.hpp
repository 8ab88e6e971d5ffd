#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rdsurv/censoring.hpp"
#include "rdsurv/data.hpp"
#include "rdsurv/errors.hpp"
#include "rdsurv/forest.hpp"
#include "rdsurv/logrank.hpp"
#include "rdsurv/survival.hpp"

namespace rdsurv {

struct PositivityUnit {
  double z = 0.0;
  double p_uncensored = 1.0; //!< S_C(min(h, y) | x, z)
  bool flagged = false;
};

struct PositivityDiagnostic {
  std::vector<PositivityUnit> units;
  double threshold = 0.05;
  double bandwidth = 0.0;
  std::size_t near_cutoff = 0;
  std::size_t flagged = 0;
  std::size_t flagged_near_cutoff = 0;
  double share_flagged_near_cutoff = 0.0;
};

//! Probability of remaining uncensored up to min(h, y) for every unit.
//! Units with |z - c| < bandwidth count as near the cutoff.
inline PositivityDiagnostic positivity_diagnostic(const SurvivalDataset& ds, const Horizon& hz,
                                                  const CurvePanel& panel, double bandwidth,
                                                  double threshold = 0.05) {
  if (panel.size() != ds.size() || !(panel.grid() == ds.grid()))
    throw Error(ErrorCode::InvalidArgument, "panel does not match the dataset");
  if (!(threshold >= 0.0 && threshold < 1.0))
    throw Error(ErrorCode::InvalidArgument, "positivity threshold must lie in [0, 1)");
  PositivityDiagnostic d;
  d.threshold = threshold;
  d.bandwidth = bandwidth;
  d.units.resize(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const HorizonStatus st = remap_unit(ds, hz, i);
    PositivityUnit& u = d.units[i];
    u.z = ds.unit(i).z;
    u.p_uncensored = panel.censor(i).at(st.grid_index);
    u.flagged = u.p_uncensored <= threshold;
    const bool near = std::abs(u.z - ds.cutoff()) < bandwidth;
    d.flagged += u.flagged ? 1 : 0;
    if (near) {
      ++d.near_cutoff;
      d.flagged_near_cutoff += u.flagged ? 1 : 0;
    }
  }
  if (d.near_cutoff > 0)
    d.share_flagged_near_cutoff = static_cast<double>(d.flagged_near_cutoff) / static_cast<double>(d.near_cutoff);
  return d;
}

struct HistogramBin {
  double low = 0.0;
  double high = 0.0;
  std::size_t events = 0;
  std::size_t censored = 0;
};

//! Event and censoring counts over equal-width bins covering [0, max y].
//! A time t falls in the bin with low < t <= high; t = 0 goes to the first bin.
inline std::vector<HistogramBin> event_censor_histogram(const SurvivalDataset& ds, std::size_t bins = 20) {
  if (bins == 0)
    throw Error(ErrorCode::InvalidArgument, "histogram needs at least one bin");
  const double tmax = ds.grid().max_time();
  const double width = tmax > 0.0 ? tmax / static_cast<double>(bins) : 1.0;
  std::vector<HistogramBin> out(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    out[b].low = width * static_cast<double>(b);
    out[b].high = b + 1 == bins ? std::max(tmax, width) : width * static_cast<double>(b + 1);
  }
  for (const auto& u : ds.units()) {
    std::size_t b = u.y > 0.0 ? static_cast<std::size_t>(std::ceil(u.y / width)) - 1 : 0;
    b = std::min(b, bins - 1);
    // guard against rounding at bin edges
    while (b > 0 && u.y <= out[b].low)
      --b;
    while (b + 1 < bins && u.y > out[b].high)
      ++b;
    (u.delta ? out[b].events : out[b].censored) += 1;
  }
  return out;
}

struct SplitSpec {
  std::string column;             //!< covariate name, "z" or "w"
  std::optional<double> threshold; //!< group 1 is value > threshold; default median (binary columns: value > 0.5)
};

struct LogRankDiagnostic {
  std::string column;
  double threshold = 0.0;
  LogRankResult event;
  LogRankResult censoring;
};

inline std::vector<double> split_values(const SurvivalDataset& ds, const std::string& column) {
  std::vector<double> v(ds.size());
  if (column == "z") {
    for (std::size_t i = 0; i < ds.size(); ++i)
      v[i] = ds.unit(i).z;
    return v;
  }
  if (column == "w") {
    for (std::size_t i = 0; i < ds.size(); ++i)
      v[i] = ds.treated(i) ? 1.0 : 0.0;
    return v;
  }
  const auto& names = ds.covariate_names();
  auto it = std::find(names.begin(), names.end(), column);
  if (it == names.end())
    throw Error(ErrorCode::UnknownCovariate, "no column named '" + column + "'");
  const auto j = static_cast<std::size_t>(it - names.begin());
  for (std::size_t i = 0; i < ds.size(); ++i)
    v[i] = ds.unit(i).x[j];
  return v;
}

//! Two-sided log-rank tests of the event and the censoring distribution
//! (event indicator flipped) between the two groups of a covariate split.
inline LogRankDiagnostic logrank_diagnostic(const SurvivalDataset& ds, const SplitSpec& split) {
  const std::vector<double> v = split_values(ds, split.column);
  double thr;
  if (split.threshold) {
    thr = *split.threshold;
  } else if (std::all_of(v.begin(), v.end(), [](double a) { return a == 0.0 || a == 1.0; })) {
    thr = 0.5;
  } else {
    std::vector<double> s = v;
    std::nth_element(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(s.size() / 2), s.end());
    thr = s[s.size() / 2];
  }
  std::vector<TimeEvent> ev(ds.size()), ce(ds.size());
  auto group = std::make_unique<bool[]>(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    ev[i] = {ds.time_index(i), ds.unit(i).delta};
    ce[i] = {ds.time_index(i), !ds.unit(i).delta};
    group[i] = v[i] > thr;
  }
  std::span<const bool> g(group.get(), ds.size());
  LogRankDiagnostic d;
  d.column = split.column;
  d.threshold = thr;
  d.event = logrank_test(ev, g, ds.grid().size());
  d.censoring = logrank_test(ce, g, ds.grid().size());
  return d;
}

} // namespace rdsurv
