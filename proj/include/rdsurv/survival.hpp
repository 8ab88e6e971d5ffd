#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "rdsurv/data.hpp"
#include "rdsurv/errors.hpp"

namespace rdsurv {

//! Read-only view of a step survival function on a grid: values[k-1] is
//! S(t_k); S at the origin (index 0) is 1.
class CurveView {
public:
  CurveView(const TimeGrid& grid, std::span<const double> values)
    : grid_(&grid)
    , values_(values)
  {}

  double at(std::size_t index) const { return index == 0 ? 1.0 : values_[index - 1]; }
  double operator[](std::size_t index) const { return at(index); }
  std::size_t size() const noexcept { return values_.size(); }
  const TimeGrid& grid() const noexcept { return *grid_; }
  std::span<const double> values() const noexcept { return values_; }

private:
  const TimeGrid* grid_;
  std::span<const double> values_;
};

//! Owning survival curve sharing its grid.
class SurvivalCurve {
public:
  SurvivalCurve() = default;
  SurvivalCurve(std::shared_ptr<const TimeGrid> grid, std::vector<double> values)
    : grid_(std::move(grid))
    , values_(std::move(values))
  {
    if (!grid_ || values_.size() != grid_->size())
      throw Error(ErrorCode::InvalidArgument, "curve length must match its grid");
  }

  double at(std::size_t index) const { return index == 0 ? 1.0 : values_[index - 1]; }
  std::size_t size() const noexcept { return values_.size(); }
  const TimeGrid& grid() const { return *grid_; }
  std::shared_ptr<const TimeGrid> grid_ptr() const { return grid_; }
  const std::vector<double>& values() const noexcept { return values_; }
  CurveView view() const { return CurveView(*grid_, values_); }
  operator CurveView() const { return view(); }

  //! Value at an arbitrary time by step-function semantics.
  double at_time(double t) const { return at(grid_->floor_index(t)); }

private:
  std::shared_ptr<const TimeGrid> grid_;
  std::vector<double> values_;
};

//! True if the curve lies in [0, 1] and is nonincreasing from S(0) = 1.
inline bool is_valid_survival(std::span<const double> values) {
  double prev = 1.0;
  for (double v : values) {
    if (!(v >= 0.0 && v <= prev))
      return false;
    prev = v;
  }
  return true;
}

//! Forces values into [floor, 1] and nonincreasing order via a running minimum.
inline void monotonize(std::span<double> values, double floor = 0.0) {
  double running = 1.0;
  for (double& v : values) {
    running = std::min(running, std::clamp(v, 0.0, 1.0));
    v = std::max(running, floor);
  }
}

//! Observed time on the grid (by index) with the indicator of the process
//! being estimated: Delta for events, 1 - Delta for censoring.
struct TimeEvent {
  std::size_t index = 0;
  bool event = false;
};

//! Which units tied at a time t count in the risk set for the process
//! events at t.
enum class TieOrder {
  OthersAtRisk,   //!< units leaving for the other reason at t stay at risk at t
  OthersLeaveFirst //!< units leaving for the other reason at t are removed first
};

//! Event curves use OthersLeaveFirst: with Delta = 1(T < C) a record censored
//! at t only shows T >= t, so it cannot contribute an observable event at t.
//! Censoring curves use OthersAtRisk: an event at t implies C > t.
inline TieOrder tie_order_for(bool censoring) {
  return censoring ? TieOrder::OthersAtRisk : TieOrder::OthersLeaveFirst;
}

//! Product-limit estimate on the given grid.
inline SurvivalCurve kaplan_meier(std::span<const TimeEvent> data, std::shared_ptr<const TimeGrid> grid,
                                  TieOrder ties = TieOrder::OthersAtRisk) {
  if (data.empty())
    throw Error(ErrorCode::EmptyInput, "kaplan_meier needs at least one observation");
  const std::size_t K = grid->size();
  std::vector<double> at_time(K + 1, 0.0), events(K + 1, 0.0);
  for (const auto& te : data) {
    if (te.index > K)
      throw Error(ErrorCode::InvalidArgument, "time index outside the grid");
    at_time[te.index] += 1.0;
    if (te.event)
      events[te.index] += 1.0;
  }
  // everyone with index >= k is at risk at t_k; index 0 units leave at the origin
  double at_risk = static_cast<double>(data.size()) - at_time[0];
  std::vector<double> values(K);
  double s = 1.0;
  for (std::size_t k = 1; k <= K; ++k) {
    const double risk = ties == TieOrder::OthersLeaveFirst ? at_risk - (at_time[k] - events[k]) : at_risk;
    if (events[k] > 0.0 && risk > 0.0)
      s *= 1.0 - events[k] / risk;
    values[k - 1] = s;
    at_risk -= at_time[k];
  }
  return SurvivalCurve(std::move(grid), std::move(values));
}

//! Convenience overload from (y, indicator) pairs; every y must lie on the grid.
inline SurvivalCurve kaplan_meier(std::span<const double> y, std::span<const bool> indicator,
                                  std::shared_ptr<const TimeGrid> grid, TieOrder ties = TieOrder::OthersAtRisk) {
  if (y.size() != indicator.size())
    throw Error(ErrorCode::InvalidArgument, "time and indicator lengths differ");
  std::vector<TimeEvent> data;
  data.reserve(y.size());
  for (std::size_t i = 0; i < y.size(); ++i)
    data.push_back({grid->index_of(y[i]), indicator[i]});
  return kaplan_meier(std::span<const TimeEvent>(data), std::move(grid), ties);
}

//! Unconditional event (or censoring) curve for a dataset.
inline SurvivalCurve kaplan_meier(const SurvivalDataset& ds, bool censoring) {
  std::vector<TimeEvent> data;
  data.reserve(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i)
    data.push_back({ds.time_index(i), censoring ? !ds.unit(i).delta : ds.unit(i).delta});
  return kaplan_meier(std::span<const TimeEvent>(data), ds.grid_ptr(), tie_order_for(censoring));
}

//! Area under S from grid index `from` up to h, weighting each step by its
//! width: sum over t_k in [t_from, h) of (t_{k+1} - t_k) S(t_k), with the
//! last step ending at h itself.
inline double restricted_area(const CurveView& curve, const Horizon& hz, std::size_t from) {
  const TimeGrid& grid = curve.grid();
  double area = 0.0;
  for (std::size_t k = from; k < hz.grid_index; ++k)
    area += (grid.time(k + 1) - grid.time(k)) * curve.at(k);
  area += (hz.h - grid.time(hz.grid_index)) * curve.at(hz.grid_index);
  return area;
}

//! E[min(T, h) | T > t] from a survival curve, where t is the time at grid
//! index `from`: t plus the area under S(.)/S(t) on [t, h]. At index 0 this
//! is the restricted mean E[min(T, h)].
inline double conditional_rmst(const CurveView& curve, const Horizon& hz, std::size_t from) {
  if (from > hz.grid_index)
    throw Error(ErrorCode::InvalidArgument, "conditioning index lies beyond the horizon");
  const double s = curve.at(from);
  if (!(s > 0.0))
    throw Error(ErrorCode::ZeroSurvival, "conditional mean undefined where S(t) = 0");
  const double t = curve.grid().time(from);
  return t + std::min(restricted_area(curve, hz, from) / s, hz.h - t);
}

//! m(t) for every grid index 0..grid_index(h), computed with suffix sums.
//! S(t) below `survival_floor` is treated as the floor (m(t) then collapses
//! towards t since every later value is no larger).
inline std::vector<double> conditional_rmst_profile(const CurveView& curve, const Horizon& hz,
                                                    double survival_floor = 0.0) {
  const TimeGrid& grid = curve.grid();
  const std::size_t kh = hz.grid_index;
  std::vector<double> m(kh + 1);
  double area = (hz.h - grid.time(kh)) * curve.at(kh);
  for (std::size_t k = kh + 1; k-- > 0;) {
    if (k < kh)
      area += (grid.time(k + 1) - grid.time(k)) * curve.at(k);
    double s = curve.at(k);
    if (!(s > survival_floor)) {
      if (survival_floor <= 0.0)
        throw Error(ErrorCode::ZeroSurvival, "conditional mean undefined where S(t) = 0");
      s = survival_floor;
    }
    m[k] = grid.time(k) + std::min(area / s, hz.h - grid.time(k));
  }
  return m;
}

} // namespace rdsurv
