#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rdsurv/errors.hpp"

namespace rdsurv {

enum class Design { Sharp, Fuzzy };

//! One observational record: observed time, non-censoring indicator, running
//! variable, baseline covariates and (fuzzy designs only) treatment receipt.
struct Unit {
  double y = 0.0;
  bool delta = false;
  double z = 0.0;
  std::vector<double> x;
  std::optional<bool> w;
};

//! Strictly increasing set of observed times. Index 0 is the virtual origin
//! ("time zero", where every survival curve equals 1); index k >= 1 is the
//! k-th grid point.
class TimeGrid {
public:
  TimeGrid() = default;

  explicit TimeGrid(std::vector<double> points)
    : points_(std::move(points))
  {
    for (std::size_t k = 0; k < points_.size(); ++k) {
      if (!std::isfinite(points_[k]) || points_[k] < 0.0)
        throw Error(ErrorCode::InvalidArgument, "grid points must be finite and nonnegative");
      if (k > 0 && !(points_[k] > points_[k - 1]))
        throw Error(ErrorCode::InvalidArgument, "grid points must be strictly increasing");
    }
  }

  //! Builds the grid of sorted unique values.
  static TimeGrid from_times(std::vector<double> times) {
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());
    return TimeGrid(std::move(times));
  }

  //! Number of grid points, not counting the origin.
  std::size_t size() const noexcept { return points_.size(); }
  bool empty() const noexcept { return points_.empty(); }
  std::span<const double> points() const noexcept { return points_; }

  //! Time at grid index; index 0 is the origin 0.0.
  double time(std::size_t index) const { return index == 0 ? 0.0 : points_.at(index - 1); }
  double max_time() const { return points_.empty() ? 0.0 : points_.back(); }

  //! Index of the largest grid point <= t, or 0 when t precedes every point.
  std::size_t floor_index(double t) const {
    auto it = std::upper_bound(points_.begin(), points_.end(), t);
    return static_cast<std::size_t>(it - points_.begin());
  }

  //! Index of a time that lies exactly on the grid.
  std::size_t index_of(double t) const {
    auto it = std::lower_bound(points_.begin(), points_.end(), t);
    if (it == points_.end() || *it != t)
      throw Error(ErrorCode::InvalidArgument, "time " + std::to_string(t) + " is not a grid point");
    return static_cast<std::size_t>(it - points_.begin()) + 1;
  }

  bool operator==(const TimeGrid& other) const = default;

private:
  std::vector<double> points_;
};

struct DatasetOptions {
  //! Coarsen observed times to right bin edges ceil(y / w) * w; 0 keeps exact times.
  double bin_width = 0.0;
};

//! Validated collection of units sharing a cutoff, covariate dimension and
//! time grid. Immutable after construction.
class SurvivalDataset {
public:
  static SurvivalDataset create(std::vector<Unit> units, double cutoff, Design design,
                                DatasetOptions options = {},
                                std::vector<std::string> covariate_names = {}) {
    SurvivalDataset ds;
    if (!std::isfinite(cutoff))
      throw Error(ErrorCode::NonFiniteValue, "cutoff must be finite");
    if (!(options.bin_width >= 0.0) || !std::isfinite(options.bin_width))
      throw Error(ErrorCode::InvalidArgument, "bin width must be finite and nonnegative");
    if (units.empty())
      throw Error(ErrorCode::EmptySide, "dataset has no units");

    const std::size_t d = units.front().x.size();
    std::size_t left = 0, right = 0;
    for (std::size_t i = 0; i < units.size(); ++i) {
      Unit& u = units[i];
      if (!std::isfinite(u.y))
        throw RowError(ErrorCode::NonFiniteValue, i, "time is not finite");
      if (u.y < 0.0)
        throw RowError(ErrorCode::InvalidValue, i, "time is negative");
      if (!std::isfinite(u.z))
        throw RowError(ErrorCode::NonFiniteValue, i, "running variable is not finite");
      if (u.x.size() != d)
        throw RowError(ErrorCode::InvalidValue, i, "covariate dimension differs from first row");
      for (double v : u.x)
        if (!std::isfinite(v))
          throw RowError(ErrorCode::NonFiniteValue, i, "covariate is not finite");
      if (design == Design::Fuzzy && !u.w)
        throw RowError(ErrorCode::MissingTreatmentColumn, i, "fuzzy design requires a treatment value");
      if (design == Design::Sharp)
        u.w.reset();
      if (options.bin_width > 0.0)
        u.y = std::ceil(u.y / options.bin_width) * options.bin_width;
      (u.z >= cutoff ? right : left) += 1;
    }
    if (left < 2 || right < 2)
      throw Error(ErrorCode::EmptySide, "need at least 2 units on each side of the cutoff (left=" +
                                            std::to_string(left) + ", right=" + std::to_string(right) + ")");

    std::vector<double> ys;
    ys.reserve(units.size());
    for (const auto& u : units)
      ys.push_back(u.y);
    ds.grid_ = std::make_shared<const TimeGrid>(TimeGrid::from_times(std::move(ys)));
    ds.time_index_.reserve(units.size());
    for (const auto& u : units)
      ds.time_index_.push_back(static_cast<std::uint32_t>(ds.grid_->index_of(u.y)));

    if (covariate_names.empty()) {
      for (std::size_t j = 0; j < d; ++j)
        covariate_names.push_back("x" + std::to_string(j + 1));
    } else if (covariate_names.size() != d) {
      throw Error(ErrorCode::InvalidArgument, "covariate name count differs from dimension");
    }
    ds.units_ = std::move(units);
    ds.cutoff_ = cutoff;
    ds.design_ = design;
    ds.dim_ = d;
    ds.covariate_names_ = std::move(covariate_names);
    return ds;
  }

  std::size_t size() const noexcept { return units_.size(); }
  std::size_t dim() const noexcept { return dim_; }
  double cutoff() const noexcept { return cutoff_; }
  Design design() const noexcept { return design_; }
  const std::vector<Unit>& units() const noexcept { return units_; }
  const Unit& unit(std::size_t i) const { return units_[i]; }
  const TimeGrid& grid() const noexcept { return *grid_; }
  std::shared_ptr<const TimeGrid> grid_ptr() const noexcept { return grid_; }
  const std::vector<std::string>& covariate_names() const noexcept { return covariate_names_; }

  //! Grid index of unit i's observed time.
  std::size_t time_index(std::size_t i) const { return time_index_[i]; }

  //! Treatment indicator: the recorded w for fuzzy designs, 1(z >= c) otherwise.
  bool treated(std::size_t i) const {
    const Unit& u = units_[i];
    return u.w ? *u.w : (u.z >= cutoff_);
  }

  std::size_t censored_count() const {
    return static_cast<std::size_t>(
        std::count_if(units_.begin(), units_.end(), [](const Unit& u) { return !u.delta; }));
  }

private:
  std::vector<Unit> units_;
  std::vector<std::uint32_t> time_index_;
  std::shared_ptr<const TimeGrid> grid_ = std::make_shared<const TimeGrid>();
  std::vector<std::string> covariate_names_;
  double cutoff_ = 0.0;
  Design design_ = Design::Sharp;
  std::size_t dim_ = 0;
};

//! Parsed rows before validation; `columns` names each entry of a row.
struct RawTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::optional<std::size_t> column(const std::string& name) const {
    auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end())
      return std::nullopt;
    return static_cast<std::size_t>(it - columns.begin());
  }
};

//! Converts a raw table with columns time, event, z, x1..xd and optional w
//! into a validated dataset.
inline SurvivalDataset validate_dataset(const RawTable& raw, double cutoff, Design design,
                                        DatasetOptions options = {}) {
  auto require = [&](const std::string& name) {
    auto c = raw.column(name);
    if (!c)
      throw Error(ErrorCode::MissingColumn, "required column '" + name + "' not found");
    return *c;
  };
  const std::size_t col_time = require("time");
  const std::size_t col_event = require("event");
  const std::size_t col_z = require("z");
  const auto col_w = raw.column("w");
  if (design == Design::Fuzzy && !col_w)
    throw Error(ErrorCode::MissingTreatmentColumn, "fuzzy design requires a 'w' column");

  std::vector<std::size_t> col_x;
  std::vector<std::string> names;
  for (std::size_t j = 1;; ++j) {
    auto c = raw.column("x" + std::to_string(j));
    if (!c)
      break;
    col_x.push_back(*c);
    names.push_back("x" + std::to_string(j));
  }

  std::vector<Unit> units;
  units.reserve(raw.rows.size());
  for (std::size_t i = 0; i < raw.rows.size(); ++i) {
    const auto& row = raw.rows[i];
    if (row.size() != raw.columns.size())
      throw RowError(ErrorCode::InvalidValue, i, "wrong number of fields");
    for (double v : row)
      if (!std::isfinite(v))
        throw RowError(ErrorCode::NonFiniteValue, i, "non-finite value");
    Unit u;
    u.y = row[col_time];
    const double ev = row[col_event];
    if (ev != 0.0 && ev != 1.0)
      throw RowError(ErrorCode::InvalidValue, i, "event must be 0 or 1");
    u.delta = ev == 1.0;
    u.z = row[col_z];
    u.x.reserve(col_x.size());
    for (std::size_t c : col_x)
      u.x.push_back(row[c]);
    if (col_w && design == Design::Fuzzy) {
      const double w = row[*col_w];
      if (w != 0.0 && w != 1.0)
        throw RowError(ErrorCode::InvalidValue, i, "w must be 0 or 1");
      u.w = w == 1.0;
    }
    units.push_back(std::move(u));
  }
  return SurvivalDataset::create(std::move(units), cutoff, design, options, std::move(names));
}

//! Evaluation horizon snapped onto the dataset grid.
struct Horizon {
  double h = 0.0;
  std::size_t grid_index = 0; //!< largest grid index with time <= h
  bool snapped = false;       //!< h is not itself a grid point
};

inline Horizon make_horizon(const SurvivalDataset& ds, double h) {
  const TimeGrid& grid = ds.grid();
  if (!std::isfinite(h) || !(h > 0.0))
    throw Error(ErrorCode::InvalidHorizon, "horizon must be positive and finite");
  if (h > grid.max_time())
    throw Error(ErrorCode::InvalidHorizon, "horizon exceeds the largest observed time");
  Horizon hz;
  hz.h = h;
  hz.grid_index = grid.floor_index(h);
  if (hz.grid_index == 0)
    throw Error(ErrorCode::InvalidHorizon, "horizon precedes every observed time");
  hz.snapped = grid.time(hz.grid_index) != h;

  bool informative = false;
  for (const auto& u : ds.units())
    if (u.y > h || u.delta) {
      informative = true;
      break;
    }
  if (!informative)
    throw Error(ErrorCode::InvalidHorizon, "every unit is censored before the horizon");
  return hz;
}

//! Status of a unit once follow-up is truncated at the horizon.
struct HorizonStatus {
  double time = 0.0;          //!< H = min(y, h)
  std::size_t grid_index = 0; //!< grid index of H
  bool observed = false;      //!< max(delta, 1(y > h))
};

inline HorizonStatus remap_unit(const SurvivalDataset& ds, const Horizon& hz, std::size_t i) {
  const Unit& u = ds.unit(i);
  HorizonStatus s;
  if (u.y > hz.h) {
    s.time = hz.h;
    s.grid_index = hz.grid_index;
    s.observed = true;
  } else {
    s.time = u.y;
    s.grid_index = ds.time_index(i);
    s.observed = u.delta;
  }
  return s;
}

//! Units followed past the horizon are truncated to h and counted as
//! observed: alive at h is known even if they were censored later.
inline std::vector<HorizonStatus> remap_to_horizon(const SurvivalDataset& ds, const Horizon& hz) {
  std::vector<HorizonStatus> out;
  out.reserve(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i)
    out.push_back(remap_unit(ds, hz, i));
  return out;
}

} // namespace rdsurv
