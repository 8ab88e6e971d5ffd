#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rdsurv/censoring.hpp"
#include "rdsurv/data.hpp"
#include "rdsurv/errors.hpp"
#include "rdsurv/parallel.hpp"
#include "rdsurv/pipeline.hpp"
#include "rdsurv/random.hpp"
#include "rdsurv/rd.hpp"

namespace rdsurv {

inline constexpr std::size_t kSimCovariates = 10;
inline constexpr double kSimCutoff = 0.5;

inline double default_horizon(int setting) {
  switch (setting) {
  case 1: return 7.0;
  case 2: return 9.0;
  case 3: return 20.0;
  case 4: return 15.0;
  }
  throw Error(ErrorCode::InvalidArgument, "setting must be 1, 2, 3 or 4");
}

struct DgpSetting {
  int id = 1;
  std::size_t n = 5000;
  double horizon = 7.0;
  std::uint64_t seed = 1;
  bool censoring = true;         //!< false draws no censoring times (debug)
  double treatment_scale = 1.0;  //!< multiplies the treatment coefficient (0 gives a null effect)

  static DgpSetting make(int id, std::size_t n, std::uint64_t seed) {
    DgpSetting s;
    s.id = id;
    s.n = n;
    s.seed = seed;
    s.horizon = default_horizon(id);
    return s;
  }

  void validate() const {
    default_horizon(id);
    if (n < 40)
      throw Error(ErrorCode::InvalidArgument, "simulated sample size must be at least 40");
    if (!(horizon > 0.0))
      throw Error(ErrorCode::InvalidArgument, "horizon must be positive");
  }
};

namespace sim {

inline double round1(double v) { return std::round(v * 10.0) / 10.0; }

//! Event time at covariates x (10 values), running variable z and treatment w.
inline double draw_event_time(int setting, const std::array<double, kSimCovariates>& x, double z, double w,
                              double treatment_scale, Rng& rng) {
  if (setting == 1 || setting == 2) {
    const double mu = x[0] * x[0] + x[2] + 6.0 + 2.0 * (std::sqrt(x[0]) - 0.3) + z * z + 0.9 * treatment_scale * w;
    return static_cast<double>(std::poisson_distribution<int>(mu)(rng));
  }
  const double eps = std::normal_distribution<double>(0.0, 1.0)(rng);
  const double log_t = 1.8 + 0.7 * std::sqrt(x[1]) + 0.2 * x[2] - 0.4 * std::sqrt(x[3]) - 0.5 * z * z +
                       0.75 * treatment_scale * w + eps;
  return round1(std::exp(log_t));
}

inline double draw_censoring_time(int setting, const std::array<double, kSimCovariates>& x, double z, Rng& rng) {
  switch (setting) {
  case 1:
    return std::round(std::uniform_real_distribution<double>(1.0, 15.0)(rng));
  case 2: {
    const double mu = 10.0 + std::log1p(std::exp(x[2])) - 1.5 * (z >= kSimCutoff ? 1.0 : 0.0);
    return static_cast<double>(std::poisson_distribution<int>(mu)(rng));
  }
  case 3:
    return round1(std::uniform_real_distribution<double>(0.0, 50.0)(rng));
  case 4: {
    // cumulative hazard t^2 * theta inverted at an Exp(1) draw
    const double theta = std::exp(-5.75 - 0.5 * std::sqrt(x[1]) + 0.2 * x[2] + 0.3 * std::sqrt(x[3]) * z);
    const double e = std::exponential_distribution<double>(1.0)(rng);
    return round1(std::sqrt(e / theta));
  }
  }
  throw Error(ErrorCode::InvalidArgument, "setting must be 1, 2, 3 or 4");
}

} // namespace sim

struct SimulatedData {
  SurvivalDataset data;
  std::vector<double> event_time; //!< uncensored T, recorded at the same precision as y
};

//! Draws one realization of a simulation setting.
inline SimulatedData generate(const DgpSetting& setting) {
  setting.validate();
  Rng rng = make_rng(setting.seed, 0, /*stream=*/0x5e7);
  std::vector<Unit> units;
  std::vector<double> times;
  units.reserve(setting.n);
  times.reserve(setting.n);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (std::size_t i = 0; i < setting.n; ++i) {
    std::array<double, kSimCovariates> x;
    for (auto& v : x)
      v = unif(rng);
    const double z = unif(rng);
    const double w = z >= kSimCutoff ? 1.0 : 0.0;
    const double t = sim::draw_event_time(setting.id, x, z, w, setting.treatment_scale, rng);
    const double c = setting.censoring ? sim::draw_censoring_time(setting.id, x, z, rng)
                                       : std::numeric_limits<double>::infinity();
    Unit u;
    u.delta = t < c;
    u.y = std::min(t, c);
    u.z = z;
    u.x.assign(x.begin(), x.end());
    units.push_back(std::move(u));
    times.push_back(t);
  }
  return {SurvivalDataset::create(std::move(units), kSimCutoff, Design::Sharp), std::move(times)};
}

// ---------------------------------------------------------------------------
// Oracle truth

struct Truth {
  double value = 0.0;
  double se = 0.0;
  std::size_t draws = 0;
};

//! Monte Carlo truth at Z = c: E[g(T(1))] - E[g(T(0))] with X ~ U[0,1]^10,
//! where g is 1(T > h) or min(T, h). Returns both estimands from one pass.
inline std::map<EstimandKind, Truth> compute_truth_pair(int setting, double h, std::size_t draws,
                                                        std::uint64_t oracle_seed, double treatment_scale = 1.0) {
  default_horizon(setting);
  if (draws < 2)
    throw Error(ErrorCode::InvalidArgument, "oracle needs at least two draws");
  Rng rng = make_rng(oracle_seed, static_cast<std::uint64_t>(setting), /*stream=*/0x0dac1e);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double sum_p = 0.0, sq_p = 0.0, sum_r = 0.0, sq_r = 0.0;
  for (std::size_t k = 0; k < draws; ++k) {
    std::array<double, kSimCovariates> x;
    for (auto& v : x)
      v = unif(rng);
    const double t1 = sim::draw_event_time(setting, x, kSimCutoff, 1.0, treatment_scale, rng);
    const double t0 = sim::draw_event_time(setting, x, kSimCutoff, 0.0, treatment_scale, rng);
    const double dp = complete_outcome(EstimandKind::SurvivalProbability, t1, h) -
                      complete_outcome(EstimandKind::SurvivalProbability, t0, h);
    const double dr = complete_outcome(EstimandKind::Rmst, t1, h) - complete_outcome(EstimandKind::Rmst, t0, h);
    sum_p += dp;
    sq_p += dp * dp;
    sum_r += dr;
    sq_r += dr * dr;
  }
  const double n = static_cast<double>(draws);
  auto finish = [&](double s, double sq) {
    const double mean = s / n;
    const double var = std::max(sq / n - mean * mean, 0.0) * n / (n - 1.0);
    return Truth{mean, std::sqrt(var / n), draws};
  };
  return {{EstimandKind::SurvivalProbability, finish(sum_p, sq_p)}, {EstimandKind::Rmst, finish(sum_r, sq_r)}};
}

//! Versioned sidecar file of oracle truths keyed by
//! (setting, estimand, h, draws, seed, treatment scale).
class TruthCache {
public:
  static constexpr int kVersion = 1;

  explicit TruthCache(std::string path = {})
    : path_(std::move(path))
  {
    if (path_.empty())
      return;
    std::ifstream in(path_);
    if (!in)
      return;
    try {
      nlohmann::json j = nlohmann::json::parse(in);
      if (j.value("version", 0) != kVersion)
        return;
      for (auto& [key, v] : j.at("entries").items())
        entries_[key] = Truth{v.at("value").get<double>(), v.at("se").get<double>(), v.at("draws").get<std::size_t>()};
    } catch (const std::exception&) {
      entries_.clear();
    }
  }

  Truth get(int setting, EstimandKind kind, double h, std::size_t draws, std::uint64_t seed,
            double treatment_scale = 1.0) {
    std::lock_guard<std::mutex> lock(mutex_);
    const std::string k = key(setting, kind, h, draws, seed, treatment_scale);
    if (auto it = entries_.find(k); it != entries_.end())
      return it->second;
    auto pair = compute_truth_pair(setting, h, draws, seed, treatment_scale);
    for (auto& [kd, t] : pair)
      entries_[key(setting, kd, h, draws, seed, treatment_scale)] = t;
    save();
    return pair.at(kind);
  }

private:
  static std::string key(int setting, EstimandKind kind, double h, std::size_t draws, std::uint64_t seed,
                         double scale) {
    std::ostringstream os;
    os.precision(17);
    os << "setting=" << setting << ";estimand=" << to_string(kind) << ";h=" << h << ";draws=" << draws
       << ";seed=" << seed << ";scale=" << scale;
    return os.str();
  }

  void save() const {
    if (path_.empty())
      return;
    nlohmann::json j;
    j["version"] = kVersion;
    j["entries"] = nlohmann::json::object();
    for (const auto& [k, t] : entries_)
      j["entries"][k] = {{"value", t.value}, {"se", t.se}, {"draws", t.draws}};
    std::ofstream out(path_);
    out << j.dump(2) << '\n';
  }

  std::string path_;
  std::map<std::string, Truth> entries_;
  std::mutex mutex_;
};

inline Truth compute_truth(const DgpSetting& setting, EstimandKind kind, std::size_t oracle_draws = 10'000'000,
                           std::uint64_t oracle_seed = 20240601, TruthCache* cache = nullptr) {
  if (cache)
    return cache->get(setting.id, kind, setting.horizon, oracle_draws, oracle_seed, setting.treatment_scale);
  return compute_truth_pair(setting.id, setting.horizon, oracle_draws, oracle_seed, setting.treatment_scale).at(kind);
}

// ---------------------------------------------------------------------------
// Monte Carlo study

struct StudyConfig {
  DgpSetting setting;
  std::vector<EstimandKind> estimands{EstimandKind::SurvivalProbability};
  std::vector<Method> methods{Method::Dr};
  std::size_t reps = 100;
  ForestConfig forest = [] {
    ForestConfig f;
    f.num_trees = 200;
    return f;
  }();
  FuzzyOptions rd;
  std::size_t threads = 0;
  std::size_t oracle_draws = 10'000'000;
  std::uint64_t oracle_seed = 20240601;
  std::string truth_cache_path;
  double max_failure_share = 0.05;
};

struct RepRecord {
  std::size_t rep = 0;
  bool ok = false;
  double estimate = 0.0;    //!< conventional local linear point estimate
  double estimate_bc = 0.0; //!< bias-corrected estimate the interval is centered on
  double se = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  bool covered = false;
  double censoring_bias = std::numeric_limits<double>::quiet_NaN();    //!< from `estimate`
  double censoring_bias_bc = std::numeric_limits<double>::quiet_NaN(); //!< from `estimate_bc`
  std::string error;
};

struct BiasSummary {
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double mean = 0.0;
};

struct CellReport {
  EstimandKind estimand = EstimandKind::SurvivalProbability;
  Method method = Method::Dr;
  Truth truth;
  std::size_t reps = 0;
  std::size_t completed = 0;
  std::size_t failed = 0;
  bool failure_budget_exceeded = false;
  double coverage = 0.0;
  double rmse = 0.0;    //!< of the conventional point estimate
  double rmse_bc = 0.0; //!< of the bias-corrected estimate
  double mean_ci_length = 0.0;
  double mean_estimate = 0.0;
  BiasSummary censoring_bias;
  BiasSummary censoring_bias_bc;
  std::vector<RepRecord> per_rep;
};

struct SimReport {
  DgpSetting setting;
  std::size_t reps = 0;
  ForestConfig forest;
  std::vector<CellReport> cells;

  const CellReport& cell(EstimandKind kind, Method method) const {
    for (const auto& c : cells)
      if (c.estimand == kind && c.method == method)
        return c;
    throw Error(ErrorCode::InvalidArgument, "no such cell in the report");
  }
};

//! Sample quantile with linear interpolation between order statistics.
inline double quantile(std::vector<double> v, double q) {
  if (v.empty())
    return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return v[lo] + frac * (v[hi] - v[lo]);
}

//! Median, quartiles and mean; zeros when empty.
inline BiasSummary summarize(const std::vector<double>& v) {
  BiasSummary b;
  if (v.empty())
    return b;
  b.median = quantile(v, 0.5);
  b.q1 = quantile(v, 0.25);
  b.q3 = quantile(v, 0.75);
  double s = 0.0;
  for (double x : v)
    s += x;
  b.mean = s / static_cast<double>(v.size());
  return b;
}

namespace detail {

struct RepOutcome {
  // indexed [estimand][method]
  std::vector<std::vector<RepRecord>> records;
};

inline RepRecord record_fit(std::size_t rep, const RdFit& fit, double truth) {
  RepRecord r;
  r.rep = rep;
  r.ok = true;
  r.estimate = fit.estimate;
  r.estimate_bc = fit.estimate_bc;
  r.se = fit.se_robust;
  r.ci_low = fit.ci_low;
  r.ci_high = fit.ci_high;
  r.covered = fit.ci_low <= truth && truth <= fit.ci_high;
  return r;
}

inline RepOutcome run_rep(const StudyConfig& cfg, std::size_t rep, const std::vector<Truth>& truths) {
  DgpSetting s = cfg.setting;
  s.seed = derive_seed(cfg.setting.seed, rep, /*stream=*/0xda7a);
  const SimulatedData sd = generate(s);
  const SurvivalDataset& ds = sd.data;

  PipelineConfig pc;
  pc.forest = cfg.forest;
  pc.forest.seed = derive_seed(cfg.forest.seed, rep, /*stream=*/0xf0e5);
  pc.forest.threads = 1;
  pc.rd = cfg.rd;

  RepOutcome out;
  const std::size_t E = cfg.estimands.size(), M = cfg.methods.size();
  out.records.assign(E, std::vector<RepRecord>(M));

  std::optional<CurvePanel> panel;
  std::string panel_error;
  if (std::find(cfg.methods.begin(), cfg.methods.end(), Method::Dr) != cfg.methods.end()) {
    try {
      panel = fit_oob_panel(ds, pc.forest);
    } catch (const Error& e) {
      panel_error = e.what();
    }
  }

  for (std::size_t e = 0; e < E; ++e) {
    const EstimandKind kind = cfg.estimands[e];
    std::optional<RdFit> complete_fit;
    RepRecord complete_record;
    try {
      std::vector<double> y(ds.size());
      for (std::size_t i = 0; i < ds.size(); ++i)
        y[i] = complete_outcome(kind, sd.event_time[i], s.horizon);
      const RdFit fit = rd_estimate(rd_input_from(ds, std::move(y)), cfg.rd.rd);
      complete_record = record_fit(rep, fit, truths[e].value);
      complete_fit = fit;
    } catch (const Error& err) {
      complete_record.rep = rep;
      complete_record.error = err.what();
    }

    for (std::size_t m = 0; m < M; ++m) {
      const Method method = cfg.methods[m];
      RepRecord rec;
      if (method == Method::Complete) {
        rec = complete_record;
      } else {
        try {
          if (method == Method::Dr && !panel)
            throw Error(ErrorCode::DegenerateData, panel_error);
          const Estimand est{kind, make_horizon(ds, s.horizon)};
          const RdInput in = censoring_adjusted_input(ds, est, method, panel ? &*panel : nullptr, pc);
          rec = record_fit(rep, rd_estimate(in, cfg.rd.rd), truths[e].value);
        } catch (const Error& err) {
          rec = RepRecord{};
          rec.rep = rep;
          rec.error = err.what();
        }
      }
      if (rec.ok && complete_fit) {
        rec.censoring_bias = rec.estimate - complete_fit->estimate;
        rec.censoring_bias_bc = rec.estimate_bc - complete_fit->estimate_bc;
      }
      out.records[e][m] = std::move(rec);
    }
  }
  return out;
}

} // namespace detail

//! Runs `reps` replications of a setting and aggregates coverage, RMSE,
//! interval length and censoring bias for every (estimand, method) cell.
//! Replication r uses data and forest seeds derived from (seed, r), so the
//! report does not depend on the thread count.
inline SimReport run_study(const StudyConfig& cfg) {
  cfg.setting.validate();
  if (cfg.reps == 0)
    throw Error(ErrorCode::InvalidArgument, "reps must be at least 1");
  if (cfg.estimands.empty() || cfg.methods.empty())
    throw Error(ErrorCode::InvalidArgument, "study needs at least one estimand and one method");

  TruthCache cache(cfg.truth_cache_path);
  std::vector<Truth> truths;
  for (auto kind : cfg.estimands)
    truths.push_back(compute_truth(cfg.setting, kind, cfg.oracle_draws, cfg.oracle_seed, &cache));

  std::vector<detail::RepOutcome> outcomes(cfg.reps);
  parallel_for(cfg.reps, cfg.threads, [&](std::size_t r) { outcomes[r] = detail::run_rep(cfg, r, truths); });

  SimReport report;
  report.setting = cfg.setting;
  report.reps = cfg.reps;
  report.forest = cfg.forest;
  for (std::size_t e = 0; e < cfg.estimands.size(); ++e) {
    for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
      CellReport cell;
      cell.estimand = cfg.estimands[e];
      cell.method = cfg.methods[m];
      cell.truth = truths[e];
      cell.reps = cfg.reps;
      double hits = 0.0, sq = 0.0, sq_bc = 0.0, len = 0.0, est = 0.0;
      std::vector<double> bias, bias_bc;
      for (std::size_t r = 0; r < cfg.reps; ++r) {
        const RepRecord& rec = outcomes[r].records[e][m];
        cell.per_rep.push_back(rec);
        if (!rec.ok) {
          ++cell.failed;
          continue;
        }
        ++cell.completed;
        hits += rec.covered ? 1.0 : 0.0;
        sq += (rec.estimate - cell.truth.value) * (rec.estimate - cell.truth.value);
        sq_bc += (rec.estimate_bc - cell.truth.value) * (rec.estimate_bc - cell.truth.value);
        len += rec.ci_high - rec.ci_low;
        est += rec.estimate;
        if (std::isfinite(rec.censoring_bias)) {
          bias.push_back(rec.censoring_bias);
          bias_bc.push_back(rec.censoring_bias_bc);
        }
      }
      if (cell.completed > 0) {
        const double c = static_cast<double>(cell.completed);
        cell.coverage = hits / c;
        cell.rmse = std::sqrt(sq / c);
        cell.rmse_bc = std::sqrt(sq_bc / c);
        cell.mean_ci_length = len / c;
        cell.mean_estimate = est / c;
      }
      cell.censoring_bias = summarize(bias);
      cell.censoring_bias_bc = summarize(bias_bc);
      cell.failure_budget_exceeded =
          static_cast<double>(cell.failed) > cfg.max_failure_share * static_cast<double>(cfg.reps);
      report.cells.push_back(std::move(cell));
    }
  }
  return report;
}

//! Single-cell convenience form.
inline SimReport run_study(const DgpSetting& setting, EstimandKind estimand, Method method, std::size_t reps,
                           StudyConfig base = {}) {
  base.setting = setting;
  base.estimands = {estimand};
  base.methods = {method};
  base.reps = reps;
  return run_study(base);
}

} // namespace rdsurv
