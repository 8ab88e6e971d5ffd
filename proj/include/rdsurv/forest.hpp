#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rdsurv/data.hpp"
#include "rdsurv/errors.hpp"
#include "rdsurv/parallel.hpp"
#include "rdsurv/random.hpp"
#include "rdsurv/survival.hpp"

namespace rdsurv {

struct ForestConfig {
  std::size_t num_trees = 500;
  std::size_t mtry = 0; //!< 0 selects ceil(sqrt(number of features))
  std::size_t min_node_size = 15;
  double subsample_fraction = 0.5;
  std::uint64_t seed = 42;
  double censor_floor = 0.05; //!< lower clamp for predicted censoring curves
  std::size_t threads = 0;    //!< 0 uses RDSURV_THREADS or the hardware count

  std::size_t resolved_mtry(std::size_t num_features) const {
    if (mtry != 0)
      return mtry;
    return static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(num_features))));
  }

  void validate(std::size_t num_features) const {
    if (num_trees == 0)
      throw Error(ErrorCode::InvalidArgument, "num_trees must be positive");
    if (resolved_mtry(num_features) == 0 || resolved_mtry(num_features) > num_features)
      throw Error(ErrorCode::InvalidArgument, "mtry must lie in [1, d + 1]");
    if (min_node_size == 0)
      throw Error(ErrorCode::InvalidArgument, "min_node_size must be positive");
    if (!(subsample_fraction > 0.0 && subsample_fraction <= 1.0))
      throw Error(ErrorCode::InvalidArgument, "subsample_fraction must lie in (0, 1]");
    if (!(censor_floor > 0.0 && censor_floor < 0.5))
      throw Error(ErrorCode::InvalidArgument, "censor_floor must lie in (0, 0.5)");
  }
};

enum class SurvivalTarget { Event, Censoring };

//! Column-major feature matrix (x1..xd, z) plus grid-indexed outcomes for
//! the process being modelled.
struct ForestData {
  std::size_t n = 0;
  std::size_t num_features = 0;
  std::vector<double> features; //!< features[f * n + i]
  std::vector<std::uint32_t> time_index;
  std::vector<std::uint8_t> status;
  std::size_t grid_size = 0;
  TieOrder ties = TieOrder::OthersAtRisk;

  double feature(std::size_t f, std::size_t i) const { return features[f * n + i]; }

  static ForestData from_dataset(const SurvivalDataset& ds, SurvivalTarget target) {
    ForestData fd;
    fd.n = ds.size();
    fd.num_features = ds.dim() + 1;
    fd.grid_size = ds.grid().size();
    fd.ties = tie_order_for(target == SurvivalTarget::Censoring);
    fd.features.resize(fd.n * fd.num_features);
    fd.time_index.resize(fd.n);
    fd.status.resize(fd.n);
    for (std::size_t i = 0; i < fd.n; ++i) {
      const Unit& u = ds.unit(i);
      for (std::size_t j = 0; j < ds.dim(); ++j)
        fd.features[j * fd.n + i] = u.x[j];
      fd.features[ds.dim() * fd.n + i] = u.z;
      fd.time_index[i] = static_cast<std::uint32_t>(ds.time_index(i));
      const bool ev = target == SurvivalTarget::Event ? u.delta : !u.delta;
      fd.status[i] = ev ? 1 : 0;
    }
    return fd;
  }
};

//! Single log-rank survival tree whose leaves hold Kaplan-Meier curves as
//! sparse jump lists on the shared grid.
class SurvivalTree {
public:
  struct Node {
    std::int32_t feature = -1; //!< -1 marks a leaf
    double threshold = 0.0;    //!< x <= threshold goes left
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::int32_t leaf = -1;
  };

  struct Jump {
    std::uint32_t index; //!< grid index where the curve drops
    double value;        //!< S from this index on
  };

  //! Leaf reached by the row accessor `x(f)`.
  template <class FeatureFn>
  std::size_t leaf_of(FeatureFn&& x) const {
    std::size_t node = 0;
    while (nodes_[node].feature >= 0) {
      const Node& nd = nodes_[node];
      node = static_cast<std::size_t>(x(static_cast<std::size_t>(nd.feature)) <= nd.threshold ? nd.left
                                                                                              : nd.right);
    }
    return static_cast<std::size_t>(nodes_[node].leaf);
  }

  std::span<const Jump> leaf_jumps(std::size_t leaf) const {
    return std::span<const Jump>(jumps_).subspan(leaf_begin_[leaf], leaf_begin_[leaf + 1] - leaf_begin_[leaf]);
  }

  bool in_bag(std::size_t unit) const { return (in_bag_[unit >> 6] >> (unit & 63)) & 1ULL; }
  std::size_t num_leaves() const { return leaf_begin_.empty() ? 0 : leaf_begin_.size() - 1; }
  std::size_t num_nodes() const { return nodes_.size(); }
  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<std::uint32_t>& sample() const { return sample_; }

  static SurvivalTree grow(const ForestData& data, const ForestConfig& cfg, std::uint64_t tree_seed,
                           bool allow_splits);

private:
  std::vector<Node> nodes_;
  std::vector<std::uint32_t> leaf_begin_;
  std::vector<Jump> jumps_;
  std::vector<std::uint64_t> in_bag_;
  std::vector<std::uint32_t> sample_;

  friend class TreeGrower;
};

//! Scratch state for growing one tree.
class TreeGrower {
public:
  TreeGrower(const ForestData& data, const ForestConfig& cfg, std::uint64_t seed)
    : data_(data)
    , cfg_(cfg)
    , mtry_(cfg.resolved_mtry(data.num_features))
    , rng_(seed)
  {}

  SurvivalTree run(bool allow_splits) {
    SurvivalTree tree;
    const std::size_t n = data_.n;
    std::size_t m = static_cast<std::size_t>(std::llround(cfg_.subsample_fraction * static_cast<double>(n)));
    m = std::clamp<std::size_t>(m, 1, n);

    // partial Fisher-Yates: the first m entries form the subsample
    std::vector<std::uint32_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0u);
    for (std::size_t i = 0; i < m; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, n - 1);
      std::swap(perm[i], perm[pick(rng_)]);
    }
    samples_.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(m));
    std::sort(samples_.begin(), samples_.end());
    tree.sample_ = samples_;
    tree.in_bag_.assign((n + 63) / 64, 0ULL);
    for (auto s : samples_)
      tree.in_bag_[s >> 6] |= 1ULL << (s & 63);

    struct Pending {
      std::size_t node, begin, end;
    };
    std::vector<Pending> stack;
    tree.nodes_.push_back({});
    stack.push_back({0, 0, m});
    tree.leaf_begin_.push_back(0);
    while (!stack.empty()) {
      Pending p = stack.back();
      stack.pop_back();
      Split split;
      if (allow_splits)
        split = find_split(p.begin, p.end);
      if (split.feature < 0) {
        make_leaf(tree, p.node, p.begin, p.end);
        continue;
      }
      auto first = samples_.begin() + static_cast<std::ptrdiff_t>(p.begin);
      auto last = samples_.begin() + static_cast<std::ptrdiff_t>(p.end);
      const std::size_t f = static_cast<std::size_t>(split.feature);
      auto mid = std::stable_partition(first, last, [&](std::uint32_t s) {
        return data_.feature(f, s) <= split.threshold;
      });
      const std::size_t cut = static_cast<std::size_t>(mid - samples_.begin());
      const auto left = tree.nodes_.size();
      tree.nodes_.push_back({});
      tree.nodes_.push_back({});
      SurvivalTree::Node& nd = tree.nodes_[p.node];
      nd.feature = split.feature;
      nd.threshold = split.threshold;
      nd.left = static_cast<std::int32_t>(left);
      nd.right = static_cast<std::int32_t>(left + 1);
      // right pushed first so the left subtree is expanded first
      stack.push_back({left + 1, cut, p.end});
      stack.push_back({left, p.begin, cut});
    }
    return tree;
  }

private:
  struct Split {
    std::int32_t feature = -1;
    double threshold = 0.0;
    double statistic = 0.0;
  };

  // Log-rank split search. Samples are bucketed by the last node event time
  // at or before their observed time; a sample whose time precedes every
  // event time is never at risk at an event and drops out of the statistic.
  Split find_split(std::size_t begin, std::size_t end) {
    Split best;
    const std::size_t size = end - begin;
    const std::size_t min_node = cfg_.min_node_size;
    if (size < 2 * min_node)
      return best;

    event_times_.clear();
    for (std::size_t k = begin; k < end; ++k) {
      const auto s = samples_[k];
      if (data_.status[s])
        event_times_.push_back(data_.time_index[s]);
    }
    if (event_times_.empty())
      return best;
    std::sort(event_times_.begin(), event_times_.end());
    event_times_.erase(std::unique(event_times_.begin(), event_times_.end()), event_times_.end());
    const std::size_t B = event_times_.size();

    sample_bucket_.resize(size);
    sample_event_.resize(size);
    cnt_.assign(B, 0.0);
    ev_.assign(B, 0.0);
    for (std::size_t k = begin; k < end; ++k) {
      const auto s = samples_[k];
      const auto t = data_.time_index[s];
      auto it = std::upper_bound(event_times_.begin(), event_times_.end(), t);
      const std::int32_t b = static_cast<std::int32_t>(it - event_times_.begin()) - 1;
      sample_bucket_[k - begin] = b;
      const bool ev = b >= 0 && data_.status[s] && event_times_[static_cast<std::size_t>(b)] == t;
      sample_event_[k - begin] = ev ? 1 : 0;
      if (b >= 0) {
        cnt_[static_cast<std::size_t>(b)] += 1.0;
        if (ev)
          ev_[static_cast<std::size_t>(b)] += 1.0;
      }
    }

    // Per-bucket terms of the log-rank statistic. Moving one sample from the
    // right to the left child adds 1 to n_left(b) for every bucket b up to
    // its own, so numerator and variance change by prefix sums of
    //   a_b = d_b / R_b,  u_b = v_b / R_b,  w_b = v_b / R_b^2
    // plus a term in sum_{b <= beta} w_b n_left(b), kept in two Fenwick trees.
    pre_a_.assign(B, 0.0);
    pre_u_.assign(B, 0.0);
    pre_w_.assign(B, 0.0);
    {
      double acc = 0.0;
      for (std::size_t b = B; b-- > 0;) {
        acc += cnt_[b];
        const double v = acc > 1.0 ? ev_[b] * (acc - ev_[b]) / (acc - 1.0) : 0.0;
        pre_a_[b] = ev_[b] / acc;
        pre_u_[b] = v / acc;
        pre_w_[b] = v / (acc * acc);
      }
      for (std::size_t b = 1; b < B; ++b) {
        pre_a_[b] += pre_a_[b - 1];
        pre_u_[b] += pre_u_[b - 1];
        pre_w_[b] += pre_w_[b - 1];
      }
    }
    const double var_scale = pre_u_[B - 1];

    // candidate features, sampled without replacement
    features_.resize(data_.num_features);
    std::iota(features_.begin(), features_.end(), 0u);
    for (std::size_t i = 0; i < mtry_; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, features_.size() - 1);
      std::swap(features_[i], features_[pick(rng_)]);
    }

    order_.resize(size);
    for (std::size_t fi = 0; fi < mtry_; ++fi) {
      const std::size_t f = features_[fi];
      for (std::size_t k = 0; k < size; ++k)
        order_[k] = {data_.feature(f, samples_[begin + k]), static_cast<std::uint32_t>(k)};
      std::sort(order_.begin(), order_.end());
      if (order_.front().first == order_.back().first)
        continue;
      fen_cnt_.assign(B + 1, 0.0);
      fen_cw_.assign(B + 1, 0.0);
      double left_total = 0.0, num = 0.0, var = 0.0;
      for (std::size_t k = 0; k + 1 < size; ++k) {
        const std::uint32_t local = order_[k].second;
        const std::int32_t bs = sample_bucket_[local];
        if (bs >= 0) {
          const auto b = static_cast<std::size_t>(bs);
          const double cnt_le = fenwick_prefix(fen_cnt_, b);
          const double s = fenwick_prefix(fen_cw_, b) + pre_w_[b] * (left_total - cnt_le);
          num += (sample_event_[local] ? 1.0 : 0.0) - pre_a_[b];
          var += pre_u_[b] - pre_w_[b] - 2.0 * s;
          fenwick_add(fen_cnt_, b, 1.0);
          fenwick_add(fen_cw_, b, pre_w_[b]);
          left_total += 1.0;
        }
        if (order_[k].first == order_[k + 1].first)
          continue;
        const std::size_t n_left = k + 1;
        if (n_left < min_node || size - n_left < min_node)
          continue;
        if (!(var > 1e-10 * var_scale))
          continue;
        const double stat = num * num / var;
        if (stat > best.statistic) {
          const double lo = order_[k].first, hi = order_[k + 1].first;
          double thr = lo + (hi - lo) / 2.0;
          if (!(thr >= lo && thr < hi))
            thr = lo;
          best.feature = static_cast<std::int32_t>(f);
          best.threshold = thr;
          best.statistic = stat;
        }
      }
    }
    return best;
  }

  void make_leaf(SurvivalTree& tree, std::size_t node, std::size_t begin, std::size_t end) {
    leaf_times_.clear();
    for (std::size_t k = begin; k < end; ++k) {
      const auto s = samples_[k];
      leaf_times_.emplace_back(data_.time_index[s], data_.status[s]);
    }
    std::sort(leaf_times_.begin(), leaf_times_.end());
    double at_risk = static_cast<double>(leaf_times_.size());
    double surv = 1.0;
    std::size_t k = 0;
    while (k < leaf_times_.size()) {
      const auto t = leaf_times_[k].first;
      double leaving = 0.0, events = 0.0;
      while (k < leaf_times_.size() && leaf_times_[k].first == t) {
        leaving += 1.0;
        events += leaf_times_[k].second;
        ++k;
      }
      const double risk = data_.ties == TieOrder::OthersLeaveFirst ? at_risk - (leaving - events) : at_risk;
      if (events > 0.0) {
        surv *= 1.0 - events / risk;
        tree.jumps_.push_back({t, surv});
      }
      at_risk -= leaving;
    }
    tree.nodes_[node].leaf = static_cast<std::int32_t>(tree.leaf_begin_.size() - 1);
    tree.leaf_begin_.push_back(static_cast<std::uint32_t>(tree.jumps_.size()));
  }

  const ForestData& data_;
  const ForestConfig& cfg_;
  std::size_t mtry_;
  Rng rng_;
  std::vector<std::uint32_t> samples_;
  std::vector<std::uint32_t> event_times_;
  std::vector<std::int32_t> sample_bucket_;
  std::vector<std::uint8_t> sample_event_;
  static double fenwick_prefix(const std::vector<double>& t, std::size_t b) {
    double r = 0.0;
    for (std::size_t i = b + 1; i > 0; i -= i & (~i + 1))
      r += t[i];
    return r;
  }
  static void fenwick_add(std::vector<double>& t, std::size_t b, double v) {
    for (std::size_t i = b + 1; i < t.size(); i += i & (~i + 1))
      t[i] += v;
  }

  std::vector<double> cnt_, ev_, pre_a_, pre_u_, pre_w_, fen_cnt_, fen_cw_;
  std::vector<std::uint32_t> features_;
  std::vector<std::pair<double, std::uint32_t>> order_;
  std::vector<std::pair<std::uint32_t, std::uint8_t>> leaf_times_;
};

inline SurvivalTree SurvivalTree::grow(const ForestData& data, const ForestConfig& cfg, std::uint64_t tree_seed,
                                       bool allow_splits) {
  return TreeGrower(data, cfg, tree_seed).run(allow_splits);
}

//! Random survival forest for either the event or the censoring process.
class SurvivalForest {
public:
  static SurvivalForest fit(const SurvivalDataset& ds, SurvivalTarget target, const ForestConfig& cfg) {
    SurvivalForest forest;
    forest.data_ = ForestData::from_dataset(ds, target);
    cfg.validate(forest.data_.num_features);
    forest.cfg_ = cfg;
    forest.target_ = target;
    forest.grid_ = ds.grid_ptr();

    bool allow_splits = true;
    if (ds.grid().size() <= 1) {
      allow_splits = false;
      forest.warnings_.push_back("DegenerateData: all units share one observed time; forest has single-leaf trees");
    }
    forest.trees_.resize(cfg.num_trees);
    const std::uint64_t stream = target == SurvivalTarget::Event ? 1 : 2;
    const auto& data = forest.data_;
    parallel_for(cfg.num_trees, cfg.threads, [&](std::size_t t) {
      forest.trees_[t] = SurvivalTree::grow(data, cfg, derive_seed(cfg.seed, t, stream), allow_splits);
    });
    return forest;
  }

  const std::vector<SurvivalTree>& trees() const noexcept { return trees_; }
  const ForestConfig& config() const noexcept { return cfg_; }
  SurvivalTarget target() const noexcept { return target_; }
  const TimeGrid& grid() const { return *grid_; }
  std::shared_ptr<const TimeGrid> grid_ptr() const { return grid_; }
  std::size_t num_train() const noexcept { return data_.n; }
  const ForestData& training_data() const noexcept { return data_; }
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

  //! Averages leaf curves of the selected trees for training unit i.
  //! Returns the number of trees used; values must have grid-size length.
  std::size_t aggregate_training(std::size_t i, bool oob_only, std::span<double> values,
                                 std::vector<double>& scratch) const {
    auto x = [&](std::size_t f) { return data_.feature(f, i); };
    return aggregate(x, [&](const SurvivalTree& t) { return !oob_only || !t.in_bag(i); }, values, scratch);
  }

  //! Full-forest prediction for a new feature row (x1..xd, z).
  SurvivalCurve predict(std::span<const double> features) const {
    if (features.size() != data_.num_features)
      throw Error(ErrorCode::InvalidArgument, "feature row has the wrong dimension");
    std::vector<double> values(grid_->size()), scratch;
    aggregate([&](std::size_t f) { return features[f]; }, [](const SurvivalTree&) { return true; }, values,
              scratch);
    monotonize(values);
    return SurvivalCurve(grid_, std::move(values));
  }

private:
  template <class FeatureFn, class UseTree>
  std::size_t aggregate(FeatureFn&& x, UseTree&& use, std::span<double> values, std::vector<double>& diff) const {
    const std::size_t K = grid_->size();
    diff.assign(K + 1, 0.0);
    std::size_t count = 0;
    for (const auto& tree : trees_) {
      if (!use(tree))
        continue;
      ++count;
      double prev = 1.0;
      for (const auto& j : tree.leaf_jumps(tree.leaf_of(x))) {
        diff[j.index] += j.value - prev;
        prev = j.value;
      }
    }
    if (count == 0)
      return 0;
    const double inv = static_cast<double>(count);
    double run = 0.0;
    for (std::size_t k = 1; k <= K; ++k) {
      run += diff[k];
      values[k - 1] = 1.0 + run / inv;
    }
    return count;
  }

  ForestData data_;
  ForestConfig cfg_;
  SurvivalTarget target_ = SurvivalTarget::Event;
  std::shared_ptr<const TimeGrid> grid_;
  std::vector<SurvivalTree> trees_;
  std::vector<std::string> warnings_;
};

inline SurvivalForest fit_survival_forest(const SurvivalDataset& ds, SurvivalTarget target,
                                          const ForestConfig& cfg) {
  return SurvivalForest::fit(ds, target, cfg);
}

struct PanelMeta {
  bool oob = false;
  double censor_floor = 0.0; //!< clamp applied to censoring curves, 0 if none
  std::size_t event_trees = 0;
  std::size_t censor_trees = 0;
  std::vector<std::size_t> in_bag_fallback; //!< units predicted with the full forest
  std::vector<std::string> warnings;
};

//! Per-unit conditional event and censoring curves, stored row-major.
class CurvePanel {
public:
  CurvePanel() = default;
  CurvePanel(std::shared_ptr<const TimeGrid> grid, std::size_t n)
    : grid_(std::move(grid))
    , n_(n)
    , event_(n * grid_->size(), 1.0)
    , censor_(n * grid_->size(), 1.0)
  {}

  //! Panel from explicit rows, e.g. known curves in tests.
  static CurvePanel from_rows(std::shared_ptr<const TimeGrid> grid, const std::vector<std::vector<double>>& event,
                              const std::vector<std::vector<double>>& censor, bool oob, double censor_floor = 0.0) {
    if (event.size() != censor.size())
      throw Error(ErrorCode::InvalidArgument, "event and censoring panels differ in length");
    CurvePanel p(std::move(grid), event.size());
    const std::size_t K = p.grid_->size();
    for (std::size_t i = 0; i < p.n_; ++i) {
      if (event[i].size() != K || censor[i].size() != K)
        throw Error(ErrorCode::InvalidArgument, "panel row length differs from grid");
      if (!is_valid_survival(event[i]) || !is_valid_survival(censor[i]))
        throw Error(ErrorCode::InvalidArgument, "panel rows must be survival curves");
      std::copy(event[i].begin(), event[i].end(), p.event_row(i).begin());
      std::copy(censor[i].begin(), censor[i].end(), p.censor_row(i).begin());
    }
    p.meta.oob = oob;
    p.meta.censor_floor = censor_floor;
    return p;
  }

  //! Same curves for every unit.
  static CurvePanel uniform(std::shared_ptr<const TimeGrid> grid, std::size_t n, const std::vector<double>& event,
                            const std::vector<double>& censor, bool oob, double censor_floor = 0.0) {
    return from_rows(std::move(grid), std::vector<std::vector<double>>(n, event),
                     std::vector<std::vector<double>>(n, censor), oob, censor_floor);
  }

  std::size_t size() const noexcept { return n_; }
  const TimeGrid& grid() const { return *grid_; }
  std::shared_ptr<const TimeGrid> grid_ptr() const { return grid_; }
  bool oob() const noexcept { return meta.oob; }

  CurveView event(std::size_t i) const { return CurveView(*grid_, row(event_, i)); }
  CurveView censor(std::size_t i) const { return CurveView(*grid_, row(censor_, i)); }
  std::span<double> event_row(std::size_t i) { return row(event_, i); }
  std::span<double> censor_row(std::size_t i) { return row(censor_, i); }

  PanelMeta meta;

private:
  std::span<const double> row(const std::vector<double>& v, std::size_t i) const {
    const std::size_t K = grid_->size();
    return std::span<const double>(v).subspan(i * K, K);
  }
  std::span<double> row(std::vector<double>& v, std::size_t i) {
    const std::size_t K = grid_->size();
    return std::span<double>(v).subspan(i * K, K);
  }

  std::shared_ptr<const TimeGrid> grid_;
  std::size_t n_ = 0;
  std::vector<double> event_;
  std::vector<double> censor_;
};

//! Out-of-bag event and censoring curves for every training unit. Units that
//! were in every tree's subsample fall back to the full forest and are listed
//! in meta.in_bag_fallback. Censoring curves are clamped below at the censor
//! forest's censor_floor.
inline CurvePanel predict_oob_curves(const SurvivalForest& event_forest, const SurvivalForest& censor_forest,
                                     const SurvivalDataset& ds, std::size_t threads = 0) {
  if (event_forest.target() != SurvivalTarget::Event || censor_forest.target() != SurvivalTarget::Censoring)
    throw Error(ErrorCode::InvalidArgument, "expected an event forest and a censoring forest");
  if (event_forest.num_train() != ds.size() || censor_forest.num_train() != ds.size() ||
      !(event_forest.grid() == ds.grid()) || !(censor_forest.grid() == ds.grid()))
    throw Error(ErrorCode::InvalidArgument, "forests were not fitted on this dataset");

  const std::size_t n = ds.size();
  const double floor = censor_forest.config().censor_floor;
  CurvePanel panel(ds.grid_ptr(), n);
  std::vector<std::uint8_t> fallback(n, 0);
  parallel_for(n, threads, [&](std::size_t i) {
    std::vector<double> scratch;
    auto ev = panel.event_row(i);
    auto ce = panel.censor_row(i);
    bool fb = false;
    if (event_forest.aggregate_training(i, true, ev, scratch) == 0) {
      event_forest.aggregate_training(i, false, ev, scratch);
      fb = true;
    }
    if (censor_forest.aggregate_training(i, true, ce, scratch) == 0) {
      censor_forest.aggregate_training(i, false, ce, scratch);
      fb = true;
    }
    monotonize(ev);
    monotonize(ce, floor);
    fallback[i] = fb ? 1 : 0;
  });

  panel.meta.oob = true;
  panel.meta.censor_floor = floor;
  panel.meta.event_trees = event_forest.trees().size();
  panel.meta.censor_trees = censor_forest.trees().size();
  for (std::size_t i = 0; i < n; ++i)
    if (fallback[i])
      panel.meta.in_bag_fallback.push_back(i);
  if (!panel.meta.in_bag_fallback.empty())
    panel.meta.warnings.push_back("NoOobTrees: " + std::to_string(panel.meta.in_bag_fallback.size()) +
                                  " unit(s) appear in every subsample; predicted in-bag");
  for (const auto& w : event_forest.warnings())
    panel.meta.warnings.push_back("event forest: " + w);
  for (const auto& w : censor_forest.warnings())
    panel.meta.warnings.push_back("censoring forest: " + w);
  return panel;
}

} // namespace rdsurv
