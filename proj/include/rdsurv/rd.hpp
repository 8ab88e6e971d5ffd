#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/distributions/normal.hpp>

#include "rdsurv/errors.hpp"

namespace rdsurv {

//! Generic RD regression input: an outcome per unit, optional sample weights
//! (IPCW) and an inclusion mask.
struct RdInput {
  std::vector<double> z;
  std::vector<double> outcome;
  std::vector<double> weight;         //!< empty means all ones
  std::vector<std::uint8_t> included; //!< empty means all included
  double cutoff = 0.0;

  static RdInput unweighted(std::vector<double> z, std::vector<double> outcome, double cutoff) {
    RdInput in;
    in.z = std::move(z);
    in.outcome = std::move(outcome);
    in.cutoff = cutoff;
    return in;
  }

  std::size_t size() const noexcept { return z.size(); }
  double w(std::size_t i) const { return weight.empty() ? 1.0 : weight[i]; }
  bool use(std::size_t i) const { return (included.empty() || included[i]) && w(i) > 0.0; }

  void validate() const {
    if (outcome.size() != z.size() || (!weight.empty() && weight.size() != z.size()) ||
        (!included.empty() && included.size() != z.size()))
      throw Error(ErrorCode::InvalidArgument, "RD input columns differ in length");
    if (!std::isfinite(cutoff))
      throw Error(ErrorCode::InvalidArgument, "cutoff must be finite");
    for (std::size_t i = 0; i < z.size(); ++i) {
      if (!use(i))
        continue;
      if (!std::isfinite(z[i]) || !std::isfinite(outcome[i]) || !std::isfinite(w(i)))
        throw Error(ErrorCode::InvalidArgument, "RD input has non-finite values at unit " + std::to_string(i));
      if (w(i) < 0.0)
        throw Error(ErrorCode::InvalidArgument, "negative sample weight at unit " + std::to_string(i));
    }
  }
};

enum class Side { Left, Right };

inline double triangular_kernel(double u) { return std::max(1.0 - std::abs(u), 0.0); }

//! Boundary fit on one side: the intercept is a linear functional of the
//! outcomes, intercept = sum_i weights[i] * outcome[i].
struct LocalFit {
  double intercept = 0.0;
  std::vector<double> weights;   //!< length n; zero outside the window or side
  std::vector<double> residuals; //!< length n; zero outside the window or side
  std::size_t n_eff = 0;         //!< units with positive kernel weight
  int order = 1;
  double bandwidth = 0.0;
};

inline bool on_side(Side side, double z, double c) { return side == Side::Right ? z >= c : z < c; }

//! Kernel-weighted polynomial regression of the outcome on (z - c)^j,
//! j = 0..order, using units on one side with |z - c| < bandwidth.
inline LocalFit local_poly_fit(const RdInput& in, Side side, int order, double bandwidth) {
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth))
    throw Error(ErrorCode::InvalidArgument, "bandwidth must be positive");
  if (order < 0 || order > 4)
    throw Error(ErrorCode::InvalidArgument, "polynomial order must lie in 0..4");
  const std::size_t n = in.size();
  const double c = in.cutoff;
  const int p = order + 1;

  std::vector<std::size_t> idx;
  std::vector<double> kw;
  for (std::size_t i = 0; i < n; ++i) {
    if (!in.use(i) || !on_side(side, in.z[i], c))
      continue;
    const double k = triangular_kernel((in.z[i] - c) / bandwidth);
    if (k <= 0.0)
      continue;
    idx.push_back(i);
    kw.push_back(k * in.w(i));
  }
  const std::size_t m = idx.size();
  {
    std::vector<double> zs;
    zs.reserve(m);
    for (auto i : idx)
      zs.push_back(in.z[i]);
    std::sort(zs.begin(), zs.end());
    const auto distinct = static_cast<int>(std::unique(zs.begin(), zs.end()) - zs.begin());
    if (distinct < p)
      throw Error(ErrorCode::SingularDesign, "only " + std::to_string(distinct) + " distinct running values in the " +
                                                 (side == Side::Right ? "right" : "left") +
                                                 " window; widen the bandwidth");
  }

  Eigen::MatrixXd X(static_cast<Eigen::Index>(m), p);
  Eigen::VectorXd W(static_cast<Eigen::Index>(m));
  Eigen::VectorXd Y(static_cast<Eigen::Index>(m));
  const double y_ref = in.outcome[idx.front()];
  for (std::size_t r = 0; r < m; ++r) {
    const double u = (in.z[idx[r]] - c) / bandwidth;
    double pw = 1.0;
    for (int j = 0; j < p; ++j) {
      X(static_cast<Eigen::Index>(r), j) = pw;
      pw *= u;
    }
    W(static_cast<Eigen::Index>(r)) = kw[r];
    Y(static_cast<Eigen::Index>(r)) = in.outcome[idx[r]] - y_ref;
  }
  const Eigen::MatrixXd XtW = X.transpose() * W.asDiagonal();
  const Eigen::MatrixXd A = XtW * X;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
  lu.setThreshold(1e-12);
  if (lu.rank() < p)
    throw Error(ErrorCode::SingularDesign, "local design matrix is singular; widen the bandwidth");
  const Eigen::VectorXd e1 = Eigen::VectorXd::Unit(p, 0);
  const Eigen::VectorXd v = lu.solve(e1);
  const Eigen::VectorXd beta = lu.solve(XtW * Y);

  LocalFit fit;
  fit.order = order;
  fit.bandwidth = bandwidth;
  fit.n_eff = m;
  fit.weights.assign(n, 0.0);
  fit.residuals.assign(n, 0.0);
  // intercept = y_ref + sum l_i (y_i - y_ref); exact for outcomes constant on the side
  double acc = 0.0;
  for (std::size_t r = 0; r < m; ++r) {
    const auto i = idx[r];
    const auto row = static_cast<Eigen::Index>(r);
    const double l = W(row) * X.row(row).dot(v);
    fit.weights[i] = l;
    acc += l * Y(row);
    fit.residuals[i] = Y(row) - X.row(row).dot(beta);
  }
  fit.intercept = y_ref + acc;
  return fit;
}

// ---------------------------------------------------------------------------
// Bandwidth selection

struct Bandwidths {
  double h = 0.0; //!< main (local linear) bandwidth
  double b = 0.0; //!< bias-correction bandwidth
};

namespace detail {

struct SidePilot {
  std::size_t count = 0;
  std::size_t distinct = 0;
  double range = 0.0;     //!< max |z - c| on the side
  double curvature = 0.0; //!< second derivative at the cutoff
  double sigma2 = 0.0;    //!< residual variance of the global fit
  double min_bandwidth = 0.0;
};

inline SidePilot side_pilot(const RdInput& in, Side side, std::size_t min_distinct_in_window) {
  const double c = in.cutoff;
  SidePilot sp;
  std::vector<double> dist;
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (!in.use(i) || !on_side(side, in.z[i], c))
      continue;
    ++sp.count;
    dist.push_back(std::abs(in.z[i] - c));
  }
  std::sort(dist.begin(), dist.end());
  dist.erase(std::unique(dist.begin(), dist.end()), dist.end());
  sp.distinct = dist.size();
  if (sp.distinct < 10)
    throw Error(ErrorCode::DegenerateRunningVariable,
                std::string("fewer than 10 distinct running values on the ") +
                    (side == Side::Right ? "right" : "left") + " side");
  sp.range = dist.back();
  // smallest bandwidth leaving min_distinct_in_window points strictly inside
  sp.min_bandwidth = dist[std::min(min_distinct_in_window, dist.size()) - 1] * (1.0 + 1e-9);
  if (!(sp.range > 0.0))
    sp.range = sp.min_bandwidth;

  // global quartic on u = (z - c) / range with unit sample weights
  const int p = 5;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(p, p);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(p);
  double y_ref = 0.0;
  bool have_ref = false;
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (!in.use(i) || !on_side(side, in.z[i], c))
      continue;
    if (!have_ref) {
      y_ref = in.outcome[i];
      have_ref = true;
    }
    const double u = (in.z[i] - c) / sp.range;
    Eigen::VectorXd x(p);
    double pw = 1.0;
    for (int j = 0; j < p; ++j) {
      x(j) = pw;
      pw *= u;
    }
    A.noalias() += in.w(i) * x * x.transpose();
    rhs.noalias() += in.w(i) * (in.outcome[i] - y_ref) * x;
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
  lu.setThreshold(1e-12);
  if (lu.rank() < p)
    throw Error(ErrorCode::DegenerateRunningVariable, "pilot quartic fit is singular");
  const Eigen::VectorXd beta = lu.solve(rhs);
  sp.curvature = 2.0 * beta(2) / (sp.range * sp.range);

  double ss = 0.0, sw = 0.0;
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (!in.use(i) || !on_side(side, in.z[i], c))
      continue;
    const double u = (in.z[i] - c) / sp.range;
    double fitted = 0.0, pw = 1.0;
    for (int j = 0; j < p; ++j) {
      fitted += beta(j) * pw;
      pw *= u;
    }
    const double e = (in.outcome[i] - y_ref) - fitted;
    ss += in.w(i) * e * e;
    sw += in.w(i);
  }
  sp.sigma2 = ss / sw;
  return sp;
}

} // namespace detail

//! Plug-in bandwidth for local linear estimation at a boundary with the
//! triangular kernel:
//!   h = C_K [ (s2_l + s2_r) / (f(c) ((m2_r - m2_l)^2 + r_l + r_r)) ]^(1/5) n^(-1/5),
//! with curvatures m2 and residual variances s2 from global quartic fits on
//! each side, f(c) from a histogram window, and r = 720 s2 / (N range^4)
//! keeping the rule finite when the curvatures coincide. The result is clipped
//! to the data range and widened if needed so that each side keeps a few
//! distinct points for the quadratic bias fit. b = bias_ratio * h.
inline Bandwidths select_bandwidth(const RdInput& in, double bias_ratio = 1.0) {
  in.validate();
  if (!(bias_ratio > 0.0))
    throw Error(ErrorCode::InvalidArgument, "bias bandwidth ratio must be positive");
  constexpr double kTriangularConstant = 3.4375;
  constexpr std::size_t kMinDistinctInWindow = 5;

  const auto L = detail::side_pilot(in, Side::Left, kMinDistinctInWindow);
  const auto R = detail::side_pilot(in, Side::Right, kMinDistinctInWindow);
  const double n = static_cast<double>(L.count + R.count);

  double mean = 0.0;
  for (std::size_t i = 0; i < in.size(); ++i)
    if (in.use(i))
      mean += in.z[i];
  mean /= n;
  double var = 0.0;
  for (std::size_t i = 0; i < in.size(); ++i)
    if (in.use(i))
      var += (in.z[i] - mean) * (in.z[i] - mean);
  const double sd = std::sqrt(var / (n - 1.0));
  const double h1 = 1.84 * sd * std::pow(n, -0.2);
  double near = 0.0;
  for (std::size_t i = 0; i < in.size(); ++i)
    if (in.use(i) && std::abs(in.z[i] - in.cutoff) <= h1)
      near += 1.0;
  const double density = std::max(near, 1.0) / (2.0 * n * h1);

  const double reg_l = 720.0 * L.sigma2 / (static_cast<double>(L.count) * std::pow(L.range, 4));
  const double reg_r = 720.0 * R.sigma2 / (static_cast<double>(R.count) * std::pow(R.range, 4));
  const double dm = R.curvature - L.curvature;
  const double denom = density * (dm * dm + reg_l + reg_r);
  const double numer = L.sigma2 + R.sigma2;

  const double max_h = std::max(L.range, R.range);
  const double min_h = std::max(L.min_bandwidth, R.min_bandwidth);
  double h = max_h;
  if (numer > 0.0 && denom > 0.0)
    h = kTriangularConstant * std::pow(numer / denom, 0.2) * std::pow(n, -0.2);
  h = std::clamp(h, min_h, std::max(min_h, max_h));
  double b = std::clamp(bias_ratio * h, min_h, std::max(min_h, max_h));
  return {h, b};
}

// ---------------------------------------------------------------------------
// Estimation

struct RdOptions {
  double alpha = 0.05;
  double bias_ratio = 1.0;          //!< b / h
  std::optional<double> bandwidth;  //!< fixes h instead of selecting it
};

struct RdFit {
  double estimate = 0.0;    //!< local linear jump at bandwidth h
  double estimate_bc = 0.0; //!< local quadratic jump at bandwidth b
  double se_robust = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double bandwidth_h = 0.0;
  double bandwidth_b = 0.0;
  std::size_t n_eff_left = 0;
  std::size_t n_eff_right = 0;
  double alpha = 0.05;
  bool degenerate_se = false; //!< residuals vanished; se reported as 0
};

struct FuzzyFit {
  RdFit itt;
  RdFit first_stage;
  double ratio = 0.0;
  double se_ratio = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double alpha = 0.05;
};

inline double normal_quantile(double p) { return boost::math::quantile(boost::math::normal(), p); }

namespace detail {

struct JumpFit {
  LocalFit left, right;
  double jump() const { return right.intercept - left.intercept; }
};

inline JumpFit jump_fit(const RdInput& in, int order, double bw) {
  return {local_poly_fit(in, Side::Left, order, bw), local_poly_fit(in, Side::Right, order, bw)};
}

// Sandwich covariance of two jump estimates sharing outcome weights.
inline double jump_covariance(const JumpFit& a, const JumpFit& b) {
  double v = 0.0;
  for (std::size_t i = 0; i < a.left.weights.size(); ++i) {
    const double la = a.left.weights[i] + a.right.weights[i];
    const double lb = b.left.weights[i] + b.right.weights[i];
    const double ea = a.left.residuals[i] + a.right.residuals[i];
    const double eb = b.left.residuals[i] + b.right.residuals[i];
    v += la * lb * ea * eb;
  }
  return v;
}

inline bool residuals_vanish(const JumpFit& f, const RdInput& in) {
  double scale = 0.0;
  for (std::size_t i = 0; i < in.size(); ++i)
    if (in.use(i))
      scale = std::max(scale, std::abs(in.outcome[i]));
  const double tol = 1e-9 * (1.0 + scale);
  for (std::size_t i = 0; i < f.left.residuals.size(); ++i)
    if (std::abs(f.left.residuals[i]) > tol || std::abs(f.right.residuals[i]) > tol)
      return false;
  return true;
}

inline RdFit assemble(const RdInput& in, const JumpFit& conv, const JumpFit& bc, const Bandwidths& bw,
                      double alpha) {
  RdFit fit;
  fit.estimate = conv.jump();
  fit.estimate_bc = bc.jump();
  fit.bandwidth_h = bw.h;
  fit.bandwidth_b = bw.b;
  fit.n_eff_left = conv.left.n_eff;
  fit.n_eff_right = conv.right.n_eff;
  fit.alpha = alpha;
  if (residuals_vanish(bc, in)) {
    fit.degenerate_se = true;
    fit.se_robust = 0.0;
  } else {
    fit.se_robust = std::sqrt(std::max(jump_covariance(bc, bc), 0.0));
  }
  const double zq = normal_quantile(1.0 - alpha / 2.0);
  fit.ci_low = fit.estimate_bc - zq * fit.se_robust;
  fit.ci_high = fit.estimate_bc + zq * fit.se_robust;
  return fit;
}

inline Bandwidths resolve_bandwidths(const RdInput& in, const RdOptions& opt) {
  if (!(opt.alpha > 0.0 && opt.alpha < 0.5))
    throw Error(ErrorCode::InvalidArgument, "alpha must lie in (0, 0.5)");
  if (opt.bandwidth) {
    if (!(*opt.bandwidth > 0.0))
      throw Error(ErrorCode::InvalidArgument, "bandwidth must be positive");
    return {*opt.bandwidth, *opt.bandwidth * opt.bias_ratio};
  }
  return select_bandwidth(in, opt.bias_ratio);
}

} // namespace detail

//! Sharp RD: conventional local linear jump at h, bias-corrected local
//! quadratic jump at b, and a robust heteroskedasticity-consistent standard
//! error from the quadratic fit's outcome weights and residuals.
inline RdFit rd_estimate(const RdInput& in, const RdOptions& opt = {}) {
  in.validate();
  const Bandwidths bw = detail::resolve_bandwidths(in, opt);
  const auto conv = detail::jump_fit(in, 1, bw.h);
  const auto bc = detail::jump_fit(in, 2, bw.b);
  return detail::assemble(in, conv, bc, bw, opt.alpha);
}

struct FuzzyOptions {
  RdOptions rd;
  double min_first_stage = 0.02;
};

//! Fuzzy RD: ratio of the outcome jump to the treatment-probability jump,
//! both fitted with the bandwidth selected on the outcome equation, with a
//! delta-method standard error.
inline FuzzyFit fuzzy_estimate(const RdInput& outcome, const RdInput& treatment, const FuzzyOptions& opt = {}) {
  outcome.validate();
  treatment.validate();
  if (outcome.z != treatment.z || outcome.cutoff != treatment.cutoff || outcome.weight != treatment.weight ||
      outcome.included != treatment.included)
    throw Error(ErrorCode::InvalidArgument, "outcome and treatment inputs must share z, weights and cutoff");
  for (std::size_t i = 0; i < treatment.size(); ++i)
    if (treatment.use(i) && treatment.outcome[i] != 0.0 && treatment.outcome[i] != 1.0)
      throw Error(ErrorCode::InvalidArgument, "treatment values must be 0 or 1");

  const Bandwidths bw = detail::resolve_bandwidths(outcome, opt.rd);
  const auto a_conv = detail::jump_fit(outcome, 1, bw.h);
  const auto a_bc = detail::jump_fit(outcome, 2, bw.b);
  const auto p_conv = detail::jump_fit(treatment, 1, bw.h);
  const auto p_bc = detail::jump_fit(treatment, 2, bw.b);

  FuzzyFit f;
  f.alpha = opt.rd.alpha;
  f.itt = detail::assemble(outcome, a_conv, a_bc, bw, opt.rd.alpha);
  f.first_stage = detail::assemble(treatment, p_conv, p_bc, bw, opt.rd.alpha);
  const double p = f.first_stage.estimate_bc;
  if (!(std::abs(p) >= opt.min_first_stage))
    throw Error(ErrorCode::WeakIdentification, "first-stage jump " + std::to_string(p) + " is below " +
                                                   std::to_string(opt.min_first_stage) + " in magnitude");
  const double a = f.itt.estimate_bc;
  f.ratio = a / p;
  const double var_a = f.itt.degenerate_se ? 0.0 : detail::jump_covariance(a_bc, a_bc);
  const double var_p = f.first_stage.degenerate_se ? 0.0 : detail::jump_covariance(p_bc, p_bc);
  const double cov = (f.itt.degenerate_se || f.first_stage.degenerate_se) ? 0.0
                                                                          : detail::jump_covariance(a_bc, p_bc);
  const double var = var_a / (p * p) + a * a * var_p / (p * p * p * p) - 2.0 * a * cov / (p * p * p);
  f.se_ratio = std::sqrt(std::max(var, 0.0));
  const double zq = normal_quantile(1.0 - opt.rd.alpha / 2.0);
  f.ci_low = f.ratio - zq * f.se_ratio;
  f.ci_high = f.ratio + zq * f.se_ratio;
  return f;
}

//! Interface for swapping in other continuity-based RD estimators.
class RdEstimator {
public:
  virtual ~RdEstimator() = default;
  virtual std::string name() const = 0;
  virtual RdFit estimate(const RdInput& in) const = 0;
  virtual FuzzyFit estimate_fuzzy(const RdInput& outcome, const RdInput& treatment) const = 0;
};

class LocalPolynomialRd : public RdEstimator {
public:
  explicit LocalPolynomialRd(FuzzyOptions opt = {})
    : opt_(opt)
  {}

  std::string name() const override { return "local_polynomial_rbc"; }
  RdFit estimate(const RdInput& in) const override { return rd_estimate(in, opt_.rd); }
  FuzzyFit estimate_fuzzy(const RdInput& outcome, const RdInput& treatment) const override {
    return fuzzy_estimate(outcome, treatment, opt_);
  }
  const FuzzyOptions& options() const noexcept { return opt_; }

private:
  FuzzyOptions opt_;
};

} // namespace rdsurv
