#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "rdsurv/errors.hpp"
#include "rdsurv/survival.hpp"

namespace rdsurv {

struct LogRankResult {
  double statistic = 0.0; //!< chi-square statistic, 1 degree of freedom
  double p_value = 1.0;   //!< two-sided
  double observed = 0.0;  //!< events in group 1
  double expected = 0.0;  //!< expected events in group 1 under the null
  double variance = 0.0;  //!< hypergeometric variance of observed - expected
  std::size_t n_group0 = 0;
  std::size_t n_group1 = 0;
};

//! Upper tail of the chi-square distribution with one degree of freedom.
inline double chi_square1_sf(double x) {
  if (!(x > 0.0))
    return 1.0;
  return std::erfc(std::sqrt(x / 2.0));
}

//! Two-sample log-rank test. Ties are handled with the usual hypergeometric
//! variance; units censored at an event time count as at risk there.
inline LogRankResult logrank_test(std::span<const TimeEvent> data, std::span<const bool> group,
                                  std::size_t grid_size) {
  if (data.size() != group.size())
    throw Error(ErrorCode::InvalidArgument, "group labels must match the data length");
  if (data.empty())
    throw Error(ErrorCode::EmptyInput, "log-rank test needs data");

  const std::size_t K = grid_size;
  std::vector<double> leave_all(K + 1, 0.0), leave_g1(K + 1, 0.0);
  std::vector<double> ev_all(K + 1, 0.0), ev_g1(K + 1, 0.0);
  LogRankResult r;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const std::size_t k = data[i].index;
    if (k > K)
      throw Error(ErrorCode::InvalidArgument, "time index outside the grid");
    leave_all[k] += 1.0;
    if (group[i]) {
      leave_g1[k] += 1.0;
      ++r.n_group1;
    } else {
      ++r.n_group0;
    }
    if (data[i].event) {
      ev_all[k] += 1.0;
      if (group[i])
        ev_g1[k] += 1.0;
    }
  }

  double n = static_cast<double>(data.size());
  double n1 = static_cast<double>(r.n_group1);
  for (std::size_t k = 0; k <= K; ++k) {
    const double d = ev_all[k];
    if (d > 0.0 && n > 0.0) {
      r.observed += ev_g1[k];
      r.expected += d * n1 / n;
      if (n > 1.0)
        r.variance += d * (n1 / n) * (1.0 - n1 / n) * (n - d) / (n - 1.0);
    }
    n -= leave_all[k];
    n1 -= leave_g1[k];
  }
  if (r.variance > 0.0) {
    const double diff = r.observed - r.expected;
    r.statistic = diff * diff / r.variance;
    r.p_value = chi_square1_sf(r.statistic);
  }
  return r;
}

} // namespace rdsurv
