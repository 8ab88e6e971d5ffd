#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "rdsurv.hpp"

namespace testing_support {

// Random dataset with integer-ish times so ties are common.
inline rdsurv::SurvivalDataset random_dataset(std::uint64_t seed, std::size_t n, std::size_t dim = 3,
                                              double censor_share = 0.4, int max_time = 12,
                                              rdsurv::Design design = rdsurv::Design::Sharp) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::uniform_int_distribution<int> tdist(1, max_time);
  std::vector<rdsurv::Unit> units;
  for (std::size_t i = 0; i < n; ++i) {
    rdsurv::Unit u;
    u.z = unif(rng);
    u.y = tdist(rng);
    u.delta = unif(rng) >= censor_share;
    for (std::size_t j = 0; j < dim; ++j)
      u.x.push_back(unif(rng));
    if (design == rdsurv::Design::Fuzzy)
      u.w = unif(rng) < (u.z >= 0.5 ? 0.8 : 0.2);
    units.push_back(std::move(u));
  }
  return rdsurv::SurvivalDataset::create(std::move(units), 0.5, design);
}

// Product-limit estimate evaluated at t, computed directly from the pairs:
// prod over distinct event times s <= t of (1 - d(s) / #{y >= s}). With
// others_leave_first, non-events at s are dropped from the risk set at s.
inline double km_reference(const std::vector<double>& y, const std::vector<bool>& ev, double t,
                           bool others_leave_first = false) {
  std::vector<double> times;
  for (std::size_t i = 0; i < y.size(); ++i)
    if (ev[i] && y[i] <= t)
      times.push_back(y[i]);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  double s = 1.0;
  for (double u : times) {
    double d = 0.0, r = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (y[i] > u || (y[i] == u && (ev[i] || !others_leave_first)))
        r += 1.0;
      if (ev[i] && y[i] == u)
        d += 1.0;
    }
    s *= 1.0 - d / r;
  }
  return s;
}

// Random nonincreasing curve on K points with values in (lo, 1].
inline std::vector<double> random_curve(std::mt19937_64& rng, std::size_t K, double lo = 0.0) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> v(K);
  double s = 1.0;
  for (std::size_t k = 0; k < K; ++k) {
    if (unif(rng) < 0.6)
      s *= 0.75 + 0.25 * unif(rng);
    v[k] = std::max(s, lo);
  }
  return v;
}

// Writes a dataset in the CLI input schema.
inline void write_dataset_csv(const rdsurv::SurvivalDataset& ds, const std::string& path, bool with_w = false) {
  std::ofstream out(path);
  out << "time,event,z";
  for (std::size_t j = 0; j < ds.dim(); ++j)
    out << ",x" << j + 1;
  if (with_w)
    out << ",w";
  out << '\n';
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const auto& u = ds.unit(i);
    out << rdsurv::format_number(u.y) << ',' << int(u.delta) << ',' << rdsurv::format_number(u.z);
    for (double v : u.x)
      out << ',' << rdsurv::format_number(v);
    if (with_w)
      out << ',' << int(ds.treated(i));
    out << '\n';
  }
}

struct CommandResult {
  int code = -1;
  std::string out;
};

// Runs a shell command, capturing stdout and discarding stderr.
inline CommandResult run_command(const std::string& cmd) {
  CommandResult r;
  FILE* p = popen((cmd + " 2>/dev/null").c_str(), "r");
  if (!p)
    return r;
  char buf[4096];
  std::size_t k;
  while ((k = fread(buf, 1, sizeof buf, p)) > 0)
    r.out.append(buf, k);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

} // namespace testing_support
