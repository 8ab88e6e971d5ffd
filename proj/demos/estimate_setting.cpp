// Estimates both effects on one draw of a setting with every method.
//   estimate_setting [setting] [n] [seed]

#include <cstdio>
#include <cstdlib>
#include <string>

#include "rdsurv.hpp"

int main(int argc, char** argv) {
  const int id = argc > 1 ? std::atoi(argv[1]) : 1;
  const std::size_t n = argc > 2 ? std::stoul(argv[2]) : 2000;
  const std::uint64_t seed = argc > 3 ? std::stoull(argv[3]) : 7;
  try {
    const auto setting = rdsurv::DgpSetting::make(id, n, seed);
    const rdsurv::SimulatedData sd = rdsurv::generate(setting);
    rdsurv::ForestConfig fc;
    fc.num_trees = 200;
    fc.seed = seed;
    const rdsurv::CurvePanel panel = rdsurv::fit_oob_panel(sd.data, fc);
    std::printf("setting %d  n=%zu  censored=%zu  h=%g\n", id, n, sd.data.censored_count(), setting.horizon);
    for (auto kind : {rdsurv::EstimandKind::SurvivalProbability, rdsurv::EstimandKind::Rmst}) {
      const rdsurv::Truth truth = rdsurv::compute_truth(setting, kind, 1'000'000);
      std::printf("%s  truth %.4f\n", rdsurv::to_string(kind).c_str(), truth.value);
      const rdsurv::Estimand est{kind, rdsurv::make_horizon(sd.data, setting.horizon)};
      rdsurv::PipelineConfig pc;
      pc.forest = fc;
      for (auto m : {rdsurv::Method::Dr, rdsurv::Method::Ipcw, rdsurv::Method::Naive}) {
        const auto in = rdsurv::censoring_adjusted_input(sd.data, est, m, &panel, pc);
        const rdsurv::RdFit f = rdsurv::rd_estimate(in);
        std::printf("  %-6s %8.4f  [%8.4f, %8.4f]  h=%.3f\n", rdsurv::to_string(m).c_str(), f.estimate_bc, f.ci_low,
                    f.ci_high, f.bandwidth_h);
      }
    }
  } catch (const rdsurv::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return rdsurv::exit_code(e.category());
  }
  return 0;
}
