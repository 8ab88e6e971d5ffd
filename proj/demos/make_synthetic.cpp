// Writes one draw of a built-in simulation setting as an input CSV.
//   make_synthetic <setting 1-4> <n> <seed> [--fuzzy] > data.csv

#include <cstdlib>
#include <iostream>
#include <string>

#include "rdsurv.hpp"

int main(int argc, char** argv) {
  if (argc < 4) {
    std::cerr << "usage: make_synthetic <setting 1-4> <n> <seed> [--fuzzy]\n";
    return 2;
  }
  try {
    const auto setting = rdsurv::DgpSetting::make(std::atoi(argv[1]), std::stoul(argv[2]), std::stoull(argv[3]));
    const bool fuzzy = argc > 4 && std::string(argv[4]) == "--fuzzy";
    const rdsurv::SimulatedData sd = rdsurv::generate(setting);
    if (!fuzzy) {
      rdsurv::write_dataset_csv(std::cout, sd.data);
      return 0;
    }
    // imperfect compliance: treatment taken with probability 0.2 + 0.6 * 1(z >= c)
    rdsurv::Rng rng = rdsurv::make_rng(setting.seed, 1, 0xf022);
    std::vector<rdsurv::Unit> units = sd.data.units();
    for (auto& u : units)
      u.w = std::bernoulli_distribution(u.z >= rdsurv::kSimCutoff ? 0.8 : 0.2)(rng);
    rdsurv::write_dataset_csv(std::cout,
                              rdsurv::SurvivalDataset::create(std::move(units), rdsurv::kSimCutoff,
                                                              rdsurv::Design::Fuzzy));
  } catch (const rdsurv::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return rdsurv::exit_code(e.category());
  }
  return 0;
}
