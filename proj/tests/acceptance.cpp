// Acceptance runner. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.
//
//   acceptance [--profile smoke|full] [--only 1,4,8] [--threads N] [--out-dir DIR]
//
// The smoke profile (default, used by ctest) runs the simulation criteria at
// reduced scale; the full profile runs them at n = 5000 with 200 reps
// (200-tree forests) and 500 reps (500-tree forests).

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "support.hpp"

using namespace rdsurv;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Profile {
  std::string name = "smoke";
  // criterion 4
  std::size_t c4_n = 5000;
  std::size_t c4_reps = 100;
  std::size_t c4_trees = 100;
  // criterion 5
  std::size_t c5_n = 1000;
  std::size_t c5_reps = 100;
  double c5_cov_low = 0.85;
  double c5_cov_high = 1.00;
  bool c5_rmse_gate = false;
  double c5_max_seconds = 15 * 60;
  std::size_t c5_trees = 200;
  // criterion 8
  std::size_t c8_reps = 3;
};

Profile make_profile(const std::string& name) {
  Profile p;
  p.name = name;
  if (name == "full") {
    p.c4_reps = 200;
    p.c4_trees = 200;
    p.c5_trees = 500;
    p.c5_n = 5000;
    p.c5_reps = 500;
    p.c5_cov_low = 0.90;
    p.c5_cov_high = 0.99;
    p.c5_rmse_gate = true;
    p.c5_max_seconds = std::numeric_limits<double>::infinity();
    p.c8_reps = 10;
  }
  return p;
}

struct Context {
  Profile profile;
  std::size_t threads = 0;
  std::string out_dir;
  std::string truth_cache;
  // studies kept for the determinism check
  std::vector<std::pair<std::string, StudyConfig>> studies;
  std::map<std::string, SimReport> reports;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v, int digits = 4) {
  std::ostringstream os;
  os.precision(digits);
  os << v;
  return os.str();
}

std::uint64_t ulp_distance(double a, double b) {
  if (a == b)
    return 0;
  if (!std::isfinite(a) || !std::isfinite(b) || std::signbit(a) != std::signbit(b))
    return std::numeric_limits<std::uint64_t>::max();
  std::int64_t ia, ib;
  std::memcpy(&ia, &a, sizeof a);
  std::memcpy(&ib, &b, sizeof b);
  return static_cast<std::uint64_t>(ia > ib ? ia - ib : ib - ia);
}

void save_report(const Context& ctx, const std::string& tag, const SimReport& r) {
  if (ctx.out_dir.empty())
    return;
  fs::create_directories(ctx.out_dir);
  std::ofstream(fs::path(ctx.out_dir) / (tag + ".json")) << to_json(r).dump(2) << '\n';
  std::ofstream csv(fs::path(ctx.out_dir) / (tag + "_per_rep.csv"));
  write_per_rep_csv(csv, r);
}

SimReport run_logged(Context& ctx, const std::string& tag, const StudyConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  SimReport r = run_study(cfg);
  std::cerr << "  [" << tag << "] " << cfg.reps << " reps at n = " << cfg.setting.n << " in "
            << fmt(seconds_since(t0), 4) << " s\n";
  save_report(ctx, tag, r);
  ctx.studies.emplace_back(tag, cfg);
  ctx.reports[tag] = r;
  return r;
}

// ---------------------------------------------------------------------------
// 1. Telescoping with S_C = 1

Outcome criterion1(Context&) {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(101);
  std::uint64_t worst = 0;
  std::size_t checked = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    const std::size_t n = 20 + rng() % 40;
    const double censor_share = std::uniform_real_distribution<double>(0.0, 0.8)(rng);
    const int max_time = 2 + static_cast<int>(rng() % 20);
    std::optional<SurvivalDataset> drawn;
    while (!drawn) {
      try {
        drawn = testing_support::random_dataset(rng(), n, 1, censor_share, max_time);
      } catch (const Error&) {
      }
    }
    const SurvivalDataset& ds = *drawn;
    const std::size_t K = ds.grid().size();
    std::vector<std::vector<double>> ev, ones(n, std::vector<double>(K, 1.0));
    const double lo = std::uniform_real_distribution<double>(0.001, 0.2)(rng);
    for (std::size_t i = 0; i < n; ++i)
      ev.push_back(testing_support::random_curve(rng, K, lo));
    const auto panel = CurvePanel::from_rows(ds.grid_ptr(), ev, ones, true, 0.05);
    const double h = std::uniform_real_distribution<double>(ds.grid().time(1), ds.grid().max_time())(rng);
    const Horizon hz = make_horizon(ds, h);
    const auto sp = dr_scores_survival(ds, hz, panel);
    const auto rm = dr_scores_rmst(ds, hz, panel);
    for (std::size_t i = 0; i < n; ++i) {
      if (!remap_unit(ds, hz, i).observed)
        continue;
      const double y = ds.unit(i).y;
      worst = std::max(worst, ulp_distance(sp.gamma[i], y > hz.h ? 1.0 : 0.0));
      worst = std::max(worst, ulp_distance(rm.gamma[i], std::min(y, hz.h)));
      ++checked;
    }
  }
  const double secs = seconds_since(t0);
  return {worst <= 8 && secs < 1.0, "1000 configurations, " + std::to_string(checked) +
                                        " observed units, max deviation " + std::to_string(worst) + " ulp, " +
                                        fmt(secs, 3) + " s"};
}

// ---------------------------------------------------------------------------
// 2. No-censoring pipeline equivalence through the CLI

Outcome criterion2(Context&) {
  const auto t0 = std::chrono::steady_clock::now();
  DgpSetting s = DgpSetting::make(3, 2000, 77);
  s.censoring = false;
  const SimulatedData sd = generate(s);
  const fs::path csv = fs::temp_directory_path() / "rdsurv_acceptance_c2.csv";
  testing_support::write_dataset_csv(sd.data, csv.string());
  bool ok = true;
  std::string detail;
  for (const std::string est : {"survival_probability", "rmst"}) {
    const auto r = testing_support::run_command(std::string(RDSURV_CLI_PATH) + " estimate --method dr --input " +
                                                csv.string() + " --horizon 20 --estimand " + est);
    if (r.code != 0) {
      ok = false;
      detail += est + ": exit " + std::to_string(r.code) + "; ";
      continue;
    }
    const auto j = nlohmann::json::parse(r.out)["result"];
    std::vector<double> y(sd.data.size());
    for (std::size_t i = 0; i < y.size(); ++i)
      y[i] = complete_outcome(parse_estimand(est), sd.data.unit(i).y, 20.0);
    const RdFit f = rd_estimate(rd_input_from(sd.data, std::move(y)));
    const bool same = j["estimate"].get<double>() == f.estimate && j["estimate_bc"].get<double>() == f.estimate_bc &&
                      j["se_robust"].get<double>() == f.se_robust && j["ci_low"].get<double>() == f.ci_low &&
                      j["ci_high"].get<double>() == f.ci_high;
    ok = ok && same;
    detail += est + (same ? " identical (" : " differs (") + fmt(f.estimate_bc, 6) + "); ";
  }
  fs::remove(csv);
  const double secs = seconds_since(t0);
  ok = ok && secs < 30.0;
  return {ok, detail + fmt(secs, 3) + " s"};
}

// ---------------------------------------------------------------------------
// 3. Double robustness on a discrete model with known curves

Outcome criterion3(Context&) {
  const auto t0 = std::chrono::steady_clock::now();
  static constexpr std::size_t K = 10;
  using Haz = std::array<double, K + 1>;
  std::array<Haz, 2> haz_t{}, haz_c{};
  Haz wrong_t{}, wrong_c{};
  for (std::size_t t = 1; t <= K; ++t) {
    haz_t[0][t] = 0.05 + 0.01 * static_cast<double>(t);
    haz_t[1][t] = 0.15 + 0.02 * static_cast<double>(t % 3);
    haz_c[0][t] = 0.04;
    haz_c[1][t] = t < 5 ? 0.02 : 0.12;
    wrong_t[t] = 0.3;
    wrong_c[t] = 0.01;
  }
  auto surv = [](const Haz& haz, std::size_t t) {
    double s = 1.0;
    for (std::size_t k = 1; k <= std::min(t, K); ++k)
      s *= 1.0 - haz[k];
    return s;
  };
  auto draw = [](const Haz& haz, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (std::size_t t = 1; t <= K; ++t)
      if (unif(rng) < haz[t])
        return static_cast<double>(t);
    return static_cast<double>(K + 5);
  };

  const std::size_t n = 100000;
  const double h = 6.0;
  std::mt19937_64 rng(303);
  std::vector<Unit> units;
  std::vector<int> type;
  for (std::size_t i = 0; i < n; ++i) {
    const int x = static_cast<int>(rng() & 1);
    const double t = draw(haz_t[x], rng);
    const double c = draw(haz_c[x], rng);
    Unit u;
    u.y = std::min(t, c);
    u.delta = t < c;
    u.z = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    u.x = {static_cast<double>(x)};
    units.push_back(std::move(u));
    type.push_back(x);
  }
  const auto ds = SurvivalDataset::create(std::move(units), 0.5, Design::Sharp);
  const TimeGrid& g = ds.grid();
  auto curve = [&](const Haz& haz) {
    std::vector<double> v(g.size());
    for (std::size_t k = 1; k <= g.size(); ++k)
      v[k - 1] = surv(haz, static_cast<std::size_t>(g.time(k)));
    return v;
  };
  const double truth = 0.5 * surv(haz_t[0], 6) + 0.5 * surv(haz_t[1], 6);
  auto mean_se = [&](bool true_t, bool true_c) {
    std::vector<std::vector<double>> ev(n), ce(n);
    for (std::size_t i = 0; i < n; ++i) {
      ev[i] = curve(true_t ? haz_t[type[i]] : wrong_t);
      ce[i] = curve(true_c ? haz_c[type[i]] : wrong_c);
    }
    const auto panel = CurvePanel::from_rows(ds.grid_ptr(), ev, ce, true, 0.0);
    const auto s = dr_scores_survival(ds, make_horizon(ds, h), panel);
    double m = 0.0, sq = 0.0;
    for (double v : s.gamma) {
      m += v;
      sq += v * v;
    }
    m /= static_cast<double>(n);
    return std::pair{m, std::sqrt((sq / static_cast<double>(n) - m * m) / static_cast<double>(n))};
  };
  const auto [m1, se1] = mean_se(false, true);
  const auto [m2, se2] = mean_se(true, false);
  const double z1 = std::abs(m1 - truth) / se1, z2 = std::abs(m2 - truth) / se2;
  const double secs = seconds_since(t0);
  return {z1 < 3.0 && z2 < 3.0 && secs < 60.0,
          "truth " + fmt(truth, 6) + "; wrong S_T: " + fmt(m1, 6) + " (" + fmt(z1, 3) + " SE); wrong S_C: " +
              fmt(m2, 6) + " (" + fmt(z2, 3) + " SE); " + fmt(secs, 3) + " s"};
}

// ---------------------------------------------------------------------------
// 4. Censoring bias of IPCW and DR in settings 1 and 2

Outcome criterion4(Context& ctx) {
  const Profile& p = ctx.profile;
  std::map<int, std::pair<double, double>> med, med_bc; // setting -> (ipcw, dr)
  for (int id : {1, 2}) {
    StudyConfig cfg;
    cfg.setting = DgpSetting::make(id, p.c4_n, 4000 + id);
    cfg.estimands = {EstimandKind::SurvivalProbability};
    cfg.methods = {Method::Ipcw, Method::Dr, Method::Complete};
    cfg.reps = p.c4_reps;
    cfg.forest.num_trees = p.c4_trees;
    cfg.threads = ctx.threads;
    cfg.truth_cache_path = ctx.truth_cache;
    const SimReport r = run_logged(ctx, "criterion4_setting" + std::to_string(id), cfg);
    const auto& ci = r.cell(EstimandKind::SurvivalProbability, Method::Ipcw);
    const auto& cd = r.cell(EstimandKind::SurvivalProbability, Method::Dr);
    med[id] = {ci.censoring_bias.median, cd.censoring_bias.median};
    med_bc[id] = {ci.censoring_bias_bc.median, cd.censoring_bias_bc.median};
  }
  const auto [i1, d1] = med[1];
  const auto [i2, d2] = med[2];
  const bool ok = std::abs(i1) <= 0.01 && std::abs(d1) <= 0.01 && std::abs(i2) >= 2.0 * std::abs(d2) &&
                  std::abs(d2) <= 0.01;
  return {ok, "n = " + std::to_string(p.c4_n) + ", reps = " + std::to_string(p.c4_reps) + ", trees = " +
                  std::to_string(p.c4_trees) +
                  "; median censoring bias setting 1: ipcw " + fmt(i1) + ", dr " + fmt(d1) + "; setting 2: ipcw " +
                  fmt(i2) + ", dr " + fmt(d2) + " (bias-corrected estimates, not gated: setting 1 ipcw " +
                  fmt(med_bc[1].first) + ", dr " + fmt(med_bc[1].second) + "; setting 2 ipcw " + fmt(med_bc[2].first) +
                  ", dr " + fmt(med_bc[2].second) + ")"};
}

// ---------------------------------------------------------------------------
// 5. Coverage and RMSE envelope for DR in settings 1-4

Outcome criterion5(Context& ctx) {
  const Profile& p = ctx.profile;
  const std::map<int, double> rmse_ref{{1, 0.09}, {2, 0.08}, {3, 0.07}, {4, 0.08}};
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  std::ostringstream d;
  d << "n = " << p.c5_n << ", reps = " << p.c5_reps << ", trees = " << p.c5_trees << ", coverage in [" << p.c5_cov_low << ", " << p.c5_cov_high
    << "]" << (p.c5_rmse_gate ? ", rmse(pi) <= 2 x reference" : "");
  for (int id = 1; id <= 4; ++id) {
    StudyConfig cfg;
    cfg.setting = DgpSetting::make(id, p.c5_n, 5000 + id);
    cfg.estimands = {EstimandKind::SurvivalProbability, EstimandKind::Rmst};
    cfg.methods = {Method::Dr};
    cfg.reps = p.c5_reps;
    cfg.forest.num_trees = p.c5_trees;
    cfg.threads = ctx.threads;
    cfg.truth_cache_path = ctx.truth_cache;
    const SimReport r = run_logged(ctx, "criterion5_setting" + std::to_string(id), cfg);
    const auto& cp = r.cell(EstimandKind::SurvivalProbability, Method::Dr);
    const auto& cr = r.cell(EstimandKind::Rmst, Method::Dr);
    for (const CellReport* c : {&cp, &cr}) {
      ok = ok && !c->failure_budget_exceeded && c->coverage >= p.c5_cov_low && c->coverage <= p.c5_cov_high;
    }
    if (p.c5_rmse_gate)
      ok = ok && cp.rmse <= 2.0 * rmse_ref.at(id);
    d << "; setting " << id << ": cov(pi) " << fmt(cp.coverage, 3) << ", cov(rmst) " << fmt(cr.coverage, 3)
      << ", rmse(pi) " << fmt(cp.rmse, 3) << " (bias-corrected " << fmt(cp.rmse_bc, 3) << "), rmse(rmst) "
      << fmt(cr.rmse, 3) << ", failed " << cp.failed + cr.failed;
  }
  const double secs = seconds_since(t0);
  ok = ok && secs < p.c5_max_seconds;
  d << "; " << fmt(secs, 5) << " s";
  return {ok, d.str()};
}

// ---------------------------------------------------------------------------
// 6. rd_core calibration

Outcome criterion6(Context&) {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(606);
  double worst_jump = 0.0, worst_identity = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    RdInput in;
    in.cutoff = 0.5;
    const double a = std::uniform_real_distribution<double>(-2, 2)(rng);
    const double b = std::uniform_real_distribution<double>(-2, 2)(rng);
    const double base = std::uniform_real_distribution<double>(-1, 1)(rng);
    for (int i = 0; i < 500; ++i) {
      const double z = std::uniform_real_distribution<double>(0, 1)(rng);
      in.z.push_back(z);
      in.outcome.push_back(z >= 0.5 ? base + 3.0 + b * (z - 0.5) : base + a * (z - 0.5));
    }
    worst_jump = std::max(worst_jump, std::abs(rd_estimate(in).estimate_bc - 3.0));
  }
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int rep = 0; rep < 1000; ++rep) {
    RdInput in;
    in.cutoff = 0.1 * unif(rng);
    const std::size_t n = 60 + rep % 50;
    for (std::size_t i = 0; i < n; ++i) {
      in.z.push_back(unif(rng));
      in.outcome.push_back(unif(rng));
      if (rep % 2 == 0)
        in.weight.push_back(0.2 + 5.0 * std::abs(unif(rng)));
    }
    const double bw = std::uniform_real_distribution<double>(0.4, 2.0)(rng);
    for (int order : {1, 2})
      for (Side side : {Side::Left, Side::Right}) {
        const LocalFit f = local_poly_fit(in, side, order, bw);
        for (int j = 0; j <= order; ++j) {
          double s = 0.0;
          for (std::size_t i = 0; i < in.size(); ++i)
            s += f.weights[i] * std::pow(in.z[i] - in.cutoff, j);
          worst_identity = std::max(worst_identity, std::abs(s - (j == 0 ? 1.0 : 0.0)));
        }
      }
  }
  const double secs = seconds_since(t0);
  return {worst_jump <= 1e-12 && worst_identity <= 1e-10 && secs < 5.0,
          "max |estimate_bc - 3| = " + fmt(worst_jump, 3) + " over 100 designs; max identity error " +
              fmt(worst_identity, 3) + " over 1000 designs; " + fmt(secs, 3) + " s"};
}

// ---------------------------------------------------------------------------
// 7. Fuzzy consistency

Outcome criterion7(Context&) {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(707);
  bool equal = true;
  for (int rep = 0; rep < 20; ++rep) {
    RdInput y;
    y.cutoff = 0.5;
    std::normal_distribution<double> noise(0.0, 0.5);
    for (int i = 0; i < 800; ++i) {
      const double z = std::uniform_real_distribution<double>(0, 1)(rng);
      y.z.push_back(z);
      y.outcome.push_back(std::sin(3 * z) + 0.4 * (z >= 0.5) + noise(rng));
    }
    RdInput w = y;
    for (std::size_t i = 0; i < w.size(); ++i)
      w.outcome[i] = w.z[i] >= 0.5 ? 1.0 : 0.0;
    equal = equal && fuzzy_estimate(y, w).ratio == rd_estimate(y).estimate_bc;
  }
  std::size_t raised = 0;
  // evenly spread treatment with first-stage jumps of 0.01, 0 and 0.015
  const std::vector<std::pair<double, double>> patterns{{0.30, 0.31}, {0.5, 0.5}, {0.2, 0.215}};
  for (const auto& [left, right] : patterns) {
    RdInput y;
    y.cutoff = 0.5;
    for (int i = 0; i < 20000; ++i) {
      y.z.push_back((i + 0.5) / 20000.0);
      y.outcome.push_back(std::normal_distribution<double>(0.0, 1.0)(rng));
    }
    RdInput w = y;
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double p = w.z[i] >= 0.5 ? right : left;
      w.outcome[i] = std::floor(static_cast<double>(i + 1) * p) - std::floor(static_cast<double>(i) * p);
    }
    try {
      fuzzy_estimate(y, w);
    } catch (const Error& e) {
      raised += e.code() == ErrorCode::WeakIdentification;
    }
  }
  const double secs = seconds_since(t0);
  return {equal && raised == patterns.size() && secs < 5.0,
          std::string("ratio == sharp estimate on 20 designs: ") + (equal ? "yes" : "no") +
              "; WeakIdentification raised " + std::to_string(raised) + "/" + std::to_string(patterns.size()) + "; " +
              fmt(secs, 3) + " s"};
}

// ---------------------------------------------------------------------------
// 8. Determinism across thread counts

std::string serialize(const SimReport& r) {
  std::ostringstream os;
  os << to_json(r).dump(2) << '\n';
  write_per_rep_csv(os, r);
  return os.str();
}

SimReport truncated(SimReport r, std::size_t reps) {
  for (auto& c : r.cells)
    c.per_rep.resize(std::min(reps, c.per_rep.size()));
  return r;
}

Outcome criterion8(Context& ctx) {
  if (ctx.studies.empty())
    return {false, "criteria 4 and 5 were not run"};
  const std::size_t primary = ctx.threads == 0 ? default_thread_count() : ctx.threads;
  const std::size_t alt = primary == 1 ? 3 : 1;
  bool ok = true;
  std::size_t compared = 0;
  std::ostringstream d;
  for (const auto& [tag, cfg] : ctx.studies) {
    StudyConfig c = cfg;
    c.threads = alt;
    c.reps = std::min(cfg.reps, ctx.profile.c8_reps);
    const SimReport again = run_study(c);
    // replication r depends only on (seed, r), so the first reps of the
    // primary run must match the rerun byte for byte
    std::ostringstream a, b;
    write_per_rep_csv(a, truncated(ctx.reports.at(tag), c.reps));
    write_per_rep_csv(b, again);
    if (a.str() != b.str()) {
      ok = false;
      d << tag << " per-rep rows differ; ";
    }
    ++compared;
  }
  // one complete study run twice end to end
  StudyConfig small = ctx.studies.front().second;
  small.reps = ctx.profile.c8_reps;
  small.setting.n = std::min<std::size_t>(small.setting.n, 1000);
  small.threads = primary;
  const std::string one = serialize(run_study(small));
  small.threads = alt;
  const std::string two = serialize(run_study(small));
  if (one != two) {
    ok = false;
    d << "full report differs; ";
  }
  d << compared << " studies rerun with " << alt << " vs " << primary << " threads (" << ctx.profile.c8_reps
    << " reps each), full report of " << one.size() << " bytes identical: " << (one == two ? "yes" : "no");
  return {ok, d.str()};
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria runner"};
  std::string profile = "smoke";
  std::vector<int> only;
  std::size_t threads = 0;
  std::string out_dir;
  app.add_option("--profile", profile, "smoke or full")->check(CLI::IsMember({"smoke", "full"}))->capture_default_str();
  app.add_option("--only", only, "Run only these criteria")->delimiter(',');
  app.add_option("--threads", threads, "Worker threads for the simulation criteria (0 = all)");
  app.add_option("--out-dir", out_dir, "Write simulation reports here");
  CLI11_PARSE(app, argc, argv);

  Context ctx;
  ctx.profile = make_profile(profile);
  ctx.threads = threads;
  ctx.out_dir = out_dir;
  ctx.truth_cache = out_dir.empty() ? (fs::temp_directory_path() / "rdsurv_acceptance_truth.json").string()
                                    : (fs::path(out_dir) / "truth_cache.json").string();
  if (!out_dir.empty())
    fs::create_directories(out_dir);

  const std::vector<std::function<Outcome(Context&)>> criteria{criterion1, criterion2, criterion3, criterion4,
                                                               criterion5, criterion6, criterion7, criterion8};
  std::set<int> selected(only.begin(), only.end());
  if (selected.count(8) && !selected.empty())
    selected.insert({4, 5});
  std::cout << "profile: " << ctx.profile.name << std::endl;
  int failures = 0;
  for (int k = 1; k <= 8; ++k) {
    if (!selected.empty() && !selected.count(k))
      continue;
    Outcome o;
    try {
      o = criteria[k - 1](ctx);
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::cout << "criterion " << k << ": " << (o.pass ? "PASS" : "FAIL") << "  " << o.detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
