// rdsurv command-line tool: estimate, simulate, diagnose, curves.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rdsurv.hpp"

namespace {

using rdsurv::Json;

struct ForestFlags {
  std::size_t trees = 500;
  std::size_t mtry = 0;
  std::size_t min_node = 15;
  double subsample = 0.5;
  double censor_floor = 0.05;
  std::size_t threads = 0;

  void add(CLI::App* app) {
    app->add_option("--trees", trees, "Trees per forest")->capture_default_str();
    app->add_option("--mtry", mtry, "Features tried per split (0 = ceil(sqrt(d + 1)))")->capture_default_str();
    app->add_option("--min-node", min_node, "Minimum units per leaf")->capture_default_str();
    app->add_option("--subsample", subsample, "Subsample fraction per tree")->capture_default_str();
    app->add_option("--censor-floor", censor_floor, "Clamp for censoring survival")->capture_default_str();
    app->add_option("--threads", threads, "Worker threads (0 = RDSURV_THREADS or all cores)")->capture_default_str();
  }

  rdsurv::ForestConfig config(std::uint64_t seed) const {
    rdsurv::ForestConfig c;
    c.num_trees = trees;
    c.mtry = mtry;
    c.min_node_size = min_node;
    c.subsample_fraction = subsample;
    c.censor_floor = censor_floor;
    c.threads = threads;
    c.seed = seed;
    return c;
  }
};

struct DataFlags {
  std::string input;
  std::string design = "sharp";
  double cutoff = 0.5;
  double bin_width = 0.0;

  void add(CLI::App* app) {
    app->add_option("--input,-i", input, "Input CSV (time,event,z,x1..xd[,w])")->required();
    app->add_option("--design", design, "sharp or fuzzy")
        ->check(CLI::IsMember({"sharp", "fuzzy"}))
        ->capture_default_str();
    app->add_option("--cutoff", cutoff, "Cutoff on the running variable")->capture_default_str();
    app->add_option("--bin-width", bin_width, "Coarsen times up to multiples of this width (0 = off)")
        ->capture_default_str();
  }

  rdsurv::SurvivalDataset load() const {
    const rdsurv::RawTable raw = rdsurv::read_csv(input);
    rdsurv::DatasetOptions opt;
    opt.bin_width = bin_width;
    return rdsurv::validate_dataset(raw, cutoff, design == "fuzzy" ? rdsurv::Design::Fuzzy : rdsurv::Design::Sharp,
                                    opt);
  }

  Json echo() const {
    return Json{{"input", input}, {"design", design}, {"cutoff", cutoff}, {"bin_width", bin_width}};
  }
};

Json echo(const ForestFlags& f) {
  return Json{{"trees", f.trees},           {"mtry", f.mtry},
              {"min_node", f.min_node},     {"subsample", f.subsample},
              {"censor_floor", f.censor_floor}};
}

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 0.5))
    throw rdsurv::Error(rdsurv::ErrorCode::InvalidArgument, "alpha must lie in (0, 0.5)");
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw rdsurv::Error(rdsurv::ErrorCode::Io, "cannot write '" + path + "'");
  out << text;
}

template <class Writer>
void write_csv(const std::string& path, Writer&& w) {
  if (path.empty())
    return;
  std::ostringstream os;
  w(os);
  write_text(path, os.str());
}

void log_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings)
    std::cerr << "warning: " << w << '\n';
}

Json result_envelope(const std::string& command, Json result, const std::vector<std::string>& warnings,
                     Json config_echo) {
  Json j;
  j["schema_version"] = rdsurv::kSchemaVersion;
  j["command"] = command;
  j["result"] = std::move(result);
  j["warnings"] = warnings;
  j["config_echo"] = std::move(config_echo);
  return j;
}

// ---------------------------------------------------------------------------

struct EstimateCmd {
  DataFlags data;
  ForestFlags forest;
  std::string estimand = "survival_probability";
  double horizon = 0.0;
  std::string method = "dr";
  double alpha = 0.05;
  double bias_ratio = 1.0;
  std::optional<double> bandwidth;
  double positivity_threshold = 0.05;
  std::uint64_t seed = 42;
  std::string output;
  std::string scores_csv;
  std::string curves_csv;

  void add(CLI::App* app) {
    data.add(app);
    forest.add(app);
    app->add_option("--estimand", estimand, "survival_probability or rmst")->capture_default_str();
    app->add_option("--horizon", horizon, "Horizon h")->required();
    app->add_option("--method", method, "dr, ipcw or naive")
        ->check(CLI::IsMember({"dr", "ipcw", "naive"}))
        ->capture_default_str();
    app->add_option("--alpha", alpha, "Confidence level is 1 - alpha")->capture_default_str();
    app->add_option("--bias-ratio", bias_ratio, "Bias-correction bandwidth b / h")->capture_default_str();
    app->add_option("--bandwidth", bandwidth, "Fix the main bandwidth h");
    app->add_option("--positivity-threshold", positivity_threshold, "Flag units with P(uncensored) at or below")
        ->capture_default_str();
    app->add_option("--seed", seed, "Forest seed")->capture_default_str();
    app->add_option("--output,-o", output, "JSON output path (default stdout)");
    app->add_option("--scores-csv", scores_csv, "Write per-unit DR scores");
    app->add_option("--curves-csv", curves_csv, "Write per-unit OOB curves");
  }

  int run() const {
    check_alpha(alpha);
    const rdsurv::SurvivalDataset ds = data.load();
    rdsurv::PipelineConfig cfg;
    cfg.estimand = rdsurv::parse_estimand(estimand);
    cfg.horizon = horizon;
    cfg.method = rdsurv::parse_method(method);
    cfg.forest = forest.config(seed);
    cfg.rd.rd.alpha = alpha;
    cfg.rd.rd.bias_ratio = bias_ratio;
    cfg.rd.rd.bandwidth = bandwidth;
    rdsurv::PipelineResult res = rdsurv::run_pipeline(ds, cfg);

    const rdsurv::RdFit& main = res.sharp ? *res.sharp : res.fuzzy->itt;
    Json result = res.sharp ? rdsurv::to_json(*res.sharp) : rdsurv::to_json(*res.fuzzy);
    result["estimand"] = rdsurv::to_string(cfg.estimand);
    result["horizon"] = res.estimand.horizon.h;
    result["method"] = rdsurv::to_string(cfg.method);
    result["design"] = data.design;
    result["n"] = ds.size();
    result["censored"] = ds.censored_count();
    if (res.panel) {
      const auto pos =
          rdsurv::positivity_diagnostic(ds, res.estimand.horizon, *res.panel, main.bandwidth_h, positivity_threshold);
      result["positivity"] = rdsurv::positivity_summary(pos);
      if (pos.flagged > 0) {
        std::ostringstream w;
        w << "positivity: " << pos.flagged << " unit(s) with P(uncensored) <= " << pos.threshold << "; share near cutoff "
          << rdsurv::format_number(pos.share_flagged_near_cutoff);
        res.warnings.push_back(w.str());
      }
      write_csv(curves_csv, [&](std::ostream& os) { rdsurv::write_curves_csv(os, *res.panel); });
    }
    if (res.scores)
      write_csv(scores_csv, [&](std::ostream& os) { rdsurv::write_scores_csv(os, ds, *res.scores); });

    Json cfg_echo = data.echo();
    cfg_echo["estimand"] = estimand;
    cfg_echo["horizon"] = horizon;
    cfg_echo["method"] = method;
    cfg_echo["alpha"] = alpha;
    cfg_echo["bias_ratio"] = bias_ratio;
    cfg_echo["bandwidth"] = bandwidth ? Json(*bandwidth) : Json(nullptr);
    cfg_echo["seed"] = seed;
    cfg_echo["forest"] = echo(forest);
    log_warnings(res.warnings);
    write_text(output, result_envelope("estimate", std::move(result), res.warnings, std::move(cfg_echo)).dump(2) + "\n");
    return 0;
  }
};

struct SimulateCmd {
  int setting = 1;
  std::size_t n = 5000;
  std::size_t reps = 100;
  std::uint64_t seed = 1;
  std::optional<double> horizon;
  std::vector<std::string> estimands{"survival_probability"};
  std::vector<std::string> methods{"dr"};
  ForestFlags forest;
  double alpha = 0.05;
  std::size_t oracle_draws = 10'000'000;
  std::uint64_t oracle_seed = 20240601;
  std::string truth_cache;
  std::string output;
  std::string per_rep_csv;

  SimulateCmd() { forest.trees = 200; }

  void add(CLI::App* app) {
    app->add_option("--setting", setting, "Simulation setting 1-4")->required();
    app->add_option("--n", n, "Units per replication")->capture_default_str();
    app->add_option("--reps", reps, "Replications")->capture_default_str();
    app->add_option("--seed", seed, "Study seed")->capture_default_str();
    app->add_option("--horizon", horizon, "Override the setting's horizon");
    app->add_option("--estimand", estimands, "survival_probability and/or rmst")->delimiter(',');
    app->add_option("--method", methods, "dr, ipcw, naive and/or complete")->delimiter(',');
    forest.add(app);
    app->add_option("--alpha", alpha, "Confidence level is 1 - alpha")->capture_default_str();
    app->add_option("--oracle-draws", oracle_draws, "Monte Carlo draws for the true effect")->capture_default_str();
    app->add_option("--oracle-seed", oracle_seed, "Seed for the true-effect draws")->capture_default_str();
    app->add_option("--truth-cache", truth_cache, "JSON sidecar caching true effects");
    app->add_option("--output,-o", output, "JSON output path (default stdout)");
    app->add_option("--per-rep-csv", per_rep_csv, "Write per-replication results");
  }

  int run() const {
    check_alpha(alpha);
    rdsurv::StudyConfig cfg;
    cfg.setting = rdsurv::DgpSetting::make(setting, n, seed);
    if (horizon)
      cfg.setting.horizon = *horizon;
    cfg.estimands.clear();
    for (const auto& e : estimands)
      cfg.estimands.push_back(rdsurv::parse_estimand(e));
    cfg.methods.clear();
    for (const auto& m : methods)
      cfg.methods.push_back(rdsurv::parse_method(m));
    cfg.reps = reps;
    cfg.forest = forest.config(seed);
    cfg.threads = forest.threads;
    cfg.rd.rd.alpha = alpha;
    cfg.oracle_draws = oracle_draws;
    cfg.oracle_seed = oracle_seed;
    cfg.truth_cache_path = truth_cache;
    const rdsurv::SimReport report = rdsurv::run_study(cfg);

    std::vector<std::string> warnings;
    for (const auto& c : report.cells) {
      if (c.failed > 0)
        warnings.push_back(rdsurv::to_string(c.estimand) + "/" + rdsurv::to_string(c.method) + ": " +
                           std::to_string(c.failed) + " of " + std::to_string(c.reps) + " replication(s) failed");
      if (c.failure_budget_exceeded)
        warnings.push_back(rdsurv::to_string(c.estimand) + "/" + rdsurv::to_string(c.method) +
                           ": failure share above 5%; cell marked failed");
    }
    Json cfg_echo{{"setting", setting},         {"n", n},
                  {"reps", reps},               {"seed", seed},
                  {"horizon", cfg.setting.horizon}, {"estimands", estimands},
                  {"methods", methods},         {"alpha", alpha},
                  {"oracle_draws", oracle_draws}, {"oracle_seed", oracle_seed},
                  {"forest", echo(forest)}};
    write_csv(per_rep_csv, [&](std::ostream& os) { rdsurv::write_per_rep_csv(os, report); });
    log_warnings(warnings);
    write_text(output, result_envelope("simulate", rdsurv::to_json(report), warnings, std::move(cfg_echo)).dump(2) + "\n");
    return 0;
  }
};

struct DiagnoseCmd {
  DataFlags data;
  ForestFlags forest;
  double horizon = 0.0;
  std::string split;
  std::optional<double> split_threshold;
  double threshold = 0.05;
  std::optional<double> bandwidth;
  std::size_t bins = 20;
  std::uint64_t seed = 42;
  std::string output;
  std::string positivity_csv;
  std::string histogram_csv;

  void add(CLI::App* app) {
    data.add(app);
    forest.add(app);
    app->add_option("--horizon", horizon, "Horizon h")->required();
    app->add_option("--split", split, "Covariate for the log-rank split (x1..xd, z or w)");
    app->add_option("--split-threshold", split_threshold, "Group 1 is value > threshold (default median)");
    app->add_option("--threshold", threshold, "Positivity flag threshold")->capture_default_str();
    app->add_option("--bandwidth", bandwidth, "Near-cutoff window (default: selected on DR scores)");
    app->add_option("--bins", bins, "Histogram bins")->capture_default_str();
    app->add_option("--seed", seed, "Forest seed")->capture_default_str();
    app->add_option("--output,-o", output, "JSON output path (default stdout)");
    app->add_option("--positivity-csv", positivity_csv, "Write per-unit positivity series");
    app->add_option("--histogram-csv", histogram_csv, "Write event/censoring histogram");
  }

  int run() const {
    const rdsurv::SurvivalDataset ds = data.load();
    const rdsurv::Horizon hz = rdsurv::make_horizon(ds, horizon);
    const rdsurv::ForestConfig fc = forest.config(seed);
    const rdsurv::CurvePanel panel = rdsurv::fit_oob_panel(ds, fc);
    std::vector<std::string> warnings = panel.meta.warnings;

    double bw;
    if (bandwidth) {
      bw = *bandwidth;
    } else {
      const rdsurv::DrScores s = rdsurv::dr_scores(ds, {rdsurv::EstimandKind::SurvivalProbability, hz}, panel);
      bw = rdsurv::select_bandwidth(rdsurv::rd_input_from(ds, s.gamma)).h;
    }
    const auto pos = rdsurv::positivity_diagnostic(ds, hz, panel, bw, threshold);
    const auto hist = rdsurv::event_censor_histogram(ds, bins);

    Json result;
    result["positivity"] = rdsurv::positivity_summary(pos);
    result["histogram"] = rdsurv::to_json(hist);
    if (!split.empty())
      result["logrank"] = rdsurv::to_json(rdsurv::logrank_diagnostic(ds, {split, split_threshold}));
    if (pos.flagged > 0)
      warnings.push_back("positivity: " + std::to_string(pos.flagged) + " unit(s) with P(uncensored) <= " +
                         rdsurv::format_number(threshold));

    write_csv(positivity_csv, [&](std::ostream& os) { rdsurv::write_positivity_csv(os, pos); });
    write_csv(histogram_csv, [&](std::ostream& os) { rdsurv::write_histogram_csv(os, hist); });

    Json cfg_echo = data.echo();
    cfg_echo["horizon"] = horizon;
    cfg_echo["split"] = split;
    cfg_echo["split_threshold"] = split_threshold ? Json(*split_threshold) : Json(nullptr);
    cfg_echo["threshold"] = threshold;
    cfg_echo["bins"] = bins;
    cfg_echo["seed"] = seed;
    cfg_echo["forest"] = echo(forest);
    log_warnings(warnings);
    write_text(output, result_envelope("diagnose", std::move(result), warnings, std::move(cfg_echo)).dump(2) + "\n");
    return 0;
  }
};

struct CurvesCmd {
  DataFlags data;
  ForestFlags forest;
  std::uint64_t seed = 42;
  std::string output;

  void add(CLI::App* app) {
    data.add(app);
    forest.add(app);
    app->add_option("--seed", seed, "Forest seed")->capture_default_str();
    app->add_option("--output,-o", output, "CSV output path (default stdout)");
  }

  int run() const {
    const rdsurv::SurvivalDataset ds = data.load();
    const rdsurv::CurvePanel panel = rdsurv::fit_oob_panel(ds, forest.config(seed));
    log_warnings(panel.meta.warnings);
    std::ostringstream os;
    rdsurv::write_curves_csv(os, panel);
    write_text(output.empty() ? "-" : output, os.str());
    return 0;
  }
};

int report_error(const rdsurv::Error& e) {
  std::cerr << "error: " << e.what() << '\n';
  std::cout << rdsurv::error_json(e).dump() << '\n';
  return rdsurv::exit_code(e.category());
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Censoring-adjusted regression discontinuity for survival outcomes"};
  app.set_config("--config", "", "Key/value config file; flags override it");
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for all subcommands");

  EstimateCmd estimate;
  SimulateCmd simulate;
  DiagnoseCmd diagnose;
  CurvesCmd curves;
  auto* c_est = app.add_subcommand("estimate", "Estimate an RD effect on a survival outcome");
  auto* c_sim = app.add_subcommand("simulate", "Run a Monte Carlo study on a built-in setting");
  auto* c_dia = app.add_subcommand("diagnose", "Positivity, histograms and log-rank tests");
  auto* c_cur = app.add_subcommand("curves", "Write out-of-bag event and censoring curves");
  estimate.add(c_est);
  simulate.add(c_sim);
  diagnose.add(c_dia);
  curves.add(c_cur);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    const rdsurv::Error err(rdsurv::ErrorCode::InvalidArgument, e.what());
    std::cout << rdsurv::error_json(err).dump() << '\n';
    return 2;
  }

  try {
    if (c_est->parsed())
      return estimate.run();
    if (c_sim->parsed())
      return simulate.run();
    if (c_dia->parsed())
      return diagnose.run();
    if (c_cur->parsed())
      return curves.run();
  } catch (const rdsurv::Error& e) {
    return report_error(e);
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
