#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hdsi/dataset.hpp"
#include "hdsi/effects.hpp"
#include "hdsi/json_io.hpp"
#include "hdsi/lasso.hpp"
#include "hdsi/multitest.hpp"
#include "hdsi/parallel.hpp"
#include "hdsi/simulation.hpp"
#include "hdsi/stats.hpp"

namespace {

std::string fmt6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

void print_row(const std::string& name, const std::vector<std::string>& cells) {
  std::printf("%-24s", name.c_str());
  for (const auto& c : cells) std::printf(" %12s", c.c_str());
  std::printf("\n");
}

struct GlobalOpts {
  std::optional<std::uint64_t> seed;
  int threads = 0;  // 0: HDSI_THREADS env or 1

  std::uint64_t resolve_seed() {
    if (!seed) {
      std::random_device rd;
      seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
      std::cerr << "seed: " << *seed << "\n";
    }
    return *seed;
  }
  int resolve_threads() const {
    if (threads > 0) return threads;
    if (const char* env = std::getenv("HDSI_THREADS")) {
      const int t = std::atoi(env);
      if (t > 0) return t;
    }
    return 1;
  }
};

struct DataOpts {
  std::string path;
  std::string outcome;
  std::vector<std::string> targets;

  hdsi::Dataset load() const {
    std::vector<std::string> tg = targets;
    if (tg.empty()) tg.push_back("*");  // every regressor is a target
    return hdsi::load_csv(path, outcome, tg);
  }
};

void add_data_opts(CLI::App* cmd, DataOpts& d, bool require) {
  auto* data = cmd->add_option("--data", d.path, "CSV file with one header row");
  auto* outcome = cmd->add_option("--outcome", d.outcome, "outcome column name");
  cmd->add_option("--targets", d.targets,
                  "target column names; a trailing '*' matches as a prefix");
  if (require) {
    data->required();
    outcome->required();
  }
}

nlohmann::json base_manifest(const std::string& subcommand, std::uint64_t seed) {
  nlohmann::json m;
  m["subcommand"] = subcommand;
  m["seed"] = seed;
  m["version"] = hdsi::kVersion;
  return m;
}

void emit(const nlohmann::json& j, const std::string& out_path) {
  if (out_path.empty())
    std::cout << j.dump(2) << "\n";
  else
    hdsi::write_json_file(j, out_path);
}

hdsi::EffectEstimates get_effects(const std::string& effects_file, const DataOpts& data,
                                  const std::string& method, const hdsi::PenaltyConfig& pen,
                                  int threads) {
  if (!effects_file.empty())
    return hdsi::effect_estimates_from_json(hdsi::read_json_file(effects_file));
  if (data.path.empty())
    throw std::runtime_error("provide --effects <json> or --data/--outcome/--targets");
  const hdsi::Dataset ds = data.load();
  if (method == "ols") return hdsi::ols_effects(ds, ds.target_index);
  return hdsi::double_select_effects(ds, pen, threads);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simultaneous inference for high-dimensional linear regression"};
  app.require_subcommand(1);

  GlobalOpts global;
  app.add_option("--seed", global.seed, "master RNG seed (drawn from entropy if absent)");
  app.add_option("--threads", global.threads, "worker threads (or HDSI_THREADS)");

  // --- fit ---
  auto* fit_cmd = app.add_subcommand("fit", "lasso fit with theory-driven penalty");
  DataOpts fit_data;
  add_data_opts(fit_cmd, fit_data, true);
  bool fit_post = true, fit_hetero = false, fit_json = false;
  double fit_alpha = 0.05;
  int fit_B = 1000;
  std::string fit_out;
  fit_cmd->add_option("--post-lasso", fit_post, "refit selected set by least squares");
  fit_cmd->add_option("--hetero", fit_hetero, "heteroscedastic penalty loadings");
  fit_cmd->add_option("--alpha", fit_alpha, "sup-score test level");
  fit_cmd->add_option("--B", fit_B, "sup-score bootstrap repetitions");
  fit_cmd->add_flag("--json", fit_json, "emit JSON instead of a table");
  fit_cmd->add_option("--out", fit_out, "write JSON to file");

  // --- effects ---
  auto* eff_cmd = app.add_subcommand("effects", "double-selection target estimates");
  DataOpts eff_data;
  add_data_opts(eff_cmd, eff_data, true);
  std::string eff_method = "ds";
  bool eff_json = false, eff_scores = false, eff_hetero = false;
  std::string eff_out;
  eff_cmd->add_option("--method", eff_method, "ds|ols")
      ->check(CLI::IsMember({"ds", "ols"}));
  eff_cmd->add_option("--hetero", eff_hetero, "heteroscedastic penalty loadings");
  eff_cmd->add_flag("--json", eff_json, "emit JSON");
  eff_cmd->add_flag("--scores", eff_scores, "include score matrix in JSON");
  eff_cmd->add_option("--out", eff_out, "write JSON to file");

  // --- adjust ---
  auto* adj_cmd = app.add_subcommand("adjust", "multiple-testing p-value adjustment");
  DataOpts adj_data;
  add_data_opts(adj_cmd, adj_data, false);
  std::string adj_effects_file, adj_method = "RW", adj_emethod = "ds", adj_out;
  int adj_B = 1000;
  bool adj_json = false, adj_hetero = false;
  adj_cmd->add_option("--effects", adj_effects_file, "EffectEstimates JSON (with scores for RW)");
  adj_cmd->add_option("--method", adj_method, "none|bonferroni|holm|BH|RW")
      ->check(CLI::IsMember({"none", "bonferroni", "holm", "BH", "RW"}));
  adj_cmd->add_option("--estimator", adj_emethod, "ds|ols when running inline")
      ->check(CLI::IsMember({"ds", "ols"}));
  adj_cmd->add_option("--B", adj_B, "bootstrap repetitions (RW)");
  adj_cmd->add_option("--hetero", adj_hetero, "heteroscedastic penalty loadings");
  adj_cmd->add_flag("--json", adj_json, "emit JSON");
  adj_cmd->add_option("--out", adj_out, "write JSON to file");

  // --- confint ---
  auto* ci_cmd = app.add_subcommand("confint", "joint confidence region");
  DataOpts ci_data;
  add_data_opts(ci_cmd, ci_data, false);
  std::string ci_effects_file, ci_emethod = "ds", ci_out;
  double ci_level = 0.9;
  int ci_B = 1000;
  bool ci_joint = true, ci_json = false, ci_hetero = false;
  ci_cmd->add_option("--effects", ci_effects_file, "EffectEstimates JSON (with scores)");
  ci_cmd->add_option("--level", ci_level, "coverage level");
  ci_cmd->add_option("--joint", ci_joint, "simultaneous region (true) or marginal (false)");
  ci_cmd->add_option("--estimator", ci_emethod, "ds|ols when running inline")
      ->check(CLI::IsMember({"ds", "ols"}));
  ci_cmd->add_option("--B", ci_B, "bootstrap repetitions");
  ci_cmd->add_option("--hetero", ci_hetero, "heteroscedastic penalty loadings");
  ci_cmd->add_flag("--json", ci_json, "emit JSON");
  ci_cmd->add_option("--out", ci_out, "write JSON to file");

  // --- simulate ---
  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo study of the adjustment methods");
  hdsi::DgpConfig dgp;
  int sim_s = 12, sim_B = 500;
  double sim_alpha = 0.1;
  std::string sim_out;
  bool sim_json = false;
  sim_cmd->add_option("--n", dgp.n, "observations per replication");
  sim_cmd->add_option("--K", dgp.K, "number of regressors (all targets)");
  sim_cmd->add_option("--rho", dgp.rho, "Toeplitz correlation");
  sim_cmd->add_option("--sigma2", dgp.sigma2, "noise variance");
  sim_cmd->add_option("--s", sim_s, "number of nonzero coefficients");
  sim_cmd->add_option("--R", dgp.R, "replications");
  sim_cmd->add_option("--alpha", sim_alpha, "significance level / FDR level");
  sim_cmd->add_option("--B", sim_B, "bootstrap repetitions per replication");
  sim_cmd->add_flag("--json", sim_json, "emit JSON");
  sim_cmd->add_option("--out", sim_out, "write report JSON to file");

  CLI11_PARSE(app, argc, argv);

  const auto t0 = std::chrono::steady_clock::now();
  try {
    const int threads = global.resolve_threads();

    if (*fit_cmd) {
      const std::uint64_t seed = global.resolve_seed();
      const hdsi::Dataset data = fit_data.load();
      hdsi::PenaltyConfig pen;
      pen.homoscedastic = !fit_hetero;
      pen.post_lasso = fit_post;
      const hdsi::LassoFit fit = hdsi::fit_lasso(data, pen);
      const hdsi::SupScoreResult ss =
          hdsi::sup_score_test(data, fit_alpha, fit_B, seed, threads);
      if (fit_json || !fit_out.empty()) {
        nlohmann::json manifest = base_manifest("fit", seed);
        manifest["options"] = {{"post_lasso", fit_post}, {"hetero", fit_hetero},
                               {"alpha", fit_alpha},     {"B", fit_B},
                               {"data", fit_data.path},  {"outcome", fit_data.outcome}};
        nlohmann::json payload = hdsi::to_json(fit, data.column_names);
        payload["sup_score"] = hdsi::to_json(ss);
        emit(hdsi::wrap_output("fit", std::move(payload), std::move(manifest)), fit_out);
      } else {
        std::printf("Post-Lasso Estimation:  %s\n\n", fit.post_lasso ? "TRUE" : "FALSE");
        std::printf("Total number of variables: %d\n", data.p());
        std::printf("Number of selected variables: %zu\n\n", fit.selected.size());
        print_row("", {"Estimate"});
        print_row("(Intercept)", {fmt6(fit.intercept)});
        for (int j : fit.selected)
          print_row(data.column_names[j], {fmt6(fit.coefficients[j])});
        std::printf("\nR-squared: %s\n", fmt6(fit.r2).c_str());
        std::printf("Sup-score test: statistic = %s, p-value = %s (B = %d)\n",
                    fmt6(ss.statistic).c_str(), fmt6(ss.p_value).c_str(), ss.B);
        for (const auto& w : fit.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
      }
    } else if (*eff_cmd) {
      const std::uint64_t seed = global.resolve_seed();
      const hdsi::Dataset data = eff_data.load();
      hdsi::PenaltyConfig pen;
      pen.homoscedastic = !eff_hetero;
      const hdsi::EffectEstimates est =
          eff_method == "ols" ? hdsi::ols_effects(data, data.target_index)
                              : hdsi::double_select_effects(data, pen, threads);
      const Eigen::VectorXd p = hdsi::raw_pvalues(est);
      if (eff_json || !eff_out.empty()) {
        nlohmann::json manifest = base_manifest("effects", seed);
        manifest["options"] = {{"method", eff_method},     {"hetero", eff_hetero},
                               {"data", eff_data.path},    {"outcome", eff_data.outcome},
                               {"targets", eff_data.targets}};
        emit(hdsi::wrap_output("effects", hdsi::to_json(est, eff_scores), std::move(manifest)),
             eff_out);
      } else {
        print_row("", {"Estimate", "Std. Error", "t value", "Pr(>|t|)"});
        for (int k = 0; k < est.K(); ++k)
          print_row(est.names[k], {fmt6(est.theta_hat[k]), fmt6(est.std_err[k]),
                                   fmt6(est.t_stat[k]), fmt6(p[k])});
        for (const auto& w : est.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
      }
    } else if (*adj_cmd) {
      const std::uint64_t seed = global.resolve_seed();
      hdsi::PenaltyConfig pen;
      pen.homoscedastic = !adj_hetero;
      const hdsi::EffectEstimates est =
          get_effects(adj_effects_file, adj_data, adj_emethod, pen, threads);
      const hdsi::AdjustedPValues adj =
          hdsi::adjust_pvalues(est, adj_method, adj_B, seed, threads);
      if (adj_json || !adj_out.empty()) {
        nlohmann::json manifest = base_manifest("adjust", seed);
        manifest["options"] = {{"method", adj_method}, {"B", adj_B}};
        emit(hdsi::wrap_output("adjust", hdsi::to_json(adj, est), std::move(manifest)), adj_out);
      } else {
        print_row("", {"Estimate.", "pval"});
        for (int k = 0; k < est.K(); ++k)
          print_row(est.names[k], {fmt6(est.theta_hat[k]), fmt6(adj.adjusted[k])});
      }
    } else if (*ci_cmd) {
      const std::uint64_t seed = global.resolve_seed();
      hdsi::PenaltyConfig pen;
      pen.homoscedastic = !ci_hetero;
      const hdsi::EffectEstimates est =
          get_effects(ci_effects_file, ci_data, ci_emethod, pen, threads);
      hdsi::JointConfidenceRegion region;
      if (ci_joint) {
        region = hdsi::joint_confint(est, ci_level, ci_B, seed, threads);
      } else {
        // marginal normal intervals share the JSON shape
        region.level = ci_level;
        region.B = 0;
        region.seed = seed;
        region.critical = hdsi::normal_quantile(0.5 + ci_level / 2.0);
        region.lower = est.theta_hat - region.critical * est.std_err;
        region.upper = est.theta_hat + region.critical * est.std_err;
      }
      if (ci_json || !ci_out.empty()) {
        nlohmann::json manifest = base_manifest("confint", seed);
        manifest["options"] = {{"level", ci_level}, {"joint", ci_joint}, {"B", ci_B}};
        emit(hdsi::wrap_output("confint", hdsi::to_json(region, est), std::move(manifest)),
             ci_out);
      } else {
        print_row("", {"lower", "upper"});
        for (int k = 0; k < est.K(); ++k)
          print_row(est.names[k], {fmt6(region.lower[k]), fmt6(region.upper[k])});
      }
    } else if (*sim_cmd) {
      dgp.seed = global.resolve_seed();
      dgp.theta = hdsi::default_theta(dgp.K, sim_s);
      const hdsi::SimulationReport report = hdsi::run_study(dgp, sim_alpha, sim_B, threads);
      nlohmann::json manifest = base_manifest("simulate", dgp.seed);
      manifest["options"] = {{"n", dgp.n},   {"K", dgp.K},        {"rho", dgp.rho},
                             {"sigma2", dgp.sigma2}, {"s", sim_s}, {"R", dgp.R},
                             {"alpha", sim_alpha},   {"B", sim_B}};
      const nlohmann::json out =
          hdsi::wrap_output("report", hdsi::to_json(report), std::move(manifest));
      if (!sim_out.empty()) hdsi::write_json_file(out, sim_out);
      if (sim_json && sim_out.empty()) {
        std::cout << out.dump(2) << "\n";
      } else {
        print_row("method", {"correct", "incorrect", "FWER", "FDR"});
        for (const auto& [name, m] : report.methods)
          print_row(name, {fmt6(m.mean_correct), fmt6(m.mean_incorrect), fmt6(m.fwer),
                           fmt6(m.fdr)});
        if (report.failures > 0)
          std::fprintf(stderr, "warning: %d replication(s) failed and were excluded\n",
                       report.failures);
      }
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  const auto dt = std::chrono::duration_cast<std::chrono::milliseconds>(
      std::chrono::steady_clock::now() - t0);
  std::fprintf(stderr, "elapsed: %lld ms\n", static_cast<long long>(dt.count()));
  return 0;
}
