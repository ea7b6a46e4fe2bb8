#include "hdsi/json_io.hpp"

#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace hdsi {

namespace {

nlohmann::json vec_to_json(const Eigen::VectorXd& v) {
  nlohmann::json a = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Eigen::VectorXd vec_from_json(const nlohmann::json& a) {
  Eigen::VectorXd v(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) v[static_cast<Eigen::Index>(i)] = a[i].get<double>();
  return v;
}

nlohmann::json mat_to_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

nlohmann::json to_json(const LassoFit& fit, const std::vector<std::string>& names) {
  nlohmann::json j;
  j["intercept"] = fit.intercept;
  j["coefficients"] = vec_to_json(fit.coefficients);
  j["names"] = names;
  j["selected"] = fit.selected;
  j["lambda"] = fit.lambda;
  j["loadings"] = vec_to_json(fit.loadings);
  j["post_lasso"] = fit.post_lasso;
  j["r2"] = fit.r2;
  j["warnings"] = fit.warnings;
  return j;
}

nlohmann::json to_json(const SupScoreResult& res) {
  nlohmann::json j;
  j["statistic"] = res.statistic;
  j["critical_value"] = res.critical_value;
  j["p_value"] = res.p_value;
  j["B"] = res.B;
  j["alpha"] = res.alpha;
  j["reject"] = res.reject();
  return j;
}

nlohmann::json to_json(const EffectEstimates& est, bool include_scores) {
  nlohmann::json j;
  j["theta_hat"] = vec_to_json(est.theta_hat);
  j["std_err"] = vec_to_json(est.std_err);
  j["t_stat"] = vec_to_json(est.t_stat);
  j["names"] = est.names;
  j["n"] = est.n;
  j["selected_union"] = est.selected_union;
  j["warnings"] = est.warnings;
  if (include_scores) j["scores"] = mat_to_json(est.scores);
  return j;
}

nlohmann::json to_json(const AdjustedPValues& adj, const EffectEstimates& est) {
  nlohmann::json j;
  j["method"] = adj.method;
  j["names"] = est.names;
  j["estimate"] = vec_to_json(est.theta_hat);
  j["raw"] = vec_to_json(adj.raw);
  j["adjusted"] = vec_to_json(adj.adjusted);
  if (adj.method == "RW") {
    j["B"] = adj.B;
    j["seed"] = adj.seed;
  }
  return j;
}

nlohmann::json to_json(const JointConfidenceRegion& region, const EffectEstimates& est) {
  nlohmann::json j;
  j["names"] = est.names;
  j["estimate"] = vec_to_json(est.theta_hat);
  j["lower"] = vec_to_json(region.lower);
  j["upper"] = vec_to_json(region.upper);
  j["level"] = region.level;
  j["critical"] = region.critical;
  j["B"] = region.B;
  j["seed"] = region.seed;
  return j;
}

nlohmann::json to_json(const SimulationReport& report) {
  nlohmann::json j;
  j["alpha"] = report.alpha;
  j["R"] = report.R;
  j["B"] = report.B;
  j["failures"] = report.failures;
  nlohmann::json cfg;
  cfg["n"] = report.config.n;
  cfg["K"] = report.config.K;
  cfg["rho"] = report.config.rho;
  cfg["sigma2"] = report.config.sigma2;
  cfg["beta0"] = report.config.beta0;
  cfg["seed"] = report.config.seed;
  cfg["R"] = report.config.R;
  cfg["theta"] = vec_to_json(report.config.theta);
  j["config"] = std::move(cfg);
  nlohmann::json methods;
  for (const auto& [name, m] : report.methods) {
    nlohmann::json mj;
    mj["mean_correct"] = m.mean_correct;
    mj["sd_correct"] = m.sd_correct;
    mj["mean_incorrect"] = m.mean_incorrect;
    mj["sd_incorrect"] = m.sd_incorrect;
    mj["FWER"] = m.fwer;
    mj["FDR"] = m.fdr;
    methods[name] = std::move(mj);
  }
  j["methods"] = std::move(methods);
  return j;
}

EffectEstimates effect_estimates_from_json(const nlohmann::json& root) {
  const nlohmann::json& j = root.contains("effects") ? root.at("effects") : root;
  EffectEstimates est;
  est.theta_hat = vec_from_json(j.at("theta_hat"));
  est.std_err = vec_from_json(j.at("std_err"));
  est.t_stat = vec_from_json(j.at("t_stat"));
  est.names = j.at("names").get<std::vector<std::string>>();
  est.n = j.at("n").get<int>();
  if (j.contains("selected_union"))
    est.selected_union = j.at("selected_union").get<std::vector<int>>();
  if (j.contains("scores")) {
    const auto& rows = j.at("scores");
    est.scores.resize(est.n, est.theta_hat.size());
    if (static_cast<int>(rows.size()) != est.n)
      throw std::runtime_error("effects JSON: scores row count does not match n");
    for (int i = 0; i < est.n; ++i)
      for (int k = 0; k < est.K(); ++k) est.scores(i, k) = rows[i][k].get<double>();
  }
  return est;
}

nlohmann::json wrap_output(const std::string& key, nlohmann::json payload,
                           nlohmann::json manifest) {
  nlohmann::json j;
  j["schema"] = kSchemaVersion;
  j["manifest"] = std::move(manifest);
  j[key] = std::move(payload);
  return j;
}

void write_json_file(const nlohmann::json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
  out << j.dump(2) << '\n';
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open input file '" + path + "'");
  return nlohmann::json::parse(in);
}

}  // namespace hdsi
