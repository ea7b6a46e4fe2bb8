#include "hdsi/simulation.hpp"

#include <cmath>
#include <stdexcept>

#include "hdsi/effects.hpp"
#include "hdsi/multitest.hpp"
#include "hdsi/parallel.hpp"
#include "hdsi/rng.hpp"

namespace hdsi {

Eigen::VectorXd default_theta(int K, int s) {
  if (s < 0 || s > K) throw std::invalid_argument("default_theta: need 0 <= s <= K");
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(K);
  const double magnitudes[3] = {1.0, 0.8, 0.6};
  const int stride = s > 0 ? std::max(1, K / s) : 1;
  for (int j = 0; j < s; ++j) {
    const int idx = std::min(j * stride, K - 1);
    const double sign = (j % 2 == 0) ? 1.0 : -1.0;
    theta[idx] = sign * magnitudes[j % 3];
  }
  return theta;
}

namespace {

Eigen::MatrixXd toeplitz_cholesky(int K, double rho) {
  if (!(rho >= 0.0 && rho < 1.0))
    throw std::runtime_error("generate_dgp: rho must be in [0,1)");
  Eigen::MatrixXd sigma(K, K);
  for (int j = 0; j < K; ++j)
    for (int k = 0; k < K; ++k) sigma(j, k) = std::pow(rho, std::abs(j - k));
  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("generate_dgp: covariance Cholesky failed");
  return llt.matrixL();
}

constexpr std::uint64_t kDgpStream = 0x6467705f73696dULL;
constexpr std::uint64_t kBootStream = 0x626f6f745f73ULL;

}  // namespace

Dataset generate_dgp(const DgpConfig& cfg, int replication) {
  if (cfg.theta.size() != cfg.K)
    throw std::invalid_argument("generate_dgp: theta length must equal K");
  if (!(cfg.sigma2 > 0.0)) throw std::invalid_argument("generate_dgp: sigma2 must be positive");
  const Eigen::MatrixXd L = toeplitz_cholesky(cfg.K, cfg.rho);

  auto rng = substream(cfg.seed, kDgpStream, static_cast<std::uint64_t>(replication));
  std::normal_distribution<double> normal;

  Dataset data;
  data.X.resize(cfg.n, cfg.K);
  data.y.resize(cfg.n);
  Eigen::VectorXd z(cfg.K);
  const double sd = std::sqrt(cfg.sigma2);
  for (int i = 0; i < cfg.n; ++i) {
    for (int k = 0; k < cfg.K; ++k) z[k] = normal(rng);
    data.X.row(i) = (L * z).transpose();
  }
  for (int i = 0; i < cfg.n; ++i)
    data.y[i] = cfg.beta0 + data.X.row(i).dot(cfg.theta) + sd * normal(rng);

  data.column_names.reserve(cfg.K);
  data.target_index.reserve(cfg.K);
  for (int k = 0; k < cfg.K; ++k) {
    data.column_names.push_back("d" + std::to_string(k + 1));
    data.target_index.push_back(k);
  }
  data.validate();
  return data;
}

MethodMetrics aggregate_metrics(const std::vector<std::vector<bool>>& rejections,
                                const std::vector<bool>& truth) {
  const auto R = rejections.size();
  const int K = static_cast<int>(truth.size());
  MethodMetrics m;
  if (R == 0) return m;
  double sum_c = 0, sum_c2 = 0, sum_i = 0, sum_i2 = 0, sum_fdp = 0, fwer_hits = 0;
  for (const auto& rej : rejections) {
    if (static_cast<int>(rej.size()) != K)
      throw std::invalid_argument("aggregate_metrics: shape mismatch");
    int correct = 0, incorrect = 0;
    for (int k = 0; k < K; ++k) {
      if (!rej[k]) continue;
      if (truth[k])
        ++correct;
      else
        ++incorrect;
    }
    const int total = correct + incorrect;
    sum_c += correct;
    sum_c2 += static_cast<double>(correct) * correct;
    sum_i += incorrect;
    sum_i2 += static_cast<double>(incorrect) * incorrect;
    sum_fdp += total > 0 ? static_cast<double>(incorrect) / total : 0.0;
    if (incorrect >= 1) fwer_hits += 1;
  }
  const auto r = static_cast<double>(R);
  m.mean_correct = sum_c / r;
  m.mean_incorrect = sum_i / r;
  m.sd_correct = R > 1 ? std::sqrt(std::max(0.0, (sum_c2 - r * m.mean_correct * m.mean_correct) / (r - 1))) : 0.0;
  m.sd_incorrect = R > 1 ? std::sqrt(std::max(0.0, (sum_i2 - r * m.mean_incorrect * m.mean_incorrect) / (r - 1))) : 0.0;
  m.fwer = fwer_hits / r;
  m.fdr = sum_fdp / r;
  return m;
}

SimulationReport run_study(const DgpConfig& cfg, double alpha, int B, int threads) {
  if (cfg.R < 1) throw std::invalid_argument("run_study: need R >= 1");
  const std::vector<std::string> method_names = {"naive", "BH", "bonferroni",
                                                 "holm", "RW", "jointCI"};
  struct RepResult {
    bool failed = false;
    std::map<std::string, std::vector<bool>> rejections;
  };
  std::vector<RepResult> results(cfg.R);

  PenaltyConfig pen;
  pen.homoscedastic = true;

  parallel_for(static_cast<std::size_t>(cfg.R), threads, [&](std::size_t rep) {
    RepResult& res = results[rep];
    try {
      const Dataset data = generate_dgp(cfg, static_cast<int>(rep));
      const EffectEstimates est = double_select_effects(data, pen);
      const Eigen::VectorXd raw = raw_pvalues(est);
      const std::uint64_t boot_seed =
          splitmix64(splitmix64(cfg.seed ^ kBootStream) + rep);
      const AdjustedPValues rw = adjust_rw(est, B, boot_seed);
      const JointConfidenceRegion ci = joint_confint(est, 1.0 - alpha, B, boot_seed);
      const Eigen::VectorXd bonf = adjust_bonferroni(raw);
      const Eigen::VectorXd holm = adjust_holm(raw);
      const Eigen::VectorXd bh = adjust_bh(raw);
      for (const auto& name : method_names)
        res.rejections[name].resize(cfg.K);
      for (int k = 0; k < cfg.K; ++k) {
        res.rejections["naive"][k] = raw[k] < alpha;
        res.rejections["BH"][k] = bh[k] <= alpha;  // stepup rule uses <=
        res.rejections["bonferroni"][k] = bonf[k] < alpha;
        res.rejections["holm"][k] = holm[k] < alpha;
        res.rejections["RW"][k] = rw.adjusted[k] < alpha;
        res.rejections["jointCI"][k] = ci.lower[k] > 0.0 || ci.upper[k] < 0.0;
      }
    } catch (const std::exception&) {
      res.failed = true;
    }
  });

  std::vector<bool> truth(cfg.K);
  for (int k = 0; k < cfg.K; ++k) truth[k] = cfg.theta[k] != 0.0;

  SimulationReport report;
  report.alpha = alpha;
  report.B = B;
  report.config = cfg;
  for (const auto& res : results)
    if (res.failed) ++report.failures;
  if (report.failures > cfg.R / 20)
    throw std::runtime_error("run_study: more than 5% of replications failed (" +
                             std::to_string(report.failures) + "/" +
                             std::to_string(cfg.R) + ")");
  report.R = cfg.R - report.failures;

  for (const auto& name : method_names) {
    std::vector<std::vector<bool>> rej;
    rej.reserve(report.R);
    for (const auto& res : results)
      if (!res.failed) rej.push_back(res.rejections.at(name));
    report.methods[name] = aggregate_metrics(rej, truth);
  }
  return report;
}

}  // namespace hdsi
