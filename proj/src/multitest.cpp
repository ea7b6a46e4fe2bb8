#include "hdsi/multitest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "hdsi/parallel.hpp"
#include "hdsi/rng.hpp"
#include "hdsi/stats.hpp"

namespace hdsi {

namespace {

void check_probs(const Eigen::VectorXd& p) {
  for (Eigen::Index k = 0; k < p.size(); ++k)
    if (!(p[k] >= 0.0 && p[k] <= 1.0))
      throw std::invalid_argument("p-value adjustment: entry outside [0,1]");
}

std::vector<int> order_ascending(const Eigen::VectorXd& v) {
  std::vector<int> ord(v.size());
  std::iota(ord.begin(), ord.end(), 0);
  std::stable_sort(ord.begin(), ord.end(), [&](int a, int b) { return v[a] < v[b]; });
  return ord;
}

}  // namespace

Eigen::VectorXd raw_pvalues(const EffectEstimates& est) {
  Eigen::VectorXd p(est.K());
  for (int k = 0; k < est.K(); ++k) p[k] = two_sided_pvalue(est.t_stat[k]);
  return p;
}

Eigen::VectorXd adjust_bonferroni(const Eigen::VectorXd& p) {
  check_probs(p);
  const auto K = static_cast<double>(p.size());
  return (p * K).cwiseMin(1.0);
}

Eigen::VectorXd adjust_holm(const Eigen::VectorXd& p) {
  check_probs(p);
  const int K = static_cast<int>(p.size());
  const auto ord = order_ascending(p);
  Eigen::VectorXd adj(K);
  double running = 0.0;
  for (int j = 0; j < K; ++j) {
    const double q = std::min(static_cast<double>(K - j) * p[ord[j]], 1.0);
    running = std::max(running, q);
    adj[ord[j]] = running;
  }
  return adj;
}

Eigen::VectorXd adjust_bh(const Eigen::VectorXd& p) {
  check_probs(p);
  const int K = static_cast<int>(p.size());
  const auto ord = order_ascending(p);
  Eigen::VectorXd adj(K);
  double running = 1.0;
  for (int j = K - 1; j >= 0; --j) {
    const double q = std::min(static_cast<double>(K) * p[ord[j]] / (j + 1), 1.0);
    running = std::min(running, q);
    adj[ord[j]] = running;
  }
  return adj;
}

Eigen::MatrixXd bootstrap_tstats(const EffectEstimates& est, const Eigen::MatrixXd& G) {
  const int n = est.n;
  const int K = est.K();
  if (G.rows() != n) throw std::invalid_argument("bootstrap_tstats: multiplier shape mismatch");
  Eigen::VectorXd sigma(K);
  for (int k = 0; k < K; ++k) {
    sigma[k] = std::sqrt(est.scores.col(k).squaredNorm() / n);
    if (!(sigma[k] > 0.0))
      throw std::runtime_error("multiplier_bootstrap: zero score variance for target '" +
                               est.names[k] + "'");
  }
  // t*_{b,k} = (scores' g_b)_k / (sqrt(n) sigma_k)
  Eigen::MatrixXd T = (est.scores.transpose() * G).transpose() /
                      std::sqrt(static_cast<double>(n));
  T.array().rowwise() /= sigma.transpose().array();
  return T;
}

BootstrapDraws multiplier_bootstrap(const EffectEstimates& est, int B,
                                    std::uint64_t seed, int threads) {
  if (B < 100) throw std::invalid_argument("multiplier_bootstrap: need B >= 100");
  if (est.scores.size() == 0) throw std::invalid_argument("multiplier_bootstrap: scores missing");
  const int n = est.n;
  Eigen::MatrixXd G(n, B);
  parallel_for(static_cast<std::size_t>(B), threads, [&](std::size_t b) {
    auto rng = substream(seed, b);
    std::normal_distribution<double> normal;
    for (int i = 0; i < n; ++i) G(i, static_cast<int>(b)) = normal(rng);
  });
  BootstrapDraws draws;
  draws.B = B;
  draws.seed = seed;
  draws.t_star = bootstrap_tstats(est, G);
  return draws;
}

Eigen::VectorXd rw_adjust_from_draws(const Eigen::VectorXd& t_stat,
                                     const Eigen::MatrixXd& t_star) {
  const int K = static_cast<int>(t_stat.size());
  const int B = static_cast<int>(t_star.rows());
  if (t_star.cols() != K) throw std::invalid_argument("rw_adjust_from_draws: shape mismatch");

  // step 1: |t| descending, ties broken by original index
  std::vector<int> ord(K);
  std::iota(ord.begin(), ord.end(), 0);
  std::stable_sort(ord.begin(), ord.end(), [&](int a, int b) {
    return std::abs(t_stat[a]) > std::abs(t_stat[b]);
  });

  // steps 3-4: tail maxima per draw, counted against |t_(k)|
  Eigen::VectorXd adj(K);
  std::vector<double> tail_max(B, -std::numeric_limits<double>::infinity());
  Eigen::VectorXd init(K);
  for (int r = K - 1; r >= 0; --r) {
    const int k = ord[r];
    int count = 0;
    for (int b = 0; b < B; ++b) {
      tail_max[b] = std::max(tail_max[b], std::abs(t_star(b, k)));
      if (tail_max[b] >= std::abs(t_stat[k])) ++count;
    }
    init[r] = static_cast<double>(count) / B;
  }
  // step 5: enforce monotonicity down the sorted order
  double running = 0.0;
  for (int r = 0; r < K; ++r) {
    running = std::max(running, init[r]);
    adj[ord[r]] = running;
  }
  return adj;
}

AdjustedPValues adjust_rw(const EffectEstimates& est, int B, std::uint64_t seed,
                          int threads) {
  const BootstrapDraws draws = multiplier_bootstrap(est, B, seed, threads);
  AdjustedPValues out;
  out.method = "RW";
  out.B = B;
  out.seed = seed;
  out.raw = raw_pvalues(est);
  out.adjusted = rw_adjust_from_draws(est.t_stat, draws.t_star);
  return out;
}

JointConfidenceRegion joint_confint(const EffectEstimates& est, double level,
                                    int B, std::uint64_t seed, int threads) {
  if (!(level > 0.5 && level < 1.0))
    throw std::invalid_argument("joint_confint: level must be in (0.5, 1)");
  const BootstrapDraws draws = multiplier_bootstrap(est, B, seed, threads);
  std::vector<double> maxima(B);
  for (int b = 0; b < B; ++b) maxima[b] = draws.t_star.row(b).cwiseAbs().maxCoeff();
  JointConfidenceRegion region;
  region.level = level;
  region.B = B;
  region.seed = seed;
  region.critical = empirical_quantile(std::move(maxima), level);
  region.lower = est.theta_hat - region.critical * est.std_err;
  region.upper = est.theta_hat + region.critical * est.std_err;
  return region;
}

AdjustedPValues adjust_pvalues(const EffectEstimates& est, const std::string& method,
                               int B, std::uint64_t seed, int threads) {
  if (method == "RW") return adjust_rw(est, B, seed, threads);
  AdjustedPValues out;
  out.method = method;
  out.raw = raw_pvalues(est);
  if (method == "none")
    out.adjusted = out.raw;
  else if (method == "bonferroni")
    out.adjusted = adjust_bonferroni(out.raw);
  else if (method == "holm")
    out.adjusted = adjust_holm(out.raw);
  else if (method == "BH")
    out.adjusted = adjust_bh(out.raw);
  else
    throw std::invalid_argument("adjust_pvalues: unknown method '" + method + "'");
  return out;
}

}  // namespace hdsi
