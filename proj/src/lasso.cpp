#include "hdsi/lasso.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hdsi/parallel.hpp"
#include "hdsi/rng.hpp"
#include "hdsi/stats.hpp"

namespace hdsi {

double resolve_gamma(int n, int p, const PenaltyConfig& cfg) {
  if (cfg.gamma > 0.0) return cfg.gamma;
  return 0.1 / std::log(static_cast<double>(std::max({n, p, 3})));
}

double theory_lambda(int n, int p, const PenaltyConfig& cfg) {
  if (n < 2 || p < 1) throw std::invalid_argument("theory_lambda: need n >= 2, p >= 1");
  const double gamma = resolve_gamma(n, p, cfg);
  if (!(gamma > 0.0 && gamma < 0.5)) throw std::invalid_argument("theory_lambda: gamma out of range");
  return 2.0 * cfg.c * std::sqrt(static_cast<double>(n)) *
         normal_quantile(1.0 - gamma / (2.0 * p));
}

Eigen::VectorXd penalty_loadings(const Eigen::MatrixXd& X,
                                 const Eigen::VectorXd& residuals,
                                 const PenaltyConfig& cfg) {
  if (residuals.size() != X.rows())
    throw std::invalid_argument("penalty_loadings: residual length mismatch");
  const auto n = static_cast<double>(X.rows());
  Eigen::VectorXd psi(X.cols());
  if (cfg.homoscedastic) {
    const double sigma = std::sqrt(residuals.squaredNorm() / n);
    for (Eigen::Index j = 0; j < X.cols(); ++j)
      psi[j] = sigma * std::sqrt(X.col(j).squaredNorm() / n);
  } else {
    for (Eigen::Index j = 0; j < X.cols(); ++j)
      psi[j] = std::sqrt(X.col(j).array().square().cwiseProduct(residuals.array().square()).sum() / n);
  }
  for (Eigen::Index j = 0; j < X.cols(); ++j)
    if (!(psi[j] > 0.0))
      throw std::runtime_error("penalty_loadings: zero loading for column " + std::to_string(j));
  return psi;
}

namespace {

// Cyclic coordinate descent on standardized columns (unit RMS, centered y).
// Minimizes mean(r^2) + (lambda/n) sum_j psi_j |b_j|. Active-set passes after
// each converged full pass. Throws on pass-cap overrun.
void coordinate_descent(const Eigen::MatrixXd& Xs, Eigen::VectorXd& r,
                        Eigen::VectorXd& b, double lambda,
                        const Eigen::VectorXd& psi, const PenaltyConfig& cfg) {
  const auto n = static_cast<double>(Xs.rows());
  const auto p = static_cast<int>(Xs.cols());
  const double inv_n = 1.0 / n;

  auto update = [&](int j) {
    const double z = b[j] + Xs.col(j).dot(r) * inv_n;
    const double bn = soft_threshold(z, lambda * psi[j] / (2.0 * n));
    const double delta = bn - b[j];
    if (delta != 0.0) {
      r -= Xs.col(j) * delta;
      b[j] = bn;
    }
    return std::abs(delta);
  };

  int passes = 0;
  while (true) {
    // full pass
    double max_delta = 0.0;
    for (int j = 0; j < p; ++j) max_delta = std::max(max_delta, update(j));
    ++passes;
    if (max_delta < cfg.coef_tol) return;
    // active-set passes until stable
    std::vector<int> active;
    for (int j = 0; j < p; ++j)
      if (b[j] != 0.0) active.push_back(j);
    while (!active.empty()) {
      double md = 0.0;
      for (int j : active) md = std::max(md, update(j));
      ++passes;
      if (md < cfg.coef_tol) break;
      if (passes > cfg.max_passes) break;
    }
    if (passes > cfg.max_passes) {
      double max_kkt = 0.0;
      for (int j = 0; j < p; ++j) {
        const double g = 2.0 * inv_n * Xs.col(j).dot(r);
        const double slack = b[j] == 0.0
                                 ? std::abs(g) - lambda * psi[j] * inv_n
                                 : std::abs(g - lambda * psi[j] * inv_n *
                                                    (b[j] > 0 ? 1.0 : -1.0));
        max_kkt = std::max(max_kkt, slack);
      }
      throw std::runtime_error(
          "fit_lasso: coordinate descent did not converge in " +
          std::to_string(cfg.max_passes) + " passes (max KKT violation " +
          std::to_string(max_kkt) + ")");
    }
  }
}

LassoFit ols_on_columns(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                        const std::vector<int>& selected) {
  const auto n = static_cast<int>(y.size());
  const auto m = static_cast<int>(selected.size());
  LassoFit fit;
  fit.post_lasso = true;
  fit.coefficients = Eigen::VectorXd::Zero(X.cols());

  Eigen::MatrixXd W(n, m + 1);
  W.col(0).setOnes();
  for (int j = 0; j < m; ++j) W.col(j + 1) = X.col(selected[j]);

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(W);
  qr.setThreshold(1e-10);
  const auto rank = static_cast<int>(qr.rank());
  Eigen::VectorXd beta = qr.solve(y);
  if (rank < m + 1) {
    // basic solution: pivoted-out columns get exact zeros
    const auto& perm = qr.colsPermutation().indices();
    for (int c = rank; c < m + 1; ++c) {
      const int col = perm[c];
      beta[col] = 0.0;
      if (col > 0)
        fit.warnings.push_back("post_lasso_refit: dropped collinear column index " +
                               std::to_string(selected[col - 1]));
    }
    // re-solve on the independent columns so the kept coefficients are exact
    std::vector<int> kept;
    for (int c = 0; c < rank; ++c)
      if (perm[c] > 0) kept.push_back(perm[c]);
    Eigen::MatrixXd Wk(n, static_cast<int>(kept.size()) + 1);
    Wk.col(0).setOnes();
    for (std::size_t j = 0; j < kept.size(); ++j) Wk.col(static_cast<int>(j) + 1) = W.col(kept[j]);
    Eigen::VectorXd bk = Wk.colPivHouseholderQr().solve(y);
    beta.setZero();
    beta[0] = bk[0];
    for (std::size_t j = 0; j < kept.size(); ++j) beta[kept[j]] = bk[static_cast<int>(j) + 1];
  }

  fit.intercept = beta[0];
  for (int j = 0; j < m; ++j) fit.coefficients[selected[j]] = beta[j + 1];
  for (int j = 0; j < m; ++j)
    if (fit.coefficients[selected[j]] != 0.0) fit.selected.push_back(selected[j]);
  std::sort(fit.selected.begin(), fit.selected.end());
  fit.residuals = y - W * beta;
  const double sst = (y.array() - y.mean()).square().sum();
  fit.r2 = sst > 0.0 ? 1.0 - fit.residuals.squaredNorm() / sst : 0.0;
  return fit;
}

}  // namespace

LassoFit fit_lasso_on(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                      const PenaltyConfig& cfg) {
  const auto n = static_cast<int>(y.size());
  const auto p = static_cast<int>(X.cols());
  const Standardization std_ = compute_standardization(X);
  const Eigen::MatrixXd Xs = apply_standardization(X, std_);
  const double ybar = y.mean();
  const Eigen::VectorXd yc = y.array() - ybar;

  const double lambda = cfg.lambda_override >= 0.0 ? cfg.lambda_override
                                                   : theory_lambda(n, p, cfg);

  if (yc.cwiseAbs().maxCoeff() == 0.0) {
    // constant outcome: nothing to select, loadings are degenerate
    LassoFit fit;
    fit.lambda = lambda;
    fit.loadings = Eigen::VectorXd::Zero(p);
    fit.coefficients = Eigen::VectorXd::Zero(p);
    fit.intercept = ybar;
    fit.residuals = Eigen::VectorXd::Zero(n);
    fit.post_lasso = cfg.post_lasso;
    fit.warnings.push_back("fit_lasso: constant outcome, empty selection");
    return fit;
  }

  Eigen::VectorXd b = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd r = yc;
  Eigen::VectorXd psi = penalty_loadings(Xs, r, cfg);

  const int iters = cfg.iterate_loadings ? std::max(2, cfg.max_loading_iters) : 1;
  for (int it = 0; it < iters; ++it) {
    coordinate_descent(Xs, r, b, lambda, psi, cfg);
    if (!cfg.iterate_loadings || it == iters - 1) break;
    const Eigen::VectorXd psi_new = penalty_loadings(Xs, r, cfg);
    const double rel_change =
        ((psi_new - psi).cwiseAbs().cwiseQuotient(psi.cwiseAbs())).maxCoeff();
    // stop without touching psi once the loadings settle, so the reported
    // loadings are the ones the solution was computed under
    if (it >= 1 && rel_change < cfg.loading_tol) break;
    psi = psi_new;
  }

  LassoFit fit;
  fit.lambda = lambda;
  fit.loadings = psi;
  fit.coefficients = b.cwiseQuotient(std_.scales);
  for (int j = 0; j < p; ++j)
    if (b[j] != 0.0) fit.selected.push_back(j);
  fit.intercept = ybar - std_.means.dot(fit.coefficients);
  fit.residuals = y.array() - fit.intercept - (X * fit.coefficients).array();
  const double sst = yc.squaredNorm();
  fit.r2 = sst > 0.0 ? 1.0 - fit.residuals.squaredNorm() / sst : 0.0;
  fit.post_lasso = false;

  if (cfg.post_lasso) {
    LassoFit refit = ols_on_columns(y, X, fit.selected);
    refit.lambda = lambda;
    refit.loadings = psi;
    return refit;
  }
  return fit;
}

LassoFit fit_lasso(const Dataset& data, const PenaltyConfig& cfg) {
  data.validate();
  return fit_lasso_on(data.y, data.X, cfg);
}

LassoFit post_lasso_refit(const Dataset& data, const std::vector<int>& selected) {
  data.validate();
  if (static_cast<int>(selected.size()) >= data.n())
    throw std::invalid_argument("post_lasso_refit: |selected| must be < n");
  for (int j : selected)
    if (j < 0 || j >= data.p())
      throw std::invalid_argument("post_lasso_refit: column index out of range");
  return ols_on_columns(data.y, data.X, selected);
}

SupScoreResult sup_score_test(const Dataset& data, double alpha, int B,
                              std::uint64_t seed, int threads) {
  data.validate();
  if (B < 100) throw std::invalid_argument("sup_score_test: need B >= 100");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("sup_score_test: bad alpha");

  const int n = data.n();
  const double sqrt_n = std::sqrt(static_cast<double>(n));
  const Standardization std_ = compute_standardization(data.X);
  const Eigen::MatrixXd Xs = apply_standardization(data.X, std_);
  const Eigen::VectorXd yc = data.y.array() - data.y.mean();

  SupScoreResult res;
  res.B = B;
  res.alpha = alpha;
  res.statistic = (Xs.transpose() * yc).cwiseAbs().maxCoeff() / sqrt_n;

  std::vector<double> sstar(B);
  parallel_for(static_cast<std::size_t>(B), threads, [&](std::size_t b) {
    auto rng = substream(seed, b);
    std::normal_distribution<double> normal;
    Eigen::VectorXd gy(n);
    for (int i = 0; i < n; ++i) gy[i] = yc[i] * normal(rng);
    sstar[b] = (Xs.transpose() * gy).cwiseAbs().maxCoeff() / sqrt_n;
  });

  int exceed = 0;
  for (double s : sstar)
    if (s >= res.statistic) ++exceed;
  res.p_value = (1.0 + exceed) / (B + 1.0);

  // Critical value chosen so that statistic > critical_value exactly when
  // p_value < alpha under the shared draws: reject iff at most M draws >= S.
  std::sort(sstar.begin(), sstar.end());
  const int M = static_cast<int>(std::floor(alpha * (B + 1) - 1.0 - 1e-9));
  if (M < 0)
    res.critical_value = std::numeric_limits<double>::infinity();
  else if (M >= B)
    res.critical_value = -std::numeric_limits<double>::infinity();
  else
    res.critical_value = sstar[static_cast<std::size_t>(B - 1 - M)];
  return res;
}

}  // namespace hdsi
