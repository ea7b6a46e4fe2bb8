#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hdsi/dataset.hpp"

namespace hdsi {

struct PenaltyConfig {
  double c = 1.1;
  double gamma = 0.0;  // <=0 means the default 0.1/log(max(n,p))
  int max_loading_iters = 15;
  double loading_tol = 1e-4;
  bool homoscedastic = true;
  bool post_lasso = true;
  double lambda_override = -1.0;  // >=0 fixes lambda, skipping the theory rule
  bool iterate_loadings = true;
  int max_passes = 1000;
  double coef_tol = 1e-7;
};

struct LassoFit {
  double intercept = 0.0;
  Eigen::VectorXd coefficients;  // original scale, length p
  std::vector<int> selected;     // {j : coefficient_j != 0}, ascending
  double lambda = 0.0;
  Eigen::VectorXd loadings;  // standardized-scale penalty loadings, length p
  Eigen::VectorXd residuals;
  bool post_lasso = false;
  double r2 = 0.0;
  std::vector<std::string> warnings;
};

struct SupScoreResult {
  double statistic = 0.0;
  double critical_value = 0.0;
  double p_value = 1.0;
  int B = 0;
  double alpha = 0.0;
  bool reject() const { return statistic > critical_value; }
};

// lambda = 2 c sqrt(n) Q(1 - gamma/(2p)) with Q the standard normal quantile.
double theory_lambda(int n, int p, const PenaltyConfig& cfg);

double resolve_gamma(int n, int p, const PenaltyConfig& cfg);

// Homoscedastic: psi_j = sigma_hat * sqrt(mean(x_j^2)); heteroscedastic:
// psi_j = sqrt(mean(x_j^2 eps^2)). Columns are used as given.
Eigen::VectorXd penalty_loadings(const Eigen::MatrixXd& X,
                                 const Eigen::VectorXd& residuals,
                                 const PenaltyConfig& cfg);

// Lasso with iterated plug-in loadings on internally standardized columns;
// intercept unpenalized; optional post-lasso refit of the selected set.
LassoFit fit_lasso(const Dataset& data, const PenaltyConfig& cfg);

// Same solver restricted to a caller-supplied column subset of data.X.
LassoFit fit_lasso_on(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                      const PenaltyConfig& cfg);

// Least squares of y on intercept + selected columns; collinear columns are
// dropped with a warning.
LassoFit post_lasso_refit(const Dataset& data, const std::vector<int>& selected);

// Global-insignificance sup-score test with multiplier-bootstrap critical
// value; regressors standardized to unit RMS before the statistic.
SupScoreResult sup_score_test(const Dataset& data, double alpha, int B,
                              std::uint64_t seed, int threads = 1);

}  // namespace hdsi
