#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hdsi/dataset.hpp"
#include "hdsi/lasso.hpp"

namespace hdsi {

// Per-target estimates with influence-function scores, the input to every
// simultaneous-inference procedure.
struct EffectEstimates {
  Eigen::VectorXd theta_hat;  // length K
  Eigen::VectorXd std_err;    // length K, sigma_k / sqrt(n)
  Eigen::VectorXd t_stat;     // length K
  Eigen::MatrixXd scores;     // n x K, centered
  std::vector<std::string> names;
  int n = 0;
  std::vector<int> selected_union;  // control columns kept in the final stage
  std::vector<std::string> warnings;

  int K() const { return static_cast<int>(theta_hat.size()); }
};

// Double selection: per target, lasso of d_k on the remaining regressors and
// lasso of y on the remaining regressors; final joint least squares of y on
// all targets plus the union of selected controls. HC0 sandwich errors.
EffectEstimates double_select_effects(const Dataset& data, const PenaltyConfig& cfg,
                                      int threads = 1);

// Ordinary least squares on all columns, reported for the `index` subset with
// the same score and standard-error conventions.
EffectEstimates ols_effects(const Dataset& data, const std::vector<int>& index);

}  // namespace hdsi
