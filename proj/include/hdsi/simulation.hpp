#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hdsi/dataset.hpp"
#include "hdsi/lasso.hpp"

namespace hdsi {

// Toeplitz-Gaussian design: d_i ~ N(0, Sigma) with Sigma_{jk} = rho^|j-k|,
// y_i = beta0 + d_i' theta + eps_i, eps_i ~ N(0, sigma2).
struct DgpConfig {
  int n = 500;
  int K = 60;
  double rho = 0.9;
  double sigma2 = 3.0;
  Eigen::VectorXd theta;  // length K
  double beta0 = 0.0;
  std::uint64_t seed = 42;
  int R = 500;
};

// s nonzero coefficients spread over the K indices, values cycling through
// +/- {1.0, 0.8, 0.6}.
Eigen::VectorXd default_theta(int K, int s);

struct MethodMetrics {
  double mean_correct = 0.0;
  double sd_correct = 0.0;
  double mean_incorrect = 0.0;
  double sd_incorrect = 0.0;
  double fwer = 0.0;
  double fdr = 0.0;
};

struct SimulationReport {
  std::map<std::string, MethodMetrics> methods;  // naive, BH, bonferroni, holm, RW, jointCI
  double alpha = 0.0;
  int R = 0;
  int B = 0;
  int failures = 0;
  DgpConfig config;
};

// Deterministic under (seed, replication); all K columns are targets.
Dataset generate_dgp(const DgpConfig& cfg, int replication);

// Per-replication classification of a rejection matrix against the truth.
MethodMetrics aggregate_metrics(const std::vector<std::vector<bool>>& rejections,
                                const std::vector<bool>& truth);

SimulationReport run_study(const DgpConfig& cfg, double alpha, int B, int threads = 1);

}  // namespace hdsi
