#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hdsi/effects.hpp"

namespace hdsi {

struct AdjustedPValues {
  Eigen::VectorXd raw;       // 2(1 - Phi(|t_k|))
  Eigen::VectorXd adjusted;  // length K
  std::string method;        // none | bonferroni | holm | BH | RW
  int B = 0;                 // RW only
  std::uint64_t seed = 0;    // RW only
};

struct BootstrapDraws {
  Eigen::MatrixXd t_star;  // B x K
  int B = 0;
  std::uint64_t seed = 0;
};

struct JointConfidenceRegion {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  double level = 0.0;
  double critical = 0.0;
  int B = 0;
  std::uint64_t seed = 0;
};

Eigen::VectorXd raw_pvalues(const EffectEstimates& est);

Eigen::VectorXd adjust_bonferroni(const Eigen::VectorXd& p);

// Cumulative-max form of the Holm stepdown adjustment.
Eigen::VectorXd adjust_holm(const Eigen::VectorXd& p);

// Cumulative-min form of the Benjamini-Hochberg stepup adjustment.
Eigen::VectorXd adjust_bh(const Eigen::VectorXd& p);

// t*_k^b = n^{-1/2} sum_i g_i^b psi_ki / sigma_k with one shared g-vector per
// draw; draw b uses the (seed, b) substream.
BootstrapDraws multiplier_bootstrap(const EffectEstimates& est, int B,
                                    std::uint64_t seed, int threads = 1);

// Same statistic computed from caller-supplied multipliers G (n x B); the
// random path above is a thin wrapper over this.
Eigen::MatrixXd bootstrap_tstats(const EffectEstimates& est, const Eigen::MatrixXd& G);

// Romano-Wolf stepdown adjustment from multiplier-bootstrap draws; initial
// p-values use the plain #/B count.
AdjustedPValues adjust_rw(const EffectEstimates& est, int B, std::uint64_t seed,
                          int threads = 1);

// Stepdown steps applied to given statistics and draws (also the test hook).
Eigen::VectorXd rw_adjust_from_draws(const Eigen::VectorXd& t_stat,
                                     const Eigen::MatrixXd& t_star);

// Rectangular simultaneous region theta_hat_k +/- c * se_k, with c the
// level-quantile of max_k |t*_k|.
JointConfidenceRegion joint_confint(const EffectEstimates& est, double level,
                                    int B, std::uint64_t seed, int threads = 1);

AdjustedPValues adjust_pvalues(const EffectEstimates& est, const std::string& method,
                               int B = 1000, std::uint64_t seed = 0, int threads = 1);

}  // namespace hdsi
