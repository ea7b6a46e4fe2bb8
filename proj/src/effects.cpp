#include "hdsi/effects.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "hdsi/parallel.hpp"

namespace hdsi {

namespace {

// Final-stage least squares plus per-target influence scores. W must contain
// an intercept column of ones at position 0 and have full column rank.
// Uses the identity: the k-th column of W (W'W)^{-1} equals v_k / ||v_k||^2,
// where v_k is the residual of W_k on the remaining columns.
EffectEstimates effects_core(const Eigen::VectorXd& y, const Eigen::MatrixXd& W,
                             const std::vector<int>& report_cols,
                             const std::vector<std::string>& names) {
  const auto n = static_cast<int>(y.size());
  const auto m = static_cast<int>(W.cols());
  const int K = static_cast<int>(report_cols.size());

  const Eigen::MatrixXd WtW = W.transpose() * W;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(WtW);
  if (ldlt.info() != Eigen::Success)
    throw std::runtime_error("effects: final-stage normal equations are singular");
  const Eigen::VectorXd beta = ldlt.solve(W.transpose() * y);
  const Eigen::VectorXd resid = y - W * beta;
  const Eigen::MatrixXd A = ldlt.solve(Eigen::MatrixXd::Identity(m, m));

  EffectEstimates est;
  est.n = n;
  est.names = names;
  est.theta_hat.resize(K);
  est.std_err.resize(K);
  est.t_stat.resize(K);
  est.scores.resize(n, K);

  for (int k = 0; k < K; ++k) {
    const int c = report_cols[k];
    const double a_cc = A(c, c);
    const double v_ss = 1.0 / (static_cast<double>(n) * a_cc);  // mean(v_k^2)
    const double d_ss = W.col(c).squaredNorm() / n;
    if (!(a_cc > 0.0) || v_ss < 1e-12 * std::max(d_ss, 1.0))
      throw std::runtime_error("effects: target '" + names[k] +
                               "' is numerically explained by the other regressors");
    const Eigen::VectorXd u = W * A.col(c);  // v_k / ||v_k||^2
    est.scores.col(k) = static_cast<double>(n) * u.cwiseProduct(resid);
    est.theta_hat[k] = beta[c];
    const double sigma2 = est.scores.col(k).squaredNorm() / n;
    const double se = std::sqrt(sigma2 / n);
    est.std_err[k] = se;
    est.t_stat[k] = se > 0.0 ? beta[c] / se : 0.0;
  }
  return est;
}

int qr_rank(const Eigen::MatrixXd& W) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(W);
  qr.setThreshold(1e-9);
  return static_cast<int>(qr.rank());
}

}  // namespace

EffectEstimates double_select_effects(const Dataset& data, const PenaltyConfig& cfg,
                                      int threads) {
  data.validate();
  const int n = data.n();
  const int p = data.p();
  const int K = data.num_targets();
  const std::vector<int>& targets = data.target_index;
  const std::vector<int> controls = data.control_index();

  // Steps (1) and (2): per-target selection among the remaining regressors.
  // Only selected control columns can enlarge the final design; selected
  // other targets are included there unconditionally.
  std::set<int> union_set;
  if (!controls.empty()) {
    std::vector<std::vector<int>> per_target_sel(K);
    parallel_for(static_cast<std::size_t>(K), threads, [&](std::size_t k) {
      const int dk = targets[k];
      std::vector<int> rest;  // original indices of the columns in X_minus
      rest.reserve(p - 1);
      for (int j = 0; j < p; ++j)
        if (j != dk) rest.push_back(j);
      Eigen::MatrixXd X_minus(n, p - 1);
      for (std::size_t jj = 0; jj < rest.size(); ++jj)
        X_minus.col(static_cast<int>(jj)) = data.X.col(rest[jj]);

      PenaltyConfig sel_cfg = cfg;
      sel_cfg.post_lasso = false;
      const LassoFit step1 = fit_lasso_on(data.X.col(dk), X_minus, sel_cfg);
      const LassoFit step2 = fit_lasso_on(data.y, X_minus, sel_cfg);
      std::set<int> sel;
      for (int j : step1.selected) sel.insert(rest[j]);
      for (int j : step2.selected) sel.insert(rest[j]);
      for (int j : sel)
        if (!data.is_target(j)) per_target_sel[k].push_back(j);
    });
    for (const auto& sel : per_target_sel) union_set.insert(sel.begin(), sel.end());
  }
  std::vector<int> selected_union(union_set.begin(), union_set.end());

  if (K + static_cast<int>(selected_union.size()) + 1 >= n)
    throw std::runtime_error("double_select_effects: final design has too many columns");

  // Step (3): joint regression of y on all targets plus the selected controls.
  std::vector<std::string> warnings;
  auto build_design = [&](const std::vector<int>& ctrl) {
    Eigen::MatrixXd W(n, 1 + K + static_cast<int>(ctrl.size()));
    W.col(0).setOnes();
    for (int k = 0; k < K; ++k) W.col(1 + k) = data.X.col(targets[k]);
    for (std::size_t j = 0; j < ctrl.size(); ++j)
      W.col(1 + K + static_cast<int>(j)) = data.X.col(ctrl[j]);
    return W;
  };

  Eigen::MatrixXd W = build_design(selected_union);
  if (qr_rank(W) < static_cast<int>(W.cols())) {
    // drop controls (never targets) until the design has full rank
    std::vector<int> kept;
    Eigen::MatrixXd base(n, 1 + K);
    base.col(0).setOnes();
    for (int k = 0; k < K; ++k) base.col(1 + k) = data.X.col(targets[k]);
    int rank = qr_rank(base);
    if (rank < 1 + K)
      throw std::runtime_error("double_select_effects: target columns are collinear");
    for (int c : selected_union) {
      std::vector<int> trial = kept;
      trial.push_back(c);
      Eigen::MatrixXd Wt = build_design(trial);
      if (qr_rank(Wt) == static_cast<int>(Wt.cols())) {
        kept = std::move(trial);
      } else {
        warnings.push_back("double_select_effects: dropped collinear control '" +
                           data.column_names[c] + "'");
      }
    }
    selected_union = kept;
    W = build_design(selected_union);
  }

  std::vector<int> report_cols(K);
  std::vector<std::string> names(K);
  for (int k = 0; k < K; ++k) {
    report_cols[k] = 1 + k;
    names[k] = data.column_names[targets[k]];
  }
  EffectEstimates est = effects_core(data.y, W, report_cols, names);
  est.selected_union = selected_union;
  est.warnings = std::move(warnings);
  return est;
}

EffectEstimates ols_effects(const Dataset& data, const std::vector<int>& index) {
  data.validate();
  const int n = data.n();
  const int p = data.p();
  if (p + 1 >= n) throw std::runtime_error("ols_effects: need p + 1 < n");
  for (int j : index)
    if (j < 0 || j >= p) throw std::invalid_argument("ols_effects: index out of range");

  Eigen::MatrixXd W(n, p + 1);
  W.col(0).setOnes();
  W.rightCols(p) = data.X;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(W);
  qr.setThreshold(1e-9);
  if (static_cast<int>(qr.rank()) < p + 1) {
    const auto& perm = qr.colsPermutation().indices();
    std::string deps;
    for (int c = static_cast<int>(qr.rank()); c < p + 1; ++c) {
      const int col = perm[c];
      if (!deps.empty()) deps += ", ";
      deps += col == 0 ? "(intercept)" : data.column_names[col - 1];
    }
    throw std::runtime_error("ols_effects: rank-deficient design; dependent columns: " + deps);
  }

  std::vector<int> report_cols;
  std::vector<std::string> names;
  for (int j : index) {
    report_cols.push_back(1 + j);
    names.push_back(data.column_names[j]);
  }
  return effects_core(data.y, W, report_cols, names);
}

}  // namespace hdsi
