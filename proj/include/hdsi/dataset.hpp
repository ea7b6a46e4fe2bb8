#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace hdsi {

// Regression data: outcome y, dense regressor matrix X, and the indices of
// the target columns whose coefficients are under simultaneous test.
struct Dataset {
  Eigen::VectorXd y;
  Eigen::MatrixXd X;
  std::vector<std::string> column_names;
  std::vector<int> target_index;  // 0-based, distinct, in file order

  int n() const { return static_cast<int>(y.size()); }
  int p() const { return static_cast<int>(X.cols()); }
  int num_targets() const { return static_cast<int>(target_index.size()); }

  bool is_target(int j) const;
  // Column indices not in target_index, ascending.
  std::vector<int> control_index() const;

  // Checks finiteness, shape agreement, and target-index validity; throws on
  // violation.
  void validate() const;
};

// Column means and root-mean-square scales of the centered columns.
struct Standardization {
  Eigen::VectorXd means;
  Eigen::VectorXd scales;
};

// Fails on a zero-variance column.
Standardization compute_standardization(const Eigen::MatrixXd& X);
Eigen::MatrixXd apply_standardization(const Eigen::MatrixXd& X, const Standardization& s);

// `targets`: explicit names, or entries ending in '*' match as name prefixes.
Dataset load_csv(const std::string& path, const std::string& outcome,
                 const std::vector<std::string>& targets);

void write_csv(const Dataset& data, const std::string& path,
               const std::string& outcome_name = "y");

// Appends focal*partner columns named "<focal>:<partner>"; the new columns
// join target_index when focal is a target.
Dataset build_interactions(const Dataset& data, const std::string& focal,
                           const std::vector<std::string>& partners);

struct DropConstantsResult {
  Dataset data;
  std::vector<std::string> dropped;          // all removed column names
  std::vector<std::string> dropped_targets;  // subset that were targets
};

// Removes zero-variance columns and remaps target_index.
DropConstantsResult drop_constants(const Dataset& data);

}  // namespace hdsi
