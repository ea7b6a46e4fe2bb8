#include "hdsi/dataset.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace hdsi {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_cell(const std::string& cell, int row, const std::string& col) {
  const char* begin = cell.c_str();
  char* end = nullptr;
  errno = 0;
  double v = std::strtod(begin, &end);
  // reject empty cells, trailing junk, and out-of-range values
  while (end && *end != '\0' && std::isspace(static_cast<unsigned char>(*end))) ++end;
  if (end == begin || (end && *end != '\0') || errno == ERANGE || !std::isfinite(v)) {
    throw std::runtime_error("load_csv: non-numeric cell at data row " +
                             std::to_string(row) + ", column '" + col + "'");
  }
  return v;
}

bool name_matches(const std::string& pattern, const std::string& name) {
  if (!pattern.empty() && pattern.back() == '*') {
    return name.compare(0, pattern.size() - 1, pattern, 0, pattern.size() - 1) == 0;
  }
  return pattern == name;
}

}  // namespace

bool Dataset::is_target(int j) const {
  return std::find(target_index.begin(), target_index.end(), j) != target_index.end();
}

std::vector<int> Dataset::control_index() const {
  std::vector<int> out;
  for (int j = 0; j < p(); ++j)
    if (!is_target(j)) out.push_back(j);
  return out;
}

void Dataset::validate() const {
  if (n() < 2) throw std::runtime_error("Dataset: need at least 2 observations");
  if (p() < 1) throw std::runtime_error("Dataset: need at least 1 regressor");
  if (X.rows() != y.size()) throw std::runtime_error("Dataset: X/y row mismatch");
  if (static_cast<int>(column_names.size()) != p())
    throw std::runtime_error("Dataset: column_names/X mismatch");
  if (!y.allFinite() || !X.allFinite())
    throw std::runtime_error("Dataset: NaN or Inf entry");
  if (target_index.empty() || static_cast<int>(target_index.size()) > p())
    throw std::runtime_error("Dataset: need 1 <= K <= p targets");
  std::set<int> seen;
  for (int t : target_index) {
    if (t < 0 || t >= p()) throw std::runtime_error("Dataset: target index out of range");
    if (!seen.insert(t).second) throw std::runtime_error("Dataset: duplicate target index");
  }
}

Standardization compute_standardization(const Eigen::MatrixXd& X) {
  const auto n = static_cast<double>(X.rows());
  Standardization s;
  s.means = X.colwise().mean();
  s.scales.resize(X.cols());
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    double ss = (X.col(j).array() - s.means[j]).square().sum() / n;
    if (ss <= 0.0)
      throw std::runtime_error("standardization: column " + std::to_string(j) +
                               " has zero variance");
    s.scales[j] = std::sqrt(ss);
  }
  return s;
}

Eigen::MatrixXd apply_standardization(const Eigen::MatrixXd& X, const Standardization& s) {
  return (X.rowwise() - s.means.transpose()).array().rowwise() /
         s.scales.transpose().array();
}

Dataset load_csv(const std::string& path, const std::string& outcome,
                 const std::vector<std::string>& targets) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_csv: cannot open '" + path + "'");

  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("load_csv: empty file '" + path + "'");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = split_line(line);

  int outcome_col = -1;
  for (std::size_t j = 0; j < header.size(); ++j)
    if (header[j] == outcome) outcome_col = static_cast<int>(j);
  if (outcome_col < 0)
    throw std::runtime_error("load_csv: outcome column '" + outcome + "' not found");

  std::vector<std::vector<double>> rows;
  int row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++row;
    const auto cells = split_line(line);
    if (cells.size() != header.size())
      throw std::runtime_error("load_csv: data row " + std::to_string(row) + " has " +
                               std::to_string(cells.size()) + " cells, expected " +
                               std::to_string(header.size()));
    std::vector<double> vals(cells.size());
    for (std::size_t j = 0; j < cells.size(); ++j)
      vals[j] = parse_cell(cells[j], row, header[j]);
    rows.push_back(std::move(vals));
  }
  const int n = static_cast<int>(rows.size());
  const int p = static_cast<int>(header.size()) - 1;
  if (n < 2) throw std::runtime_error("load_csv: need at least 2 data rows");
  if (p < 1) throw std::runtime_error("load_csv: need at least 1 regressor column");

  Dataset d;
  d.y.resize(n);
  d.X.resize(n, p);
  for (std::size_t j = 0; j < header.size(); ++j)
    if (static_cast<int>(j) != outcome_col) d.column_names.push_back(header[j]);
  for (int i = 0; i < n; ++i) {
    int jj = 0;
    for (std::size_t j = 0; j < header.size(); ++j) {
      if (static_cast<int>(j) == outcome_col)
        d.y[i] = rows[i][j];
      else
        d.X(i, jj++) = rows[i][j];
    }
  }
  for (int j = 0; j < p; ++j) {
    for (const auto& pat : targets) {
      if (name_matches(pat, d.column_names[j])) {
        d.target_index.push_back(j);
        break;
      }
    }
  }
  if (d.target_index.empty())
    throw std::runtime_error("load_csv: target pattern matched no columns");
  d.validate();
  return d;
}

void write_csv(const Dataset& data, const std::string& path, const std::string& outcome_name) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_csv: cannot open '" + path + "'");
  out.precision(17);
  out << outcome_name;
  for (const auto& c : data.column_names) out << ',' << c;
  out << '\n';
  for (int i = 0; i < data.n(); ++i) {
    out << data.y[i];
    for (int j = 0; j < data.p(); ++j) out << ',' << data.X(i, j);
    out << '\n';
  }
}

Dataset build_interactions(const Dataset& data, const std::string& focal,
                           const std::vector<std::string>& partners) {
  auto find_col = [&](const std::string& name) {
    for (int j = 0; j < data.p(); ++j)
      if (data.column_names[j] == name) return j;
    throw std::runtime_error("build_interactions: column '" + name + "' not found");
  };
  const int jf = find_col(focal);
  const bool focal_is_target = data.is_target(jf);

  Dataset out = data;
  const int p0 = data.p();
  const int extra = static_cast<int>(partners.size());
  out.X.conservativeResize(Eigen::NoChange, p0 + extra);
  for (int k = 0; k < extra; ++k) {
    const int jp = find_col(partners[k]);
    const std::string name = focal + ":" + partners[k];
    if (std::find(out.column_names.begin(), out.column_names.end(), name) !=
        out.column_names.end())
      throw std::runtime_error("build_interactions: column '" + name + "' already exists");
    out.X.col(p0 + k) = data.X.col(jf).cwiseProduct(data.X.col(jp));
    out.column_names.push_back(name);
    if (focal_is_target) out.target_index.push_back(p0 + k);
  }
  out.validate();
  return out;
}

DropConstantsResult drop_constants(const Dataset& data) {
  const auto n = static_cast<double>(data.n());
  std::vector<int> keep;
  DropConstantsResult res;
  for (int j = 0; j < data.p(); ++j) {
    const double mean = data.X.col(j).mean();
    const double var = (data.X.col(j).array() - mean).square().sum() / n;
    if (var > 0.0) {
      keep.push_back(j);
    } else {
      res.dropped.push_back(data.column_names[j]);
      if (data.is_target(j)) res.dropped_targets.push_back(data.column_names[j]);
    }
  }
  if (keep.empty()) throw std::runtime_error("drop_constants: all columns are constant");

  Dataset& d = res.data;
  d.y = data.y;
  d.X.resize(data.n(), static_cast<int>(keep.size()));
  std::vector<int> remap(data.p(), -1);
  for (std::size_t jj = 0; jj < keep.size(); ++jj) {
    d.X.col(static_cast<int>(jj)) = data.X.col(keep[jj]);
    d.column_names.push_back(data.column_names[keep[jj]]);
    remap[keep[jj]] = static_cast<int>(jj);
  }
  for (int t : data.target_index)
    if (remap[t] >= 0) d.target_index.push_back(remap[t]);
  if (d.target_index.empty())
    throw std::runtime_error("drop_constants: all target columns were constant");
  d.validate();
  return res;
}

}  // namespace hdsi
