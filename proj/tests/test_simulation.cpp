#include <doctest.h>

#include <cmath>

#include "hdsi/simulation.hpp"

using hdsi::DgpConfig;

namespace {

DgpConfig small_config() {
  DgpConfig cfg;
  cfg.n = 60;
  cfg.K = 5;
  cfg.rho = 0.5;
  cfg.sigma2 = 1.0;
  cfg.theta = hdsi::default_theta(5, 2);
  cfg.seed = 7;
  cfg.R = 3;
  return cfg;
}

double column_correlation(const Eigen::MatrixXd& X, int a, int b) {
  const Eigen::VectorXd ca = X.col(a).array() - X.col(a).mean();
  const Eigen::VectorXd cb = X.col(b).array() - X.col(b).mean();
  return ca.dot(cb) / std::sqrt(ca.squaredNorm() * cb.squaredNorm());
}

}  // namespace

TEST_CASE("default_theta places s nonzero coefficients") {
  const Eigen::VectorXd theta = hdsi::default_theta(60, 12);
  int nonzero = 0;
  for (int k = 0; k < 60; ++k)
    if (theta[k] != 0.0) ++nonzero;
  CHECK(nonzero == 12);
  CHECK(theta[0] == doctest::Approx(1.0));
  CHECK(std::abs(theta[5]) == doctest::Approx(0.8));
}

TEST_CASE("generate_dgp determinism and shape") {
  DgpConfig cfg = small_config();
  const auto a = hdsi::generate_dgp(cfg, 4);
  const auto b = hdsi::generate_dgp(cfg, 4);
  CHECK((a.X - b.X).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.y - b.y).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.num_targets() == cfg.K);

  const auto c = hdsi::generate_dgp(cfg, 5);
  CHECK((a.X - c.X).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("generate_dgp empirical correlations match the Toeplitz design") {
  DgpConfig cfg;
  cfg.n = 100000;
  cfg.K = 3;
  cfg.sigma2 = 1.0;
  cfg.theta = Eigen::VectorXd::Zero(3);
  cfg.seed = 11;

  cfg.rho = 0.0;
  const auto indep = hdsi::generate_dgp(cfg, 0);
  CHECK(std::abs(column_correlation(indep.X, 0, 1)) < 0.02);
  CHECK(std::abs(column_correlation(indep.X, 1, 2)) < 0.02);

  cfg.rho = 0.9;
  const auto corr = hdsi::generate_dgp(cfg, 0);
  CHECK(column_correlation(corr.X, 0, 1) == doctest::Approx(0.9).epsilon(0.025));
  CHECK(column_correlation(corr.X, 1, 2) == doctest::Approx(0.9).epsilon(0.025));
  CHECK(column_correlation(corr.X, 0, 2) == doctest::Approx(0.81).epsilon(0.03));
}

TEST_CASE("generate_dgp rejects invalid configs") {
  DgpConfig cfg = small_config();
  cfg.rho = 1.0;
  CHECK_THROWS_AS(static_cast<void>(hdsi::generate_dgp(cfg, 0)), std::runtime_error);
}

TEST_CASE("aggregate_metrics hand cases") {
  const std::vector<bool> truth = {true, false};

  SUBCASE("one replication, one of each") {
    const auto m = hdsi::aggregate_metrics({{true, true}}, truth);
    CHECK(m.mean_correct == doctest::Approx(1.0));
    CHECK(m.mean_incorrect == doctest::Approx(1.0));
    CHECK(m.fdr == doctest::Approx(0.5));
    CHECK(m.fwer == doctest::Approx(1.0));
  }

  SUBCASE("no rejections gives zeros by convention") {
    const auto m = hdsi::aggregate_metrics({{false, false}, {false, false}}, truth);
    CHECK(m.mean_correct == 0.0);
    CHECK(m.mean_incorrect == 0.0);
    CHECK(m.fdr == 0.0);
    CHECK(m.fwer == 0.0);
  }

  SUBCASE("reject everything under a complete null") {
    const auto m = hdsi::aggregate_metrics({{true, true}}, {false, false});
    CHECK(m.fdr == doctest::Approx(1.0));
    CHECK(m.fwer == doctest::Approx(1.0));
  }

  SUBCASE("two replications average") {
    const auto m = hdsi::aggregate_metrics({{true, false}, {true, true}}, truth);
    CHECK(m.mean_correct == doctest::Approx(1.0));
    CHECK(m.mean_incorrect == doctest::Approx(0.5));
    CHECK(m.fwer == doctest::Approx(0.5));
    CHECK(m.fdr == doctest::Approx(0.25));
  }
}

TEST_CASE("run_study smoke and determinism") {
  DgpConfig cfg = small_config();
  const auto a = hdsi::run_study(cfg, 0.1, 100);
  CHECK(a.R == 3);
  CHECK(a.failures == 0);
  for (const auto& name : {"naive", "BH", "bonferroni", "holm", "RW", "jointCI"})
    CHECK(a.methods.count(name) == 1);
  // with s = K the FDP convention forces zero false rates
  for (const auto& [name, m] : a.methods) {
    CHECK(m.mean_correct <= 2.0);
    CHECK(m.fwer >= 0.0);
    CHECK(m.fwer <= 1.0);
  }

  const auto b = hdsi::run_study(cfg, 0.1, 100);
  for (const auto& [name, m] : a.methods) {
    CHECK(b.methods.at(name).mean_correct == m.mean_correct);
    CHECK(b.methods.at(name).fwer == m.fwer);
    CHECK(b.methods.at(name).fdr == m.fdr);
  }
  // thread count must not change the report
  const auto c = hdsi::run_study(cfg, 0.1, 100, 3);
  for (const auto& [name, m] : a.methods)
    CHECK(c.methods.at(name).mean_correct == m.mean_correct);
}

TEST_CASE("no true nulls forces zero FWER and FDR") {
  DgpConfig cfg = small_config();
  cfg.theta = hdsi::default_theta(5, 5);  // s = K
  const auto report = hdsi::run_study(cfg, 0.1, 100);
  for (const auto& [name, m] : report.methods) {
    CHECK(m.mean_incorrect == 0.0);
    CHECK(m.fwer == 0.0);
    CHECK(m.fdr == 0.0);
  }
}

TEST_CASE("adjusted rejection sets are nested inside the naive set") {
  DgpConfig cfg = small_config();
  cfg.R = 5;
  const auto report = hdsi::run_study(cfg, 0.1, 100);
  const auto& naive = report.methods.at("naive");
  for (const auto& name : {"BH", "bonferroni", "holm", "RW"}) {
    const auto& m = report.methods.at(name);
    CHECK(m.mean_correct <= naive.mean_correct + 1e-12);
    CHECK(m.mean_incorrect <= naive.mean_incorrect + 1e-12);
  }
}
