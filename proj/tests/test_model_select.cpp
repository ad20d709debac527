#include <doctest.h>

#include <cmath>
#include <vector>

#include "jlsm/model_select.hpp"
#include "jlsm/simulate.hpp"
#include "criteria_oracle.hpp"
#include "oracles.hpp"

using namespace jlsm;

namespace {

RunConfig quick_config() {
  RunConfig c;
  c.iterations = 200;
  c.burn_in = 100;
  c.thin = 2;
  return c;
}

Dataset small_dataset(Family family, Eigen::Index n, Eigen::Index q, std::uint64_t seed) {
  SimDesign d;
  d.n = n;
  d.q = q;
  d.k0 = 2;
  d.family = family;
  RngStream rng(seed, 0);
  return generate_dataset(d, rng).first;
}

}  // namespace

TEST_CASE("parameter counts") {
  CHECK(parameter_count(Family::Gaussian, 100, 20, 3) == 500);
  CHECK(parameter_count(Family::Bernoulli, 100, 20, 3) == 480);
  CHECK(parameter_count(Family::Gaussian, 10, 0, 2) == 30);
}

TEST_CASE("orthogonal Procrustes") {
  RngStream rng(81, 0);
  const Eigen::MatrixXd X = oracle::random_matrix(10, 3, rng);
  const Eigen::MatrixXd R = oracle::random_orthogonal(3, rng);
  const Eigen::MatrixXd Q = procrustes_rotation(X, X * R);
  CHECK((Q - R).cwiseAbs().maxCoeff() < 1e-12);

  const Eigen::MatrixXd T = oracle::random_matrix(10, 3, rng);
  const Eigen::MatrixXd Qt = procrustes_rotation(X, T);
  CHECK((Qt.transpose() * Qt - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() < 1e-12);
  const double best = (X * Qt - T).norm();
  for (int trial = 0; trial < 500; ++trial) REQUIRE(best <= (X * oracle::random_orthogonal(3, rng) - T).norm() + 1e-12);
}

TEST_CASE("information criteria match direct formulas") {
  RngStream rng(82, 0);
  for (Family family : {Family::Gaussian, Family::Bernoulli}) {
    const Dataset data = small_dataset(family, 7, 3, 83);
    const int k = 2;
    const PosteriorChain chain = oracle::rotated_chain(data, k, 6, rng);

    const oracle::DirectCriteria direct = oracle::direct_criteria(chain, data);
    CHECK(direct.d == double(7 * k + 3 * k + 7 + (family == Family::Gaussian ? 6 : 3)));
    CHECK(std::abs(criterion_aic(chain, data) - direct.aic) < 1e-10);
    CHECK(std::abs(criterion_bic(chain, data) - direct.bic) < 1e-10);
    CHECK(std::abs(criterion_dic(chain, data) - direct.dic) < 1e-10);
    CHECK(std::abs(criterion_waic(chain, data) - direct.waic) < 1e-10);

    const WaicParts parts = waic_parts(chain, data);
    CHECK(parts.penalty_network >= 0.0);
    CHECK(parts.penalty_attributes >= 0.0);

    const CriteriaReport r = compute_criteria(chain, data);
    CHECK(r.aic == criterion_aic(chain, data));
    CHECK(r.dic == criterion_dic(chain, data));
    CHECK(r.waic == criterion_waic(chain, data));
    CHECK(std::abs((r.bic - r.aic) - (2.0 * std::log(7.0) - 2.0) * double(r.d)) < 1e-9);
  }
}

TEST_CASE("WAIC on a single dyad with three draws") {
  Eigen::MatrixXd A(2, 2);
  A << 0, 1, 1, 0;
  const Dataset data = Dataset::complete(A, Eigen::MatrixXd(2, 0), Family::Gaussian);
  PosteriorChain c;
  const double etas[3] = {-0.4, 0.3, 1.1};
  for (double eta : etas) {
    c.alpha.push_back(Eigen::Vector2d(eta, 0.0));
    c.gamma.push_back(Eigen::VectorXd(0));
    c.sigma2.push_back(Eigen::VectorXd(0));
    c.Z.push_back(Eigen::MatrixXd::Zero(2, 1));
    c.B.push_back(Eigen::MatrixXd(0, 1));
    c.log_lik.push_back(0.0);
  }
  const double l0 = std::log(1.0 / (1.0 + std::exp(0.4)));
  const double l1 = std::log(1.0 / (1.0 + std::exp(-0.3)));
  const double l2 = std::log(1.0 / (1.0 + std::exp(-1.1)));
  const double lppd = std::log((std::exp(l0) + std::exp(l1) + std::exp(l2)) / 3.0);
  const double m = (l0 + l1 + l2) / 3.0;
  const double var = ((l0 - m) * (l0 - m) + (l1 - m) * (l1 - m) + (l2 - m) * (l2 - m)) / 2.0;
  CHECK(std::abs(criterion_waic(c, data) - (-2.0 * (lppd - var))) < 1e-12);
}

TEST_CASE("single-state chain: DIC penalty vanishes") {
  RngStream rng(84, 0);
  const Dataset data = small_dataset(Family::Gaussian, 6, 2, 85);
  const PosteriorChain chain = oracle::rotated_chain(data, 2, 1, rng);
  const CriteriaReport r = compute_criteria(chain, data);
  CHECK(std::abs(r.p_dic) < 1e-12);
  CHECK(std::abs(r.dic - (-2.0 * chain.log_lik[0])) < 1e-10);
}

TEST_CASE("criteria on a fixed-dimension fit") {
  const Dataset data = small_dataset(Family::Gaussian, 15, 3, 86);
  RngStream rng(87, 0);
  const PosteriorChain chain = fit_fixed_dimension(data, 2, quick_config(), rng);
  CHECK(chain.size() == 50);
  for (const auto& Z : chain.Z) REQUIRE(Z.cols() == 2);
  const CriteriaReport a = compute_criteria(chain, data);
  const CriteriaReport b = compute_criteria(chain, data);
  CHECK(a.waic == b.waic);
  CHECK(a.dic == b.dic);
  CHECK(std::isfinite(a.waic));
  CHECK_THROWS_AS(fit_fixed_dimension(data, 0, quick_config(), rng), DomainError);
  CHECK_THROWS_AS(compute_criteria(PosteriorChain{}, data), DomainError);

  PosteriorChain mixed = chain;
  mixed.Z.back().conservativeResize(Eigen::NoChange, 3);
  CHECK_THROWS_AS(aligned_posterior_mean(mixed), DomainError);
}

TEST_CASE("one-standard-error rule") {
  CHECK(one_se_selection({1, 2, 3, 4}, {-50.0, -41.0, -40.0, -40.5}, {1.0, 1.0, 1.5, 1.0}) == 2);
  CHECK(one_se_selection({1, 2, 3}, {-50.0, -45.0, -40.0}, {1.0, 1.0, 1.0}) == 3);
  CHECK(one_se_selection({3}, {-1.0}, {0.5}) == 3);
  CHECK_THROWS_AS(one_se_selection({1, 2}, {0.0}, {0.0}), DomainError);
}

TEST_CASE("new-node estimate is a stationary point of its penalized log-likelihood") {
  RngStream rng(88, 0);
  const Eigen::MatrixXd Z = oracle::random_matrix(30, 2, rng);
  const Eigen::VectorXd alpha = oracle::random_vector(30, rng, 0.5);
  Eigen::VectorXd links(30);
  for (Eigen::Index i = 0; i < 30; ++i) links[i] = rng.uniform() < 0.4 ? 1.0 : 0.0;
  const auto [a, z] = estimate_new_node(links, alpha, Z, 3.0);
  Eigen::Vector3d grad(-a / 9.0, -z[0], -z[1]);
  for (Eigen::Index i = 0; i < 30; ++i) {
    const double p = 1.0 / (1.0 + std::exp(-(alpha[i] + a + Z.row(i).dot(z))));
    grad[0] += links[i] - p;
    grad[1] += (links[i] - p) * Z(i, 0);
    grad[2] += (links[i] - p) * Z(i, 1);
  }
  CHECK(grad.cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("node-level cross-validation") {
  const Dataset data = small_dataset(Family::Gaussian, 6, 2, 89);
  RngStream rng(90, 0);
  const CvResult loo = kfold_cv(data, {1, 2}, 6, quick_config(), rng);
  CHECK(loo.fold_log_lik.size() == 2);
  for (const auto& folds : loo.fold_log_lik) {
    REQUIRE(folds.size() == 6);
    for (double v : folds) CHECK(std::isfinite(v));
  }
  CHECK(std::isfinite(loo.mean[0]));
  CHECK(std::isfinite(loo.se[1]));

  const Dataset bern = small_dataset(Family::Bernoulli, 12, 3, 91);
  const CvResult single = kfold_cv(bern, {2}, 3, quick_config(), rng);
  CHECK(single.selected == 2);
  CHECK(single.selected_1se == 2);

  CHECK_THROWS_AS(kfold_cv(data, {1}, 7, quick_config(), rng), DataError);
  CHECK_THROWS_AS(kfold_cv(data, {1}, 1, quick_config(), rng), DomainError);
  CHECK_THROWS_AS(kfold_cv(data, {}, 2, quick_config(), rng), DomainError);
}

TEST_CASE("dimension selection table") {
  const Dataset data = small_dataset(Family::Bernoulli, 15, 3, 92);
  RngStream rng(93, 0);
  const SelectionTable t = select_dimension(data, {1, 2, 3}, quick_config(), rng);
  CHECK(t.rows.size() == 3);
  for (int best : {t.best_aic, t.best_bic, t.best_dic, t.best_waic}) {
    CHECK(best >= 1);
    CHECK(best <= 3);
  }
  for (std::size_t c = 0; c < 3; ++c) CHECK(t.rows[c].k == int(c) + 1);
}
