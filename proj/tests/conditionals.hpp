#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "jlsm/gibbs.hpp"

namespace oracle {

/// Precision P and linear term b of an exactly quadratic log-density
/// f(x) = c + b^T x - x^T P x / 2, read off from evaluations at 0, +-e_h and
/// e_h + e_l.
template <typename F>
std::pair<Eigen::MatrixXd, Eigen::VectorXd> complete_quadratic(F&& f, Eigen::Index dim) {
  Eigen::MatrixXd P(dim, dim);
  Eigen::VectorXd b(dim);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(dim);
  const double f0 = f(zero);
  Eigen::VectorXd fp(dim), fm(dim);
  for (Eigen::Index h = 0; h < dim; ++h) {
    const Eigen::VectorXd e = Eigen::VectorXd::Unit(dim, h);
    fp[h] = f(e);
    fm[h] = f(-e);
    b[h] = 0.5 * (fp[h] - fm[h]);
    P(h, h) = 2.0 * f0 - fp[h] - fm[h];
  }
  for (Eigen::Index h = 0; h < dim; ++h)
    for (Eigen::Index l = h + 1; l < dim; ++l) {
      const Eigen::VectorXd e = Eigen::VectorXd::Unit(dim, h) + Eigen::VectorXd::Unit(dim, l);
      P(h, l) = P(l, h) = -(f(e) - fp[h] - fp[l] + f0);
    }
  return {P, b};
}

/// Augmented log conditional densities written term by term from the model.
double log_conditional_alpha(const jlsm::ModelState& s, const jlsm::Dataset& data, const jlsm::PriorConfig& prior,
                             Eigen::Index i, double value);
double log_conditional_latent(const jlsm::ModelState& s, const jlsm::Dataset& data, Eigen::Index i,
                              const Eigen::VectorXd& z);
double log_conditional_gamma(const jlsm::ModelState& s, const jlsm::Dataset& data, const jlsm::PriorConfig& prior,
                             Eigen::Index j, double value);
double log_conditional_loading(const jlsm::ModelState& s, const jlsm::Dataset& data, const jlsm::PriorConfig& prior,
                               Eigen::Index j, const Eigen::VectorXd& beta);

/// Mean and covariance from a completed quadratic form.
jlsm::GaussianConditional moments(const Eigen::MatrixXd& P, const Eigen::VectorXd& b);

/// Frozen random instance (n = 8, q = 3, k = 2) with one unobserved cell.
struct FrozenInstance {
  jlsm::Dataset data;
  jlsm::ModelState state;
  jlsm::PriorConfig prior;
};

FrozenInstance frozen_instance(jlsm::Family family, std::uint64_t seed);

struct KsResult {
  std::string name;
  double p_value = 0.0;
};

/// Redraws single sites of the frozen instance `draws` times through the
/// library update functions and compares each against its oracle law.
std::vector<KsResult> conditional_ks_suite(jlsm::Family family, int draws, std::uint64_t seed);

/// Column-variance conditional: spike frequency z-score and slab KS p-value.
struct ThetaCheck {
  double spike_z = 0.0;
  double slab_p_value = 0.0;
};

ThetaCheck theta_conditional_check(int draws, std::uint64_t seed);

}  // namespace oracle
