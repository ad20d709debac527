#pragma once

#include <Eigen/Dense>

#include "jlsm/rng.hpp"

namespace jlsm {

/// One exact draw from the Polya-Gamma PG(1, c) law.
///
/// Alternating-series accept/reject sampler for J*(1, |c|/2) with the
/// exponential / truncated inverse-Gaussian proposal split at 0.64; the
/// returned value is J/4. Total on finite input; depends on c only via |c|.
double sample_polya_gamma(double c, RngStream& rng);

/// PG(1, c) mean, tanh(c/2) / (2c), with the c -> 0 limit 1/4.
double polya_gamma_mean(double c);

/// Approximate PG(1, c) draw from the first `terms` terms of the
/// sum-of-gammas representation (plus a mean-matching tail correction).
/// Internal fallback only; the exact sampler is the default everywhere.
double sample_polya_gamma_truncated(double c, RngStream& rng, int terms = 200);

/// Gamma(shape, rate) via Marsaglia-Tsang.
double sample_gamma(double shape, double rate, RngStream& rng);

/// Inverse-Gamma with density proportional to x^(-shape-1) exp(-rate/x).
double sample_inverse_gamma(double shape, double rate, RngStream& rng);

double sample_beta(double a, double b, RngStream& rng);

/// Standard normal vector of length `dim`.
Eigen::VectorXd sample_standard_normal(Eigen::Index dim, RngStream& rng);

/// Draw from N(mean, covariance).
Eigen::VectorXd sample_mvn(const Eigen::Ref<const Eigen::VectorXd>& mean,
                           const Eigen::Ref<const Eigen::MatrixXd>& covariance, RngStream& rng);

/// Draw from N(precision^{-1} linear, precision^{-1}).
///
/// This is the natural form of every Gaussian full conditional: precision is
/// the sum of prior and data precisions, linear the corresponding shift.
Eigen::VectorXd sample_mvn_precision(const Eigen::Ref<const Eigen::MatrixXd>& precision,
                                     const Eigen::Ref<const Eigen::VectorXd>& linear, RngStream& rng);

/// Cholesky factor of a symmetric positive-definite matrix.
///
/// On failure, adds 1e-10 * (trace/dim) * I and retries up to three times with
/// tenfold escalation; throws FactorizationError afterwards.
Eigen::LLT<Eigen::MatrixXd> robust_cholesky(const Eigen::Ref<const Eigen::MatrixXd>& spd);

/// sum_i log N(x_i; 0, theta0)
double log_density_spike_normal(const Eigen::Ref<const Eigen::VectorXd>& x, double theta0);

/// log t_{2 a}(x; 0, (b/a) I_n): the column density of N(0, theta I_n) with a
/// single shared theta ~ IG(a, b) integrated out.
double log_density_slab_multivariate_t(const Eigen::Ref<const Eigen::VectorXd>& x, double a_theta,
                                       double b_theta);

/// Numerically stable log(1 + exp(x)).
inline double log1p_exp(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

inline double inv_logit(double x) {
  return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

}  // namespace jlsm
