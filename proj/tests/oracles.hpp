#pragma once

// Independent reference computations used by unit and acceptance tests.

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "jlsm/model.hpp"
#include "jlsm/rng.hpp"

namespace oracle {

double mean(const std::vector<double>& x);
double variance(const std::vector<double>& x);  // sample variance (n - 1)
double standard_error(const std::vector<double>& x);

/// Batch-means standard error of the mean of an autocorrelated series.
double batch_means_se(const std::vector<double>& x, int batches = 50);

/// Asymptotic Kolmogorov p-value with Stephens' small-sample correction.
double kolmogorov_pvalue(double d, double effective_n);
double ks_one_sample(std::vector<double> x, const std::function<double(double)>& cdf);
double ks_two_sample(std::vector<double> a, std::vector<double> b);

/// PG(1, c) density from its alternating series; `large_x_series` picks the
/// eigenfunction expansion instead of the image expansion.
double polya_gamma_density(double x, double c, bool large_x_series);
/// Density choosing whichever series converges fastest at x.
double polya_gamma_density(double x, double c);
/// E[X^power] of PG(1, c) by quadrature of the series density.
double polya_gamma_moment(double c, int power);
/// CDF of PG(1, c) by quadrature of the series density.
double polya_gamma_cdf(double x, double c);

/// log of int prod_i N(x_i; 0, theta) IG(theta; a, b) dtheta by 1-D quadrature.
double log_slab_by_quadrature(const Eigen::VectorXd& x, double a, double b);

/// Normal CDF and Inverse-Gamma(shape, rate) CDF.
double normal_cdf(double x, double mean, double variance);
double inverse_gamma_cdf(double x, double shape, double rate);

/// Theta^A and Theta^Y by scalar loops.
Eigen::MatrixXd naive_theta_network(const Eigen::VectorXd& alpha, const Eigen::MatrixXd& Z);
Eigen::MatrixXd naive_theta_attributes(const Eigen::VectorXd& gamma, const Eigen::MatrixXd& Z,
                                       const Eigen::MatrixXd& B);

/// Joint log-likelihood as a sum of per-dyad and per-cell log pmf / pdf values.
double naive_log_likelihood(const jlsm::Dataset& data, const Eigen::VectorXd& alpha, const Eigen::VectorXd& gamma,
                            const Eigen::MatrixXd& Z, const Eigen::MatrixXd& B, const Eigen::VectorXd& sigma2);

/// Random orthogonal matrix (QR of a Gaussian matrix).
Eigen::MatrixXd random_orthogonal(int k, jlsm::RngStream& rng);
Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, jlsm::RngStream& rng, double scale = 1.0);
Eigen::VectorXd random_vector(Eigen::Index size, jlsm::RngStream& rng, double scale = 1.0);

/// Random symmetric hollow 0/1 adjacency with edge probability p.
Eigen::MatrixXd random_adjacency(Eigen::Index n, double p, jlsm::RngStream& rng);

}  // namespace oracle
