#pragma once

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "jlsm/coss.hpp"
#include "jlsm/distributions.hpp"
#include "jlsm/errors.hpp"

namespace jlsm {

enum class Family { Gaussian, Bernoulli };

std::string to_string(Family f);
Family family_from_string(const std::string& s);

using BoolMatrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// Undirected network plus node attributes.
///
/// `adjacency` is a dense 0/1 matrix stored as double; `observed(i, j)` is true
/// for observed attribute cells (unobserved cells hold an arbitrary value).
struct Dataset {
  Eigen::MatrixXd adjacency;
  Eigen::MatrixXd attributes;
  BoolMatrix observed;
  Family family = Family::Gaussian;

  Eigen::Index n() const { return adjacency.rows(); }
  Eigen::Index q() const { return attributes.cols(); }
  bool has_missing() const { return q() > 0 && !observed.all(); }

  /// Checks symmetry, hollowness, binary entries and family domain.
  void validate() const;

  static Dataset complete(Eigen::MatrixXd adjacency, Eigen::MatrixXd attributes, Family family);
};

/// Hyperparameters. Defaults follow the simulation settings used for the
/// desk-scale studies (a_theta = b_theta = 3, a = 8, theta0 = 0.1, k = 8).
struct PriorConfig {
  double sigma_alpha = 100.0;
  double sigma_gamma = 100.0;
  double sigma_B = 1.0;
  double a_sigma = 1.0;
  double b_sigma = 1.0;
  double a_theta = 3.0;
  double b_theta = 3.0;
  double kappa = 0.0;  // <= 0 means "use k_init^2"
  double a_stick = 8.0;
  double theta0 = 0.1;
  int k_init = 8;

  double kappa_value() const { return kappa > 0.0 ? kappa : double(k_init) * double(k_init); }

  /// All positive and theta0 < b_theta / a_theta.
  void validate() const;
};

struct ModelState {
  Eigen::VectorXd alpha;
  Eigen::VectorXd gamma;
  Eigen::MatrixXd Z;       // n x k
  Eigen::MatrixXd B;       // q x k
  Eigen::VectorXd sigma2;  // Gaussian family only; empty otherwise
  Eigen::MatrixXd aug_A;   // symmetric, zero diagonal
  Eigen::MatrixXd aug_Y;   // Bernoulli family only
  ShrinkageState shrinkage;
  Eigen::MatrixXd imputed;  // working attribute matrix when imputation is on

  int k() const { return static_cast<int>(Z.cols()); }

  /// Throws DimensionError if field shapes disagree with the dataset or k.
  void check_consistent(const Dataset& data) const;
};

/// Theta^A_{ii'} = alpha_i + alpha_i' + z_i^T z_i'.
template <typename DerivedA, typename DerivedZ>
Eigen::MatrixXd natural_params_network(const Eigen::MatrixBase<DerivedA>& alpha,
                                       const Eigen::MatrixBase<DerivedZ>& Z) {
  if (alpha.size() != Z.rows()) throw DimensionError("natural_params_network: alpha/Z mismatch");
  Eigen::MatrixXd theta = Z * Z.transpose();
  theta.colwise() += alpha.derived().template cast<double>();
  theta.rowwise() += alpha.derived().template cast<double>().transpose();
  // mirror so the result is exactly symmetric regardless of summation order
  theta.template triangularView<Eigen::StrictlyLower>() = theta.transpose();
  return theta;
}

/// Theta^Y_{ij} = gamma_j + beta_j^T z_i.
template <typename DerivedG, typename DerivedZ, typename DerivedB>
Eigen::MatrixXd natural_params_attributes(const Eigen::MatrixBase<DerivedG>& gamma,
                                          const Eigen::MatrixBase<DerivedZ>& Z,
                                          const Eigen::MatrixBase<DerivedB>& B) {
  if (B.cols() != Z.cols() || gamma.size() != B.rows())
    throw DimensionError("natural_params_attributes: gamma/Z/B mismatch");
  Eigen::MatrixXd theta = Z * B.transpose();
  theta.rowwise() += gamma.derived().template cast<double>().transpose();
  return theta;
}

/// log-likelihood of one network dyad given its natural parameter.
inline double dyad_log_lik(double a, double eta) { return a * eta - log1p_exp(eta); }

/// Log-likelihood of (A, Y) given the parameters; unobserved attribute cells
/// are excluded.
double joint_log_likelihood(const Dataset& data, const Eigen::Ref<const Eigen::VectorXd>& alpha,
                            const Eigen::Ref<const Eigen::VectorXd>& gamma,
                            const Eigen::Ref<const Eigen::MatrixXd>& Z,
                            const Eigen::Ref<const Eigen::MatrixXd>& B,
                            const Eigen::Ref<const Eigen::VectorXd>& sigma2);

double joint_log_likelihood(const Dataset& data, const ModelState& state);

/// Per-cell attribute log-likelihood for a natural parameter and scale.
double attribute_cell_log_lik(Family family, double y, double eta, double sigma2);

}  // namespace jlsm
