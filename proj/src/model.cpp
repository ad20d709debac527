#include "jlsm/model.hpp"

#include <numbers>

namespace jlsm {

std::string to_string(Family f) { return f == Family::Gaussian ? "gaussian" : "bernoulli"; }

Family family_from_string(const std::string& s) {
  if (s == "gaussian" || s == "Gaussian") return Family::Gaussian;
  if (s == "bernoulli" || s == "Bernoulli") return Family::Bernoulli;
  throw DataError("unknown attribute family '" + s + "'");
}

void Dataset::validate() const {
  const Eigen::Index nodes = n();
  if (adjacency.cols() != nodes) throw DimensionError("adjacency must be square");
  if (nodes < 2) throw DataError("dataset needs at least two nodes");
  if (attributes.rows() != nodes && q() > 0)
    throw DimensionError("attribute rows must equal node count");
  if (observed.rows() != attributes.rows() || observed.cols() != attributes.cols())
    throw DimensionError("missing mask shape must match attributes");
  for (Eigen::Index i = 0; i < nodes; ++i) {
    if (adjacency(i, i) != 0.0) throw DataError("adjacency has a self-loop at node " + std::to_string(i));
    for (Eigen::Index j = i + 1; j < nodes; ++j) {
      const double a = adjacency(i, j);
      if (a != adjacency(j, i)) throw DataError("adjacency is not symmetric");
      if (a != 0.0 && a != 1.0) throw DataError("adjacency entries must be 0 or 1");
    }
  }
  if (family == Family::Bernoulli) {
    for (Eigen::Index j = 0; j < q(); ++j)
      for (Eigen::Index i = 0; i < attributes.rows(); ++i)
        if (observed(i, j) && attributes(i, j) != 0.0 && attributes(i, j) != 1.0)
          throw DataError("Bernoulli attributes must be 0 or 1");
  } else {
    for (Eigen::Index j = 0; j < q(); ++j)
      for (Eigen::Index i = 0; i < attributes.rows(); ++i)
        if (observed(i, j) && !std::isfinite(attributes(i, j)))
          throw DataError("Gaussian attributes must be finite");
  }
}

Dataset Dataset::complete(Eigen::MatrixXd adjacency, Eigen::MatrixXd attributes, Family family) {
  Dataset d;
  d.adjacency = std::move(adjacency);
  if (attributes.size() == 0) attributes.resize(d.adjacency.rows(), 0);
  d.attributes = std::move(attributes);
  d.observed = BoolMatrix::Constant(d.attributes.rows(), d.attributes.cols(), true);
  d.family = family;
  return d;
}

void PriorConfig::validate() const {
  const bool ok = sigma_alpha > 0 && sigma_gamma > 0 && sigma_B > 0 && a_sigma > 0 && b_sigma > 0 &&
                  a_theta > 0 && b_theta > 0 && a_stick > 0 && theta0 > 0 && k_init >= 1 &&
                  kappa_value() > 0;
  if (!ok) throw DomainError("prior hyperparameters must be strictly positive");
  if (!(theta0 < b_theta / a_theta))
    throw DomainError("spike variance theta0 must be below the slab scale b_theta / a_theta");
}

void ModelState::check_consistent(const Dataset& data) const {
  const Eigen::Index n = data.n();
  const Eigen::Index q = data.q();
  const Eigen::Index k = Z.cols();
  if (alpha.size() != n || Z.rows() != n) throw DimensionError("state: node dimension mismatch");
  if (gamma.size() != q || B.rows() != q) throw DimensionError("state: attribute dimension mismatch");
  if (B.cols() != k) throw DimensionError("state: Z and B column counts differ");
  if (shrinkage.k != k || shrinkage.theta.size() != k || shrinkage.rho.size() != k ||
      shrinkage.v.size() != k || shrinkage.omega.size() != k || shrinkage.pi.size() != k)
    throw DimensionError("state: shrinkage length does not match k");
  if (data.family == Family::Gaussian && sigma2.size() != q)
    throw DimensionError("state: sigma2 length must equal q");
  if (aug_A.rows() != n || aug_A.cols() != n) throw DimensionError("state: aug_A shape");
}

double attribute_cell_log_lik(Family family, double y, double eta, double sigma2) {
  if (family == Family::Gaussian) {
    const double r = y - eta;
    return -0.5 * (std::log(2.0 * std::numbers::pi * sigma2) + r * r / sigma2);
  }
  return y * eta - log1p_exp(eta);
}

double joint_log_likelihood(const Dataset& data, const Eigen::Ref<const Eigen::VectorXd>& alpha,
                            const Eigen::Ref<const Eigen::VectorXd>& gamma,
                            const Eigen::Ref<const Eigen::MatrixXd>& Z,
                            const Eigen::Ref<const Eigen::MatrixXd>& B,
                            const Eigen::Ref<const Eigen::VectorXd>& sigma2) {
  const Eigen::Index n = data.n();
  const Eigen::Index q = data.q();
  if (alpha.size() != n || Z.rows() != n) throw DimensionError("joint_log_likelihood: node dims");
  if (gamma.size() != q || B.rows() != q || (q > 0 && B.cols() != Z.cols()))
    throw DimensionError("joint_log_likelihood: attribute dims");
  if (data.family == Family::Gaussian && q > 0 && sigma2.size() != q)
    throw DimensionError("joint_log_likelihood: sigma2 length");

  const Eigen::MatrixXd theta_a = natural_params_network(alpha, Z);
  double ll = 0.0;
  for (Eigen::Index j = 1; j < n; ++j)
    for (Eigen::Index i = 0; i < j; ++i) ll += dyad_log_lik(data.adjacency(i, j), theta_a(i, j));

  if (q == 0) return ll;
  const Eigen::MatrixXd theta_y = natural_params_attributes(gamma, Z, B);
  for (Eigen::Index j = 0; j < q; ++j) {
    const double s2 = data.family == Family::Gaussian ? sigma2[j] : 1.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!data.observed(i, j)) continue;
      const double y = data.attributes(i, j);
      if (data.family == Family::Bernoulli && y != 0.0 && y != 1.0)
        throw DataError("Bernoulli attribute is not binary");
      ll += attribute_cell_log_lik(data.family, y, theta_y(i, j), s2);
    }
  }
  return ll;
}

double joint_log_likelihood(const Dataset& data, const ModelState& state) {
  return joint_log_likelihood(data, state.alpha, state.gamma, state.Z, state.B, state.sigma2);
}

}  // namespace jlsm
