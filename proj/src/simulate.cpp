#include "jlsm/simulate.hpp"

#include "jlsm/distributions.hpp"

namespace jlsm {

void SimDesign::validate() const {
  if (n < 2) throw DomainError("simulation needs n >= 2");
  if (q < 0) throw DomainError("simulation needs q >= 0");
  if (k0 < 1) throw DomainError("simulation needs k0 >= 1");
  if (!(alpha_lo <= alpha_hi)) throw DomainError("alpha range is empty");
  if (!(0.0 < loading_lo && loading_lo <= loading_hi)) throw DomainError("loading range must be positive");
  if (!(noise_sd > 0.0)) throw DomainError("noise_sd must be positive");
}

Dataset simulate_from_parameters(const Eigen::Ref<const Eigen::VectorXd>& alpha,
                                 const Eigen::Ref<const Eigen::VectorXd>& gamma,
                                 const Eigen::Ref<const Eigen::MatrixXd>& Z,
                                 const Eigen::Ref<const Eigen::MatrixXd>& B,
                                 const Eigen::Ref<const Eigen::VectorXd>& sigma2, Family family,
                                 RngStream& rng) {
  const Eigen::Index n = Z.rows();
  const Eigen::Index q = B.rows();
  const Eigen::MatrixXd theta_a = natural_params_network(alpha, Z);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 1; j < n; ++j)
    for (Eigen::Index i = 0; i < j; ++i) {
      const double a = rng.uniform() < inv_logit(theta_a(i, j)) ? 1.0 : 0.0;
      A(i, j) = a;
      A(j, i) = a;
    }
  Eigen::MatrixXd Y(n, q);
  if (q > 0) {
    const Eigen::MatrixXd theta_y = natural_params_attributes(gamma, Z, B);
    for (Eigen::Index j = 0; j < q; ++j)
      for (Eigen::Index i = 0; i < n; ++i)
        Y(i, j) = family == Family::Gaussian
                      ? theta_y(i, j) + std::sqrt(sigma2[j]) * rng.normal()
                      : (rng.uniform() < inv_logit(theta_y(i, j)) ? 1.0 : 0.0);
  }
  return Dataset::complete(std::move(A), std::move(Y), family);
}

std::pair<Dataset, GroundTruth> generate_dataset(const SimDesign& design, RngStream& rng) {
  design.validate();
  const Eigen::Index n = design.n;
  const Eigen::Index q = design.q;
  GroundTruth truth;
  truth.alpha.resize(n);
  for (Eigen::Index i = 0; i < n; ++i)
    truth.alpha[i] = design.alpha_lo + (design.alpha_hi - design.alpha_lo) * rng.uniform();
  truth.gamma.resize(q);
  for (Eigen::Index j = 0; j < q; ++j) truth.gamma[j] = rng.normal();
  truth.Z.resize(n, design.k0);
  for (Eigen::Index h = 0; h < design.k0; ++h)
    for (Eigen::Index i = 0; i < n; ++i) truth.Z(i, h) = rng.normal();
  truth.B = Eigen::MatrixXd::Zero(q, design.k0);
  for (Eigen::Index j = 0; j < q; ++j)
    truth.B(j, j % design.k0) =
        design.loading_lo + (design.loading_hi - design.loading_lo) * rng.uniform();
  truth.sigma2 = Eigen::VectorXd::Constant(q, design.noise_sd * design.noise_sd);

  Dataset data = simulate_from_parameters(truth.alpha, truth.gamma, truth.Z, truth.B, truth.sigma2,
                                          design.family, rng);
  truth.density = network_density(data.adjacency);
  return {std::move(data), std::move(truth)};
}

double network_density(const Eigen::Ref<const Eigen::MatrixXd>& A) {
  const double n = static_cast<double>(A.rows());
  if (n < 2) return 0.0;
  return A.sum() / (n * (n - 1.0));
}

}  // namespace jlsm
