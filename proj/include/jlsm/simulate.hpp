#pragma once

#include <cstdint>
#include <utility>

#include <Eigen/Dense>

#include "jlsm/model.hpp"
#include "jlsm/rng.hpp"

namespace jlsm {

struct SimDesign {
  Eigen::Index n = 100;
  Eigen::Index q = 20;
  int k0 = 3;
  Family family = Family::Gaussian;
  double alpha_lo = -0.5;
  double alpha_hi = 0.5;
  double loading_lo = 0.25;
  double loading_hi = 1.25;
  double noise_sd = 1.0;
  std::uint64_t seed = 1;

  void validate() const;
};

struct GroundTruth {
  Eigen::VectorXd alpha;
  Eigen::VectorXd gamma;
  Eigen::MatrixXd Z;
  Eigen::MatrixXd B;
  Eigen::VectorXd sigma2;  // generation noise variance (Gaussian family)
  double density = 0.0;
};

/// alpha ~ U(alpha range), gamma ~ N(0, 1), z_ih ~ N(0, 1), simple-structure B
/// (row j loads only on column j mod k0, magnitude ~ U(loading range)), then
/// A and Y from the joint model. Deterministic in (design, rng).
std::pair<Dataset, GroundTruth> generate_dataset(const SimDesign& design, RngStream& rng);

/// Draws A (and Y) from the likelihood at fixed parameters. `sigma2` is ignored
/// for the Bernoulli family.
Dataset simulate_from_parameters(const Eigen::Ref<const Eigen::VectorXd>& alpha,
                                 const Eigen::Ref<const Eigen::VectorXd>& gamma,
                                 const Eigen::Ref<const Eigen::MatrixXd>& Z,
                                 const Eigen::Ref<const Eigen::MatrixXd>& B,
                                 const Eigen::Ref<const Eigen::VectorXd>& sigma2, Family family,
                                 RngStream& rng);

/// 2 * edges / (n (n - 1)).
double network_density(const Eigen::Ref<const Eigen::MatrixXd>& A);

}  // namespace jlsm
