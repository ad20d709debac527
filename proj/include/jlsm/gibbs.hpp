#pragma once

#include <Eigen/Dense>

#include "jlsm/model.hpp"
#include "jlsm/rng.hpp"

namespace jlsm {

/// Non-owning view of the data a Gibbs cycle conditions on. Attributes may be
/// the raw dataset or an imputed working copy.
struct DataView {
  const Eigen::MatrixXd& A;
  const Eigen::MatrixXd& Y;
  const BoolMatrix& observed;
  Family family;

  DataView(const Dataset& d) : A(d.adjacency), Y(d.attributes), observed(d.observed), family(d.family) {}
  DataView(const Eigen::MatrixXd& a, const Eigen::MatrixXd& y, const BoolMatrix& obs, Family f)
      : A(a), Y(y), observed(obs), family(f) {}

  Eigen::Index n() const { return A.rows(); }
  Eigen::Index q() const { return Y.cols(); }
};

struct SamplerOptions {
  bool coss = true;     // false: fixed k with theta_h == 1 and no shrinkage updates
  bool impute = false;  // redraw unobserved attribute cells at the start of every cycle
  int threads = 1;      // workers for the Polya-Gamma augmentation draws
};

struct NormalConditional {
  double mean = 0.0;
  double variance = 0.0;
};

struct GaussianConditional {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;
};

struct InverseGammaConditional {
  double shape = 0.0;
  double rate = 0.0;
};

/// Chain starting point: alpha = gamma = 0, Z ~ N(0, 1), B = 0, sigma2 = 1,
/// augmentation at the PG(1, 0) mean.
ModelState initial_state(const Dataset& data, int k, const PriorConfig& prior,
                         const SamplerOptions& options, RngStream& rng);

// ---- full conditionals (analytic form, shared by the samplers and tests) ----

NormalConditional alpha_conditional(const ModelState& s, const DataView& data, const PriorConfig& prior,
                                    Eigen::Index i);
GaussianConditional latent_conditional(const ModelState& s, const DataView& data,
                                       const PriorConfig& prior, Eigen::Index i);
NormalConditional gamma_conditional(const ModelState& s, const DataView& data, const PriorConfig& prior,
                                    Eigen::Index j);
GaussianConditional loading_conditional(const ModelState& s, const DataView& data,
                                        const PriorConfig& prior, Eigen::Index j);
InverseGammaConditional noise_variance_conditional(const ModelState& s, const DataView& data,
                                                   const PriorConfig& prior, Eigen::Index j);

// ---- shared steps ----

/// d^A_{ii'} = d^A_{i'i} ~ PG(1, Theta^A_{ii'}) for i < i'. Each row draws from
/// its own stream split off `rng`, so the result does not depend on `threads`.
void update_augmentation_network(ModelState& s, const DataView& data, RngStream& rng, int threads = 1);

/// Systematic scan over i; each alpha_i conditions on the freshest alpha values.
void update_alpha(ModelState& s, const DataView& data, const PriorConfig& prior, RngStream& rng);

/// Systematic scan over i of z_i | rest (family-specific attribute term).
void update_latent_positions(ModelState& s, const DataView& data, const PriorConfig& prior,
                             RngStream& rng);

// ---- Gaussian attributes ----

void update_latent_positions_gaussian(ModelState& s, const DataView& data, const PriorConfig& prior,
                                      RngStream& rng);
void update_gamma_gaussian(ModelState& s, const DataView& data, const PriorConfig& prior, RngStream& rng);
void update_loadings_gaussian(ModelState& s, const DataView& data, const PriorConfig& prior,
                              RngStream& rng);
void update_noise_variance(ModelState& s, const DataView& data, const PriorConfig& prior, RngStream& rng);

// ---- Bernoulli attributes ----

void update_augmentation_attributes(ModelState& s, const DataView& data, RngStream& rng, int threads = 1);
void update_latent_positions_bernoulli(ModelState& s, const DataView& data, const PriorConfig& prior,
                                       RngStream& rng);
void update_gamma_bernoulli(ModelState& s, const DataView& data, const PriorConfig& prior, RngStream& rng);
void update_loadings_bernoulli(ModelState& s, const DataView& data, const PriorConfig& prior,
                               RngStream& rng);

/// Working copy of Y with every unobserved cell drawn from its likelihood at
/// the current parameters (Bernoulli(logit^-1(Theta^Y)) or N(Theta^Y, sigma2)).
Eigen::MatrixXd impute_missing_attributes(const ModelState& s, const Dataset& data, RngStream& rng);

// ---- full cycles ----

/// One Gibbs sweep for Gaussian attributes. Leaves k unchanged. When imputation
/// is on, `s.imputed` holds the working attribute matrix used in the sweep.
void gibbs_cycle_gaussian(ModelState& s, const Dataset& data, const PriorConfig& prior, RngStream& rng,
                          const SamplerOptions& options = {});
void gibbs_cycle_bernoulli(ModelState& s, const Dataset& data, const PriorConfig& prior, RngStream& rng,
                           const SamplerOptions& options = {});

/// Dispatches on data.family.
void gibbs_cycle(ModelState& s, const Dataset& data, const PriorConfig& prior, RngStream& rng,
                 const SamplerOptions& options = {});

}  // namespace jlsm
