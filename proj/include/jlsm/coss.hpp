#pragma once

#include <vector>

#include <Eigen/Dense>

#include "jlsm/rng.hpp"

namespace jlsm {

struct PriorConfig;

/// Internals of the cumulative ordered spike-and-slab prior on the column
/// variances of Z. Indices are 0-based in storage; `rho` stores 1-based
/// category labels so that column h (1-based) is in the spike iff rho[h-1] <= h.
struct ShrinkageState {
  int k = 0;
  Eigen::VectorXd v;      // stick proportions, v[k-1] == 1
  Eigen::VectorXd omega;  // stick weights (simplex)
  Eigen::VectorXd pi;     // cumulative spike probabilities, pi[k-1] == 1
  Eigen::VectorXi rho;    // category labels in {1..k}
  Eigen::VectorXd theta;  // column variances

  /// Whether column h (0-based) is currently assigned to the slab.
  bool active(int h) const { return rho[h] > h + 1; }

  /// Starting point for a chain: every column but the last in the slab
  /// (rho_h = k, theta_h = 1), v at its prior mean.
  static ShrinkageState initial(int k, const PriorConfig& prior);

  /// Recomputes omega and pi from v.
  void refresh_weights();
};

/// omega_l = v_l prod_{m<l} (1 - v_m). Throws DomainError for v outside
/// [0, 1] or a last entry different from 1.
Eigen::VectorXd stick_breaking_weights(const Eigen::Ref<const Eigen::VectorXd>& v);

/// Prefix sums of omega with the final entry forced to exactly 1.
Eigen::VectorXd cumulative_spike_probs(const Eigen::Ref<const Eigen::VectorXd>& omega);

/// Unnormalized log-probabilities of rho_h = l, l = 1..k, for column h (1-based).
Eigen::VectorXd rho_log_weights(int h, const Eigen::Ref<const Eigen::VectorXd>& omega,
                                const Eigen::Ref<const Eigen::VectorXd>& z_col,
                                const PriorConfig& prior);

/// Categorical draw of rho_h (returned 1-based) from its full conditional.
int sample_rho(int h, const Eigen::Ref<const Eigen::VectorXd>& omega,
               const Eigen::Ref<const Eigen::VectorXd>& z_col, const PriorConfig& prior,
               RngStream& rng);

/// theta0 when rho_h <= h, otherwise IG(a_theta + n/2, b_theta + |z|^2 / 2).
double sample_theta(int h, int rho_h, const Eigen::Ref<const Eigen::VectorXd>& z_col,
                    const PriorConfig& prior, RngStream& rng);

/// Beta updates of v_1..v_{k-1} given rho; v_k = 1.
Eigen::VectorXd sample_sticks(const Eigen::Ref<const Eigen::VectorXi>& rho, const PriorConfig& prior,
                              RngStream& rng);

/// K* = sum_h 1(rho_h > h).
int active_dimension(const Eigen::Ref<const Eigen::VectorXi>& rho);

/// Steps 7-10 on the shrinkage state for the current Z: rho, then v / omega / pi,
/// then theta.
void update_shrinkage(ShrinkageState& s, const Eigen::Ref<const Eigen::MatrixXd>& Z,
                      const PriorConfig& prior, RngStream& rng);

struct PriorDraw {
  Eigen::VectorXd pi;
  Eigen::VectorXd theta;
};

/// Forward simulation v -> omega -> pi -> (rho, theta) from the prior at
/// truncation prior.k_init.
std::vector<PriorDraw> prior_predictive_theta(const PriorConfig& prior, int count, RngStream& rng);

/// Draws (v, rho, theta) jointly from the prior for truncation k.
ShrinkageState sample_shrinkage_prior(int k, const PriorConfig& prior, RngStream& rng);

}  // namespace jlsm
