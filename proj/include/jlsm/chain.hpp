#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "jlsm/adaptive.hpp"
#include "jlsm/gibbs.hpp"
#include "jlsm/model.hpp"

namespace jlsm {

/// Kept iterations of a run (after burn-in and thinning).
///
/// Z[s] and B[s] may change column count across iterations when the
/// truncation adapts; k_star[s] is the active dimension recorded before any
/// adaptation at that iteration.
struct PosteriorChain {
  Family family = Family::Gaussian;
  std::vector<long> iteration;
  std::vector<Eigen::VectorXd> alpha;
  std::vector<Eigen::VectorXd> gamma;
  std::vector<Eigen::VectorXd> sigma2;
  std::vector<Eigen::MatrixXd> Z;
  std::vector<Eigen::MatrixXd> B;
  std::vector<Eigen::VectorXd> theta;
  std::vector<Eigen::VectorXi> active;  // 1 for slab columns; all 1 in fixed-k mode
  std::vector<int> k_star;
  std::vector<double> log_lik;
  std::vector<Eigen::VectorXd> imputed;  // unobserved cells, column-major order

  std::size_t size() const { return alpha.size(); }
  bool empty() const { return alpha.empty(); }

  void push(const ModelState& s, long t, int k_star_value, double ll, const Dataset& data, bool coss);
};

enum class FitMode { Coss, FixedK };

/// MCMC schedule and model settings for one run.
struct RunConfig {
  PriorConfig prior;
  AdaptationSchedule adaptation;
  long iterations = 25000;
  long burn_in = 10000;
  long thin = 5;
  Family family = Family::Gaussian;
  FitMode mode = FitMode::Coss;
  std::uint64_t seed = 1;
  bool impute = false;
  int threads = 1;

  void validate() const;
  SamplerOptions sampler_options() const;
};

/// Runs the (adaptive) Gibbs sampler on `data` and returns the kept draws.
/// The truncation starts at prior.k_init; in FixedK mode it never changes and
/// theta_h == 1.
PosteriorChain run_chain(const Dataset& data, const RunConfig& config);

}  // namespace jlsm
