#pragma once

#include <map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "jlsm/chain.hpp"
#include "jlsm/simulate.hpp"

namespace jlsm {

/// Rotation-invariant posterior summaries. Gram products are averaged per
/// iteration, so chains whose k varies are handled without alignment.
struct PointEstimate {
  Eigen::VectorXd alpha;
  Eigen::VectorXd gamma;
  Eigen::VectorXd sigma2;
  Eigen::MatrixXd ZZt;  // mean of Z Z^T  (n x n)
  Eigen::MatrixXd BBt;  // mean of B B^T  (q x q)
  Eigen::MatrixXd ZBt;  // mean of Z B^T  (n x q)
};

/// Which latent columns enter the Gram averages: all of them, or only the
/// slab columns of each kept iteration (spike columns treated as absent).
enum class Columns { All, Active };

PointEstimate posterior_mean_state(const PosteriorChain& chain, Columns columns = Columns::All);

/// |mean(Z Z^T) - Z0 Z0^T|_F / n
double metric_delta_Z(const PointEstimate& est, const GroundTruth& truth);
/// |mean(B B^T) - B0 B0^T|_F / q
double metric_delta_B(const PointEstimate& est, const GroundTruth& truth);
/// |alpha_hat - alpha0|_2 / sqrt(n)
double metric_delta_alpha(const PointEstimate& est, const GroundTruth& truth);
/// |gamma_hat - gamma0|_2 / sqrt(q)
double metric_delta_gamma(const PointEstimate& est, const GroundTruth& truth);

double metric_delta_Z(const PosteriorChain& chain, const GroundTruth& truth, Columns columns = Columns::All);

/// Frequency table of K* over kept iterations.
std::map<int, long> dimension_frequencies(const std::vector<int>& k_star);

/// Most frequent K*; ties go to the smaller dimension.
int posterior_mode_dimension(const std::vector<int>& k_star);
int posterior_mode_dimension(const PosteriorChain& chain);

struct DimensionAccuracy {
  double accuracy = 0.0;
  double mab = 0.0;         // mean |K_hat - k0| over misses
  bool mab_defined = true;  // false when there were no misses (mab reported as 0)
};

DimensionAccuracy dimension_accuracy(const std::vector<int>& k_hat, int k0);

/// Rank-based AUROC (ties count one half). Throws DataError without both
/// label classes.
double auroc(const std::vector<std::pair<double, int>>& scores);

}  // namespace jlsm
