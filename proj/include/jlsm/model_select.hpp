#pragma once

#include <vector>

#include <Eigen/Dense>

#include "jlsm/chain.hpp"
#include "jlsm/model.hpp"

namespace jlsm {

/// Fixed-k JLSM with independent N(0, 1) latent priors: no shrinkage updates,
/// theta_h == 1, no adaptation.
PosteriorChain fit_fixed_dimension(const Dataset& data, int k, const RunConfig& config, RngStream& rng);

/// Number of free parameters: nk + qk + n + 2q (Gaussian) or nk + qk + n + q (Bernoulli).
long parameter_count(Family family, Eigen::Index n, Eigen::Index q, int k);

/// One coherent parameter point from a constant-k chain.
struct ParameterPoint {
  Eigen::VectorXd alpha;
  Eigen::VectorXd gamma;
  Eigen::MatrixXd Z;
  Eigen::MatrixXd B;
  Eigen::VectorXd sigma2;
};

/// Orthogonal Q minimizing |X Q - target|_F (orthogonal Procrustes).
Eigen::MatrixXd procrustes_rotation(const Eigen::Ref<const Eigen::MatrixXd>& X,
                                    const Eigen::Ref<const Eigen::MatrixXd>& target);

/// Raw coordinate posterior means after rotating every (Z, B) draw onto the
/// last kept Z. Throws DomainError if k varies along the chain.
ParameterPoint aligned_posterior_mean(const PosteriorChain& chain);

double criterion_aic(const PosteriorChain& chain, const Dataset& data);
/// -2 log L(xi_hat) + 2 d log n (factor 2 kept as defined for this suite).
double criterion_bic(const PosteriorChain& chain, const Dataset& data);
double criterion_dic(const PosteriorChain& chain, const Dataset& data);
double criterion_waic(const PosteriorChain& chain, const Dataset& data);

struct WaicParts {
  double lppd_network = 0.0;     // sum over dyads of log mean_s Pr(A_ii' | xi_s)
  double lppd_attributes = 0.0;  // sum over observed cells
  double penalty_network = 0.0;  // sum of sample variances of log Pr(A_ii' | xi)
  double penalty_attributes = 0.0;
  double waic() const {
    return -2.0 * (lppd_network + lppd_attributes - penalty_network - penalty_attributes);
  }
};

WaicParts waic_parts(const PosteriorChain& chain, const Dataset& data);

struct CriteriaReport {
  int k = 0;
  long d = 0;
  double log_lik_at_mean = 0.0;
  double mean_log_lik = 0.0;
  double p_dic = 0.0;
  double aic = 0.0;
  double bic = 0.0;
  double dic = 0.0;
  double waic = 0.0;
};

CriteriaReport compute_criteria(const PosteriorChain& chain, const Dataset& data);

/// Smallest candidate whose mean lies within one standard error of the best.
int one_se_selection(const std::vector<int>& candidates, const std::vector<double>& mean,
                     const std::vector<double>& se);

struct CvResult {
  std::vector<int> candidates;
  std::vector<std::vector<double>> fold_log_lik;  // [candidate][fold]
  std::vector<double> mean;
  std::vector<double> se;
  int selected = 0;
  int selected_1se = 0;
};

/// Node-level K-fold cross-validation of fixed-k fits (held-out log-likelihood
/// of every dyad touching a test node plus the test nodes' attribute rows).
CvResult kfold_cv(const Dataset& data, const std::vector<int>& candidates, int folds,
                  const RunConfig& config, RngStream& rng);

/// (alpha_i, z_i) for an unseen node: posterior mode of its network
/// conditional given frozen training-side alpha and Z (Newton iterations).
/// `links` holds the node's edges to the training nodes.
std::pair<double, Eigen::VectorXd> estimate_new_node(const Eigen::Ref<const Eigen::VectorXd>& links,
                                                     const Eigen::Ref<const Eigen::VectorXd>& alpha_train,
                                                     const Eigen::Ref<const Eigen::MatrixXd>& Z_train,
                                                     double sigma_alpha);

struct SelectionTable {
  std::vector<CriteriaReport> rows;
  int best_aic = 0, best_bic = 0, best_dic = 0, best_waic = 0;
};

SelectionTable select_dimension(const Dataset& data, const std::vector<int>& candidates,
                                const RunConfig& config, RngStream& rng);

}  // namespace jlsm
