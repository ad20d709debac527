#include "jlsm/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace jlsm {

PointEstimate posterior_mean_state(const PosteriorChain& chain, Columns columns) {
  if (chain.empty()) throw DomainError("posterior_mean_state: empty chain");
  if (columns == Columns::Active && chain.active.size() != chain.size())
    throw DomainError("posterior_mean_state: chain carries no column activity record");
  const Eigen::Index n = chain.alpha.front().size();
  const Eigen::Index q = chain.gamma.front().size();

  // running means: a chain of identical states reproduces that state exactly
  PointEstimate est;
  est.alpha = Eigen::VectorXd::Zero(n);
  est.gamma = Eigen::VectorXd::Zero(q);
  est.sigma2 = Eigen::VectorXd::Zero(chain.sigma2.front().size());
  est.ZZt = Eigen::MatrixXd::Zero(n, n);
  est.BBt = Eigen::MatrixXd::Zero(q, q);
  est.ZBt = Eigen::MatrixXd::Zero(n, q);
  Eigen::MatrixXd gram, Zs, Bs;
  for (std::size_t s = 0; s < chain.size(); ++s) {
    const bool all = columns == Columns::All;
    if (!all) {
      std::vector<Eigen::Index> keep;
      for (Eigen::Index h = 0; h < chain.active[s].size(); ++h)
        if (chain.active[s][h] != 0) keep.push_back(h);
      Zs = chain.Z[s](Eigen::all, keep);
      Bs = chain.B[s](Eigen::all, keep);
    }
    const Eigen::MatrixXd& Z = all ? chain.Z[s] : Zs;
    const Eigen::MatrixXd& B = all ? chain.B[s] : Bs;
    const double w = 1.0 / double(s + 1);
    est.alpha += w * (chain.alpha[s] - est.alpha);
    est.gamma += w * (chain.gamma[s] - est.gamma);
    if (est.sigma2.size() > 0) est.sigma2 += w * (chain.sigma2[s] - est.sigma2);
    gram.noalias() = Z * Z.transpose();
    est.ZZt += w * (gram - est.ZZt);
    if (q > 0) {
      gram.noalias() = B * B.transpose();
      est.BBt += w * (gram - est.BBt);
      gram.noalias() = Z * B.transpose();
      est.ZBt += w * (gram - est.ZBt);
    }
  }
  return est;
}

double metric_delta_Z(const PointEstimate& est, const GroundTruth& truth) {
  const Eigen::MatrixXd target = truth.Z * truth.Z.transpose();
  if (target.rows() != est.ZZt.rows()) throw DimensionError("metric_delta_Z: node count mismatch");
  return (est.ZZt - target).norm() / static_cast<double>(target.rows());
}

double metric_delta_B(const PointEstimate& est, const GroundTruth& truth) {
  const Eigen::MatrixXd target = truth.B * truth.B.transpose();
  if (target.rows() != est.BBt.rows()) throw DimensionError("metric_delta_B: attribute count mismatch");
  if (target.rows() == 0) return 0.0;
  return (est.BBt - target).norm() / static_cast<double>(target.rows());
}

double metric_delta_alpha(const PointEstimate& est, const GroundTruth& truth) {
  if (truth.alpha.size() != est.alpha.size()) throw DimensionError("metric_delta_alpha: size mismatch");
  return (est.alpha - truth.alpha).norm() / std::sqrt(double(truth.alpha.size()));
}

double metric_delta_gamma(const PointEstimate& est, const GroundTruth& truth) {
  if (truth.gamma.size() != est.gamma.size()) throw DimensionError("metric_delta_gamma: size mismatch");
  if (truth.gamma.size() == 0) return 0.0;
  return (est.gamma - truth.gamma).norm() / std::sqrt(double(truth.gamma.size()));
}

double metric_delta_Z(const PosteriorChain& chain, const GroundTruth& truth, Columns columns) {
  return metric_delta_Z(posterior_mean_state(chain, columns), truth);
}

std::map<int, long> dimension_frequencies(const std::vector<int>& k_star) {
  std::map<int, long> freq;
  for (int k : k_star) ++freq[k];
  return freq;
}

int posterior_mode_dimension(const std::vector<int>& k_star) {
  if (k_star.empty()) throw DomainError("posterior_mode_dimension: empty K* trace");
  int best = 0;
  long best_count = -1;
  for (const auto& [k, count] : dimension_frequencies(k_star))  // ascending k: strict > keeps smaller on ties
    if (count > best_count) {
      best = k;
      best_count = count;
    }
  return best;
}

int posterior_mode_dimension(const PosteriorChain& chain) { return posterior_mode_dimension(chain.k_star); }

DimensionAccuracy dimension_accuracy(const std::vector<int>& k_hat, int k0) {
  if (k_hat.empty()) throw DomainError("dimension_accuracy: no replications");
  long hits = 0;
  long misses = 0;
  double bias = 0.0;
  for (int k : k_hat) {
    if (k == k0) {
      ++hits;
    } else {
      ++misses;
      bias += std::abs(k - k0);
    }
  }
  DimensionAccuracy out;
  out.accuracy = double(hits) / double(k_hat.size());
  out.mab_defined = misses > 0;
  out.mab = misses > 0 ? bias / double(misses) : 0.0;
  return out;
}

double auroc(const std::vector<std::pair<double, int>>& scores) {
  std::vector<std::pair<double, int>> sorted = scores;
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  // midranks for tied scores
  double rank_sum = 0.0;
  long positives = 0;
  const std::size_t m = sorted.size();
  for (std::size_t i = 0; i < m;) {
    std::size_t j = i;
    while (j < m && sorted[j].first == sorted[i].first) ++j;
    const double mid = 0.5 * double(i + 1 + j);
    for (std::size_t t = i; t < j; ++t)
      if (sorted[t].second != 0) {
        rank_sum += mid;
        ++positives;
      }
    i = j;
  }
  const long negatives = static_cast<long>(m) - positives;
  if (positives == 0 || negatives == 0) throw DataError("auroc needs both positive and negative labels");
  const double u = rank_sum - double(positives) * double(positives + 1) / 2.0;
  return u / (double(positives) * double(negatives));
}

}  // namespace jlsm
