#include "jlsm/model_select.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "jlsm/distributions.hpp"

namespace jlsm {

PosteriorChain fit_fixed_dimension(const Dataset& data, int k, const RunConfig& config, RngStream& rng) {
  if (k < 1) throw DomainError("fit_fixed_dimension: k must be at least 1");
  RunConfig fixed = config;
  fixed.mode = FitMode::FixedK;
  fixed.prior.k_init = k;
  fixed.family = data.family;
  fixed.seed = rng();
  return run_chain(data, fixed);
}

long parameter_count(Family family, Eigen::Index n, Eigen::Index q, int k) {
  const long per_attribute = family == Family::Gaussian ? 2 : 1;
  return long(n) * k + long(q) * k + long(n) + per_attribute * long(q);
}

Eigen::MatrixXd procrustes_rotation(const Eigen::Ref<const Eigen::MatrixXd>& X,
                                    const Eigen::Ref<const Eigen::MatrixXd>& target) {
  const Eigen::MatrixXd M = X.transpose() * target;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().transpose();
}

ParameterPoint aligned_posterior_mean(const PosteriorChain& chain) {
  if (chain.empty()) throw DomainError("aligned_posterior_mean: empty chain");
  const Eigen::MatrixXd& ref = chain.Z.back();
  const Eigen::Index k = ref.cols();
  ParameterPoint p;
  p.alpha = Eigen::VectorXd::Zero(chain.alpha.front().size());
  p.gamma = Eigen::VectorXd::Zero(chain.gamma.front().size());
  p.sigma2 = Eigen::VectorXd::Zero(chain.sigma2.front().size());
  p.Z = Eigen::MatrixXd::Zero(ref.rows(), k);
  p.B = Eigen::MatrixXd::Zero(chain.B.front().rows(), k);
  for (std::size_t s = 0; s < chain.size(); ++s) {
    if (chain.Z[s].cols() != k) throw DomainError("aligned_posterior_mean: k varies along the chain");
    const double w = 1.0 / double(s + 1);
    const Eigen::MatrixXd Q = procrustes_rotation(chain.Z[s], ref);
    p.alpha += w * (chain.alpha[s] - p.alpha);
    p.gamma += w * (chain.gamma[s] - p.gamma);
    if (p.sigma2.size() > 0) p.sigma2 += w * (chain.sigma2[s] - p.sigma2);
    p.Z += w * (chain.Z[s] * Q - p.Z);
    if (p.B.rows() > 0) p.B += w * (chain.B[s] * Q - p.B);
  }
  return p;
}

namespace {

double log_lik_at(const ParameterPoint& p, const Dataset& data) {
  return joint_log_likelihood(data, p.alpha, p.gamma, p.Z, p.B, p.sigma2);
}

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
}

// Streaming log-mean-exp and sample variance of one pointwise log-likelihood.
struct PointwiseAccumulator {
  double log_sum = -std::numeric_limits<double>::infinity();
  double mean = 0.0;
  double m2 = 0.0;
  long count = 0;

  void add(double x) {
    const double hi = std::max(log_sum, x);
    log_sum = hi + std::log(std::exp(log_sum - hi) + std::exp(x - hi));
    ++count;
    const double delta = x - mean;
    mean += delta / double(count);
    m2 += delta * (x - mean);
  }
  double log_mean() const { return log_sum - std::log(double(count)); }
  double variance() const { return count > 1 ? m2 / double(count - 1) : 0.0; }
};

}  // namespace

WaicParts waic_parts(const PosteriorChain& chain, const Dataset& data) {
  if (chain.empty()) throw DomainError("waic: empty chain");
  const Eigen::Index n = data.n();
  const Eigen::Index q = data.q();
  std::vector<PointwiseAccumulator> dyads(static_cast<std::size_t>(n * (n - 1) / 2));
  std::vector<PointwiseAccumulator> cells(static_cast<std::size_t>(n * q));
  for (std::size_t s = 0; s < chain.size(); ++s) {
    const Eigen::MatrixXd theta_a = natural_params_network(chain.alpha[s], chain.Z[s]);
    std::size_t idx = 0;
    for (Eigen::Index i = 1; i < n; ++i)
      for (Eigen::Index j = 0; j < i; ++j) dyads[idx++].add(dyad_log_lik(data.adjacency(i, j), theta_a(i, j)));
    if (q == 0) continue;
    const Eigen::MatrixXd theta_y = natural_params_attributes(chain.gamma[s], chain.Z[s], chain.B[s]);
    for (Eigen::Index j = 0; j < q; ++j) {
      const double s2 = data.family == Family::Gaussian ? chain.sigma2[s][j] : 1.0;
      for (Eigen::Index i = 0; i < n; ++i)
        if (data.observed(i, j))
          cells[std::size_t(j * n + i)].add(
              attribute_cell_log_lik(data.family, data.attributes(i, j), theta_y(i, j), s2));
    }
  }
  WaicParts parts;
  for (const auto& a : dyads) {
    parts.lppd_network += a.log_mean();
    parts.penalty_network += a.variance();
  }
  for (const auto& c : cells) {
    if (c.count == 0) continue;
    parts.lppd_attributes += c.log_mean();
    parts.penalty_attributes += c.variance();
  }
  return parts;
}

CriteriaReport compute_criteria(const PosteriorChain& chain, const Dataset& data) {
  if (chain.empty()) throw DomainError("criteria: empty chain");
  CriteriaReport r;
  const ParameterPoint point = aligned_posterior_mean(chain);
  r.k = static_cast<int>(point.Z.cols());
  r.d = parameter_count(data.family, data.n(), data.q(), r.k);
  r.log_lik_at_mean = log_lik_at(point, data);
  r.mean_log_lik = mean_of(chain.log_lik);
  r.p_dic = 2.0 * (r.log_lik_at_mean - r.mean_log_lik);
  r.aic = -2.0 * r.log_lik_at_mean + 2.0 * double(r.d);
  r.bic = -2.0 * r.log_lik_at_mean + 2.0 * double(r.d) * std::log(double(data.n()));
  r.dic = -2.0 * r.log_lik_at_mean + 2.0 * r.p_dic;
  r.waic = waic_parts(chain, data).waic();
  return r;
}

double criterion_aic(const PosteriorChain& chain, const Dataset& data) {
  const ParameterPoint point = aligned_posterior_mean(chain);
  const long d = parameter_count(data.family, data.n(), data.q(), int(point.Z.cols()));
  return -2.0 * log_lik_at(point, data) + 2.0 * double(d);
}

double criterion_bic(const PosteriorChain& chain, const Dataset& data) {
  const ParameterPoint point = aligned_posterior_mean(chain);
  const long d = parameter_count(data.family, data.n(), data.q(), int(point.Z.cols()));
  return -2.0 * log_lik_at(point, data) + 2.0 * double(d) * std::log(double(data.n()));
}

double criterion_dic(const PosteriorChain& chain, const Dataset& data) {
  const ParameterPoint point = aligned_posterior_mean(chain);
  const double at_mean = log_lik_at(point, data);
  const double p_dic = 2.0 * (at_mean - mean_of(chain.log_lik));
  return -2.0 * at_mean + 2.0 * p_dic;
}

double criterion_waic(const PosteriorChain& chain, const Dataset& data) { return waic_parts(chain, data).waic(); }

int one_se_selection(const std::vector<int>& candidates, const std::vector<double>& mean,
                     const std::vector<double>& se) {
  if (candidates.empty() || mean.size() != candidates.size() || se.size() != candidates.size())
    throw DomainError("one_se_selection: inconsistent inputs");
  const std::size_t best = std::size_t(std::max_element(mean.begin(), mean.end()) - mean.begin());
  const double threshold = mean[best] - se[best];
  int chosen = candidates[best];
  for (std::size_t c = 0; c < candidates.size(); ++c)
    if (mean[c] >= threshold && candidates[c] < chosen) chosen = candidates[c];
  return chosen;
}

std::pair<double, Eigen::VectorXd> estimate_new_node(const Eigen::Ref<const Eigen::VectorXd>& links,
                                                     const Eigen::Ref<const Eigen::VectorXd>& alpha_train,
                                                     const Eigen::Ref<const Eigen::MatrixXd>& Z_train,
                                                     double sigma_alpha) {
  const Eigen::Index m = Z_train.rows();
  const Eigen::Index k = Z_train.cols();
  // design rows [1, z_i], offset alpha_i; prior N(0, sigma_alpha^2) x N(0, I_k)
  Eigen::MatrixXd X(m, k + 1);
  X.col(0).setOnes();
  X.rightCols(k) = Z_train;
  Eigen::VectorXd prior_precision = Eigen::VectorXd::Ones(k + 1);
  prior_precision[0] = 1.0 / (sigma_alpha * sigma_alpha);

  auto objective = [&](const Eigen::VectorXd& x) {
    const Eigen::VectorXd eta = alpha_train + X * x;
    double f = -0.5 * x.cwiseAbs2().dot(prior_precision);
    for (Eigen::Index i = 0; i < m; ++i) f += dyad_log_lik(links[i], eta[i]);
    return f;
  };

  Eigen::VectorXd x = Eigen::VectorXd::Zero(k + 1);
  double f = objective(x);
  for (int iter = 0; iter < 100; ++iter) {
    const Eigen::VectorXd eta = alpha_train + X * x;
    Eigen::VectorXd p(m);
    for (Eigen::Index i = 0; i < m; ++i) p[i] = inv_logit(eta[i]);
    const Eigen::VectorXd grad = X.transpose() * (links - p) - prior_precision.cwiseProduct(x);
    Eigen::MatrixXd H = X.transpose() * (X.array().colwise() * (p.array() * (1.0 - p.array()))).matrix();
    H.diagonal() += prior_precision;
    const Eigen::VectorXd step = robust_cholesky(H).solve(grad);
    double scale = 1.0;
    Eigen::VectorXd next = x + step;
    double f_next = objective(next);
    while (f_next < f && scale > 1e-8) {
      scale *= 0.5;
      next = x + scale * step;
      f_next = objective(next);
    }
    const double change = (next - x).norm();
    x = next;
    f = f_next;
    if (change < 1e-10) break;
  }
  return {x[0], x.tail(k)};
}

CvResult kfold_cv(const Dataset& data, const std::vector<int>& candidates, int folds,
                  const RunConfig& config, RngStream& rng) {
  const Eigen::Index n = data.n();
  const Eigen::Index q = data.q();
  if (folds < 2) throw DomainError("kfold_cv: need at least two folds");
  if (folds > n) throw DataError("kfold_cv: more folds than nodes leaves empty folds");
  if (candidates.empty()) throw DomainError("kfold_cv: no candidate dimensions");

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  for (Eigen::Index i = n - 1; i > 0; --i) {
    const auto j = static_cast<Eigen::Index>(rng.uniform() * double(i + 1));
    std::swap(order[std::size_t(i)], order[std::size_t(std::min(j, i))]);
  }
  std::vector<int> fold_of(static_cast<std::size_t>(n));
  for (Eigen::Index r = 0; r < n; ++r) fold_of[std::size_t(order[std::size_t(r)])] = int(r % folds);

  CvResult result;
  result.candidates = candidates;
  result.fold_log_lik.assign(candidates.size(), std::vector<double>(std::size_t(folds), 0.0));

  for (int f = 0; f < folds; ++f) {
    std::vector<Eigen::Index> train;
    std::vector<Eigen::Index> test;
    for (Eigen::Index i = 0; i < n; ++i) (fold_of[std::size_t(i)] == f ? test : train).push_back(i);
    const auto m = static_cast<Eigen::Index>(train.size());

    Dataset sub;
    sub.family = data.family;
    sub.adjacency.resize(m, m);
    sub.attributes.resize(m, q);
    sub.observed.resize(m, q);
    for (Eigen::Index a = 0; a < m; ++a) {
      for (Eigen::Index b = 0; b < m; ++b) sub.adjacency(a, b) = data.adjacency(train[a], train[b]);
      for (Eigen::Index j = 0; j < q; ++j) {
        sub.attributes(a, j) = data.attributes(train[a], j);
        sub.observed(a, j) = data.observed(train[a], j);
      }
    }

    for (std::size_t c = 0; c < candidates.size(); ++c) {
      const PosteriorChain chain = fit_fixed_dimension(sub, candidates[c], config, rng);
      const ParameterPoint p = aligned_posterior_mean(chain);

      // full-size parameter point: training rows from the fit, test rows estimated
      Eigen::VectorXd alpha(n);
      Eigen::MatrixXd Z(n, p.Z.cols());
      for (Eigen::Index a = 0; a < m; ++a) {
        alpha[train[a]] = p.alpha[a];
        Z.row(train[a]) = p.Z.row(a);
      }
      for (Eigen::Index t : test) {
        Eigen::VectorXd links(m);
        for (Eigen::Index a = 0; a < m; ++a) links[a] = data.adjacency(t, train[a]);
        const auto [a_hat, z_hat] = estimate_new_node(links, p.alpha, p.Z, config.prior.sigma_alpha);
        alpha[t] = a_hat;
        Z.row(t) = z_hat.transpose();
      }

      double held_out = 0.0;
      const Eigen::MatrixXd theta_a = natural_params_network(alpha, Z);
      for (Eigen::Index i = 1; i < n; ++i)
        for (Eigen::Index j = 0; j < i; ++j)
          if (fold_of[std::size_t(i)] == f || fold_of[std::size_t(j)] == f)
            held_out += dyad_log_lik(data.adjacency(i, j), theta_a(i, j));
      if (q > 0) {
        const Eigen::MatrixXd theta_y = natural_params_attributes(p.gamma, Z, p.B);
        for (Eigen::Index t : test)
          for (Eigen::Index j = 0; j < q; ++j)
            if (data.observed(t, j))
              held_out += attribute_cell_log_lik(data.family, data.attributes(t, j), theta_y(t, j),
                                                 data.family == Family::Gaussian ? p.sigma2[j] : 1.0);
      }
      result.fold_log_lik[c][std::size_t(f)] = held_out;
    }
  }

  for (const auto& values : result.fold_log_lik) {
    const double mu = mean_of(values);
    double ss = 0.0;
    for (double v : values) ss += (v - mu) * (v - mu);
    result.mean.push_back(mu);
    result.se.push_back(std::sqrt(ss / double(values.size() - 1)) / std::sqrt(double(values.size())));
  }
  const auto best = std::max_element(result.mean.begin(), result.mean.end()) - result.mean.begin();
  result.selected = candidates[std::size_t(best)];
  result.selected_1se = one_se_selection(candidates, result.mean, result.se);
  return result;
}

SelectionTable select_dimension(const Dataset& data, const std::vector<int>& candidates,
                                const RunConfig& config, RngStream& rng) {
  if (candidates.empty()) throw DomainError("select_dimension: no candidate dimensions");
  SelectionTable table;
  for (int k : candidates) table.rows.push_back(compute_criteria(fit_fixed_dimension(data, k, config, rng), data));
  auto argmin = [&](auto member) {
    const auto it = std::min_element(table.rows.begin(), table.rows.end(),
                                     [&](const auto& a, const auto& b) { return a.*member < b.*member; });
    return it->k;
  };
  table.best_aic = argmin(&CriteriaReport::aic);
  table.best_bic = argmin(&CriteriaReport::bic);
  table.best_dic = argmin(&CriteriaReport::dic);
  table.best_waic = argmin(&CriteriaReport::waic);
  return table;
}

}  // namespace jlsm
