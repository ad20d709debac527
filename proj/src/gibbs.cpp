#include "jlsm/gibbs.hpp"

#include <algorithm>
#include <thread>
#include <vector>

#include "jlsm/distributions.hpp"

namespace jlsm {

namespace {

// Runs fn(row) for rows [begin, end) on up to `threads` workers. Rows are
// interleaved across workers; results must not depend on the assignment.
template <typename Fn>
void for_each_row(Eigen::Index begin, Eigen::Index end, int threads, Fn&& fn) {
  const Eigen::Index count = end - begin;
  if (threads <= 1 || count < 64) {
    for (Eigen::Index r = begin; r < end; ++r) fn(r);
    return;
  }
  const int workers = static_cast<int>(std::min<Eigen::Index>(threads, count));
  std::vector<std::jthread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (Eigen::Index r = begin + w; r < end; r += workers) fn(r);
    });
}

// Precision and linear term of z_i | rest, i.e. z_i ~ N(P^{-1} b, P^{-1}).
void latent_precision(const ModelState& s, const DataView& data, Eigen::Index i, Eigen::MatrixXd& P,
                      Eigen::VectorXd& b) {
  const Eigen::Index n = data.n();
  const Eigen::Index k = s.Z.cols();
  const auto d = s.aug_A.col(i);

  Eigen::VectorXd r(n);
  for (Eigen::Index j = 0; j < n; ++j) r[j] = data.A(j, i) - 0.5 - d[j] * (s.alpha[j] + s.alpha[i]);
  r[i] = 0.0;

  P.noalias() = s.Z.transpose() * (s.Z.array().colwise() * d.array()).matrix();
  b.noalias() = s.Z.transpose() * r;

  for (Eigen::Index j = 0; j < data.q(); ++j) {
    if (!data.observed(i, j)) continue;
    const auto beta = s.B.row(j).transpose();
    if (data.family == Family::Gaussian) {
      const double w = 1.0 / s.sigma2[j];
      P.noalias() += w * beta * beta.transpose();
      b += (w * (data.Y(i, j) - s.gamma[j])) * beta;
    } else {
      const double dy = s.aug_Y(i, j);
      P.noalias() += dy * beta * beta.transpose();
      b += (data.Y(i, j) - 0.5 - dy * s.gamma[j]) * beta;
    }
  }
  for (Eigen::Index h = 0; h < k; ++h) P(h, h) += 1.0 / s.shrinkage.theta[h];
}

// Precision and linear term of beta_j | rest.
void loading_precision(const ModelState& s, const DataView& data, const PriorConfig& prior,
                       Eigen::Index j, Eigen::MatrixXd& P, Eigen::VectorXd& b) {
  const Eigen::Index n = data.n();
  Eigen::VectorXd w(n);
  Eigen::VectorXd r(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!data.observed(i, j)) {
      w[i] = 0.0;
      r[i] = 0.0;
    } else if (data.family == Family::Gaussian) {
      w[i] = 1.0 / s.sigma2[j];
      r[i] = w[i] * (data.Y(i, j) - s.gamma[j]);
    } else {
      w[i] = s.aug_Y(i, j);
      r[i] = data.Y(i, j) - 0.5 - w[i] * s.gamma[j];
    }
  }
  P.noalias() = s.Z.transpose() * (s.Z.array().colwise() * w.array()).matrix();
  P.diagonal().array() += 1.0 / (prior.sigma_B * prior.sigma_B);
  b.noalias() = s.Z.transpose() * r;
}

GaussianConditional to_moments(const Eigen::MatrixXd& P, const Eigen::VectorXd& b) {
  const auto llt = robust_cholesky(P);
  GaussianConditional g;
  g.mean = llt.solve(b);
  g.covariance = llt.solve(Eigen::MatrixXd::Identity(P.rows(), P.cols()));
  return g;
}

}  // namespace

ModelState initial_state(const Dataset& data, int k, const PriorConfig& prior,
                         const SamplerOptions& options, RngStream& rng) {
  const Eigen::Index n = data.n();
  const Eigen::Index q = data.q();
  ModelState s;
  s.alpha = Eigen::VectorXd::Zero(n);
  s.gamma = Eigen::VectorXd::Zero(q);
  s.Z.resize(n, k);
  for (Eigen::Index h = 0; h < k; ++h)
    for (Eigen::Index i = 0; i < n; ++i) s.Z(i, h) = rng.normal();
  s.B = Eigen::MatrixXd::Zero(q, k);
  if (data.family == Family::Gaussian) s.sigma2 = Eigen::VectorXd::Ones(q);
  s.aug_A = Eigen::MatrixXd::Constant(n, n, 0.25);
  s.aug_A.diagonal().setZero();
  if (data.family == Family::Bernoulli) s.aug_Y = Eigen::MatrixXd::Constant(n, q, 0.25);
  s.shrinkage = ShrinkageState::initial(k, prior);
  if (!options.coss) s.shrinkage.theta.setOnes();
  if (options.impute && data.has_missing()) s.imputed = data.attributes;
  return s;
}

NormalConditional alpha_conditional(const ModelState& s, const DataView& data, const PriorConfig& prior,
                                    Eigen::Index i) {
  const Eigen::Index n = data.n();
  const Eigen::VectorXd g = s.Z * s.Z.row(i).transpose();
  double precision = 1.0 / (prior.sigma_alpha * prior.sigma_alpha);
  double shift = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    if (j == i) continue;
    const double d = s.aug_A(j, i);
    precision += d;
    shift += data.A(j, i) - 0.5 - d * (s.alpha[j] + g[j]);
  }
  return {shift / precision, 1.0 / precision};
}

GaussianConditional latent_conditional(const ModelState& s, const DataView& data,
                                       const PriorConfig& /*prior*/, Eigen::Index i) {
  Eigen::MatrixXd P;
  Eigen::VectorXd b;
  latent_precision(s, data, i, P, b);
  return to_moments(P, b);
}

NormalConditional gamma_conditional(const ModelState& s, const DataView& data, const PriorConfig& prior,
                                    Eigen::Index j) {
  const Eigen::VectorXd fit = s.Z * s.B.row(j).transpose();
  double precision = 1.0 / (prior.sigma_gamma * prior.sigma_gamma);
  double shift = 0.0;
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    if (!data.observed(i, j)) continue;
    if (data.family == Family::Gaussian) {
      precision += 1.0 / s.sigma2[j];
      shift += (data.Y(i, j) - fit[i]) / s.sigma2[j];
    } else {
      const double d = s.aug_Y(i, j);
      precision += d;
      shift += data.Y(i, j) - 0.5 - d * fit[i];
    }
  }
  return {shift / precision, 1.0 / precision};
}

GaussianConditional loading_conditional(const ModelState& s, const DataView& data,
                                        const PriorConfig& prior, Eigen::Index j) {
  Eigen::MatrixXd P;
  Eigen::VectorXd b;
  loading_precision(s, data, prior, j, P, b);
  return to_moments(P, b);
}

InverseGammaConditional noise_variance_conditional(const ModelState& s, const DataView& data,
                                                   const PriorConfig& prior, Eigen::Index j) {
  const Eigen::VectorXd fit = s.Z * s.B.row(j).transpose();
  double count = 0.0;
  double rss = 0.0;
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    if (!data.observed(i, j)) continue;
    const double r = data.Y(i, j) - s.gamma[j] - fit[i];
    rss += r * r;
    count += 1.0;
  }
  return {prior.a_sigma + 0.5 * count, prior.b_sigma + 0.5 * rss};
}

void update_augmentation_network(ModelState& s, const DataView& data, RngStream& rng, int threads) {
  const Eigen::Index n = data.n();
  const Eigen::MatrixXd theta = natural_params_network(s.alpha, s.Z);
  const std::uint64_t key = rng();
  const RngStream base(key, 0);
  for_each_row(1, n, threads, [&](Eigen::Index i) {
    RngStream row = base.split(static_cast<std::uint64_t>(i));
    for (Eigen::Index j = 0; j < i; ++j) {
      const double d = sample_polya_gamma(theta(i, j), row);
      s.aug_A(i, j) = d;
      s.aug_A(j, i) = d;
    }
  });
  s.aug_A.diagonal().setZero();
}

void update_alpha(ModelState& s, const DataView& data, const PriorConfig& prior, RngStream& rng) {
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    const NormalConditional c = alpha_conditional(s, data, prior, i);
    s.alpha[i] = c.mean + std::sqrt(c.variance) * rng.normal();
  }
}

void update_latent_positions(ModelState& s, const DataView& data, const PriorConfig& /*prior*/,
                             RngStream& rng) {
  Eigen::MatrixXd P;
  Eigen::VectorXd b;
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    latent_precision(s, data, i, P, b);
    s.Z.row(i) = sample_mvn_precision(P, b, rng).transpose();
  }
}

void update_latent_positions_gaussian(ModelState& s, const DataView& data, const PriorConfig& prior,
                                      RngStream& rng) {
  update_latent_positions(s, data, prior, rng);
}

void update_latent_positions_bernoulli(ModelState& s, const DataView& data, const PriorConfig& prior,
                                       RngStream& rng) {
  update_latent_positions(s, data, prior, rng);
}

void update_gamma_gaussian(ModelState& s, const DataView& data, const PriorConfig& prior, RngStream& rng) {
  for (Eigen::Index j = 0; j < data.q(); ++j) {
    const NormalConditional c = gamma_conditional(s, data, prior, j);
    s.gamma[j] = c.mean + std::sqrt(c.variance) * rng.normal();
  }
}

void update_gamma_bernoulli(ModelState& s, const DataView& data, const PriorConfig& prior, RngStream& rng) {
  update_gamma_gaussian(s, data, prior, rng);
}

void update_loadings_gaussian(ModelState& s, const DataView& data, const PriorConfig& prior,
                              RngStream& rng) {
  Eigen::MatrixXd P;
  Eigen::VectorXd b;
  for (Eigen::Index j = 0; j < data.q(); ++j) {
    loading_precision(s, data, prior, j, P, b);
    s.B.row(j) = sample_mvn_precision(P, b, rng).transpose();
  }
}

void update_loadings_bernoulli(ModelState& s, const DataView& data, const PriorConfig& prior,
                               RngStream& rng) {
  update_loadings_gaussian(s, data, prior, rng);
}

void update_noise_variance(ModelState& s, const DataView& data, const PriorConfig& prior, RngStream& rng) {
  for (Eigen::Index j = 0; j < data.q(); ++j) {
    const InverseGammaConditional c = noise_variance_conditional(s, data, prior, j);
    s.sigma2[j] = sample_inverse_gamma(c.shape, c.rate, rng);
  }
}

void update_augmentation_attributes(ModelState& s, const DataView& data, RngStream& rng, int threads) {
  const Eigen::Index n = data.n();
  const Eigen::Index q = data.q();
  if (q == 0) return;
  if (s.aug_Y.rows() != n || s.aug_Y.cols() != q) s.aug_Y = Eigen::MatrixXd::Zero(n, q);
  const Eigen::MatrixXd theta = natural_params_attributes(s.gamma, s.Z, s.B);
  const std::uint64_t key = rng();
  const RngStream base(key, 1);
  for_each_row(0, n, threads, [&](Eigen::Index i) {
    RngStream row = base.split(static_cast<std::uint64_t>(i));
    for (Eigen::Index j = 0; j < q; ++j)
      s.aug_Y(i, j) = data.observed(i, j) ? sample_polya_gamma(theta(i, j), row) : 0.0;
  });
}

Eigen::MatrixXd impute_missing_attributes(const ModelState& s, const Dataset& data, RngStream& rng) {
  Eigen::MatrixXd filled = data.attributes;
  if (!data.has_missing()) return filled;
  const Eigen::MatrixXd theta = natural_params_attributes(s.gamma, s.Z, s.B);
  for (Eigen::Index j = 0; j < data.q(); ++j)
    for (Eigen::Index i = 0; i < data.n(); ++i) {
      if (data.observed(i, j)) continue;
      if (data.family == Family::Bernoulli)
        filled(i, j) = rng.uniform() < inv_logit(theta(i, j)) ? 1.0 : 0.0;
      else
        filled(i, j) = theta(i, j) + std::sqrt(s.sigma2[j]) * rng.normal();
    }
  return filled;
}

namespace {

template <typename Body>
void with_working_view(ModelState& s, const Dataset& data, RngStream& rng, const SamplerOptions& options,
                       Body&& body) {
  if (options.impute && data.has_missing()) {
    s.imputed = impute_missing_attributes(s, data, rng);
    const BoolMatrix all = BoolMatrix::Constant(data.n(), data.q(), true);
    body(DataView(data.adjacency, s.imputed, all, data.family));
  } else {
    body(DataView(data));
  }
}

}  // namespace

void gibbs_cycle_gaussian(ModelState& s, const Dataset& data, const PriorConfig& prior, RngStream& rng,
                          const SamplerOptions& options) {
  with_working_view(s, data, rng, options, [&](const DataView& view) {
    update_augmentation_network(s, view, rng, options.threads);
    update_alpha(s, view, prior, rng);
    update_latent_positions_gaussian(s, view, prior, rng);
    update_gamma_gaussian(s, view, prior, rng);
    update_loadings_gaussian(s, view, prior, rng);
    update_noise_variance(s, view, prior, rng);
  });
  if (options.coss) update_shrinkage(s.shrinkage, s.Z, prior, rng);
}

void gibbs_cycle_bernoulli(ModelState& s, const Dataset& data, const PriorConfig& prior, RngStream& rng,
                           const SamplerOptions& options) {
  with_working_view(s, data, rng, options, [&](const DataView& view) {
    update_augmentation_network(s, view, rng, options.threads);
    update_augmentation_attributes(s, view, rng, options.threads);
    update_alpha(s, view, prior, rng);
    update_latent_positions_bernoulli(s, view, prior, rng);
    update_gamma_bernoulli(s, view, prior, rng);
    update_loadings_bernoulli(s, view, prior, rng);
  });
  if (options.coss) update_shrinkage(s.shrinkage, s.Z, prior, rng);
}

void gibbs_cycle(ModelState& s, const Dataset& data, const PriorConfig& prior, RngStream& rng,
                 const SamplerOptions& options) {
  if (data.family == Family::Gaussian)
    gibbs_cycle_gaussian(s, data, prior, rng, options);
  else
    gibbs_cycle_bernoulli(s, data, prior, rng, options);
}

}  // namespace jlsm
