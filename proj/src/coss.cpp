#include "jlsm/coss.hpp"

#include <cmath>
#include <limits>

#include "jlsm/distributions.hpp"
#include "jlsm/errors.hpp"
#include "jlsm/model.hpp"

namespace jlsm {

ShrinkageState ShrinkageState::initial(int k, const PriorConfig& prior) {
  ShrinkageState s;
  s.k = k;
  s.v.resize(k);
  const double kappa = prior.kappa_value();
  for (int h = 0; h < k; ++h) s.v[h] = h == 0 ? kappa / (kappa + 1.0) : prior.a_stick / (prior.a_stick + 1.0);
  s.v[k - 1] = 1.0;
  s.refresh_weights();
  s.rho = Eigen::VectorXi::Constant(k, k);
  s.theta = Eigen::VectorXd::Ones(k);
  s.theta[k - 1] = prior.theta0;
  return s;
}

void ShrinkageState::refresh_weights() {
  omega = stick_breaking_weights(v);
  pi = cumulative_spike_probs(omega);
}

Eigen::VectorXd stick_breaking_weights(const Eigen::Ref<const Eigen::VectorXd>& v) {
  const Eigen::Index k = v.size();
  if (k == 0) throw DomainError("stick_breaking_weights: empty v");
  if (v[k - 1] != 1.0) throw DomainError("stick_breaking_weights: last proportion must be 1");
  Eigen::VectorXd omega(k);
  double remaining = 1.0;
  for (Eigen::Index l = 0; l < k; ++l) {
    if (!(v[l] >= 0.0 && v[l] <= 1.0)) throw DomainError("stick_breaking_weights: v outside [0, 1]");
    omega[l] = v[l] * remaining;
    remaining *= 1.0 - v[l];
  }
  return omega;
}

Eigen::VectorXd cumulative_spike_probs(const Eigen::Ref<const Eigen::VectorXd>& omega) {
  Eigen::VectorXd pi(omega.size());
  double acc = 0.0;
  for (Eigen::Index h = 0; h < omega.size(); ++h) {
    acc += omega[h];
    pi[h] = acc;
  }
  if (pi.size() > 0) pi[pi.size() - 1] = 1.0;
  return pi;
}

Eigen::VectorXd rho_log_weights(int h, const Eigen::Ref<const Eigen::VectorXd>& omega,
                                const Eigen::Ref<const Eigen::VectorXd>& z_col,
                                const PriorConfig& prior) {
  const Eigen::Index k = omega.size();
  const double log_spike = log_density_spike_normal(z_col, prior.theta0);
  const double log_slab = log_density_slab_multivariate_t(z_col, prior.a_theta, prior.b_theta);
  Eigen::VectorXd w(k);
  for (Eigen::Index l = 0; l < k; ++l) {
    const double lo = omega[l] > 0.0 ? std::log(omega[l]) : -std::numeric_limits<double>::infinity();
    w[l] = lo + (l + 1 <= h ? log_spike : log_slab);
  }
  return w;
}

int sample_rho(int h, const Eigen::Ref<const Eigen::VectorXd>& omega,
               const Eigen::Ref<const Eigen::VectorXd>& z_col, const PriorConfig& prior,
               RngStream& rng) {
  const Eigen::VectorXd w = rho_log_weights(h, omega, z_col, prior);
  const double top = w.maxCoeff();
  if (!std::isfinite(top)) throw DomainError("sample_rho: all category weights vanish");
  const Eigen::VectorXd p = (w.array() - top).exp();
  const double u = rng.uniform() * p.sum();
  double acc = 0.0;
  for (Eigen::Index l = 0; l < p.size(); ++l) {
    acc += p[l];
    if (u < acc) return static_cast<int>(l) + 1;
  }
  // u landed on the rounding gap at the top; take the last positive category
  for (Eigen::Index l = p.size() - 1; l >= 0; --l)
    if (p[l] > 0.0) return static_cast<int>(l) + 1;
  return static_cast<int>(p.size());
}

double sample_theta(int h, int rho_h, const Eigen::Ref<const Eigen::VectorXd>& z_col,
                    const PriorConfig& prior, RngStream& rng) {
  if (rho_h <= h) return prior.theta0;
  const double n = static_cast<double>(z_col.size());
  return sample_inverse_gamma(prior.a_theta + 0.5 * n, prior.b_theta + 0.5 * z_col.squaredNorm(), rng);
}

Eigen::VectorXd sample_sticks(const Eigen::Ref<const Eigen::VectorXi>& rho, const PriorConfig& prior,
                              RngStream& rng) {
  const int k = static_cast<int>(rho.size());
  Eigen::VectorXd v(k);
  for (int h = 1; h < k; ++h) {
    int equal = 0;
    int above = 0;
    for (int j = 0; j < k; ++j) {
      equal += rho[j] == h;
      above += rho[j] > h;
    }
    const double base = h == 1 ? prior.kappa_value() : prior.a_stick;
    v[h - 1] = sample_beta(base + equal, 1.0 + above, rng);
  }
  v[k - 1] = 1.0;
  return v;
}

int active_dimension(const Eigen::Ref<const Eigen::VectorXi>& rho) {
  int count = 0;
  for (Eigen::Index h = 0; h < rho.size(); ++h) count += rho[h] > h + 1;
  return count;
}

void update_shrinkage(ShrinkageState& s, const Eigen::Ref<const Eigen::MatrixXd>& Z,
                      const PriorConfig& prior, RngStream& rng) {
  const int k = s.k;
  for (int h = 1; h <= k; ++h) s.rho[h - 1] = sample_rho(h, s.omega, Z.col(h - 1), prior, rng);
  s.v = sample_sticks(s.rho, prior, rng);
  s.refresh_weights();
  for (int h = 1; h <= k; ++h) s.theta[h - 1] = sample_theta(h, s.rho[h - 1], Z.col(h - 1), prior, rng);
}

ShrinkageState sample_shrinkage_prior(int k, const PriorConfig& prior, RngStream& rng) {
  ShrinkageState s;
  s.k = k;
  s.v.resize(k);
  for (int h = 0; h + 1 < k; ++h)
    s.v[h] = sample_beta(h == 0 ? prior.kappa_value() : prior.a_stick, 1.0, rng);
  s.v[k - 1] = 1.0;
  s.refresh_weights();
  s.rho.resize(k);
  s.theta.resize(k);
  for (int h = 0; h < k; ++h) {
    const double u = rng.uniform();
    int label = k;
    double acc = 0.0;
    for (int l = 0; l < k; ++l) {
      acc += s.omega[l];
      if (u < acc) {
        label = l + 1;
        break;
      }
    }
    s.rho[h] = label;
    s.theta[h] = label <= h + 1 ? prior.theta0 : sample_inverse_gamma(prior.a_theta, prior.b_theta, rng);
  }
  return s;
}

std::vector<PriorDraw> prior_predictive_theta(const PriorConfig& prior, int count, RngStream& rng) {
  std::vector<PriorDraw> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int c = 0; c < count; ++c) {
    const ShrinkageState s = sample_shrinkage_prior(prior.k_init, prior, rng);
    out.push_back({s.pi, s.theta});
  }
  return out;
}

}  // namespace jlsm
