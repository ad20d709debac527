#include "jlsm/distributions.hpp"

#include <cmath>
#include <numbers>

#include "jlsm/errors.hpp"

namespace jlsm {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTrunc = 0.64;  // proposal split point for J*(1, z)
constexpr double kLogTwoPi = 1.8378770664093453;

// log Phi(x); switches to the Mills-ratio expansion before erfc underflows.
double log_normal_cdf(double x) {
  if (x > -35.0) return std::log(0.5 * std::erfc(-x / std::numbers::sqrt2));
  const double x2 = x * x;
  const double series = 1.0 - 1.0 / x2 + 3.0 / (x2 * x2) - 15.0 / (x2 * x2 * x2);
  return -0.5 * x2 - std::log(-x) - 0.5 * kLogTwoPi + std::log(series);
}

// n-th coefficient of the alternating series for the J*(1, 0) density.
double series_coef(int n, double x) {
  const double k = (n + 0.5) * kPi;
  if (x > kTrunc) return k * std::exp(-0.5 * k * k * x);
  if (x <= 0.0) return 0.0;
  const double expnt = -1.5 * (std::log(0.5 * kPi) + std::log(x)) + std::log(k) -
                       2.0 * (n + 0.5) * (n + 0.5) / x;
  return std::exp(expnt);
}

// Probability of the exponential (right) piece of the proposal mixture.
double mass_right(double z) {
  const double fz = 0.125 * kPi * kPi + 0.5 * z * z;
  const double root_t = std::sqrt(kTrunc);
  const double b = (kTrunc * z - 1.0) / root_t;
  const double a = -(kTrunc * z + 1.0) / root_t;
  const double x0 = std::log(fz) + fz * kTrunc;
  const double xb = x0 - z + log_normal_cdf(b);
  const double xa = x0 + z + log_normal_cdf(a);
  const double q_over_p = 4.0 / kPi * (std::exp(xb) + std::exp(xa));
  return 1.0 / (1.0 + q_over_p);
}

// Inverse-Gaussian(1/z, 1) truncated to (0, kTrunc).
double truncated_inverse_gaussian(double z, RngStream& rng) {
  double x = kTrunc + 1.0;
  if (1.0 / kTrunc > z) {
    // mean beyond the truncation point: reject from a truncated Levy proposal
    double alpha = 0.0;
    while (rng.uniform() > alpha) {
      double e1 = rng.exponential();
      double e2 = rng.exponential();
      while (e1 * e1 > 2.0 * e2 / kTrunc) {
        e1 = rng.exponential();
        e2 = rng.exponential();
      }
      x = 1.0 + e1 * kTrunc;
      x = kTrunc / (x * x);
      alpha = std::exp(-0.5 * z * z * x);
    }
  } else {
    const double mu = 1.0 / z;
    while (x > kTrunc) {
      double y = rng.normal();
      y *= y;
      const double half_mu = 0.5 * mu;
      const double mu_y = mu * y;
      x = mu + half_mu * mu_y - half_mu * std::sqrt(4.0 * mu_y + mu_y * mu_y);
      if (rng.uniform() > mu / (mu + x)) x = mu * mu / x;
    }
  }
  return x;
}

}  // namespace

double sample_polya_gamma(double c, RngStream& rng) {
  const double z = 0.5 * std::fabs(c);
  const double fz = 0.125 * kPi * kPi + 0.5 * z * z;
  const double p_right = mass_right(z);
  for (;;) {
    const double x = rng.uniform() < p_right ? kTrunc + rng.exponential() / fz
                                             : truncated_inverse_gaussian(z, rng);
    double s = series_coef(0, x);
    const double y = rng.uniform() * s;
    for (int n = 1;; ++n) {
      if (n % 2 == 1) {
        s -= series_coef(n, x);
        if (y <= s) return 0.25 * x;
      } else {
        s += series_coef(n, x);
        if (y > s) break;
      }
    }
  }
}

double polya_gamma_mean(double c) {
  const double ac = std::fabs(c);
  if (ac < 1e-6) return 0.25 - ac * ac / 48.0;
  return std::tanh(0.5 * ac) / (2.0 * ac);
}

double sample_polya_gamma_truncated(double c, RngStream& rng, int terms) {
  const double c2 = c * c / (4.0 * kPi * kPi);
  double sum = 0.0;
  double partial_mean = 0.0;
  for (int k = 1; k <= terms; ++k) {
    const double denom = (k - 0.5) * (k - 0.5) + c2;
    sum += rng.exponential() / denom;
    partial_mean += 1.0 / denom;
  }
  const double scale = 1.0 / (2.0 * kPi * kPi);
  return scale * sum + (polya_gamma_mean(c) - scale * partial_mean);
}

double sample_gamma(double shape, double rate, RngStream& rng) {
  if (!(shape > 0.0) || !(rate > 0.0)) throw DomainError("gamma: shape and rate must be positive");
  if (shape < 1.0) {
    // boost: Gamma(a) = Gamma(a + 1) * U^(1/a)
    const double g = sample_gamma(shape + 1.0, 1.0, rng);
    return g * std::pow(rng.uniform(), 1.0 / shape) / rate;
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x;
    double v;
    do {
      x = rng.normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v / rate;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v / rate;
  }
}

double sample_inverse_gamma(double shape, double rate, RngStream& rng) {
  if (!(shape > 0.0) || !(rate > 0.0))
    throw DomainError("inverse gamma: shape and rate must be positive");
  return 1.0 / sample_gamma(shape, rate, rng);
}

double sample_beta(double a, double b, RngStream& rng) {
  if (!(a > 0.0) || !(b > 0.0)) throw DomainError("beta: parameters must be positive");
  const double x = sample_gamma(a, 1.0, rng);
  const double y = sample_gamma(b, 1.0, rng);
  const double total = x + y;
  // both gammas underflow only for tiny shapes; fall back to the larger-mean side
  if (total == 0.0) return a >= b ? 1.0 : 0.0;
  return x / total;
}

Eigen::VectorXd sample_standard_normal(Eigen::Index dim, RngStream& rng) {
  Eigen::VectorXd out(dim);
  for (Eigen::Index i = 0; i < dim; ++i) out[i] = rng.normal();
  return out;
}

Eigen::LLT<Eigen::MatrixXd> robust_cholesky(const Eigen::Ref<const Eigen::MatrixXd>& spd) {
  Eigen::LLT<Eigen::MatrixXd> llt(spd);
  if (llt.info() == Eigen::Success) return llt;
  const Eigen::Index dim = spd.rows();
  const double base = std::fabs(spd.trace()) / static_cast<double>(dim);
  double jitter = 1e-10 * (base > 0.0 ? base : 1.0);
  for (int attempt = 0; attempt < 3; ++attempt, jitter *= 10.0) {
    Eigen::MatrixXd jittered = spd;
    jittered.diagonal().array() += jitter;
    llt.compute(jittered);
    if (llt.info() == Eigen::Success) return llt;
  }
  throw FactorizationError("matrix is not numerically positive definite");
}

Eigen::VectorXd sample_mvn(const Eigen::Ref<const Eigen::VectorXd>& mean,
                           const Eigen::Ref<const Eigen::MatrixXd>& covariance, RngStream& rng) {
  if (covariance.rows() != mean.size() || covariance.cols() != mean.size())
    throw DimensionError("sample_mvn: covariance does not match mean");
  if (mean.size() == 0) return Eigen::VectorXd();
  const auto llt = robust_cholesky(covariance);
  return mean + llt.matrixL() * sample_standard_normal(mean.size(), rng);
}

Eigen::VectorXd sample_mvn_precision(const Eigen::Ref<const Eigen::MatrixXd>& precision,
                                     const Eigen::Ref<const Eigen::VectorXd>& linear, RngStream& rng) {
  if (precision.rows() != linear.size() || precision.cols() != linear.size())
    throw DimensionError("sample_mvn_precision: precision does not match linear term");
  if (linear.size() == 0) return Eigen::VectorXd();
  const auto llt = robust_cholesky(precision);
  // P = L L^T: mean = P^{-1} b, noise = L^{-T} e has covariance P^{-1}
  Eigen::VectorXd draw = llt.solve(linear);
  draw += llt.matrixU().solve(sample_standard_normal(linear.size(), rng));
  return draw;
}

double log_density_spike_normal(const Eigen::Ref<const Eigen::VectorXd>& x, double theta0) {
  const double n = static_cast<double>(x.size());
  return -0.5 * n * (kLogTwoPi + std::log(theta0)) - 0.5 * x.squaredNorm() / theta0;
}

double log_density_slab_multivariate_t(const Eigen::Ref<const Eigen::VectorXd>& x, double a_theta,
                                       double b_theta) {
  // nu = 2a, scale b/a, so nu * scale = 2b
  const double n = static_cast<double>(x.size());
  return std::lgamma(a_theta + 0.5 * n) - std::lgamma(a_theta) -
         0.5 * n * (std::log(2.0 * kPi * b_theta)) -
         (a_theta + 0.5 * n) * std::log1p(0.5 * x.squaredNorm() / b_theta);
}

}  // namespace jlsm
