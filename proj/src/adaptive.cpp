#include "jlsm/adaptive.hpp"

#include <cmath>
#include <vector>

#include "jlsm/distributions.hpp"

namespace jlsm {

void AdaptationSchedule::validate() const {
  if (!(eta0 <= 0.0) || !(eta1 < 0.0)) throw DomainError("adaptation schedule needs eta0 <= 0 and eta1 < 0");
  if (burn_in < 0) throw DomainError("adaptation burn-in must be nonnegative");
}

double AdaptationSchedule::probability(long t) const { return std::exp(eta0 + eta1 * double(t)); }

void contract(ModelState& s) {
  ShrinkageState& sh = s.shrinkage;
  std::vector<int> keep;
  int spike = -1;
  for (int h = 0; h < sh.k; ++h) {
    if (sh.active(h))
      keep.push_back(h);
    else if (spike < 0)
      spike = h;
  }
  keep.push_back(spike);  // K* < k - 1 guarantees an inactive column exists
  const int k_new = static_cast<int>(keep.size());

  Eigen::MatrixXd Z(s.Z.rows(), k_new);
  Eigen::MatrixXd B(s.B.rows(), k_new);
  ShrinkageState out;
  out.k = k_new;
  out.v.resize(k_new);
  out.theta.resize(k_new);
  out.rho = Eigen::VectorXi::Constant(k_new, k_new);
  for (int c = 0; c < k_new; ++c) {
    Z.col(c) = s.Z.col(keep[c]);
    B.col(c) = s.B.col(keep[c]);
    out.v[c] = sh.v[keep[c]];
    out.theta[c] = sh.theta[keep[c]];
  }
  out.v[k_new - 1] = 1.0;
  out.refresh_weights();
  s.Z = std::move(Z);
  s.B = std::move(B);
  sh = std::move(out);
}

void expand(ModelState& s, const PriorConfig& prior, RngStream& rng) {
  const Eigen::Index n = s.Z.rows();
  const Eigen::Index q = s.B.rows();
  ShrinkageState& sh = s.shrinkage;
  const int k = sh.k;

  s.Z.conservativeResize(Eigen::NoChange, k + 1);
  s.B.conservativeResize(Eigen::NoChange, k + 1);
  const double sd_z = std::sqrt(prior.theta0);
  for (Eigen::Index i = 0; i < n; ++i) s.Z(i, k) = sd_z * rng.normal();
  for (Eigen::Index j = 0; j < q; ++j) s.B(j, k) = prior.sigma_B * rng.normal();

  sh.v.conservativeResize(k + 1);
  sh.v[k - 1] = sample_beta(k == 1 ? prior.kappa_value() : prior.a_stick, 1.0, rng);
  sh.v[k] = 1.0;
  sh.theta.conservativeResize(k + 1);
  sh.theta[k] = prior.theta0;
  sh.rho.conservativeResize(k + 1);
  sh.rho[k] = k + 1;
  sh.k = k + 1;
  sh.refresh_weights();
}

Adaptation maybe_adapt(ModelState& s, long t, const AdaptationSchedule& schedule,
                       const PriorConfig& prior, RngStream& rng) {
  if (t <= schedule.burn_in) return Adaptation::None;
  if (rng.uniform() >= schedule.probability(t)) return Adaptation::None;
  const int k = s.shrinkage.k;
  const int k_star = active_dimension(s.shrinkage.rho);
  if (k_star < k - 1) {
    contract(s);
    return Adaptation::Contracted;
  }
  expand(s, prior, rng);
  return Adaptation::Expanded;
}

}  // namespace jlsm
