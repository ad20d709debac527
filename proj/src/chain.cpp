#include "jlsm/chain.hpp"

namespace jlsm {

void PosteriorChain::push(const ModelState& s, long t, int k_star_value, double ll, const Dataset& data,
                          bool coss) {
  iteration.push_back(t);
  alpha.push_back(s.alpha);
  gamma.push_back(s.gamma);
  sigma2.push_back(s.sigma2);
  Z.push_back(s.Z);
  B.push_back(s.B);
  theta.push_back(s.shrinkage.theta);
  Eigen::VectorXi mask = Eigen::VectorXi::Ones(s.k());
  if (coss)
    for (int h = 0; h < s.k(); ++h) mask[h] = s.shrinkage.active(h) ? 1 : 0;
  active.push_back(std::move(mask));
  k_star.push_back(k_star_value);
  log_lik.push_back(ll);
  if (s.imputed.size() > 0) {
    std::vector<double> cells;
    for (Eigen::Index j = 0; j < data.q(); ++j)
      for (Eigen::Index i = 0; i < data.n(); ++i)
        if (!data.observed(i, j)) cells.push_back(s.imputed(i, j));
    imputed.push_back(Eigen::Map<Eigen::VectorXd>(cells.data(), Eigen::Index(cells.size())));
  }
}

void RunConfig::validate() const {
  prior.validate();
  if (mode == FitMode::Coss) adaptation.validate();
  if (iterations < 1) throw DomainError("iterations must be positive");
  if (burn_in < 0 || burn_in >= iterations) throw DomainError("burn-in must lie in [0, iterations)");
  if (thin < 1) throw DomainError("thinning interval must be at least 1");
  if (threads < 1) throw DomainError("threads must be at least 1");
}

SamplerOptions RunConfig::sampler_options() const {
  SamplerOptions o;
  o.coss = mode == FitMode::Coss;
  o.impute = impute;
  o.threads = threads;
  return o;
}

PosteriorChain run_chain(const Dataset& data, const RunConfig& config) {
  config.validate();
  data.validate();
  if (data.family != config.family) throw DataError("dataset family differs from run configuration");

  const SamplerOptions options = config.sampler_options();
  RngStream rng(config.seed, 0);
  ModelState state = initial_state(data, config.prior.k_init, config.prior, options, rng);

  PosteriorChain chain;
  chain.family = data.family;
  for (long t = 1; t <= config.iterations; ++t) {
    gibbs_cycle(state, data, config.prior, rng, options);
    const int k_star = options.coss ? active_dimension(state.shrinkage.rho) : state.k();
    if (t > config.burn_in && (t - config.burn_in) % config.thin == 0)
      chain.push(state, t, k_star, joint_log_likelihood(data, state), data, options.coss);
    if (options.coss) maybe_adapt(state, t, config.adaptation, config.prior, rng);
  }
  return chain;
}

}  // namespace jlsm
