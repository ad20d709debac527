#pragma once

#include "jlsm/chain.hpp"
#include "jlsm/rng.hpp"

namespace oracle {

/// Toy chain whose latent draws are exact rotations of one configuration, so
/// the aligned posterior mean of (Z, B) is the last draw.
jlsm::PosteriorChain rotated_chain(const jlsm::Dataset& data, int k, int draws, jlsm::RngStream& rng);

/// Criteria written out from their definitions with plain loops. Only valid for
/// chains built by rotated_chain.
struct DirectCriteria {
  double d = 0.0;
  double aic = 0.0;
  double bic = 0.0;
  double dic = 0.0;
  double waic = 0.0;
};

DirectCriteria direct_criteria(const jlsm::PosteriorChain& chain, const jlsm::Dataset& data);

}  // namespace oracle
