#pragma once

#include "jlsm/model.hpp"
#include "jlsm/rng.hpp"

namespace jlsm {

/// Adaptation probability p(t) = exp(eta0 + eta1 t), active after `burn_in`.
struct AdaptationSchedule {
  double eta0 = -1.0;
  double eta1 = -5e-4;
  long burn_in = 500;

  void validate() const;
  double probability(long t) const;
};

enum class Adaptation { None, Contracted, Expanded };

/// Contract to K*+1 columns (active columns plus one spike column).
void contract(ModelState& s);

/// Append one spike-initialized column to Z and B.
void expand(ModelState& s, const PriorConfig& prior, RngStream& rng);

/// Dynamic truncation step run after the Gibbs cycle of iteration t (1-based).
///
/// With probability p(t) once t > burn_in: contract when more than one column
/// is inactive (K* < k - 1), expand when at most the trailing column is
/// inactive (K* >= k - 1).
Adaptation maybe_adapt(ModelState& s, long t, const AdaptationSchedule& schedule,
                       const PriorConfig& prior, RngStream& rng);

}  // namespace jlsm
