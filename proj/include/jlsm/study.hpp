#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "jlsm/chain.hpp"
#include "jlsm/evaluate.hpp"
#include "jlsm/simulate.hpp"

namespace jlsm {

enum class StudyModel { Joint, NetworkOnly };

std::string to_string(StudyModel m);

/// Metrics of one simulated replication. Deltas for Z and B average Gram
/// products over slab columns only; the `_all` variants keep every column.
struct ReplicationResult {
  int replication = 0;
  double density = 0.0;
  double delta_alpha = 0.0;
  double delta_gamma = 0.0;  // NaN for the network-only model
  double delta_B = 0.0;      // NaN for the network-only model
  double delta_Z = 0.0;
  double delta_B_all = 0.0;  // Gram averages over every column, spike columns included
  double delta_Z_all = 0.0;
  int k_hat = 0;
};

/// Simulates replication `rep` of `design` and fits it with the COSS sampler.
/// Data and chain seeds are derived from (seed, rep), so replications are
/// independent of each other and of the order they run in.
ReplicationResult run_replication(const SimDesign& design, const RunConfig& config, StudyModel model,
                                  std::uint64_t seed, int rep);

/// Replications 0..reps-1.
std::vector<ReplicationResult> run_replications(const SimDesign& design, const RunConfig& config,
                                                StudyModel model, std::uint64_t seed, int reps);

/// Mean and standard deviation of each metric plus Acc and MAB.
struct SummaryRow {
  Family family = Family::Gaussian;
  Eigen::Index n = 0;
  Eigen::Index q = 0;
  StudyModel model = StudyModel::Joint;
  int reps = 0;
  double density = 0.0;
  double delta_alpha = 0.0, delta_alpha_sd = 0.0;
  double delta_gamma = 0.0, delta_gamma_sd = 0.0;
  double delta_B = 0.0, delta_B_sd = 0.0;
  double delta_Z = 0.0, delta_Z_sd = 0.0;
  double delta_B_all = 0.0, delta_Z_all = 0.0;
  DimensionAccuracy accuracy;
};

SummaryRow summarize(const std::vector<ReplicationResult>& results, const SimDesign& design, StudyModel model);

void write_replication_csv(std::ostream& out, const std::vector<ReplicationResult>& results);
/// Columns follow the parameter-recovery table: Y, (n,q), model, the four
/// deltas with their standard deviations, Acc and MAB.
void write_summary_header(std::ostream& out);
void write_summary_row(std::ostream& out, const SummaryRow& row);

/// Parses a cell label such as "n100q20".
std::pair<Eigen::Index, Eigen::Index> parse_cell(const std::string& cell);

}  // namespace jlsm
