#include "jlsm/study.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <regex>

#include "jlsm/io.hpp"

namespace jlsm {

std::string to_string(StudyModel m) { return m == StudyModel::Joint ? "JLSM" : "Network"; }

ReplicationResult run_replication(const SimDesign& design, const RunConfig& config, StudyModel model,
                                  std::uint64_t seed, int rep) {
  RngStream data_rng(seed, mix_keys(0x64617461ULL, std::uint64_t(rep)));
  auto [data, truth] = generate_dataset(design, data_rng);
  if (model == StudyModel::NetworkOnly) {
    data.attributes.resize(data.n(), 0);
    data.observed.resize(data.n(), 0);
  }

  RunConfig run = config;
  run.family = design.family;
  run.mode = FitMode::Coss;
  run.seed = mix_keys(seed, 0x636861696eULL + std::uint64_t(rep));
  const PosteriorChain chain = run_chain(data, run);
  const PointEstimate est = posterior_mean_state(chain, Columns::Active);
  const PointEstimate est_all = posterior_mean_state(chain, Columns::All);

  ReplicationResult r;
  r.replication = rep;
  r.density = truth.density;
  r.delta_alpha = metric_delta_alpha(est, truth);
  r.delta_Z = metric_delta_Z(est, truth);
  r.delta_Z_all = metric_delta_Z(est_all, truth);
  r.k_hat = posterior_mode_dimension(chain);
  if (model == StudyModel::Joint) {
    r.delta_gamma = metric_delta_gamma(est, truth);
    r.delta_B = metric_delta_B(est, truth);
    r.delta_B_all = metric_delta_B(est_all, truth);
  } else {
    r.delta_B_all = std::numeric_limits<double>::quiet_NaN();
    r.delta_gamma = std::numeric_limits<double>::quiet_NaN();
    r.delta_B = std::numeric_limits<double>::quiet_NaN();
  }
  return r;
}

std::vector<ReplicationResult> run_replications(const SimDesign& design, const RunConfig& config,
                                                StudyModel model, std::uint64_t seed, int reps) {
  std::vector<ReplicationResult> out;
  for (int rep = 0; rep < reps; ++rep) out.push_back(run_replication(design, config, model, seed, rep));
  return out;
}

namespace {

std::pair<double, double> mean_sd(const std::vector<ReplicationResult>& rs, double ReplicationResult::*field) {
  double mean = 0.0;
  for (const auto& r : rs) mean += r.*field;
  mean /= double(rs.size());
  double ss = 0.0;
  for (const auto& r : rs) ss += (r.*field - mean) * (r.*field - mean);
  const double sd = rs.size() > 1 ? std::sqrt(ss / double(rs.size() - 1)) : 0.0;
  return {mean, sd};
}

std::string fmt(double x) { return std::isnan(x) ? "NA" : format_double(x); }

}  // namespace

SummaryRow summarize(const std::vector<ReplicationResult>& results, const SimDesign& design, StudyModel model) {
  if (results.empty()) throw DomainError("summarize: no replications");
  SummaryRow row;
  row.family = design.family;
  row.n = design.n;
  row.q = model == StudyModel::Joint ? design.q : 0;
  row.model = model;
  row.reps = int(results.size());
  row.density = mean_sd(results, &ReplicationResult::density).first;
  std::tie(row.delta_alpha, row.delta_alpha_sd) = mean_sd(results, &ReplicationResult::delta_alpha);
  std::tie(row.delta_gamma, row.delta_gamma_sd) = mean_sd(results, &ReplicationResult::delta_gamma);
  std::tie(row.delta_B, row.delta_B_sd) = mean_sd(results, &ReplicationResult::delta_B);
  std::tie(row.delta_Z, row.delta_Z_sd) = mean_sd(results, &ReplicationResult::delta_Z);
  row.delta_B_all = mean_sd(results, &ReplicationResult::delta_B_all).first;
  row.delta_Z_all = mean_sd(results, &ReplicationResult::delta_Z_all).first;
  std::vector<int> k_hat;
  for (const auto& r : results) k_hat.push_back(r.k_hat);
  row.accuracy = dimension_accuracy(k_hat, design.k0);
  return row;
}

void write_replication_csv(std::ostream& out, const std::vector<ReplicationResult>& results) {
  out << "replication,density,delta_alpha,delta_gamma,delta_B,delta_Z,delta_B_all,delta_Z_all,k_hat\n";
  for (const auto& r : results)
    out << r.replication << ',' << fmt(r.density) << ',' << fmt(r.delta_alpha) << ',' << fmt(r.delta_gamma) << ','
        << fmt(r.delta_B) << ',' << fmt(r.delta_Z) << ',' << fmt(r.delta_B_all) << ',' << fmt(r.delta_Z_all) << ','
        << r.k_hat << '\n';
}

void write_summary_header(std::ostream& out) {
  out << "Y,n,q,Model,reps,density,Delta_alpha,Delta_alpha_sd,Delta_gamma,Delta_gamma_sd,Delta_B,Delta_B_sd,"
         "Delta_Z,Delta_Z_sd,Acc,MAB,Delta_B_all,Delta_Z_all\n";
}

void write_summary_row(std::ostream& out, const SummaryRow& r) {
  out << to_string(r.family) << ',' << r.n << ',' << r.q << ',' << to_string(r.model) << ',' << r.reps << ','
      << fmt(r.density) << ',' << fmt(r.delta_alpha) << ',' << fmt(r.delta_alpha_sd) << ',' << fmt(r.delta_gamma)
      << ',' << fmt(r.delta_gamma_sd) << ',' << fmt(r.delta_B) << ',' << fmt(r.delta_B_sd) << ','
      << fmt(r.delta_Z) << ',' << fmt(r.delta_Z_sd) << ',' << fmt(r.accuracy.accuracy) << ','
      << fmt(r.accuracy.mab) << ',' << fmt(r.delta_B_all) << ',' << fmt(r.delta_Z_all) << '\n';
}

std::pair<Eigen::Index, Eigen::Index> parse_cell(const std::string& cell) {
  static const std::regex pattern("n([0-9]+)q([0-9]+)");
  std::smatch m;
  if (!std::regex_match(cell, m, pattern)) throw DataError("cell must look like n100q20, got '" + cell + "'");
  return {std::stol(m[1]), std::stol(m[2])};
}

}  // namespace jlsm
