// Command-line front end: simulate, fit, evaluate, select and the study harnesses.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "jlsm/evaluate.hpp"
#include "jlsm/io.hpp"
#include "jlsm/model_select.hpp"
#include "jlsm/simulate.hpp"
#include "jlsm/study.hpp"

namespace fs = std::filesystem;
using namespace jlsm;

namespace {

enum Exit { kOk = 0, kUsage = 2, kData = 3, kNumerical = 4 };

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  int threads = 1;
  std::string family;
  std::optional<long> iterations, burn_in, thin;
};

void add_common(CLI::App* cmd, CommonOptions& o, bool needs_out = true) {
  cmd->add_option("--config", o.config_path, "key=value run configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.seed, "random seed (overrides the config)");
  auto* out = cmd->add_option("--out", o.out, "output path");
  if (needs_out) out->required();
  cmd->add_option("--threads", o.threads, "worker threads for augmentation draws")->check(CLI::PositiveNumber);
  cmd->add_option("--family", o.family, "attribute family: gaussian or bernoulli");
  cmd->add_option("--iterations", o.iterations, "total MCMC iterations (overrides the config)");
  cmd->add_option("--burn-in", o.burn_in, "burn-in iterations (overrides the config)");
  cmd->add_option("--thin", o.thin, "thinning interval (overrides the config)");
}

RunConfig resolve_config(const CommonOptions& o) {
  RunConfig c = o.config_path.empty() ? RunConfig{} : read_config(o.config_path);
  if (o.seed) c.seed = *o.seed;
  if (!o.family.empty()) c.family = family_from_string(o.family);
  if (o.iterations) c.iterations = *o.iterations;
  if (o.burn_in) c.burn_in = *o.burn_in;
  if (o.thin) c.thin = *o.thin;
  c.threads = o.threads;
  c.validate();
  return c;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stoi(item));
    } catch (const std::exception&) {
      throw DataError("not an integer list: '" + text + "'");
    }
  }
  if (out.empty()) throw DataError("empty integer list");
  return out;
}

std::pair<double, double> parse_range(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw DataError("range must look like lo:hi, got '" + text + "'");
  return {parse_double(text.substr(0, colon)), parse_double(text.substr(colon + 1))};
}

void write_fit_summary(const fs::path& path, const PosteriorChain& chain) {
  std::ofstream out(path);
  out << "kept," << chain.size() << '\n';
  if (chain.empty()) return;
  out << "k_hat," << posterior_mode_dimension(chain) << '\n';
  for (const auto& [k, count] : dimension_frequencies(chain.k_star))
    out << "freq_k" << k << ',' << format_double(double(count) / double(chain.size())) << '\n';
}

int report(int code, const char* kind, const std::string& message) {
  std::string escaped;
  for (char ch : message) escaped += ch == '"' ? std::string("\\\"") : std::string(1, ch);
  std::cerr << "error code=" << code << " kind=" << kind << " message=\"" << escaped << "\"\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint latent space model with cumulative shrinkage dimension selection"};
  app.require_subcommand(1);

  // simulate
  SimDesign design;
  std::string sim_family = "gaussian", sim_alpha = "-0.5:0.5", sim_loading = "0.25:1.25", sim_out;
  std::uint64_t sim_seed = 1;
  auto* sim = app.add_subcommand("simulate", "simulate a dataset and its ground truth");
  sim->add_option("--n", design.n, "nodes");
  sim->add_option("--q", design.q, "attributes");
  sim->add_option("--k0", design.k0, "true latent dimension");
  sim->add_option("--family", sim_family, "gaussian or bernoulli");
  sim->add_option("--alpha-range", sim_alpha, "lo:hi for node heterogeneity");
  sim->add_option("--loading-range", sim_loading, "lo:hi for loading magnitudes");
  sim->add_option("--noise-sd", design.noise_sd, "Gaussian residual standard deviation");
  sim->add_option("--seed", sim_seed, "random seed");
  sim->add_option("--out", sim_out, "output directory")->required();

  // fit
  CommonOptions fit_opts;
  std::string fit_data;
  auto* fit = app.add_subcommand("fit", "run the sampler and persist the chain");
  fit->add_option("--data", fit_data, "dataset directory")->required()->check(CLI::ExistingDirectory);
  add_common(fit, fit_opts);

  // evaluate
  std::string eval_chain, eval_truth, eval_out;
  auto* evaluate = app.add_subcommand("evaluate", "recovery metrics of a chain against ground truth");
  evaluate->add_option("--chain", eval_chain, "chain directory")->required()->check(CLI::ExistingDirectory);
  evaluate->add_option("--truth", eval_truth, "directory holding truth.txt")->required();
  evaluate->add_option("--out", eval_out, "metrics CSV")->required();

  // select
  CommonOptions sel_opts;
  std::string sel_data, sel_candidates = "1,2,3,4,5";
  int sel_folds = 0;
  auto* select = app.add_subcommand("select", "information criteria and K-fold CV over fixed dimensions");
  select->add_option("--data", sel_data, "dataset directory")->required()->check(CLI::ExistingDirectory);
  select->add_option("--candidates", sel_candidates, "comma-separated dimensions");
  select->add_option("--folds", sel_folds, "K-fold CV folds (0 skips CV)");
  add_common(select, sel_opts);

  // replicate-study1
  CommonOptions s1_opts;
  std::string s1_cell = "n100q20", s1_models = "joint";
  int s1_reps = 10;
  auto* study1 = app.add_subcommand("replicate-study1", "parameter-recovery replications for one (n, q) cell");
  study1->add_option("--cell", s1_cell, "cell label, e.g. n100q20");
  study1->add_option("--reps", s1_reps, "replications")->check(CLI::PositiveNumber);
  study1->add_option("--models", s1_models, "joint, network or both");
  add_common(study1, s1_opts);

  // replicate-study2
  CommonOptions s2_opts;
  std::vector<std::string> s2_ranges = {"-3:-1", "-0.375:-0.125"};
  int s2_reps = 10;
  auto* study2 = app.add_subcommand("replicate-study2", "density-sensitivity replications (JLSM vs network-only)");
  study2->add_option("--alpha-ranges", s2_ranges, "lo:hi heterogeneity ranges, one per density point");
  study2->add_option("--reps", s2_reps, "replications per point")->check(CLI::PositiveNumber);
  add_common(study2, s2_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return report(kUsage, "usage", e.what());
  }

  try {
    if (*sim) {
      design.family = family_from_string(sim_family);
      std::tie(design.alpha_lo, design.alpha_hi) = parse_range(sim_alpha);
      std::tie(design.loading_lo, design.loading_hi) = parse_range(sim_loading);
      design.seed = sim_seed;
      RngStream rng(sim_seed, 0);
      const auto [data, truth] = generate_dataset(design, rng);
      write_dataset(sim_out, data);
      write_truth(sim_out, truth);
    } else if (*fit) {
      const RunConfig config = resolve_config(fit_opts);
      const Dataset data = read_dataset(fit_data, config.family);
      const PosteriorChain chain = run_chain(data, config);
      persist_chain(fit_opts.out, chain, config);
      write_fit_summary(fs::path(fit_opts.out) / "summary.csv", chain);
    } else if (*evaluate) {
      const PosteriorChain chain = load_chain(eval_chain);
      if (chain.empty()) throw DataError("chain has no kept iterations");
      const GroundTruth truth = read_truth(eval_truth);
      const PointEstimate est = posterior_mean_state(chain, Columns::Active);
      const PointEstimate all = posterior_mean_state(chain, Columns::All);
      std::ofstream out(eval_out);
      out << "delta_alpha,delta_gamma,delta_B,delta_Z,delta_B_all,delta_Z_all,k_hat\n"
          << format_double(metric_delta_alpha(est, truth)) << ',' << format_double(metric_delta_gamma(est, truth))
          << ',' << format_double(metric_delta_B(est, truth)) << ',' << format_double(metric_delta_Z(est, truth))
          << ',' << format_double(metric_delta_B(all, truth)) << ',' << format_double(metric_delta_Z(all, truth))
          << ',' << posterior_mode_dimension(chain) << '\n';
    } else if (*select) {
      const RunConfig config = resolve_config(sel_opts);
      const Dataset data = read_dataset(sel_data, config.family);
      const std::vector<int> candidates = parse_int_list(sel_candidates);
      RngStream rng(config.seed, 1);
      const SelectionTable table = select_dimension(data, candidates, config, rng);
      std::ofstream out(sel_opts.out);
      out << "k,d,log_lik_at_mean,mean_log_lik,p_dic,AIC,BIC,DIC,WAIC";
      std::optional<CvResult> cv;
      if (sel_folds > 0) {
        cv = kfold_cv(data, candidates, sel_folds, config, rng);
        out << ",cv_mean,cv_se";
      }
      out << '\n';
      for (std::size_t c = 0; c < table.rows.size(); ++c) {
        const auto& r = table.rows[c];
        out << r.k << ',' << r.d << ',' << format_double(r.log_lik_at_mean) << ',' << format_double(r.mean_log_lik)
            << ',' << format_double(r.p_dic) << ',' << format_double(r.aic) << ',' << format_double(r.bic) << ','
            << format_double(r.dic) << ',' << format_double(r.waic);
        if (cv) out << ',' << format_double(cv->mean[c]) << ',' << format_double(cv->se[c]);
        out << '\n';
      }
      out << "# selected AIC=" << table.best_aic << " BIC=" << table.best_bic << " DIC=" << table.best_dic
          << " WAIC=" << table.best_waic;
      if (cv) out << " CV=" << cv->selected << " CV1SE=" << cv->selected_1se;
      out << '\n';
    } else if (*study1) {
      const RunConfig config = resolve_config(s1_opts);
      SimDesign d;
      std::tie(d.n, d.q) = parse_cell(s1_cell);
      d.family = config.family;
      std::vector<StudyModel> models;
      if (s1_models == "joint" || s1_models == "both") models.push_back(StudyModel::Joint);
      if (s1_models == "network" || s1_models == "both") models.push_back(StudyModel::NetworkOnly);
      if (models.empty()) throw DataError("--models must be joint, network or both");
      fs::create_directories(s1_opts.out);
      std::ofstream summary(fs::path(s1_opts.out) / "summary.csv");
      write_summary_header(summary);
      for (StudyModel m : models) {
        const auto results = run_replications(d, config, m, config.seed, s1_reps);
        std::ofstream reps(fs::path(s1_opts.out) / ("replications_" + to_string(m) + ".csv"));
        write_replication_csv(reps, results);
        write_summary_row(summary, summarize(results, d, m));
      }
    } else if (*study2) {
      const RunConfig config = resolve_config(s2_opts);
      fs::create_directories(s2_opts.out);
      std::ofstream curve(fs::path(s2_opts.out) / "density_curve.csv");
      curve << "alpha_lo,alpha_hi,Model,density,Delta_Z,Delta_Z_sd,Acc,MAB\n";
      for (const auto& range : s2_ranges) {
        SimDesign d;
        d.family = config.family;
        std::tie(d.alpha_lo, d.alpha_hi) = parse_range(range);
        for (StudyModel m : {StudyModel::Joint, StudyModel::NetworkOnly}) {
          const auto results = run_replications(d, config, m, config.seed, s2_reps);
          const SummaryRow row = summarize(results, d, m);
          curve << format_double(d.alpha_lo) << ',' << format_double(d.alpha_hi) << ',' << to_string(m) << ','
                << format_double(row.density) << ',' << format_double(row.delta_Z) << ','
                << format_double(row.delta_Z_sd) << ',' << format_double(row.accuracy.accuracy) << ','
                << format_double(row.accuracy.mab) << '\n';
        }
      }
    }
  } catch (const ParseError& e) {
    return report(kData, "parse", e.what());
  } catch (const DataError& e) {
    return report(kData, "data", e.what());
  } catch (const DimensionError& e) {
    return report(kData, "dimension", e.what());
  } catch (const DomainError& e) {
    return report(kUsage, "domain", e.what());
  } catch (const FactorizationError& e) {
    return report(kNumerical, "numerical", e.what());
  } catch (const std::exception& e) {
    return report(kNumerical, "internal", e.what());
  }
  return kOk;
}
