#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "jlsm/chain.hpp"
#include "jlsm/model.hpp"
#include "jlsm/simulate.hpp"

namespace jlsm {

inline constexpr const char* kVersion = "jlsm 1.0.0";

/// Shortest decimal text that parses back to the same double.
std::string format_double(double x);
double parse_double(const std::string& text);

// Run configuration: flat `key = value` lines, `#` comments.

std::string config_to_text(const RunConfig& config);
/// Keys absent from the text keep their defaults; unknown keys are rejected.
RunConfig parse_config(std::istream& in, const std::string& source);
RunConfig read_config(const std::filesystem::path& path);
/// FNV-1a (64 bit) of the canonical config text, as 16 hex digits.
std::string config_hash(const RunConfig& config);

// Network: header `nodes <n>` then one 0-indexed `i j` pair per line.

void write_edge_list(std::ostream& out, const Eigen::Ref<const Eigen::MatrixXd>& A);
Eigen::MatrixXd read_edge_list(std::istream& in, const std::string& source);

// Attributes: comma-separated, one header row of names, `NA` for missing.

struct AttributeTable {
  std::vector<std::string> names;
  Eigen::MatrixXd values;
  BoolMatrix observed;
};

void write_attributes(std::ostream& out, const AttributeTable& table);
AttributeTable read_attributes(std::istream& in, const std::string& source);

/// `<dir>/network.txt` and `<dir>/attributes.csv`.
void write_dataset(const std::filesystem::path& dir, const Dataset& data);
Dataset read_dataset(const std::filesystem::path& dir, Family family);

/// `<dir>/truth.txt` sidecar written next to simulated data.
void write_truth(const std::filesystem::path& dir, const GroundTruth& truth);
GroundTruth read_truth(const std::filesystem::path& dir);

/// Directory of per-parameter CSVs plus `manifest.txt` and `config.txt`.
void persist_chain(const std::filesystem::path& dir, const PosteriorChain& chain, const RunConfig& config);
/// Throws DataError when the manifest hash disagrees with `config`.
PosteriorChain load_chain(const std::filesystem::path& dir, const RunConfig& config);
/// Loads using the config stored alongside the chain.
PosteriorChain load_chain(const std::filesystem::path& dir);

/// Whole-file contents; DataError if unreadable.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace jlsm
