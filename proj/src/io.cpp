#include "jlsm/io.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace jlsm {

namespace fs = std::filesystem;

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& text) {
  double x = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  if (first != last && *first == '+') ++first;
  const auto res = std::from_chars(first, last, x);
  if (res.ec != std::errc() || res.ptr != last) throw DataError("not a number: '" + text + "'");
  return x;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, delim)) out.push_back(trim(field));
  if (!line.empty() && line.back() == delim) out.emplace_back();
  return out;
}

long parse_long(const std::string& text) {
  long x = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), x);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size())
    throw DataError("not an integer: '" + text + "'");
  return x;
}

std::uint64_t parse_u64(const std::string& text) {
  std::uint64_t x = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), x);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size())
    throw DataError("not an unsigned integer: '" + text + "'");
  return x;
}

bool parse_bool(const std::string& text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw DataError("not a boolean: '" + text + "'");
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  return out;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  return in;
}

template <typename Vec>
void write_row(std::ostream& out, const Vec& v, bool leading_size) {
  bool first = true;
  if (leading_size) {
    out << v.size();
    first = false;
  }
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!first) out << ',';
    out << format_double(v[i]);
    first = false;
  }
  out << '\n';
}

Eigen::VectorXd parse_row(const std::vector<std::string>& fields, std::size_t offset, const std::string& source,
                          long line) {
  Eigen::VectorXd v(Eigen::Index(fields.size() - offset));
  try {
    for (std::size_t c = offset; c < fields.size(); ++c) v[Eigen::Index(c - offset)] = parse_double(fields[c]);
  } catch (const DataError& e) {
    throw ParseError(source, line, e.what());
  }
  return v;
}

// One vector per line; an empty line is an empty vector.
void write_vectors(const fs::path& path, const std::vector<Eigen::VectorXd>& rows) {
  auto out = open_out(path);
  for (const auto& v : rows) write_row(out, v, false);
}

std::vector<Eigen::VectorXd> read_vectors(const fs::path& path) {
  auto in = open_in(path);
  std::vector<Eigen::VectorXd> rows;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) {
      rows.emplace_back();
      continue;
    }
    rows.push_back(parse_row(split(line, ','), 0, path.string(), lineno));
  }
  return rows;
}

// Row-major matrices with a leading column count.
void write_matrices(const fs::path& path, const std::vector<Eigen::MatrixXd>& mats) {
  auto out = open_out(path);
  for (const auto& m : mats) {
    out << m.cols();
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index h = 0; h < m.cols(); ++h) out << ',' << format_double(m(i, h));
    out << '\n';
  }
}

std::vector<Eigen::MatrixXd> read_matrices(const fs::path& path, Eigen::Index rows) {
  auto in = open_in(path);
  std::vector<Eigen::MatrixXd> mats;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto fields = split(line, ',');
    long k = 0;
    try {
      k = parse_long(fields.at(0));
    } catch (const std::exception&) {
      throw ParseError(path.string(), lineno, "missing column count");
    }
    const Eigen::VectorXd v = parse_row(fields, 1, path.string(), lineno);
    if (v.size() != rows * k) throw ParseError(path.string(), lineno, "field count does not match k");
    Eigen::MatrixXd m(rows, k);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index h = 0; h < k; ++h) m(i, h) = v[i * k + h];
    mats.push_back(std::move(m));
  }
  return mats;
}

std::map<std::string, std::string> read_key_values(std::istream& in, const std::string& source) {
  std::map<std::string, std::string> kv;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(source, lineno, "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ParseError(source, lineno, "empty key");
    if (kv.count(key)) throw ParseError(source, lineno, "duplicate key '" + key + "'");
    kv[key] = trim(line.substr(eq + 1));
  }
  return kv;
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace

// threads is an execution setting: results do not depend on it, so it is
// neither serialized nor hashed.
std::string config_to_text(const RunConfig& c) {
  std::ostringstream o;
  o << "family = " << to_string(c.family) << '\n'
    << "mode = " << (c.mode == FitMode::Coss ? "coss" : "fixed-k") << '\n'
    << "k_init = " << c.prior.k_init << '\n'
    << "iterations = " << c.iterations << '\n'
    << "burn_in = " << c.burn_in << '\n'
    << "thin = " << c.thin << '\n'
    << "seed = " << c.seed << '\n'
    << "impute = " << (c.impute ? "true" : "false") << '\n'
    << "sigma_alpha = " << format_double(c.prior.sigma_alpha) << '\n'
    << "sigma_gamma = " << format_double(c.prior.sigma_gamma) << '\n'
    << "sigma_B = " << format_double(c.prior.sigma_B) << '\n'
    << "a_sigma = " << format_double(c.prior.a_sigma) << '\n'
    << "b_sigma = " << format_double(c.prior.b_sigma) << '\n'
    << "a_theta = " << format_double(c.prior.a_theta) << '\n'
    << "b_theta = " << format_double(c.prior.b_theta) << '\n'
    << "kappa = " << format_double(c.prior.kappa) << '\n'
    << "a_stick = " << format_double(c.prior.a_stick) << '\n'
    << "theta0 = " << format_double(c.prior.theta0) << '\n'
    << "eta0 = " << format_double(c.adaptation.eta0) << '\n'
    << "eta1 = " << format_double(c.adaptation.eta1) << '\n'
    << "adapt_after = " << c.adaptation.burn_in << '\n';
  return o.str();
}

RunConfig parse_config(std::istream& in, const std::string& source) {
  RunConfig c;
  const auto kv = read_key_values(in, source);
  using Setter = std::function<void(const std::string&)>;
  const std::map<std::string, Setter> setters = {
      {"family", [&](const std::string& v) { c.family = family_from_string(v); }},
      {"mode",
       [&](const std::string& v) {
         if (v == "coss") c.mode = FitMode::Coss;
         else if (v == "fixed-k") c.mode = FitMode::FixedK;
         else throw DataError("mode must be coss or fixed-k");
       }},
      {"k_init", [&](const std::string& v) { c.prior.k_init = int(parse_long(v)); }},
      {"k", [&](const std::string& v) { c.prior.k_init = int(parse_long(v)); }},
      {"iterations", [&](const std::string& v) { c.iterations = parse_long(v); }},
      {"burn_in", [&](const std::string& v) { c.burn_in = parse_long(v); }},
      {"thin", [&](const std::string& v) { c.thin = parse_long(v); }},
      {"seed", [&](const std::string& v) { c.seed = parse_u64(v); }},
      {"impute", [&](const std::string& v) { c.impute = parse_bool(v); }},
      {"threads", [&](const std::string& v) { c.threads = int(parse_long(v)); }},
      {"sigma_alpha", [&](const std::string& v) { c.prior.sigma_alpha = parse_double(v); }},
      {"sigma_gamma", [&](const std::string& v) { c.prior.sigma_gamma = parse_double(v); }},
      {"sigma_B", [&](const std::string& v) { c.prior.sigma_B = parse_double(v); }},
      {"a_sigma", [&](const std::string& v) { c.prior.a_sigma = parse_double(v); }},
      {"b_sigma", [&](const std::string& v) { c.prior.b_sigma = parse_double(v); }},
      {"a_theta", [&](const std::string& v) { c.prior.a_theta = parse_double(v); }},
      {"b_theta", [&](const std::string& v) { c.prior.b_theta = parse_double(v); }},
      {"kappa", [&](const std::string& v) { c.prior.kappa = parse_double(v); }},
      {"a_stick", [&](const std::string& v) { c.prior.a_stick = parse_double(v); }},
      {"theta0", [&](const std::string& v) { c.prior.theta0 = parse_double(v); }},
      {"eta0", [&](const std::string& v) { c.adaptation.eta0 = parse_double(v); }},
      {"eta1", [&](const std::string& v) { c.adaptation.eta1 = parse_double(v); }},
      {"adapt_after", [&](const std::string& v) { c.adaptation.burn_in = parse_long(v); }},
  };
  for (const auto& [key, value] : kv) {
    const auto it = setters.find(key);
    if (it == setters.end()) throw DataError(source + ": unknown config key '" + key + "'");
    try {
      it->second(value);
    } catch (const DataError& e) {
      throw DataError(source + ": " + key + ": " + e.what());
    }
  }
  return c;
}

RunConfig read_config(const fs::path& path) {
  auto in = open_in(path);
  return parse_config(in, path.string());
}

std::string config_hash(const RunConfig& config) { return fnv1a_hex(config_to_text(config)); }

void write_edge_list(std::ostream& out, const Eigen::Ref<const Eigen::MatrixXd>& A) {
  out << "nodes " << A.rows() << '\n';
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = i + 1; j < A.cols(); ++j)
      if (A(i, j) != 0.0) out << i << ' ' << j << '\n';
}

Eigen::MatrixXd read_edge_list(std::istream& in, const std::string& source) {
  std::string line;
  long lineno = 0;
  Eigen::Index n = -1;
  Eigen::MatrixXd A;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::istringstream ss(t);
    if (n < 0) {
      std::string word;
      long count = -1;
      std::string rest;
      if (!(ss >> word >> count) || word != "nodes" || count < 0 || (ss >> rest))
        throw ParseError(source, lineno, "expected header 'nodes <n>'");
      n = count;
      A = Eigen::MatrixXd::Zero(n, n);
      continue;
    }
    long i = -1;
    long j = -1;
    std::string rest;
    if (!(ss >> i >> j) || (ss >> rest)) throw ParseError(source, lineno, "expected 'i j'");
    if (i < 0 || j < 0 || i >= n || j >= n) throw ParseError(source, lineno, "node index out of range");
    if (i == j) throw ParseError(source, lineno, "self-loop");
    if (A(i, j) != 0.0) throw ParseError(source, lineno, "duplicate edge");
    A(i, j) = 1.0;
    A(j, i) = 1.0;
  }
  if (n < 0) throw ParseError(source, lineno, "missing 'nodes <n>' header");
  return A;
}

void write_attributes(std::ostream& out, const AttributeTable& t) {
  for (std::size_t j = 0; j < t.names.size(); ++j) out << (j ? "," : "") << t.names[j];
  out << '\n';
  for (Eigen::Index i = 0; i < t.values.rows(); ++i) {
    for (Eigen::Index j = 0; j < t.values.cols(); ++j)
      out << (j ? "," : "") << (t.observed(i, j) ? format_double(t.values(i, j)) : "NA");
    out << '\n';
  }
}

AttributeTable read_attributes(std::istream& in, const std::string& source) {
  AttributeTable t;
  std::string line;
  long lineno = 0;
  bool header = true;
  std::vector<std::vector<double>> rows;
  std::vector<std::vector<bool>> mask;
  while (std::getline(in, line)) {
    ++lineno;
    if (header) {
      header = false;
      if (!trim(line).empty()) t.names = split(line, ',');
      continue;
    }
    if (trim(line).empty()) {
      if (t.names.empty()) {  // zero attributes: every data row is empty
        rows.emplace_back();
        mask.emplace_back();
        continue;
      }
      throw ParseError(source, lineno, "empty row");
    }
    const auto fields = split(line, ',');
    if (fields.size() != t.names.size()) throw ParseError(source, lineno, "wrong number of fields");
    std::vector<double> r(fields.size(), 0.0);
    std::vector<bool> m(fields.size(), true);
    for (std::size_t j = 0; j < fields.size(); ++j) {
      if (fields[j] == "NA") {
        m[j] = false;
        continue;
      }
      try {
        r[j] = parse_double(fields[j]);
      } catch (const DataError& e) {
        throw ParseError(source, lineno, e.what());
      }
    }
    rows.push_back(std::move(r));
    mask.push_back(std::move(m));
  }
  if (header) throw ParseError(source, 0, "missing header row");
  const auto n = Eigen::Index(rows.size());
  const auto q = Eigen::Index(t.names.size());
  t.values.resize(n, q);
  t.observed.resize(n, q);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < q; ++j) {
      t.values(i, j) = rows[std::size_t(i)][std::size_t(j)];
      t.observed(i, j) = mask[std::size_t(i)][std::size_t(j)];
    }
  return t;
}

void write_dataset(const fs::path& dir, const Dataset& data) {
  fs::create_directories(dir);
  {
    auto out = open_out(dir / "network.txt");
    write_edge_list(out, data.adjacency);
  }
  AttributeTable t;
  for (Eigen::Index j = 0; j < data.q(); ++j) t.names.push_back("y" + std::to_string(j + 1));
  t.values = data.attributes;
  t.observed = data.observed;
  if (t.observed.size() == 0) t.observed = BoolMatrix::Constant(data.n(), data.q(), true);
  auto out = open_out(dir / "attributes.csv");
  write_attributes(out, t);
}

Dataset read_dataset(const fs::path& dir, Family family) {
  Dataset d;
  d.family = family;
  {
    auto in = open_in(dir / "network.txt");
    d.adjacency = read_edge_list(in, (dir / "network.txt").string());
  }
  const fs::path attr = dir / "attributes.csv";
  if (fs::exists(attr)) {
    auto in = open_in(attr);
    AttributeTable t = read_attributes(in, attr.string());
    if (t.values.rows() != d.n() && t.values.cols() > 0)
      throw DataError(attr.string() + ": row count differs from the network's node count");
    d.attributes = t.values.cols() > 0 ? t.values : Eigen::MatrixXd(d.n(), 0);
    d.observed = t.values.cols() > 0 ? t.observed : BoolMatrix(d.n(), 0);
  } else {
    d.attributes.resize(d.n(), 0);
    d.observed.resize(d.n(), 0);
  }
  d.validate();
  return d;
}

void write_truth(const fs::path& dir, const GroundTruth& truth) {
  fs::create_directories(dir);
  auto out = open_out(dir / "truth.txt");
  out << "density," << format_double(truth.density) << '\n';
  out << "alpha";
  for (Eigen::Index i = 0; i < truth.alpha.size(); ++i) out << ',' << format_double(truth.alpha[i]);
  out << "\ngamma";
  for (Eigen::Index i = 0; i < truth.gamma.size(); ++i) out << ',' << format_double(truth.gamma[i]);
  out << "\nsigma2";
  for (Eigen::Index i = 0; i < truth.sigma2.size(); ++i) out << ',' << format_double(truth.sigma2[i]);
  out << '\n';
  for (const auto& [name, m] : {std::pair<const char*, const Eigen::MatrixXd*>{"Z", &truth.Z}, {"B", &truth.B}}) {
    out << name << ',' << m->rows() << ',' << m->cols();
    for (Eigen::Index i = 0; i < m->rows(); ++i)
      for (Eigen::Index h = 0; h < m->cols(); ++h) out << ',' << format_double((*m)(i, h));
    out << '\n';
  }
}

GroundTruth read_truth(const fs::path& dir) {
  const fs::path path = dir / "truth.txt";
  auto in = open_in(path);
  GroundTruth t;
  std::string line;
  long lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto fields = split(line, ',');
    const std::string& key = fields[0];
    if (key == "density") {
      t.density = parse_row(fields, 1, path.string(), lineno)[0];
    } else if (key == "alpha" || key == "gamma" || key == "sigma2") {
      Eigen::VectorXd v = parse_row(fields, 1, path.string(), lineno);
      (key == "alpha" ? t.alpha : key == "gamma" ? t.gamma : t.sigma2) = std::move(v);
    } else if (key == "Z" || key == "B") {
      if (fields.size() < 3) throw ParseError(path.string(), lineno, "missing matrix shape");
      long rows = 0;
      long cols = 0;
      try {
        rows = parse_long(fields[1]);
        cols = parse_long(fields[2]);
      } catch (const DataError& e) {
        throw ParseError(path.string(), lineno, e.what());
      }
      const Eigen::VectorXd v = parse_row(fields, 3, path.string(), lineno);
      if (v.size() != rows * cols) throw ParseError(path.string(), lineno, "matrix size mismatch");
      Eigen::MatrixXd m(rows, cols);
      for (long i = 0; i < rows; ++i)
        for (long h = 0; h < cols; ++h) m(i, h) = v[i * cols + h];
      (key == "Z" ? t.Z : t.B) = std::move(m);
    } else {
      throw ParseError(path.string(), lineno, "unknown field '" + key + "'");
    }
  }
  return t;
}

void persist_chain(const fs::path& dir, const PosteriorChain& chain, const RunConfig& config) {
  fs::create_directories(dir);
  write_file(dir / "config.txt", config_to_text(config));
  {
    auto out = open_out(dir / "manifest.txt");
    out << "version = " << kVersion << '\n'
        << "config_hash = " << config_hash(config) << '\n'
        << "seed = " << config.seed << '\n'
        << "family = " << to_string(chain.family) << '\n'
        << "kept = " << chain.size() << '\n'
        << "nodes = " << (chain.empty() ? 0 : chain.alpha.front().size()) << '\n'
        << "attributes = " << (chain.empty() ? 0 : chain.gamma.front().size()) << '\n';
  }
  {
    auto out = open_out(dir / "trace.csv");
    out << "iteration,k,k_star,log_lik\n";
    for (std::size_t s = 0; s < chain.size(); ++s)
      out << chain.iteration[s] << ',' << chain.Z[s].cols() << ',' << chain.k_star[s] << ','
          << format_double(chain.log_lik[s]) << '\n';
  }
  write_vectors(dir / "alpha.csv", chain.alpha);
  write_vectors(dir / "gamma.csv", chain.gamma);
  write_vectors(dir / "sigma2.csv", chain.sigma2);
  write_vectors(dir / "theta.csv", chain.theta);
  write_vectors(dir / "imputed.csv", chain.imputed);
  {
    auto out = open_out(dir / "active.csv");
    for (const auto& m : chain.active) {
      for (Eigen::Index h = 0; h < m.size(); ++h) out << (h ? "," : "") << m[h];
      out << '\n';
    }
  }
  write_matrices(dir / "Z.csv", chain.Z);
  write_matrices(dir / "B.csv", chain.B);
}

PosteriorChain load_chain(const fs::path& dir, const RunConfig& config) {
  std::map<std::string, std::string> manifest;
  {
    auto in = open_in(dir / "manifest.txt");
    manifest = read_key_values(in, (dir / "manifest.txt").string());
  }
  for (const char* key : {"config_hash", "family", "kept", "nodes", "attributes"})
    if (!manifest.count(key)) throw DataError("manifest lacks '" + std::string(key) + "'");
  if (manifest["config_hash"] != config_hash(config))
    throw DataError("chain in " + dir.string() + " was produced under a different configuration");

  PosteriorChain chain;
  chain.family = family_from_string(manifest["family"]);
  const auto kept = std::size_t(parse_long(manifest["kept"]));
  const Eigen::Index n = parse_long(manifest["nodes"]);
  const Eigen::Index q = parse_long(manifest["attributes"]);

  {
    const fs::path path = dir / "trace.csv";
    auto in = open_in(path);
    std::string line;
    std::getline(in, line);
    long lineno = 1;
    while (std::getline(in, line)) {
      ++lineno;
      const auto f = split(line, ',');
      if (f.size() != 4) throw ParseError(path.string(), lineno, "expected 4 fields");
      try {
        chain.iteration.push_back(parse_long(f[0]));
        chain.k_star.push_back(int(parse_long(f[2])));
        chain.log_lik.push_back(parse_double(f[3]));
      } catch (const DataError& e) {
        throw ParseError(path.string(), lineno, e.what());
      }
    }
  }
  chain.alpha = read_vectors(dir / "alpha.csv");
  chain.gamma = read_vectors(dir / "gamma.csv");
  chain.sigma2 = read_vectors(dir / "sigma2.csv");
  chain.theta = read_vectors(dir / "theta.csv");
  chain.imputed = read_vectors(dir / "imputed.csv");
  for (const auto& v : read_vectors(dir / "active.csv")) chain.active.push_back(v.cast<int>());
  chain.Z = read_matrices(dir / "Z.csv", n);
  chain.B = read_matrices(dir / "B.csv", q);

  // files written for q = 0 hold empty lines, which read back as empty vectors
  for (auto* v : {&chain.gamma, &chain.sigma2})
    if (v->size() < kept) v->resize(kept);
  const std::size_t sizes[] = {chain.iteration.size(), chain.alpha.size(), chain.gamma.size(), chain.sigma2.size(),
                               chain.theta.size(),     chain.Z.size(),     chain.B.size(),
                               chain.active.size()};
  for (std::size_t s : sizes)
    if (s != kept) throw DataError("chain files in " + dir.string() + " disagree with the manifest count");
  if (!chain.imputed.empty() && chain.imputed.size() != kept)
    throw DataError("imputed.csv disagrees with the manifest count");
  return chain;
}

PosteriorChain load_chain(const fs::path& dir) { return load_chain(dir, read_config(dir / "config.txt")); }

std::string read_file(const fs::path& path) {
  auto in = open_in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& contents) {
  auto out = open_out(path);
  out << contents;
}

}  // namespace jlsm
