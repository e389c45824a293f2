#include "rmtfree/io.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace rmtfree {

namespace fs = std::filesystem;

ObjectReader::ObjectReader(const Json& j, std::string context,
                           std::initializer_list<const char*> allowed)
    : j_(j), context_(std::move(context)) {
  if (!j_.is_object()) throw ConfigError(context_ + ": expected a JSON object");
  for (const auto& item : j_.items()) {
    const std::string& key = item.key();
    if (key == "version") {
      if (!item.value().is_number_integer() || item.value().get<long long>() != kSchemaVersion)
        throw ConfigError(context_ + ": unsupported schema version");
      continue;
    }
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) throw ConfigError(context_ + ": unknown field \"" + key + "\"");
  }
}

bool ObjectReader::has(const char* key) const { return j_.contains(key); }

const Json& ObjectReader::at(const char* key) const {
  if (!j_.contains(key)) throw ConfigError(context_ + ": missing field \"" + key + "\"");
  return j_.at(key);
}

double ObjectReader::number(const char* key) const {
  const Json& v = at(key);
  if (!v.is_number()) throw ConfigError(context_ + ": field \"" + key + "\" must be a number");
  return v.get<double>();
}

double ObjectReader::number(const char* key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

std::uint64_t ObjectReader::unsigned_integer(const char* key) const {
  const Json& v = at(key);
  const bool ok = v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
  if (!ok) throw ConfigError(context_ + ": field \"" + key + "\" must be a nonnegative integer");
  return v.get<std::uint64_t>();
}

std::uint64_t ObjectReader::unsigned_integer(const char* key, std::uint64_t fallback) const {
  return has(key) ? unsigned_integer(key) : fallback;
}

bool ObjectReader::boolean(const char* key, bool fallback) const {
  if (!has(key)) return fallback;
  const Json& v = at(key);
  if (!v.is_boolean()) throw ConfigError(context_ + ": field \"" + key + "\" must be a boolean");
  return v.get<bool>();
}

std::string ObjectReader::string(const char* key) const {
  const Json& v = at(key);
  if (!v.is_string()) throw ConfigError(context_ + ": field \"" + key + "\" must be a string");
  return v.get<std::string>();
}

std::string ObjectReader::string(const char* key, const std::string& fallback) const {
  return has(key) ? string(key) : fallback;
}

Json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

fs::path ConfigContext::resolve(const std::string& p) const {
  const fs::path candidate(p);
  return candidate.is_absolute() ? candidate : base_dir / candidate;
}

namespace {

std::vector<double> number_array(const Json& j, const std::string& what) {
  if (!j.is_array()) throw ConfigError(what + ": expected an array of numbers");
  std::vector<double> out;
  for (const Json& v : j) {
    if (!v.is_number()) throw ConfigError(what + ": expected an array of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

template <typename F>
auto as_config_error(const std::string& context, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(context + ": " + e.what());
  }
}

}  // namespace

Measure measure_from_json(const Json& j, const ConfigContext& ctx) {
  if (j.is_string()) {
    const fs::path path = ctx.resolve(j.get<std::string>());
    ConfigContext inner{path.parent_path()};
    return measure_from_json(read_json_file(path), inner);
  }
  ObjectReader r(j, "measure", {"kind", "atoms", "locations", "ratio", "x", "density", "zero_atom"});
  const std::string kind = r.string("kind");
  return as_config_error("measure", [&]() -> Measure {
    if (kind == "atoms") {
      if (r.has("atoms") == r.has("locations"))
        throw ConfigError("measure: atoms need exactly one of \"atoms\" or \"locations\"");
      if (r.has("locations")) {
        const auto locs = number_array(r.at("locations"), "measure.locations");
        return Measure::empirical(locs);
      }
      const Json& arr = r.at("atoms");
      if (!arr.is_array()) throw ConfigError("measure.atoms: expected an array");
      std::vector<Atom> atoms;
      for (const Json& a : arr) {
        const auto pair = number_array(a, "measure.atoms");
        if (pair.size() != 2) throw ConfigError("measure.atoms: each atom is [location, weight]");
        atoms.push_back({pair[0], pair[1]});
      }
      return Measure::atomic(std::move(atoms));
    }
    if (kind == "semicircle") return Measure::semicircle();
    if (kind == "mp") return Measure::marchenko_pastur(r.number("ratio"));
    if (kind == "grid") {
      const auto x = number_array(r.at("x"), "measure.x");
      const auto d = number_array(r.at("density"), "measure.density");
      if (x.size() != d.size()) throw ConfigError("measure: x and density lengths differ");
      std::vector<GridPoint> grid(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) grid[i] = {x[i], d[i]};
      return Measure::density_grid(std::move(grid), r.number("zero_atom", 0.0));
    }
    throw ConfigError("measure: unknown kind \"" + kind + "\"");
  });
}

Json measure_to_json(const Measure& mu) {
  Json j;
  j["kind"] = to_string(mu.kind());
  switch (mu.kind()) {
    case MeasureKind::Atomic: {
      Json atoms = Json::array();
      for (const Atom& a : mu.atoms()) atoms.push_back({a.location, a.weight});
      j["atoms"] = atoms;
      break;
    }
    case MeasureKind::Semicircle: break;
    case MeasureKind::MarchenkoPastur: j["ratio"] = mu.ratio(); break;
    case MeasureKind::DensityGrid: {
      Json x = Json::array(), d = Json::array();
      for (const GridPoint& g : mu.grid()) {
        x.push_back(g.x);
        d.push_back(g.density);
      }
      j["x"] = x;
      j["density"] = d;
      j["zero_atom"] = mu.zero_atom();
      break;
    }
  }
  return j;
}

EvaluationDomain domain_from_json(const Json& j) {
  ObjectReader r(j, "domain", {"s", "t", "im_max", "levels", "per_level"});
  const double s = r.number("s", 10.0);
  const double t = r.number("t", 0.5);
  return as_config_error("domain", [&] {
    const EvaluationDomain base = EvaluationDomain::standard(s, t);
    return EvaluationDomain(s, t, r.number("im_max", base.im_max()),
                            r.unsigned_integer("levels", base.levels()),
                            r.unsigned_integer("per_level", base.per_level()));
  });
}

Json domain_to_json(const EvaluationDomain& d) {
  return Json{{"s", d.s()}, {"t", d.t()}, {"im_max", d.im_max()},
              {"levels", d.levels()}, {"per_level", d.per_level()}};
}

SolverConfig solver_from_json(const Json& j, const EvaluationDomain& domain) {
  ObjectReader r(j, "solver", {"tolerance", "max_iterations", "damping"});
  SolverConfig c;
  c.domain = domain;
  c.tolerance = r.number("tolerance", c.tolerance);
  c.max_iterations = static_cast<int>(r.unsigned_integer("max_iterations", c.max_iterations));
  c.damping = r.number("damping", c.damping);
  as_config_error("solver", [&] { c.validate(); });
  return c;
}

Json solver_to_json(const SolverConfig& c) {
  return Json{{"tolerance", c.tolerance}, {"max_iterations", c.max_iterations},
              {"damping", c.damping}};
}

EntryLaw entry_law_from_json(const Json& j) {
  ObjectReader r(j, "entry_law", {"kind", "alpha", "a", "prob_plus", "normalize_variance"});
  const std::string kind = r.string("kind");
  if (kind != "tail" && (r.has("alpha") || r.has("a") || r.has("prob_plus") ||
                         r.has("normalize_variance")))
    throw ConfigError("entry_law: tail parameters given for kind \"" + kind + "\"");
  if (kind == "gaussian") return StandardGaussian{};
  if (kind == "rademacher") return Rademacher{};
  if (kind == "zero") return ZeroEntries{};
  if (kind == "tail") {
    TailLaw law;
    law.alpha = r.number("alpha");
    law.a = r.number("a");
    law.prob_plus = r.number("prob_plus", 0.5);
    law.normalize_variance = r.boolean("normalize_variance", true);
    as_config_error("entry_law", [&] { law.validate(); });
    return law;
  }
  throw ConfigError("entry_law: unknown kind \"" + kind + "\"");
}

Json entry_law_to_json(const EntryLaw& law) {
  Json j{{"kind", entry_law_name(law)}};
  if (const auto* t = std::get_if<TailLaw>(&law)) {
    j["alpha"] = t->alpha;
    j["a"] = t->a;
    j["prob_plus"] = t->prob_plus;
    j["normalize_variance"] = t->normalize_variance;
  }
  return j;
}

EnsembleSpec ensemble_spec_from_json(const Json& j, const ConfigContext& ctx) {
  ObjectReader r(j, "spec", {"n", "p", "entry_law", "deformation", "seed", "trials"});
  EnsembleSpec s;
  s.n = r.unsigned_integer("n");
  s.p = r.unsigned_integer("p");
  s.entry_law = r.has("entry_law") ? entry_law_from_json(r.at("entry_law")) : EntryLaw{};
  if (r.has("deformation")) s.deformation = matrix_from_json(r.at("deformation"), ctx);
  s.seed = r.unsigned_integer("seed", 0);
  s.trials = r.unsigned_integer("trials", 1);
  as_config_error("spec", [&] { s.validate(); });
  return s;
}

Json ensemble_spec_to_json(const EnsembleSpec& s) {
  Json j{{"n", s.n}, {"p", s.p}, {"entry_law", entry_law_to_json(s.entry_law)},
         {"seed", s.seed}, {"trials", s.trials}};
  if (s.has_deformation()) j["deformation"] = matrix_to_json(s.deformation);
  return j;
}

Eigen::MatrixXd matrix_from_json(const Json& j, const ConfigContext& ctx) {
  if (j.is_string()) return read_matrix_csv(ctx.resolve(j.get<std::string>()));
  if (!j.is_array() || j.empty()) throw ConfigError("matrix: expected a nonempty array of rows");
  std::vector<std::vector<double>> rows;
  for (const Json& row : j) rows.push_back(number_array(row, "matrix row"));
  const std::size_t cols = rows.front().size();
  if (cols == 0) throw ConfigError("matrix: empty row");
  Eigen::MatrixXd M(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols) throw ConfigError("matrix: ragged rows");
    for (std::size_t k = 0; k < cols; ++k)
      M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
  }
  return M;
}

Json matrix_to_json(const Eigen::MatrixXd& M) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < M.cols(); ++k) row.push_back(M(i, k));
    rows.push_back(row);
  }
  return rows;
}

Complex complex_from_json(const Json& j) {
  const auto v = number_array(j, "complex number");
  if (v.size() != 2) throw ConfigError("complex number: expected [re, im]");
  return {v[0], v[1]};
}

Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Eigen::MatrixXd read_matrix_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (cell.find_first_not_of(" \t\r", used) != std::string::npos) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw ConfigError(path.string() + ": not a number: \"" + cell + "\"");
      }
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw ConfigError(path.string() + ": ragged rows");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ConfigError(path.string() + ": empty matrix");
  Eigen::MatrixXd M(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t k = 0; k < rows[i].size(); ++k)
      M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
  return M;
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void write_matrix_csv(const fs::path& path, const Eigen::MatrixXd& M) {
  std::string out;
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    for (Eigen::Index k = 0; k < M.cols(); ++k) {
      if (k) out += ',';
      out += format_number(M(i, k));
    }
    out += '\n';
  }
  write_text_file(path, out);
}

void write_text_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void write_json_file(const fs::path& path, const Json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i)
    os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return os.str();
}

std::string file_sha256(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return sha256_hex(ss.str());
}

std::string json_digest(const Json& j) { return sha256_hex(j.dump()); }

Json RunManifest::to_json() const {
  Json outs = Json::array();
  for (const auto& o : outputs) outs.push_back({{"path", o.path}, {"sha256", o.digest}});
  return Json{{"command", command},           {"config_digest", config_digest},
              {"master_seed", master_seed},   {"tool_version", tool_version},
              {"started", started},           {"finished", finished},
              {"exit_code", exit_code},       {"outputs", outs}};
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace rmtfree
