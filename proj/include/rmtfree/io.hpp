#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "rmtfree/domain.hpp"
#include "rmtfree/ensemble.hpp"
#include "rmtfree/freeconv.hpp"
#include "rmtfree/measure.hpp"

namespace rmtfree {

using Json = nlohmann::json;

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

/// Malformed, incomplete or inconsistent configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Field access on a JSON object that rejects keys outside an allowed set.
/// "version" is always allowed and must equal the schema version when present.
class ObjectReader {
 public:
  ObjectReader(const Json& j, std::string context, std::initializer_list<const char*> allowed);

  bool has(const char* key) const;
  const Json& at(const char* key) const;
  double number(const char* key) const;
  double number(const char* key, double fallback) const;
  std::uint64_t unsigned_integer(const char* key) const;
  std::uint64_t unsigned_integer(const char* key, std::uint64_t fallback) const;
  bool boolean(const char* key, bool fallback) const;
  std::string string(const char* key) const;
  std::string string(const char* key, const std::string& fallback) const;
  const std::string& context() const { return context_; }

 private:
  const Json& j_;
  std::string context_;
};

Json read_json_file(const std::filesystem::path& path);

/// Relative paths inside configs resolve against this directory.
struct ConfigContext {
  std::filesystem::path base_dir = ".";
  std::filesystem::path resolve(const std::string& p) const;
};

/// Measure schema: {"kind": "atoms", "atoms": [[x, w], ...]} or
/// {"kind": "atoms", "locations": [...]} (equal weights), {"kind": "semicircle"},
/// {"kind": "mp", "ratio": c}, {"kind": "grid", "x": [...], "density": [...],
/// "zero_atom": m}. A string is read as the path of a file holding the object.
Measure measure_from_json(const Json& j, const ConfigContext& ctx = {});
Json measure_to_json(const Measure& mu);

EvaluationDomain domain_from_json(const Json& j);
Json domain_to_json(const EvaluationDomain& d);

SolverConfig solver_from_json(const Json& j, const EvaluationDomain& domain);
Json solver_to_json(const SolverConfig& config);

EntryLaw entry_law_from_json(const Json& j);
Json entry_law_to_json(const EntryLaw& law);

/// {"n", "p", "entry_law", "deformation" (optional matrix), "seed", "trials"}.
EnsembleSpec ensemble_spec_from_json(const Json& j, const ConfigContext& ctx = {});
Json ensemble_spec_to_json(const EnsembleSpec& spec);

/// Matrix as an array of rows, or a string naming a CSV file.
Eigen::MatrixXd matrix_from_json(const Json& j, const ConfigContext& ctx = {});
Json matrix_to_json(const Eigen::MatrixXd& M);

Complex complex_from_json(const Json& j);
Json complex_to_json(Complex z);

Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path);
void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& M);

/// Shortest round-trip decimal form of x ("inf", "-inf", "nan" for non-finite).
std::string format_number(double x);

void write_text_file(const std::filesystem::path& path, const std::string& text);
/// Pretty JSON with a trailing newline; key order is sorted, so equal values
/// always give equal bytes.
void write_json_file(const std::filesystem::path& path, const Json& j);

std::string sha256_hex(const std::string& bytes);
std::string file_sha256(const std::filesystem::path& path);
/// Digest of the compact sorted-key serialization.
std::string json_digest(const Json& j);

struct ManifestOutput {
  std::string path;
  std::string digest;
};

struct RunManifest {
  std::string command;
  std::string config_digest;
  std::uint64_t master_seed = 0;
  std::string tool_version = kToolVersion;
  std::string started;
  std::string finished;
  int exit_code = 0;
  std::vector<ManifestOutput> outputs;

  Json to_json() const;
};

/// UTC time as an ISO 8601 string.
std::string utc_timestamp();

}  // namespace rmtfree
