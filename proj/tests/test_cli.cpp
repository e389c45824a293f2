#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rmtfree/io.hpp"

using namespace rmtfree;
namespace fs = std::filesystem;

namespace {

fs::path work_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "rmtfree_test_cli" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

Result run(const fs::path& dir, const std::string& args) {
  const std::string cmd = std::string("\"") + RMTFREE_CLI + "\" " + args + " > \"" +
                          (dir / "stdout.txt").string() + "\" 2> \"" +
                          (dir / "stderr.txt").string() + "\"";
  const int status = std::system(cmd.c_str());
  Result r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(dir / "stdout.txt");
  r.err = slurp(dir / "stderr.txt");
  return r;
}

fs::path write_config(const fs::path& dir, const Json& j) {
  const fs::path p = dir / "config.json";
  write_json_file(p, j);
  return p;
}

std::string config_args(const fs::path& cfg, const fs::path& out) {
  return "-c \"" + cfg.string() + "\" -o \"" + out.string() + "\"";
}

}  // namespace

TEST_CASE("rate prints the value") {
  const fs::path dir = work_dir("rate");
  const Json cfg = {{"measure", {{"kind", "atoms"}, {"atoms", {{1.0, 0.5}, {-1.0, 0.5}}}}},
                    {"c", 1.0}, {"alpha", 1.3}, {"a", 2.0}, {"which", "phi_prime"}};
  const Result r = run(dir, "rate " + config_args(write_config(dir, cfg), dir / "out"));
  CHECK(r.code == 0);
  CHECK(r.out == "2\n");
  const Json report = read_json_file(dir / "out" / "rate.json");
  CHECK(report.at("value").get<double>() == 2.0);
  const Json manifest = read_json_file(dir / "out" / "manifest.json");
  CHECK(manifest.at("command") == "rate");
  CHECK(manifest.at("exit_code") == 0);
  CHECK(manifest.at("outputs").at(0).at("sha256") == file_sha256(dir / "out" / "rate.json"));
}

TEST_CASE("convolve of a point mass gives Marchenko-Pastur") {
  const fs::path dir = work_dir("convolve");
  const Json cfg = {{"measure", {{"kind", "atoms"}, {"atoms", {{0.0, 1.0}}}}}, {"c", 1.0}};
  const Result r = run(dir, "convolve " + config_args(write_config(dir, cfg), dir / "out"));
  REQUIRE(r.code == 0);
  std::ifstream csv(dir / "out" / "convolve.csv");
  std::string line;
  std::getline(csv, line);
  CHECK(line == "re_z,im_z,re_g,im_g,iterations,residual,converged");
  const Measure mp = Measure::marchenko_pastur(1.0);
  std::size_t rows = 0;
  double worst = 0.0;
  while (std::getline(csv, line)) {
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> v;
    while (std::getline(ss, cell, ',')) v.push_back(std::stod(cell));
    REQUIRE(v.size() == 7);
    worst = std::max(worst, std::abs(Complex(v[2], v[3]) - stieltjes(mp, {v[0], v[1]})));
    ++rows;
  }
  CHECK(rows == EvaluationDomain::standard().size());
  CHECK(worst <= 1e-8);
}

TEST_CASE("verify-bound is reproducible") {
  const fs::path dir = work_dir("verify_bound");
  const Json cfg = {{"mode", "gaussian"}, {"ladder", {10, 20, 40}}, {"trials", 4}, {"seed", 5}};
  const fs::path c = write_config(dir, cfg);
  const Result a = run(dir, "verify-bound " + config_args(c, dir / "a"));
  const Result b = run(dir, "verify-bound " + config_args(c, dir / "b"));
  CHECK((a.code == 0 || a.code == 3));
  CHECK(a.code == b.code);
  const Json ma = read_json_file(dir / "a" / "manifest.json");
  const Json mb = read_json_file(dir / "b" / "manifest.json");
  CHECK(ma.at("outputs") == mb.at("outputs"));
  CHECK(ma.at("config_digest") == mb.at("config_digest"));
  CHECK(ma.at("master_seed") == 5);
  std::ifstream csv(dir / "a" / "verify_bound.csv");
  std::string header;
  std::getline(csv, header);
  CHECK(header == "n,mean,stderr");

  // A seed override changes the numbers and the recorded seed.
  const Result s = run(dir, "verify-bound " + config_args(c, dir / "s") + " --seed 6");
  CHECK(s.code == a.code);
  const Json ms = read_json_file(dir / "s" / "manifest.json");
  CHECK(ms.at("master_seed") == 6);
  CHECK(ms.at("outputs") != ma.at("outputs"));
  CHECK(ms.at("config_digest") != ma.at("config_digest"));
}

TEST_CASE("verification failure exits with 3") {
  const fs::path dir = work_dir("verify_fail");
  // An unreachable target slope forces a failing verdict.
  const Json cfg = {{"mode", "gaussian"}, {"ladder", {10, 20, 40}}, {"trials", 4},
                    {"target_slope", -50.0}};
  const Result r = run(dir, "verify-bound " + config_args(write_config(dir, cfg), dir / "out"));
  CHECK(r.code == 3);
  CHECK(fs::exists(dir / "out" / "verify_bound.json"));
}

TEST_CASE("config errors exit with 1") {
  const fs::path dir = work_dir("config");
  CHECK(run(dir, "rate -c \"" + (dir / "missing.json").string() + "\"").code == 1);
  const Json typo = {{"measure", {{"kind", "semicircle"}}}, {"c", 1.0}, {"alpah", 1.0}, {"a", 1.0},
                     {"which", "phi_prime"}};
  const Result t = run(dir, "rate " + config_args(write_config(dir, typo), dir / "out"));
  CHECK(t.code == 1);
  CHECK(t.err.find("alpah") != std::string::npos);
  CHECK(run(dir, "frobnicate -c x").code == 1);
  CHECK(run(dir, "rate").code == 1);
  const Json wrong_version = {{"version", 7}, {"measure", {{"kind", "semicircle"}}}, {"c", 1.0}};
  CHECK(run(dir, "convolve " + config_args(write_config(dir, wrong_version), dir / "out")).code == 1);
}

TEST_CASE("numerical failure exits with 2 and keeps partial output") {
  const fs::path dir = work_dir("numerical");
  const Json cfg = {{"measure", {{"kind", "atoms"}, {"atoms", {{0.0, 1.0}}}}},
                    {"c", 1.0},
                    {"solver", {{"max_iterations", 50}, {"damping", 0.01}}}};
  const Result r = run(dir, "convolve " + config_args(write_config(dir, cfg), dir / "out"));
  CHECK(r.code == 2);
  CHECK(fs::exists(dir / "out" / "convolve.csv"));
  const Json manifest = read_json_file(dir / "out" / "manifest.json");
  CHECK(manifest.at("exit_code") == 2);
}

TEST_CASE("other subcommands produce their files") {
  const fs::path dir = work_dir("others");
  {
    const Json cfg = {{"mu", {{"kind", "atoms"}, {"atoms", {{0.0, 1.0}}}}},
                      {"nu", {{"kind", "atoms"}, {"atoms", {{1.0, 1.0}}}}}};
    const Result r = run(dir, "distance " + config_args(write_config(dir, cfg), dir / "d"));
    CHECK(r.code == 0);
    const Json rep = read_json_file(dir / "d" / "distance.json");
    CHECK(rep.at("ks").get<double>() == 1.0);
  }
  {
    Eigen::MatrixXd X(3, 4);
    X << 5, 30, 50, 0.1, -5, -30, 100, 2, 1, 1, 1, 1;
    write_matrix_csv(dir / "x.csv", X);
    const Json cfg = {{"matrix", "x.csv"}, {"alpha", 1.0}};
    const Result r = run(dir, "ldp-decompose " + config_args(write_config(dir, cfg), dir / "l"));
    CHECK(r.code == 0);
    const Eigen::MatrixXd A = read_matrix_csv(dir / "l" / "A.csv");
    const Eigen::MatrixXd B = read_matrix_csv(dir / "l" / "B.csv");
    const Eigen::MatrixXd C = read_matrix_csv(dir / "l" / "C.csv");
    const Eigen::MatrixXd D = read_matrix_csv(dir / "l" / "D.csv");
    CHECK((A + B + C + D - X / 2.0).cwiseAbs().maxCoeff() == 0.0);
    CHECK(fs::exists(dir / "l" / "bands.json"));
  }
  {
    const Json cfg = {{"random", {{"n", 6}, {"p", 9}}}, {"z", {0.5, 1.0}}, {"derivatives", true}};
    const Result r = run(dir, "resolvent-check " + config_args(write_config(dir, cfg), dir / "r"));
    CHECK(r.code == 0);
    CHECK(fs::exists(dir / "r" / "resolvent.json"));
  }
  {
    const Json cfg = {{"spec", {{"n", 5}, {"p", 10}, {"trials", 3}, {"seed", 1}}}};
    const Result r = run(dir, "simulate " + config_args(write_config(dir, cfg), dir / "s"));
    CHECK(r.code == 0);
    CHECK(fs::exists(dir / "s" / "eigenvalues.csv"));
    CHECK(fs::exists(dir / "s" / "stieltjes.csv"));
  }
  {
    const Json cfg = {{"source", {{"kind", "closed_form"}, {"measure", {{"kind", "semicircle"}}}}},
                      {"lo", -2.5}, {"hi", 2.5}, {"points", 201}};
    const Result r = run(dir, "invert " + config_args(write_config(dir, cfg), dir / "i"));
    CHECK(r.code == 0);
    CHECK(fs::exists(dir / "i" / "inverted.csv"));
  }
  {
    const Json cfg = {{"entry_law", {{"kind", "tail"}, {"alpha", 1.0}, {"a", 1.0}}},
                      {"c", 1.0}, {"ladder", {10, 20}}, {"trials", 3}};
    const Result r = run(dir, "exp-equiv " + config_args(write_config(dir, cfg), dir / "e"));
    CHECK((r.code == 0 || r.code == 3));
    std::ifstream csv(dir / "e" / "exp_equiv.csv");
    std::string header;
    std::getline(csv, header);
    CHECK(header == "n,mean_dist,stderr");
  }
  {
    const Json cfg = {{"n", 8}, {"p", 8}, {"U", "identity"}, {"V", "rank1"}, {"trials", 200},
                      {"bootstrap", 100}, {"z_set", {{0.0, 3.0}}}};
    const Result r = run(dir, "verify-concentration " + config_args(write_config(dir, cfg), dir / "v"));
    CHECK((r.code == 0 || r.code == 3));
    CHECK(fs::exists(dir / "v" / "verify_concentration.json"));
  }
}
