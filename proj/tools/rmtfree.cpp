#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "rmtfree/domain.hpp"
#include "rmtfree/ensemble.hpp"
#include "rmtfree/freeconv.hpp"
#include "rmtfree/io.hpp"
#include "rmtfree/ldp.hpp"
#include "rmtfree/measure.hpp"
#include "rmtfree/metrics.hpp"
#include "rmtfree/resolvent.hpp"
#include "rmtfree/verify.hpp"

namespace fs = std::filesystem;
using namespace rmtfree;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitVerification = 3;

struct Run {
  std::string command;
  fs::path out_dir;
  Json config;
  ConfigContext ctx;
  std::optional<std::uint64_t> seed_override;
  std::uint64_t seed_used = 0;
  std::vector<fs::path> outputs;

  std::uint64_t seed(std::uint64_t from_config) {
    seed_used = seed_override.value_or(from_config);
    return seed_used;
  }

  void json(const std::string& name, const Json& j) {
    write_json_file(out_dir / name, j);
    outputs.push_back(out_dir / name);
  }

  void text(const std::string& name, const std::string& body) {
    write_text_file(out_dir / name, body);
    outputs.push_back(out_dir / name);
  }

  void matrix(const std::string& name, const Eigen::MatrixXd& M) {
    write_matrix_csv(out_dir / name, M);
    outputs.push_back(out_dir / name);
  }
};

std::string csv_row(std::initializer_list<std::string> cells) {
  std::string s;
  bool first = true;
  for (const auto& c : cells) {
    if (!first) s += ',';
    s += c;
    first = false;
  }
  return s + '\n';
}

std::string num(double x) { return format_number(x); }

Json number_or_string(double x) {
  if (std::isfinite(x)) return x;
  return format_number(x);
}

EvaluationDomain domain_field(const ObjectReader& r) {
  return r.has("domain") ? domain_from_json(r.at("domain")) : EvaluationDomain::standard();
}

SolverConfig solver_field(const ObjectReader& r, const EvaluationDomain& domain) {
  return solver_from_json(r.has("solver") ? r.at("solver") : Json::object(), domain);
}

std::vector<std::size_t> ladder_field(const ObjectReader& r, const char* key) {
  const Json& j = r.at(key);
  if (!j.is_array()) throw ConfigError(std::string(key) + ": expected an array of integers");
  std::vector<std::size_t> out;
  for (const Json& v : j) {
    if (!v.is_number_unsigned()) throw ConfigError(std::string(key) + ": expected integers");
    out.push_back(v.get<std::size_t>());
  }
  return out;
}

std::vector<double> numbers_field(const ObjectReader& r, const char* key) {
  const Json& j = r.at(key);
  if (!j.is_array()) throw ConfigError(std::string(key) + ": expected an array of numbers");
  std::vector<double> out;
  for (const Json& v : j) {
    if (!v.is_number()) throw ConfigError(std::string(key) + ": expected numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

Json convolution_json(const ConvolutionResult& res) {
  return Json{{"all_converged", res.all_converged()},
              {"max_residual", res.max_residual()},
              {"contraction_estimate", res.contraction_estimate},
              {"warnings", res.warnings}};
}

int cmd_convolve(Run& run) {
  ObjectReader r(run.config, "convolve", {"measure", "c", "kind", "domain", "solver"});
  const Measure mu = measure_from_json(r.at("measure"), run.ctx);
  const std::string kind = r.string("kind", "rectangular");
  const EvaluationDomain domain = domain_field(r);
  const SolverConfig solver = solver_field(r, domain);
  ConvolutionResult res = [&] {
    if (kind == "rectangular") return solve_rectangular(mu, r.number("c"), solver);
    if (kind == "additive") {
      if (r.has("c")) throw ConfigError("convolve: \"c\" is not used by the additive kind");
      return solve_additive_sc(mu, solver);
    }
    throw ConfigError("convolve: unknown kind \"" + kind + "\"");
  }();
  std::string csv = csv_row({"re_z", "im_z", "re_g", "im_g", "iterations", "residual", "converged"});
  for (std::size_t i = 0; i < res.points.size(); ++i)
    csv += csv_row({num(res.points[i].real()), num(res.points[i].imag()),
                    num(res.values[i].real()), num(res.values[i].imag()),
                    std::to_string(res.iterations[i]), num(res.residuals[i]),
                    res.converged[i] ? "1" : "0"});
  run.text("convolve.csv", csv);
  Json report = convolution_json(res);
  report["kind"] = kind;
  report["domain"] = domain_to_json(domain);
  run.json("convolve.json", report);
  for (const auto& w : res.warnings) std::cerr << "warning: " << w << '\n';
  if (!res.all_converged()) throw NumericalError("convolve: some grid points did not converge");
  return kExitOk;
}

int cmd_distance(Run& run) {
  ObjectReader r(run.config, "distance", {"mu", "nu", "domain"});
  const Measure mu = measure_from_json(r.at("mu"), run.ctx);
  const Measure nu = measure_from_json(r.at("nu"), run.ctx);
  const EvaluationDomain domain = domain_field(r);
  const DistanceReport d = distance_report(mu, nu, domain);
  Json j{{"dst", d.dst}, {"argmax_z", complex_to_json(d.argmax_z)},
         {"tail_bound", d.tail_bound}, {"domain", domain_to_json(domain)}};
  if (d.classical) {
    j["ks"] = d.classical->ks;
    j["w1"] = d.classical->w1;
    j["w2"] = d.classical->w2;
  }
  run.json("distance.json", j);
  std::cout << num(d.dst) << '\n';
  return kExitOk;
}

int cmd_simulate(Run& run) {
  ObjectReader r(run.config, "simulate", {"spec", "domain", "save_eigenvalues"});
  EnsembleSpec spec = ensemble_spec_from_json(r.at("spec"), run.ctx);
  spec.seed = run.seed(spec.seed);
  const EvaluationDomain domain = domain_field(r);
  if (r.boolean("save_eigenvalues", true)) {
    Eigen::MatrixXd eig(static_cast<Eigen::Index>(spec.trials), static_cast<Eigen::Index>(spec.n));
    for (std::size_t t = 0; t < spec.trials; ++t)
      eig.row(static_cast<Eigen::Index>(t)) =
          gram_eigenvalues(information_plus_noise(spec, t)).transpose();
    run.matrix("eigenvalues.csv", eig);
  }
  const StieltjesEstimate est = mean_stieltjes_mc(spec, domain);
  std::string csv = csv_row({"re_z", "im_z", "re_mean", "im_mean", "stderr"});
  for (std::size_t i = 0; i < est.points.size(); ++i)
    csv += csv_row({num(est.points[i].real()), num(est.points[i].imag()),
                    num(est.mean[i].real()), num(est.mean[i].imag()),
                    est.std_error ? num((*est.std_error)[i]) : "nan"});
  run.text("stieltjes.csv", csv);
  run.json("simulate.json", Json{{"spec", ensemble_spec_to_json(spec)},
                                 {"trials_used", est.trials_used},
                                 {"failures", est.failures},
                                 {"domain", domain_to_json(domain)}});
  return kExitOk;
}

int cmd_resolvent_check(Run& run) {
  ObjectReader r(run.config, "resolvent-check",
                 {"matrix", "random", "z", "derivatives", "tuples", "seed"});
  Eigen::MatrixXd X;
  if (r.has("matrix") == r.has("random"))
    throw ConfigError("resolvent-check: give exactly one of \"matrix\" or \"random\"");
  const std::uint64_t seed = run.seed(r.unsigned_integer("seed", 7));
  if (r.has("matrix")) {
    X = matrix_from_json(r.at("matrix"), run.ctx);
  } else {
    ObjectReader rr(r.at("random"), "resolvent-check.random", {"n", "p"});
    EnsembleSpec spec;
    spec.n = rr.unsigned_integer("n");
    spec.p = rr.unsigned_integer("p");
    spec.seed = seed;
    X = information_plus_noise(spec, 0);
  }
  const Complex z = r.has("z") ? complex_from_json(r.at("z")) : Complex(1.0, 1.0);
  const ResolventReport rep = resolvent_suite(X, z, r.boolean("derivatives", true),
                                              r.unsigned_integer("tuples", 20), seed);
  Json checks = Json::array();
  for (const auto& c : rep.checks)
    checks.push_back({{"name", c.name}, {"value", c.value}, {"bound", c.bound},
                      {"pass", c.pass}, {"detail", c.detail}});
  run.json("resolvent.json", Json{{"z", complex_to_json(z)}, {"rows", X.rows()},
                                  {"cols", X.cols()}, {"all_pass", rep.all_pass()},
                                  {"checks", checks}});
  return rep.all_pass() ? kExitOk : kExitVerification;
}

int cmd_ldp_decompose(Run& run) {
  ObjectReader r(run.config, "ldp-decompose", {"matrix", "alpha"});
  const Eigen::MatrixXd X = matrix_from_json(r.at("matrix"), run.ctx);
  const double alpha = r.number("alpha");
  const TruncationDecomposition d = truncation_decompose(X, alpha);
  run.matrix("A.csv", d.A);
  run.matrix("B.csv", d.B);
  run.matrix("C.csv", d.C);
  run.matrix("D.csv", d.D);
  Json index = Json::array();
  for (const auto& [j, k] : d.index_set) index.push_back({j, k});
  run.json("bands.json",
           Json{{"thresholds", {{"t_a", d.thresholds.t_a}, {"t_b", d.thresholds.t_b},
                                {"t_c", d.thresholds.t_c}, {"eps", d.thresholds.eps}}},
                {"counts", {{"A", d.counts[0]}, {"B", d.counts[1]},
                            {"C", d.counts[2]}, {"D", d.counts[3]}}},
                {"band_b_empty_by_thresholds", d.band_b_empty_by_thresholds},
                {"index_set", index}});
  return kExitOk;
}

int cmd_rate(Run& run) {
  ObjectReader r(run.config, "rate", {"measure", "c", "alpha", "a", "which", "points"});
  RateQuery q{measure_from_json(r.at("measure"), run.ctx), r.number("c"), r.number("alpha"),
              r.number("a")};
  const RateKind kind = rate_kind_from_string(r.string("which"));
  Json report{{"which", to_string(kind)}, {"c", q.c}, {"alpha", q.alpha}, {"a", q.a}};
  double value = 0.0;
  if (kind == RateKind::JPrimeForward) {
    ForwardOptions opt;
    opt.points = r.unsigned_integer("points", opt.points);
    const ForwardRate fr = j_prime_forward(q, opt);
    value = fr.value;
    run.json("forward_measure.json", measure_to_json(fr.mu));
  } else {
    if (r.has("points")) throw ConfigError("rate: \"points\" only applies to j_prime_forward");
    value = rate_eval(q, kind);
  }
  report["value"] = number_or_string(value);
  run.json("rate.json", report);
  std::cout << num(value) << '\n';
  return kExitOk;
}

int cmd_exp_equiv(Run& run) {
  ObjectReader r(run.config, "exp-equiv",
                 {"entry_law", "c", "ladder", "trials", "seed", "domain", "solver"});
  EnsembleSpec spec;
  spec.entry_law = entry_law_from_json(r.at("entry_law"));
  spec.trials = r.unsigned_integer("trials", 16);
  spec.seed = run.seed(r.unsigned_integer("seed", 20240603));
  const double c = r.number("c", 1.0);
  const auto ladder = ladder_field(r, "ladder");
  const EvaluationDomain domain = domain_field(r);
  const SolverConfig solver = solver_field(r, domain);
  const ExpEquivReport rep = exp_equiv_diagnostic(spec, c, ladder, domain, solver);
  std::string csv = csv_row({"n", "mean_dist", "stderr"});
  Json pts = Json::array();
  for (const auto& p : rep.points) {
    csv += csv_row({std::to_string(p.n), num(p.mean_distance), num(p.std_error)});
    pts.push_back({{"n", p.n}, {"p", p.p}, {"mean_dist", p.mean_distance},
                   {"stderr", p.std_error}, {"trials_used", p.trials_used},
                   {"failures", p.failures}, {"nonempty_c", p.nonempty_c},
                   {"failure_messages", p.failure_messages}});
  }
  run.text("exp_equiv.csv", csv);
  run.json("exp_equiv.json", Json{{"c", rep.c}, {"alpha", rep.alpha}, {"seed", spec.seed},
                                  {"trials", spec.trials}, {"points", pts},
                                  {"nonincreasing_within_2se", rep.nonincreasing_within(2.0)}});
  return kExitOk;
}

int cmd_verify_bound(Run& run) {
  ObjectReader r(run.config, "verify-bound",
                 {"mode", "tail", "family", "c", "ladder", "trials", "seed", "domain",
                  "target_slope", "solver"});
  ScalingConfig cfg;
  cfg.mode = scaling_mode_from_string(r.string("mode"));
  if (r.has("tail")) {
    const EntryLaw law = entry_law_from_json(r.at("tail"));
    if (!std::holds_alternative<TailLaw>(law)) throw ConfigError("verify-bound: tail must be a tail law");
    cfg.tail = std::get<TailLaw>(law);
  }
  cfg.family = deformation_family_from_string(r.string("family", "zero"));
  cfg.c = r.number("c", 1.0);
  if (r.has("ladder")) cfg.ladder = ladder_field(r, "ladder");
  cfg.trials = r.unsigned_integer("trials", cfg.trials);
  cfg.seed = run.seed(r.unsigned_integer("seed", cfg.seed));
  cfg.domain = domain_field(r);
  if (r.has("target_slope")) cfg.target_slope = r.number("target_slope");
  cfg.solver = solver_field(r, cfg.domain);
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("verify-bound: ") + e.what());
  }
  const ScalingReport rep = bound_scaling_experiment(cfg);
  std::string csv = csv_row({"n", "mean", "stderr"});
  Json pts = Json::array();
  for (const auto& p : rep.points) {
    csv += csv_row({std::to_string(p.n), num(p.distance), num(p.std_error)});
    pts.push_back({{"n", p.n}, {"p", p.p}, {"distance", p.distance}, {"stderr", p.std_error},
                   {"argmax_z", complex_to_json(p.argmax_z)}, {"trials_used", p.trials_used},
                   {"failures", p.failures}, {"frobenius", p.frobenius},
                   {"envelope", p.envelope}});
  }
  run.text("verify_bound.csv", csv);
  run.json("verify_bound.json",
           Json{{"mode", to_string(rep.mode)}, {"family", to_string(rep.family)},
                {"c", rep.c}, {"trials", rep.trials}, {"seed", cfg.seed}, {"points", pts},
                {"fitted_slope", rep.fit.slope}, {"intercept", rep.fit.intercept},
                {"slope_ci", {rep.slope_ci_low, rep.slope_ci_high}},
                {"target_slope", rep.target_slope},
                {"envelope_constant", rep.envelope_constant},
                {"envelope_nonincreasing", rep.envelope_nonincreasing},
                {"verdict", rep.pass ? "pass" : "fail"}});
  std::cout << "fitted slope " << num(rep.fit.slope) << " (target <= " << num(rep.target_slope)
            << "): " << (rep.pass ? "pass" : "fail") << '\n';
  return rep.pass ? kExitOk : kExitVerification;
}

Eigen::MatrixXd named_matrix(const ObjectReader& r, const char* key, Eigen::Index rows,
                             Eigen::Index cols, const ConfigContext& ctx) {
  if (!r.has(key)) return {};
  const Json& j = r.at(key);
  if (j.is_string()) {
    const std::string name = j.get<std::string>();
    if (name == "identity") return Eigen::MatrixXd::Identity(rows, cols);
    if (name == "zero") return Eigen::MatrixXd::Zero(rows, cols);
    if (name == "rank1") {
      Eigen::MatrixXd M = Eigen::MatrixXd::Zero(rows, cols);
      M(0, 0) = 1.0;
      return M;
    }
  }
  return matrix_from_json(j, ctx);
}

int cmd_verify_concentration(Run& run) {
  ObjectReader r(run.config, "verify-concentration",
                 {"n", "p", "U", "V", "deformation", "z_set", "trials", "bootstrap", "seed",
                  "sigma_sq", "concentration3"});
  ConcentrationConfig cfg;
  cfg.n = r.unsigned_integer("n", cfg.n);
  cfg.p = r.unsigned_integer("p", cfg.p);
  const auto n = static_cast<Eigen::Index>(cfg.n);
  const auto p = static_cast<Eigen::Index>(cfg.p);
  cfg.U = named_matrix(r, "U", n, n, run.ctx);
  cfg.V = named_matrix(r, "V", n, p, run.ctx);
  cfg.deformation = named_matrix(r, "deformation", n, p, run.ctx);
  if (r.has("z_set")) {
    cfg.z_set.clear();
    const Json& zs = r.at("z_set");
    if (!zs.is_array()) throw ConfigError("verify-concentration: z_set must be an array");
    for (const Json& z : zs) cfg.z_set.push_back(complex_from_json(z));
  }
  cfg.trials = r.unsigned_integer("trials", cfg.trials);
  cfg.bootstrap = r.unsigned_integer("bootstrap", cfg.bootstrap);
  cfg.seed = run.seed(r.unsigned_integer("seed", cfg.seed));
  cfg.sigma_sq = r.number("sigma_sq", 1.0);
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("verify-concentration: ") + e.what());
  }
  const ConcentrationReport rep = concentration_audit(cfg);

  std::string csv = csv_row({"target", "re_z", "im_z", "variance", "stderr", "ci_low",
                             "ci_high", "bound", "pass"});
  Json checks = Json::array();
  bool ok = true;
  for (const auto& c : rep.checks) {
    csv += csv_row({c.target, num(c.z.real()), num(c.z.imag()), num(c.variance),
                    num(c.std_error), num(c.ci_low), num(c.ci_high), num(c.bound),
                    c.pass ? "1" : "0"});
    checks.push_back({{"target", c.target}, {"z", complex_to_json(c.z)},
                      {"variance", c.variance}, {"stderr", c.std_error},
                      {"ci", {c.ci_low, c.ci_high}}, {"bound", c.bound}, {"pass", c.pass},
                      {"hard_violation", c.hard_violation}});
    ok = ok && c.pass && !c.hard_violation;
  }
  Json report{{"n", cfg.n}, {"p", cfg.p}, {"trials", cfg.trials},
              {"bootstrap", cfg.bootstrap}, {"seed", cfg.seed},
              {"trials_used", rep.trials_used}, {"failures", rep.failures},
              {"checks", checks}, {"verdict", ok ? "pass" : "fail"}};

  if (r.has("concentration3")) {
    ObjectReader c3(r.at("concentration3"), "verify-concentration.concentration3",
                    {"ns", "c", "deltas", "trials", "domain"});
    const EvaluationDomain domain = domain_field(c3);
    const TailFrequencyReport tf =
        concentration3_audit(ladder_field(c3, "ns"), c3.number("c", 1.0),
                             numbers_field(c3, "deltas"), c3.unsigned_integer("trials", 200),
                             cfg.seed, domain);
    Json rows = Json::array();
    for (const auto& row : tf.rows)
      rows.push_back({{"n", row.n}, {"frequencies", row.frequencies},
                      {"mean_distance", row.mean_distance}});
    report["concentration3"] = Json{{"deltas", tf.deltas}, {"rows", rows},
                                    {"monotone_in_delta", tf.monotone_in_delta}};
  }
  run.text("verify_concentration.csv", csv);
  run.json("verify_concentration.json", report);
  std::cout << "concentration audit: " << (ok ? "pass" : "fail") << '\n';
  return ok ? kExitOk : kExitVerification;
}

int cmd_invert(Run& run) {
  ObjectReader r(run.config, "invert",
                 {"source", "lo", "hi", "eps_ladder", "points", "atom_threshold", "domain",
                  "solver"});
  ObjectReader src(r.at("source"), "invert.source", {"kind", "measure", "c"});
  const Measure mu = measure_from_json(src.at("measure"), run.ctx);
  const std::string kind = src.string("kind");
  const EvaluationDomain domain = domain_field(r);
  const SolverConfig solver = solver_field(r, domain);
  std::function<Complex(Complex)> transform;
  if (kind == "closed_form") {
    transform = [&](Complex z) { return stieltjes(mu, z); };
  } else if (kind == "rectangular") {
    const double c = src.number("c");
    transform = [&, c](Complex z) { return rectangular_transform_at(mu, c, z, solver).value; };
  } else if (kind == "additive") {
    transform = [&](Complex z) { return additive_sc_transform_at(mu, z, solver).value; };
  } else {
    throw ConfigError("invert.source: unknown kind \"" + kind + "\"");
  }
  InversionOptions opt;
  opt.points = r.unsigned_integer("points", opt.points);
  opt.atom_threshold = r.number("atom_threshold", opt.atom_threshold);
  const std::vector<double> ladder =
      r.has("eps_ladder") ? numbers_field(r, "eps_ladder")
                          : std::vector<double>{1e-2, 5e-3, 2.5e-3, 1.25e-3};
  const Measure out = invert_stieltjes(transform, r.number("lo"), r.number("hi"), ladder, opt);
  std::string csv = csv_row({"x", "density"});
  for (const auto& g : out.grid()) csv += csv_row({num(g.x), num(g.density)});
  run.text("inverted.csv", csv);
  run.json("inverted.json", measure_to_json(out));
  return kExitOk;
}

using Handler = std::function<int(Run&)>;

int execute(const std::string& name, const Handler& handler, const fs::path& config_path,
            const fs::path& out_dir, std::optional<std::uint64_t> seed) {
  Run run;
  run.command = name;
  run.out_dir = out_dir;
  run.seed_override = seed;
  RunManifest manifest;
  manifest.command = name;
  manifest.started = utc_timestamp();
  int code = kExitOk;
  try {
    run.config = read_json_file(config_path);
    run.ctx.base_dir = config_path.parent_path().empty() ? fs::path(".") : config_path.parent_path();
    Json digest_input = run.config;
    if (seed) digest_input["__seed_override"] = *seed;
    manifest.config_digest = json_digest(digest_input);
    code = handler(run);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const Json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    code = kExitNumerical;
  }
  manifest.master_seed = run.seed_used;
  manifest.finished = utc_timestamp();
  manifest.exit_code = code;
  for (const auto& p : run.outputs)
    manifest.outputs.push_back({p.filename().string(), file_sha256(p)});
  write_json_file(out_dir / "manifest.json", manifest.to_json());
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<std::string, std::pair<Handler, std::string>> commands = {
      {"convolve", {cmd_convolve, "Stieltjes transform of a free convolution on the domain grid"}},
      {"distance", {cmd_distance, "d_{s,t} (and KS/W1/W2 for atomic pairs) between two measures"}},
      {"simulate", {cmd_simulate, "Monte Carlo spectra of an information-plus-noise ensemble"}},
      {"resolvent-check", {cmd_resolvent_check, "Audit resolvent identities and derivative formulas"}},
      {"ldp-decompose", {cmd_ldp_decompose, "Split a matrix into the four truncation bands"}},
      {"rate", {cmd_rate, "Evaluate a rate function"}},
      {"exp-equiv", {cmd_exp_equiv, "Exponential-equivalence distance diagnostic"}},
      {"verify-bound", {cmd_verify_bound, "Scaling experiment for the subordination bound"}},
      {"verify-concentration", {cmd_verify_concentration, "Monte Carlo audit of the concentration bounds"}},
      {"invert", {cmd_invert, "Recover a density from a Stieltjes transform"}},
  };

  CLI::App app{"Free convolution and random matrix experiments"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);
  std::string config;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  for (const auto& [name, entry] : commands) {
    CLI::App* sub = app.add_subcommand(name, entry.second);
    sub->add_option("-c,--config", config, "JSON configuration file")->required();
    sub->add_option("-o,--out", out, "Output directory")->capture_default_str();
    sub->add_option("--seed", seed, "Override the master seed of the config");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitConfig;
  }
  for (const auto& [name, entry] : commands) {
    if (app.got_subcommand(name)) return execute(name, entry.first, config, out, seed);
  }
  return kExitConfig;
}
