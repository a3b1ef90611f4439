// cbe: batch driver for the circular-ensemble laboratory.
//   cbe run <experiment> [--config file] [flags...]   named experiment
//   cbe verify [--seed s]                             deterministic kernels
//   cbe bound --moments file.json [--c C]             point-process bound
// Exit codes: 0 ok, 1 check/test failure, 2 configuration error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "cbe/common.hpp"
#include "cbe/experiment.hpp"
#include "cbe/io.hpp"
#include "cbe/pointproc.hpp"

namespace {

int run_named_experiment(const std::string& experiment,
                         const std::string& config_path,
                         const std::map<std::string, std::string>& flags) {
  std::map<std::string, std::string> kv;
  if (!config_path.empty()) kv = cbe::parse_key_value_file(config_path);
  for (const auto& [key, value] : flags) kv[key] = value;  // flags win
  kv["experiment"] = experiment;

  const cbe::ExperimentConfig config = cbe::experiment_config_from_map(kv);
  const cbe::ExperimentReport report = cbe::run_experiment(config);
  cbe::write_experiment_outputs(config, report);

  if (config.out.empty()) {
    std::cout << report.to_json(true);
  } else {
    std::cout << report.experiment << ": " << report.records.size()
              << " records, " << cbe::format_double(report.wall_seconds)
              << " s -> " << config.out << "\n";
  }
  return cbe::report_has_failures(report) ? 1 : 0;
}

int run_verify(std::uint64_t seed) {
  const auto checks = cbe::run_kernel_checks(seed);
  std::size_t failures = 0;
  for (const auto& check : checks) {
    std::printf("[%s] %-22s residual %.3e (tolerance %.1e)\n",
                check.pass ? "PASS" : "FAIL", check.name.c_str(),
                check.residual, check.tolerance);
    if (!check.pass) ++failures;
  }
  std::printf("%zu/%zu kernel checks passed\n", checks.size() - failures,
              checks.size());
  return failures == 0 ? 0 : 1;
}

int run_bound(const std::string& moments_path, double c_override,
              bool c_was_set) {
  std::ifstream is(moments_path);
  if (!is) throw cbe::ConfigError("cannot open moments file: " + moments_path);
  std::ostringstream ss;
  ss << is.rdbuf();

  nlohmann::json j;
  try {
    j = nlohmann::json::parse(ss.str());
  } catch (const nlohmann::json::exception& e) {
    throw cbe::ConfigError(std::string("moments file: ") + e.what());
  }
  if (!j.is_object() || !j.contains("variance") || !j.contains("lambda") ||
      !j.contains("groups"))
    throw cbe::ConfigError(
        "moments file: need {variance, lambda, groups: [{e_p, e_t, e_tp, l}]}");

  const double variance = j.at("variance").get<double>();
  const double lambda = j.at("lambda").get<double>();
  double c = j.value("c", 1.0);
  if (c_was_set) c = c_override;

  std::vector<cbe::LocalMoments> groups;
  for (const auto& g : j.at("groups")) {
    cbe::LocalMoments m;
    m.e_p = g.at("e_p").get<double>();
    m.e_t = g.at("e_t").get<double>();
    m.e_tp = g.at("e_tp").get<double>();
    m.l = g.value("l", 1.0);
    groups.push_back(m);
  }

  const double bound = cbe::pp_bound(groups, variance, lambda, c);
  std::printf("pp_bound = %.17g (c = %.17g, %zu groups)\n", bound, c,
              groups.size());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo laboratory for circular-ensemble extremes"};
  app.require_subcommand(1);

  // --- run ---------------------------------------------------------------
  auto* run = app.add_subcommand("run", "Run a named experiment");
  std::string experiment;
  run->add_option("experiment", experiment,
                  "max-dist | mart-conv | sde-decoration | ppp-metrics | "
                  "verify-kernels | limit-tables | counting-check")
      ->required();
  std::string config_path;
  run->add_option("--config", config_path, "key=value config file");

  std::map<std::string, std::string> flag_kv;
  const std::pair<const char*, const char*> flag_table[] = {
      {"--n", "n"},
      {"--beta", "beta"},
      {"--sigma", "sigma"},
      {"--k1", "k1"},
      {"--k2", "k2"},
      {"--k3", "k3"},
      {"--k4", "k4"},
      {"--k5", "k5"},
      {"--k6", "k6"},
      {"--k7", "k7"},
      {"--replicas", "replicas"},
      {"--seed", "seed"},
      {"--workers", "workers"},
      {"--out", "out"},
      {"--mesh-count", "mesh_count"},
      {"--mesh-factor", "mesh_factor"},
      {"--dt-factor", "dt_factor"},
      {"--samples", "samples"},
      {"--x-min", "x_min"},
      {"--x-max", "x_max"},
      {"--eta", "eta"},
      {"--lambda", "lambda"},
      {"--f-len", "f_len"},
  };
  for (const auto& [flag, key] : flag_table) {
    const std::string key_copy = key;
    run->add_option_function<std::string>(
        flag,
        [&flag_kv, key_copy](const std::string& value) {
          flag_kv[key_copy] = value;
        },
        std::string("config key ") + key);
  }

  // --- verify --------------------------------------------------------------
  auto* verify = app.add_subcommand("verify", "Run the deterministic kernels");
  std::uint64_t verify_seed = 1;
  verify->add_option("--seed", verify_seed, "corpus seed (default 1)");

  // --- bound ---------------------------------------------------------------
  auto* bound =
      app.add_subcommand("bound", "Evaluate the point-process moment bound");
  std::string moments_path;
  bound->add_option("--moments", moments_path, "JSON moments file")
      ->required();
  double c_value = 1.0;
  auto* c_opt = bound->add_option("--c", c_value, "universal constant factor");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (run->parsed())
      return run_named_experiment(experiment, config_path, flag_kv);
    if (verify->parsed()) return run_verify(verify_seed);
    if (bound->parsed())
      return run_bound(moments_path, c_value, c_opt->count() > 0);
  } catch (const cbe::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
