// Command line front end: simulate, preset, predict, besov.
// Exit codes: 0 pass or completed, 1 fail, 2 usage or bad config, 3 infrastructure.

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <iostream>

#include "chsys/besov.hpp"
#include "chsys/experiment.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInfra = 3;

int cmd_simulate(const std::string& path, const std::vector<std::string>& overrides) {
  const chsys::RunConfig cfg = chsys::apply_overrides(chsys::load_config(path), overrides);
  const chsys::SimulationResult r = chsys::run_simulation(cfg);
  std::cout << r.manifest["status"].dump() << "\n";
  std::cout << "artifacts in " << r.directory.string() << "\n";
  if (r.abort_cause) return kExitInfra;
  return r.completed() ? kExitPass : kExitFail;
}

int cmd_preset(const std::string& name, const std::vector<std::string>& overrides) {
  const auto kind = chsys::parse_preset_kind(name);
  if (!kind) {
    std::cerr << "unknown preset '" << name << "'; one of:";
    for (auto k : chsys::all_presets()) std::cerr << ' ' << chsys::to_string(k);
    std::cerr << "\n";
    return kExitUsage;
  }
  const chsys::PresetReport rep = chsys::run_preset(*kind, overrides);
  std::cout << rep.to_json().dump(2) << "\n";
  return rep.pass ? kExitPass : kExitFail;
}

int cmd_predict(const std::string& path, const std::string& family, const std::vector<double>& x0) {
  const chsys::RunConfig cfg = chsys::load_config(path);
  const auto verdicts = chsys::predict_blowup(cfg, chsys::parse_threshold_family(family), x0);
  chsys::Json out = chsys::Json::array();
  for (const auto& v : verdicts) out.push_back(v.to_json());
  std::cout << (out.size() == 1 ? out[0] : out).dump(2) << "\n";
  return kExitPass;
}

int cmd_besov(const std::string& path, double s, const std::string& p, const std::string& r) {
  const chsys::BesovParams params{s, chsys::parse_exponent(p), chsys::parse_exponent(r)};
  params.validate();
  const chsys::Field f = chsys::read_snapshot(path);
  const chsys::DyadicPartition part(f.grid());
  const chsys::Json out = {{"snapshot", path},
                           {"n_points", f.size()},
                           {"L", f.grid()->half_length()},
                           {"s", s},
                           {"p", p},
                           {"r", r},
                           {"j_max", part.j_max()},
                           {"norm", chsys::besov_norm(f, params, part)},
                           {"high_part", chsys::besov_high_part(f, params, part)}};
  std::cout << out.dump(2) << "\n";
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-component Camassa-Holm type systems: runs, presets and blow-up predictions"};
  app.require_subcommand(1);
  std::string log_level = "warn";
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error, off");

  std::string config_path, preset_name, family = "A_sign", snapshot, p = "2", r = "2";
  std::vector<std::string> overrides;
  std::vector<double> x0;
  double s = 0.0;

  auto* sim = app.add_subcommand("simulate", "run a configuration and write its artifacts");
  sim->add_option("config", config_path, "YAML run configuration")->required()->check(CLI::ExistingFile);
  sim->add_option("overrides", overrides, "key=value assignments, e.g. integrator.cfl=0.15");

  auto* pre = app.add_subcommand("preset", "run a canonical experiment and write report.json");
  pre->add_option("name", preset_name, "preset name")->required();
  pre->add_option("overrides", overrides, "key=value assignments");

  auto* pred = app.add_subcommand("predict", "blow-up threshold verdict for a configuration's data");
  pred->add_option("config", config_path, "YAML run configuration")->required()->check(CLI::ExistingFile);
  pred->add_option("--family", family, "A_sign, A_L1 or B_sign")
      ->check(CLI::IsMember({"A_sign", "A_L1", "B_sign"}));
  pred->add_option("--x0", x0, "additional points to evaluate at");

  auto* bes = app.add_subcommand("besov", "Besov norm of a field snapshot");
  bes->add_option("snapshot", snapshot, "x,value CSV")->required()->check(CLI::ExistingFile);
  bes->add_option("--s", s, "smoothness index");
  bes->add_option("--p", p, "1, 2 or inf");
  bes->add_option("--r", r, "1, 2 or inf");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitUsage;
  }
  spdlog::set_level(spdlog::level::from_str(log_level));

  try {
    if (*sim) return cmd_simulate(config_path, overrides);
    if (*pre) return cmd_preset(preset_name, overrides);
    if (*pred) return cmd_predict(config_path, family, x0);
    if (*bes) return cmd_besov(snapshot, s, p, r);
  } catch (const chsys::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const chsys::HypothesisViolation& e) {
    std::cerr << "hypothesis violated: " << e.what() << "\n";
    return kExitFail;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInfra;
  }
  return kExitUsage;
}
