#include "chsys/experiment.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include "chsys/besov.hpp"

#ifndef CHSYS_VERSION
#define CHSYS_VERSION "unknown"
#endif

namespace chsys {

namespace detail {
std::string_view embedded_preset(std::string_view name);  // generated from presets/*.yaml
}

std::string_view code_version() { return CHSYS_VERSION; }

std::filesystem::path output_root() {
  if (const char* root = std::getenv("CH_OUTPUT_ROOT"); root && *root) return root;
  return ".";
}

std::filesystem::path resolve_output_dir(const std::string& directory) {
  std::filesystem::path p(directory);
  return p.is_absolute() ? p : output_root() / p;
}

namespace {

Json spec_to_json(const InitSpec& spec) {
  Json terms = Json::array();
  for (const auto& t : spec.terms)
    terms.push_back({{"family", std::string(to_string(t.family))},
                     {"amplitude", t.amplitude},
                     {"center", t.center},
                     {"width", t.width},
                     {"sign", t.sign}});
  return terms;
}

std::string status_name(const SimulationResult& r) {
  return r.abort_cause ? "Aborted" : std::string(to_string(r.status.outcome));
}

void write_text(const std::filesystem::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary);
  out << text;
  if (!out) throw InfrastructureError("cannot write '" + file.string() + "'");
}

std::size_t column_index(std::string_view column) {
  const auto& names = DiagnosticsRecord::column_names();
  const auto it = std::find(names.begin(), names.end(), column);
  if (it == names.end()) throw std::invalid_argument("unknown diagnostics column '" + std::string(column) + "'");
  return static_cast<std::size_t>(it - names.begin());
}

constexpr std::string_view kConservedColumns[] = {"l1_m",      "l1_n",      "consA_mv", "consA_nu",
                                                  "consB_mvx", "consB_nux", "consB_mv", "consB_nu"};

}  // namespace

Json to_json(const RunConfig& cfg) {
  const auto& ic = cfg.integrator;
  return {
      {"system", std::string(to_string(cfg.system))},
      {"grid", {{"n_points", cfg.grid.n_points}, {"L", cfg.grid.L}}},
      {"integrator",
       {{"t_end", ic.t_end},
        {"cfl", ic.cfl},
        {"dt_min", ic.dt_min},
        {"field_cap", ic.field_cap},
        {"sample_interval", ic.sample_interval}}},
      {"init", {{"m0", spec_to_json(cfg.init.m0)}, {"n0", spec_to_json(cfg.init.n0)}}},
      {"characteristics",
       {{"n_seeds", cfg.characteristics.n_seeds}, {"extra_seeds", cfg.characteristics.extra_seeds}}},
      {"outputs", {{"directory", cfg.outputs.directory}, {"snapshot_every", cfg.outputs.snapshot_every}}},
  };
}

double max_relative_drift(const std::vector<DiagnosticsRecord>& records, std::string_view column) {
  if (records.empty()) return 0.0;
  const std::size_t c = column_index(column);
  const double q0 = records.front().values()[c];
  double worst = 0.0;
  for (const auto& r : records) {
    const double change = std::abs(r.values()[c] - q0);
    worst = std::max(worst, q0 != 0.0 ? change / std::abs(q0) : change);
  }
  return worst;
}

double indicator_growth(const std::vector<DiagnosticsRecord>& records, std::string_view column) {
  if (records.empty()) return 0.0;
  const std::size_t c = column_index(column);
  const double q0 = std::abs(records.front().values()[c]);
  double worst = 0.0;
  for (const auto& r : records) worst = std::max(worst, std::abs(r.values()[c]));
  if (q0 == 0.0) return worst > 0.0 ? std::numeric_limits<double>::infinity() : 1.0;
  return worst / q0;
}

std::string diagnostics_csv(const std::vector<DiagnosticsRecord>& records) {
  std::string out;
  const auto& names = DiagnosticsRecord::column_names();
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) out += ',';
    out += names[i];
  }
  out += '\n';
  for (const auto& r : records) {
    const auto v = r.values();
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) out += ',';
      out += format_real(v[i]);
    }
    out += '\n';
  }
  return out;
}

void write_snapshot(const std::filesystem::path& file, const Field& f) {
  std::string out = "x,value\n";
  for (std::size_t i = 0; i < f.size(); ++i)
    out += format_real(f.grid()->node(i)) + ',' + format_real(f[i]) + '\n';
  write_text(file, out);
}

Field read_snapshot(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot read snapshot '" + file.string() + "'");
  std::string line;
  std::getline(in, line);
  if (line.rfind("x,value", 0) != 0) throw std::runtime_error("snapshot '" + file.string() + "' lacks the x,value header");
  std::vector<double> xs, vs;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw std::runtime_error("malformed snapshot row '" + line + "'");
    xs.push_back(std::stod(line.substr(0, comma)));
    vs.push_back(std::stod(line.substr(comma + 1)));
  }
  if (xs.size() < 2) throw std::runtime_error("snapshot '" + file.string() + "' has fewer than two rows");
  const double L = -xs.front();
  GridPtr grid = make_grid(xs.size(), L);
  for (std::size_t i = 0; i < xs.size(); ++i)
    if (std::abs(xs[i] - grid->node(i)) > 1e-9 * L)
      throw std::runtime_error("snapshot nodes are not a uniform grid on [-L, L)");
  return Field(grid, std::move(vs));
}

SimulationResult run_simulation(const RunConfig& cfg, const SimulationOptions& options) {
  validate(cfg);
  SimulationResult result;
  result.config = cfg;
  const auto start = std::chrono::steady_clock::now();

  const GridPtr grid = make_grid(cfg.grid.n_points, cfg.grid.L);
  result.initial = initial_data(cfg.system, grid, cfg.init.m0, cfg.init.n0);
  result.m0_sup = result.initial.m.sup_norm();
  result.final_state = result.initial;

  const bool write = options.write_artifacts;
  if (write) {
    result.directory = resolve_output_dir(cfg.outputs.directory);
    std::error_code ec;
    std::filesystem::create_directories(result.directory, ec);
    if (ec) throw InfrastructureError("cannot create '" + result.directory.string() + "': " + ec.message());
  }

  CharacteristicBundle bundle = make_bundle(
      result.initial,
      default_seeds(result.initial, cfg.characteristics.n_seeds, cfg.characteristics.extra_seeds));
  std::string chars_csv = "t,seed,q,qx,phase,residual_m,residual_n\n";
  std::size_t sample_index = 0;

  auto record_sample = [&](const State& s, const DerivedFields& d) {
    const DiagnosticsRecord* prev = result.records.empty() ? nullptr : &result.records.back();
    DiagnosticsRecord rec = sample(s, d, prev);
    for (double v : rec.values())
      if (!std::isfinite(v)) throw std::runtime_error("non-finite diagnostics");
    const PullbackResidual res = pullback_residual(bundle, s);
    result.max_pullback_residual = std::max(result.max_pullback_residual, res.max_abs());
    for (std::size_t i = 0; i < bundle.size(); ++i) {
      if (!std::isfinite(bundle.q[i]) || !std::isfinite(bundle.log_qx[i]))
        throw std::runtime_error("characteristic " + std::to_string(i) + " is not finite");
      chars_csv += format_real(s.t) + ',' + std::to_string(i) + ',' + format_real(bundle.q[i]) + ',' +
                   format_real(bundle.qx(i)) + ',' + format_real(bundle.phase[i]) + ',' +
                   format_real(res.m[i]) + ',' + format_real(res.n[i]) + '\n';
    }
    if (write && cfg.outputs.snapshot_every > 0 && sample_index % cfg.outputs.snapshot_every == 0) {
      const std::string idx = std::to_string(sample_index);
      write_snapshot(result.directory / ("m_" + idx + ".csv"), s.m);
      write_snapshot(result.directory / ("n_" + idx + ".csv"), s.n);
    }
    ++sample_index;
    result.records.push_back(rec);
    if (options.hooks.on_sample) options.hooks.on_sample(s, d, bundle, rec);
  };

  Observers obs;
  obs.on_sample = record_sample;
  obs.on_step = [&](const StepResult& step, double dt) {
    advance(bundle, step, dt);
    if (options.hooks.on_step) options.hooks.on_step(step, dt);
  };

  try {
    RunResult run_result = run(result.initial, cfg.integrator, obs, false);
    result.status = run_result.status;
    result.steps = run_result.steps;
    result.final_state = run_result.final_state;
    // A run stopped between samples still reports where it stopped.
    if (result.status.outcome != RunOutcome::Completed && !result.records.empty() &&
        result.final_state.t > result.records.back().t) {
      try {
        const DerivedFields d = reconstruct(result.final_state);
        record_sample(result.final_state, d);
        result.terminal_record = true;
      } catch (const NumericalFailure&) {
        // The terminal state is beyond reconstruction; the last sample stands.
      }
    }
  } catch (const RunAborted& e) {
    result.abort_cause = e.what();
  } catch (const NumericalFailure& e) {
    result.abort_cause = std::string("initial state: ") + e.what();
  }
  result.bundle = bundle;
  result.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  for (auto column : kConservedColumns)
    result.drift[std::string(column)] = max_relative_drift(result.records, column);

  Json drift = Json::object();
  for (const auto& [k, v] : result.drift) drift[k] = v;
  result.manifest = {
      {"config", to_json(cfg)},
      {"code_version", std::string(code_version())},
      {"status",
       {{"outcome", status_name(result)},
        {"t_stop", result.status.t_stop},
        {"reason", result.abort_cause ? *result.abort_cause : result.status.reason}}},
      {"steps", result.steps},
      {"samples", result.records.size()},
      {"terminal_record", result.terminal_record},
      {"wall_time_s", result.wall_time_s},
      {"m0_sup", result.m0_sup},
      {"max_pullback_residual", result.max_pullback_residual},
      {"drift", drift},
      {"extras", options.manifest_extras.is_null() ? Json::object() : options.manifest_extras},
  };

  if (write) {
    write_text(result.directory / "diagnostics.csv", diagnostics_csv(result.records));
    write_text(result.directory / "characteristics.csv", chars_csv);
    write_text(result.directory / "manifest.json", result.manifest.dump(2) + "\n");
  }
  if (result.abort_cause) spdlog::error("run aborted: {}", *result.abort_cause);
  return result;
}

// ---------------------------------------------------------------- prediction

Json PredictionVerdict::to_json() const {
  Json derivation = Json::array();
  for (const auto& b : constant.derivation)
    derivation.push_back({{"quantity", b.quantity}, {"bound", b.bound}, {"value", b.value}});
  return {
      {"family", to_string(family)},
      {"C", constant.C},
      {"N0", inputs.N0},
      {"Qx0", inputs.Qx0},
      {"x0", inputs.x0},
      {"a0", prediction.a0 ? Json(*prediction.a0) : Json(nullptr)},
      {"threshold", prediction.threshold},
      {"triggered", prediction.triggered},
      {"T0_upper", prediction.T0_upper ? Json(*prediction.T0_upper) : Json(nullptr)},
      {"margin", margin},
      {"derivation", derivation},
  };
}

std::vector<PredictionVerdict> predict_blowup(const RunConfig& cfg, ThresholdFamily family,
                                              const std::vector<double>& extra_x0) {
  validate(cfg);
  const GridPtr grid = make_grid(cfg.grid.n_points, cfg.grid.L);
  const State s = initial_data(family_system(family), grid, cfg.init.m0, cfg.init.n0);
  const Field N = s.m.abs() + s.n.abs();
  if (N.sup_norm() == 0.0) throw HypothesisViolation("N0 = |m0(x0)| + |n0(x0)| = 0 at every x0");

  const CertifiedConstant constant = certified_constant(s.m, s.n, family);
  if (!(constant.C > 0.0)) throw HypothesisViolation("certified constant is zero for this data");
  const Field qx = riccati_qx(s, reconstruct(s));

  std::vector<std::size_t> nodes;
  std::size_t i0 = 0;
  for (std::size_t i = 1; i < N.size(); ++i)
    if (N[i] > N[i0]) i0 = i;
  nodes.push_back(i0);
  for (double x : extra_x0) {
    if (!(x >= -grid->half_length() && x < grid->half_length()))
      throw std::invalid_argument("x0 = " + format_real(x) + " lies outside [-L, L)");
    const auto i = static_cast<std::size_t>(std::lround((x + grid->half_length()) / grid->dx())) % grid->size();
    nodes.push_back(i);
  }

  std::vector<PredictionVerdict> out;
  for (std::size_t i : nodes) {
    if (N[i] == 0.0)
      throw HypothesisViolation("N0 = 0 at x0 = " + format_real(grid->node(i)));
    PredictionVerdict v;
    v.family = family;
    v.constant = constant;
    v.inputs = {constant.C, N[i], qx[i], grid->node(i)};
    v.prediction = predict(family, v.inputs);
    v.margin = v.inputs.Qx0 / v.prediction.threshold;
    out.push_back(std::move(v));
  }
  return out;
}

// ---------------------------------------------------------------- presets

const std::vector<PresetKind>& all_presets() {
  static const std::vector<PresetKind> kinds = {
      PresetKind::ConservationA, PresetKind::ConservationB, PresetKind::GlobalSupportA,
      PresetKind::PullbackA,     PresetKind::PullbackB,     PresetKind::BlowupA_sign,
      PresetKind::BlowupA_L1,    PresetKind::BlowupB_sign,  PresetKind::BesovSanity};
  return kinds;
}

std::string_view to_string(PresetKind kind) {
  switch (kind) {
    case PresetKind::ConservationA: return "ConservationA";
    case PresetKind::ConservationB: return "ConservationB";
    case PresetKind::GlobalSupportA: return "GlobalSupportA";
    case PresetKind::PullbackA: return "PullbackA";
    case PresetKind::PullbackB: return "PullbackB";
    case PresetKind::BlowupA_sign: return "BlowupA_sign";
    case PresetKind::BlowupA_L1: return "BlowupA_L1";
    case PresetKind::BlowupB_sign: return "BlowupB_sign";
    case PresetKind::BesovSanity: return "BesovSanity";
  }
  return "?";
}

std::optional<PresetKind> parse_preset_kind(std::string_view name) {
  for (auto k : all_presets())
    if (to_string(k) == name) return k;
  return std::nullopt;
}

std::string_view preset_text(PresetKind kind) { return detail::embedded_preset(to_string(kind)); }

RunConfig preset_config(PresetKind kind) { return parse_config(std::string(preset_text(kind))); }

Json PresetReport::to_json() const {
  return {{"preset", std::string(to_string(preset))},
          {"pass", pass},
          {"measured", measured},
          {"tolerance", tolerance},
          {"artifacts", artifacts}};
}

namespace {

// Pass-rule tolerances, one place.
constexpr double kL1DriftTol = 1e-8;
constexpr double kMixedDriftTol = 1e-6;
constexpr double kSeparationTol = 1e-8;   // times |m0|_inf + |n0|_inf
constexpr double kIndicatorZeroTol = 1e-10;
constexpr double kPullbackTol = 1e-4;     // times |m0|_inf
constexpr double kPullbackConvergence = 4.0;
constexpr double kBlowupMargin = 2.0;
constexpr double kIndicatorGrowth = 1e3;
constexpr double kPartitionTol = 1e-12;
constexpr double kReconstructionTol = 1e-10;
constexpr double kBesovRatioSpread = 0.10;

std::vector<std::string> run_artifacts(const SimulationResult& r, const std::filesystem::path& base) {
  std::vector<std::string> out;
  for (const char* f : {"diagnostics.csv", "characteristics.csv", "manifest.json"})
    out.push_back(std::filesystem::relative(r.directory / f, base).generic_string());
  return out;
}

bool completed_at_end(const SimulationResult& r) {
  return r.completed() && r.status.t_stop == r.config.integrator.t_end;
}

void conservation(PresetReport& rep, const SimulationResult& r, bool system_a) {
  const std::vector<std::pair<std::string_view, double>> rules =
      system_a ? std::vector<std::pair<std::string_view, double>>{{"l1_m", kL1DriftTol},
                                                                  {"l1_n", kL1DriftTol},
                                                                  {"consA_mv", kMixedDriftTol},
                                                                  {"consA_nu", kMixedDriftTol}}
               : std::vector<std::pair<std::string_view, double>>{{"consB_mvx", kMixedDriftTol},
                                                                  {"consB_nux", kMixedDriftTol},
                                                                  {"consB_mv", kMixedDriftTol},
                                                                  {"consB_nu", kMixedDriftTol}};
  rep.pass = completed_at_end(r);
  rep.measured["outcome"] = status_name(r);
  for (const auto& [col, tol] : rules) {
    const std::string key = std::string(col) + "_drift";
    rep.measured[key] = r.drift.at(std::string(col));
    rep.tolerance[key] = tol;
    rep.pass = rep.pass && r.drift.at(std::string(col)) < tol;
  }
}

void global_support(PresetReport& rep, const RunConfig& cfg, const std::filesystem::path& base) {
  const auto& extra = cfg.characteristics.extra_seeds;
  if (extra.size() < 2) throw InfrastructureError("GlobalSupportA needs extra_seeds [a, b]");
  const double a = *std::min_element(extra.begin(), extra.end());
  const double b = *std::max_element(extra.begin(), extra.end());
  double worst_leak = 0.0, worst_indicator = 0.0;
  SimulationOptions opt;
  opt.hooks.on_sample = [&](const State& s, const DerivedFields& d, const CharacteristicBundle& bundle,
                            const DiagnosticsRecord&) {
    const auto ia = std::find(bundle.seeds.begin(), bundle.seeds.end(), a) - bundle.seeds.begin();
    const auto ib = std::find(bundle.seeds.begin(), bundle.seeds.end(), b) - bundle.seeds.begin();
    const SeparationResidual res = support_separation_check(s, d, bundle.q[ia], bundle.q[ib]);
    worst_leak = std::max(worst_leak, res.leak_m + res.leak_n);
    worst_indicator = std::max(worst_indicator, res.indicator);
  };
  opt.manifest_extras = {{"a", a}, {"b", b}};
  const SimulationResult r = run_simulation(cfg, opt);
  const double scale = r.initial.m.sup_norm() + r.initial.n.sup_norm();
  rep.artifacts = run_artifacts(r, base);
  rep.measured = {{"outcome", status_name(r)},
                  {"t_stop", r.status.t_stop},
                  {"separation_residual", worst_leak},
                  {"indicator_sup", worst_indicator},
                  {"scale", scale}};
  rep.tolerance = {{"separation_residual", kSeparationTol * scale},
                   {"indicator_sup", kIndicatorZeroTol * scale}};
  rep.pass = completed_at_end(r) && worst_leak < kSeparationTol * scale &&
             worst_indicator < kIndicatorZeroTol * scale;
}

void pullback(PresetReport& rep, const RunConfig& cfg, const std::filesystem::path& base) {
  RunConfig coarse = cfg;
  coarse.grid.n_points = cfg.grid.n_points / 2;
  coarse.outputs.directory = (std::filesystem::path(cfg.outputs.directory) / "coarse").string();
  const SimulationResult fine_run = run_simulation(cfg);
  const SimulationResult coarse_run = run_simulation(coarse);
  const double fine = fine_run.max_pullback_residual;
  const double ratio = fine > 0.0 ? coarse_run.max_pullback_residual / fine
                                  : std::numeric_limits<double>::infinity();
  rep.artifacts = run_artifacts(fine_run, base);
  for (auto& a : run_artifacts(coarse_run, base)) rep.artifacts.push_back(a);
  rep.measured = {{"outcome", status_name(fine_run)},
                  {"coarse_outcome", status_name(coarse_run)},
                  {"max_residual", fine},
                  {"coarse_max_residual", coarse_run.max_pullback_residual},
                  {"convergence_ratio", ratio},
                  {"m0_sup", fine_run.m0_sup}};
  rep.tolerance = {{"max_residual", kPullbackTol * fine_run.m0_sup},
                   {"convergence_ratio", kPullbackConvergence}};
  rep.pass = completed_at_end(fine_run) && completed_at_end(coarse_run) &&
             fine < kPullbackTol * fine_run.m0_sup && ratio >= kPullbackConvergence;
}

void blowup(PresetReport& rep, const RunConfig& cfg, ThresholdFamily family,
            const std::filesystem::path& base) {
  if (cfg.system != family_system(family))
    throw InfrastructureError("preset system does not match the family " + to_string(family));
  const PredictionVerdict v = predict_blowup(cfg, family).front();
  SimulationOptions opt;
  opt.manifest_extras = {{"prediction", v.to_json()}};
  const SimulationResult r = run_simulation(cfg, opt);

  double growth = 0.0;
  Json growths = Json::object();
  const std::vector<std::string_view> columns =
      family == ThresholdFamily::B_sign ? std::vector<std::string_view>{"indicatorB_inf", "indicatorB_cross"}
                                        : std::vector<std::string_view>{"indicatorA"};
  for (auto c : columns) {
    const double g = indicator_growth(r.records, c);
    growths[std::string(c)] = g;
    growth = std::max(growth, g);
  }
  const double T0 = v.prediction.T0_upper.value_or(std::numeric_limits<double>::infinity());
  const bool detected = !r.abort_cause && r.status.outcome == RunOutcome::BlowupDetected;

  rep.artifacts = run_artifacts(r, base);
  rep.measured = {{"outcome", status_name(r)},
                  {"t_stop", r.status.t_stop},
                  {"T0_upper", T0},
                  {"margin", v.margin},
                  {"triggered", v.prediction.triggered},
                  {"indicator_growth", growths},
                  {"prediction", v.to_json()}};
  rep.tolerance = {{"margin", kBlowupMargin}, {"indicator_growth", kIndicatorGrowth}, {"t_stop", "<= T0_upper"}};
  rep.pass = v.prediction.triggered && v.margin >= kBlowupMargin && detected && r.status.t_stop <= T0 &&
             growth >= kIndicatorGrowth;
}

void besov_sanity(PresetReport& rep, const RunConfig& cfg, const std::filesystem::path& base) {
  const std::filesystem::path dir = resolve_output_dir(cfg.outputs.directory);
  std::filesystem::create_directories(dir);
  const BesovParams h1{1.0, 2.0, 2.0};
  double partition_residual = 0.0, reconstruction = 0.0, spread = 0.0;
  Json ratios = Json::array();
  std::string csv = "n_points,field,j,block_l2\n";
  std::vector<std::vector<double>> per_grid;
  for (std::size_t n : {cfg.grid.n_points / 2, cfg.grid.n_points}) {
    const GridPtr grid = make_grid(n, cfg.grid.L);
    const DyadicPartition part(grid);
    for (std::size_t k = 0; k < grid->spectrum_size(); ++k)
      partition_residual = std::max(partition_residual, std::abs(part.partition_sum(k) - 1.0));
    std::vector<double> r;
    const State s = initial_data(cfg.system, grid, cfg.init.m0, cfg.init.n0);
    int idx = 0;
    for (const Field* f : {&s.m, &s.n}) {
      const std::string name = idx++ == 0 ? "m0" : "n0";
      if (f->sup_norm() == 0.0) continue;
      Field sum(grid);
      for (int j = -1; j <= part.j_max(); ++j) {
        const Field block = dyadic_block(*f, j, part);
        csv += std::to_string(n) + ',' + name + ',' + std::to_string(j) + ',' +
               format_real(sobolev_norm(block, 0.0)) + '\n';
        sum = sum + block;
      }
      reconstruction = std::max(reconstruction, (sum - *f).sup_norm() / f->sup_norm());
      r.push_back(besov_norm(*f, h1, part) / sobolev_norm(*f, 1.0));
    }
    ratios.push_back({{"n_points", n}, {"ratio_B1_22_over_H1", r}});
    per_grid.push_back(std::move(r));
  }
  for (std::size_t i = 0; i < per_grid[0].size(); ++i)
    spread = std::max(spread, std::abs(per_grid[0][i] / per_grid[1][i] - 1.0));
  write_text(dir / "besov.csv", csv);
  rep.artifacts = {std::filesystem::relative(dir / "besov.csv", base).generic_string()};
  rep.measured = {{"partition_residual", partition_residual},
                  {"reconstruction_residual", reconstruction},
                  {"ratio_spread", spread},
                  {"ratios", ratios}};
  rep.tolerance = {{"partition_residual", kPartitionTol},
                   {"reconstruction_residual", kReconstructionTol},
                   {"ratio_spread", kBesovRatioSpread}};
  rep.pass = !per_grid[0].empty() && partition_residual < kPartitionTol &&
             reconstruction < kReconstructionTol && spread < kBesovRatioSpread;
}

}  // namespace

PresetReport run_preset(PresetKind kind, const std::vector<std::string>& overrides) {
  const RunConfig cfg = apply_overrides(preset_config(kind), overrides);
  const std::filesystem::path base = resolve_output_dir(cfg.outputs.directory);
  std::filesystem::create_directories(base);
  PresetReport rep;
  rep.preset = kind;
  spdlog::info("preset {} -> {}", to_string(kind), base.string());
  switch (kind) {
    case PresetKind::ConservationA:
    case PresetKind::ConservationB: {
      const SimulationResult r = run_simulation(cfg);
      rep.artifacts = run_artifacts(r, base);
      conservation(rep, r, kind == PresetKind::ConservationA);
      break;
    }
    case PresetKind::GlobalSupportA: global_support(rep, cfg, base); break;
    case PresetKind::PullbackA:
    case PresetKind::PullbackB: pullback(rep, cfg, base); break;
    case PresetKind::BlowupA_sign: blowup(rep, cfg, ThresholdFamily::A_sign, base); break;
    case PresetKind::BlowupA_L1: blowup(rep, cfg, ThresholdFamily::A_L1, base); break;
    case PresetKind::BlowupB_sign: blowup(rep, cfg, ThresholdFamily::B_sign, base); break;
    case PresetKind::BesovSanity: besov_sanity(rep, cfg, base); break;
  }
  write_text(base / "report.json", rep.to_json().dump(2) + "\n");
  return rep;
}

}  // namespace chsys
