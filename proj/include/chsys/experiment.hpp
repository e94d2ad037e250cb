#pragma once

// Run orchestration on top of the library: artifacts on disk, canonical
// presets with pass rules, and the blow-up prediction verdict.

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "chsys/blowup.hpp"
#include "chsys/characteristics.hpp"
#include "chsys/config.hpp"
#include "chsys/diagnostics.hpp"
#include "chsys/integrator.hpp"

namespace chsys {

using Json = nlohmann::json;

/// Version string written into every manifest.
std::string_view code_version();

/// Root for relative output directories: $CH_OUTPUT_ROOT when set, else ".".
std::filesystem::path output_root();
std::filesystem::path resolve_output_dir(const std::string& directory);

Json to_json(const RunConfig& cfg);

struct SimulationHooks {
  std::function<void(const State&, const DerivedFields&, const CharacteristicBundle&,
                     const DiagnosticsRecord&)>
      on_sample;
  std::function<void(const StepResult&, double dt)> on_step;
};

struct SimulationResult {
  RunConfig config;
  RunStatus status;
  std::optional<std::string> abort_cause;  // observer failure or invalid initial state
  std::size_t steps = 0;
  double wall_time_s = 0.0;
  // One record per sample, plus a terminal record when the run stopped between samples.
  std::vector<DiagnosticsRecord> records;
  bool terminal_record = false;
  State initial;
  State final_state;
  CharacteristicBundle bundle;  // at final_state.t
  double m0_sup = 0.0;
  double max_pullback_residual = 0.0;
  std::map<std::string, double> drift;  // max relative drift of each conserved column
  std::filesystem::path directory;      // empty when nothing was written
  Json manifest;

  bool completed() const { return !abort_cause && status.outcome == RunOutcome::Completed; }
};

struct SimulationOptions {
  bool write_artifacts = true;
  SimulationHooks hooks;
  Json manifest_extras;  // merged under "extras"
};

/// Integrates cfg, tracks characteristics and writes diagnostics.csv,
/// characteristics.csv, snapshots and manifest.json into
/// resolve_output_dir(cfg.outputs.directory).
SimulationResult run_simulation(const RunConfig& cfg, const SimulationOptions& options = {});

/// Largest relative change of a column from its initial value (absolute when that is zero).
double max_relative_drift(const std::vector<DiagnosticsRecord>& records, std::string_view column);

/// Largest |value / value(0)| of a column over the records, the growth of an indicator.
double indicator_growth(const std::vector<DiagnosticsRecord>& records, std::string_view column);

std::string diagnostics_csv(const std::vector<DiagnosticsRecord>& records);
void write_snapshot(const std::filesystem::path& file, const Field& f);
/// Reads an "x,value" snapshot; the grid is rebuilt from the row count and the first node.
Field read_snapshot(const std::filesystem::path& file);

// ---------------------------------------------------------------- presets

enum class PresetKind {
  ConservationA,
  ConservationB,
  GlobalSupportA,
  PullbackA,
  PullbackB,
  BlowupA_sign,
  BlowupA_L1,
  BlowupB_sign,
  BesovSanity
};

const std::vector<PresetKind>& all_presets();
std::string_view to_string(PresetKind kind);
std::optional<PresetKind> parse_preset_kind(std::string_view name);

/// The canonical YAML text shipped in presets/ and compiled into the library.
std::string_view preset_text(PresetKind kind);
RunConfig preset_config(PresetKind kind);

struct PresetReport {
  PresetKind preset = PresetKind::ConservationA;
  bool pass = false;
  Json measured = Json::object();
  Json tolerance = Json::object();
  std::vector<std::string> artifacts;

  Json to_json() const;
};

/// Thrown for failures of the machinery itself, as opposed to pass = false.
class InfrastructureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Runs the preset with "key=value" overrides and writes report.json next to its artifacts.
PresetReport run_preset(PresetKind kind, const std::vector<std::string>& overrides = {});

// ------------------------------------------------------------- prediction

struct PredictionVerdict {
  ThresholdFamily family = ThresholdFamily::A_L1;
  CertifiedConstant constant;
  BlowupInputs inputs;
  BlowupPrediction prediction;
  /// Qx0 / threshold: how far past the threshold the slope is (>= 1 when triggered).
  double margin = 0.0;

  Json to_json() const;
};

/// Evaluates the family's verdict at x0 = argmax(|m0| + |n0|) on the family's
/// system, and at every node nearest to a point of `extra_x0`.
/// Throws HypothesisViolation for data outside the family (including N0 = 0).
std::vector<PredictionVerdict> predict_blowup(const RunConfig& cfg, ThresholdFamily family,
                                              const std::vector<double>& extra_x0 = {});

}  // namespace chsys
