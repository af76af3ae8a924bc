#ifndef SQG_SCENARIOS_HPP
#define SQG_SCENARIOS_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "sqg/io.hpp"
#include "sqg/transport.hpp"

namespace sqg {

enum class Scenario {
  SmoothConvection,
  FractionalDiffusion,
  SingleVortex,
  DoubleVortex,
  ViscousSQG,
  DecayingTurbulence,
  Custom,
};

std::string to_string(Scenario s);

/// Full description of one run. Scenario selection installs the benchmark
/// defaults; every field can then be overridden by the config file or the
/// command line.
struct RunConfig {
  Scenario scenario = Scenario::Custom;
  int n_side = 64;
  double cfl = 0.4;
  SchemeKind scheme = SchemeKind::FCT;
  double c_ev = 1.0;
  EVNormalization ev_normalization = EVNormalization::Local;
  double ev_epsilon = 1e-8;
  double kappa = 0.0;
  double s = 0.5;
  VelocityMode velocity_mode = VelocityMode::SQG;
  double sinc_k = 0.8;
  int sinc_m = 12;
  double t_final = 1.0;
  std::vector<double> snapshot_times;
  double dt_max = 1e30;
  double dt_fixed_h_factor = 0.0;  // > 0: dt = factor * h, CFL selection off
  uint64_t seed = 12345;
  std::string output_dir = "out";
  std::optional<Vec2> frozen_velocity;
  bool refresh_velocity_per_stage = true;
  std::string initial_profile;  // required for Scenario::Custom
  int diag_helicity_every = 1;  // 0: helicity only at snapshots/final
  bool emit_spectra = false;    // spectrum csv at snapshot times
  double solver_tol_sinc = 1e-10;
  double solver_tol_mass = 1e-12;
  int threads = 0;  // 0 = hardware concurrency

  StepperConfig stepper_config(double h) const;
};

RunConfig default_config(Scenario s);

/// Flat `key = value` config file: UTF-8, one pair per line, # comments.
/// Unknown and duplicate keys are rejected with the line number.
RunConfig load_config(const std::string& path);
RunConfig parse_config_text(const std::string& text);

/// One `key=value` override applied on top of a parsed config.
void apply_override(RunConfig& cfg, const std::string& key, const std::string& value);

/// Key/value view of a config, the manifest content.
std::vector<std::pair<std::string, std::string>> config_to_kv(const RunConfig& cfg);

struct ScenarioSpec {
  std::function<double(double, double)> initial;  // null for seeded noise
  bool random_initial = false;
  // exact solution (x1, x2, t), when the benchmark has one
  std::function<double(double, double, double)> exact;
};

ScenarioSpec scenario_spec(const RunConfig& cfg);

/// Nodal sampling of the scenario's initial data (or seeded uniform draws
/// on [-10, 10]), shifted to zero lumped mean.
ScalarField initial_field(const ScenarioSpec& spec, const TorusMesh& mesh,
                          const FemOperators& ops, uint64_t seed);

/// Executes the time loop on caller-owned mesh/operators, writing
/// timeseries/snapshots/manifest under cfg.output_dir as it goes (an
/// aborted run leaves valid truncated files; an empty output_dir disables
/// file output). `final_theta`, when given, receives the terminal state.
RunRecord run_on(const RunConfig& cfg, const TorusMesh& mesh,
                 const FemOperators& ops, std::vector<double>* final_theta = nullptr,
                 std::ostream* log = nullptr);

struct RunResult {
  RunRecord record;
  std::vector<double> final_theta;
};

/// Self-contained variant building its own mesh and operators.
RunResult run(const RunConfig& cfg, std::ostream* log = nullptr);

/// Error-table studies behind the `table1` / `table2` subcommands; also the
/// backing for the acceptance suite.
ErrorTable table1_block(SchemeKind scheme, EVNormalization norm,
                        const std::vector<int>& n_sides, std::ostream* log = nullptr,
                        const std::string& out_dir = "");
ErrorTable table2_block(SincQuadrature q, const std::vector<int>& n_sides,
                        std::ostream* log = nullptr, const std::string& out_dir = "");

}  // namespace sqg

#endif  // SQG_SCENARIOS_HPP
