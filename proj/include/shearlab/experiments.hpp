#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"
#include "shearlab/pks.hpp"
#include "shearlab/rate_fit.hpp"
#include "shearlab/run_config.hpp"

namespace shearlab {

/// CSV file with '#' header lines (version, config hash, seed), one column
/// header row and values printed with %.17g.
class CsvWriter {
 public:
  using Cell = std::variant<double, long, std::string>;
  CsvWriter(const std::filesystem::path& path, const RunConfig& cfg, const std::vector<std::string>& columns);
  void row(const std::vector<Cell>& cells);
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  std::size_t columns_;
};

std::string format_double(double v);

/// One assertion of an experiment, reported in its summary.
struct Assertion {
  std::string name;
  bool pass = false;
  std::string detail;
};
bool all_pass(const std::vector<Assertion>& a);
nlohmann::json to_json(const std::vector<Assertion>& a);

// ---------------------------------------------------------------- ed-sweep

struct EdSweepResult {
  std::vector<std::pair<std::string, ExponentFit>> fits;
  std::vector<Assertion> assertions;
};
/// Expected exponent and tolerance per flow name ("log_shift" has none).
std::optional<std::pair<double, double>> expected_ed_exponent(const std::string& flow);
EdSweepResult run_ed_sweep(const RunConfig& cfg, const std::filesystem::path& out_dir);

// ----------------------------------------------------------------- gliding

struct GlidingRecord {
  double A = 0.0;
  long steps = 0;
  DecayFit l2_fit;
  DecayFit z_fit;        ///< fit of (1/2) log Z over the time window of l2_fit
  double overshoot = 0;  ///< max_t Z(t) / Z(0)
};
/// Runs the (alpha, 0) mode of the rate study initial profile and tracks the
/// L2 norm and the gliding norm Z^M_G (context from t = 0) together.
GlidingRecord measure_gliding_decay(const FlowSchedule& schedule, int alpha, int M, double G,
                                    const RateStudyOptions& opts);
struct GlidingResult {
  std::vector<GlidingRecord> records;
  LinearFit l2_exponent;
  LinearFit z_exponent;
  double max_overshoot = 0.0;
  std::vector<Assertion> assertions;
};
GlidingResult run_gliding(const RunConfig& cfg, const std::filesystem::path& out_dir);

// -------------------------------------------------------------- toy model

struct ToyRecord {
  std::string flow;
  double A = 0.0;
  double integral = 0.0;  ///< (1/A) int ||Lap g||_inf dt
  double peak = 0.0;      ///< max ||Lap g||_inf
  double t_end = 0.0;
  long steps = 0;
};
/// Integrates the forcing contribution of the g equation of the toy model for
/// g = Re(e^{i alpha x}) until ||Lap g||_inf falls below 1e-10 times its peak.
ToyRecord toy_contribution(const std::string& flow, const ShearProfile& p, double A, int alpha, int n_shear,
                           double dt_scale);
struct ToyResult {
  std::vector<ToyRecord> records;
  std::vector<std::pair<std::string, LinearFit>> slopes;
  std::vector<Assertion> assertions;
};
ToyResult run_toy_model(const RunConfig& cfg, const std::filesystem::path& out_dir);

// ------------------------------------------------------------ contraction

struct ContractionResult {
  double A = 0.0;
  double window = 0.0;
  std::vector<double> factors;     ///< worst-case (operator norm) factor per window
  std::vector<double> trajectory;  ///< ratio per window along one trajectory
  double kappa = 0.0;              ///< 1 - max factor
  double spread = 0.0;             ///< max - min factor
  double control = 0.0;            ///< quiescent factor over one window
  double control_expected = 0.0;   ///< e^{-window / A}
  double high_mode = 0.0;          ///< factor of |alpha| = high_alpha over its window
  std::vector<Assertion> assertions;
};
ContractionResult run_contraction(const RunConfig& cfg, const std::filesystem::path& out_dir);

// ------------------------------------------------------------ suppression

/// n = 1 + mass * normalized periodized Gaussian, c solving -Lap c = n - mean n.
PKSState make_gaussian_state(const Grid& g, const InitialData& init, double A);
PksParams pks_params(const PksControls& c);

struct SuppressionRun {
  double A = 0.0;
  bool with_flow = true;
  double horizon = 0.0;
  bool survived = false;
  BlowupVerdict verdict;
  double t_end = 0.0;
  long accepted = 0, rejected = 0, positivity_violations = 0;
  double delta = 0.0;       ///< measured linear rate used in the functional
  double R1_c_start = 0.0;  ///< R1 energy of c at t = 0
  double R1_c_end_a = 0.0;  ///< R1 energy of c at the end of the first phase
  double z_chem_start = 0.0;
  double z_chem_T1a = 0.0;  ///< at the end of the first cycle
  double seconds = 0.0;
  nlohmann::json to_json() const;
};
struct SuppressionResult {
  std::vector<SuppressionRun> flow_runs;
  std::optional<SuppressionRun> baseline;
  bool found = false;
  double A_star = 0.0;
  std::vector<Assertion> assertions;
};
SuppressionResult run_suppression(const RunConfig& cfg, const std::filesystem::path& out_dir);

/// Continues a suppression run from a checkpoint written at a phase
/// boundary. Rows go to `<out_dir>/resume_timeline.csv`.
SuppressionRun resume_suppression(const std::filesystem::path& sidecar, const std::filesystem::path& out_dir);

// ------------------------------------------------------------------ checks

struct ChecksResult {
  nlohmann::json reports = nlohmann::json::array();
  std::vector<Assertion> assertions;
};
ChecksResult run_checks(const RunConfig& cfg, const std::filesystem::path& out_dir);

/// Dispatches on cfg.experiment, writes `<out_dir>/summary.json` and returns
/// true iff every assertion passed.
bool run_experiment(const RunConfig& cfg, const std::filesystem::path& out_dir);

}  // namespace shearlab
