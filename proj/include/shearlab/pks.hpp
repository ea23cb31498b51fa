#pragma once

#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "shearlab/checkpoint.hpp"
#include "shearlab/field.hpp"
#include "shearlab/flow_schedule.hpp"

namespace shearlab {

// Rescaled parabolic-parabolic Patlak-Keller-Segel system
//   d_t n + u . grad n = (1/A) Lap n - (1/A) div(n grad c)
//   d_t c + u . grad c = (1/A) Lap c + (1/A)(n - mean n)

struct PksParams {
  double dt_init = 1e-3;
  double dt_max = 1.0;
  double dt_min = 1e-9;
  double tol = 1e-5;          ///< relative local error target of the controller
  bool adaptive = true;
  double linf_factor = 1e3;   ///< blow-up when max n exceeds this times the initial max
  double highk_fraction = 0.1;
  double tol_pos = 1e-8;      ///< positivity monitor: min n >= -tol_pos * max n
};

enum class BlowupCause { none, linf_threshold, highk_energy_fraction, dt_collapse, nonfinite };
std::string cause_label(BlowupCause c);

struct BlowupVerdict {
  bool triggered = false;
  double time = 0.0;
  BlowupCause cause = BlowupCause::none;

  /// Keeps the first trigger; later verdicts never clear it.
  void merge(const BlowupVerdict& other);
};

class BlowupError : public std::runtime_error {
 public:
  explicit BlowupError(const BlowupVerdict& v);
  BlowupVerdict verdict;
};

/// Canonical state: physical-space n and c. Spectral data is recomputed at
/// the start of every step, so a state restored from disk continues
/// bit-identically.
struct PKSState {
  RealField n;
  RealField c;
  double t = 0.0;
  double A = 1.0;
  double mass = 0.0;          ///< integral of n at t = 0
  double initial_linf = 0.0;  ///< max |n| at t = 0
};

/// Builds a state; the mean of c is removed.
PKSState make_pks_state(RealField n, RealField c, double A, double t = 0.0);

/// Aggregation term -(1/A) div(n grad c) with dealiased inputs and output.
SpectralField aggregation_term(const SpectralField& n_hat, const SpectralField& c_hat, double A);

/// Data of one attempted step, enough to co-evolve a chemical split.
struct StepRecord {
  double t0 = 0.0;
  double dt = 0.0;
  bool sheared = false;
  Axis flow = Axis::x, shear = Axis::y;
  std::vector<double> integral;  ///< phase integral over the step on the shear axis
  SpectralField n_eff;           ///< n + dt/2 N(v): the effective n forcing of c
  double error = 0.0;            ///< scaled error estimate (accept when <= 1)
  bool finite = true;
};

/// Applies the linear propagator (half diffusion, exact shear, half
/// diffusion, with the n -> c coupling) of a step to a pair of fields.
void apply_linear_propagator(const StepRecord& rec, double A, SpectralField& n, SpectralField& c);

/// One Lawson-Heun step of size dt from s. Returns the new state and fills
/// the record. [t, t + dt] must lie inside one schedule phase.
PKSState attempt_pks_step(const PKSState& s, const FlowSchedule& schedule, double dt, const PksParams& params,
                          StepRecord& rec);

/// Fixed-size step. Throws BlowupError when the result triggers detect_blowup.
PKSState step_pks(const PKSState& s, const FlowSchedule& schedule, double dt, const PksParams& params = {});

/// Checks the non-finite, L-infinity and high-wavenumber criteria; dt below
/// params.dt_min adds dt_collapse.
BlowupVerdict detect_blowup(const PKSState& s, const PksParams& params = {},
                            double current_dt = std::numeric_limits<double>::infinity());

/// Energy fraction of n (without its mean) outside the 2/3-rule box.
double highk_energy_fraction(const SpectralField& n_hat);

/// Relative mass drift and chemical mean.
double mass_drift(const PKSState& s);
double chemical_mean(const PKSState& s);

/// Splitting c_rem = c_dev + d of the chemical remainder along `flow` from
/// reference time t_r: d evolves as a passive scalar from c_rem(t_r); c_dev
/// carries the n forcing from zero data.
struct ChemicalSplit {
  double t_r = 0.0;
  Axis flow = Axis::x;
  SpectralField d;
  SpectralField c_dev;
  SpectralField carried;  ///< c_rem(t_r)
};

ChemicalSplit make_split(const PKSState& s, Axis flow);
/// Advances the split with the data of an accepted step.
void co_evolve_split(ChemicalSplit& split, const StepRecord& rec, double A);
/// Convenience form: recomputes the step from `state_before`.
ChemicalSplit co_evolve_split(const PKSState& state_before, ChemicalSplit split, const FlowSchedule& schedule,
                              double dt, const PksParams& params = {});
/// ||c_rem - c_dev - d|| / ||c_rem||, with c_rem taken from the state.
double split_identity_error(const PKSState& s, const ChemicalSplit& split);

/// Remainder of F along an axis (the axis-zero slab removed).
SpectralField remainder(const SpectralField& F, Axis a);

struct AverageSystem {
  RealField n_avg;
  RealField c_avg;
};
/// Averages of n and c along the flow axis.
AverageSystem x_average_system(const PKSState& s, Axis flow = Axis::x);

/// Residual of d_t <n> = (1/A) Lap <n> - (1/A) div <n grad c> at the middle
/// state by centered differences, relative to the norm of the right side.
double average_equation_residual(const PKSState& prev, const PKSState& mid, const PKSState& next, Axis flow);

/// Adaptive integrator with PI step control and an optional co-evolved split.
class PksRun {
 public:
  PksRun(const FlowSchedule& schedule, PksParams params, PKSState initial);

  const PKSState& state() const { return state_; }
  const BlowupVerdict& verdict() const { return verdict_; }
  const std::optional<ChemicalSplit>& split() const { return split_; }
  double next_dt() const { return dt_next_; }
  long accepted() const { return accepted_; }
  long rejected() const { return rejected_; }
  long positivity_violations() const { return positivity_violations_; }

  /// Starts (or restarts) the chemical split at the current time.
  void start_split(Axis flow);
  void clear_split() { split_.reset(); }

  /// Takes one accepted step ending no later than t_limit or the next phase
  /// boundary. Returns false if the verdict triggered (state left at the last
  /// good step). Asserts mass and chemical mean invariants after each step.
  bool advance(double t_limit);

  /// Saves fields and controller state; restore() continues bit-identically.
  std::string save(const std::string& prefix, const nlohmann::json& extra = {}) const;
  static PksRun restore(const FlowSchedule& schedule, PksParams params, const std::string& sidecar,
                        nlohmann::json* extra = nullptr);

 private:
  FlowSchedule schedule_;
  PksParams params_;
  PKSState state_;
  std::optional<ChemicalSplit> split_;
  BlowupVerdict verdict_;
  double dt_next_;
  double err_prev_ = 1.0;
  long accepted_ = 0, rejected_ = 0, positivity_violations_ = 0;
};

}  // namespace shearlab
