#pragma once

#include <functional>

#include "shearlab/field.hpp"
#include "shearlab/flow_schedule.hpp"
#include "shearlab/mode_solver.hpp"

namespace shearlab {

/// Full passive scalar f on T^3. A = +infinity gives pure transport.
struct ScalarState {
  SpectralField f;
  double t = 0.0;
  double A = 1.0;
};

/// Strang step of d_t f + u . grad f = (1/A) Lap f over [t, t + dt], which
/// must lie inside one schedule phase. Uses the parallel kernels.
ScalarState step_scalar(const ScalarState& state, const FlowSchedule& schedule, double dt);
void step_scalar_inplace(ScalarState& state, const FlowSchedule& schedule, double dt);

/// Same step built from the serial reference kernels.
void step_scalar_serial(ScalarState& state, const FlowSchedule& schedule, double dt);

/// Advances to t_end with steps of at most dt, splitting at phase boundaries.
void advance_scalar(ScalarState& state, const FlowSchedule& schedule, double t_end, double dt,
                    const std::function<void(const ScalarState&)>& on_step = {});

/// The (alpha, gamma) mode of F as a profile along the shear axis, where alpha
/// and gamma are wavenumbers along the flow and spectator axes of `d`.
ModeState extract_mode(const SpectralField& F, ShearDirection d, int alpha, int gamma, double t, double A);

}  // namespace shearlab
