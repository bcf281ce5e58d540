#pragma once

#include <functional>
#include <vector>

#include "core/config.hpp"
#include "core/diagnostics.hpp"
#include "core/grid.hpp"
#include "core/io.hpp"
#include "core/model.hpp"

namespace fhn {

/// Advection velocities at cell faces for the conservative form
/// ∂_t f = −∂_x(u_x f) − ∂_v(u_v f) + D ∂²_vv f with u_x = −A, u_v = −B.
/// Boundary faces carry velocity 0 (zero-flux truncation). These arrays are
/// the single source of the transport stencil: the time stepper and the
/// stationary/linearized operator assemblies all consume them.
///
/// x faces: (nx+1)·nv entries, face (i,k) between cells (i−1,k) and (i,k).
std::vector<double> x_face_speeds(const Grid2D& g, const ModelParams& p);
/// v faces: nx·(nv+1) entries, face (i,k) between cells (i,k−1) and (i,k).
std::vector<double> v_face_speeds(const Grid2D& g, const ModelParams& p,
                                  double j);

struct CflInfo {
  double dt_axis = 0.0;     // safety·min(Δx/max|u_x|, Δv/max|u_v|)
  double dt_positive = 0.0; // safety/max simultaneous cell outflow rate
  char axis = 'v';          // limiting axis of dt_axis
  int face_i = 0, face_k = 0;
  double speed = 0.0;       // speed at the limiting face
};

/// CFL bounds at a given coupling value. dt_axis is the documented step
/// precondition; dt_positive ≤ dt_axis additionally guarantees sign
/// preservation when a cell drains through several faces at once (automatic
/// dt selection uses it).
CflInfo cfl_limit(const Grid2D& g, const ModelParams& p, double j,
                  double safety);

/// Conservative dt for a full nonlinear solve: min of dt_positive over the
/// extreme coupling values the run can visit (j ∈ {v_min, v_max}).
double cfl_dt_for_solve(const Grid2D& g, const ModelParams& p, double safety);

/// One IMEX step at frozen coupling j: explicit first-order upwind transport,
/// then implicit backward-Euler v-diffusion (one tridiagonal solve per x-row,
/// zero-flux ends). Exactly mass-conserving; sign-preserving under the
/// dt_positive bound. Throws NumericalError if dt violates dt_axis (naming
/// the limiting face) or if the result develops negatives beyond rounding.
void step(Density& f, double dt, const ModelParams& p, double j,
          double cfl_safety = 0.9);

/// Integrate for a duration at frozen coupling j (linear evolution). dt = 0
/// picks the sign-preserving automatic step. Used as the stationary solver's
/// long-time fallback.
void advance_frozen_j(Density& f, double duration, double dt,
                      const ModelParams& p, double j, double cfl_safety = 0.9);

/// Same step with caller-supplied fields (test/oracle hook; e.g. pure
/// diffusion with zero drift).
struct DriftFields {
  std::function<double(double, double)> a_field; // x-drift A(x,v)
  std::function<double(double, double)> b_field; // v-drift B(x,v) at fixed j
  double diffusion = 0.0;
};
void step_fields(Density& f, double dt, const DriftFields& fields,
                 double cfl_safety = 0.9);

struct PdeRunOptions {
  double t_final = 5.0;
  double dt = 0.0; // 0 = automatic (cfl_dt_for_solve)
  int stride = 10;
  PdeConfig pde;
  WeightParams weight;
  int snapshot_stride = 0; // snapshots every N records; 0 = none
  std::vector<Density>* snapshots = nullptr;
};

struct PdeRunResult {
  Table series; // pde column set
  std::vector<DiagnosticsRecord> records;
  bool renormalized_on_load = false;
  double initial_mass_defect = 0.0;
  double dt_used = 0.0;
  long steps_taken = 0;
};

/// Advances f in place to t_final with the coupling refreshed from the
/// current density before every step. Errors: ConfigError for a dt violating
/// the initial CFL bound; NumericalError if the boundary-mass monitor trips
/// (advising a larger domain) or the state degenerates.
PdeRunResult solve(Density& f, const ModelParams& p, const PdeRunOptions& opt);

} // namespace fhn
