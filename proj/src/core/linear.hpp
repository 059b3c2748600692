#pragma once

#include <span>
#include <vector>

#include "core/gridfn.hpp"

namespace peakon {

// Linearized flow around the unit peakon. Characteristics start at q(0,s) = s
// and the perturbation is carried along them in closed form. Datum templates
// accept InitialDatum (analytic) or PeakedFunction (interpolated).

/// q(t,s); q(t,0) = 0. Defined for all real t.
double char_position(double t, double s);
/// q_s(t,s) > 0.
double char_jacobian(double t, double s);

template <class Datum>
double linear_V(double t, double s, const Datum& v0);
/// W = V_s / q_s. At s = 0 returns the mean of the one-sided limits.
template <class Datum>
double linear_W(double t, double s, const Datum& v0);

/// lim_{s->0+} W(t,s) = v0(0)(e^t - 1) + v0'(0+) e^t
double linear_W_limit_plus(double t, double v0_peak, double v0_slope_right);
/// lim_{s->0-} W(t,s) = v0(0)(1 - e^{-t}) + v0'(0-) e^{-t}
double linear_W_limit_minus(double t, double v0_peak, double v0_slope_left);

/// v(t,.) sampled at x = q(t,s) for s in grid and in the preimage q(-t, grid),
/// restricted to [grid.front(), grid.back()], so the image always contains the
/// original nodes. Returns the datum sample at t = 0.
template <class Datum>
PeakedFunction linear_solution_field(double t, const Datum& v0, std::span<const double> grid);
PeakedFunction linear_solution_field(double t, const PeakedFunction& v0);

/// Independent RK4 integration of the characteristic system per node of
/// `v0`: q' = phi(q)^2 - 1, V' = phi_x(q)(phi(q) V - v0(0)), plus V_s and
/// log q_s. Throws StepSize if dt > 0.1.
PeakedFunction linear_ode_crosscheck(const PeakedFunction& v0, double t_end, double dt);

/// |v0(0) + v0'(0+)| e^t - |v0(0)|
double growth_lower_bound(double t, double v0_peak, double v0_slope_right);
inline double growth_lower_bound(double t, const PeakedFunction& v0) {
  return growth_lower_bound(t, v0.peak_value(), v0.slope_right());
}

/// int (V^2 + W^2) q_s ds over one half-line, trapezoid in s on the same label
/// set as linear_solution_field, including the one-sided limit at 0.
template <class Datum>
double h1_char_side(double t, const Datum& v0, std::span<const double> grid, Side side);

}  // namespace peakon
