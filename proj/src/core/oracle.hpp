#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include "core/gridfn.hpp"

namespace peakon {

/// Lab-frame solution on a uniform grid, for the direct method-of-lines solver.
struct DirectState {
  std::vector<double> x;
  std::vector<double> u;
  double t = 0.0;

  double dx() const { return x[1] - x[0]; }
};

/// `nodes` uniform points on [-L, L], u = u0(x).
DirectState direct_state(double half_width, std::size_t nodes, const std::function<double(double)>& u0);

/// -u^2 u_x - d/dx P1 - P2 with P1 = 1/2 phi*(3/2 u u_x^2 + u^3), P2 = 1/4 phi*u_x^3.
/// u_x is a backward (upwind, the speed u^2 is never negative) difference of
/// order 1 or 2, with u taken as 0 beyond the left end.
/// Throws BoundaryDecay if u is not small at either end.
std::vector<double> direct_rhs(const DirectState& st, int order = 2, double decay_tol = 1e-6);

/// RK4 in time; nu > 0 adds nu u_xx (centered). Stable for dt <= 0.4 dx at unit speed.
DirectState direct_evolve(DirectState st, double t_end, double dt, double nu = 0.0, int order = 2);

/// E with centered differences for u_x.
double direct_energy(const DirectState& st);

/// Sup |u_direct - u_char| over the direct nodes inside the range of `char_u`,
/// skipping nodes within two cells of the peak of `char_u`.
double compare(const DirectState& direct, const PeakedFunction& char_u);

/// "# t=<t>", "x,u", then one row per node.
void write_direct_snapshot(std::ostream& out, const DirectState& st);

}  // namespace peakon
