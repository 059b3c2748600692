#include "core/oracle.hpp"

#include <cmath>
#include <ostream>

#include "core/errors.hpp"
#include "core/format.hpp"
#include "core/kernel.hpp"
#include "core/rk4.hpp"

namespace peakon {

DirectState direct_state(double half_width, std::size_t nodes, const std::function<double(double)>& u0) {
  if (!(half_width > 0.0) || nodes < 3) fail(ErrorKind::InvalidGrid, "direct_state: need L > 0 and at least 3 nodes");
  DirectState st;
  st.x.resize(nodes);
  st.u.resize(nodes);
  const double h = 2.0 * half_width / double(nodes - 1);
  for (std::size_t i = 0; i < nodes; ++i) {
    st.x[i] = i + 1 == nodes ? half_width : -half_width + double(i) * h;
    st.u[i] = u0(st.x[i]);
  }
  return st;
}

namespace {

void check_order(int order) {
  if (order != 1 && order != 2) fail(ErrorKind::InvalidArgument, "direct solver: upwind order must be 1 or 2");
}


void rhs_into(const std::vector<double>& x, const std::vector<double>& u, double decay_tol, double nu, int order,
              std::vector<double>& out) {
  const std::size_t n = u.size();
  const double h = x[1] - x[0];
  double scale = 1.0;
  for (double v : u) scale = std::max(scale, std::abs(v));
  if (std::abs(u.front()) > decay_tol * scale || std::abs(u.back()) > decay_tol * scale) {
    fail(ErrorKind::BoundaryDecay, "direct solver: u does not decay at the grid boundary");
  }
  std::vector<double> ux(n), g(n), k(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u1 = i > 0 ? u[i - 1] : 0.0, u2 = i > 1 ? u[i - 2] : 0.0;
    ux[i] = order == 2 ? (3.0 * u[i] - 4.0 * u1 + u2) / (2.0 * h) : (u[i] - u1) / h;
    g[i] = 1.5 * u[i] * ux[i] * ux[i] + u[i] * u[i] * u[i];
    k[i] = ux[i] * ux[i] * ux[i];
  }
  const auto sg = exp_split_scan(x, x, g);
  const auto sk = exp_split_scan(x, x, k);
  out.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double dP1 = 0.5 * (sg.right[i] - sg.left[i]);
    const double P2 = 0.25 * (sk.left[i] + sk.right[i]);
    out[i] = -u[i] * u[i] * ux[i] - dP1 - P2;
    if (nu > 0.0) {
      const double ul = i > 0 ? u[i - 1] : 0.0, ur = i + 1 < n ? u[i + 1] : 0.0;
      out[i] += nu * (ur - 2.0 * u[i] + ul) / (h * h);
    }
  }
}

}  // namespace

std::vector<double> direct_rhs(const DirectState& st, int order, double decay_tol) {
  check_order(order);
  std::vector<double> out;
  rhs_into(st.x, st.u, decay_tol, 0.0, order, out);
  return out;
}

DirectState direct_evolve(DirectState st, double t_end, double dt, double nu, int order) {
  check_order(order);
  if (!(dt > 0.0)) fail(ErrorKind::StepSize, "direct_evolve: dt must be positive");
  if (nu < 0.0) fail(ErrorKind::InvalidArgument, "direct_evolve: nu must be non-negative");
  const auto steps = static_cast<long>(std::ceil((t_end - st.t) / dt - 1e-9));
  Rk4 rk;
  const double t0 = st.t;
  for (long k = 1; k <= steps; ++k) {
    const double target = k == steps ? t_end : t0 + double(k) * dt;
    rk.step(st.u, target - st.t, [&](const std::vector<double>& u, std::vector<double>& du) {
      rhs_into(st.x, u, kDefaultDecayTol, nu, order, du);
    });
    st.t = target;
  }
  return st;
}

double direct_energy(const DirectState& st) {
  const std::size_t n = st.u.size();
  const double h = st.dx();
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double ul = i > 0 ? st.u[i - 1] : 0.0, ur = i + 1 < n ? st.u[i + 1] : 0.0;
    const double ux = (ur - ul) / (2.0 * h);
    const double w = (i == 0 || i + 1 == n) ? 0.5 : 1.0;
    sum += w * h * (st.u[i] * st.u[i] + ux * ux);
  }
  return sum;
}

double compare(const DirectState& direct, const PeakedFunction& char_u) {
  const double h = direct.dx();
  const double lo = char_u.coords().front(), hi = char_u.coords().back();
  const double a = char_u.peak_position();
  double m = 0.0;
  for (std::size_t i = 0; i < direct.x.size(); ++i) {
    const double x = direct.x[i];
    if (x < lo || x > hi || std::abs(x - a) <= 2.0 * h) continue;
    m = std::max(m, std::abs(direct.u[i] - char_u.value(x)));
  }
  return m;
}

void write_direct_snapshot(std::ostream& out, const DirectState& st) {
  out << "# t=" << fmt17(st.t) << "\nx,u\n";
  for (std::size_t i = 0; i < st.x.size(); ++i) out << fmt17(st.x[i]) << ',' << fmt17(st.u[i]) << '\n';
}

}  // namespace peakon
