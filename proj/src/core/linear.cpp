#include "core/linear.hpp"

#include <algorithm>
#include <cmath>

#include "core/errors.hpp"
#include "core/rk4.hpp"

namespace peakon {

namespace {

// D^2 written as a sum of two non-negative terms so it never cancels.
double denom_sq(double t, double s) {
  return s > 0.0 ? -std::expm1(-2.0 * s) + std::exp(2.0 * (t - s)) : -std::expm1(2.0 * s) + std::exp(2.0 * (s - t));
}

struct Closed {
  double V, W;
};

// With E = expm1(2t) e^{-2s} (s > 0) one has D^2 = 1 + E, and
//   W = D N_s + N E / D = (v0' + E (v0 + v0') - p c) / D,
// which avoids cancelling two terms of size e^{2t} near the peak.
// The s < 0 branch is the mirror image with E = expm1(-2t) e^{2s}.
template <class Datum>
Closed closed_form(double t, double s, const Datum& v0) {
  const double p = v0.peak_value();
  const double d = std::sqrt(denom_sq(t, s));
  const double v = v0.value(s), vs = v0.slope(s);
  if (s > 0.0) {
    const double c = std::expm1(t) * std::exp(-s);
    const double e = std::expm1(2.0 * t) * std::exp(-2.0 * s);
    return {(v + p * c) / d, (vs + e * (v + vs) - p * c) / d};
  }
  const double c = std::expm1(-t) * std::exp(s);
  const double e = std::expm1(-2.0 * t) * std::exp(2.0 * s);
  return {(v + p * c) / d, (vs + e * (vs - v) + p * c) / d};
}

std::vector<double> merge_labels(double t, std::span<const double> grid) {
  std::vector<double> s(grid.begin(), grid.end());
  const double lo = grid.front(), hi = grid.back();
  for (double x : grid) {
    const double pre = char_position(-t, x);
    if (pre >= lo && pre <= hi) s.push_back(pre);
  }
  std::sort(s.begin(), s.end());
  std::vector<double> out;
  out.reserve(s.size());
  for (double v : s) {
    if (v == 0.0) continue;
    if (!out.empty() && v - out.back() <= 1e-12 * std::max(1.0, std::abs(v))) continue;
    out.push_back(v);
  }
  return out;
}

}  // namespace

double char_position(double t, double s) {
  if (s == 0.0) return 0.0;
  if (s > 0.0) {
    if (2.0 * (s - t) < 40.0 && s < 300.0) return 0.5 * std::log1p(std::expm1(2.0 * s) * std::exp(-2.0 * t));
    return s - t + 0.5 * std::log(denom_sq(t, s));
  }
  if (2.0 * (t - s) < 40.0 && -s < 300.0) return -0.5 * std::log1p(std::expm1(-2.0 * s) * std::exp(2.0 * t));
  return s - t - 0.5 * std::log(denom_sq(t, s));
}

double char_jacobian(double t, double s) {
  if (s == 0.0) fail(ErrorKind::InvalidArgument, "char_jacobian: q_s jumps at s = 0; use a one-sided label");
  return 1.0 / denom_sq(t, s);
}

template <class Datum>
double linear_V(double t, double s, const Datum& v0) {
  if (s == 0.0) return v0.peak_value();
  return closed_form(t, s, v0).V;
}

template <class Datum>
double linear_W(double t, double s, const Datum& v0) {
  if (s == 0.0) {
    return 0.5 * (linear_W_limit_plus(t, v0.peak_value(), v0.slope_right()) +
                  linear_W_limit_minus(t, v0.peak_value(), v0.slope_left()));
  }
  return closed_form(t, s, v0).W;
}

double linear_W_limit_plus(double t, double v0_peak, double v0_slope_right) {
  return v0_peak * std::expm1(t) + v0_slope_right * std::exp(t);
}

double linear_W_limit_minus(double t, double v0_peak, double v0_slope_left) {
  return -v0_peak * std::expm1(-t) + v0_slope_left * std::exp(-t);
}

template <class Datum>
PeakedFunction linear_solution_field(double t, const Datum& v0, std::span<const double> grid) {
  if (grid.size() < 2) fail(ErrorKind::InvalidGrid, "linear_solution_field: grid too small");
  const auto labels = t == 0.0 ? std::vector<double>(grid.begin(), grid.end()) : merge_labels(t, grid);
  std::vector<double> x, v, vx;
  x.reserve(labels.size()), v.reserve(labels.size()), vx.reserve(labels.size());
  for (double s : labels) {
    const double q = t == 0.0 ? s : char_position(t, s);
    if (!x.empty() && !(q > x.back())) continue;
    const auto c = closed_form(t, s, v0);
    x.push_back(q);
    v.push_back(t == 0.0 ? v0.value(s) : c.V);
    vx.push_back(t == 0.0 ? v0.slope(s) : c.W);
  }
  const double p = v0.peak_value();
  return PeakedFunction::derived(std::move(x), std::move(v), std::move(vx), p,
                                 linear_W_limit_plus(t, p, v0.slope_right()),
                                 linear_W_limit_minus(t, p, v0.slope_left()));
}

PeakedFunction linear_solution_field(double t, const PeakedFunction& v0) {
  return linear_solution_field(t, v0, v0.coords());
}

PeakedFunction linear_ode_crosscheck(const PeakedFunction& v0, double t_end, double dt) {
  if (!(dt > 0.0) || dt > 0.1) fail(ErrorKind::StepSize, "linear_ode_crosscheck: dt must lie in (0, 0.1]");
  if (!std::isfinite(t_end)) fail(ErrorKind::InvalidArgument, "linear_ode_crosscheck: t_end must be finite");
  // labels: grid nodes, then the two one-sided peak labels
  const auto s = v0.coords();
  const std::size_t n = s.size() + 2;
  std::vector<double> sign(n), y(4 * n);
  for (std::size_t i = 0; i < s.size(); ++i) {
    sign[i] = s[i] > 0.0 ? 1.0 : -1.0;
    y[4 * i] = s[i];
    y[4 * i + 1] = v0.values()[i];
    y[4 * i + 2] = v0.slopes()[i];
    y[4 * i + 3] = 0.0;
  }
  const std::size_t pr = s.size(), pl = s.size() + 1;
  sign[pr] = 1.0;
  sign[pl] = -1.0;
  for (std::size_t k : {pr, pl}) {
    y[4 * k] = 0.0;
    y[4 * k + 1] = v0.peak_value();
    y[4 * k + 2] = k == pr ? v0.slope_right() : v0.slope_left();
    y[4 * k + 3] = 0.0;
  }
  const double v_peak = v0.peak_value();
  auto rhs = [&](const std::vector<double>& z, std::vector<double>& dz) {
    for (std::size_t i = 0; i < n; ++i) {
      const double q = z[4 * i], V = z[4 * i + 1], Vs = z[4 * i + 2], qs = std::exp(z[4 * i + 3]);
      const double f = std::exp(-std::abs(q));
      const double fx = -sign[i] * f;  // sign(q) = sign(s) along the flow
      dz[4 * i] = f * f - 1.0;
      dz[4 * i + 1] = fx * (f * V - v_peak);
      dz[4 * i + 2] = (f * (f * V - v_peak) + f * f * V) * qs + fx * f * Vs;
      dz[4 * i + 3] = 2.0 * f * fx;
    }
  };
  const auto steps = static_cast<long>(std::ceil(std::abs(t_end) / dt - 1e-9));
  Rk4 rk;
  if (steps > 0) {
    const double h = t_end / double(steps);
    for (long k = 0; k < steps; ++k) rk.step(y, h, rhs);
  }
  std::vector<double> x(s.size()), v(s.size()), vx(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    x[i] = y[4 * i];
    v[i] = y[4 * i + 1];
    vx[i] = y[4 * i + 2] / std::exp(y[4 * i + 3]);
  }
  const double w_plus = y[4 * pr + 2] / std::exp(y[4 * pr + 3]);
  const double w_minus = y[4 * pl + 2] / std::exp(y[4 * pl + 3]);
  return PeakedFunction::derived(std::move(x), std::move(v), std::move(vx), v_peak, w_plus, w_minus);
}

double growth_lower_bound(double t, double v0_peak, double v0_slope_right) {
  return std::abs(v0_peak + v0_slope_right) * std::exp(t) - std::abs(v0_peak);
}

template <class Datum>
double h1_char_side(double t, const Datum& v0, std::span<const double> grid, Side side) {
  const auto s_nodes = merge_labels(t, grid);
  const double p = v0.peak_value();
  std::vector<double> s{0.0}, g;
  const double w0 = side == Side::Plus ? linear_W_limit_plus(t, p, v0.slope_right())
                                       : linear_W_limit_minus(t, p, v0.slope_left());
  g.push_back((p * p + w0 * w0) * std::exp(side == Side::Plus ? -2.0 * t : 2.0 * t));
  auto add = [&](double si) {
    const auto c = closed_form(t, si, v0);
    s.push_back(si);
    g.push_back((c.V * c.V + c.W * c.W) * char_jacobian(t, si));
  };
  if (side == Side::Plus) {
    for (double si : s_nodes) if (si > 0.0) add(si);
  } else {
    for (auto it = s_nodes.crbegin(); it != s_nodes.crend(); ++it) if (*it < 0.0) add(*it);
  }
  double sum = 0.0;
  for (std::size_t i = 1; i < s.size(); ++i) sum += 0.5 * std::abs(s[i] - s[i - 1]) * (g[i] + g[i - 1]);
  return sum;
}

#define PEAKON_LINEAR_INSTANTIATE(D)                                                          \
  template double linear_V<D>(double, double, const D&);                                     \
  template double linear_W<D>(double, double, const D&);                                     \
  template PeakedFunction linear_solution_field<D>(double, const D&, std::span<const double>); \
  template double h1_char_side<D>(double, const D&, std::span<const double>, Side);

PEAKON_LINEAR_INSTANTIATE(InitialDatum)
PEAKON_LINEAR_INSTANTIATE(PeakedFunction)

#undef PEAKON_LINEAR_INSTANTIATE

}  // namespace peakon
