#include "core/kernel.hpp"

#include <algorithm>
#include <string>

#include "core/errors.hpp"

namespace peakon {

double peakon_profile(const PeakonParams& p, double x) {
  if (!(p.c > 0.0)) fail(ErrorKind::InvalidArgument, "peakon speed c must be positive");
  return std::sqrt(p.c) * std::exp(-std::abs(x - p.x0));
}

void SampledField::validate() const {
  if (coords.size() != values.size()) {
    fail(ErrorKind::InvalidGrid, "SampledField: coords and values differ in length");
  }
  for (std::size_t i = 1; i < coords.size(); ++i) {
    if (!(coords[i] > coords[i - 1])) {
      fail(ErrorKind::InvalidGrid, "SampledField: coords not strictly increasing at index " + std::to_string(i));
    }
  }
  for (double v : values) {
    if (!std::isfinite(v)) fail(ErrorKind::InvalidArgument, "SampledField: non-finite value");
  }
}

SplitSums exp_split_scan(std::span<const double> positions, std::span<const double> measure,
                         std::span<const double> f) {
  const std::size_t n = f.size();
  if (positions.size() != n || measure.size() != n) {
    fail(ErrorKind::InvalidGrid, "exp_split_scan: array lengths differ");
  }
  SplitSums out{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  if (n == 0) return out;
  // decay factors e^{-(p_{i+1} - p_i)} <= 1, so the recursion never overflows
  std::vector<double> decay(n > 1 ? n - 1 : 0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double dp = positions[i + 1] - positions[i];
    if (dp < 0.0 || measure[i + 1] < measure[i]) {
      fail(ErrorKind::InvalidGrid, "exp_split_scan: positions must be non-decreasing");
    }
    decay[i] = std::exp(-dp);
  }
  auto& left = out.left;
  for (std::size_t i = 1; i < n; ++i) {
    const double h = measure[i] - measure[i - 1];
    left[i] = decay[i - 1] * left[i - 1] + 0.5 * h * (decay[i - 1] * f[i - 1] + f[i]);
  }
  auto& right = out.right;
  for (std::size_t i = n - 1; i-- > 0;) {
    const double h = measure[i + 1] - measure[i];
    right[i] = decay[i] * right[i + 1] + 0.5 * h * (f[i] + decay[i] * f[i + 1]);
  }
  return out;
}

std::vector<double> cumulative_from_anchor(std::span<const double> measure, std::span<const double> f,
                                           std::size_t left_anchor, std::size_t right_anchor) {
  const std::size_t n = f.size();
  std::vector<double> out(n, 0.0);
  for (std::size_t k = right_anchor + 1; k < n; ++k) {
    out[k] = out[k - 1] + 0.5 * (measure[k] - measure[k - 1]) * (f[k - 1] + f[k]);
  }
  for (std::size_t k = left_anchor; k-- > 0;) {
    out[k] = out[k + 1] - 0.5 * (measure[k + 1] - measure[k]) * (f[k] + f[k + 1]);
  }
  return out;
}

namespace {

void check_decay(const SampledField& f, double decay_tol) {
  if (f.values.empty()) return;
  double scale = 1.0;
  for (double v : f.values) scale = std::max(scale, std::abs(v));
  if (std::abs(f.values.front()) > decay_tol * scale || std::abs(f.values.back()) > decay_tol * scale) {
    fail(ErrorKind::BoundaryDecay, "convolution input does not decay at the grid boundary");
  }
}

// PeakedFunction data with the peak inserted twice (left limit, right limit),
// in coordinates relative to the peak.
struct Augmented {
  std::vector<double> x, v, vx, phi, phix;
  std::size_t peak_left = 0;  // index of the left-limit copy; right copy follows

  std::size_t size() const { return x.size(); }
  // index in the augmented arrays of node i of the original function
  std::size_t map(std::size_t i) const { return i < peak_left ? i : i + 2; }
};

Augmented augment(const PeakedFunction& f) {
  Augmented a;
  const auto x = f.coords();
  const auto v = f.values();
  const auto vx = f.slopes();
  const std::size_t n = x.size() + 2;
  a.x.reserve(n), a.v.reserve(n), a.vx.reserve(n);
  const double p = f.peak_position();
  a.peak_left = f.first_right();
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i == f.first_right()) {
      a.x.insert(a.x.end(), {0.0, 0.0});
      a.v.insert(a.v.end(), {f.peak_value(), f.peak_value()});
      a.vx.insert(a.vx.end(), {f.slope_left(), f.slope_right()});
    }
    a.x.push_back(x[i] - p);
    a.v.push_back(v[i]);
    a.vx.push_back(vx[i]);
  }
  a.phi.resize(n);
  a.phix.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    a.phi[k] = phi(a.x[k]);
    a.phix[k] = phi_x(a.x[k]);
  }
  a.phix[a.peak_left] = 1.0;
  a.phix[a.peak_left + 1] = -1.0;
  return a;
}

void check_half_width(const PeakedFunction& f) {
  const double extent = std::min(f.peak_position() - f.coords().front(), f.coords().back() - f.peak_position());
  if (extent < kMinHalfWidth * (1.0 - 1e-12)) {
    fail(ErrorKind::InvalidGrid, "grid half-width must be at least 20 for kernel functionals");
  }
}

struct Convolutions {
  std::vector<double> with_phi, with_phix;
};

Convolutions convolve(const Augmented& a, std::span<const double> g) {
  const auto s = exp_split_scan(a.x, a.x, g);
  Convolutions c{std::vector<double>(g.size()), std::vector<double>(g.size())};
  for (std::size_t k = 0; k < g.size(); ++k) {
    c.with_phi[k] = s.left[k] + s.right[k];
    c.with_phix[k] = s.right[k] - s.left[k];
  }
  return c;
}

double sup_over_nodes(const Augmented& a, std::size_t original_size, const std::vector<double>& r) {
  double m = 0.0;
  for (std::size_t i = 0; i < original_size; ++i) m = std::max(m, std::abs(r[a.map(i)]));
  return m;
}

enum class Functional { Q, P };

NonlocalField nonlocal(const PeakedFunction& v, Functional which) {
  check_half_width(v);
  const Augmented a = augment(v);
  const std::size_t n = a.size();
  std::vector<double> g(n), h(n);
  for (std::size_t k = 0; k < n; ++k) {
    g[k] = 1.5 * a.v[k] * a.vx[k] * a.vx[k] + a.v[k] * a.v[k] * a.v[k];
    h[k] = a.vx[k] * a.vx[k] * a.vx[k];
  }
  const auto cg = convolve(a, g);
  const auto ch = convolve(a, h);
  std::vector<double> full(n);
  for (std::size_t k = 0; k < n; ++k) {
    full[k] = which == Functional::Q ? 0.5 * cg.with_phix[k] + 0.25 * ch.with_phi[k]
                                     : 0.5 * cg.with_phi[k] + 0.25 * ch.with_phix[k];
  }
  NonlocalField out;
  out.values.resize(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out.values[i] = full[a.map(i)];
  out.at_peak = full[a.peak_left];
  return out;
}

}  // namespace

SampledField conv_phi(const SampledField& f, double decay_tol) {
  f.validate();
  check_decay(f, decay_tol);
  const auto s = exp_split_scan(f.coords, f.coords, f.values);
  SampledField out{f.coords, std::vector<double>(f.values.size())};
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] = s.left[i] + s.right[i];
  return out;
}

SampledField conv_phix(const SampledField& f, double decay_tol) {
  f.validate();
  check_decay(f, decay_tol);
  const auto s = exp_split_scan(f.coords, f.coords, f.values);
  SampledField out{f.coords, std::vector<double>(f.values.size())};
  for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] = s.right[i] - s.left[i];
  return out;
}

NonlocalField q_functional(const PeakedFunction& v) { return nonlocal(v, Functional::Q); }
NonlocalField p_functional(const PeakedFunction& v) { return nonlocal(v, Functional::P); }

double identity_residual_linear(const PeakedFunction& v) {
  check_half_width(v);
  const Augmented a = augment(v);
  const std::size_t n = a.size();
  std::vector<double> g(n), h(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double p = a.phi[k], px = a.phix[k];
    g[k] = p * p * a.v[k] + 0.5 * px * px * a.v[k] + p * px * a.vx[k];
    h[k] = px * px * a.vx[k];
  }
  const auto cg = convolve(a, g);
  const auto ch = convolve(a, h);
  const double v0 = v.peak_value();
  std::vector<double> r(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double lhs = 1.5 * cg.with_phix[k] + 0.75 * ch.with_phi[k];
    const double rhs = 3.0 * a.phix[k] * (v0 - a.phi[k] * a.v[k]);
    r[k] = lhs - rhs;
  }
  return sup_over_nodes(a, v.size(), r);
}

double identity_residual_quadratic(const PeakedFunction& v) {
  check_half_width(v);
  const Augmented a = augment(v);
  const std::size_t n = a.size();
  std::vector<double> g(n), h(n), density(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double p = a.phi[k], px = a.phix[k], w = a.v[k], wx = a.vx[k];
    g[k] = 1.5 * p * wx * wx + 3.0 * px * w * wx + 3.0 * p * w * w;
    h[k] = px * wx * wx;
    density[k] = w * w + wx * wx;
  }
  const auto cg = convolve(a, g);
  const auto ch = convolve(a, h);
  const auto integral = cumulative_from_anchor(a.x, density, a.peak_left, a.peak_left + 1);
  const double v0 = v.peak_value();
  std::vector<double> r(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double lhs = 0.5 * cg.with_phix[k] + 0.75 * ch.with_phi[k];
    const double rhs = -1.5 * a.phix[k] * (a.v[k] * a.v[k] - v0 * v0) - 1.5 * a.phi[k] * integral[k];
    r[k] = lhs - rhs;
  }
  return sup_over_nodes(a, v.size(), r);
}

double identity_residual_calc(const SampledField& f) {
  f.validate();
  // Insert x = 0 twice (phi_x jumps there) with f(0) interpolated linearly.
  std::vector<double> x, y, px;
  std::size_t zero_left = 0;
  bool has_zero = false;
  const auto& c = f.coords;
  const auto& v = f.values;
  std::vector<std::size_t> original;  // augmented index of each original node
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (!has_zero && i > 0 && c[i - 1] < 0.0 && c[i] >= 0.0) {
      const double f0 = c[i] == 0.0 ? v[i] : v[i - 1] + (0.0 - c[i - 1]) / (c[i] - c[i - 1]) * (v[i] - v[i - 1]);
      zero_left = x.size();
      x.insert(x.end(), {0.0, 0.0});
      y.insert(y.end(), {f0, f0});
      px.insert(px.end(), {1.0, -1.0});
      has_zero = true;
      if (c[i] == 0.0) {
        original.push_back(zero_left);
        continue;
      }
    }
    original.push_back(x.size());
    x.push_back(c[i]);
    y.push_back(v[i]);
    px.push_back(phi_x(c[i]));
  }
  if (!has_zero) fail(ErrorKind::InvalidGrid, "identity_residual_calc: grid must straddle 0");
  const std::size_t n = x.size();
  std::vector<double> a(n), b(n), dens(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double p = phi(x[k]);
    a[k] = p * y[k];
    b[k] = px[k] * y[k];
    dens[k] = y[k];
  }
  const auto sa = exp_split_scan(x, x, a);
  const auto sb = exp_split_scan(x, x, b);
  const auto integral = cumulative_from_anchor(x, dens, zero_left, zero_left + 1);
  double m = 0.0;
  for (std::size_t idx : original) {
    const double lhs = (sa.right[idx] - sa.left[idx]) + (sb.left[idx] + sb.right[idx]);
    m = std::max(m, std::abs(lhs + 2.0 * phi(x[idx]) * integral[idx]));
  }
  return m;
}

}  // namespace peakon
