#include "core/characteristics.hpp"

#include <algorithm>
#include <cmath>

#include "core/errors.hpp"
#include "core/format.hpp"
#include "core/kernel.hpp"
#include "core/rk4.hpp"

namespace peakon {

namespace {

// Flat layout used by the integrator: q, V, W, qs (n each), then the scalars.
enum Scalar { kV0, kW0p, kW0m, kQs0p, kQs0m, kA, kScalars };

struct Layout {
  std::size_t n = 0;
  std::size_t fr = 0;  // first right node
  const double* q(const double* y) const { return y; }
  const double* V(const double* y) const { return y + n; }
  const double* W(const double* y) const { return y + 2 * n; }
  const double* qs(const double* y) const { return y + 3 * n; }
  double scalar(const double* y, Scalar k) const { return y[4 * n + k]; }
  std::size_t size() const { return 4 * n + kScalars; }
};

std::vector<double> pack(const CharacteristicEnsemble& e) {
  const std::size_t n = e.size();
  std::vector<double> y(4 * n + kScalars);
  std::copy(e.q.begin(), e.q.end(), y.begin());
  std::copy(e.V.begin(), e.V.end(), y.begin() + n);
  std::copy(e.W.begin(), e.W.end(), y.begin() + 2 * n);
  std::copy(e.qs.begin(), e.qs.end(), y.begin() + 3 * n);
  y[4 * n + kV0] = e.V0;
  y[4 * n + kW0p] = e.W0_plus;
  y[4 * n + kW0m] = e.W0_minus;
  y[4 * n + kQs0p] = e.qs0_plus;
  y[4 * n + kQs0m] = e.qs0_minus;
  y[4 * n + kA] = e.a;
  return y;
}

void unpack(const std::vector<double>& y, CharacteristicEnsemble& e) {
  const std::size_t n = e.size();
  std::copy(y.begin(), y.begin() + n, e.q.begin());
  std::copy(y.begin() + n, y.begin() + 2 * n, e.V.begin());
  std::copy(y.begin() + 2 * n, y.begin() + 3 * n, e.W.begin());
  std::copy(y.begin() + 3 * n, y.begin() + 4 * n, e.qs.begin());
  e.V0 = y[4 * n + kV0];
  e.W0_plus = y[4 * n + kW0p];
  e.W0_minus = y[4 * n + kW0m];
  e.qs0_plus = y[4 * n + kQs0p];
  e.qs0_minus = y[4 * n + kQs0m];
  e.a = y[4 * n + kA];
}

// Reused buffers for the nonlocal quadrature on the label axis with the peak
// inserted twice (left limit at fr, right limit at fr + 1).
struct Workspace {
  std::vector<double> s, q, dens, g, h;
};

NonlocalTerms nonlocal_flat(const Layout& L, std::span<const double> labels, const double* y, double floor,
                            Workspace& ws) {
  const std::size_t n = L.n, m = n + 2, fr = L.fr;
  const double *q = L.q(y), *V = L.V(y), *W = L.W(y), *qs = L.qs(y);
  const double V0 = L.scalar(y, kV0);
  const double qs0[2] = {L.scalar(y, kQs0m), L.scalar(y, kQs0p)};
  const double W0[2] = {L.scalar(y, kW0m), L.scalar(y, kW0p)};
  ws.s.resize(m), ws.q.resize(m), ws.dens.resize(m), ws.g.resize(m), ws.h.resize(m);
  auto put = [&](std::size_t k, double s, double qq, double v, double w, double j) {
    ws.s[k] = s;
    ws.q[k] = qq;
    ws.dens[k] = (v * v + w * w) * j;
    ws.g[k] = (1.5 * v * w * w + v * v * v) * j;
    ws.h[k] = w * w * w * j;
  };
  for (std::size_t i = 0; i < n; ++i) {
    if (!(qs[i] > floor)) {
      fail(ErrorKind::JacobianDegenerate, "q_s fell to " + fmt17(qs[i]) + " at label " + fmt17(labels[i]));
    }
    put(i < fr ? i : i + 2, labels[i], q[i], V[i], W[i], qs[i]);
  }
  for (int side = 0; side < 2; ++side) {
    if (!(qs0[side] > floor)) fail(ErrorKind::JacobianDegenerate, "peak q_s fell to " + fmt17(qs0[side]));
    put(fr + side, 0.0, 0.0, V0, W0[side], qs0[side]);
  }
  for (std::size_t k = 1; k < m; ++k) {
    if (ws.q[k] < ws.q[k - 1]) fail(ErrorKind::JacobianDegenerate, "characteristics crossed");
  }
  NonlocalTerms out;
  const auto I = cumulative_from_anchor(ws.s, ws.dens, fr, fr + 1);
  const auto sg = exp_split_scan(ws.q, ws.s, ws.g);
  const auto sh = exp_split_scan(ws.q, ws.s, ws.h);
  out.I.resize(n), out.Q.resize(n), out.P.resize(n);
  auto Qat = [&](std::size_t k) {
    return 0.5 * (sg.right[k] - sg.left[k]) + 0.25 * (sh.left[k] + sh.right[k]);
  };
  auto Pat = [&](std::size_t k) {
    return 0.5 * (sg.left[k] + sg.right[k]) + 0.25 * (sh.right[k] - sh.left[k]);
  };
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t k = i < fr ? i : i + 2;
    out.I[i] = I[k];
    out.Q[i] = Qat(k);
    out.P[i] = Pat(k);
  }
  out.Q0 = Qat(fr);
  out.P0 = Pat(fr);
  return out;
}

void rhs_flat(const Layout& L, std::span<const double> labels, const double* y, double* dy, Workspace& ws) {
  const std::size_t n = L.n;
  const auto nl = nonlocal_flat(L, labels, y, 0.0, ws);
  const double *q = L.q(y), *V = L.V(y), *W = L.W(y), *qs = L.qs(y);
  const double V0 = L.scalar(y, kV0);
  const double c = 1.0 + V0;
  for (std::size_t i = 0; i < n; ++i) {
    const double f = std::exp(-std::abs(q[i]));
    const double fx = i < L.fr ? f : -f;  // sign(q) = sign(s)
    const double v = V[i], w = W[i];
    const double dv2 = v * v - V0 * V0;
    dy[i] = (f + v) * (f + v) - c * c;
    dy[n + i] = fx * (f * v - V0) + 0.5 * fx * dv2 + 1.5 * f * nl.I[i] - nl.Q[i];
    dy[2 * n + i] = f * (f * v - V0) + 0.5 * f * dv2 - f * fx * w + f * f * v - fx * v * w - 2.0 * f * w * w -
                    0.5 * v * w * w + v * v * v + 1.5 * f * (v * v + w * w) + 1.5 * fx * nl.I[i] - nl.P[i];
    dy[3 * n + i] = 2.0 * (f + v) * (fx + w) * qs[i];
  }
  const double peak_common = V0 + 1.5 * V0 * V0 + V0 * V0 * V0 - nl.P0;
  const double wp = L.scalar(y, kW0p), wm = L.scalar(y, kW0m);
  dy[4 * n + kV0] = -nl.Q0;
  dy[4 * n + kW0p] = c * wp - 0.5 * c * wp * wp + peak_common;
  dy[4 * n + kW0m] = -c * wm - 0.5 * c * wm * wm + peak_common;
  dy[4 * n + kQs0p] = 2.0 * c * (-1.0 + wp) * L.scalar(y, kQs0p);
  dy[4 * n + kQs0m] = 2.0 * c * (1.0 + wm) * L.scalar(y, kQs0m);
  dy[4 * n + kA] = c * c;
}

Layout layout_of(const CharacteristicEnsemble& e) {
  const std::size_t n = e.size();
  if (e.q.size() != n || e.V.size() != n || e.W.size() != n || e.qs.size() != n) {
    fail(ErrorKind::InvalidArgument, "ensemble field lengths differ");
  }
  if (e.first_right == 0 || e.first_right >= n) fail(ErrorKind::InvalidGrid, "ensemble needs labels on both sides");
  return Layout{n, e.first_right};
}

}  // namespace

CharacteristicEnsemble init_ensemble(const PeakedFunction& v0) {
  if (v0.peak_position() != 0.0) fail(ErrorKind::InvalidArgument, "init_ensemble: datum peak must sit at 0");
  CharacteristicEnsemble e;
  e.s.assign(v0.coords().begin(), v0.coords().end());
  e.first_right = v0.first_right();
  e.q = e.s;
  e.V.assign(v0.values().begin(), v0.values().end());
  e.W.assign(v0.slopes().begin(), v0.slopes().end());
  e.qs.assign(e.s.size(), 1.0);
  e.V0 = v0.peak_value();
  e.W0_plus = v0.slope_right();
  e.W0_minus = v0.slope_left();
  return e;
}

NonlocalTerms nonlocal_terms(const CharacteristicEnsemble& e, double jacobian_floor) {
  const Layout L = layout_of(e);
  const auto y = pack(e);
  Workspace ws;
  return nonlocal_flat(L, e.s, y.data(), jacobian_floor, ws);
}

CharacteristicEnsemble vector_field(const CharacteristicEnsemble& e) {
  const Layout L = layout_of(e);
  const auto y = pack(e);
  std::vector<double> dy(y.size());
  Workspace ws;
  rhs_flat(L, e.s, y.data(), dy.data(), ws);
  CharacteristicEnsemble d = e;
  unpack(dy, d);
  d.t = 1.0;
  return d;
}

const char* to_string(StepStatus s) noexcept {
  switch (s) {
    case StepStatus::Ok: return "ok";
    case StepStatus::BreakdownBlowup: return "breakdown_blowup";
    case StepStatus::BreakdownJacobian: return "breakdown_jacobian";
  }
  return "unknown";
}

namespace {

// Classify a freshly computed state. Non-finite values count as slope blow-up:
// they only arise once W has outrun the step size.
StepOutcome classify(const Layout& L, const std::vector<double>& y, const Thresholds& th) {
  StepOutcome out;
  for (double v : y) {
    if (!std::isfinite(v)) {
      out.status = StepStatus::BreakdownBlowup;
      out.detail = "non-finite state";
      return out;
    }
  }
  const double* W = L.W(y.data());
  double wmax = std::max(std::abs(L.scalar(y.data(), kW0p)), std::abs(L.scalar(y.data(), kW0m)));
  for (std::size_t i = 0; i < L.n; ++i) wmax = std::max(wmax, std::abs(W[i]));
  if (wmax > th.slope_blowup) {
    out.status = StepStatus::BreakdownBlowup;
    out.detail = "max |W| = " + fmt17(wmax) + " above " + fmt17(th.slope_blowup);
    return out;
  }
  const double* qs = L.qs(y.data());
  double qmin = std::min(L.scalar(y.data(), kQs0p), L.scalar(y.data(), kQs0m));
  for (std::size_t i = 0; i < L.n; ++i) qmin = std::min(qmin, qs[i]);
  if (qmin < th.jacobian) {
    out.status = StepStatus::BreakdownJacobian;
    out.detail = "min q_s = " + fmt17(qmin) + " below " + fmt17(th.jacobian);
  }
  return out;
}

double max_slope(const CharacteristicEnsemble& e) {
  double m = std::max(std::abs(e.W0_plus), std::abs(e.W0_minus));
  for (double w : e.W) m = std::max(m, std::abs(w));
  return m;
}

struct Stepper {
  Layout L;
  Workspace ws;
  Rk4 rk;

  StepOutcome step(CharacteristicEnsemble& e, double dt, const Thresholds& th) {
    auto y = pack(e);
    StepOutcome out;
    try {
      rk.step(y, dt, [&](const std::vector<double>& z, std::vector<double>& dz) {
        rhs_flat(L, e.s, z.data(), dz.data(), ws);
      });
      out = classify(L, y, th);
    } catch (const Error& err) {
      if (err.kind() != ErrorKind::JacobianDegenerate) throw;
      out.status = StepStatus::BreakdownJacobian;
      out.detail = std::string("stage failure: ") + err.what();
    }
    if (out.status == StepStatus::Ok) {
      unpack(y, e);
      e.t += dt;
      return out;
    }
    // q_s collapses only through W -> -inf. If the slope was already beyond
    // what this step size resolves, report the collapse as slope blow-up.
    const double wdt = max_slope(e) * dt;
    if (out.status == StepStatus::BreakdownJacobian && wdt >= th.unresolved_slope_dt) {
      out.status = StepStatus::BreakdownBlowup;
      out.detail = "slope outran the step (max|W| dt = " + fmt17(wdt) + "); " + out.detail;
    }
    out.time = e.t + 0.5 * dt;
    return out;
  }
};

}  // namespace

StepOutcome step_rk4(CharacteristicEnsemble& e, double dt, const Thresholds& th) {
  if (!(dt > 0.0) || !std::isfinite(dt)) fail(ErrorKind::StepSize, "step_rk4: dt must be positive");
  Stepper st{layout_of(e), {}, {}};
  return st.step(e, dt, th);
}

PeakedFunction perturbation(const CharacteristicEnsemble& e) {
  return PeakedFunction::derived(e.q, e.V, e.W, e.V0, e.W0_plus, e.W0_minus);
}

namespace {

// u in the frame moving with the peak, i.e. reconstruct() shifted by -a.
PeakedFunction solution_at(const CharacteristicEnsemble& e, double shift) {
  const std::size_t n = e.size();
  std::vector<double> x(n), u(n), ux(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double f = std::exp(-std::abs(e.q[i]));
    x[i] = e.q[i] + shift;
    u[i] = f + e.V[i];
    ux[i] = (i < e.first_right ? f : -f) + e.W[i];
  }
  return PeakedFunction::derived(std::move(x), std::move(u), std::move(ux), 1.0 + e.V0, -1.0 + e.W0_plus,
                                 1.0 + e.W0_minus, shift);
}

}  // namespace

PeakedFunction reconstruct(const CharacteristicEnsemble& e) { return solution_at(e, e.a); }

DiagnosticsRecord make_record(const CharacteristicEnsemble& e) {
  DiagnosticsRecord r;
  r.t = e.t;
  // E and F are translation invariant; near breakdown q + a can lose the
  // resolution of the innermost nodes, so they are taken in the peak frame.
  const auto u = solution_at(e, 0.0);
  r.E = energy_E(u);
  r.F = energy_F(u);
  const auto v = perturbation(e);
  r.h1_v = h1_norm(v);
  r.linf_vx_plus = linf_slope(v, Side::Plus);
  r.linf_vx_minus = linf_slope(v, Side::Minus);
  r.V0 = e.V0;
  r.W0_plus = e.W0_plus;
  r.W0_minus = e.W0_minus;
  r.a = e.a;
  r.qs_min = std::min(e.qs0_plus, e.qs0_minus);
  for (double j : e.qs) r.qs_min = std::min(r.qs_min, j);
  const auto nl = nonlocal_terms(e);
  r.pq0 = nl.P0 + nl.Q0;
  return r;
}

EvolveResult evolve(CharacteristicEnsemble& e, double t_end, double dt, const EvolveOptions& opt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) fail(ErrorKind::StepSize, "evolve: dt must be positive");
  if (!(opt.record_interval > 0.0)) fail(ErrorKind::InvalidArgument, "evolve: record_interval must be positive");
  EvolveResult res;
  Stepper st{layout_of(e), {}, {}};
  auto record = [&] {
    res.trajectory.push_back(make_record(e));
    if (opt.on_record) opt.on_record(e);
  };
  record();
  const double t0 = e.t;
  const auto steps = static_cast<long>(std::ceil((t_end - t0) / dt - 1e-9));
  const long every = std::max(1L, std::lround(opt.record_interval / dt));
  for (long k = 1; k <= steps; ++k) {
    // land exactly on t_end; intermediate times are t0 + k dt
    const double target = k == steps ? t_end : t0 + double(k) * dt;
    const double h = target - e.t;
    auto out = st.step(e, h, opt.thresholds);
    if (out.status != StepStatus::Ok) {
      if (res.trajectory.back().t != e.t) record();
      res.outcome = out;
      return res;
    }
    e.t = target;
    if (k % every == 0 || k == steps) record();
  }
  res.outcome.time = e.t;
  return res;
}

}  // namespace peakon
