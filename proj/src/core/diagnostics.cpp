#include "core/diagnostics.hpp"

#include <cmath>
#include <ostream>

#include "core/errors.hpp"
#include "core/format.hpp"

namespace peakon {

void write_trajectory_row(std::ostream& out, const DiagnosticsRecord& r) {
  const double cols[] = {r.t,  r.E,       r.F,        r.h1_v, r.linf_vx_plus, r.linf_vx_minus,
                         r.V0, r.W0_plus, r.W0_minus, r.a,    r.qs_min,       r.pq0};
  bool first = true;
  for (double c : cols) {
    if (!first) out << ',';
    out << fmt17(c);
    first = false;
  }
  out << '\n';
}

void write_trajectory(std::ostream& out, const std::vector<DiagnosticsRecord>& traj) {
  out << kTrajectoryHeader << '\n';
  for (const auto& r : traj) write_trajectory_row(out, r);
}

void RiccatiComparison::validate() const {
  if (!(eps > 0.0 && eps < 1.0 / 12.0)) fail(ErrorKind::InvalidArgument, "Riccati comparison needs 0 < eps < 1/12");
  if (!std::isfinite(y0)) fail(ErrorKind::InvalidArgument, "Riccati comparison needs a finite y0");
}

double riccati_threshold(double eps) {
  const RiccatiComparison r{eps, 0.0};
  r.validate();
  return 1.0 - std::sqrt(r.b_coef() / r.a_coef());
}

double riccati_blowup_time(const RiccatiComparison& r) {
  r.validate();
  const double a = r.a_coef(), b = r.b_coef();
  const double root = std::sqrt(b / a);
  const double z0 = r.y0 - 1.0;
  if (!(z0 < -root)) return kInfiniteTime;
  // z' = -a (z^2 - root^2) separates; z reaches -inf when (z - root)/(z + root) -> 1
  return std::log((-z0 + root) / (-z0 - root)) / (2.0 * a * root);
}

BlowupConsistency check_blowup_consistency(double T_num, const RiccatiComparison& r, double rel_tol) {
  BlowupConsistency c;
  c.T_num = T_num;
  c.T_riccati = riccati_blowup_time(r);
  if (std::isinf(c.T_riccati)) {
    c.pass = true;
    c.message = std::isinf(T_num) ? "no blow-up in either solution" : "solver broke down; comparison gives no bound";
    return c;
  }
  c.pass = T_num <= c.T_riccati * (1.0 + rel_tol);
  c.message = (c.pass ? "T_num within comparison bound: " : "T_num exceeds comparison bound: ") + fmt17(T_num) +
              " vs " + fmt17(c.T_riccati);
  return c;
}

RateFit fit_log_linear(const std::vector<double>& t, const std::vector<double>& y) {
  RateFit f;
  f.samples = t.size();
  if (t.size() != y.size() || t.size() < 3) {
    fail(ErrorKind::InvalidArgument, "fit_log_linear: need at least 3 paired samples");
  }
  const double n = double(t.size());
  double st = 0, sl = 0;
  std::vector<double> l(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    l[i] = std::log(std::abs(y[i]));
    st += t[i];
    sl += l[i];
  }
  const double mt = st / n, ml = sl / n;
  double stt = 0, stl = 0, sll = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    stt += (t[i] - mt) * (t[i] - mt);
    stl += (t[i] - mt) * (l[i] - ml);
    sll += (l[i] - ml) * (l[i] - ml);
  }
  if (!(stt > 0.0)) fail(ErrorKind::InvalidArgument, "fit_log_linear: all samples at the same time");
  f.rate = stl / stt;
  f.r2 = sll > 0.0 ? stl * stl / (stt * sll) : 1.0;
  return f;
}

RateFit fit_exponential_rate(const std::vector<DiagnosticsRecord>& traj, double lo, double hi) {
  std::vector<double> t, y;
  for (const auto& r : traj) {
    const double g = std::abs(r.V0 + r.W0_plus);
    if (g >= lo && g <= hi) {
      t.push_back(r.t);
      y.push_back(g);
    }
  }
  return fit_log_linear(t, y);
}

double instability_time_estimate(double eps, double c_const) {
  const double ce2 = c_const * eps * eps;
  if (!(ce2 > 0.0 && ce2 < 2.0)) fail(ErrorKind::InvalidArgument, "instability_time_estimate needs 0 < C eps^2 < 2");
  return std::log(2.0 / ce2);
}

const char* to_string(AuditStatus s) noexcept {
  switch (s) {
    case AuditStatus::Pass: return "pass";
    case AuditStatus::Fail: return "fail";
    case AuditStatus::Skipped: return "skipped";
  }
  return "unknown";
}

double pq_bound(double eps, double u0x_linf, double c0) {
  return c0 * eps * eps * (1.0 + std::pow(u0x_linf, 1.5) + eps * u0x_linf * u0x_linf);
}

AuditStatus audit_pq_bound(const DiagnosticsRecord& r, double eps, double u0x_linf, double c0, double eps_max) {
  if (!(eps > 0.0) || eps > eps_max) return AuditStatus::Skipped;
  return std::abs(r.pq0) <= pq_bound(eps, u0x_linf, c0) ? AuditStatus::Pass : AuditStatus::Fail;
}

AuditStatus audit_orbital_bound(const std::vector<DiagnosticsRecord>& traj, double eps, double u0x_linf) {
  if (traj.empty() || !(eps > 0.0)) return AuditStatus::Skipped;
  if (!(traj.front().h1_v < eps * eps * eps * eps)) return AuditStatus::Skipped;
  const double bound = 2.0 * (4.0 + std::sqrt(u0x_linf)) * eps;
  for (const auto& r : traj) {
    if (!(r.h1_v < bound)) return AuditStatus::Fail;
  }
  return AuditStatus::Pass;
}

void write_report(std::ostream& out, const Report& r) {
  auto line = [&out](const char* key, const std::optional<double>& v) {
    out << key << " = " << (v ? fmt17(*v) : std::string("na")) << '\n';
  };
  line("rate", r.rate);
  line("r2", r.r2);
  line("t0_estimate", r.t0_estimate);
  line("T_num", r.T_num);
  line("T_riccati", r.T_riccati);
  line("pq_max", r.pq_max);
  line("E_drift", r.E_drift);
  line("F_drift", r.F_drift);
}

namespace {

template <class Get>
double drift(const std::vector<DiagnosticsRecord>& traj, Get get) {
  if (traj.empty()) return 0.0;
  const double ref = get(traj.front());
  const double scale = ref != 0.0 ? std::abs(ref) : 1.0;
  double m = 0.0;
  for (const auto& r : traj) m = std::max(m, std::abs(get(r) - ref) / scale);
  return m;
}

}  // namespace

double relative_drift_E(const std::vector<DiagnosticsRecord>& traj) {
  return drift(traj, [](const DiagnosticsRecord& r) { return r.E; });
}

double relative_drift_F(const std::vector<DiagnosticsRecord>& traj) {
  return drift(traj, [](const DiagnosticsRecord& r) { return r.F; });
}

}  // namespace peakon
