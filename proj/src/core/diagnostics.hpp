#pragma once

#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace peakon {

/// One time sample of a nonlinear run.
struct DiagnosticsRecord {
  double t = 0.0;
  double E = 0.0;
  double F = 0.0;
  double h1_v = 0.0;
  double linf_vx_plus = 0.0;
  double linf_vx_minus = 0.0;
  double V0 = 0.0;
  double W0_plus = 0.0;
  double W0_minus = 0.0;
  double a = 0.0;
  double qs_min = 1.0;
  double pq0 = 0.0;

  /// ||u_x - phi_x(. - a)||_inf, i.e. the sup of |v_x| over both half-lines.
  double slope_deviation() const { return linf_vx_plus > linf_vx_minus ? linf_vx_plus : linf_vx_minus; }
};

inline constexpr const char* kTrajectoryHeader = "t,E,F,H1_v,Linf_vx_plus,Linf_vx_minus,V0,W0_plus,W0_minus,a,qs_min,PQ0";
void write_trajectory_row(std::ostream& out, const DiagnosticsRecord& r);
void write_trajectory(std::ostream& out, const std::vector<DiagnosticsRecord>& traj);

/// Comparison equation y' = -a (y - 1)^2 + b with a = (1 - 12 eps)/2, b = 1/2 + 20 eps.
struct RiccatiComparison {
  double eps = 0.0;
  double y0 = 0.0;

  /// Throws InvalidArgument unless 0 < eps < 1/12.
  void validate() const;
  double a_coef() const { return 0.5 * (1.0 - 12.0 * eps); }
  double b_coef() const { return 0.5 + 20.0 * eps; }
};

inline constexpr double kInfiniteTime = std::numeric_limits<double>::infinity();

/// 1 - sqrt(b/a): finite-time blow-up of the comparison solution iff y0 is below it.
double riccati_threshold(double eps);
/// Closed-form blow-up time, +inf when y0 >= threshold.
double riccati_blowup_time(const RiccatiComparison& r);

struct BlowupConsistency {
  bool pass = false;
  double T_num = kInfiniteTime;
  double T_riccati = kInfiniteTime;
  std::string message;
};

/// T_num <= T_riccati (1 + rel_tol). Two infinite times are consistent.
BlowupConsistency check_blowup_consistency(double T_num, const RiccatiComparison& r, double rel_tol = 0.1);

struct RateFit {
  double rate = 0.0;
  double r2 = 0.0;
  std::size_t samples = 0;
};

/// Least squares slope of log|V0 + W0_plus| against t over the records where
/// |V0 + W0_plus| lies in [lo, hi]. Needs at least 3 samples.
RateFit fit_exponential_rate(const std::vector<DiagnosticsRecord>& traj, double lo, double hi);
/// Plain least-squares fit of log|y| against t.
RateFit fit_log_linear(const std::vector<double>& t, const std::vector<double>& y);

/// log(2 / (C eps^2)); requires C eps^2 < 2.
double instability_time_estimate(double eps, double c_const);

enum class AuditStatus { Pass, Fail, Skipped };
const char* to_string(AuditStatus s) noexcept;

/// |pq0| <= C0 eps^2 (1 + u0x^{3/2} + eps u0x^2). Skipped when eps > eps_max
/// (outside the small-data regime the bound is not claimed).
AuditStatus audit_pq_bound(const DiagnosticsRecord& r, double eps, double u0x_linf, double c0,
                           double eps_max = 0.1);
double pq_bound(double eps, double u0x_linf, double c0);

/// ||v(t)||_H1 < 2 (4 + sqrt(u0x_linf)) eps whenever ||v0||_H1 < eps^4.
/// Skipped if the hypothesis fails.
AuditStatus audit_orbital_bound(const std::vector<DiagnosticsRecord>& traj, double eps, double u0x_linf);

/// Flat report block.
struct Report {
  std::optional<double> rate, r2, t0_estimate, T_num, T_riccati, pq_max, E_drift, F_drift;
};
void write_report(std::ostream& out, const Report& r);

/// max |E(t) - E(0)| / |E(0)| over the trajectory (absolute if E(0) = 0).
double relative_drift_E(const std::vector<DiagnosticsRecord>& traj);
double relative_drift_F(const std::vector<DiagnosticsRecord>& traj);

}  // namespace peakon
