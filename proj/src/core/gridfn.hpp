#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace peakon {

enum class Side { Minus, Plus };

/// Symmetric grid excluding 0: N nodes per side, spacing growing geometrically
/// by `ratio` away from 0, outermost node at exactly +/-L.
std::vector<double> make_grid(double half_width, int nodes_per_side, double ratio);

/// The grid obtained by halving every spacing of make_grid(L, N, ratio).
std::vector<double> refine_grid(double half_width, int nodes_per_side, double ratio);

/// Construction audits applied by PeakedFunction::make.
struct PeakedChecks {
  bool continuity = true;
  double continuity_tol = 1e-3;  // relative to 1 + |peak value|
  bool tail = true;
  double tail_tol = 1e-8;  // H^1 mass beyond half the grid extent, relative
};

/// Sampled single-peaked function: C^1 on each side of the peak, continuous
/// across it, with the one-sided slope limits stored explicitly.
class PeakedFunction {
 public:
  using Checks = PeakedChecks;

  static PeakedFunction make(std::vector<double> coords, std::vector<double> values,
                             std::vector<double> slopes, double peak_value, double slope_right,
                             double slope_left, double peak_position = 0.0,
                             const Checks& checks = Checks{});

  /// Same structural checks as make() but no continuity or tail audit. Used for
  /// solver output, whose continuity is carried by the ODE state itself.
  static PeakedFunction derived(std::vector<double> coords, std::vector<double> values,
                                std::vector<double> slopes, double peak_value, double slope_right,
                                double slope_left, double peak_position = 0.0);

  std::span<const double> coords() const { return coords_; }
  std::span<const double> values() const { return values_; }
  std::span<const double> slopes() const { return slopes_; }
  double peak_value() const { return peak_value_; }
  double slope_right() const { return slope_right_; }
  double slope_left() const { return slope_left_; }
  double peak_position() const { return peak_position_; }
  std::size_t size() const { return coords_.size(); }
  /// Index of the first node to the right of the peak.
  std::size_t first_right() const { return first_right_; }

  /// Piecewise-linear interpolation with the peak as a breakpoint; clamps outside the grid.
  double value(double x) const;
  /// Piecewise-linear interpolation of the slope samples on the side of x.
  double slope(double x) const;

  PeakedFunction scaled(double factor) const;

 private:
  PeakedFunction() = default;
  void check_structure() const;

  std::vector<double> coords_;
  std::vector<double> values_;
  std::vector<double> slopes_;
  double peak_value_ = 0.0;
  double slope_right_ = 0.0;
  double slope_left_ = 0.0;
  double peak_position_ = 0.0;
  std::size_t first_right_ = 0;
};

enum class DatumFamily { Zero, ScaledPeakon, PeakedExponential, Gaussian };

const char* to_string(DatumFamily family) noexcept;
DatumFamily datum_family_from_string(const std::string& name);

struct InitialDatumSpec {
  DatumFamily family = DatumFamily::Zero;
  double amplitude = 0.0;  // A
  double beta = 1.0;
  double slope_right = 0.0;
  double slope_left = 0.0;
  double sigma = 1.0;
  double center = 0.0;
};

/// Analytic perturbation v0: a scaled sum of InitialDatumSpec terms.
class InitialDatum {
 public:
  InitialDatum() = default;
  explicit InitialDatum(InitialDatumSpec spec);
  explicit InitialDatum(std::vector<InitialDatumSpec> terms, double scale = 1.0);

  double value(double x) const;
  /// One-sided derivative: right slope for x > 0, left for x < 0, their mean at 0.
  double slope(double x) const;
  double peak_value() const;
  double slope_right() const;
  double slope_left() const;

  InitialDatum scaled(double factor) const { return InitialDatum(terms_, scale_ * factor); }
  const std::vector<InitialDatumSpec>& terms() const { return terms_; }

 private:
  std::vector<InitialDatumSpec> terms_;
  double scale_ = 1.0;
};

/// Deterministic pseudo-random peaked datum (a peaked exponential plus a
/// Gaussian bump) used by the randomized identity suites.
InitialDatum random_peaked_datum(std::uint64_t seed);

PeakedFunction sample(const InitialDatum& datum, std::span<const double> coords,
                      const PeakedFunction::Checks& checks = PeakedFunction::Checks{});

double h1_norm_halfline(const PeakedFunction& v, Side side);
double h1_norm(const PeakedFunction& v);
double energy_E(const PeakedFunction& u);
double energy_F(const PeakedFunction& u);
/// Integral of |v_x|^p over the line.
double slope_power_integral(const PeakedFunction& v, double p);
double linf_value(const PeakedFunction& v);
double linf_slope(const PeakedFunction& v, Side side);
double w1inf_norm(const PeakedFunction& v);
inline double interpolate(const PeakedFunction& v, double x) { return v.value(x); }

/// Rescales the datum so its sampled H^1 norm on `coords` equals `target`.
InitialDatum normalize_h1(const InitialDatum& datum, std::span<const double> coords, double target);

// Snapshot files: "# t=<t>", a column header, then x,v,vx,side rows. The peak is
// written twice at its position, first with the left slope (side L) and then
// with the right slope (side R); ordinary rows carry side ".".
void write_snapshot(std::ostream& out, double t, const PeakedFunction& v);
std::pair<double, PeakedFunction> read_snapshot(std::istream& in);

}  // namespace peakon
