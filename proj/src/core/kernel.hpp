#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "core/gridfn.hpp"

namespace peakon {

/// Peakon of speed c and phase x0: sqrt(c) e^{-|x - x0|}.
struct PeakonParams {
  double c = 1.0;
  double x0 = 0.0;
};

double peakon_profile(const PeakonParams& p, double x);

/// Unit-speed peakon e^{-|x|} and its derivative (0 at the corner).
inline double phi(double x) { return std::exp(-std::abs(x)); }
inline double phi_x(double x) { return x > 0.0 ? -std::exp(-x) : (x < 0.0 ? std::exp(x) : 0.0); }

struct SampledField {
  std::vector<double> coords;
  std::vector<double> values;

  /// Throws InvalidGrid unless coords are strictly increasing and match values in length.
  void validate() const;
};

/// Prefix/suffix sums of the exponential kernel split
///   left[i]  = int_{c <= c_i} e^{-(p_i - p(c))} f(c) dc
///   right[i] = int_{c >= c_i} e^{-(p(c) - p_i)} f(c) dc
/// by the trapezoid rule in `measure`, in linear time. `positions` and
/// `measure` must be non-decreasing; a repeated entry models a jump of f.
struct SplitSums {
  std::vector<double> left;
  std::vector<double> right;
};

SplitSums exp_split_scan(std::span<const double> positions, std::span<const double> measure,
                         std::span<const double> f);

/// Trapezoid integral of f from the anchor outward: result is 0 at indices
/// `left_anchor` and `right_anchor`, accumulates to the right of right_anchor
/// and (with negative orientation) to the left of left_anchor.
std::vector<double> cumulative_from_anchor(std::span<const double> measure, std::span<const double> f,
                                           std::size_t left_anchor, std::size_t right_anchor);

inline constexpr double kDefaultDecayTol = 1e-6;
inline constexpr double kMinHalfWidth = 20.0;

/// (phi * f)(x_i) on the grid of f.
SampledField conv_phi(const SampledField& f, double decay_tol = kDefaultDecayTol);
/// (phi_x * f)(x_i) on the grid of f.
SampledField conv_phix(const SampledField& f, double decay_tol = kDefaultDecayTol);

/// A nonlocal term sampled on the nodes of a PeakedFunction plus its value at the peak.
struct NonlocalField {
  std::vector<double> values;
  double at_peak = 0.0;
};

/// Q[v] = 1/2 phi_x * (3/2 v v_x^2 + v^3) + 1/4 phi * v_x^3
NonlocalField q_functional(const PeakedFunction& v);
/// P[v] = 1/2 phi * (3/2 v v_x^2 + v^3) + 1/4 phi_x * v_x^3
NonlocalField p_functional(const PeakedFunction& v);

// Sup-norm residuals of the convolution identities that reduce the nonlocal
// terms of the perturbation equation to local form. phi is centred at 0.

/// 3/2 phi_x*(phi^2 v + 1/2 phi_x^2 v + phi phi_x v_x) + 3/4 phi*(phi_x^2 v_x) = 3 phi_x [v(0) - phi v]
double identity_residual_linear(const PeakedFunction& v);
/// phi_x*(phi f) + phi*(phi_x f) = -2 phi int_0^x f
/// (no phi weight inside the integral: f = 1 gives -2 x e^{-x} on both sides for x > 0)
double identity_residual_calc(const SampledField& f);
/// 1/2 phi_x*(3/2 phi v_x^2 + 3 phi_x v v_x + 3 phi v^2) + 3/4 phi*(phi_x v_x^2)
///   = -3/2 phi_x [v^2 - v(0)^2] - 3/2 phi int_0^x (v^2 + v_x^2)
double identity_residual_quadratic(const PeakedFunction& v);

}  // namespace peakon
