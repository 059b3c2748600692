#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "core/errors.hpp"
#include "core/gridfn.hpp"
#include "core/kernel.hpp"
#include "core/linear.hpp"

using namespace peakon;

namespace {

std::vector<double> default_grid() { return make_grid(25.0, 2000, 1.003); }

InitialDatum peakon_datum() { return InitialDatum(InitialDatumSpec{.family = DatumFamily::ScaledPeakon, .amplitude = 1.0}); }

InitialDatum mixed_datum() {
  InitialDatumSpec pe{.family = DatumFamily::PeakedExponential, .amplitude = 0.3, .beta = 1.5,
                      .slope_right = -0.8, .slope_left = 0.5};
  InitialDatumSpec g{.family = DatumFamily::Gaussian, .amplitude = -0.2, .sigma = 0.8, .center = -1.0};
  return InitialDatum({pe, g});
}

// Scalar RK4 for (q, V) along one characteristic, written out independently.
std::pair<double, double> integrate_char(double s, double v_s, double v_peak, double t, int steps) {
  auto f = [&](double q, double V, double& dq, double& dV) {
    const double p = std::exp(-std::abs(q));
    const double px = q > 0 ? -p : p;
    dq = p * p - 1.0;
    dV = px * (p * V - v_peak);
  };
  double q = s, V = v_s;
  const double h = t / steps;
  for (int k = 0; k < steps; ++k) {
    double a1, b1, a2, b2, a3, b3, a4, b4;
    f(q, V, a1, b1);
    f(q + 0.5 * h * a1, V + 0.5 * h * b1, a2, b2);
    f(q + 0.5 * h * a2, V + 0.5 * h * b2, a3, b3);
    f(q + h * a3, V + h * b3, a4, b4);
    q += h / 6 * (a1 + 2 * a2 + 2 * a3 + a4);
    V += h / 6 * (b1 + 2 * b2 + 2 * b3 + b4);
  }
  return {q, V};
}

}  // namespace

TEST(Characteristics, Position) {
  for (double t : {-2.0, 0.0, 0.7, 5.0}) EXPECT_EQ(char_position(t, 0.0), 0.0);
  for (double s : {-3.0, -1e-7, 1e-9, 0.5, 30.0}) EXPECT_NEAR(char_position(0.0, s), s, 1e-15 * std::max(1.0, std::abs(s)));
  EXPECT_NEAR(char_position(0.5 * std::log(3.0), std::log(2.0)), 0.5 * std::log(2.0), 1e-15);
}

TEST(Characteristics, InverseAndMonotone) {
  for (double t : {-2.0, 1.0, 5.0}) {
    double prev = -1e300;
    for (double s : default_grid()) {
      const double q = char_position(t, s);
      ASSERT_GT(q, prev);
      prev = q;
      ASSERT_NEAR(char_position(-t, q), s, 1e-9 * std::max(1.0, std::abs(s)));
      ASSERT_GT(char_jacobian(t, s), 0.0);
    }
  }
}

TEST(Characteristics, JacobianMatchesDifference) {
  for (double t : {-1.0, 0.3, 2.0}) {
    for (double s : {-4.0, -0.2, 0.01, 1.3, 6.0}) {
      const double h = 1e-6;
      const double fd = (char_position(t, s + h) - char_position(t, s - h)) / (2 * h);
      EXPECT_NEAR(char_jacobian(t, s), fd, 1e-7 * std::max(1.0, fd));
    }
  }
}

TEST(ClosedForm, ZeroDatum) {
  const InitialDatum zero;
  for (double s : {-2.0, 0.5}) {
    EXPECT_EQ(linear_V(1.0, s, zero), 0.0);
    EXPECT_EQ(linear_W(1.0, s, zero), 0.0);
  }
}

TEST(ClosedForm, AgainstScalarRk4) {
  const auto d = peakon_datum();
  const auto [q, V] = integrate_char(1.0, d.value(1.0), d.peak_value(), 1.0, 4000);
  EXPECT_NEAR(char_position(1.0, 1.0), q, 1e-12);
  EXPECT_NEAR(linear_V(1.0, 1.0, d), V, 1e-8);
  const auto m = mixed_datum();
  for (double s : {-2.5, -0.1, 0.2, 3.0}) {
    for (double t : {-1.5, 2.0}) {
      const auto [qq, VV] = integrate_char(s, m.value(s), m.peak_value(), t, 8000);
      EXPECT_NEAR(char_position(t, s), qq, 1e-10);
      EXPECT_NEAR(linear_V(t, s, m), VV, 1e-8) << s << " " << t;
    }
  }
}

TEST(ClosedForm, TimeResidual) {
  const auto m = mixed_datum();
  const double h = 1e-5;
  for (double t : {-2.0, 0.0, 1.0, 4.0}) {
    for (double s : {-3.0, -0.4, -1e-3, 2e-3, 0.6, 5.0}) {
      const double dVdt = (linear_V(t + h, s, m) - linear_V(t - h, s, m)) / (2 * h);
      const double q = char_position(t, s);
      const double p = phi(q), px = phi_x(q);
      const double rhs = px * (p * linear_V(t, s, m) - m.peak_value());
      EXPECT_NEAR(dVdt, rhs, 1e-8 * std::max(1.0, std::abs(rhs))) << t << " " << s;
    }
  }
}

TEST(ClosedForm, SlopeRelation) {
  const auto m = mixed_datum();
  for (double t : {-1.0, 2.0}) {
    for (double s : {-2.0, -0.05, 0.05, 1.5}) {
      const double h = 1e-6;
      const double Vs = (linear_V(t, s + h, m) - linear_V(t, s - h, m)) / (2 * h);
      EXPECT_NEAR(linear_W(t, s, m), Vs / char_jacobian(t, s), 1e-6 * std::max(1.0, std::abs(Vs)));
    }
  }
}

TEST(ClosedForm, PeakLimits) {
  const auto m = mixed_datum();
  for (double t : {-2.0, 0.0, 1.0, 5.0}) {
    const double wp = linear_W_limit_plus(t, m.peak_value(), m.slope_right());
    const double wm = linear_W_limit_minus(t, m.peak_value(), m.slope_left());
    EXPECT_NEAR(wp, m.peak_value() * (std::exp(t) - 1) + m.slope_right() * std::exp(t), 1e-13 * std::exp(std::abs(t)));
    EXPECT_NEAR(wm, m.peak_value() * (1 - std::exp(-t)) + m.slope_left() * std::exp(-t), 1e-13 * std::exp(std::abs(t)));
    EXPECT_NEAR(linear_W(t, 1e-10, m), wp, 1e-6 * std::exp(std::abs(t)));
    EXPECT_NEAR(linear_W(t, -1e-10, m), wm, 1e-6 * std::exp(std::abs(t)));
    // q_s is e^{-2t} at 0+ and e^{2t} at 0-
    EXPECT_NEAR(linear_V(t, 1e-14, m), m.peak_value(), 1e-13 * std::exp(2 * std::abs(t)));
    EXPECT_NEAR(linear_V(t, -1e-14, m), m.peak_value(), 1e-13 * std::exp(2 * std::abs(t)));
  }
  for (double t : {0.0, 1.0, 3.0, 5.0}) EXPECT_NEAR(linear_W_limit_plus(t, 1.0, -1.0), -1.0, 1e-12);
}

TEST(ClosedForm, JumpFormulaForSmoothDatum) {
  const InitialDatum g(InitialDatumSpec{.family = DatumFamily::Gaussian, .amplitude = 0.4, .sigma = 0.9, .center = 0.5});
  ASSERT_EQ(g.slope_left(), g.slope_right());
  const double v0 = g.peak_value(), s0 = g.slope_right();
  for (double t : {0.5, 2.0}) {
    const auto f = linear_solution_field(t, g, default_grid());
    EXPECT_NEAR(f.slope_right() - f.slope_left(), 2 * v0 * (std::cosh(t) - 1) + 2 * s0 * std::sinh(t), 1e-12);
  }
}

TEST(SolutionField, InitialTimeReturnsDatum) {
  const auto g = default_grid();
  const auto m = mixed_datum();
  const auto v0 = sample(m, g);
  const auto f = linear_solution_field(0.0, m, g);
  ASSERT_EQ(f.size(), v0.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    EXPECT_EQ(f.coords()[i], v0.coords()[i]);
    EXPECT_EQ(f.values()[i], v0.values()[i]);
    EXPECT_EQ(f.slopes()[i], v0.slopes()[i]);
  }
}

TEST(SolutionField, HalfLineH1Conserved) {
  const auto g = default_grid();
  const auto m = mixed_datum();
  const auto v0 = sample(m, g);
  const double p0 = h1_norm_halfline(v0, Side::Plus), m0 = h1_norm_halfline(v0, Side::Minus);
  for (double t : {-2.0, -0.5, 1.0, 2.5, 5.0}) {
    const auto f = linear_solution_field(t, m, g);
    EXPECT_NEAR(h1_norm_halfline(f, Side::Plus) / p0, 1.0, 1e-4) << t;
    EXPECT_NEAR(h1_norm_halfline(f, Side::Minus) / m0, 1.0, 1e-4) << t;
    const double cp = h1_char_side(t, m, g, Side::Plus), cm = h1_char_side(t, m, g, Side::Minus);
    EXPECT_NEAR(cp / (p0 * p0), 1.0, 1e-4) << t;
    EXPECT_NEAR(cm / (m0 * m0), 1.0, 1e-4) << t;
  }
}

TEST(SolutionField, SupBoundOnRightHalfLine) {
  const auto g = default_grid();
  const auto m = mixed_datum();
  const auto v0 = sample(m, g);
  double sup0 = std::abs(v0.peak_value());
  for (std::size_t i = v0.first_right(); i < v0.size(); ++i) sup0 = std::max(sup0, std::abs(v0.values()[i]));
  for (double t : {0.5, 2.0, 5.0}) {
    const auto f = linear_solution_field(t, m, g);
    for (std::size_t i = f.first_right(); i < f.size(); ++i) {
      ASSERT_LE(std::abs(f.values()[i]), std::abs(m.peak_value()) + sup0 + 1e-12);
    }
  }
}

TEST(Growth, LowerBound) {
  EXPECT_NEAR(growth_lower_bound(1.3, 1.0, -1.0), -1.0, 1e-15);
  EXPECT_NEAR(growth_lower_bound(2.0, 0.0, -0.01), 0.01 * std::exp(2.0), 1e-15);
  const InitialDatum d(InitialDatumSpec{.family = DatumFamily::PeakedExponential, .beta = 2.0, .slope_right = -0.01});
  const auto g = default_grid();
  for (double t = 0.0; t <= 5.0; t += 0.25) {
    const auto f = linear_solution_field(t, d, g);
    EXPECT_GE(linf_slope(f, Side::Plus), growth_lower_bound(t, d.peak_value(), d.slope_right()) * (1 - 1e-14));
  }
}

TEST(OdeCrosscheck, MatchesClosedForms) {
  const auto g = default_grid();
  const auto m = mixed_datum();
  const auto v0 = sample(m, g);
  const auto r = linear_ode_crosscheck(v0, 2.0, 1e-3);
  double err = 0.0;
  for (std::size_t i = 0; i < v0.size(); ++i) {
    const double s = v0.coords()[i];
    err = std::max(err, std::abs(r.coords()[i] - char_position(2.0, s)));
    err = std::max(err, std::abs(r.values()[i] - linear_V(2.0, s, v0)));
    err = std::max(err, std::abs(r.slopes()[i] - linear_W(2.0, s, v0)));
  }
  EXPECT_LT(err, 1e-6);
  EXPECT_NEAR(r.slope_right(), linear_W_limit_plus(2.0, v0.peak_value(), v0.slope_right()), 1e-10);
  EXPECT_NEAR(r.slope_left(), linear_W_limit_minus(2.0, v0.peak_value(), v0.slope_left()), 1e-10);
}

TEST(OdeCrosscheck, FourthOrder) {
  const auto v0 = sample(mixed_datum(), make_grid(25.0, 300, 1.01));
  auto error = [&](double dt) {
    const auto r = linear_ode_crosscheck(v0, 2.0, dt);
    double e = 0.0;
    for (std::size_t i = 0; i < v0.size(); ++i) {
      const double s = v0.coords()[i];
      e = std::max(e, std::abs(r.values()[i] - linear_V(2.0, s, v0)));
      e = std::max(e, std::abs(r.slopes()[i] - linear_W(2.0, s, v0)));
    }
    return e;
  };
  const double ratio = error(0.1) / error(0.05);
  EXPECT_GE(ratio, 12.0);
  EXPECT_LE(ratio, 20.0);
}

TEST(OdeCrosscheck, ZeroAndStepLimit) {
  const auto z = sample(InitialDatum{}, make_grid(25.0, 200, 1.01));
  const auto r = linear_ode_crosscheck(z, 1.0, 0.01);
  for (double v : r.values()) EXPECT_EQ(v, 0.0);
  EXPECT_THROW(linear_ode_crosscheck(z, 1.0, 0.2), Error);
}

TEST(ClosedForm, PeakonSlopeLimitHasNoCancellation) {
  // v0 = phi: W(t, 0+) = -1 for all t; the closed form must not lose
  // digits to terms of size e^{2t} near the peak.
  const InitialDatum unit(InitialDatumSpec{.family = DatumFamily::ScaledPeakon, .amplitude = 1.0});
  const double tiny = std::numeric_limits<double>::min();
  for (double t = 0.0; t <= 10.0; t += 0.5) {
    EXPECT_NEAR(linear_W(t, tiny, unit), -1.0, 8 * std::numeric_limits<double>::epsilon()) << "t=" << t;
    // on the left the numerator is O(e^{-t}) built from O(1) terms
    EXPECT_NEAR(linear_W(t, -tiny, unit), 1.0, 8 * std::numeric_limits<double>::epsilon() * std::exp(t)) << "t=" << t;
  }
}
