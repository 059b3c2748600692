#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "core/characteristics.hpp"
#include "core/errors.hpp"
#include "core/kernel.hpp"
#include "core/oracle.hpp"

using namespace peakon;

namespace {

double smooth_bump(double x) { return 0.1 * std::exp(-x * x); }

// u_t for a smooth u, from quadrature on a fine grid with exact derivatives.
double rhs_reference(double x0, double (*u)(double), double (*ux)(double)) {
  const int n = 200001;
  const double L = 25.0, h = 2.0 * L / (n - 1);
  double dp1 = 0.0, p2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double y = -L + i * h, w = (i == 0 || i == n - 1) ? 0.5 * h : h;
    const double v = u(y), vx = ux(y);
    dp1 += w * 0.5 * phi_x(x0 - y) * (1.5 * v * vx * vx + v * v * v);
    p2 += w * 0.25 * phi(x0 - y) * vx * vx * vx;
  }
  return -u(x0) * u(x0) * ux(x0) - dp1 - p2;
}

}  // namespace

TEST(DirectState, UniformNodesEndAtHalfWidth) {
  auto st = direct_state(25.0, 11, [](double x) { return x; });
  EXPECT_DOUBLE_EQ(st.x.front(), -25.0);
  EXPECT_DOUBLE_EQ(st.x.back(), 25.0);
  EXPECT_DOUBLE_EQ(st.dx(), 5.0);
  EXPECT_DOUBLE_EQ(st.u[3], st.x[3]);
  EXPECT_THROW(direct_state(25.0, 2, smooth_bump), Error);
}

TEST(DirectRhs, SmoothDatumMatchesQuadrature) {
  auto st = direct_state(25.0, 8001, smooth_bump);
  const auto r = direct_rhs(st);
  auto ux = [](double x) { return -0.2 * x * std::exp(-x * x); };
  for (double x0 : {-1.5, -0.5, 0.0, 0.7, 2.0}) {
    const auto i = static_cast<std::size_t>(std::lround((x0 + 25.0) / st.dx()));
    EXPECT_NEAR(r[i], rhs_reference(st.x[i], smooth_bump, +ux), 2e-5) << "x=" << x0;
  }
}

TEST(DirectRhs, PeakonTranslatesAtUnitSpeed) {
  // u = phi solves u_t = -u_x; the error is first order from the kink.
  double prev = 1.0;
  for (std::size_t nodes : {2001u, 4001u, 8001u}) {
    auto st = direct_state(25.0, nodes, [](double x) { return phi(x); });
    const auto r = direct_rhs(st);
    double m = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (std::abs(st.x[i]) > 2.0 * st.dx()) m = std::max(m, std::abs(r[i] + phi_x(st.x[i])));
    }
    EXPECT_LT(m, 0.6 * prev);
    prev = m;
  }
  EXPECT_LT(prev, 3e-2);
}

TEST(DirectRhs, RejectsUndecayedData) {
  auto st = direct_state(5.0, 101, [](double x) { return std::exp(-0.1 * x * x); });
  EXPECT_THROW(direct_rhs(st), Error);
  try {
    direct_rhs(st);
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::BoundaryDecay);
  }
}

TEST(DirectRhs, RejectsBadOrder) {
  auto st = direct_state(25.0, 101, smooth_bump);
  EXPECT_THROW(direct_rhs(st, 3), Error);
  EXPECT_THROW(direct_evolve(st, 0.1, 0.01, 0.0, 0), Error);
  EXPECT_THROW(direct_evolve(st, 0.1, 0.01, -1.0), Error);
  EXPECT_THROW(direct_evolve(st, 0.1, 0.0), Error);
}

TEST(DirectEvolve, PeakonProfileAfterHalfUnit) {
  auto st = direct_state(25.0, 8001, [](double x) { return phi(x); });
  const auto out = direct_evolve(st, 0.5, 0.4 * st.dx());
  EXPECT_DOUBLE_EQ(out.t, 0.5);
  double m = 0.0;
  for (std::size_t i = 0; i < out.x.size(); ++i) {
    if (std::abs(out.x[i] - 0.5) > 2.0 * st.dx()) m = std::max(m, std::abs(out.u[i] - phi(out.x[i] - 0.5)));
  }
  EXPECT_LT(m, 1e-2);
}

TEST(DirectEvolve, SmoothSmallDatumConservesEnergy) {
  auto st = direct_state(25.0, 4001, smooth_bump);
  const double e0 = direct_energy(st);
  EXPECT_NEAR(e0, 0.02 * std::sqrt(M_PI / 2.0), 1e-5);  // int a^2 e^{-2x^2}(1 + 4x^2)
  const auto out = direct_evolve(st, 2.0, 0.4 * st.dx());
  EXPECT_LT(std::abs(direct_energy(out) - e0) / e0, 1e-4);
}

TEST(DirectEvolve, ViscosityDissipatesEnergy) {
  auto st = direct_state(25.0, 2001, smooth_bump);
  const double e0 = direct_energy(st);
  const auto out = direct_evolve(st, 0.5, 0.4 * st.dx(), 0.05);
  EXPECT_LT(direct_energy(out), e0 * 0.99);
}

TEST(Compare, SkipsPeakWindowAndOutOfRangeNodes) {
  auto g = make_grid(25.0, 400, 1.01);
  InitialDatum zero;
  auto e = init_ensemble(sample(zero, g));
  const auto u = reconstruct(e);
  auto st = direct_state(30.0, 3001, [](double x) { return std::abs(x) <= 25.0 ? phi(x) : 5.0; });
  st.u[1500] = 7.0;  // at the peak
  st.u[1501] += 0.25;  // one cell away
  EXPECT_NEAR(compare(st, u), 0.0, 1e-4);
  st.u[1503] += 0.25;  // three cells away
  EXPECT_NEAR(compare(st, u), 0.25, 1e-4);
}

TEST(Compare, PerturbedPeakonAgreesWithCharacteristics) {
  InitialDatum d(InitialDatumSpec{.family = DatumFamily::Gaussian, .amplitude = 1e-2, .sigma = 1.0, .center = 1.0});
  auto e = init_ensemble(sample(d, make_grid(25.0, 2000, 1.003)));
  evolve(e, 0.5, 2.5e-3);
  const auto u = reconstruct(e);
  double prev = 1.0;
  for (std::size_t nodes : {2001u, 4001u, 8001u}) {
    auto st = direct_state(25.0, nodes, [&](double x) { return phi(x) + d.value(x); });
    const double diff = compare(direct_evolve(st, 0.5, 0.4 * st.dx()), u);
    EXPECT_LT(diff, prev);
    prev = diff;
  }
  EXPECT_LT(prev, 1e-2);
}

TEST(DirectSnapshot, Format) {
  auto st = direct_state(1.0, 3, [](double x) { return x * 0.5; });
  st.t = 0.25;
  std::ostringstream os;
  write_direct_snapshot(os, st);
  EXPECT_EQ(os.str(), "# t=0.25\nx,u\n-1,-0.5\n0,0\n1,0.5\n");
}

TEST(DirectRhs, ZeroDatumIsSteady) {
  auto st = direct_state(25.0, 501, [](double) { return 0.0; });
  for (double r : direct_rhs(st)) EXPECT_EQ(r, 0.0);
  const auto out = direct_evolve(st, 0.5, 0.01);
  for (double u : out.u) EXPECT_EQ(u, 0.0);
}

TEST(DirectRhs, OddDatumGivesEvenRhs) {
  // u -> -u and (x, t) -> (-x, -t) are both symmetries, so an odd u has an
  // even u_t. Upwinding breaks this only at the stencil's order.
  auto st = direct_state(25.0, 8001, [](double x) { return 0.1 * x * std::exp(-x * x); });
  const auto r = direct_rhs(st);
  const std::size_t n = r.size();
  double m = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    m = std::max(m, std::abs(r[i] - r[n - 1 - i]));
    scale = std::max(scale, std::abs(r[i]));
  }
  EXPECT_GT(scale, 1e-4);
  EXPECT_LT(m, 1e-3 * scale);
}

TEST(Compare, ShiftByOneCellIsLipschitzSized) {
  InitialDatum zero;
  const auto u = reconstruct(init_ensemble(sample(zero, make_grid(25.0, 1000, 1.005))));
  auto st = direct_state(25.0, 5001, [](double x) { return phi(x - 0.01); });
  const double d = compare(st, u);
  EXPECT_GT(d, 0.5 * 0.01);
  EXPECT_LT(d, 1.01 * 0.01);
}
