#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "core/errors.hpp"
#include "core/gridfn.hpp"

using namespace peakon;

namespace {

InitialDatum peakon_datum(double A = 1.0) {
  return InitialDatum(InitialDatumSpec{.family = DatumFamily::ScaledPeakon, .amplitude = A});
}

std::vector<double> default_grid() { return make_grid(25.0, 2000, 1.003); }

}  // namespace

TEST(Grid, UniformSmall) {
  const auto g = make_grid(20.0, 4, 1.0);
  const std::vector<double> want{-20, -15, -10, -5, 5, 10, 15, 20};
  ASSERT_EQ(g.size(), want.size());
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(g[i], want[i], 1e-12);
}

TEST(Grid, GeometricClustering) {
  const auto g = make_grid(20.0, 1000, 1.005);
  ASSERT_EQ(g.size(), 2000u);
  const double first = g[1001] - g[1000];
  const double last = g[1999] - g[1998];
  EXPECT_LT(first, last);
  EXPECT_DOUBLE_EQ(g.back(), 20.0);
  EXPECT_DOUBLE_EQ(g.front(), -20.0);
  for (std::size_t i = 1; i < g.size(); ++i) ASSERT_GT(g[i], g[i - 1]);
  for (std::size_t i = 0; i < 1000; ++i) EXPECT_DOUBLE_EQ(g[i], -g[1999 - i]);
}

TEST(Grid, RejectsBadParameters) {
  EXPECT_THROW(make_grid(-1.0, 10, 1.0), Error);
  EXPECT_THROW(make_grid(20.0, 1, 1.0), Error);
  EXPECT_THROW(make_grid(20.0, 10, 0.9), Error);
}

TEST(Grid, RefineHalvesSpacing) {
  const auto g = make_grid(25.0, 100, 1.01);
  const auto r = refine_grid(25.0, 100, 1.01);
  ASSERT_EQ(r.size(), 2 * g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const bool right = g[i] > 0;
    EXPECT_DOUBLE_EQ(r[right ? 2 * i + 1 : 2 * i], g[i]);
  }
}

TEST(Norms, PeakonValues) {
  const auto v = sample(peakon_datum(), default_grid());
  EXPECT_NEAR(h1_norm_halfline(v, Side::Plus), 1.0, 1e-6);
  EXPECT_NEAR(h1_norm_halfline(v, Side::Minus), 1.0, 1e-6);
  EXPECT_NEAR(energy_E(v), 2.0, 1e-5);
  EXPECT_NEAR(energy_F(v), 4.0 / 3.0, 1e-5);
  EXPECT_NEAR(slope_power_integral(v, 6.0), 1.0 / 3.0, 1e-6);
  EXPECT_DOUBLE_EQ(w1inf_norm(v), 1.0);
  EXPECT_DOUBLE_EQ(linf_value(v), 1.0);
  EXPECT_DOUBLE_EQ(linf_slope(v, Side::Plus), 1.0);
}

TEST(Norms, ZeroFunction) {
  const auto v = sample(InitialDatum{}, default_grid());
  EXPECT_EQ(energy_E(v), 0.0);
  EXPECT_EQ(energy_F(v), 0.0);
  EXPECT_EQ(h1_norm_halfline(v, Side::Plus), 0.0);
  EXPECT_EQ(linf_slope(v, Side::Minus), 0.0);
}

TEST(Norms, AdditivityAndHomogeneity) {
  InitialDatumSpec g{.family = DatumFamily::Gaussian, .amplitude = 0.3, .sigma = 0.7, .center = 0.4};
  const InitialDatum d({peakon_datum(0.5).terms()[0], g});
  const auto v = sample(d, default_grid());
  const double p = h1_norm_halfline(v, Side::Plus), m = h1_norm_halfline(v, Side::Minus);
  EXPECT_NEAR(p * p + m * m, energy_E(v), 1e-13);
  const auto w = v.scaled(-3.0);
  EXPECT_NEAR(h1_norm(w), 3.0 * h1_norm(v), 1e-12 * h1_norm(w));
  EXPECT_EQ(w1inf_norm(w), 3.0 * w1inf_norm(v));
  EXPECT_NEAR(energy_E(sample(peakon_datum(2.0), default_grid())), 8.0, 4e-5);
}

TEST(Norms, SecondOrderConvergence) {
  const auto coarse = sample(peakon_datum(), make_grid(25.0, 200, 1.01));
  const auto fine = sample(peakon_datum(), refine_grid(25.0, 200, 1.01));
  const double ec = std::abs(energy_E(coarse) - 2.0), ef = std::abs(energy_E(fine) - 2.0);
  const double fc = std::abs(energy_F(coarse) - 4.0 / 3.0), ff = std::abs(energy_F(fine) - 4.0 / 3.0);
  EXPECT_GT(ec / ef, 3.5);
  EXPECT_LT(ec / ef, 4.5);
  EXPECT_GT(fc / ff, 3.5);
  EXPECT_LT(fc / ff, 4.5);
}

TEST(PeakedFunction, InterpolateAtNodes) {
  const auto v = sample(peakon_datum(), make_grid(25.0, 400, 1.01));
  for (std::size_t i = 0; i < v.size(); i += 7) EXPECT_EQ(interpolate(v, v.coords()[i]), v.values()[i]);
  EXPECT_EQ(interpolate(v, 0.0), 1.0);
}

TEST(PeakedFunction, RejectsDiscontinuousPeak) {
  const auto g = make_grid(25.0, 400, 1.01);
  const auto v = sample(peakon_datum(), g);
  std::vector<double> vals(v.values().begin(), v.values().end()), sl(v.slopes().begin(), v.slopes().end());
  try {
    PeakedFunction::make(g, vals, sl, 1.5, -1.0, 1.0);
    FAIL() << "expected continuity error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Continuity);
  }
}

TEST(PeakedFunction, RejectsHeavyTail) {
  InitialDatumSpec g{.family = DatumFamily::Gaussian, .amplitude = 1.0, .sigma = 1.0, .center = 15.0};
  EXPECT_THROW(sample(InitialDatum(g), make_grid(25.0, 200, 1.01)), Error);
}

TEST(PeakedFunction, RejectsGridThroughZero) {
  EXPECT_THROW(PeakedFunction::make({-1.0, 0.0, 1.0}, {0, 0, 0}, {0, 0, 0}, 0, 0, 0), Error);
  EXPECT_THROW(PeakedFunction::make({1.0, 2.0}, {0, 0}, {0, 0}, 0, 0, 0), Error);
}

TEST(Datum, PeakedExponentialPeakData) {
  InitialDatumSpec s{.family = DatumFamily::PeakedExponential, .amplitude = 0.2, .beta = 3.0,
                     .slope_right = -0.7, .slope_left = 0.4};
  const InitialDatum d(s);
  EXPECT_DOUBLE_EQ(d.peak_value(), 0.2);
  EXPECT_DOUBLE_EQ(d.slope_right(), -0.7);
  EXPECT_DOUBLE_EQ(d.slope_left(), 0.4);
  // analytic slopes against central differences
  for (double x : {-2.0, -0.3, 0.25, 1.7}) {
    const double h = 1e-6;
    EXPECT_NEAR(d.slope(x), (d.value(x + h) - d.value(x - h)) / (2 * h), 1e-8);
  }
}

TEST(Datum, NormalizeH1) {
  InitialDatumSpec s{.family = DatumFamily::PeakedExponential, .beta = 2.0, .slope_right = -1.0};
  const auto g = default_grid();
  const auto d = normalize_h1(InitialDatum(s), g, 0.05);
  EXPECT_NEAR(h1_norm(sample(d, g)), 0.05, 1e-14);
}

TEST(Datum, FamilyNames) {
  for (auto f : {DatumFamily::Zero, DatumFamily::ScaledPeakon, DatumFamily::PeakedExponential, DatumFamily::Gaussian}) {
    EXPECT_EQ(datum_family_from_string(to_string(f)), f);
  }
  EXPECT_THROW(datum_family_from_string("sawtooth"), Error);
}

TEST(Snapshot, RoundTrip) {
  InitialDatumSpec s{.family = DatumFamily::PeakedExponential, .amplitude = 0.1, .beta = 1.5,
                     .slope_right = -0.3, .slope_left = 0.2};
  const auto v = sample(InitialDatum(s), make_grid(25.0, 400, 1.01));
  std::stringstream ss;
  write_snapshot(ss, 1.25, v);
  const auto [t, w] = read_snapshot(ss);
  EXPECT_EQ(t, 1.25);
  ASSERT_EQ(w.size(), v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    EXPECT_EQ(w.coords()[i], v.coords()[i]);
    EXPECT_EQ(w.values()[i], v.values()[i]);
    EXPECT_EQ(w.slopes()[i], v.slopes()[i]);
  }
  EXPECT_EQ(w.slope_left(), 0.2);
  EXPECT_EQ(w.slope_right(), -0.3);
  EXPECT_EQ(w.peak_value(), v.peak_value());
}

TEST(Snapshot, Layout) {
  PeakedFunction::Checks loose;
  loose.continuity = false;
  const auto v = sample(peakon_datum(), make_grid(25.0, 2, 1.0), loose);
  std::stringstream ss;
  write_snapshot(ss, 0.0, v);
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(ss, line)) lines.push_back(line);
  ASSERT_EQ(lines.size(), 8u);
  EXPECT_EQ(lines[0].rfind("# t=", 0), 0u);
  EXPECT_EQ(lines[1], "x,v,vx,side");
  EXPECT_EQ(lines[4], "0,1,1,L");
  EXPECT_EQ(lines[5], "0,1,-1,R");
}
