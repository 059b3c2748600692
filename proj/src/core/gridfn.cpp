#include "core/gridfn.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <istream>
#include <ostream>
#include <sstream>

#include "core/errors.hpp"
#include "core/format.hpp"

namespace peakon {

std::vector<double> make_grid(double half_width, int nodes_per_side, double ratio) {
  if (!(half_width > 0.0) || !std::isfinite(half_width)) {
    fail(ErrorKind::InvalidArgument, "make_grid: half-width must be positive");
  }
  if (nodes_per_side < 2) {
    fail(ErrorKind::InvalidArgument, "make_grid: need at least 2 nodes per side");
  }
  if (!(ratio >= 1.0) || !std::isfinite(ratio)) {
    fail(ErrorKind::InvalidArgument, "make_grid: clustering ratio must be >= 1");
  }
  const auto n = static_cast<std::size_t>(nodes_per_side);
  std::vector<double> right(n);
  if (ratio == 1.0) {
    for (std::size_t k = 0; k < n; ++k) right[k] = half_width * static_cast<double>(k + 1) / nodes_per_side;
  } else {
    // x_k = L (r^k - 1) / (r^N - 1)
    const double denom = std::expm1(nodes_per_side * std::log(ratio));
    for (std::size_t k = 0; k < n; ++k) {
      right[k] = half_width * std::expm1(static_cast<double>(k + 1) * std::log(ratio)) / denom;
    }
  }
  right.back() = half_width;
  std::vector<double> grid;
  grid.reserve(2 * n);
  for (auto it = right.rbegin(); it != right.rend(); ++it) grid.push_back(-*it);
  grid.insert(grid.end(), right.begin(), right.end());
  return grid;
}

std::vector<double> refine_grid(double half_width, int nodes_per_side, double ratio) {
  const auto coarse = make_grid(half_width, nodes_per_side, ratio);
  const std::size_t n = coarse.size() / 2;
  std::vector<double> right;
  right.reserve(2 * n);
  double prev = 0.0;
  for (std::size_t k = n; k < coarse.size(); ++k) {
    right.push_back(0.5 * (prev + coarse[k]));
    right.push_back(coarse[k]);
    prev = coarse[k];
  }
  std::vector<double> grid;
  grid.reserve(2 * right.size());
  for (auto it = right.rbegin(); it != right.rend(); ++it) grid.push_back(-*it);
  grid.insert(grid.end(), right.begin(), right.end());
  return grid;
}

// ---------------------------------------------------------------------------
// PeakedFunction

namespace {

template <class F>
double side_integral(const PeakedFunction& v, Side side, F&& integrand) {
  const auto x = v.coords();
  const auto val = v.values();
  const auto sl = v.slopes();
  const double p = v.peak_position();
  double sum = 0.0;
  if (side == Side::Plus) {
    double x_prev = p;
    double f_prev = integrand(v.peak_value(), v.slope_right());
    for (std::size_t i = v.first_right(); i < x.size(); ++i) {
      const double f = integrand(val[i], sl[i]);
      sum += 0.5 * (x[i] - x_prev) * (f + f_prev);
      x_prev = x[i];
      f_prev = f;
    }
  } else {
    double x_prev = p;
    double f_prev = integrand(v.peak_value(), v.slope_left());
    for (std::size_t i = v.first_right(); i-- > 0;) {
      const double f = integrand(val[i], sl[i]);
      sum += 0.5 * (x_prev - x[i]) * (f + f_prev);
      x_prev = x[i];
      f_prev = f;
    }
  }
  return sum;
}

double h1_density(double v, double vx) { return v * v + vx * vx; }

}  // namespace

void PeakedFunction::check_structure() const {
  const std::size_t n = coords_.size();
  if (values_.size() != n || slopes_.size() != n) {
    fail(ErrorKind::InvalidGrid, "PeakedFunction: coords, values and slopes differ in length");
  }
  for (std::size_t i = 1; i < n; ++i) {
    if (!(coords_[i] > coords_[i - 1])) {
      fail(ErrorKind::InvalidGrid, "PeakedFunction: coords not strictly increasing at index " +
                                       std::to_string(i));
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(coords_[i]) || !std::isfinite(values_[i]) || !std::isfinite(slopes_[i])) {
      fail(ErrorKind::InvalidArgument, "PeakedFunction: non-finite sample at index " + std::to_string(i));
    }
  }
  if (!std::isfinite(peak_value_) || !std::isfinite(slope_left_) || !std::isfinite(slope_right_) ||
      !std::isfinite(peak_position_)) {
    fail(ErrorKind::InvalidArgument, "PeakedFunction: non-finite peak data");
  }
  if (first_right_ == 0 || first_right_ >= n) {
    fail(ErrorKind::InvalidGrid, "PeakedFunction: need nodes on both sides of the peak");
  }
  if (coords_[first_right_ - 1] == peak_position_) {
    fail(ErrorKind::InvalidGrid, "PeakedFunction: grid must exclude the peak position");
  }
}

PeakedFunction PeakedFunction::derived(std::vector<double> coords, std::vector<double> values,
                                       std::vector<double> slopes, double peak_value,
                                       double slope_right, double slope_left, double peak_position) {
  PeakedFunction f;
  f.coords_ = std::move(coords);
  f.values_ = std::move(values);
  f.slopes_ = std::move(slopes);
  f.peak_value_ = peak_value;
  f.slope_right_ = slope_right;
  f.slope_left_ = slope_left;
  f.peak_position_ = peak_position;
  f.first_right_ = static_cast<std::size_t>(
      std::upper_bound(f.coords_.begin(), f.coords_.end(), peak_position) - f.coords_.begin());
  f.check_structure();
  return f;
}

PeakedFunction PeakedFunction::make(std::vector<double> coords, std::vector<double> values,
                                    std::vector<double> slopes, double peak_value, double slope_right,
                                    double slope_left, double peak_position, const Checks& checks) {
  PeakedFunction f = derived(std::move(coords), std::move(values), std::move(slopes), peak_value,
                             slope_right, slope_left, peak_position);
  const auto& x = f.coords_;
  const auto& v = f.values_;
  const std::size_t r = f.first_right_;
  if (checks.continuity) {
    const double tol = checks.continuity_tol * (1.0 + std::abs(peak_value));
    auto extrapolate = [&](std::size_t inner, std::size_t outer) {
      const double t = (peak_position - x[inner]) / (x[outer] - x[inner]);
      return v[inner] + t * (v[outer] - v[inner]);
    };
    if (r + 1 < x.size() && std::abs(extrapolate(r, r + 1) - peak_value) > tol) {
      fail(ErrorKind::Continuity, "PeakedFunction: right-hand samples do not extrapolate to the peak value");
    }
    if (r >= 2 && std::abs(extrapolate(r - 1, r - 2) - peak_value) > tol) {
      fail(ErrorKind::Continuity, "PeakedFunction: left-hand samples do not extrapolate to the peak value");
    }
  }
  if (checks.tail) {
    const double extent = std::min(peak_position - x.front(), x.back() - peak_position);
    const double cut = 0.5 * extent;
    double tail = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i) {
      if (std::abs(x[i - 1] - peak_position) < cut || std::abs(x[i] - peak_position) < cut) continue;
      if ((x[i - 1] - peak_position) * (x[i] - peak_position) < 0.0) continue;
      tail += 0.5 * (x[i] - x[i - 1]) *
              (h1_density(v[i - 1], f.slopes_[i - 1]) + h1_density(v[i], f.slopes_[i]));
    }
    const double total = energy_E(f);
    if (tail > checks.tail_tol * total) {
      fail(ErrorKind::BoundaryDecay, "PeakedFunction: H^1 tail beyond half the grid extent is too large");
    }
  }
  return f;
}

double PeakedFunction::value(double x) const {
  const auto& c = coords_;
  if (x <= c.front()) return values_.front();
  if (x >= c.back()) return values_.back();
  if (x == peak_position_) return peak_value_;
  const auto hi = static_cast<std::size_t>(std::upper_bound(c.begin(), c.end(), x) - c.begin());
  double x0, x1, f0, f1;
  if (hi == first_right_) {
    // straddles the peak: interpolate against the peak value on the correct side
    if (x > peak_position_) {
      x0 = peak_position_, f0 = peak_value_, x1 = c[hi], f1 = values_[hi];
    } else {
      x0 = c[hi - 1], f0 = values_[hi - 1], x1 = peak_position_, f1 = peak_value_;
    }
  } else {
    x0 = c[hi - 1], f0 = values_[hi - 1], x1 = c[hi], f1 = values_[hi];
  }
  return f0 + (x - x0) / (x1 - x0) * (f1 - f0);
}

double PeakedFunction::slope(double x) const {
  const auto& c = coords_;
  if (x <= c.front()) return slopes_.front();
  if (x >= c.back()) return slopes_.back();
  if (x == peak_position_) return 0.5 * (slope_left_ + slope_right_);
  const auto hi = static_cast<std::size_t>(std::upper_bound(c.begin(), c.end(), x) - c.begin());
  double x0, x1, f0, f1;
  if (hi == first_right_) {
    if (x > peak_position_) {
      x0 = peak_position_, f0 = slope_right_, x1 = c[hi], f1 = slopes_[hi];
    } else {
      x0 = c[hi - 1], f0 = slopes_[hi - 1], x1 = peak_position_, f1 = slope_left_;
    }
  } else {
    x0 = c[hi - 1], f0 = slopes_[hi - 1], x1 = c[hi], f1 = slopes_[hi];
  }
  return f0 + (x - x0) / (x1 - x0) * (f1 - f0);
}

PeakedFunction PeakedFunction::scaled(double factor) const {
  PeakedFunction f = *this;
  for (auto& v : f.values_) v *= factor;
  for (auto& s : f.slopes_) s *= factor;
  f.peak_value_ *= factor;
  f.slope_right_ *= factor;
  f.slope_left_ *= factor;
  return f;
}

// ---------------------------------------------------------------------------
// Initial data

const char* to_string(DatumFamily family) noexcept {
  switch (family) {
    case DatumFamily::Zero: return "zero";
    case DatumFamily::ScaledPeakon: return "scaled_peakon";
    case DatumFamily::PeakedExponential: return "peaked_exponential";
    case DatumFamily::Gaussian: return "gaussian";
  }
  return "?";
}

DatumFamily datum_family_from_string(const std::string& name) {
  for (auto f : {DatumFamily::Zero, DatumFamily::ScaledPeakon, DatumFamily::PeakedExponential,
                 DatumFamily::Gaussian}) {
    if (name == to_string(f)) return f;
  }
  fail(ErrorKind::InvalidArgument, "unknown datum family '" + name + "'");
}

namespace {

void validate_spec(const InitialDatumSpec& s) {
  for (double p : {s.amplitude, s.beta, s.slope_right, s.slope_left, s.sigma, s.center}) {
    if (!std::isfinite(p)) fail(ErrorKind::InvalidArgument, "datum parameters must be finite");
  }
  if (s.family == DatumFamily::PeakedExponential && !(s.beta > 0.0)) {
    fail(ErrorKind::InvalidArgument, "peaked_exponential: beta must be positive");
  }
  if (s.family == DatumFamily::Gaussian && !(s.sigma > 0.0)) {
    fail(ErrorKind::InvalidArgument, "gaussian: sigma must be positive");
  }
}

// peaked_exponential: (A + k x) e^{-beta |x|} with k chosen per side so that
// v(0) = A and v_x(0+/-) equal the prescribed slopes.
double term_value(const InitialDatumSpec& s, double x) {
  switch (s.family) {
    case DatumFamily::Zero: return 0.0;
    case DatumFamily::ScaledPeakon: return s.amplitude * std::exp(-std::abs(x));
    case DatumFamily::PeakedExponential: {
      const double k = x >= 0.0 ? s.slope_right + s.amplitude * s.beta : s.slope_left - s.amplitude * s.beta;
      return (s.amplitude + k * x) * std::exp(-s.beta * std::abs(x));
    }
    case DatumFamily::Gaussian: {
      const double z = (x - s.center) / s.sigma;
      return s.amplitude * std::exp(-0.5 * z * z);
    }
  }
  return 0.0;
}

double term_slope(const InitialDatumSpec& s, double x, Side side) {
  switch (s.family) {
    case DatumFamily::Zero: return 0.0;
    case DatumFamily::ScaledPeakon:
      return (side == Side::Plus ? -1.0 : 1.0) * s.amplitude * std::exp(-std::abs(x));
    case DatumFamily::PeakedExponential: {
      const double e = std::exp(-s.beta * std::abs(x));
      if (side == Side::Plus) {
        const double k = s.slope_right + s.amplitude * s.beta;
        return (k - s.beta * (s.amplitude + k * x)) * e;
      }
      const double k = s.slope_left - s.amplitude * s.beta;
      return (k + s.beta * (s.amplitude + k * x)) * e;
    }
    case DatumFamily::Gaussian: {
      const double z = (x - s.center) / s.sigma;
      return -s.amplitude * z / s.sigma * std::exp(-0.5 * z * z);
    }
  }
  return 0.0;
}

}  // namespace

InitialDatum::InitialDatum(InitialDatumSpec spec) : InitialDatum(std::vector<InitialDatumSpec>{spec}) {}

InitialDatum::InitialDatum(std::vector<InitialDatumSpec> terms, double scale)
    : terms_(std::move(terms)), scale_(scale) {
  for (const auto& t : terms_) validate_spec(t);
  if (!std::isfinite(scale_)) fail(ErrorKind::InvalidArgument, "datum scale must be finite");
}

double InitialDatum::value(double x) const {
  double sum = 0.0;
  for (const auto& t : terms_) sum += term_value(t, x);
  return scale_ * sum;
}

double InitialDatum::slope(double x) const {
  if (x == 0.0) return 0.5 * (slope_left() + slope_right());
  const Side side = x > 0.0 ? Side::Plus : Side::Minus;
  double sum = 0.0;
  for (const auto& t : terms_) sum += term_slope(t, x, side);
  return scale_ * sum;
}

double InitialDatum::peak_value() const { return value(0.0); }

double InitialDatum::slope_right() const {
  double sum = 0.0;
  for (const auto& t : terms_) sum += term_slope(t, 0.0, Side::Plus);
  return scale_ * sum;
}

double InitialDatum::slope_left() const {
  double sum = 0.0;
  for (const auto& t : terms_) sum += term_slope(t, 0.0, Side::Minus);
  return scale_ * sum;
}

InitialDatum random_peaked_datum(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  // raw 53-bit draws keep the sequence identical across standard libraries
  auto uniform = [&rng](double lo, double hi) { return lo + (hi - lo) * double(rng() >> 11) * 0x1p-53; };
  InitialDatumSpec pe{.family = DatumFamily::PeakedExponential};
  pe.amplitude = uniform(-0.5, 0.5);
  pe.beta = uniform(1.2, 4.0);
  pe.slope_right = uniform(-1.0, 1.0);
  pe.slope_left = uniform(-1.0, 1.0);
  InitialDatumSpec g{.family = DatumFamily::Gaussian};
  g.amplitude = uniform(-0.3, 0.3);
  g.sigma = uniform(0.3, 1.5);
  g.center = uniform(-3.0, 3.0);
  return InitialDatum({pe, g});
}

PeakedFunction sample(const InitialDatum& datum, std::span<const double> coords,
                      const PeakedFunction::Checks& checks) {
  std::vector<double> x(coords.begin(), coords.end());
  std::vector<double> v(x.size()), vx(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    v[i] = datum.value(x[i]);
    vx[i] = datum.slope(x[i]);
  }
  return PeakedFunction::make(std::move(x), std::move(v), std::move(vx), datum.peak_value(),
                              datum.slope_right(), datum.slope_left(), 0.0, checks);
}

InitialDatum normalize_h1(const InitialDatum& datum, std::span<const double> coords, double target) {
  PeakedFunction::Checks relaxed;
  relaxed.continuity = false;
  relaxed.tail = false;
  const double norm = h1_norm(sample(datum, coords, relaxed));
  if (!(norm > 0.0)) fail(ErrorKind::InvalidArgument, "normalize_h1: datum has zero H^1 norm");
  return datum.scaled(target / norm);
}

// ---------------------------------------------------------------------------
// Norms and conserved functionals

double h1_norm_halfline(const PeakedFunction& v, Side side) {
  return std::sqrt(side_integral(v, side, h1_density));
}

double h1_norm(const PeakedFunction& v) { return std::sqrt(energy_E(v)); }

double energy_E(const PeakedFunction& u) {
  return side_integral(u, Side::Minus, h1_density) + side_integral(u, Side::Plus, h1_density);
}

double energy_F(const PeakedFunction& u) {
  auto density = [](double v, double vx) {
    const double v2 = v * v, vx2 = vx * vx;
    return v2 * v2 + 2.0 * v2 * vx2 - vx2 * vx2 / 3.0;
  };
  return side_integral(u, Side::Minus, density) + side_integral(u, Side::Plus, density);
}

double slope_power_integral(const PeakedFunction& v, double p) {
  auto density = [p](double, double vx) { return std::pow(std::abs(vx), p); };
  return side_integral(v, Side::Minus, density) + side_integral(v, Side::Plus, density);
}

double linf_value(const PeakedFunction& v) {
  double m = std::abs(v.peak_value());
  for (double x : v.values()) m = std::max(m, std::abs(x));
  return m;
}

double linf_slope(const PeakedFunction& v, Side side) {
  const auto s = v.slopes();
  double m = 0.0;
  if (side == Side::Plus) {
    m = std::abs(v.slope_right());
    for (std::size_t i = v.first_right(); i < s.size(); ++i) m = std::max(m, std::abs(s[i]));
  } else {
    m = std::abs(v.slope_left());
    for (std::size_t i = 0; i < v.first_right(); ++i) m = std::max(m, std::abs(s[i]));
  }
  return m;
}

double w1inf_norm(const PeakedFunction& v) {
  return std::max({linf_value(v), linf_slope(v, Side::Minus), linf_slope(v, Side::Plus)});
}

// ---------------------------------------------------------------------------
// Snapshots

void write_snapshot(std::ostream& out, double t, const PeakedFunction& v) {
  out << "# t=" << fmt17(t) << '\n' << "x,v,vx,side\n";
  const auto x = v.coords();
  const auto val = v.values();
  const auto sl = v.slopes();
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i == v.first_right()) {
      const std::string p = fmt17(v.peak_position()) + ',' + fmt17(v.peak_value()) + ',';
      out << p << fmt17(v.slope_left()) << ",L\n";
      out << p << fmt17(v.slope_right()) << ",R\n";
    }
    out << fmt17(x[i]) << ',' << fmt17(val[i]) << ',' << fmt17(sl[i]) << ",.\n";
  }
}

std::pair<double, PeakedFunction> read_snapshot(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("# t=", 0) != 0) {
    fail(ErrorKind::Parse, "snapshot: missing '# t=' header");
  }
  const double t = std::stod(line.substr(4));
  if (!std::getline(in, line) || line != "x,v,vx,side") fail(ErrorKind::Parse, "snapshot: bad column header");
  std::vector<double> x, v, vx;
  double peak = 0.0, peak_pos = 0.0, sl = 0.0, sr = 0.0;
  bool have_l = false, have_r = false;
  std::size_t lineno = 2;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string a, b, c, side;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, c, ',') ||
        !std::getline(ss, side)) {
      fail(ErrorKind::Parse, "snapshot: malformed row at line " + std::to_string(lineno));
    }
    const double xa = std::stod(a), vb = std::stod(b), vc = std::stod(c);
    if (side == ".") {
      x.push_back(xa), v.push_back(vb), vx.push_back(vc);
    } else if (side == "L") {
      peak_pos = xa, peak = vb, sl = vc, have_l = true;
    } else if (side == "R") {
      peak_pos = xa, peak = vb, sr = vc, have_r = true;
    } else {
      fail(ErrorKind::Parse, "snapshot: unknown side flag at line " + std::to_string(lineno));
    }
  }
  if (!have_l || !have_r) fail(ErrorKind::Parse, "snapshot: missing peak rows");
  return {t, PeakedFunction::derived(std::move(x), std::move(v), std::move(vx), peak, sr, sl, peak_pos)};
}

}  // namespace peakon
