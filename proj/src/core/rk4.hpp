#pragma once

#include <cstddef>
#include <vector>

namespace peakon {

/// Classical four-stage Runge-Kutta on a flat state vector. The right-hand side
/// is called as rhs(y, dydt); stage buffers are kept between steps.
class Rk4 {
 public:
  template <class Rhs>
  void step(std::vector<double>& y, double dt, Rhs&& rhs) {
    const std::size_t n = y.size();
    k1_.resize(n), k2_.resize(n), k3_.resize(n), k4_.resize(n), tmp_.resize(n);
    rhs(y, k1_);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + 0.5 * dt * k1_[i];
    rhs(tmp_, k2_);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + 0.5 * dt * k2_[i];
    rhs(tmp_, k3_);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + dt * k3_[i];
    rhs(tmp_, k4_);
    for (std::size_t i = 0; i < n; ++i) y[i] += dt / 6.0 * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
  }

 private:
  std::vector<double> k1_, k2_, k3_, k4_, tmp_;
};

}  // namespace peakon
