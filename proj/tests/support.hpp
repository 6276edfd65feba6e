#pragma once

#include <random>

#include "swflow/flow.hpp"

namespace testing_support {

inline swflow::SpinorField random_spinor(const swflow::LatticePtr& lat, int N, std::uint64_t seed,
                                         double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-scale, scale);
  swflow::SpinorField phi(lat, N);
  for (auto& z : phi.values()) z = {u(rng), u(rng)};
  return phi;
}

template <int D>
swflow::Form<D> random_form(const swflow::LatticePtr& lat, std::uint64_t seed, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-scale, scale);
  swflow::Form<D> f(lat);
  for (auto& v : f.values()) v = u(rng);
  return f;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

inline double max_abs_diff(const std::vector<swflow::Complex>& a, const std::vector<swflow::Complex>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

inline double max_abs(const std::vector<double>& a) {
  double d = 0.0;
  for (double v : a) d = std::max(d, std::abs(v));
  return d;
}

}  // namespace testing_support
