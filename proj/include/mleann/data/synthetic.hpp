#ifndef MLEANN_DATA_SYNTHETIC_HPP
#define MLEANN_DATA_SYNTHETIC_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "mleann/data/series.hpp"

namespace mleann::data {

// Stand-ins for the two measured series when the files are not available.
// Both are generated on a unit scale and are marked synthetic downstream.

/// Hourly flow: daily and half-daily cycles, a weekly drift and AR(1) noise.
inline Series synthetic_wastewater(std::uint64_t seed = 1, std::size_t n = 475) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 0.025);
  constexpr double two_pi = 2.0 * std::numbers::pi;
  Series s;
  s.name = "wastewater";
  s.values.reserve(n);
  double ar = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i);
    ar = 0.7 * ar + noise(rng);
    const double v = 0.5 + 0.22 * std::sin(two_pi * t / 24.0 - 1.2) + 0.08 * std::sin(two_pi * t / 12.0 + 0.4) +
                     0.06 * std::sin(two_pi * t / 168.0) + ar;
    s.values.push_back(v);
  }
  return s;
}

/// Gas-furnace-like input/output pair: u is smoothed noise, y a lagged
/// second-order response to u. Returns {u, y}.
inline std::pair<std::vector<double>, std::vector<double>> synthetic_gas_furnace(std::uint64_t seed = 1,
                                                                                 std::size_t n = 296) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> drive(0.0, 0.35);
  std::normal_distribution<double> noise(0.0, 0.01);
  std::vector<double> u(n, 0.0), y(n, 0.5);
  for (std::size_t t = 0; t < n; ++t) {
    if (t > 0) u[t] = 0.9 * u[t - 1] + drive(rng) * 0.3;
    if (t >= 3) y[t] = 0.5 + 1.2 * (y[t - 1] - 0.5) - 0.45 * (y[t - 2] - 0.5) - 0.12 * u[t - 3] + noise(rng);
  }
  return {u, y};
}

}  // namespace mleann::data

#endif  // MLEANN_DATA_SYNTHETIC_HPP
