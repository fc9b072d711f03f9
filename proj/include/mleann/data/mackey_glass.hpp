#ifndef MLEANN_DATA_MACKEY_GLASS_HPP
#define MLEANN_DATA_MACKEY_GLASS_HPP

#include <cmath>
#include <string>
#include <vector>

#include "mleann/data/series.hpp"
#include "mleann/dataset.hpp"
#include "mleann/error.hpp"

namespace mleann::data {

struct MackeyGlassSpec {
  double tau = 17.0;
  double dt = 0.1;
  double x0 = 1.2;
  std::size_t n_points = 1000;  // unit-time samples t = 0 .. n_points-1
  double a = 0.2;
  double b = 0.1;
  double exponent = 10.0;

  /// Delay expressed in integration steps; must be an integer.
  std::size_t lag_steps() const {
    require(dt > 0.0 && tau >= 0.0, "Mackey-Glass needs dt > 0 and tau >= 0");
    const double lag = tau / dt;
    const double rounded = std::round(lag);
    if (std::abs(lag - rounded) > 1e-9 * std::max(1.0, lag))
      throw contract_error("Mackey-Glass delay tau/dt = " + std::to_string(lag) + " is not an integer");
    return static_cast<std::size_t>(rounded);
  }

  std::size_t steps_per_sample() const {
    const double k = 1.0 / dt;
    const double rounded = std::round(k);
    if (std::abs(k - rounded) > 1e-9 * k) throw contract_error("Mackey-Glass 1/dt must be an integer");
    return static_cast<std::size_t>(rounded);
  }
};

/// Integrates dx/dt = a x(t-tau) / (1 + x(t-tau)^exponent) - b x(t) with
/// classic RK4 on the dt grid, x(t) = 0 for t < 0.
///
/// The delayed value is read from the stored grid: stages 1-3 of the step
/// from t_k use x(t_k - tau), stage 4 uses x(t_{k+1} - tau). At delayed time
/// exactly 0 the stage-4 lookup takes the left limit (zero), so the trajectory
/// on [0, tau] is the unforced decay of x0.
inline Series mackey_glass_generate(const MackeyGlassSpec& spec = {}) {
  const std::size_t lag = spec.lag_steps();
  const std::size_t per = spec.steps_per_sample();
  require(spec.n_points > 0, "Mackey-Glass needs at least one sample");
  const std::size_t steps = (spec.n_points - 1) * per;
  std::vector<double> x(steps + 1);
  x[0] = spec.x0;
  auto delayed = [&](std::size_t index_plus_lag, bool left_limit) {
    // history index = index_plus_lag - lag
    if (index_plus_lag < lag) return 0.0;
    if (left_limit && index_plus_lag == lag) return 0.0;
    return x[index_plus_lag - lag];
  };
  auto rhs = [&](double xd, double xv) {
    return spec.a * xd / (1.0 + std::pow(xd, spec.exponent)) - spec.b * xv;
  };
  const double h = spec.dt;
  for (std::size_t k = 0; k < steps; ++k) {
    const double d_now = delayed(k, false);
    const double d_next = delayed(k + 1, true);
    const double k1 = rhs(d_now, x[k]);
    const double k2 = rhs(d_now, x[k] + 0.5 * h * k1);
    const double k3 = rhs(d_now, x[k] + 0.5 * h * k2);
    const double k4 = rhs(d_next, x[k] + h * k3);
    x[k + 1] = x[k] + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  Series out;
  out.name = "mackey-glass";
  out.dt = 1.0;
  out.values.reserve(spec.n_points);
  for (std::size_t i = 0; i < spec.n_points; ++i) out.values.push_back(x[i * per]);
  out.validate();
  return out;
}

/// Rows (x(t-18), x(t-12), x(t-6), x(t)) -> x(t+6) for every t where all
/// lags and the lead exist; the first 500 rows train.
inline Dataset embed_mackey(const Series& s, std::size_t train_count = 500) {
  constexpr long kMaxLag = 18, kLead = 6;
  const std::size_t minimum = kMaxLag + kLead + 1 + train_count;
  if (s.size() < minimum)
    throw data_error("Mackey-Glass embedding needs at least " + std::to_string(minimum) + " samples, got " +
                     std::to_string(s.size()));
  Dataset ds;
  ds.name = s.name;
  ds.input_dim = 4;
  const long first = s.start + kMaxLag;
  const long last = s.start + static_cast<long>(s.size()) - 1 - kLead;
  for (long t = first; t <= last; ++t) {
    const double x[4] = {s.at(t - 18), s.at(t - 12), s.at(t - 6), s.at(t)};
    ds.add_row(x, s.at(t + kLead), t);
  }
  ds.train_count = train_count;
  ds.validate();
  return ds;
}

}  // namespace mleann::data

#endif  // MLEANN_DATA_MACKEY_GLASS_HPP
