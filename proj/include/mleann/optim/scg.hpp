#ifndef MLEANN_OPTIM_SCG_HPP
#define MLEANN_OPTIM_SCG_HPP

#include <Eigen/Dense>

#include <cmath>

#include "mleann/error.hpp"
#include "mleann/flops.hpp"
#include "mleann/objective.hpp"
#include "mleann/optim/result.hpp"

namespace mleann::optim {

struct ScgOptions {
  double sigma = 5e-5;   // finite-difference step for the Hessian-vector product
  double lambda = 5e-7;  // initial scaling regulating Hessian indefiniteness
  std::size_t epochs = 2500;

  void validate() const {
    require(sigma > 0.0, "SCG sigma must be positive");
    require(lambda >= 0.0, "SCG lambda must be non-negative");
  }
};

/// The finite-difference probe w + (sigma/|d|) d is indistinguishable from w.
class step_underflow : public numeric_error {
public:
  using numeric_error::numeric_error;
};

/// Curvature along d estimated by a forward difference of gradients:
/// returns d' H d with H d ~ (g(w + s d) - g(w)) / s, s = sigma / |d|.
template <Objective F>
double finite_difference_curvature(const F& f, const Eigen::VectorXd& w, const Eigen::VectorXd& g,
                                   const Eigen::VectorXd& d, double sigma, FlopLedger* ledger = nullptr) {
  const double norm = d.norm();
  const double step = sigma / norm;
  const Eigen::VectorXd probe = w + step * d;
  if (!(step > 0.0) || probe == w) throw step_underflow("SCG finite-difference step underflows relative to |d|");
  Eigen::VectorXd g_probe(w.size());
  f.value_and_gradient(probe, g_probe);
  const auto n = static_cast<std::uint64_t>(w.size());
  charge(ledger, flop_cost::dot(n) + flop_cost::axpy(n) + 2 * n + flop_cost::dot(n));
  return d.dot(g_probe - g) / step;
}

/// Moller's scaled conjugate gradient: no line search; the step along each
/// conjugate direction comes from a finite-difference curvature estimate,
/// with a Levenberg-style scale lambda that forces positive curvature and
/// is adapted by comparing actual to predicted decrease.
template <Objective F>
OptimResult minimize_scg(const F& f, Eigen::VectorXd w, const ScgOptions& opt, FlopLedger& ledger,
                         const EpochObserver& observer = {}) {
  opt.validate();
  const auto n = static_cast<std::uint64_t>(w.size());
  OptimResult res;
  Eigen::VectorXd g(w.size()), g_new(w.size());
  std::size_t epoch = 0;
  try {
    double E = f.value_and_gradient(w, g);
    res.initial_loss = E;
    res.initial_flops = ledger.count();
    Eigen::VectorXd r = -g;
    Eigen::VectorXd d = r;
    double lambda = opt.lambda;
    double lambda_bar = 0.0;
    double delta = 0.0;
    bool success = true;
    std::size_t accepted = 0;

    for (epoch = 1; epoch <= opt.epochs; ++epoch) {
      const double dd = d.squaredNorm();
      ledger.add(flop_cost::dot(n));
      if (dd == 0.0 || r.squaredNorm() == 0.0) {
        res.reason = Termination::converged;
        res.message = "gradient vanished";
        break;
      }
      if (success) delta = finite_difference_curvature(f, w, g, d, opt.sigma, &ledger);

      // Scale, then force positive curvature.
      delta += (lambda - lambda_bar) * dd;
      if (delta <= 0.0) {
        lambda_bar = 2.0 * (lambda - delta / dd);
        delta = -delta + lambda * dd;
        lambda = lambda_bar;
      }

      const double mu = d.dot(r);
      const double alpha = mu / delta;
      const Eigen::VectorXd trial = w + alpha * d;
      const double E_trial = f.value(trial);
      ledger.add(flop_cost::dot(n) + flop_cost::axpy(n) + 8);
      if (!std::isfinite(E_trial)) throw numeric_error("SCG trial loss is non-finite", epoch);
      if (mu * mu == 0.0) {
        res.history.push_back({E, ledger.count()});
        res.reason = Termination::converged;
        res.message = "directional derivative vanished";
        break;
      }
      const double comparison = 2.0 * delta * (E - E_trial) / (mu * mu);

      if (comparison >= 0.0) {
        w = trial;
        E = E_trial;
        f.value_and_gradient(w, g_new);
        Eigen::VectorXd r_new = -g_new;
        lambda_bar = 0.0;
        success = true;
        ++accepted;
        if (accepted % static_cast<std::size_t>(n) == 0) {
          d = r_new;
        } else {
          const double beta = (r_new.squaredNorm() - r_new.dot(r)) / mu;
          d = r_new + beta * d;
        }
        ledger.add(n + 2 * flop_cost::dot(n) + flop_cost::axpy(n) + 3);
        r = std::move(r_new);
        g = g_new;
        if (comparison >= 0.75) lambda *= 0.25;
        // Restart on loss of descent (not part of the published recursion).
        if (d.dot(r) <= 0.0) d = r;
        ledger.add(flop_cost::dot(n));
      } else {
        lambda_bar = lambda;
        success = false;
      }
      if (comparison < 0.25) lambda += delta * (1.0 - comparison) / dd;

      res.history.push_back({E, ledger.count()});
      if (observer) observer(epoch, w);
    }
  } catch (const step_underflow& err) {
    res.reason = Termination::numeric;
    res.failed_epoch = epoch;
    res.message = err.what();
  } catch (const numeric_error& err) {
    res.reason = Termination::non_finite;
    res.failed_epoch = epoch;
    res.message = err.what();
  }
  res.w = std::move(w);
  return res;
}

}  // namespace mleann::optim

#endif  // MLEANN_OPTIM_SCG_HPP
