#ifndef MLEANN_OPTIM_BP_HPP
#define MLEANN_OPTIM_BP_HPP

#include <Eigen/Dense>

#include <cmath>

#include "mleann/error.hpp"
#include "mleann/flops.hpp"
#include "mleann/objective.hpp"
#include "mleann/optim/result.hpp"

namespace mleann::optim {

struct BpOptions {
  double learning_rate = 0.15;
  double momentum = 0.25;
  std::size_t epochs = 2500;

  void validate() const {
    require(learning_rate > 0.0, "BP learning rate must be positive");
    require(momentum >= 0.0 && momentum < 1.0, "BP momentum must lie in [0, 1)");
  }
};

/// Full-batch gradient descent with momentum:
///   delta_{k+1} = momentum * delta_k - learning_rate * g_k,  w_{k+1} = w_k + delta_{k+1}.
/// With zero momentum this is plain steepest descent.
template <Objective F>
OptimResult minimize_bp(const F& f, Eigen::VectorXd w, const BpOptions& opt, FlopLedger& ledger,
                        const EpochObserver& observer = {}) {
  opt.validate();
  const auto p = static_cast<std::uint64_t>(w.size());
  OptimResult res;
  Eigen::VectorXd g(w.size());
  Eigen::VectorXd delta = Eigen::VectorXd::Zero(w.size());
  std::size_t epoch = 0;
  try {
    res.initial_loss = f.value_and_gradient(w, g);
    res.initial_flops = ledger.count();
    for (epoch = 1; epoch <= opt.epochs; ++epoch) {
      delta = opt.momentum * delta - opt.learning_rate * g;
      const Eigen::VectorXd previous = w;
      w += delta;
      ledger.add(flop_cost::scale(p) + flop_cost::axpy(p) + p);
      double loss = 0.0;
      try {
        loss = epoch == opt.epochs ? f.value(w) : f.value_and_gradient(w, g);
      } catch (const numeric_error&) {
        w = previous;
        throw;
      }
      if (!std::isfinite(loss)) {
        w = previous;
        throw numeric_error("BP loss became non-finite", epoch);
      }
      res.history.push_back({loss, ledger.count()});
      if (observer) observer(epoch, w);
    }
  } catch (const numeric_error& err) {
    res.reason = Termination::non_finite;
    res.failed_epoch = epoch;
    res.message = err.what();
  }
  res.w = std::move(w);
  return res;
}

}  // namespace mleann::optim

#endif  // MLEANN_OPTIM_BP_HPP
