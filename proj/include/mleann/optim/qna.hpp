#ifndef MLEANN_OPTIM_QNA_HPP
#define MLEANN_OPTIM_QNA_HPP

#include <Eigen/Dense>

#include <cmath>
#include <vector>

#include "mleann/error.hpp"
#include "mleann/flops.hpp"
#include "mleann/objective.hpp"
#include "mleann/optim/bfgs.hpp"
#include "mleann/optim/line_search.hpp"
#include "mleann/optim/result.hpp"

namespace mleann::optim {

struct QnaOptions {
  double step_init = 0.01;   // weight-space length of the first trial after a fresh start
  double step_limit = 0.1;   // bracketing expansion is bounded by 1/step_limit per trial
  double perf_scale = 1e-3;  // sufficient-decrease constant
  double step_scale = 0.1;   // curvature constant
  std::size_t epochs = 2500;
  int max_line_evaluations = 20;

  void validate() const {
    require(step_init > 0.0, "QNA step_init must be positive");
    require(step_limit > 0.0 && step_limit < 1.0, "QNA step_limit must lie in (0, 1)");
    require(perf_scale > 0.0 && perf_scale < step_scale, "QNA perf_scale must be positive and below step_scale");
    require(step_scale < 1.0, "QNA step_scale must be below 1");
  }
};

/// BFGS quasi-Newton descent w+ = w - alpha M g with a line search for
/// alpha and the inverse-Hessian update for M (M_0 = I). M is reset to the
/// identity whenever the update is skipped or -M g stops being a descent
/// direction.
template <Objective F>
OptimResult minimize_qna(const F& f, Eigen::VectorXd w, const QnaOptions& opt, FlopLedger& ledger,
                         const EpochObserver& observer = {}) {
  opt.validate();
  const auto n = static_cast<std::uint64_t>(w.size());
  const Eigen::Index p = w.size();
  OptimResult res;
  Eigen::VectorXd g(p);
  std::size_t epoch = 0;
  try {
    double E = f.value_and_gradient(w, g);
    res.initial_loss = E;
    res.initial_flops = ledger.count();
    Eigen::MatrixXd M = Eigen::MatrixXd::Identity(p, p);
    bool fresh = true;
    std::vector<Eigen::VectorXd> trial_gradients;

    LineSearchOptions ls;
    ls.sufficient_decrease = opt.perf_scale;
    ls.curvature = opt.step_scale;
    ls.growth_limit = 1.0 / opt.step_limit;
    ls.max_evaluations = opt.max_line_evaluations;

    for (epoch = 1; epoch <= opt.epochs; ++epoch) {
      LineSearchResult found;
      Eigen::VectorXd d;
      for (int attempt = 0; attempt < 2; ++attempt) {
        d = fresh ? Eigen::VectorXd(-g) : Eigen::VectorXd(-(M * g));
        double slope = g.dot(d);
        ledger.add((fresh ? n : flop_cost::gemv(n, n)) + flop_cost::dot(n));
        if (!fresh && !(slope < 0.0)) {
          M.setIdentity();
          fresh = true;
          d = -g;
          slope = -g.squaredNorm();
          ledger.add(n + flop_cost::dot(n));
        }
        if (slope == 0.0) break;
        ls.initial_step = fresh ? opt.step_init / d.norm() : 1.0;
        trial_gradients.clear();
        auto phi = [&](double step) {
          const Eigen::VectorXd trial = w + step * d;
          Eigen::VectorXd gt(p);
          LinePoint pt;
          try {
            pt.value = f.value_and_gradient(trial, gt);
            pt.slope = gt.dot(d);
          } catch (const numeric_error&) {
            pt.value = pt.slope = std::numeric_limits<double>::quiet_NaN();
          }
          ledger.add(flop_cost::axpy(n) + flop_cost::dot(n));
          trial_gradients.push_back(std::move(gt));
          return pt;
        };
        found = line_search(phi, E, slope, ls);
        if (found.success || fresh) break;
        M.setIdentity();
        fresh = true;
      }
      if (!found.success) {
        // Not even steepest descent decreases the loss: nothing left to do.
        res.history.push_back({E, ledger.count()});
        res.reason = Termination::converged;
        res.message = "no decrease along steepest descent";
        break;
      }

      const Eigen::VectorXd step = found.step * d;
      Eigen::VectorXd& g_new = trial_gradients[static_cast<std::size_t>(found.accepted_evaluation)];
      const Eigen::VectorXd q = g_new - g;
      ledger.add(flop_cost::scale(n) + n + n);
      w += step;
      E = found.value;
      g = std::move(g_new);
      if (bfgs_update(M, step, q, &ledger) == BfgsStatus::skipped) {
        M.setIdentity();
        fresh = true;
      } else {
        fresh = false;
      }
      res.history.push_back({E, ledger.count()});
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

#endif  // MLEANN_OPTIM_QNA_HPP
