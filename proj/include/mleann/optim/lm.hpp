#ifndef MLEANN_OPTIM_LM_HPP
#define MLEANN_OPTIM_LM_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

#include "mleann/error.hpp"
#include "mleann/flops.hpp"
#include "mleann/objective.hpp"
#include "mleann/optim/result.hpp"

namespace mleann::optim {

struct LmOptions {
  double mu = 0.001;  // initial damping
  double mu_inc = 10.0;
  double mu_dec = 10.0;
  double mu_max = 1e10;
  double mu_min = 1e-20;
  std::size_t epochs = 2500;

  void validate() const {
    require(mu > 0.0, "LM damping must be positive");
    require(mu_inc > 1.0 && mu_dec > 1.0, "LM damping factors must exceed 1");
    require(mu_max >= mu && mu_min > 0.0 && mu_min <= mu, "LM damping bounds must bracket the initial value");
  }
};

/// Normal-equation pieces at the current weights: JJ' (lower triangle), J e and psi = e'e.
struct LmSystem {
  Eigen::MatrixXd JJt;
  Eigen::VectorXd Je;
  double psi = 0.0;
};

inline LmSystem build_lm_system(const Eigen::MatrixXd& J, const Eigen::VectorXd& e, FlopLedger* ledger = nullptr) {
  require(J.cols() == e.size(), "Jacobian columns must match residual count");
  const auto p = static_cast<std::uint64_t>(J.rows());
  const auto n = static_cast<std::uint64_t>(J.cols());
  LmSystem sys;
  sys.JJt = Eigen::MatrixXd::Zero(J.rows(), J.rows());
  sys.JJt.selfadjointView<Eigen::Lower>().rankUpdate(J);
  sys.Je = J * e;
  sys.psi = e.squaredNorm();
  charge(ledger, flop_cost::syrk(p, n) + flop_cost::gemv(p, n) + flop_cost::dot(n));
  return sys;
}

struct LmStep {
  bool solved = false;   // false: (JJ' + mu I) not numerically positive definite; raise mu
  Eigen::VectorXd candidate;
  Eigen::VectorXd delta;
  double predicted = 0.0;  // psi of the linearized residual at the candidate
};

/// Solves (JJ' + mu I) delta = J e by Cholesky; candidate = w - delta.
inline LmStep lm_step(const LmSystem& sys, const Eigen::VectorXd& w, double mu, FlopLedger* ledger = nullptr) {
  require(mu >= 0.0, "LM damping must be non-negative");
  const auto p = static_cast<std::uint64_t>(w.size());
  Eigen::MatrixXd A = sys.JJt;
  A.diagonal().array() += mu;
  Eigen::LLT<Eigen::MatrixXd, Eigen::Lower> llt(A);
  charge(ledger, p + flop_cost::cholesky(p));
  LmStep step;
  if (llt.info() != Eigen::Success) return step;
  step.delta = llt.solve(sys.Je);
  if (!step.delta.allFinite()) return step;
  step.solved = true;
  step.candidate = w - step.delta;
  step.predicted = sys.psi - 2.0 * step.delta.dot(sys.Je) +
                   step.delta.dot(sys.JJt.selfadjointView<Eigen::Lower>() * step.delta);
  charge(ledger, flop_cost::cholesky_solve(p) + p + flop_cost::gemv(p, p) + 2 * flop_cost::dot(p) + 3);
  return step;
}

/// Levenberg-Marquardt: each epoch tries damped Gauss-Newton steps, dividing
/// mu by mu_dec after a step that lowers the loss and multiplying it by
/// mu_inc after one that does not, until a step is accepted or mu passes mu_max.
template <LeastSquaresObjective F>
OptimResult minimize_lm(const F& f, Eigen::VectorXd w, const LmOptions& opt, FlopLedger& ledger,
                        const EpochObserver& observer = {}, double* final_mu = nullptr) {
  opt.validate();
  OptimResult res;
  Eigen::VectorXd e, e_trial;
  Eigen::MatrixXd J;
  double mu = opt.mu;
  std::size_t epoch = 0;
  try {
    f.residuals_and_jacobian(w, e, J);
    double E = e.squaredNorm();
    ledger.add(flop_cost::dot(static_cast<std::uint64_t>(e.size())));
    res.initial_loss = E;
    res.initial_flops = ledger.count();
    for (epoch = 1; epoch <= opt.epochs; ++epoch) {
      const LmSystem sys = build_lm_system(J, e, &ledger);
      bool accepted = false;
      while (!accepted) {
        const LmStep step = lm_step(sys, w, mu, &ledger);
        if (step.solved) {
          double E_trial = std::numeric_limits<double>::infinity();
          try {
            f.residuals(step.candidate, e_trial);
            E_trial = e_trial.squaredNorm();
            ledger.add(flop_cost::dot(static_cast<std::uint64_t>(e_trial.size())));
          } catch (const numeric_error&) {
          }
          if (E_trial < E) {
            w = step.candidate;
            E = E_trial;
            mu = std::max(mu / opt.mu_dec, opt.mu_min);
            accepted = true;
            break;
          }
        }
        mu *= opt.mu_inc;
        if (mu > opt.mu_max) break;
      }
      if (!accepted) {
        res.reason = Termination::damping_limit;
        res.failed_epoch = epoch;
        res.message = "damping exceeded its ceiling without an accepted step";
        break;
      }
      if (epoch < opt.epochs) {
        f.residuals_and_jacobian(w, e, J);
      }
      res.history.push_back({E, ledger.count()});
      if (observer) observer(epoch, w);
    }
  } catch (const numeric_error& err) {
    res.reason = Termination::non_finite;
    res.failed_epoch = epoch;
    res.message = err.what();
  }
  if (final_mu) *final_mu = mu;
  res.w = std::move(w);
  return res;
}

}  // namespace mleann::optim

#endif  // MLEANN_OPTIM_LM_HPP
