#ifndef MLEANN_OPTIM_BFGS_HPP
#define MLEANN_OPTIM_BFGS_HPP

#include <Eigen/Dense>

#include <cmath>

#include "mleann/error.hpp"
#include "mleann/flops.hpp"

namespace mleann::optim {

enum class BfgsStatus { updated, skipped };

/// Updates the inverse-Hessian approximation M in place from the weight
/// increment p and gradient increment q:
///
///   M+ = M + (1 + q'Mq / q'p) pp' / q'p - (p q'M + M q p') / q'p
///
/// so that M+ q = p. The update is skipped (M untouched) when the curvature
/// q'p <= curvature_floor * |q| |p|, which would break positive definiteness.
inline BfgsStatus bfgs_update(Eigen::MatrixXd& M, const Eigen::VectorXd& p, const Eigen::VectorXd& q,
                              FlopLedger* ledger = nullptr, double curvature_floor = 1e-10) {
  const auto n = static_cast<std::uint64_t>(p.size());
  require(M.rows() == p.size() && M.cols() == p.size() && q.size() == p.size(), "BFGS dimension mismatch");
  const double qp = q.dot(p);
  charge(ledger, flop_cost::dot(n) + 2 * flop_cost::dot(n));
  if (!(qp > curvature_floor * q.norm() * p.norm())) return BfgsStatus::skipped;

  const Eigen::VectorXd Mq = M * q;
  const double qMq = q.dot(Mq);
  const double a = (1.0 + qMq / qp) / qp;
  M.noalias() += (a * p) * p.transpose();
  M.noalias() -= (p / qp) * Mq.transpose();
  M.noalias() -= (Mq / qp) * p.transpose();
  charge(ledger, flop_cost::gemv(n, n) + flop_cost::dot(n) + 3 * 2 * n * n + 3 * n);
  return BfgsStatus::updated;
}

}  // namespace mleann::optim

#endif  // MLEANN_OPTIM_BFGS_HPP
