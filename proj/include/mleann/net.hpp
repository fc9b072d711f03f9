#ifndef MLEANN_NET_HPP
#define MLEANN_NET_HPP

#include <Eigen/Dense>

#include <cmath>
#include <vector>

#include "mleann/dataset.hpp"
#include "mleann/error.hpp"
#include "mleann/flops.hpp"
#include "mleann/mlp.hpp"

namespace mleann {

/// psi = sum of squared residuals, g = d psi / d w.
struct GradientResult {
  Eigen::VectorXd g;
  double psi = 0.0;
};

/// J is p x n with J(i, j) = d e_j / d w_i; e_j = y_j - t_j.
///
/// Because psi = sum e_j^2, the loss gradient is 2 J e.
struct JacobianResult {
  Eigen::MatrixXd J;
  Eigen::VectorXd e;
};

namespace detail {

inline void check_slice(const NetShape& s, const DatasetSlice& data) {
  if (data.empty()) throw contract_error("dataset slice is empty");
  if (data.input_dim() != s.input_dim)
    throw contract_error("slice input_dim " + std::to_string(data.input_dim()) + " does not match network input_dim " +
                         std::to_string(s.input_dim));
}

inline double checked(double value, std::size_t row) {
  if (!std::isfinite(value)) throw numeric_error("non-finite network output", row);
  return value;
}

struct Scratch {
  std::vector<double> pre, act;
  explicit Scratch(std::size_t hidden) : pre(hidden), act(hidden) {}
};

inline void residuals_at(const NetShape& s, const double* w, const DatasetSlice& data, Eigen::VectorXd& e,
                         FlopLedger* ledger) {
  check_slice(s, data);
  Scratch tmp(s.hidden.size());
  e.resize(static_cast<Eigen::Index>(data.size()));
  for (std::size_t r = 0; r < data.size(); ++r) {
    const double y = forward_row(s, w, data.x(r), tmp.pre.data(), tmp.act.data());
    e[static_cast<Eigen::Index>(r)] = checked(y - data.target(r), r);
  }
  charge(ledger, data.size() * (forward_flops(s) + 1));
}

inline double loss_at(const NetShape& s, const double* w, const DatasetSlice& data, FlopLedger* ledger) {
  check_slice(s, data);
  Scratch tmp(s.hidden.size());
  double psi = 0.0;
  for (std::size_t r = 0; r < data.size(); ++r) {
    const double e = checked(forward_row(s, w, data.x(r), tmp.pre.data(), tmp.act.data()) - data.target(r), r);
    psi += e * e;
  }
  charge(ledger, data.size() * (forward_flops(s) + 3));
  return psi;
}

inline double gradient_at(const NetShape& s, const double* w, const DatasetSlice& data, double* g,
                          FlopLedger* ledger) {
  check_slice(s, data);
  Scratch tmp(s.hidden.size());
  const std::size_t p = s.params();
  std::fill(g, g + p, 0.0);
  double psi = 0.0;
  for (std::size_t r = 0; r < data.size(); ++r) {
    const auto x = data.x(r);
    const double e = checked(forward_row(s, w, x, tmp.pre.data(), tmp.act.data()) - data.target(r), r);
    psi += e * e;
    row_sensitivity(s, w, x, tmp.pre.data(), tmp.act.data(), 2.0 * e, g, true);
  }
  for (std::size_t i = 0; i < p; ++i)
    if (!std::isfinite(g[i])) throw numeric_error("non-finite gradient component", i);
  charge(ledger, data.size() * (forward_flops(s) + 3 + backward_flops(s)));
  return psi;
}

inline void jacobian_at(const NetShape& s, const double* w, const DatasetSlice& data, Eigen::MatrixXd& J,
                        Eigen::VectorXd& e, FlopLedger* ledger) {
  check_slice(s, data);
  Scratch tmp(s.hidden.size());
  const auto p = static_cast<Eigen::Index>(s.params());
  const auto n = static_cast<Eigen::Index>(data.size());
  J.resize(p, n);
  e.resize(n);
  for (std::size_t r = 0; r < data.size(); ++r) {
    const auto x = data.x(r);
    const double y = forward_row(s, w, x, tmp.pre.data(), tmp.act.data());
    e[static_cast<Eigen::Index>(r)] = checked(y - data.target(r), r);
    row_sensitivity(s, w, x, tmp.pre.data(), tmp.act.data(), 1.0, J.col(static_cast<Eigen::Index>(r)).data(), false);
  }
  if (!J.allFinite()) throw numeric_error("non-finite Jacobian entry");
  charge(ledger, data.size() * (forward_flops(s) + 1 + jacobian_column_flops(s)));
}

}  // namespace detail

inline double loss(const Mlp& net, const DatasetSlice& data, FlopLedger* ledger = nullptr) {
  return detail::loss_at(detail::shape_of(net), net.params().data(), data, ledger);
}

inline double rmse(const Mlp& net, const DatasetSlice& data, FlopLedger* ledger = nullptr) {
  return std::sqrt(loss(net, data, ledger) / static_cast<double>(data.size()));
}

inline GradientResult backward_gradient(const Mlp& net, const DatasetSlice& data, FlopLedger* ledger = nullptr) {
  GradientResult out;
  out.g.resize(static_cast<Eigen::Index>(net.size()));
  out.psi = detail::gradient_at(detail::shape_of(net), net.params().data(), data, out.g.data(), ledger);
  return out;
}

inline JacobianResult jacobian(const Mlp& net, const DatasetSlice& data, FlopLedger* ledger = nullptr) {
  JacobianResult out;
  detail::jacobian_at(detail::shape_of(net), net.params().data(), data, out.J, out.e, ledger);
  return out;
}

}  // namespace mleann

#endif  // MLEANN_NET_HPP
