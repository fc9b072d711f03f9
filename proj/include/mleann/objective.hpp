#ifndef MLEANN_OBJECTIVE_HPP
#define MLEANN_OBJECTIVE_HPP

#include <Eigen/Dense>

#include <cmath>
#include <concepts>
#include <cstddef>

#include "mleann/dataset.hpp"
#include "mleann/flops.hpp"
#include "mleann/mlp.hpp"
#include "mleann/net.hpp"

namespace mleann {

/// Smooth objective over a flat parameter vector.
template <class F>
concept Objective = requires(F& f, const Eigen::VectorXd& w, Eigen::VectorXd& g) {
  { f.dimension() } -> std::convertible_to<std::size_t>;
  { f.value(w) } -> std::convertible_to<double>;
  { f.value_and_gradient(w, g) } -> std::convertible_to<double>;
};

/// Sum-of-squares objective value(w) = sum e_j(w)^2 with residual Jacobian
/// J (p x n, column j = grad e_j), so that gradient = 2 J e.
template <class F>
concept LeastSquaresObjective =
    Objective<F> && requires(F& f, const Eigen::VectorXd& w, Eigen::VectorXd& e, Eigen::MatrixXd& J) {
      f.residuals(w, e);
      f.residuals_and_jacobian(w, e, J);
    };

/// Network training error as an objective over the network's parameters.
///
/// With `mean` set, the objective is psi_T / n (residuals scaled by
/// 1/sqrt(n)), otherwise psi_T itself.
class NetObjective {
public:
  NetObjective(const Mlp& shape, DatasetSlice data, FlopLedger* ledger = nullptr, bool mean = false)
      : input_dim_(shape.input_dim()), hidden_(shape.hidden()), data_(data), ledger_(ledger),
        scale_(mean ? 1.0 / static_cast<double>(data.size()) : 1.0) {
    require(!data_.empty(), "training slice is empty");
    require(data_.input_dim() == input_dim_, "training slice input_dim does not match network");
  }

  std::size_t dimension() const { return parameter_count(input_dim_, hidden_.size()); }
  const DatasetSlice& data() const { return data_; }

  double value(const Eigen::VectorXd& w) const {
    check(w);
    return scale_ * detail::loss_at(shape(), w.data(), data_, ledger_);
  }

  double value_and_gradient(const Eigen::VectorXd& w, Eigen::VectorXd& g) const {
    check(w);
    g.resize(w.size());
    const double psi = detail::gradient_at(shape(), w.data(), data_, g.data(), ledger_);
    if (scale_ != 1.0) g *= scale_;
    return scale_ * psi;
  }

  void residuals(const Eigen::VectorXd& w, Eigen::VectorXd& e) const {
    check(w);
    detail::residuals_at(shape(), w.data(), data_, e, ledger_);
    if (scale_ != 1.0) e *= std::sqrt(scale_);
  }

  void residuals_and_jacobian(const Eigen::VectorXd& w, Eigen::VectorXd& e, Eigen::MatrixXd& J) const {
    check(w);
    detail::jacobian_at(shape(), w.data(), data_, J, e, ledger_);
    if (scale_ != 1.0) {
      e *= std::sqrt(scale_);
      J *= std::sqrt(scale_);
    }
  }

private:
  detail::NetShape shape() const { return {input_dim_, hidden_}; }
  void check(const Eigen::VectorXd& w) const {
    require(static_cast<std::size_t>(w.size()) == dimension(), "parameter vector length mismatch");
  }

  std::size_t input_dim_;
  Architecture hidden_;
  DatasetSlice data_;
  FlopLedger* ledger_;
  double scale_;
};

static_assert(LeastSquaresObjective<NetObjective>);

}  // namespace mleann

#endif  // MLEANN_OBJECTIVE_HPP
