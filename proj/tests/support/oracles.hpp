#ifndef MLEANN_TESTS_ORACLES_HPP
#define MLEANN_TESTS_ORACLES_HPP

// Independent reference computations used only by the test suites.

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <random>

#include "mleann/flops.hpp"

namespace mleann::testing {

/// psi(w) = 1/2 (w - w*)' H (w - w*), gradient H (w - w*).
struct Quadratic {
  Eigen::MatrixXd H;
  Eigen::VectorXd minimizer;
  FlopLedger* ledger = nullptr;

  std::size_t dimension() const { return static_cast<std::size_t>(H.rows()); }
  double value(const Eigen::VectorXd& w) const {
    const Eigen::VectorXd r = w - minimizer;
    charge(ledger, 2 * H.size());
    return 0.5 * r.dot(H * r);
  }
  double value_and_gradient(const Eigen::VectorXd& w, Eigen::VectorXd& g) const {
    const Eigen::VectorXd r = w - minimizer;
    g = H * r;
    charge(ledger, 2 * H.size());
    return 0.5 * r.dot(g);
  }
};

/// Linear residuals e = A w - b; value = |e|^2, J = A' (p x n).
struct LinearLeastSquares {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;

  std::size_t dimension() const { return static_cast<std::size_t>(A.cols()); }
  double value(const Eigen::VectorXd& w) const { return (A * w - b).squaredNorm(); }
  double value_and_gradient(const Eigen::VectorXd& w, Eigen::VectorXd& g) const {
    const Eigen::VectorXd e = A * w - b;
    g = 2.0 * A.transpose() * e;
    return e.squaredNorm();
  }
  void residuals(const Eigen::VectorXd& w, Eigen::VectorXd& e) const { e = A * w - b; }
  void residuals_and_jacobian(const Eigen::VectorXd& w, Eigen::VectorXd& e, Eigen::MatrixXd& J) const {
    e = A * w - b;
    J = A.transpose();
  }
  /// Normal-equation optimum by Householder QR.
  Eigen::VectorXd optimum() const { return A.householderQr().solve(b); }
};

/// Random SPD matrix with eigenvalues in [lo, hi].
template <class Rng>
Eigen::MatrixXd random_spd(int n, Rng& rng, double lo = 0.5, double hi = 5.0) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXd X(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) X(i, j) = normal(rng);
  const Eigen::MatrixXd Q = X.householderQr().householderQ();
  std::uniform_real_distribution<double> eig(lo, hi);
  Eigen::VectorXd lambda(n);
  for (int i = 0; i < n; ++i) lambda[i] = eig(rng);
  Eigen::MatrixXd H = Q * lambda.asDiagonal() * Q.transpose();
  return 0.5 * (H + H.transpose());
}

template <class Rng>
Eigen::VectorXd random_vector(int n, Rng& rng, double range = 1.0) {
  std::uniform_real_distribution<double> u(-range, range);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = u(rng);
  return v;
}

/// Central differences with step h = 1e-6 (1 + |w_i|).
inline Eigen::VectorXd central_difference(const std::function<double(const Eigen::VectorXd&)>& f,
                                          const Eigen::VectorXd& w) {
  Eigen::VectorXd g(w.size());
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    const double h = 1e-6 * (1.0 + std::abs(w[i]));
    Eigen::VectorXd plus = w, minus = w;
    plus[i] += h;
    minus[i] -= h;
    g[i] = (f(plus) - f(minus)) / (plus[i] - minus[i]);
  }
  return g;
}

/// Relative deviation |a - b| / max(1, |a|, |b|) per component, maximized.
inline double max_relative_deviation(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double scale = std::max({1.0, std::abs(a[i]), std::abs(b[i])});
    worst = std::max(worst, std::abs(a[i] - b[i]) / scale);
  }
  return worst;
}

}  // namespace mleann::testing

#endif  // MLEANN_TESTS_ORACLES_HPP
