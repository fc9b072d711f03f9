#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <random>

#include "mleann/net.hpp"
#include "support/oracles.hpp"

using namespace mleann;
using mleann::testing::central_difference;
using mleann::testing::max_relative_deviation;

namespace {

struct Rows {
  Dataset ds;
  explicit Rows(std::size_t dim) { ds.input_dim = dim; }
  Rows& add(std::vector<double> x, double t) {
    ds.add_row(x, t, static_cast<long>(ds.rows()));
    return *this;
  }
  DatasetSlice slice() const { return ds.all(); }
};

Mlp single_tanh() {
  Mlp net(1, {Activation::T});
  net.set(net.w_in_index(0, 0), 1.0);
  net.set(net.w_out_index(0), 1.0);
  return net;
}

template <class Rng>
Rows random_rows(std::size_t dim, std::size_t n, Rng& rng) {
  Rows rows(dim);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (std::size_t r = 0; r < n; ++r) {
    std::vector<double> x(dim);
    for (double& v : x) v = u(rng);
    rows.add(x, u(rng));
  }
  return rows;
}

Architecture random_arch(std::size_t hidden, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick(0, 4);
  Architecture arch(hidden);
  for (auto& a : arch) a = static_cast<Activation>(pick(rng));
  return arch;
}

}  // namespace

TEST(Activation, TanhLabelsAndLogisticLabelsAgreeOnGrid) {
  for (double x = -8.0; x <= 8.0; x += 0.01) {
    EXPECT_EQ(activate(Activation::T, x), activate(Activation::Tstar, x));
    EXPECT_EQ(activate(Activation::L, x), activate(Activation::Lstar, x));
    // The tanh-sigmoid form is the same function.
    EXPECT_NEAR(activate(Activation::Tstar, x), 2.0 / (1.0 + std::exp(-2.0 * x)) - 1.0, 1e-15);
  }
  EXPECT_DOUBLE_EQ(activate(Activation::S, 1.0), 0.5);
  EXPECT_DOUBLE_EQ(activate(Activation::L, 0.0), 0.5);
}

TEST(Activation, DerivativesMatchFiniteDifferences) {
  for (Activation a : kAllActivations) {
    for (double x = -3.0; x <= 3.0; x += 0.25) {
      if (a == Activation::S && x == 0.0) continue;
      const double h = 1e-6;
      const double fd = (activate(a, x + h) - activate(a, x - h)) / (2 * h);
      EXPECT_NEAR(activate_derivative(a, x, activate(a, x)), fd, 1e-8) << label(a) << " at " << x;
    }
  }
}

TEST(Architecture, ParsesAndFormats) {
  const Architecture arch = parse_architecture("8T,2T*,1L*");
  ASSERT_EQ(arch.size(), 11u);
  EXPECT_EQ(arch[8], Activation::Tstar);
  EXPECT_EQ(arch[10], Activation::Lstar);
  EXPECT_EQ(format_architecture(arch), "8T,2T*,1L*");
  EXPECT_EQ(describe_architecture(arch), "8 T, 2 T*, 1 L*");
  EXPECT_EQ(describe_architecture(parse_architecture("24T*")), "24 T*");
}

TEST(Architecture, RejectsBadTokenByName) {
  try {
    parse_architecture("24Q");
    FAIL() << "expected a parse error";
  } catch (const contract_error& e) {
    EXPECT_NE(std::string(e.what()).find("24Q"), std::string::npos);
  }
  EXPECT_THROW(parse_architecture(""), contract_error);
  EXPECT_THROW(parse_architecture("T"), contract_error);
  EXPECT_THROW(parse_architecture("0T"), contract_error);
  EXPECT_THROW(parse_architecture("3T,"), contract_error);
}

TEST(Mlp, ParameterCountAndLayout) {
  const Mlp net(4, parse_architecture("24T*"));
  EXPECT_EQ(net.size(), 4u * 24 + 24 + 24 + 1);
  EXPECT_EQ(parameter_count(4, 8), 4u * 8 + 8 + 8 + 1);
  // Incoming weights of a node are contiguous and followed by its bias.
  EXPECT_EQ(net.w_in_index(3, 1) + 1, net.b_hid_index(1));
  EXPECT_EQ(net.b_hid_index(1) + 1, net.w_in_index(0, 2));
  EXPECT_EQ(net.b_out_index(), net.size() - 1);
}

TEST(Forward, ZeroNetworkOutputsZero) {
  const Mlp net(3, parse_architecture("2T,2L,1S"));
  const std::vector<double> x{0.4, -2.0, 7.0};
  EXPECT_EQ(forward(net, x).first, 0.0);
}

TEST(Forward, SingleTanhNode) {
  const Mlp net = single_tanh();
  EXPECT_EQ(forward(net, std::vector<double>{0.0}).first, 0.0);
  // tanh(2) = 0.964027580075816883946...
  EXPECT_NEAR(forward(net, std::vector<double>{2.0}).first, 0.96402758007581688, 1e-15);
}

TEST(Forward, DimensionMismatchIsContractViolation) {
  const Mlp net = single_tanh();
  EXPECT_THROW(forward(net, std::vector<double>{1.0, 2.0}), contract_error);
}

TEST(Forward, IsDeterministicAndChargesLedger) {
  std::mt19937_64 rng(3);
  const Mlp net = random_mlp(4, random_arch(6, rng), rng, 1.0);
  const std::vector<double> x{0.1, 0.2, -0.3, 0.9};
  FlopLedger ledger;
  const double a = forward(net, x, &ledger).first;
  const double b = forward(net, x).first;
  EXPECT_EQ(std::memcmp(&a, &b, sizeof a), 0);
  EXPECT_GT(ledger.count(), 0u);
}

TEST(Forward, TapeRejectsMutatedNetwork) {
  Mlp net = single_tanh();
  const auto [y, tape] = forward(net, std::vector<double>{0.5});
  EXPECT_NO_THROW(output_sensitivity(net, tape));
  net.set(net.b_out_index(), 1.0);
  EXPECT_THROW(output_sensitivity(net, tape), contract_error);
}

TEST(Loss, HandValues) {
  Mlp net(1, {Activation::T});
  net.set(net.b_out_index(), 1.0);  // y = 1 everywhere
  EXPECT_DOUBLE_EQ(loss(net, Rows(1).add({0.0}, 0.0).slice()), 1.0);
  // residuals (1, -2)
  EXPECT_DOUBLE_EQ(loss(net, Rows(1).add({0.0}, 0.0).add({5.0}, 3.0).slice()), 5.0);
  EXPECT_DOUBLE_EQ(loss(net, Rows(1).add({0.0}, 1.0).add({1.0}, 1.0).slice()), 0.0);
  EXPECT_DOUBLE_EQ(rmse(net, Rows(1).add({0.0}, 0.0).add({1.0}, 2.0).slice()), 1.0);
  EXPECT_DOUBLE_EQ(rmse(net, Rows(1).add({0.0}, 1.0).slice()), 0.0);
}

TEST(Loss, EmptySliceIsAnError) {
  const Mlp net = single_tanh();
  Dataset empty;
  empty.input_dim = 1;
  EXPECT_THROW(loss(net, empty.all()), contract_error);
  EXPECT_THROW(rmse(net, empty.all()), contract_error);
  EXPECT_THROW(backward_gradient(net, empty.all()), contract_error);
}

TEST(Gradient, OutputWeightOfLinearisedNodeByHand) {
  // y = w_out * S(x) with S(1) = 0.5, t = 0: d psi / d w_out = 2 e * 0.5.
  Mlp net(1, {Activation::S});
  net.set(net.w_in_index(0, 0), 1.0);
  net.set(net.w_out_index(0), 3.0);
  const auto res = backward_gradient(net, Rows(1).add({1.0}, 0.0).slice());
  EXPECT_DOUBLE_EQ(res.psi, 2.25);
  EXPECT_DOUBLE_EQ(res.g[static_cast<Eigen::Index>(net.w_out_index(0))], 2.0 * 1.5 * 0.5);
}

TEST(Gradient, ZeroNetworkMatchesFiniteDifferences) {
  std::mt19937_64 rng(11);
  const Rows rows = random_rows(3, 7, rng);
  const Mlp net(3, parse_architecture("2T,1L,1S"));
  const auto res = backward_gradient(net, rows.slice());
  Mlp probe = net;
  const auto fd = central_difference(
      [&](const Eigen::VectorXd& w) {
        probe.set_params(w);
        return loss(probe, rows.slice());
      },
      net.params());
  EXPECT_LT(max_relative_deviation(res.g, fd), 1e-6);
  // With zero output weights no signal reaches the hidden layer.
  for (std::size_t h = 0; h < net.hidden_count(); ++h)
    EXPECT_EQ(res.g[static_cast<Eigen::Index>(net.b_hid_index(h))], 0.0);
}

TEST(Gradient, RandomNetworksMatchFiniteDifferences) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    const Rows rows = random_rows(2, 10, rng);
    const Mlp net = random_mlp(2, random_arch(4, rng), rng, 1.0);
    const auto res = backward_gradient(net, rows.slice());
    Mlp probe = net;
    const auto fd = central_difference(
        [&](const Eigen::VectorXd& w) {
          probe.set_params(w);
          return loss(probe, rows.slice());
        },
        net.params());
    EXPECT_LT(max_relative_deviation(res.g, fd), 1e-6) << "trial " << trial;
  }
}

TEST(Gradient, NonFiniteIntermediateReportsRow) {
  Mlp net = single_tanh();
  net.set(net.b_out_index(), std::numeric_limits<double>::infinity());
  try {
    backward_gradient(net, Rows(1).add({0.0}, 0.0).add({1.0}, 0.0).slice());
    FAIL() << "expected a numeric error";
  } catch (const numeric_error& e) {
    EXPECT_EQ(e.index(), 0u);
  }
}

TEST(Jacobian, ColumnsAreResidualGradients) {
  std::mt19937_64 rng(5);
  const Rows rows = random_rows(3, 6, rng);
  const Mlp net = random_mlp(3, random_arch(3, rng), rng, 1.0);
  const auto jac = jacobian(net, rows.slice());
  ASSERT_EQ(jac.J.rows(), static_cast<Eigen::Index>(net.size()));
  ASSERT_EQ(jac.J.cols(), 6);
  Mlp probe = net;
  for (std::size_t j = 0; j < rows.ds.rows(); ++j) {
    const auto fd = central_difference(
        [&](const Eigen::VectorXd& w) {
          probe.set_params(w);
          return forward(probe, rows.slice().x(j)).first - rows.slice().target(j);
        },
        net.params());
    EXPECT_LT(max_relative_deviation(jac.J.col(static_cast<Eigen::Index>(j)), fd), 1e-6);
  }
}

TEST(Jacobian, ZeroResidualGivesZeroProduct) {
  const Mlp net = single_tanh();
  Rows rows(1);
  rows.add({0.3}, std::tanh(0.3)).add({-1.0}, std::tanh(-1.0));
  const auto jac = jacobian(net, rows.slice());
  EXPECT_EQ(jac.e.squaredNorm(), 0.0);
  EXPECT_EQ((jac.J * jac.e).squaredNorm(), 0.0);
}

TEST(Jacobian, ResidualsReproduceLossAndGradient) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    const Rows rows = random_rows(4, 12, rng);
    const Mlp net = random_mlp(4, random_arch(5, rng), rng, 1.0);
    const auto jac = jacobian(net, rows.slice());
    const auto grad = backward_gradient(net, rows.slice());
    double psi = 0.0;
    for (Eigen::Index j = 0; j < jac.e.size(); ++j) psi += jac.e[j] * jac.e[j];
    EXPECT_EQ(psi, loss(net, rows.slice()));
    EXPECT_LE((2.0 * jac.J * jac.e - grad.g).norm(), 1e-10 * (1.0 + grad.g.norm()));
  }
}

TEST(NetFile, RoundTrips) {
  std::mt19937_64 rng(1);
  const Mlp net = random_mlp(2, parse_architecture("2T,1L*"), rng);
  const std::string path = ::testing::TempDir() + "net.txt";
  save_mlp(net, path);
  const Mlp back = load_mlp(path);
  EXPECT_EQ(back.hidden(), net.hidden());
  EXPECT_EQ(back.params(), net.params());
}
