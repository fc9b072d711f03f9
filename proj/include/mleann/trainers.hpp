#ifndef MLEANN_TRAINERS_HPP
#define MLEANN_TRAINERS_HPP

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mleann/dataset.hpp"
#include "mleann/flops.hpp"
#include "mleann/mlp.hpp"
#include "mleann/net.hpp"
#include "mleann/objective.hpp"
#include "mleann/optim/bp.hpp"
#include "mleann/optim/lm.hpp"
#include "mleann/optim/qna.hpp"
#include "mleann/optim/scg.hpp"

namespace mleann {

enum class Algorithm : std::uint8_t { BP, SCG, QNA, LM };

inline constexpr std::array<Algorithm, 4> kAllAlgorithms = {Algorithm::BP, Algorithm::SCG, Algorithm::QNA,
                                                            Algorithm::LM};

constexpr std::string_view name(Algorithm a) {
  switch (a) {
    case Algorithm::BP: return "BP";
    case Algorithm::SCG: return "SCG";
    case Algorithm::QNA: return "QNA";
    case Algorithm::LM: return "LM";
  }
  return "?";
}

inline std::optional<Algorithm> parse_algorithm(std::string_view text) {
  std::string lower(text);
  for (char& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (lower == "bp") return Algorithm::BP;
  if (lower == "scg") return Algorithm::SCG;
  if (lower == "qna" || lower == "bfgs") return Algorithm::QNA;
  if (lower == "lm") return Algorithm::LM;
  return std::nullopt;
}

// Per-algorithm parameter records. BP works on the mean squared error so
// its learning rate does not depend on the number of training rows; the
// other trainers work on the sum of squared residuals.
using BpConfig = optim::BpOptions;
using ScgConfig = optim::ScgOptions;
using QnaConfig = optim::QnaOptions;
using LmConfig = optim::LmOptions;

using TrainerConfig = std::variant<BpConfig, ScgConfig, QnaConfig, LmConfig>;

inline Algorithm algorithm_of(const TrainerConfig& cfg) { return static_cast<Algorithm>(cfg.index()); }

inline TrainerConfig default_config(Algorithm a, std::size_t epochs) {
  switch (a) {
    case Algorithm::BP: { BpConfig c; c.epochs = epochs; return c; }
    case Algorithm::SCG: { ScgConfig c; c.epochs = epochs; return c; }
    case Algorithm::QNA: { QnaConfig c; c.epochs = epochs; return c; }
    case Algorithm::LM: { LmConfig c; c.epochs = epochs; return c; }
  }
  return BpConfig{};
}

inline std::size_t epochs_of(const TrainerConfig& cfg) {
  return std::visit([](const auto& c) { return c.epochs; }, cfg);
}

inline void set_epochs(TrainerConfig& cfg, std::size_t epochs) {
  std::visit([&](auto& c) { c.epochs = epochs; }, cfg);
}

struct TrainEpoch {
  double psi = 0.0;
  double train_rmse = 0.0;
  double test_rmse = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t flops = 0;
};

struct TrainReport {
  Algorithm algorithm = Algorithm::BP;
  TrainEpoch initial;              // evaluation of the starting network
  std::vector<TrainEpoch> epochs;  // one entry per executed epoch
  Mlp net;
  std::uint64_t flops = 0;
  optim::Termination reason = optim::Termination::completed;
  std::size_t failed_epoch = 0;
  std::string message;

  std::size_t epochs_executed() const noexcept { return epochs.size(); }
  bool aborted() const noexcept { return optim::is_abort(reason); }
  double final_psi() const noexcept { return epochs.empty() ? initial.psi : epochs.back().psi; }
  double final_train_rmse() const noexcept { return epochs.empty() ? initial.train_rmse : epochs.back().train_rmse; }
};

struct TrainOptions {
  /// When set, test RMSE is evaluated after every epoch (not charged to flops).
  std::optional<DatasetSlice> monitor;
};

namespace detail {

template <class Minimize>
TrainReport run_trainer(Algorithm algo, const Mlp& net, const DatasetSlice& train, bool mean_objective,
                        const TrainOptions& options, Minimize&& minimize) {
  require(net.input_dim() == train.input_dim(), "network input_dim does not match training data");
  require(net.finite(), "network parameters must be finite");
  FlopLedger ledger;
  NetObjective objective(net, train, &ledger, mean_objective);
  const double n = static_cast<double>(train.size());
  const double to_psi = mean_objective ? n : 1.0;

  TrainReport report;
  report.algorithm = algo;
  Mlp probe = net;
  auto monitor_rmse = [&](const Eigen::VectorXd& w) {
    if (!options.monitor) return std::numeric_limits<double>::quiet_NaN();
    probe.set_params(w);
    try {
      return rmse(probe, *options.monitor);
    } catch (const numeric_error&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  std::vector<double> test_trace;
  optim::EpochObserver observer;
  if (options.monitor) observer = [&](std::size_t, const Eigen::VectorXd& w) { test_trace.push_back(monitor_rmse(w)); };

  optim::OptimResult res = minimize(objective, net.params(), ledger, observer);

  auto make_epoch = [&](double loss, std::uint64_t flops, double test) {
    TrainEpoch ep;
    ep.psi = loss * to_psi;
    ep.train_rmse = std::sqrt(ep.psi / n);
    ep.test_rmse = test;
    ep.flops = flops;
    return ep;
  };
  report.initial = make_epoch(res.initial_loss, res.initial_flops, monitor_rmse(net.params()));
  for (std::size_t i = 0; i < res.history.size(); ++i)
    report.epochs.push_back(
        make_epoch(res.history[i].loss, res.history[i].flops,
                   i < test_trace.size() ? test_trace[i] : std::numeric_limits<double>::quiet_NaN()));
  report.net = Mlp(net.input_dim(), net.hidden(), res.w);
  report.flops = ledger.count();
  report.reason = res.reason;
  report.failed_epoch = res.failed_epoch;
  report.message = res.message;
  return report;
}

}  // namespace detail

inline TrainReport train_bp(const Mlp& net, const DatasetSlice& train, const BpConfig& cfg,
                            const TrainOptions& options = {}) {
  return detail::run_trainer(Algorithm::BP, net, train, true, options,
                             [&](const NetObjective& f, Eigen::VectorXd w, FlopLedger& ledger, auto& obs) {
                               return optim::minimize_bp(f, std::move(w), cfg, ledger, obs);
                             });
}

inline TrainReport train_scg(const Mlp& net, const DatasetSlice& train, const ScgConfig& cfg,
                             const TrainOptions& options = {}) {
  return detail::run_trainer(Algorithm::SCG, net, train, false, options,
                             [&](const NetObjective& f, Eigen::VectorXd w, FlopLedger& ledger, auto& obs) {
                               return optim::minimize_scg(f, std::move(w), cfg, ledger, obs);
                             });
}

inline TrainReport train_qna(const Mlp& net, const DatasetSlice& train, const QnaConfig& cfg,
                             const TrainOptions& options = {}) {
  return detail::run_trainer(Algorithm::QNA, net, train, false, options,
                             [&](const NetObjective& f, Eigen::VectorXd w, FlopLedger& ledger, auto& obs) {
                               return optim::minimize_qna(f, std::move(w), cfg, ledger, obs);
                             });
}

inline TrainReport train_lm(const Mlp& net, const DatasetSlice& train, const LmConfig& cfg,
                            const TrainOptions& options = {}) {
  return detail::run_trainer(Algorithm::LM, net, train, false, options,
                             [&](const NetObjective& f, Eigen::VectorXd w, FlopLedger& ledger, auto& obs) {
                               return optim::minimize_lm(f, std::move(w), cfg, ledger, obs);
                             });
}

inline TrainReport train(const Mlp& net, const DatasetSlice& data, const TrainerConfig& cfg,
                         const TrainOptions& options = {}) {
  return std::visit(
      [&](const auto& c) -> TrainReport {
        using C = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<C, BpConfig>) return train_bp(net, data, c, options);
        else if constexpr (std::is_same_v<C, ScgConfig>) return train_scg(net, data, c, options);
        else if constexpr (std::is_same_v<C, QnaConfig>) return train_qna(net, data, c, options);
        else return train_lm(net, data, c, options);
      },
      cfg);
}

}  // namespace mleann

#endif  // MLEANN_TRAINERS_HPP
