#ifndef MLEANN_OPTIM_RESULT_HPP
#define MLEANN_OPTIM_RESULT_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace mleann::optim {

enum class Termination {
  completed,      // ran the requested number of epochs
  converged,      // gradient vanished exactly; no further progress possible
  non_finite,     // a loss or gradient became non-finite
  damping_limit,  // Levenberg-Marquardt damping exceeded its ceiling
  numeric,        // other numerical breakdown (e.g. SCG step underflow)
};

constexpr std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::completed: return "completed";
    case Termination::converged: return "converged";
    case Termination::non_finite: return "non-finite";
    case Termination::damping_limit: return "damping-limit";
    case Termination::numeric: return "numeric";
  }
  return "?";
}

/// A run that stopped for a numerical reason rather than by schedule.
constexpr bool is_abort(Termination t) { return t == Termination::non_finite || t == Termination::numeric; }

struct EpochRecord {
  double loss = 0.0;          // objective after the epoch's update
  std::uint64_t flops = 0;    // cumulative ledger count after the epoch
};

struct OptimResult {
  Eigen::VectorXd w;
  double initial_loss = 0.0;
  std::uint64_t initial_flops = 0;
  std::vector<EpochRecord> history;
  Termination reason = Termination::completed;
  std::size_t failed_epoch = 0;
  std::string message;

  std::size_t epochs() const noexcept { return history.size(); }
  double final_loss() const noexcept { return history.empty() ? initial_loss : history.back().loss; }
};

/// Called after every epoch with the 1-based epoch index and current weights.
using EpochObserver = std::function<void(std::size_t, const Eigen::VectorXd&)>;

}  // namespace mleann::optim

#endif  // MLEANN_OPTIM_RESULT_HPP
