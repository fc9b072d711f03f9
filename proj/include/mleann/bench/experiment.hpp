#ifndef MLEANN_BENCH_EXPERIMENT_HPP
#define MLEANN_BENCH_EXPERIMENT_HPP

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <mutex>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "mleann/data/registry.hpp"
#include "mleann/evolve/evolution.hpp"
#include "mleann/net.hpp"
#include "mleann/trainers.hpp"

namespace mleann::bench {

enum class Protocol { conventional, mleann };

struct ExperimentSpec {
  std::string dataset = "mackey-glass";
  data::DataOptions data;
  Protocol protocol = Protocol::conventional;
  std::vector<Architecture> architectures;  // conventional protocol only
  evolve::EvolutionConfig evolution;        // mleann protocol only
  bool restrict_arch = false;               // mleann: hidden bounds [1, 4]
  std::vector<Algorithm> algorithms{kAllAlgorithms.begin(), kAllAlgorithms.end()};
  std::size_t epochs = 2500;
  std::size_t replicates = 3;
  std::uint64_t seed = 1;
  bool report_worst = true;  // otherwise the first replicate is reported
  bool serial = false;
  std::size_t threads = 0;
  double init_range = 0.3;
  std::vector<TrainerConfig> trainer_configs;  // replace a trainer's defaults; epochs still come from `epochs`

  TrainerConfig config_for(Algorithm a) const {
    for (TrainerConfig c : trainer_configs)
      if (algorithm_of(c) == a) {
        set_epochs(c, epochs);
        return c;
      }
    return default_config(a, epochs);
  }

  void validate() const {
    require(replicates >= 1, "replicates must be at least 1");
    require(!algorithms.empty(), "at least one trainer is required");
    if (protocol == Protocol::conventional) {
      require(!architectures.empty(), "conventional protocol needs an architecture list");
      for (const auto& a : architectures) require(!a.empty(), "architectures need at least one hidden node");
    } else {
      evolution_config().validate();
    }
  }

  evolve::EvolutionConfig evolution_config() const {
    evolve::EvolutionConfig cfg = evolution;
    if (restrict_arch) cfg.hidden = {1, 4};
    if (serial) cfg.serial = true;
    return cfg;
  }
};

/// Hidden sweep used for the conventional tables, all tanh-sigmoid nodes.
inline std::vector<Architecture> default_sweep() {
  std::vector<Architecture> out;
  for (std::size_t h : {14, 16, 18, 20, 24}) out.emplace_back(h, Activation::Tstar);
  return out;
}

/// One training run (or, for mleann, the best individual of one replicate).
struct ReplicateRow {
  std::string dataset;
  std::string protocol;
  Algorithm algorithm = Algorithm::BP;
  std::string architecture;
  std::size_t replicate = 0;
  std::uint64_t seed = 0;
  double train_rmse = 0.0;
  double test_rmse = 0.0;
  std::uint64_t flops = 0;
  std::size_t epochs = 0;
  std::string termination;
  bool aborted = false;
  double wall_seconds = 0.0;
};

struct ResultRow {
  std::string dataset;
  std::string protocol;
  Algorithm algorithm = Algorithm::BP;
  std::string architecture;
  double train_rmse = 0.0;
  double test_rmse = 0.0;
  std::uint64_t flops = 0;
  double wall_seconds = 0.0;
  std::uint64_t seed = 0;    // seed of the reported replicate
  std::size_t aborted = 0;   // replicates that ended in a trainer abort
  std::size_t replicates = 0;
  bool synthetic = false;

  std::string status() const {
    return aborted ? "aborted " + std::to_string(aborted) + "/" + std::to_string(replicates) : "ok";
  }
};

struct TraceRow {
  std::string stream;
  std::size_t generation = 0;
  double best = 0.0;
  double mean = 0.0;
  std::string best_arch;
};

struct ExperimentResult {
  std::vector<ResultRow> rows;
  std::vector<ReplicateRow> replicates;
  std::vector<TraceRow> traces;

  void append(ExperimentResult other) {
    rows.insert(rows.end(), other.rows.begin(), other.rows.end());
    replicates.insert(replicates.end(), other.replicates.begin(), other.replicates.end());
    traces.insert(traces.end(), other.traces.begin(), other.traces.end());
  }
};

inline std::uint64_t replicate_seed(std::uint64_t seed, std::size_t replicate) { return seed + replicate; }

namespace detail {

inline double final_rmse(const Mlp& net, const DatasetSlice& rows) {
  try {
    const double r = rmse(net, rows);
    return std::isfinite(r) ? r : std::numeric_limits<double>::infinity();
  } catch (const numeric_error&) {
    return std::numeric_limits<double>::infinity();
  }
}

// NaN and infinity rank as worst.
inline bool worse(double a, double b) {
  if (std::isnan(b)) return false;
  if (std::isnan(a)) return true;
  return a > b;
}

inline ResultRow summarize(const std::vector<ReplicateRow>& reps, bool report_worst, bool synthetic) {
  std::size_t pick = 0;
  if (report_worst)
    for (std::size_t i = 1; i < reps.size(); ++i)
      if (worse(reps[i].test_rmse, reps[pick].test_rmse)) pick = i;
  const ReplicateRow& r = reps[pick];
  ResultRow row;
  row.dataset = r.dataset;
  row.protocol = r.protocol;
  row.algorithm = r.algorithm;
  row.architecture = r.architecture;
  row.train_rmse = r.train_rmse;
  row.test_rmse = r.test_rmse;
  row.flops = r.flops;
  row.seed = r.seed;
  row.replicates = reps.size();
  row.synthetic = synthetic;
  for (const auto& x : reps) {
    row.wall_seconds += x.wall_seconds;
    if (x.aborted) ++row.aborted;
  }
  return row;
}

template <class F>
void parallel_for(std::size_t count, std::size_t threads, F&& body) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> workers;
  for (std::size_t t = 0; t < threads; ++t)
    workers.emplace_back([&] {
      for (std::size_t k = next++; k < count; k = next++) {
        try {
          body(k);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  for (auto& w : workers) w.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace detail

/// Every (architecture, trainer) pair trained `replicates` times from the
/// starting weights of seeds seed, seed+1, ... (shared by all trainers).
/// Rows come out ordered by architecture, then trainer.
inline ExperimentResult run_conventional(const ExperimentSpec& spec, const Dataset& ds) {
  spec.validate();
  require(spec.protocol == Protocol::conventional, "run_conventional needs the conventional protocol");
  const auto [train_rows, test_rows] = split(ds);
  const std::size_t n_algo = spec.algorithms.size();
  const std::size_t cells = spec.architectures.size() * n_algo * spec.replicates;
  std::vector<ReplicateRow> reps(cells);

  detail::parallel_for(cells, spec.serial ? 1 : spec.threads, [&](std::size_t k) {
    const std::size_t rep = k % spec.replicates;
    const std::size_t algo_i = (k / spec.replicates) % n_algo;
    const std::size_t arch_i = k / (spec.replicates * n_algo);
    const Algorithm algo = spec.algorithms[algo_i];
    const Architecture& arch = spec.architectures[arch_i];
    const std::uint64_t seed = replicate_seed(spec.seed, rep);
    std::mt19937_64 rng(seed);
    const Mlp start = random_mlp(ds.input_dim, arch, rng, spec.init_range);

    const auto t0 = std::chrono::steady_clock::now();
    const TrainReport report = train(start, train_rows, spec.config_for(algo));
    const auto t1 = std::chrono::steady_clock::now();

    ReplicateRow& r = reps[k];
    r.dataset = spec.dataset;
    r.protocol = "conventional";
    r.algorithm = algo;
    r.architecture = describe_architecture(arch);
    r.replicate = rep;
    r.seed = seed;
    r.train_rmse = detail::final_rmse(report.net, train_rows);
    r.test_rmse = detail::final_rmse(report.net, test_rows);
    r.flops = report.flops;
    r.epochs = report.epochs_executed();
    r.termination = std::string(optim::to_string(report.reason));
    r.aborted = report.aborted();
    r.wall_seconds = std::chrono::duration<double>(t1 - t0).count();
  });

  ExperimentResult out;
  for (std::size_t c = 0; c < cells; c += spec.replicates) {
    std::vector<ReplicateRow> group(reps.begin() + static_cast<std::ptrdiff_t>(c),
                                    reps.begin() + static_cast<std::ptrdiff_t>(c + spec.replicates));
    out.rows.push_back(detail::summarize(group, spec.report_worst, ds.synthetic));
  }
  out.replicates = std::move(reps);
  return out;
}

/// One evolutionary run per replicate (seeds seed, seed+1, ...); each stream
/// reports the best individual of its last generation and its trace.
inline ExperimentResult run_mleann_experiment(const ExperimentSpec& spec, const Dataset& ds) {
  spec.validate();
  require(spec.protocol == Protocol::mleann, "run_mleann_experiment needs the mleann protocol");
  const std::string protocol = spec.restrict_arch ? "mleann-restricted" : "mleann";
  const std::size_t n_algo = spec.algorithms.size();
  std::vector<ReplicateRow> reps(n_algo * spec.replicates);
  ExperimentResult out;

  for (std::size_t rep = 0; rep < spec.replicates; ++rep) {
    evolve::EvolutionConfig cfg = spec.evolution_config();
    cfg.seed = replicate_seed(spec.seed, rep);
    const auto t0 = std::chrono::steady_clock::now();
    const auto streams = evolve::run_mleann(cfg, ds, spec.algorithms);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const evolve::GenomeLayout layout = evolve::layout_of(cfg, ds.input_dim);

    for (std::size_t a = 0; a < n_algo; ++a) {
      const auto& s = streams[a];
      ReplicateRow& r = reps[a * spec.replicates + rep];
      r.dataset = spec.dataset;
      r.protocol = protocol;
      r.algorithm = s.algorithm;
      r.architecture = describe_architecture(evolve::decode_architecture(s.best, layout));
      r.replicate = rep;
      r.seed = cfg.seed;
      r.train_rmse = s.best.train_rmse;
      r.test_rmse = s.best.test_rmse;
      r.flops = s.best.flops;
      r.epochs = cfg.epochs_per_eval;
      r.termination = s.best.termination;
      r.aborted = !std::isfinite(s.best.fitness);
      r.wall_seconds = wall / static_cast<double>(n_algo);

      std::string stream = spec.dataset + "/" + std::string(name(s.algorithm));
      if (spec.restrict_arch) stream += "/restricted";
      if (spec.replicates > 1) stream += "/r" + std::to_string(rep);
      for (const auto& g : s.trace) out.traces.push_back({stream, g.generation, g.best, g.mean, g.best_arch});
    }
  }

  for (std::size_t c = 0; c < reps.size(); c += spec.replicates) {
    std::vector<ReplicateRow> group(reps.begin() + static_cast<std::ptrdiff_t>(c),
                                    reps.begin() + static_cast<std::ptrdiff_t>(c + spec.replicates));
    out.rows.push_back(detail::summarize(group, spec.report_worst, ds.synthetic));
  }
  out.replicates = std::move(reps);
  return out;
}

inline ExperimentResult run_experiment(const ExperimentSpec& spec, const Dataset& ds) {
  return spec.protocol == Protocol::conventional ? run_conventional(spec, ds) : run_mleann_experiment(spec, ds);
}

/// Loads the spec's dataset and runs its protocol.
inline ExperimentResult run_experiment(const ExperimentSpec& spec) {
  return run_experiment(spec, data::load_dataset(spec.dataset, spec.data));
}

}  // namespace mleann::bench

#endif  // MLEANN_BENCH_EXPERIMENT_HPP
