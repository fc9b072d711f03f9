#ifndef MLEANN_EVOLVE_EVOLUTION_HPP
#define MLEANN_EVOLVE_EVOLUTION_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "mleann/dataset.hpp"
#include "mleann/evolve/genome.hpp"
#include "mleann/net.hpp"
#include "mleann/trainers.hpp"

namespace mleann::evolve {

enum class FitnessSplit { test, validation };

struct EvolutionConfig {
  std::size_t population = 40;
  std::size_t generations = 40;
  std::size_t epochs_per_eval = 500;
  ArchBounds hidden{5, 16};
  double weight_range = 0.3;
  std::size_t bits_per_weight = 4;
  double selection_fraction = 0.50;
  double elitism = 0.05;
  double mutation_rate = 0.40;
  std::uint64_t seed = 1;
  bool serial = false;
  std::size_t threads = 0;  // 0: hardware concurrency
  bool lamarckian = false;  // write locally trained weights back into the genome
  FitnessSplit fitness_split = FitnessSplit::test;

  void validate() const {
    require(population >= 2, "population must be at least 2");
    hidden.validate();
    require(selection_fraction > 0.0 && selection_fraction <= 1.0, "selection fraction must lie in (0, 1]");
    // A fully elitist population is allowed so a generation can be a fixed point.
    require(elitism > 0.0 && elitism <= 1.0, "elitism must lie in (0, 1]");
    require(mutation_rate >= 0.0 && mutation_rate <= 1.0, "mutation rate must lie in [0, 1]");
    coding().validate();
  }

  WeightCoding coding() const { return {bits_per_weight, weight_range}; }
  std::size_t elite_count() const {
    return std::min(population, static_cast<std::size_t>(std::ceil(elitism * static_cast<double>(population) - 1e-9)));
  }
};

/// Rows used by fitness evaluation: the local search trains on `train`,
/// fitness is RMSE on `fitness`, and `test` is reported.
struct FitnessData {
  DatasetSlice train;
  DatasetSlice fitness;
  DatasetSlice test;
  std::size_t input_dim = 0;
};

inline FitnessData fitness_data(const Dataset& ds, FitnessSplit mode) {
  const auto [train, test] = split(ds);
  FitnessData fd;
  fd.test = test;
  fd.input_dim = ds.input_dim;
  if (mode == FitnessSplit::validation) {
    const auto [fit_train, validation] = split_validation(ds);
    fd.train = fit_train;
    fd.fitness = validation;
  } else {
    fd.train = train;
    fd.fitness = test;
  }
  return fd;
}

inline GenomeLayout layout_of(const EvolutionConfig& cfg, std::size_t input_dim) {
  return {input_dim, cfg.hidden, cfg.coding()};
}

namespace detail {

inline double safe_rmse(const Mlp& net, const DatasetSlice& rows) {
  try {
    const double r = rmse(net, rows);
    return std::isfinite(r) ? r : std::numeric_limits<double>::infinity();
  } catch (const numeric_error&) {
    return std::numeric_limits<double>::infinity();
  }
}

}  // namespace detail

/// Decodes the individual, refines its weights with the stream's trainer for
/// `epochs` epochs and records the RMSE on the fitness rows. A trainer abort
/// gives fitness +infinity.
inline void evaluate_fitness(Individual& ind, const FitnessData& data, const GenomeLayout& layout, std::size_t epochs,
                             bool lamarckian = false) {
  check_individual(ind, layout);
  const Mlp start = decode_network(ind, layout);
  const TrainerConfig cfg = decode_params(ind.params, ind.algorithm, epochs);
  const TrainReport report = train(start, data.train, cfg);
  ind.trained = report.net;
  ind.termination = std::string(optim::to_string(report.reason));
  ind.flops = report.flops;
  ind.train_rmse = detail::safe_rmse(report.net, data.train);
  ind.test_rmse = detail::safe_rmse(report.net, data.test);
  ind.fitness = report.aborted() ? std::numeric_limits<double>::infinity() : detail::safe_rmse(report.net, data.fitness);
  ind.evaluated = true;
  if (lamarckian && !report.aborted()) ind.weights = encode_weight_genome(report.net.params(), layout.coding);
}

/// Evaluates every individual that still needs it, concurrently unless
/// `threads` is 1. Results do not depend on the schedule.
inline void evaluate_population(std::vector<Individual>& pop, const FitnessData& data, const GenomeLayout& layout,
                                std::size_t epochs, bool lamarckian, std::size_t threads) {
  std::vector<std::size_t> todo;
  for (std::size_t i = 0; i < pop.size(); ++i)
    if (!pop[i].evaluated) todo.push_back(i);
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, todo.size());
  if (threads <= 1) {
    for (std::size_t i : todo) evaluate_fitness(pop[i], data, layout, epochs, lamarckian);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> workers;
  for (std::size_t t = 0; t < threads; ++t)
    workers.emplace_back([&] {
      for (std::size_t k = next++; k < todo.size(); k = next++) {
        try {
          evaluate_fitness(pop[todo[k]], data, layout, epochs, lamarckian);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  for (auto& w : workers) w.join();
  if (failure) std::rethrow_exception(failure);
}

/// Indices sorted by ascending fitness, ties in population order.
inline std::vector<std::size_t> rank_order(const std::vector<Individual>& pop) {
  std::vector<std::size_t> idx(pop.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return pop[a].fitness < pop[b].fitness; });
  return idx;
}

/// Truncation of the ranked population: the best `fraction` (at least one)
/// become parents, in rank order.
inline std::vector<std::size_t> rank_select(const std::vector<Individual>& pop, double fraction) {
  if (pop.empty()) throw contract_error("cannot select from an empty population");
  require(fraction > 0.0 && fraction <= 1.0, "selection fraction must lie in (0, 1]");
  for (const auto& ind : pop) require(ind.evaluated, "selection needs an evaluated population");
  std::vector<std::size_t> order = rank_order(pop);
  const auto count = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(pop.size()) - 1e-9)), 1, pop.size());
  order.resize(count);
  return order;
}

/// Elites copied unchanged, then mutated offspring of the ranked parents
/// (cycling through them) until the population is refilled; new genomes are
/// evaluated.
template <class Rng>
std::vector<Individual> evolve_generation(const std::vector<Individual>& pop, const EvolutionConfig& cfg,
                                          const FitnessData& data, Rng& rng) {
  cfg.validate();
  require(pop.size() == cfg.population, "population size does not match configuration");
  const GenomeLayout layout = layout_of(cfg, data.input_dim);
  const std::vector<std::size_t> order = rank_order(pop);
  const std::vector<std::size_t> parents = rank_select(pop, cfg.selection_fraction);
  std::vector<Individual> next;
  next.reserve(cfg.population);
  const std::size_t elites = cfg.elite_count();
  for (std::size_t i = 0; i < elites; ++i) next.push_back(pop[order[i]]);
  for (std::size_t k = 0; next.size() < cfg.population; ++k) {
    Individual child = mutate(pop[parents[k % parents.size()]], cfg.mutation_rate, layout, rng);
    // Further local search from a written-back genome is a new evaluation.
    if (cfg.lamarckian) child.evaluated = false;
    next.push_back(std::move(child));
  }
  evaluate_population(next, data, layout, cfg.epochs_per_eval, cfg.lamarckian, cfg.serial ? 1 : cfg.threads);
  return next;
}

struct GenerationStats {
  std::size_t generation = 0;
  double best = std::numeric_limits<double>::infinity();
  double mean = std::numeric_limits<double>::quiet_NaN();  // over finite fitnesses
  std::string best_arch;
};

inline GenerationStats generation_stats(const std::vector<Individual>& pop, std::size_t generation,
                                        const GenomeLayout& layout) {
  GenerationStats s;
  s.generation = generation;
  const std::size_t best = rank_order(pop).front();
  s.best = pop[best].fitness;
  s.best_arch = describe_architecture(decode_architecture(pop[best], layout));
  double sum = 0.0;
  std::size_t finite = 0;
  for (const auto& ind : pop)
    if (std::isfinite(ind.fitness)) sum += ind.fitness, ++finite;
  if (finite) s.mean = sum / static_cast<double>(finite);
  return s;
}

struct StreamResult {
  Algorithm algorithm = Algorithm::LM;
  Individual best;                      // best individual of the final generation
  std::vector<GenerationStats> trace;   // generations + 1 entries, generation 0 first
  std::vector<Individual> population;   // final generation
};

/// Seed of one algorithm stream, derived from the run seed.
inline std::uint64_t stream_seed(std::uint64_t seed, Algorithm a) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(a) + 1u};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

inline StreamResult run_stream(const EvolutionConfig& cfg, const FitnessData& data, Algorithm algorithm,
                               std::vector<Individual> initial = {}) {
  cfg.validate();
  const GenomeLayout layout = layout_of(cfg, data.input_dim);
  std::mt19937_64 rng(stream_seed(cfg.seed, algorithm));
  std::vector<Individual> pop = std::move(initial);
  while (pop.size() < cfg.population) pop.push_back(random_individual(algorithm, layout, rng));
  require(pop.size() == cfg.population, "initial population larger than configured");
  const std::size_t threads = cfg.serial ? 1 : cfg.threads;
  evaluate_population(pop, data, layout, cfg.epochs_per_eval, cfg.lamarckian, threads);

  StreamResult res;
  res.algorithm = algorithm;
  res.trace.push_back(generation_stats(pop, 0, layout));
  for (std::size_t g = 1; g <= cfg.generations; ++g) {
    pop = evolve_generation(pop, cfg, data, rng);
    res.trace.push_back(generation_stats(pop, g, layout));
  }
  res.best = pop[rank_order(pop).front()];
  res.population = std::move(pop);
  return res;
}

/// One independent population per algorithm; returns each stream's best
/// individual of the last generation and its fitness trace.
inline std::vector<StreamResult> run_mleann(const EvolutionConfig& cfg, const Dataset& ds,
                                            const std::vector<Algorithm>& algorithms) {
  cfg.validate();
  require(!algorithms.empty(), "at least one algorithm stream is required");
  const FitnessData data = fitness_data(ds, cfg.fitness_split);
  std::vector<StreamResult> out;
  for (Algorithm a : algorithms) out.push_back(run_stream(cfg, data, a));
  return out;
}

}  // namespace mleann::evolve

#endif  // MLEANN_EVOLVE_EVOLUTION_HPP
