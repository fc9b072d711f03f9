#ifndef MLEANN_EVOLVE_GENOME_HPP
#define MLEANN_EVOLVE_GENOME_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "mleann/activation.hpp"
#include "mleann/error.hpp"
#include "mleann/mlp.hpp"
#include "mleann/trainers.hpp"

namespace mleann::evolve {

/// One bit per element, most significant bit first within every field.
using Bits = std::vector<std::uint8_t>;

inline std::uint64_t read_field(std::span<const std::uint8_t> bits, std::size_t offset, std::size_t width) {
  require(width <= 63 && offset + width <= bits.size(), "bit field out of range");
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < width; ++i) v = (v << 1) | (bits[offset + i] & 1u);
  return v;
}

inline void write_field(std::span<std::uint8_t> bits, std::size_t offset, std::size_t width, std::uint64_t value) {
  require(width <= 63 && offset + width <= bits.size(), "bit field out of range");
  for (std::size_t i = 0; i < width; ++i) bits[offset + width - 1 - i] = static_cast<std::uint8_t>((value >> i) & 1u);
}

template <class Rng>
Bits random_bits(std::size_t n, Rng& rng) {
  Bits b(n);
  for (auto& bit : b) bit = static_cast<std::uint8_t>(rng() >> 63);
  return b;
}

// ---------------------------------------------------------------- weights

struct WeightCoding {
  std::size_t bits_per_weight = 4;
  double range = 0.3;  // codes map linearly onto [-range, range]

  std::uint64_t max_code() const { return (std::uint64_t{1} << bits_per_weight) - 1; }
  void validate() const {
    require(bits_per_weight >= 1 && bits_per_weight <= 32, "bits per weight must be in [1, 32]");
    require(range > 0.0, "weight range must be positive");
  }
};

inline double decode_weight(std::uint64_t code, const WeightCoding& c) {
  return -c.range + 2.0 * c.range * static_cast<double>(code) / static_cast<double>(c.max_code());
}

/// Nearest code for a weight, clamped to the coded interval.
inline std::uint64_t encode_weight(double w, const WeightCoding& c) {
  const double x = std::clamp((w + c.range) / (2.0 * c.range), 0.0, 1.0);
  return static_cast<std::uint64_t>(std::llround(x * static_cast<double>(c.max_code())));
}

/// Weight genome -> parameter vector in the network's flat layout (weights
/// into the same node adjacent).
inline Eigen::VectorXd decode_weight_genome(std::span<const std::uint8_t> bits, std::size_t param_count,
                                            const WeightCoding& c = {}) {
  c.validate();
  if (bits.size() != param_count * c.bits_per_weight)
    throw contract_error("weight genome has " + std::to_string(bits.size()) + " bits, expected " +
                         std::to_string(param_count * c.bits_per_weight));
  Eigen::VectorXd w(static_cast<Eigen::Index>(param_count));
  for (std::size_t i = 0; i < param_count; ++i)
    w[static_cast<Eigen::Index>(i)] = decode_weight(read_field(bits, i * c.bits_per_weight, c.bits_per_weight), c);
  return w;
}

inline Bits encode_weight_genome(const Eigen::VectorXd& w, const WeightCoding& c = {}) {
  c.validate();
  Bits bits(static_cast<std::size_t>(w.size()) * c.bits_per_weight);
  for (Eigen::Index i = 0; i < w.size(); ++i)
    write_field(bits, static_cast<std::size_t>(i) * c.bits_per_weight, c.bits_per_weight, encode_weight(w[i], c));
  return bits;
}

// ---------------------------------------------------------------- architecture

inline constexpr std::size_t kActivationGeneBits = 3;

struct ArchBounds {
  std::size_t lo = 5;
  std::size_t hi = 16;

  void validate() const { require(lo >= 1 && lo <= hi, "hidden bounds must satisfy 1 <= lo <= hi"); }
  std::size_t count_bits() const { return static_cast<std::size_t>(std::bit_width(hi)); }
  /// Hidden-count field followed by `hi` activation genes.
  std::size_t genome_bits() const { return count_bits() + hi * kActivationGeneBits; }
};

/// 3-bit activation gene; the eight codes wrap around the five labels.
inline Activation decode_activation_gene(std::uint64_t code) { return kAllActivations[code % kActivationCount]; }

inline std::uint64_t encode_activation_gene(Activation a) {
  for (std::size_t i = 0; i < kActivationCount; ++i)
    if (kAllActivations[i] == a) return i;
  return 0;
}

inline std::size_t decode_hidden_count(std::span<const std::uint8_t> arch, const ArchBounds& b) {
  require(arch.size() == b.genome_bits(), "architecture genome length does not match bounds");
  const auto raw = static_cast<std::size_t>(read_field(arch, 0, b.count_bits()));
  return std::clamp(raw, b.lo, b.hi);
}

inline Architecture decode_arch(std::span<const std::uint8_t> arch, const ArchBounds& b) {
  const std::size_t h = decode_hidden_count(arch, b);
  Architecture out(h);
  for (std::size_t i = 0; i < h; ++i)
    out[i] = decode_activation_gene(read_field(arch, b.count_bits() + i * kActivationGeneBits, kActivationGeneBits));
  return out;
}

/// Genome for an architecture; unused activation genes are set to T.
inline Bits encode_arch(const Architecture& a, const ArchBounds& b) {
  b.validate();
  require(a.size() >= b.lo && a.size() <= b.hi, "architecture size outside hidden bounds");
  Bits bits(b.genome_bits());
  write_field(bits, 0, b.count_bits(), a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    write_field(bits, b.count_bits() + i * kActivationGeneBits, kActivationGeneBits, encode_activation_gene(a[i]));
  return bits;
}

// ---------------------------------------------------------------- learning parameters

inline constexpr std::size_t kParamGeneBits = 8;

/// A trainer parameter and its search interval. Intervals open at the lower
/// end map code c to hi (c+1)/2^bits so zero is never produced.
struct ParamRange {
  std::string_view name;
  double lo;
  double hi;
  bool open_low = false;

  double decode(std::uint64_t code) const {
    const double levels = static_cast<double>((std::uint64_t{1} << kParamGeneBits) - 1);
    if (open_low) return hi * (static_cast<double>(code) + 1.0) / (levels + 1.0);
    return lo + (hi - lo) * static_cast<double>(code) / levels;
  }
  bool contains(double v) const { return (open_low ? v > lo : v >= lo) && v <= hi; }
};

inline std::span<const ParamRange> param_ranges(Algorithm a) {
  static constexpr ParamRange bp[] = {{"learning_rate", 0.05, 0.25}, {"momentum", 0.05, 0.25}};
  static constexpr ParamRange scg[] = {{"sigma", 0.0, 1e-4, true}, {"lambda", 0.0, 1e-6, true}};
  static constexpr ParamRange qna[] = {{"step_init", 1e-6, 100.0},
                                       {"step_limit", 0.1, 0.6},
                                       {"perf_scale", 0.001, 0.003},
                                       {"step_scale", 0.1, 0.4}};
  static constexpr ParamRange lm[] = {{"mu", 0.001, 0.02}};
  switch (a) {
    case Algorithm::BP: return bp;
    case Algorithm::SCG: return scg;
    case Algorithm::QNA: return qna;
    case Algorithm::LM: return lm;
  }
  return {};
}

inline std::size_t param_genome_bits(Algorithm a) { return param_ranges(a).size() * kParamGeneBits; }

inline std::vector<double> decode_param_values(std::span<const std::uint8_t> bits, Algorithm a) {
  const auto ranges = param_ranges(a);
  require(bits.size() == ranges.size() * kParamGeneBits, "parameter genome length does not match algorithm");
  std::vector<double> v;
  for (std::size_t i = 0; i < ranges.size(); ++i) v.push_back(ranges[i].decode(read_field(bits, i * kParamGeneBits, kParamGeneBits)));
  return v;
}

/// Parameter genes -> trainer configuration (epochs set by the caller).
inline TrainerConfig decode_params(std::span<const std::uint8_t> bits, Algorithm a, std::size_t epochs = 0) {
  const std::vector<double> v = decode_param_values(bits, a);
  TrainerConfig cfg = default_config(a, epochs);
  switch (a) {
    case Algorithm::BP: {
      auto& c = std::get<BpConfig>(cfg);
      c.learning_rate = v[0];
      c.momentum = v[1];
      break;
    }
    case Algorithm::SCG: {
      auto& c = std::get<ScgConfig>(cfg);
      c.sigma = v[0];
      c.lambda = v[1];
      break;
    }
    case Algorithm::QNA: {
      auto& c = std::get<QnaConfig>(cfg);
      c.step_init = v[0];
      c.step_limit = v[1];
      c.perf_scale = v[2];
      c.step_scale = v[3];
      break;
    }
    case Algorithm::LM: std::get<LmConfig>(cfg).mu = v[0]; break;
  }
  return cfg;
}

/// Values of the searched fields of a configuration, in param_ranges order.
inline std::vector<double> searched_values(const TrainerConfig& cfg) {
  return std::visit(
      [](const auto& c) -> std::vector<double> {
        using C = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<C, BpConfig>) return {c.learning_rate, c.momentum};
        else if constexpr (std::is_same_v<C, ScgConfig>) return {c.sigma, c.lambda};
        else if constexpr (std::is_same_v<C, QnaConfig>) return {c.step_init, c.step_limit, c.perf_scale, c.step_scale};
        else return {c.mu};
      },
      cfg);
}

// ---------------------------------------------------------------- individual

/// Flat chromosome: architecture genes, weight genes sized for the decoded
/// architecture, and the learning-parameter genes of the stream's algorithm.
struct Individual {
  Algorithm algorithm = Algorithm::LM;
  Bits arch;
  Bits weights;
  Bits params;

  bool evaluated = false;
  double fitness = std::numeric_limits<double>::infinity();  // RMSE on the fitness rows; lower is better
  double train_rmse = std::numeric_limits<double>::quiet_NaN();
  double test_rmse = std::numeric_limits<double>::quiet_NaN();
  std::string termination;
  std::uint64_t flops = 0;  // cost of the local search behind `fitness`
  Mlp trained;

  std::size_t genome_bits() const { return arch.size() + weights.size() + params.size(); }
  bool same_genome(const Individual& o) const {
    return algorithm == o.algorithm && arch == o.arch && weights == o.weights && params == o.params;
  }
};

struct GenomeLayout {
  std::size_t input_dim = 1;
  ArchBounds bounds;
  WeightCoding coding;

  std::size_t weight_bits(std::size_t hidden) const {
    return parameter_count(input_dim, hidden) * coding.bits_per_weight;
  }
  void validate() const {
    require(input_dim >= 1, "genome input dimension must be positive");
    bounds.validate();
    coding.validate();
  }
};

inline Architecture decode_architecture(const Individual& ind, const GenomeLayout& L) { return decode_arch(ind.arch, L.bounds); }

inline Mlp decode_network(const Individual& ind, const GenomeLayout& L) {
  Architecture arch = decode_architecture(ind, L);
  const std::size_t p = parameter_count(L.input_dim, arch.size());
  return Mlp(L.input_dim, std::move(arch), decode_weight_genome(ind.weights, p, L.coding));
}

/// Checks the genome lengths are consistent with the decoded architecture.
inline void check_individual(const Individual& ind, const GenomeLayout& L) {
  require(ind.arch.size() == L.bounds.genome_bits(), "architecture genome length mismatch");
  require(ind.weights.size() == L.weight_bits(decode_hidden_count(ind.arch, L.bounds)),
          "weight genome length does not match decoded architecture");
  require(ind.params.size() == param_genome_bits(ind.algorithm), "parameter genome length mismatch");
}

template <class Rng>
Individual random_individual(Algorithm a, const GenomeLayout& L, Rng& rng) {
  L.validate();
  Individual ind;
  ind.algorithm = a;
  ind.arch = random_bits(L.bounds.genome_bits(), rng);
  ind.weights = random_bits(L.weight_bits(decode_hidden_count(ind.arch, L.bounds)), rng);
  ind.params = random_bits(param_genome_bits(a), rng);
  return ind;
}

/// Rebuilds the weight genome for a new hidden count, keeping the genes of
/// every surviving node and of their output connections; genes of new nodes
/// are drawn uniformly.
template <class Rng>
Bits resize_weight_genome(const Bits& old, std::size_t old_hidden, std::size_t new_hidden, const GenomeLayout& L,
                          Rng& rng) {
  const std::size_t B = L.coding.bits_per_weight;
  const std::size_t block = (L.input_dim + 1) * B;
  require(old.size() == L.weight_bits(old_hidden), "weight genome length does not match old hidden count");
  Bits out = random_bits(L.weight_bits(new_hidden), rng);
  const std::size_t keep = std::min(old_hidden, new_hidden);
  std::copy_n(old.begin(), keep * block, out.begin());
  const std::size_t old_out = old_hidden * block, new_out = new_hidden * block;
  std::copy_n(old.begin() + static_cast<std::ptrdiff_t>(old_out), keep * B,
              out.begin() + static_cast<std::ptrdiff_t>(new_out));
  // output bias
  std::copy_n(old.end() - static_cast<std::ptrdiff_t>(B), B, out.end() - static_cast<std::ptrdiff_t>(B));
  return out;
}

enum class Segment { arch, weights, params };

/// Flips one bit and repairs the weight genome if the hidden count changed.
template <class Rng>
void flip_bit(Individual& ind, Segment seg, std::size_t index, const GenomeLayout& L, Rng& rng) {
  Bits& target = seg == Segment::arch ? ind.arch : seg == Segment::weights ? ind.weights : ind.params;
  require(index < target.size(), "bit index out of range");
  const std::size_t before = decode_hidden_count(ind.arch, L.bounds);
  target[index] ^= 1u;
  const std::size_t after = decode_hidden_count(ind.arch, L.bounds);
  if (after != before) ind.weights = resize_weight_genome(ind.weights, before, after, L, rng);
  ind.evaluated = false;
  ind.fitness = std::numeric_limits<double>::infinity();
}

/// With probability `rate` every bit of the chromosome flips independently
/// with probability 1/length; otherwise the individual is returned unchanged
/// (a clone keeps its evaluation).
template <class Rng>
Individual mutate(const Individual& parent, double rate, const GenomeLayout& L, Rng& rng) {
  require(rate >= 0.0 && rate <= 1.0, "mutation rate must lie in [0, 1]");
  Individual child = parent;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  if (!(u(rng) < rate)) return child;
  const std::size_t length = parent.genome_bits();
  const double p = 1.0 / static_cast<double>(length);
  const std::size_t before = decode_hidden_count(child.arch, L.bounds);
  bool changed = false;
  for (Bits* part : {&child.arch, &child.weights, &child.params})
    for (auto& bit : *part)
      if (u(rng) < p) {
        bit ^= 1u;
        changed = true;
      }
  if (!changed) return child;
  const std::size_t after = decode_hidden_count(child.arch, L.bounds);
  if (after != before) child.weights = resize_weight_genome(child.weights, before, after, L, rng);
  child.evaluated = false;
  child.fitness = std::numeric_limits<double>::infinity();
  child.trained = Mlp();
  return child;
}

}  // namespace mleann::evolve

#endif  // MLEANN_EVOLVE_GENOME_HPP
