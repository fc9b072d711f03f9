#ifndef MLEANN_ACTIVATION_HPP
#define MLEANN_ACTIVATION_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string_view>

#include "mleann/flops.hpp"

namespace mleann {

/// Hidden-node transfer function label.
///
/// T and Tstar both evaluate tanh(x); Tstar names the "tanh-sigmoid" form
/// 2/(1+exp(-2x))-1, which is the same function. L and Lstar both evaluate the
/// logistic 1/(1+exp(-x)). S is the fast sigmoid x/(1+|x|). The labels stay
/// distinct so genomes and reports keep the full five-symbol alphabet.
enum class Activation : std::uint8_t { T = 0, L = 1, S = 2, Tstar = 3, Lstar = 4 };

inline constexpr std::size_t kActivationCount = 5;

inline constexpr std::array<Activation, kActivationCount> kAllActivations = {
    Activation::T, Activation::L, Activation::S, Activation::Tstar, Activation::Lstar};

constexpr std::string_view label(Activation a) {
  switch (a) {
    case Activation::T: return "T";
    case Activation::L: return "L";
    case Activation::S: return "S";
    case Activation::Tstar: return "T*";
    case Activation::Lstar: return "L*";
  }
  return "?";
}

inline std::optional<Activation> parse_activation(std::string_view text) {
  for (Activation a : kAllActivations)
    if (label(a) == text) return a;
  return std::nullopt;
}

inline double activate(Activation a, double x) {
  switch (a) {
    case Activation::T:
    case Activation::Tstar: return std::tanh(x);
    case Activation::L:
    case Activation::Lstar: return 1.0 / (1.0 + std::exp(-x));
    case Activation::S: return x / (1.0 + std::abs(x));
  }
  return 0.0;
}

/// Derivative given the pre-activation `x` and the activation value `y`.
inline double activate_derivative(Activation a, double x, double y) {
  switch (a) {
    case Activation::T:
    case Activation::Tstar: return 1.0 - y * y;
    case Activation::L:
    case Activation::Lstar: return y * (1.0 - y);
    case Activation::S: {
      const double d = 1.0 + std::abs(x);
      return 1.0 / (d * d);
    }
  }
  return 0.0;
}

constexpr std::uint64_t activation_flops(Activation a) {
  return a == Activation::S ? 3 : flop_cost::transcendental + 2;
}

constexpr std::uint64_t activation_derivative_flops(Activation a) {
  return a == Activation::S ? 4 : 2;
}

}  // namespace mleann

#endif  // MLEANN_ACTIVATION_HPP
