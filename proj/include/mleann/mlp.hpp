#ifndef MLEANN_MLP_HPP
#define MLEANN_MLP_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "mleann/activation.hpp"
#include "mleann/error.hpp"
#include "mleann/flops.hpp"

namespace mleann {

/// Ordered hidden-layer transfer functions.
using Architecture = std::vector<Activation>;

/// Parses comma-separated `<count><label>` tokens, e.g. "8T,2T*,1L*".
inline Architecture parse_architecture(std::string_view text) {
  Architecture arch;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t comma = text.find(',', pos);
    if (comma == std::string_view::npos) comma = text.size();
    std::string_view token = text.substr(pos, comma - pos);
    while (!token.empty() && token.front() == ' ') token.remove_prefix(1);
    while (!token.empty() && token.back() == ' ') token.remove_suffix(1);
    std::size_t digits = 0;
    while (digits < token.size() && token[digits] >= '0' && token[digits] <= '9') ++digits;
    unsigned count = 0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + digits, count);
    const auto act = parse_activation(token.substr(digits));
    if (digits == 0 || ec != std::errc() || ptr != token.data() + digits || count == 0 || !act)
      throw contract_error("bad architecture token '" + std::string(token) + "'");
    arch.insert(arch.end(), count, *act);
    pos = comma + 1;
  }
  return arch;
}

/// Compact run-length form accepted by parse_architecture ("8T,2T*").
inline std::string format_architecture(const Architecture& arch) {
  std::string out;
  for (std::size_t i = 0; i < arch.size();) {
    std::size_t j = i;
    while (j < arch.size() && arch[j] == arch[i]) ++j;
    if (!out.empty()) out += ',';
    out += std::to_string(j - i);
    out += label(arch[i]);
    i = j;
  }
  return out;
}

/// Report descriptor counting each label in order of first appearance
/// ("8 T, 2 T*, 1 L*").
inline std::string describe_architecture(const Architecture& arch) {
  std::string out;
  std::vector<Activation> seen;
  for (Activation a : arch)
    if (std::find(seen.begin(), seen.end(), a) == seen.end()) seen.push_back(a);
  for (Activation a : seen) {
    if (!out.empty()) out += ", ";
    out += std::to_string(std::count(arch.begin(), arch.end(), a));
    out += ' ';
    out += label(a);
  }
  return out;
}

inline constexpr std::size_t parameter_count(std::size_t input_dim, std::size_t hidden) {
  return input_dim * hidden + hidden + hidden + 1;
}

/// One-hidden-layer network with a single linear output.
///
/// Parameters live in one flat vector. Each hidden node owns a contiguous
/// block of its `input_dim` incoming weights followed by its bias; the output
/// node's block (hidden-to-output weights, then output bias) comes last.
class Mlp {
public:
  Mlp() = default;

  Mlp(std::size_t input_dim, Architecture hidden)
      : input_dim_(input_dim), hidden_(std::move(hidden)),
        params_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(parameter_count(input_dim_, hidden_.size())))) {
    require(input_dim_ > 0, "network needs at least one input");
    require(!hidden_.empty(), "network needs at least one hidden node");
  }

  Mlp(std::size_t input_dim, Architecture hidden, Eigen::VectorXd params) : Mlp(input_dim, std::move(hidden)) {
    set_params(std::move(params));
  }

  std::size_t input_dim() const noexcept { return input_dim_; }
  std::size_t hidden_count() const noexcept { return hidden_.size(); }
  const Architecture& hidden() const noexcept { return hidden_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(params_.size()); }

  const Eigen::VectorXd& params() const noexcept { return params_; }
  std::span<const double> param_span() const noexcept { return {params_.data(), size()}; }

  void set_params(Eigen::VectorXd params) {
    require(static_cast<std::size_t>(params.size()) == parameter_count(input_dim_, hidden_.size()),
            "parameter vector length does not match architecture");
    params_ = std::move(params);
    ++revision_;
  }

  /// Monotone counter bumped by every parameter mutation.
  std::uint64_t revision() const noexcept { return revision_; }

  std::size_t w_in_index(std::size_t input, std::size_t node) const { return node * (input_dim_ + 1) + input; }
  std::size_t b_hid_index(std::size_t node) const { return node * (input_dim_ + 1) + input_dim_; }
  std::size_t w_out_index(std::size_t node) const { return hidden_.size() * (input_dim_ + 1) + node; }
  std::size_t b_out_index() const { return size() - 1; }

  double w_in(std::size_t input, std::size_t node) const { return params_[w_in_index(input, node)]; }
  double b_hid(std::size_t node) const { return params_[b_hid_index(node)]; }
  double w_out(std::size_t node) const { return params_[w_out_index(node)]; }
  double b_out() const { return params_[b_out_index()]; }

  void set(std::size_t index, double value) {
    params_[static_cast<Eigen::Index>(index)] = value;
    ++revision_;
  }

  bool finite() const { return params_.allFinite(); }

private:
  std::size_t input_dim_ = 0;
  Architecture hidden_;
  Eigen::VectorXd params_;
  std::uint64_t revision_ = 0;
};

/// Uniform initialization in [-range, range].
template <class Rng>
Mlp random_mlp(std::size_t input_dim, Architecture hidden, Rng& rng, double range = 0.3) {
  Mlp net(input_dim, std::move(hidden));
  std::uniform_real_distribution<double> dist(-range, range);
  Eigen::VectorXd w(static_cast<Eigen::Index>(net.size()));
  for (Eigen::Index i = 0; i < w.size(); ++i) w[i] = dist(rng);
  net.set_params(std::move(w));
  return net;
}

namespace detail {

// Evaluation kernels over an explicit parameter span so optimizers can
// evaluate trial points without materializing an Mlp.
struct NetShape {
  std::size_t input_dim;
  std::span<const Activation> hidden;

  std::size_t stride() const { return input_dim + 1; }
  std::size_t out_offset() const { return hidden.size() * stride(); }
  std::size_t params() const { return parameter_count(input_dim, hidden.size()); }
};

inline NetShape shape_of(const Mlp& net) { return {net.input_dim(), net.hidden()}; }

inline std::uint64_t forward_flops(const NetShape& s) {
  std::uint64_t f = 1;  // output bias
  for (Activation a : s.hidden) f += 2 * s.input_dim + 2 + activation_flops(a);
  return f;
}

// Backward pass for one row, accumulating into a gradient.
inline std::uint64_t backward_flops(const NetShape& s) {
  std::uint64_t f = 2;
  for (Activation a : s.hidden) f += 2 * s.input_dim + 6 + activation_derivative_flops(a);
  return f;
}

// One Jacobian column (no accumulation).
inline std::uint64_t jacobian_column_flops(const NetShape& s) {
  std::uint64_t f = 0;
  for (Activation a : s.hidden) f += s.input_dim + 2 + activation_derivative_flops(a);
  return f;
}

inline double forward_row(const NetShape& s, const double* w, std::span<const double> x, double* pre, double* act) {
  const std::size_t d = s.input_dim;
  const std::size_t out = s.out_offset();
  double y = w[out + s.hidden.size()];
  for (std::size_t h = 0; h < s.hidden.size(); ++h) {
    const double* node = w + h * s.stride();
    double z = node[d];
    for (std::size_t i = 0; i < d; ++i) z += node[i] * x[i];
    const double a = activate(s.hidden[h], z);
    pre[h] = z;
    act[h] = a;
    y += w[out + h] * a;
  }
  return y;
}

// Writes d y / d w for one row given cached activations, scaled by `scale`.
// With accumulate set, adds into `g` instead of overwriting.
inline void row_sensitivity(const NetShape& s, const double* w, std::span<const double> x, const double* pre,
                            const double* act, double scale, double* g, bool accumulate) {
  const std::size_t d = s.input_dim;
  const std::size_t out = s.out_offset();
  for (std::size_t h = 0; h < s.hidden.size(); ++h) {
    const double delta = scale * w[out + h] * activate_derivative(s.hidden[h], pre[h], act[h]);
    double* node = g + h * s.stride();
    if (accumulate) {
      for (std::size_t i = 0; i < d; ++i) node[i] += delta * x[i];
      node[d] += delta;
      g[out + h] += scale * act[h];
    } else {
      for (std::size_t i = 0; i < d; ++i) node[i] = delta * x[i];
      node[d] = delta;
      g[out + h] = scale * act[h];
    }
  }
  if (accumulate)
    g[out + s.hidden.size()] += scale;
  else
    g[out + s.hidden.size()] = scale;
}

}  // namespace detail

/// Cached intermediates for one (network, input row) evaluation.
struct EvalTape {
  std::vector<double> pre;
  std::vector<double> act;
  std::vector<double> x;
  double y = 0.0;
  const Mlp* net = nullptr;
  std::uint64_t revision = 0;

  bool matches(const Mlp& other) const noexcept { return net == &other && revision == other.revision(); }
};

inline std::pair<double, EvalTape> forward(const Mlp& net, std::span<const double> x, FlopLedger* ledger = nullptr) {
  if (x.size() != net.input_dim())
    throw contract_error("input length " + std::to_string(x.size()) + " does not match network input_dim " +
                         std::to_string(net.input_dim()));
  EvalTape tape;
  tape.pre.resize(net.hidden_count());
  tape.act.resize(net.hidden_count());
  tape.x.assign(x.begin(), x.end());
  const auto shape = detail::shape_of(net);
  tape.y = detail::forward_row(shape, net.params().data(), x, tape.pre.data(), tape.act.data());
  tape.net = &net;
  tape.revision = net.revision();
  charge(ledger, detail::forward_flops(shape));
  return {tape.y, std::move(tape)};
}

/// d y / d w for the row the tape was recorded on.
inline Eigen::VectorXd output_sensitivity(const Mlp& net, const EvalTape& tape) {
  if (!tape.matches(net)) throw contract_error("evaluation tape does not belong to this network state");
  Eigen::VectorXd g(static_cast<Eigen::Index>(net.size()));
  detail::row_sensitivity(detail::shape_of(net), net.params().data(), tape.x, tape.pre.data(), tape.act.data(), 1.0,
                          g.data(), false);
  return g;
}

/// Plain-text net file: one header line, then one parameter per line.
inline void save_mlp(const Mlp& net, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot open " + path + " for writing");
  out << "mleann-net input_dim=" << net.input_dim() << " hidden=" << format_architecture(net.hidden()) << '\n';
  char buf[40];
  for (double w : net.param_span()) {
    std::snprintf(buf, sizeof buf, "%.17g\n", w);
    out << buf;
  }
  if (!out) throw io_error("write failed for " + path);
}

inline Mlp load_mlp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open " + path);
  std::string magic, dim_field, hidden_field;
  in >> magic >> dim_field >> hidden_field;
  if (magic != "mleann-net" || dim_field.rfind("input_dim=", 0) != 0 || hidden_field.rfind("hidden=", 0) != 0)
    throw data_error(path + ":1: not a net file");
  const std::size_t dim = std::stoul(dim_field.substr(10));
  Mlp net(dim, parse_architecture(hidden_field.substr(7)));
  Eigen::VectorXd w(static_cast<Eigen::Index>(net.size()));
  for (Eigen::Index i = 0; i < w.size(); ++i)
    if (!(in >> w[i])) throw data_error(path + ":" + std::to_string(i + 2) + ": missing parameter");
  net.set_params(std::move(w));
  return net;
}

}  // namespace mleann

#endif  // MLEANN_MLP_HPP
