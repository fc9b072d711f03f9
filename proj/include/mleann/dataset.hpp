#ifndef MLEANN_DATASET_HPP
#define MLEANN_DATASET_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <fstream>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mleann/error.hpp"

namespace mleann {

/// Read-only view over a contiguous run of supervised rows.
class DatasetSlice {
public:
  DatasetSlice() = default;
  DatasetSlice(std::span<const double> inputs, std::span<const double> targets,
               std::span<const long> times, std::size_t input_dim)
      : inputs_(inputs), targets_(targets), times_(times), input_dim_(input_dim) {
    require(input_dim_ > 0, "input dimension must be positive");
    require(inputs_.size() == targets_.size() * input_dim_, "slice inputs/targets size mismatch");
    require(times_.empty() || times_.size() == targets_.size(), "slice times size mismatch");
  }

  std::size_t size() const noexcept { return targets_.size(); }
  bool empty() const noexcept { return targets_.empty(); }
  std::size_t input_dim() const noexcept { return input_dim_; }

  std::span<const double> x(std::size_t row) const {
    return inputs_.subspan(row * input_dim_, input_dim_);
  }
  double target(std::size_t row) const { return targets_[row]; }
  long time(std::size_t row) const { return times_.empty() ? static_cast<long>(row) : times_[row]; }

  std::span<const double> targets() const noexcept { return targets_; }

  DatasetSlice subslice(std::size_t begin, std::size_t end) const {
    require(begin <= end && end <= size(), "subslice out of range");
    return DatasetSlice(inputs_.subspan(begin * input_dim_, (end - begin) * input_dim_),
                        targets_.subspan(begin, end - begin),
                        times_.empty() ? times_ : times_.subspan(begin, end - begin), input_dim_);
  }

private:
  std::span<const double> inputs_;
  std::span<const double> targets_;
  std::span<const long> times_;
  std::size_t input_dim_ = 1;
};

/// Supervised rows (input vector, scalar target) with a contiguous train prefix.
struct Dataset {
  std::string name;
  std::size_t input_dim = 0;
  std::vector<double> inputs;  // row-major, rows x input_dim
  std::vector<double> targets;
  std::vector<long> times;     // raw series index of each row's "current" sample
  std::size_t train_count = 0;
  bool synthetic = false;

  std::size_t rows() const noexcept { return targets.size(); }

  void add_row(std::span<const double> x, double target, long time) {
    require(x.size() == input_dim, "row width does not match input_dim");
    inputs.insert(inputs.end(), x.begin(), x.end());
    targets.push_back(target);
    times.push_back(time);
  }

  DatasetSlice all() const { return DatasetSlice(inputs, targets, times, input_dim); }

  void validate() const {
    require(input_dim > 0, "dataset input_dim must be positive");
    require(inputs.size() == rows() * input_dim, "dataset inputs size mismatch");
    require(times.size() == rows(), "dataset times size mismatch");
    require(train_count > 0 && train_count < rows(), "train_count must satisfy 0 < train_count < rows");
  }
};

/// Contiguous prefix split; no shuffling.
inline std::pair<DatasetSlice, DatasetSlice> split(const Dataset& ds) {
  ds.validate();
  const DatasetSlice all = ds.all();
  return {all.subslice(0, ds.train_count), all.subslice(ds.train_count, ds.rows())};
}

/// Carves the last `fraction` of the training rows off as a validation slice.
inline std::pair<DatasetSlice, DatasetSlice> split_validation(const Dataset& ds, double fraction = 0.2) {
  require(fraction > 0.0 && fraction < 1.0, "validation fraction must be in (0, 1)");
  const DatasetSlice train = split(ds).first;
  const auto held = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(train.size() * fraction)));
  require(held < train.size(), "training split too small for a validation carve-out");
  return {train.subslice(0, train.size() - held), train.subslice(train.size() - held, train.size())};
}

/// Min-max scaling of every input column and the target into [0, 1], with
/// ranges taken from the training rows only.
inline Dataset minmax_normalize(const Dataset& ds) {
  ds.validate();
  Dataset out = ds;
  const std::size_t d = ds.input_dim;
  auto rescale = [&](auto get, auto set, std::size_t count_cols) {
    for (std::size_t c = 0; c < count_cols; ++c) {
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (std::size_t r = 0; r < ds.train_count; ++r) {
        lo = std::min(lo, get(r, c));
        hi = std::max(hi, get(r, c));
      }
      const double span = hi > lo ? hi - lo : 1.0;
      for (std::size_t r = 0; r < ds.rows(); ++r) set(r, c, (get(r, c) - lo) / span);
    }
  };
  rescale([&](std::size_t r, std::size_t c) { return ds.inputs[r * d + c]; },
          [&](std::size_t r, std::size_t c, double v) { out.inputs[r * d + c] = v; }, d);
  rescale([&](std::size_t r, std::size_t) { return ds.targets[r]; },
          [&](std::size_t r, std::size_t, double v) { out.targets[r] = v; }, 1);
  out.name = ds.name + "-normalized";
  return out;
}

/// Writes `t,in1..inK,target` CSV.
inline void write_dataset_csv(const Dataset& ds, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot open " + path + " for writing");
  out << "t";
  for (std::size_t c = 0; c < ds.input_dim; ++c) out << ",in" << (c + 1);
  out << ",target\n";
  char buf[64];
  for (std::size_t r = 0; r < ds.rows(); ++r) {
    out << ds.times[r];
    for (std::size_t c = 0; c < ds.input_dim; ++c) {
      std::snprintf(buf, sizeof buf, ",%.6g", ds.inputs[r * ds.input_dim + c]);
      out << buf;
    }
    std::snprintf(buf, sizeof buf, ",%.6g\n", ds.targets[r]);
    out << buf;
  }
  if (!out) throw io_error("write failed for " + path);
}

}  // namespace mleann

#endif  // MLEANN_DATASET_HPP
