#ifndef MLEANN_DATA_SERIES_HPP
#define MLEANN_DATA_SERIES_HPP

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "mleann/error.hpp"

namespace mleann::data {

/// Uniformly sampled scalar series. `start` is the raw index of values[0],
/// which is nonzero for derived series such as trailing moving averages.
struct Series {
  std::string name;
  std::vector<double> values;
  double dt = 1.0;
  long start = 0;

  std::size_t size() const noexcept { return values.size(); }

  /// Value at raw index t.
  double at(long t) const {
    require(t >= start && t < start + static_cast<long>(values.size()), "series index out of range");
    return values[static_cast<std::size_t>(t - start)];
  }

  void validate() const {
    require(!values.empty(), "series " + name + " is empty");
    for (std::size_t i = 0; i < values.size(); ++i)
      if (!std::isfinite(values[i])) throw data_error("series " + name + " has a non-finite value at index " +
                                                      std::to_string(start + static_cast<long>(i)));
  }
};

/// Trailing mean of the last `window` samples; entry for raw index t covers
/// t-window+1 .. t, so the result starts at raw index start+window-1.
inline Series moving_average(const Series& s, std::size_t window) {
  require(window >= 1, "moving-average window must be at least 1");
  if (window > s.size())
    throw contract_error("moving-average window " + std::to_string(window) + " exceeds series length " +
                         std::to_string(s.size()));
  Series out;
  out.name = s.name + "-ma" + std::to_string(window);
  out.dt = s.dt;
  out.start = s.start + static_cast<long>(window) - 1;
  out.values.reserve(s.size() - window + 1);
  // Each window is summed directly so values do not drift with the series length.
  for (std::size_t end = window; end <= s.size(); ++end) {
    double sum = 0.0;
    for (std::size_t i = end - window; i < end; ++i) sum += s.values[i];
    out.values.push_back(sum / static_cast<double>(window));
  }
  return out;
}

/// Writes `t,value` CSV with t in the series' time units.
inline void write_series_csv(const Series& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot open " + path + " for writing");
  out << "t,value\n";
  char buf[64];
  for (std::size_t i = 0; i < s.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.6g,%.6g\n", (s.start + static_cast<double>(i)) * s.dt, s.values[i]);
    out << buf;
  }
  if (!out) throw io_error("write failed for " + path);
}

}  // namespace mleann::data

#endif  // MLEANN_DATA_SERIES_HPP
