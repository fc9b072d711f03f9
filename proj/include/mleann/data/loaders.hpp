#ifndef MLEANN_DATA_LOADERS_HPP
#define MLEANN_DATA_LOADERS_HPP

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "mleann/data/series.hpp"
#include "mleann/dataset.hpp"
#include "mleann/error.hpp"

namespace mleann::data {

/// Parses numeric text with `columns` values per line, separated by commas
/// and/or whitespace. Blank lines and '#' comments are skipped.
inline std::vector<std::vector<double>> parse_columns(std::istream& in, std::size_t columns,
                                                      const std::string& source) {
  std::vector<std::vector<double>> cols(columns);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    std::string token;
    std::vector<double> row;
    while (fields >> token) {
      double v = 0.0;
      const auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
      if (ec != std::errc() || end != token.data() + token.size() || !std::isfinite(v))
        throw data_error(source + ":" + std::to_string(line_no) + ": cannot parse '" + token + "' as a number");
      row.push_back(v);
    }
    if (row.empty()) continue;
    if (row.size() != columns)
      throw data_error(source + ":" + std::to_string(line_no) + ": expected " + std::to_string(columns) +
                       " column(s), found " + std::to_string(row.size()));
    for (std::size_t c = 0; c < columns; ++c) cols[c].push_back(row[c]);
  }
  return cols;
}

inline std::vector<std::vector<double>> read_columns(const std::string& path, std::size_t columns) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open " + path);
  return parse_columns(in, columns, path);
}

/// Rows (u(t), y(t)) -> y(t+1) over the last min(292, n-1) transitions of the
/// raw (u, y) pairs; half the rows train.
inline Dataset gas_furnace_dataset(const std::vector<double>& u, const std::vector<double>& y,
                                   std::ostream* warn = &std::cerr) {
  require(u.size() == y.size(), "gas furnace columns differ in length");
  const std::size_t raw = u.size();
  if (raw < 5) throw data_error("gas furnace data needs at least 5 rows, got " + std::to_string(raw));
  if (warn && (raw < 290 || raw > 296))
    *warn << "warning: gas furnace data has " << raw << " rows; the Box-Jenkins series has 296\n";
  const std::size_t count = std::min<std::size_t>(292, raw - 1);
  Dataset ds;
  ds.name = "gas-furnace";
  ds.input_dim = 2;
  for (std::size_t t = raw - 1 - count; t + 1 < raw; ++t) {
    const double x[2] = {u[t], y[t]};
    ds.add_row(x, y[t + 1], static_cast<long>(t));
  }
  ds.train_count = count / 2;
  ds.validate();
  return ds;
}

inline Dataset load_gas_furnace(const std::string& path, std::ostream* warn = &std::cerr) {
  const auto cols = read_columns(path, 2);
  return gas_furnace_dataset(cols[0], cols[1], warn);
}

/// Rows (f(t), f(t-1), a(t), b(t)) -> f(t+1), where a and b are the trailing
/// 12- and 24-sample means; rows start where the 24-sample mean exists.
inline Dataset wastewater_dataset(const Series& flow, std::size_t train_count = 240) {
  flow.validate();
  if (flow.size() < 26) throw data_error("wastewater data needs at least 26 samples, got " + std::to_string(flow.size()));
  const Series a = moving_average(flow, 12);
  const Series b = moving_average(flow, 24);
  Dataset ds;
  ds.name = "wastewater";
  ds.input_dim = 4;
  const long last = flow.start + static_cast<long>(flow.size()) - 2;
  for (long t = b.start; t <= last; ++t) {
    const double x[4] = {flow.at(t), flow.at(t - 1), a.at(t), b.at(t)};
    ds.add_row(x, flow.at(t + 1), t);
  }
  if (train_count >= ds.rows())
    throw data_error("wastewater data yields " + std::to_string(ds.rows()) + " rows, not enough for " +
                     std::to_string(train_count) + " training rows");
  ds.train_count = train_count;
  ds.validate();
  return ds;
}

inline Series load_wastewater_series(const std::string& path) {
  Series s;
  s.name = "wastewater";
  s.values = read_columns(path, 1)[0];
  if (s.values.empty()) throw data_error(path + ": no samples");
  return s;
}

inline Dataset load_wastewater(const std::string& path) { return wastewater_dataset(load_wastewater_series(path)); }

}  // namespace mleann::data

#endif  // MLEANN_DATA_LOADERS_HPP
