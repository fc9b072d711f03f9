#ifndef MLEANN_DATA_REGISTRY_HPP
#define MLEANN_DATA_REGISTRY_HPP

#include <array>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <string_view>

#include "mleann/data/loaders.hpp"
#include "mleann/data/mackey_glass.hpp"
#include "mleann/data/series.hpp"
#include "mleann/data/synthetic.hpp"
#include "mleann/dataset.hpp"

namespace mleann::data {

inline constexpr std::array<std::string_view, 3> kDatasetIds = {"mackey-glass", "gas-furnace", "wastewater"};

inline bool is_dataset_id(std::string_view id) {
  for (auto known : kDatasetIds)
    if (known == id) return true;
  return false;
}

struct DataOptions {
  std::string path;         // measured file; empty means the environment variable, then synthetic
  std::uint64_t seed = 1;   // seed of the synthetic generators
  bool normalize = false;   // min-max scaling fitted on the training rows
  std::ostream* warn = &std::cerr;
};

/// Environment variable naming the measured file of a dataset, if any.
inline std::optional<std::string> data_path_variable(std::string_view id) {
  if (id == "gas-furnace") return "MLEANN_GAS_FURNACE";
  if (id == "wastewater") return "MLEANN_WASTEWATER";
  return std::nullopt;
}

inline std::string resolve_data_path(std::string_view id, const DataOptions& opt) {
  if (!opt.path.empty()) return opt.path;
  if (const auto var = data_path_variable(id))
    if (const char* value = std::getenv(var->c_str()); value && *value) return value;
  return {};
}

/// The raw series behind a dataset id (gas furnace: the output column y).
inline Series load_series(std::string_view id, const DataOptions& opt = {}) {
  const std::string path = resolve_data_path(id, opt);
  if (id == "mackey-glass") return mackey_glass_generate();
  if (id == "wastewater") return path.empty() ? synthetic_wastewater(opt.seed) : load_wastewater_series(path);
  if (id == "gas-furnace") {
    Series s;
    s.name = "gas-furnace";
    s.values = path.empty() ? synthetic_gas_furnace(opt.seed).second : read_columns(path, 2)[1];
    return s;
  }
  throw contract_error("unknown dataset '" + std::string(id) + "' (expected mackey-glass, gas-furnace or wastewater)");
}

inline Dataset load_dataset(std::string_view id, const DataOptions& opt = {}) {
  const std::string path = resolve_data_path(id, opt);
  Dataset ds;
  if (id == "mackey-glass") {
    ds = embed_mackey(mackey_glass_generate());
  } else if (id == "wastewater") {
    ds = path.empty() ? wastewater_dataset(synthetic_wastewater(opt.seed)) : load_wastewater(path);
    ds.synthetic = path.empty();
  } else if (id == "gas-furnace") {
    if (path.empty()) {
      const auto [u, y] = synthetic_gas_furnace(opt.seed);
      ds = gas_furnace_dataset(u, y, opt.warn);
    } else {
      ds = load_gas_furnace(path, opt.warn);
    }
    ds.synthetic = path.empty();
  } else {
    throw contract_error("unknown dataset '" + std::string(id) + "' (expected mackey-glass, gas-furnace or wastewater)");
  }
  if (opt.normalize) ds = minmax_normalize(ds);
  return ds;
}

}  // namespace mleann::data

#endif  // MLEANN_DATA_REGISTRY_HPP
