#ifndef MLEANN_BENCH_EMIT_HPP
#define MLEANN_BENCH_EMIT_HPP

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "mleann/bench/experiment.hpp"

namespace mleann::bench {

/// Six significant digits; non-finite values as inf, -inf, nan.
inline std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

/// Quotes a field containing a comma or quote.
inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

namespace detail {

class CsvFile {
public:
  CsvFile(const std::filesystem::path& path, const std::string& header) : path_(path), out_(path) {
    if (!out_) throw io_error("cannot open " + path_.string() + " for writing");
    out_ << header << '\n';
  }
  std::ofstream& out() { return out_; }
  void close() {
    out_.close();
    if (!out_) throw io_error("write failed for " + path_.string());
  }

private:
  std::filesystem::path path_;
  std::ofstream out_;
};

}  // namespace detail

inline void write_results_csv(const std::vector<ResultRow>& rows, const std::filesystem::path& path) {
  detail::CsvFile f(path, "dataset,protocol,algorithm,architecture,train_rmse,test_rmse,flops,seed,status,synthetic");
  for (const auto& r : rows)
    f.out() << r.dataset << ',' << r.protocol << ',' << name(r.algorithm) << ',' << csv_field(r.architecture) << ','
            << fmt(r.train_rmse) << ',' << fmt(r.test_rmse) << ',' << r.flops << ',' << r.seed << ',' << r.status()
            << ',' << (r.synthetic ? 1 : 0) << '\n';
  f.close();
}

inline void write_replicates_csv(const std::vector<ReplicateRow>& reps, const std::filesystem::path& path) {
  detail::CsvFile f(path,
                    "dataset,protocol,algorithm,architecture,replicate,seed,train_rmse,test_rmse,flops,epochs,termination");
  for (const auto& r : reps)
    f.out() << r.dataset << ',' << r.protocol << ',' << name(r.algorithm) << ',' << csv_field(r.architecture) << ','
            << r.replicate << ',' << r.seed << ',' << fmt(r.train_rmse) << ',' << fmt(r.test_rmse) << ',' << r.flops
            << ',' << r.epochs << ',' << r.termination << '\n';
  f.close();
}

inline void write_traces_csv(const std::vector<TraceRow>& traces, const std::filesystem::path& path) {
  detail::CsvFile f(path, "stream,generation,best_rmse,mean_rmse,best_arch");
  for (const auto& t : traces)
    f.out() << t.stream << ',' << t.generation << ',' << fmt(t.best) << ',' << fmt(t.mean) << ','
            << csv_field(t.best_arch) << '\n';
  f.close();
}

/// Computational load per (dataset, architecture, algorithm).
inline void write_flops_csv(const std::vector<ResultRow>& rows, const std::filesystem::path& path) {
  detail::CsvFile f(path, "dataset,architecture,algorithm,flops");
  for (const auto& r : rows)
    f.out() << r.dataset << ',' << csv_field(r.architecture) << ',' << name(r.algorithm) << ',' << r.flops << '\n';
  f.close();
}

/// Wall-clock seconds; kept apart because it differs between runs.
inline void write_timing_csv(const std::vector<ResultRow>& rows, const std::filesystem::path& path) {
  detail::CsvFile f(path, "dataset,protocol,algorithm,architecture,wall_seconds");
  for (const auto& r : rows)
    f.out() << r.dataset << ',' << r.protocol << ',' << name(r.algorithm) << ',' << csv_field(r.architecture) << ','
            << fmt(r.wall_seconds) << '\n';
  f.close();
}

/// Writes results.csv, traces.csv, flops.csv and replicates.csv into
/// `out_dir` (created if needed), plus timing.csv when asked.
inline void emit_results(const ExperimentResult& res, const std::filesystem::path& out_dir, bool timing = false) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw io_error("cannot create " + out_dir.string() + ": " + ec.message());
  write_results_csv(res.rows, out_dir / "results.csv");
  write_traces_csv(res.traces, out_dir / "traces.csv");
  write_flops_csv(res.rows, out_dir / "flops.csv");
  write_replicates_csv(res.replicates, out_dir / "replicates.csv");
  if (timing) write_timing_csv(res.rows, out_dir / "timing.csv");
}

}  // namespace mleann::bench

#endif  // MLEANN_BENCH_EMIT_HPP
