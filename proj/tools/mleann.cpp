// mleann command-line front end: gen-data, train, evolve, bench.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "mleann/mleann.hpp"

namespace fs = std::filesystem;
using namespace mleann;

namespace {

enum Exit { exit_ok = 0, exit_usage = 2, exit_data = 3, exit_numeric = 4 };

struct Common {
  std::uint64_t seed = 1;
  bool serial = false;
  std::size_t threads = 0;
  std::string out_dir = "out";
  bool normalize = false;
};

void add_common(CLI::App* cmd, Common& c, std::string& config_path) {
  // Consumed by expand_config before parsing; declared so --help lists it.
  cmd->add_option("--config", config_path, "Read flags from a `key = value` file (flags on the command line win)");
  cmd->add_option("--seed", c.seed, "Random seed")->capture_default_str();
  cmd->add_flag("--serial", c.serial, "Single-threaded execution");
  cmd->add_option("--threads", c.threads, "Worker threads (0: all cores)")->capture_default_str();
  cmd->add_option("--out", c.out_dir, "Output directory (env MLEANN_OUT_DIR)")
      ->envname("MLEANN_OUT_DIR")
      ->capture_default_str();
  cmd->add_flag("--normalize", c.normalize, "Min-max scale inputs and target using the training rows");
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  s = s.substr(b, e - b + 1);
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) s = s.substr(1, s.size() - 2);
  return s;
}

/// Appends the entries of every `--config FILE` as flags not already given
/// on the command line. Keys are flag names without dashes; `true`/`false`
/// switch boolean flags. Unknown keys then fail parsing like unknown flags.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  std::vector<std::string> files;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) files.push_back(args[i + 1]);
    else if (args[i].rfind("--config=", 0) == 0) files.push_back(args[i].substr(9));
  }
  auto given = [&](const std::string& flag) {
    for (std::size_t i = 1; i < args.size(); ++i)
      if (args[i] == flag || args[i].rfind(flag + "=", 0) == 0) return true;
    return false;
  };
  std::vector<std::string> extra;
  for (const auto& file : files) {
    std::ifstream in(file);
    if (!in) throw io_error("cannot open config file " + file);
    std::string line;
    for (std::size_t n = 1; std::getline(in, line); ++n) {
      if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      if (trim(line).empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw contract_error(file + ":" + std::to_string(n) + ": expected key = value");
      const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
      if (key.empty() || key == "config") throw contract_error(file + ":" + std::to_string(n) + ": bad key");
      const std::string flag = "--" + key;
      if (given(flag)) continue;
      if (value == "true") extra.push_back(flag);
      else if (value != "false") extra.insert(extra.end(), {flag, value});
    }
  }
  args.insert(args.end(), extra.begin(), extra.end());
  return args;
}

const std::vector<std::string>& dataset_ids() {
  static const std::vector<std::string> ids(data::kDatasetIds.begin(), data::kDatasetIds.end());
  return ids;
}

data::DataOptions data_options(const Common& c, const std::string& path) {
  data::DataOptions opt;
  opt.path = path;
  opt.seed = c.seed;
  opt.normalize = c.normalize;
  return opt;
}

fs::path prepare_out(const Common& c) {
  std::error_code ec;
  fs::create_directories(c.out_dir, ec);
  if (ec) throw io_error("cannot create " + c.out_dir + ": " + ec.message());
  return c.out_dir;
}

Dataset load(const std::string& id, const Common& c, const std::string& path) {
  Dataset ds = data::load_dataset(id, data_options(c, path));
  if (ds.synthetic) std::cerr << "note: " << id << " uses the synthetic surrogate (no measured file given)\n";
  return ds;
}

std::vector<Algorithm> parse_algos(const std::vector<std::string>& names) {
  std::vector<Algorithm> out;
  for (const auto& n : names) {
    const auto a = parse_algorithm(n);
    if (!a) throw contract_error("unknown algorithm '" + n + "' (expected bp, scg, qna or lm)");
    out.push_back(*a);
  }
  return out;
}

// Trainer parameter flags shared by train and bench.
struct TrainerFlags {
  std::optional<double> lr, momentum, sigma, lambda, mu, step_init, step_limit, perf_scale, step_scale;

  void add(CLI::App* cmd) {
    cmd->add_option("--lr", lr, "BP learning rate");
    cmd->add_option("--momentum", momentum, "BP momentum");
    cmd->add_option("--sigma", sigma, "SCG finite-difference step");
    cmd->add_option("--lambda", lambda, "SCG initial scaling");
    cmd->add_option("--mu", mu, "LM initial damping");
    cmd->add_option("--step-init", step_init, "QNA first trial step length");
    cmd->add_option("--step-limit", step_limit, "QNA bracketing expansion limit");
    cmd->add_option("--perf-scale", perf_scale, "QNA sufficient-decrease constant");
    cmd->add_option("--step-scale", step_scale, "QNA curvature constant");
  }

  TrainerConfig config(Algorithm a, std::size_t epochs) const {
    TrainerConfig cfg = default_config(a, epochs);
    auto set = [](double& field, const std::optional<double>& v) {
      if (v) field = *v;
    };
    std::visit(
        [&](auto& c) {
          using C = std::decay_t<decltype(c)>;
          if constexpr (std::is_same_v<C, BpConfig>) {
            set(c.learning_rate, lr);
            set(c.momentum, momentum);
          } else if constexpr (std::is_same_v<C, ScgConfig>) {
            set(c.sigma, sigma);
            set(c.lambda, lambda);
          } else if constexpr (std::is_same_v<C, QnaConfig>) {
            set(c.step_init, step_init);
            set(c.step_limit, step_limit);
            set(c.perf_scale, perf_scale);
            set(c.step_scale, step_scale);
          } else {
            set(c.mu, mu);
          }
        },
        cfg);
    return cfg;
  }
};

// ------------------------------------------------------------------ gen-data

struct GenDataArgs {
  Common common;
  std::string id;
  std::string data_file;
};

int cmd_gen_data(const GenDataArgs& a) {
  const fs::path out = prepare_out(a.common);
  data::DataOptions opt = data_options(a.common, a.data_file);
  const data::Series s = data::load_series(a.id, opt);
  const Dataset ds = load(a.id, a.common, a.data_file);
  data::write_series_csv(s, (out / (a.id + "_series.csv")).string());
  write_dataset_csv(ds, (out / (a.id + "_dataset.csv")).string());
  std::cout << a.id << ": " << s.size() << " samples, " << ds.rows() << " rows (" << ds.train_count
            << " train) -> " << out.string() << "\n";
  return exit_ok;
}

// --------------------------------------------------------------------- train

struct TrainArgs {
  Common common;
  std::string data = "mackey-glass";
  std::string data_file;
  std::string algo = "lm";
  std::string arch = "24T*";
  std::size_t epochs = 2500;
  double init_range = 0.3;
  std::string init_net;
  TrainerFlags params;
};

int cmd_train(const TrainArgs& a) {
  const Algorithm algo = parse_algos({a.algo}).front();
  const Architecture arch = parse_architecture(a.arch);
  const Dataset ds = load(a.data, a.common, a.data_file);
  const auto [train_rows, test_rows] = split(ds);
  Mlp start;
  if (!a.init_net.empty()) {
    start = load_mlp(a.init_net);
  } else {
    std::mt19937_64 rng(a.common.seed);
    start = random_mlp(ds.input_dim, arch, rng, a.init_range);
  }
  TrainOptions topt;
  topt.monitor = test_rows;
  const TrainReport report = train(start, train_rows, a.params.config(algo, a.epochs), topt);

  const fs::path out = prepare_out(a.common);
  {
    std::ofstream csv(out / "train_report.csv");
    if (!csv) throw io_error("cannot open " + (out / "train_report.csv").string() + " for writing");
    csv << "epoch,train_rmse,test_rmse,flops\n";
    auto row = [&](std::size_t epoch, const TrainEpoch& e) {
      csv << epoch << ',' << bench::fmt(e.train_rmse) << ',' << bench::fmt(e.test_rmse) << ',' << e.flops << '\n';
    };
    row(0, report.initial);
    for (std::size_t i = 0; i < report.epochs.size(); ++i) row(i + 1, report.epochs[i]);
    if (!csv) throw io_error("write failed for " + (out / "train_report.csv").string());
  }
  save_mlp(report.net, (out / "net.txt").string());

  double test = 0.0;
  try {
    test = rmse(report.net, test_rows);
  } catch (const numeric_error&) {
    test = std::numeric_limits<double>::infinity();
  }
  std::cout << name(algo) << " " << describe_architecture(start.hidden()) << " on " << a.data << ": "
            << report.epochs_executed() << " epochs, " << optim::to_string(report.reason) << ", flops "
            << report.flops << "\n";
  std::cout << "final train RMSE " << bench::fmt(report.final_train_rmse()) << "\n";
  std::cout << "final test RMSE " << bench::fmt(test) << "\n";
  if (report.aborted()) {
    std::cerr << "error: training aborted at epoch " << report.failed_epoch << ": "
              << optim::to_string(report.reason) << (report.message.empty() ? "" : " (" + report.message + ")")
              << "\n";
    return exit_numeric;
  }
  return exit_ok;
}

// ------------------------------------------------------------ evolve / bench

struct EvolutionFlags {
  evolve::EvolutionConfig cfg;
  std::string fitness_split = "test";

  void add(CLI::App* cmd) {
    cmd->add_option("--pop", cfg.population, "Population size")->capture_default_str();
    cmd->add_option("--gens", cfg.generations, "Generations")->capture_default_str();
    cmd->add_option("--hidden-min", cfg.hidden.lo, "Fewest hidden nodes")->capture_default_str();
    cmd->add_option("--hidden-max", cfg.hidden.hi, "Most hidden nodes")->capture_default_str();
    cmd->add_option("--weight-range", cfg.weight_range, "Initial weight range")->capture_default_str();
    cmd->add_option("--bits", cfg.bits_per_weight, "Bits per weight")->capture_default_str();
    cmd->add_option("--selection", cfg.selection_fraction, "Fraction of ranked parents")->capture_default_str();
    cmd->add_option("--elitism", cfg.elitism, "Fraction copied unchanged")->capture_default_str();
    cmd->add_option("--mutation", cfg.mutation_rate, "Mutation rate")->capture_default_str();
    cmd->add_flag("--lamarckian", cfg.lamarckian, "Write trained weights back into genomes");
    cmd->add_option("--fitness-split", fitness_split, "Rows scored as fitness")
        ->check(CLI::IsMember({"test", "validation"}))
        ->capture_default_str();
  }

  evolve::EvolutionConfig config(std::size_t epochs, const Common& c) const {
    evolve::EvolutionConfig out = cfg;
    out.epochs_per_eval = epochs;
    out.seed = c.seed;
    out.serial = c.serial;
    out.threads = c.threads;
    out.fitness_split = fitness_split == "validation" ? evolve::FitnessSplit::validation : evolve::FitnessSplit::test;
    return out;
  }
};

struct BenchArgs {
  Common common;
  std::string protocol = "conventional";
  std::string data = "all";
  std::string data_file;
  std::vector<std::string> algos{"bp", "scg", "qna", "lm"};
  std::vector<std::size_t> hidden{14, 16, 18, 20, 24};
  std::string activation = "T*";
  std::optional<std::size_t> epochs;
  std::size_t replicates = 3;
  bool restrict_arch = false;
  bool timing = false;
  TrainerFlags params;
  EvolutionFlags evolution;
};

void print_rows(const std::vector<bench::ResultRow>& rows) {
  std::printf("%-14s %-18s %-4s %-22s %12s %12s %14s\n", "dataset", "protocol", "algo", "architecture", "train_rmse",
              "test_rmse", "flops");
  for (const auto& r : rows)
    std::printf("%-14s %-18s %-4s %-22s %12s %12s %14llu%s\n", r.dataset.c_str(), r.protocol.c_str(),
                std::string(name(r.algorithm)).c_str(), r.architecture.c_str(), bench::fmt(r.train_rmse).c_str(),
                bench::fmt(r.test_rmse).c_str(), static_cast<unsigned long long>(r.flops),
                r.aborted ? ("  " + r.status()).c_str() : "");
}

int cmd_bench(const BenchArgs& a) {
  const bool mleann = a.protocol == "mleann";
  const auto algorithms = parse_algos(a.algos);
  const auto act = parse_activation(a.activation);
  if (!act) throw contract_error("unknown activation '" + a.activation + "' (expected T, L, S, T* or L*)");
  if (a.data == "all" && !a.data_file.empty()) throw contract_error("--data-file needs a single --data id");

  bench::ExperimentResult all;
  bool any_abort = false;
  const std::vector<std::string> ids = a.data == "all" ? dataset_ids() : std::vector<std::string>{a.data};
  for (const auto& id : ids) {
    bench::ExperimentSpec spec;
    spec.dataset = id;
    spec.protocol = mleann ? bench::Protocol::mleann : bench::Protocol::conventional;
    spec.algorithms = algorithms;
    spec.replicates = a.replicates;
    spec.seed = a.common.seed;
    spec.serial = a.common.serial;
    spec.threads = a.common.threads;
    spec.restrict_arch = a.restrict_arch;
    spec.epochs = a.epochs.value_or(mleann ? 500 : 2500);
    for (std::size_t h : a.hidden) spec.architectures.emplace_back(h, *act);
    for (Algorithm algo : algorithms) spec.trainer_configs.push_back(a.params.config(algo, spec.epochs));
    spec.evolution = a.evolution.config(spec.epochs, a.common);
    auto res = bench::run_experiment(spec, load(id, a.common, a.data_file));
    for (const auto& r : res.rows) any_abort = any_abort || r.aborted;
    all.append(std::move(res));
  }
  const fs::path out = prepare_out(a.common);
  bench::emit_results(all, out, a.timing);
  print_rows(all.rows);
  std::cout << all.rows.size() << " rows -> " << out.string() << "\n";
  if (any_abort) std::cerr << "warning: some runs ended in a trainer abort (see status column)\n";
  return exit_ok;
}

int run(int argc, char** argv) {
  CLI::App app{"Evolutionary meta-learning of neural networks for time-series prediction"};
  app.require_subcommand(1);
  std::string config_path;

  GenDataArgs gen;
  auto* cmd_gen = app.add_subcommand("gen-data", "Write a series and its embedded dataset as CSV");
  add_common(cmd_gen, gen.common, config_path);
  cmd_gen->add_option("id", gen.id, "Series id")->required()->check(CLI::IsMember(dataset_ids()));
  cmd_gen->add_option("--data-file", gen.data_file, "Measured data file");

  TrainArgs tr;
  auto* cmd_tr = app.add_subcommand("train", "Train one network with one algorithm");
  add_common(cmd_tr, tr.common, config_path);
  cmd_tr->add_option("--data", tr.data, "Dataset id")->check(CLI::IsMember(dataset_ids()))->capture_default_str();
  cmd_tr->add_option("--data-file", tr.data_file, "Measured data file");
  cmd_tr->add_option("--algo", tr.algo, "bp, scg, qna or lm")->capture_default_str();
  cmd_tr->add_option("--arch", tr.arch, "Hidden layer, e.g. 8T,2T*,1L*")->capture_default_str();
  cmd_tr->add_option("--epochs", tr.epochs, "Training epochs")->capture_default_str();
  cmd_tr->add_option("--init-range", tr.init_range, "Uniform initial weight range")->capture_default_str();
  cmd_tr->add_option("--init-net", tr.init_net, "Start from a saved net file instead of random weights");
  tr.params.add(cmd_tr);

  BenchArgs ev;
  ev.protocol = "mleann";
  ev.data = "mackey-glass";
  ev.replicates = 1;
  auto* cmd_ev = app.add_subcommand("evolve", "Evolve weights, architectures and trainer parameters");
  add_common(cmd_ev, ev.common, config_path);
  cmd_ev->add_option("--data", ev.data, "Dataset id")->check(CLI::IsMember(dataset_ids()))->capture_default_str();
  cmd_ev->add_option("--data-file", ev.data_file, "Measured data file");
  cmd_ev->add_option("--algos", ev.algos, "Algorithm streams")->delimiter(',')->capture_default_str();
  cmd_ev->add_option("--epochs", ev.epochs, "Local-search epochs per evaluation (default 500)");
  cmd_ev->add_option("--replicates", ev.replicates, "Independent runs")->capture_default_str();
  cmd_ev->add_flag("--restrict-arch", ev.restrict_arch, "At most 4 hidden nodes");
  cmd_ev->add_flag("--timing", ev.timing, "Also write timing.csv (wall time)");
  ev.evolution.add(cmd_ev);

  BenchArgs be;
  auto* cmd_be = app.add_subcommand("bench", "Run a benchmark protocol and write all result CSVs");
  add_common(cmd_be, be.common, config_path);
  std::vector<std::string> data_choices = dataset_ids();
  data_choices.push_back("all");
  cmd_be->add_option("--protocol", be.protocol, "conventional or mleann")
      ->check(CLI::IsMember({"conventional", "mleann"}))
      ->capture_default_str();
  cmd_be->add_option("--data", be.data, "Dataset id or all")->check(CLI::IsMember(data_choices))->capture_default_str();
  cmd_be->add_option("--data-file", be.data_file, "Measured data file (single dataset only)");
  cmd_be->add_option("--algos", be.algos, "Trainers")->delimiter(',')->capture_default_str();
  cmd_be->add_option("--hidden", be.hidden, "Hidden counts of the conventional sweep")
      ->delimiter(',')
      ->capture_default_str();
  cmd_be->add_option("--activation", be.activation, "Hidden activation of the sweep")->capture_default_str();
  cmd_be->add_option("--epochs", be.epochs, "Epochs (default 2500 conventional, 500 per evaluation mleann)");
  cmd_be->add_option("--replicates", be.replicates, "Runs per cell; the worst is reported")->capture_default_str();
  cmd_be->add_flag("--restrict-arch", be.restrict_arch, "mleann: at most 4 hidden nodes");
  cmd_be->add_flag("--timing", be.timing, "Also write timing.csv (wall time)");
  be.params.add(cmd_be);
  be.evolution.add(cmd_be);

  try {
    std::vector<std::string> args;
    try {
      args = expand_config(argc, argv);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return exit_usage;
    }
    std::reverse(args.begin(), args.end());
    args.pop_back();  // program name
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_usage;
  }

  try {
    if (cmd_gen->parsed()) return cmd_gen_data(gen);
    if (cmd_tr->parsed()) return cmd_train(tr);
    if (cmd_ev->parsed()) return cmd_bench(ev);
    return cmd_bench(be);
  } catch (const contract_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_usage;
  } catch (const data_error& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return exit_data;
  } catch (const io_error& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return exit_data;
  } catch (const numeric_error& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return exit_numeric;
  }
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
