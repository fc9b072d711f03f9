#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "mleann/bench/emit.hpp"

using namespace mleann;
using namespace mleann::bench;

namespace {

const Dataset& mackey() {
  static const Dataset ds = data::load_dataset("mackey-glass");
  return ds;
}

ExperimentSpec small_spec(std::size_t epochs, std::size_t replicates) {
  ExperimentSpec spec;
  spec.architectures = {Architecture(3, Activation::Tstar), Architecture(6, Activation::Tstar)};
  spec.epochs = epochs;
  spec.replicates = replicates;
  spec.seed = 11;
  return spec;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path fresh_dir(const std::string& name) {
  const auto dir = std::filesystem::path(::testing::TempDir()) / name;
  std::filesystem::remove_all(dir);
  return dir;
}

std::size_t hidden_total(const std::string& descriptor) {
  std::size_t total = 0;
  std::istringstream in(descriptor);
  std::string token;
  while (std::getline(in, token, ',')) total += std::stoul(token);
  return total;
}

}  // namespace

TEST(Conventional, ZeroEpochsReportsFreshNetwork) {
  ExperimentSpec spec = small_spec(0, 1);
  spec.algorithms = {Algorithm::BP, Algorithm::LM};
  const auto res = run_conventional(spec, mackey());
  ASSERT_EQ(res.rows.size(), 4u);
  const auto [train, test] = split(mackey());
  for (std::size_t i = 0; i < res.rows.size(); ++i) {
    const ResultRow& row = res.rows[i];
    std::mt19937_64 rng(row.seed);
    const Mlp net = random_mlp(4, Architecture(i < 2 ? 3 : 6, Activation::Tstar), rng, 0.3);
    EXPECT_DOUBLE_EQ(row.train_rmse, rmse(net, train));
    EXPECT_DOUBLE_EQ(row.test_rmse, rmse(net, test));
    EXPECT_GT(row.flops, 0u);
  }
}

TEST(Conventional, RowOrderAndShape) {
  const auto res = run_conventional(small_spec(3, 2), mackey());
  ASSERT_EQ(res.rows.size(), 8u);
  ASSERT_EQ(res.replicates.size(), 16u);
  for (std::size_t i = 0; i < res.rows.size(); ++i) {
    EXPECT_EQ(res.rows[i].architecture, i < 4 ? "3 T*" : "6 T*");
    EXPECT_EQ(res.rows[i].algorithm, kAllAlgorithms[i % 4]);
    EXPECT_EQ(res.rows[i].replicates, 2u);
    EXPECT_GE(res.rows[i].test_rmse, 0.0);
    EXPECT_EQ(res.rows[i].status(), "ok");
  }
}

TEST(Conventional, ReportsWorstReplicateFromRawLog) {
  const auto res = run_conventional(small_spec(10, 3), mackey());
  for (std::size_t i = 0; i < res.rows.size(); ++i) {
    double worst = -1.0;
    std::uint64_t seed = 0;
    for (std::size_t r = 0; r < 3; ++r) {
      const auto& rep = res.replicates[3 * i + r];
      EXPECT_EQ(rep.algorithm, res.rows[i].algorithm);
      EXPECT_EQ(rep.seed, 11u + r);
      if (rep.test_rmse > worst) worst = rep.test_rmse, seed = rep.seed;
    }
    EXPECT_EQ(res.rows[i].test_rmse, worst);
    EXPECT_EQ(res.rows[i].seed, seed);
  }
}

TEST(Conventional, FirstReplicateWhenNotReportingWorst) {
  ExperimentSpec spec = small_spec(5, 3);
  spec.report_worst = false;
  const auto res = run_conventional(spec, mackey());
  for (std::size_t i = 0; i < res.rows.size(); ++i) EXPECT_EQ(res.rows[i].test_rmse, res.replicates[3 * i].test_rmse);
}

TEST(Conventional, RowIsReproducibleFromLoggedSeed) {
  ExperimentSpec spec = small_spec(20, 2);
  spec.algorithms = {Algorithm::SCG};
  const auto res = run_conventional(spec, mackey());
  const ResultRow& row = res.rows[1];
  std::mt19937_64 rng(row.seed);
  const Mlp start = random_mlp(4, Architecture(6, Activation::Tstar), rng, 0.3);
  const auto [train_rows, test_rows] = split(mackey());
  const TrainReport report = train(start, train_rows, default_config(Algorithm::SCG, 20));
  EXPECT_EQ(rmse(report.net, test_rows), row.test_rmse);
  EXPECT_EQ(report.flops, row.flops);
}

TEST(Conventional, SerialMatchesThreaded) {
  ExperimentSpec spec = small_spec(15, 2);
  spec.serial = true;
  const auto a = run_conventional(spec, mackey());
  spec.serial = false;
  spec.threads = 4;
  const auto b = run_conventional(spec, mackey());
  ASSERT_EQ(a.replicates.size(), b.replicates.size());
  for (std::size_t i = 0; i < a.replicates.size(); ++i) {
    EXPECT_EQ(a.replicates[i].test_rmse, b.replicates[i].test_rmse);
    EXPECT_EQ(a.replicates[i].flops, b.replicates[i].flops);
  }
}

TEST(Conventional, FlopsOrderedAndGrowWithHiddenCount) {
  const auto res = run_conventional(small_spec(30, 1), mackey());
  for (std::size_t arch = 0; arch < 2; ++arch) {
    const auto* r = &res.rows[4 * arch];
    EXPECT_LT(r[0].flops, r[3].flops) << "BP vs LM";
    EXPECT_LT(r[0].flops, r[1].flops) << "BP vs SCG";
  }
  for (std::size_t a = 0; a < 4; ++a) EXPECT_LT(res.rows[a].flops, res.rows[4 + a].flops);
}

TEST(Conventional, AbortIsFlaggedAndRunContinues) {
  ExperimentSpec spec = small_spec(20, 2);
  spec.algorithms = {Algorithm::BP, Algorithm::LM};
  BpConfig wild;
  wild.learning_rate = 1e150;
  wild.momentum = 0.0;
  spec.trainer_configs = {wild};
  const auto res = run_conventional(spec, mackey());
  ASSERT_EQ(res.rows.size(), 4u);
  EXPECT_EQ(res.rows[0].status(), "aborted 2/2");
  EXPECT_EQ(res.rows[1].status(), "ok");
  EXPECT_TRUE(res.replicates[0].aborted);
  EXPECT_EQ(res.replicates[0].termination, "non-finite");
}

TEST(Conventional, SpecValidation) {
  ExperimentSpec spec = small_spec(1, 1);
  spec.architectures.clear();
  EXPECT_THROW(run_conventional(spec, mackey()), contract_error);
  spec = small_spec(1, 0);
  EXPECT_THROW(run_conventional(spec, mackey()), contract_error);
  spec = small_spec(1, 1);
  spec.protocol = Protocol::mleann;
  EXPECT_THROW(run_conventional(spec, mackey()), contract_error);
}

namespace {

ExperimentSpec tiny_mleann(bool restrict_arch) {
  ExperimentSpec spec;
  spec.protocol = Protocol::mleann;
  spec.dataset = "gas-furnace";
  spec.algorithms = {Algorithm::SCG, Algorithm::LM};
  spec.replicates = 1;
  spec.restrict_arch = restrict_arch;
  spec.evolution.population = 6;
  spec.evolution.generations = 3;
  spec.evolution.epochs_per_eval = 5;
  spec.seed = 4;
  return spec;
}

}  // namespace

TEST(MleannExperiment, RestrictedVariantCapsHiddenNodes) {
  const ExperimentSpec spec = tiny_mleann(true);
  const Dataset ds = data::load_dataset(spec.dataset);
  const auto res = run_mleann_experiment(spec, ds);
  ASSERT_EQ(res.rows.size(), 2u);
  for (const auto& row : res.rows) {
    EXPECT_EQ(row.protocol, "mleann-restricted");
    EXPECT_LE(hidden_total(row.architecture), 4u) << row.architecture;
    EXPECT_GE(hidden_total(row.architecture), 1u);
    EXPECT_GT(row.flops, 0u);
    EXPECT_EQ(row.seed, 4u);
  }
  for (const auto& t : res.traces) EXPECT_LE(hidden_total(t.best_arch), 4u);
}

TEST(MleannExperiment, TracesHaveGenerationsPlusOneEntriesPerStream) {
  const ExperimentSpec spec = tiny_mleann(false);
  const auto res = run_mleann_experiment(spec, data::load_dataset(spec.dataset));
  ASSERT_EQ(res.traces.size(), 2u * 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(res.traces[i].stream, "gas-furnace/SCG");
    EXPECT_EQ(res.traces[4 + i].stream, "gas-furnace/LM");
    EXPECT_EQ(res.traces[i].generation, i);
  }
}

TEST(MleannExperiment, MatchesDirectEvolution) {
  const ExperimentSpec spec = tiny_mleann(false);
  const Dataset ds = data::load_dataset(spec.dataset);
  const auto res = run_mleann_experiment(spec, ds);
  evolve::EvolutionConfig cfg = spec.evolution;
  cfg.seed = spec.seed;
  const auto streams = evolve::run_mleann(cfg, ds, spec.algorithms);
  for (std::size_t a = 0; a < 2; ++a) EXPECT_EQ(res.rows[a].test_rmse, streams[a].best.test_rmse);
}

TEST(Emit, SixSignificantDigits) {
  EXPECT_EQ(fmt(0.00123456789), "0.00123457");
  EXPECT_EQ(fmt(1234567.0), "1.23457e+06");
  EXPECT_EQ(fmt(0.5), "0.5");
  EXPECT_EQ(fmt(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(csv_field("8 T, 2 T*"), "\"8 T, 2 T*\"");
  EXPECT_EQ(csv_field("24 T*"), "24 T*");
}

TEST(Emit, EmptyInputGivesHeaderOnlyFiles) {
  const auto dir = fresh_dir("emit_empty");
  emit_results({}, dir);
  EXPECT_EQ(slurp(dir / "results.csv"),
            "dataset,protocol,algorithm,architecture,train_rmse,test_rmse,flops,seed,status,synthetic\n");
  EXPECT_EQ(slurp(dir / "traces.csv"), "stream,generation,best_rmse,mean_rmse,best_arch\n");
  EXPECT_EQ(slurp(dir / "flops.csv"), "dataset,architecture,algorithm,flops\n");
  EXPECT_FALSE(std::filesystem::exists(dir / "timing.csv"));
}

TEST(Emit, IdenticalRunsGiveIdenticalFiles) {
  const ExperimentSpec spec = small_spec(5, 2);
  const auto a = fresh_dir("emit_a"), b = fresh_dir("emit_b");
  emit_results(run_conventional(spec, mackey()), a);
  emit_results(run_conventional(spec, mackey()), b);
  for (const char* f : {"results.csv", "traces.csv", "flops.csv", "replicates.csv"}) {
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
    EXPECT_FALSE(slurp(a / f).empty());
  }
  std::istringstream results(slurp(a / "results.csv"));
  std::string line;
  std::size_t lines = 0;
  while (std::getline(results, line)) ++lines;
  EXPECT_EQ(lines, 1u + 8u);
}

TEST(Emit, TimingOnRequest) {
  const auto dir = fresh_dir("emit_timing");
  ExperimentResult res;
  res.rows.push_back(ResultRow{});
  emit_results(res, dir, true);
  EXPECT_TRUE(std::filesystem::exists(dir / "timing.csv"));
}

TEST(Emit, UnwritableDirectoryNamesPath) {
  const auto blocker = std::filesystem::path(::testing::TempDir()) / "emit_blocker";
  std::ofstream(blocker) << "file";
  try {
    emit_results({}, blocker / "out");
    FAIL();
  } catch (const io_error& e) {
    EXPECT_NE(std::string(e.what()).find("emit_blocker"), std::string::npos) << e.what();
  }
}
