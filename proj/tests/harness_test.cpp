#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "deepens/report.hpp"

using namespace deepens;
namespace fs = std::filesystem;

namespace {

std::string data_file(const std::string& name) { return std::string(DEEPENS_TEST_DATA_DIR) + "/" + name; }

fs::path scratch_dir() {
  const auto dir = fs::temp_directory_path() / ("deepens_harness_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()));
  fs::create_directories(dir);
  return dir;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

ExperimentConfig small_config(std::uint64_t seed) {
  ExperimentConfig c;
  c.synthetic = {SyntheticKind::Monomial, 3, 600, 0.1};
  c.copies = 5;
  c.unit_epochs = 60;
  c.combiner_epochs = 60;
  c.seed = seed;
  c.seed_set = true;
  return c;
}

MetricsReport metrics_with_accuracy(double acc) {
  MetricsReport m;
  m.accuracy = acc;
  m.precision = 0.5;
  m.recall = 0.5;
  m.f1 = 0.5;
  m.mse = 0.25;
  m.mae = 0.25;
  m.r2 = 0.0;
  return m;
}

}  // namespace

// ---------------------------------------------------------------------------
// CSV datasets

TEST(LoadCsv, ThreeRowBinary) {
  const auto ds = load_csv_dataset(data_file("tiny_binary.csv"), "label");
  ASSERT_EQ(ds.size(), 3U);
  EXPECT_EQ(ds.dim(), 2U);
  EXPECT_EQ(ds.label_space(), LabelSpace::binary());
  EXPECT_EQ(ds[1].x, (FeatureVector{-0.25, 2.0}));
  EXPECT_EQ(ds[1].label, 0);
}

TEST(LoadCsv, NonNumericCellNamesRowAndColumn) {
  try {
    load_csv_dataset(data_file("bad_cell.csv"), "label");
    FAIL() << "expected InputError";
  } catch (const InputError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("row 3"), std::string::npos) << msg;
    EXPECT_NE(msg.find("column 2"), std::string::npos) << msg;
    EXPECT_NE(msg.find("abc"), std::string::npos) << msg;
  }
}

TEST(LoadCsv, ScoreRangeGivesTenClasses) {
  const auto ds = load_csv_dataset(data_file("scores.csv"), "score");
  EXPECT_EQ(ds.label_space().kind, LabelKind::Integer);
  EXPECT_EQ(ds.label_space().size(), 10U);
  EXPECT_EQ(ds.label_space().classes.front(), 1);
  EXPECT_EQ(ds.label_space().classes.back(), 10);
}

TEST(LoadCsv, Errors) {
  EXPECT_THROW(load_csv_dataset(data_file("tiny_binary.csv"), "target"), InputError);
  EXPECT_THROW(load_csv_dataset(data_file("empty.csv"), "label"), InputError);
  EXPECT_THROW(load_csv_dataset(data_file("no_such_file.csv"), "label"), IoError);
}

// ---------------------------------------------------------------------------
// Synthetic data

TEST(GenSynthetic, MonomialLabelsWithoutNoise) {
  const auto ds = gen_synthetic(SyntheticKind::Monomial, 3, 500, 0.0, 4);
  std::size_t positives = 0;
  for (const auto& inst : ds.instances()) {
    double prod = 1.0;
    for (double v : inst.x.values()) {
      ASSERT_TRUE(v == 0.0 || v == 1.0);
      prod *= v;
    }
    EXPECT_EQ(inst.label, static_cast<int>(prod));
    positives += inst.label;
  }
  EXPECT_GT(positives, 0U);
}

TEST(GenSynthetic, ParityFlipFraction) {
  const std::size_t count = 10000;
  const auto clean = gen_synthetic(SyntheticKind::Parity, 5, count, 0.0, 8);
  const auto noisy = gen_synthetic(SyntheticKind::Parity, 5, count, 0.1, 8);
  std::size_t flips = 0;
  for (std::size_t i = 0; i < count; ++i) {
    ASSERT_EQ(clean[i].x, noisy[i].x);
    int ones = 0;
    for (double v : noisy[i].x.values()) ones += v == 1.0;
    EXPECT_EQ(clean[i].label, ones % 2);
    flips += clean[i].label != noisy[i].label;
  }
  const double frac = static_cast<double>(flips) / count;
  EXPECT_LE(std::abs(frac - 0.1), 3.0 * std::sqrt(0.1 * 0.9 / count));
}

TEST(GenSynthetic, BlobsAreSeparatedByClass) {
  const auto ds = gen_synthetic(SyntheticKind::Blobs, 2, 2000, 0.0, 5);
  double mean[2] = {0, 0};
  std::size_t n[2] = {0, 0};
  for (const auto& inst : ds.instances()) {
    mean[inst.label] += inst.x[0];
    ++n[inst.label];
  }
  EXPECT_NEAR(mean[0] / n[0], -1.0, 0.1);
  EXPECT_NEAR(mean[1] / n[1], 1.0, 0.1);
}

TEST(GenSynthetic, DeterministicAndValidated) {
  EXPECT_EQ(gen_synthetic(SyntheticKind::Blobs, 3, 50, 0.2, 1).instances(),
            gen_synthetic(SyntheticKind::Blobs, 3, 50, 0.2, 1).instances());
  EXPECT_NE(gen_synthetic(SyntheticKind::Blobs, 3, 50, 0.2, 1).instances(),
            gen_synthetic(SyntheticKind::Blobs, 3, 50, 0.2, 2).instances());
  EXPECT_THROW(gen_synthetic(SyntheticKind::Parity, 3, 10, 0.5, 1), InputError);
  EXPECT_THROW(gen_synthetic(SyntheticKind::Parity, 3, 0, 0.1, 1), InputError);
  EXPECT_THROW(parse_synthetic_kind("spiral"), InputError);
}

// ---------------------------------------------------------------------------
// Config and splits

TEST(Config, ParsesEveryKey) {
  const auto c = parse_config(R"(# sample
dataset = synthetic
synthetic_kind = parity
synthetic_d = 6
synthetic_count = 1200
noise_rate = 0.05
unit_model = logistic
unit_epochs = 120
unit_learning_rate = 0.5
copies = 9
combiners = stacked, majority-vote
combiner_hidden = 8, 4
combiner_epochs = 30
combiner_learning_rate = 1.5
bootstrap = true
seed = 77
train_fraction = 0.5
stack_fraction = 0.3
output = out.json
format = csv
)");
  EXPECT_FALSE(c.dataset_path.has_value());
  EXPECT_EQ(c.synthetic.kind, SyntheticKind::Parity);
  EXPECT_EQ(c.synthetic.d, 6U);
  EXPECT_EQ(c.synthetic.count, 1200U);
  EXPECT_EQ(c.synthetic.noise_rate, 0.05);
  EXPECT_EQ(c.unit_epochs, 120U);
  EXPECT_EQ(c.unit_learning_rate, 0.5);
  EXPECT_EQ(c.copies, 9U);
  EXPECT_EQ(c.combiners, (std::vector<CombinerKind>{CombinerKind::Stacked, CombinerKind::MajorityVote}));
  EXPECT_EQ(c.combiner_hidden, (std::vector<std::size_t>{8, 4}));
  EXPECT_EQ(c.combiner_epochs, 30U);
  EXPECT_TRUE(c.bootstrap);
  EXPECT_EQ(c.seed, 77U);
  EXPECT_EQ(c.train_fraction, 0.5);
  EXPECT_EQ(c.output, "out.json");
  EXPECT_EQ(c.format, ReportFormat::Csv);
  EXPECT_NO_THROW(c.validate());
}

TEST(Config, Defaults) {
  const auto c = parse_config("seed = 1\n");
  EXPECT_EQ(c.copies, 50U);
  EXPECT_EQ(c.synthetic.kind, SyntheticKind::Monomial);
  EXPECT_EQ(c.synthetic.d, 4U);
  EXPECT_EQ(c.synthetic.count, 4000U);
  EXPECT_EQ(c.combiners.size(), 3U);
  EXPECT_TRUE(c.combiner_hidden.empty());
  EXPECT_NO_THROW(c.validate());
}

TEST(Config, Errors) {
  EXPECT_THROW(parse_config("copies = 3\n").validate(), InputError);  // seed missing
  EXPECT_THROW(parse_config("seed = 1\ncopies = 0\n").validate(), InputError);
  EXPECT_THROW(parse_config("seed = 1\ntrain_fraction = 0.9\nstack_fraction = 0.2\n").validate(), InputError);
  EXPECT_THROW(parse_config("seed = 1\nunit_model = tree\n").validate(), InputError);
  EXPECT_THROW(parse_config("seed = 1\ncolour = red\n"), InputError);
  EXPECT_THROW(parse_config("seed = 1\ncopies = many\n"), InputError);
  EXPECT_THROW(parse_config("seed 1\n"), InputError);
  EXPECT_THROW(parse_config("seed = 1\ncombiners = boosting\n"), InputError);
  EXPECT_THROW(load_config(data_file("no_such.cfg")), IoError);
}

TEST(Split, DisjointAndCovering) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto s = split_indices(1001, 0.6, 0.2, seed);
    EXPECT_EQ(s.train.size(), 600U);
    EXPECT_EQ(s.stack.size(), 200U);
    EXPECT_EQ(s.test.size(), 201U);
    std::set<std::size_t> all;
    for (const auto* part : {&s.train, &s.stack, &s.test}) all.insert(part->begin(), part->end());
    EXPECT_EQ(all.size(), 1001U);
  }
  EXPECT_THROW(split_indices(3, 0.6, 0.2, 0), InputError);
}

TEST(Split, NoTestInstanceInTrainingSets) {
  // identity check on instances: tag every instance with its index as the only feature
  std::vector<Instance> inst;
  for (std::size_t i = 0; i < 500; ++i) inst.push_back({FeatureVector{static_cast<double>(i)}, static_cast<int>(i % 2)});
  const Dataset ds(inst, LabelSpace::binary());
  const auto s = split_indices(ds.size(), 0.6, 0.2, 3);
  const Dataset train = ds.subset(s.train), stack = ds.subset(s.stack), test = ds.subset(s.test);
  std::set<double> seen;
  for (const auto& x : train.instances()) seen.insert(x.x[0]);
  for (const auto& x : stack.instances()) EXPECT_TRUE(seen.insert(x.x[0]).second);
  for (const auto& x : test.instances()) EXPECT_EQ(seen.count(x.x[0]), 0U);
}

TEST(RoundSig6, Values) {
  EXPECT_EQ(round_sig6(0.123456789), 0.123457);
  EXPECT_EQ(round_sig6(1234567.0), 1234570.0);
  EXPECT_EQ(round_sig6(0.0), 0.0);
  EXPECT_EQ(round_sig6(-2.5e-9), -2.5e-9);
}

// ---------------------------------------------------------------------------
// Experiments

TEST(RunExperiment, SingleCopyVoteEqualsSingleCopy) {
  auto c = small_config(3);
  c.copies = 1;
  const auto r = run_experiment(c);
  EXPECT_EQ(r.metrics.at("majority-vote"), r.metrics.at("single-best"));
  EXPECT_EQ(r.metadata.copy_seeds.size(), 1U);
  EXPECT_EQ(r.metadata.copy_seeds[0], copy_seed(3, 0));
}

TEST(RunExperiment, ReportShape) {
  const auto r = run_experiment(small_config(4));
  EXPECT_EQ(r.methods, (std::vector<std::string>{"stacked", "majority-vote", "single-best"}));
  EXPECT_EQ(r.metadata.train_size + r.metadata.stack_size + r.metadata.test_size, 600U);
  EXPECT_EQ(r.metadata.unit_parameter_count, 4U);
  EXPECT_EQ(r.metadata.combiner_parameter_count, 5U * 10 + 10 + 10 * 2 + 2);
  EXPECT_LT(r.metadata.best_copy, 5U);
  for (const auto& m : r.methods) {
    EXPECT_GE(r.metrics.at(m).accuracy, 0.5);
    EXPECT_EQ(r.ranks.at(m), rank_methods(r.metrics).at(m));
  }
}

TEST(RunExperiment, ByteIdenticalReports) {
  auto c = small_config(5);
  c.bootstrap = true;
  const auto a = serialize_report(run_experiment(c), ReportFormat::Json);
  const auto b = serialize_report(run_experiment(c), ReportFormat::Json);
  EXPECT_EQ(a, b);
  c.seed = 6;
  EXPECT_NE(a, serialize_report(run_experiment(c), ReportFormat::Json));
}

TEST(RunExperiment, CsvDatasetAndMulticlassRejection) {
  auto c = small_config(1);
  c.dataset_path = data_file("scores.csv");
  c.label_column = "score";
  EXPECT_THROW(run_experiment(c), InputError);
  c.seed_set = false;
  EXPECT_THROW(run_experiment(c), InputError);
}

// ---------------------------------------------------------------------------
// Reports

TEST(Report, JsonRoundTrip) {
  const auto r = run_experiment(small_config(7));
  const auto path = scratch_dir() / "report.json";
  emit_report(r, ReportFormat::Json, path.string());
  const auto back = parse_report_json(read_file(path));
  EXPECT_EQ(back.methods, r.methods);
  EXPECT_EQ(back.metrics, r.metrics);
  EXPECT_EQ(back.ranks, r.ranks);
  EXPECT_EQ(back.metadata.copy_seeds, r.metadata.copy_seeds);
  EXPECT_EQ(back.metadata.dataset, r.metadata.dataset);
  EXPECT_EQ(serialize_report(back, ReportFormat::Json), read_file(path));
}

TEST(Report, CsvRoundTripAndLineCount) {
  auto c = small_config(8);
  c.combiners = {CombinerKind::MajorityVote, CombinerKind::SingleBest};
  const auto r = run_experiment(c);
  const auto path = scratch_dir() / "report.csv";
  emit_report(r, ReportFormat::Csv, path.string());
  const auto text = read_file(path);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 3);
  EXPECT_EQ(text.substr(0, text.find('\n')),
            "method,accuracy,f1,precision,recall,mse,mae,r2,rank_accuracy,rank_f1,rank_precision,"
            "rank_recall,rank_mse,rank_mae,rank_r2,average_rank,overall_rank");
  const auto back = parse_report_csv(text);
  EXPECT_EQ(back.methods, r.methods);
  EXPECT_EQ(back.metrics, r.metrics);
  EXPECT_EQ(back.ranks, r.ranks);
}

TEST(Report, TiedRanksSerializeEqually) {
  ExperimentReport r;
  r.methods = {"a", "b", "c"};
  r.metrics["a"] = metrics_with_accuracy(0.9);
  r.metrics["b"] = metrics_with_accuracy(0.9);
  r.metrics["c"] = metrics_with_accuracy(0.8);
  r.ranks = rank_methods(r.metrics);
  const auto j = report_to_json(r);
  EXPECT_EQ(j["methods"][0]["ranks"]["accuracy"], 1);
  EXPECT_EQ(j["methods"][1]["ranks"]["accuracy"], 1);
  EXPECT_EQ(j["methods"][2]["ranks"]["accuracy"], 3);
  EXPECT_EQ(j["methods"][0]["overall_rank"], j["methods"][1]["overall_rank"]);
  const auto csv = report_to_csv(r);
  const auto back = parse_report_csv(csv);
  EXPECT_EQ(back.ranks.at("a"), back.ranks.at("b"));
}

TEST(Report, RanksRecomputeFromSerializedMetrics) {
  for (std::uint64_t seed : {11, 12, 13}) {
    const auto r = run_experiment(small_config(seed));
    for (auto fmt : {ReportFormat::Json, ReportFormat::Csv}) {
      const auto text = serialize_report(r, fmt);
      const auto back = fmt == ReportFormat::Json ? parse_report_json(text) : parse_report_csv(text);
      const auto recomputed = rank_methods(back.metrics);
      for (const auto& m : back.methods) {
        EXPECT_EQ(recomputed.at(m).per_metric, back.ranks.at(m).per_metric);
        EXPECT_EQ(recomputed.at(m).overall, back.ranks.at(m).overall);
        EXPECT_EQ(round_sig6(recomputed.at(m).average), back.ranks.at(m).average);
      }
    }
  }
}

TEST(Report, InfiniteR2SentinelSurvivesJson) {
  ExperimentReport r;
  r.methods = {"a"};
  r.metrics["a"] = metrics_with_accuracy(1.0);
  r.metrics["a"].r2 = -std::numeric_limits<double>::infinity();
  r.ranks = rank_methods(r.metrics);
  const auto text = serialize_report(r, ReportFormat::Json);
  EXPECT_NE(text.find("\"-inf\""), std::string::npos);
  EXPECT_EQ(parse_report_json(text).metrics.at("a").r2, -std::numeric_limits<double>::infinity());
}

TEST(Report, TimingsOnlyWhenAsked) {
  const auto r = run_experiment(small_config(9));
  EXPECT_EQ(serialize_report(r, ReportFormat::Json).find("durations_ms"), std::string::npos);
  EXPECT_NE(serialize_report(r, ReportFormat::Json, true).find("durations_ms"), std::string::npos);
}

TEST(Report, UnwritablePath) {
  const auto r = run_experiment(small_config(10));
  EXPECT_THROW(emit_report(r, ReportFormat::Json, "/nonexistent_dir/x/report.json"), IoError);
}

TEST(Report, MalformedInput) {
  EXPECT_THROW(parse_report_json("{\"methods\": 3}"), InputError);
  EXPECT_THROW(parse_report_csv(""), InputError);
  EXPECT_THROW(parse_report_csv("method,accuracy\nx,1\n"), InputError);
}
