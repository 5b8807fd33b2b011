#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "deepens/core.hpp"
#include "deepens/dataset_io.hpp"
#include "deepens/ensemble.hpp"
#include "deepens/error.hpp"
#include "deepens/learners.hpp"
#include "deepens/random.hpp"

namespace deepens {

enum class CombinerKind { SingleBest, MajorityVote, Stacked };

inline const char* to_string(CombinerKind k) {
  switch (k) {
    case CombinerKind::SingleBest: return "single-best";
    case CombinerKind::MajorityVote: return "majority-vote";
    case CombinerKind::Stacked: return "stacked";
  }
  return "unknown";
}

inline CombinerKind parse_combiner_kind(const std::string& name) {
  if (name == "single-best") return CombinerKind::SingleBest;
  if (name == "majority-vote") return CombinerKind::MajorityVote;
  if (name == "stacked") return CombinerKind::Stacked;
  throw InputError("unknown combiner '" + name + "' (expected single-best, majority-vote or stacked)");
}

enum class ReportFormat { Json, Csv };

inline ReportFormat parse_report_format(const std::string& name) {
  if (name == "json") return ReportFormat::Json;
  if (name == "csv") return ReportFormat::Csv;
  throw InputError("unknown report format '" + name + "' (expected json or csv)");
}

struct SyntheticSpec {
  SyntheticKind kind = SyntheticKind::Monomial;
  std::size_t d = 4;
  std::size_t count = 4000;
  double noise_rate = 0.1;
};

/// Every hyperparameter of one run. Defaults mirror the documented config-key table.
struct ExperimentConfig {
  std::optional<std::string> dataset_path;  // unset: synthetic
  std::string label_column = "label";
  SyntheticSpec synthetic;
  std::string unit_model = "logistic";
  std::size_t unit_epochs = kDefaultUnitEpochs;
  double unit_learning_rate = kDefaultUnitLearningRate;
  std::size_t copies = 50;
  std::vector<CombinerKind> combiners{CombinerKind::Stacked, CombinerKind::MajorityVote,
                                      CombinerKind::SingleBest};
  std::vector<std::size_t> combiner_hidden;  // empty: one hidden layer of width 2n
  std::size_t combiner_epochs = kDefaultCombinerEpochs;
  double combiner_learning_rate = kDefaultCombinerLearningRate;
  bool bootstrap = false;
  std::uint64_t seed = 0;
  bool seed_set = false;
  double train_fraction = 0.6;
  double stack_fraction = 0.2;  // the test split takes the remainder
  std::string output;           // empty: standard output
  ReportFormat format = ReportFormat::Json;

  void validate() const {
    if (!seed_set) throw InputError("config: 'seed' is required");
    if (copies < 1) throw InputError("config: 'copies' must be >= 1");
    if (unit_model != "logistic") throw InputError("config: unsupported unit_model '" + unit_model + "'");
    if (combiners.empty()) throw InputError("config: 'combiners' must list at least one method");
    const auto in_open_unit = [](double v) { return v > 0.0 && v < 1.0; };
    if (!in_open_unit(train_fraction) || !in_open_unit(stack_fraction) ||
        !in_open_unit(train_fraction + stack_fraction)) {
      throw InputError("config: split fractions must lie in (0,1) and leave room for a test split");
    }
    if (!(unit_learning_rate > 0.0) || !(combiner_learning_rate > 0.0)) {
      throw InputError("config: learning rates must be positive");
    }
  }
};

namespace detail {

inline std::size_t parse_size(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const auto r = std::stoull(v, &used);
    if (used != v.size() || v.front() == '-') throw std::invalid_argument(v);
    return static_cast<std::size_t>(r);
  } catch (const std::exception&) {
    throw InputError("config: '" + key + "' expects a non-negative integer, got '" + v + "'");
  }
}

inline double parse_real(const std::string& key, const std::string& v) {
  double out = 0.0;
  if (!parse_double(v, out)) throw InputError("config: '" + key + "' expects a number, got '" + v + "'");
  return out;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw InputError("config: '" + key + "' expects true/false, got '" + v + "'");
}

inline std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(v);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace detail

/// Parses `key = value` lines; '#' starts a comment. Unknown keys are errors.
inline ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InputError("config line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    using namespace detail;
    if (key == "dataset") {
      if (value == "synthetic") cfg.dataset_path.reset();
      else cfg.dataset_path = value;
    } else if (key == "label") cfg.label_column = value;
    else if (key == "synthetic_kind") cfg.synthetic.kind = parse_synthetic_kind(value);
    else if (key == "synthetic_d") cfg.synthetic.d = parse_size(key, value);
    else if (key == "synthetic_count") cfg.synthetic.count = parse_size(key, value);
    else if (key == "noise_rate") cfg.synthetic.noise_rate = parse_real(key, value);
    else if (key == "unit_model") cfg.unit_model = value;
    else if (key == "unit_epochs") cfg.unit_epochs = parse_size(key, value);
    else if (key == "unit_learning_rate") cfg.unit_learning_rate = parse_real(key, value);
    else if (key == "copies") cfg.copies = parse_size(key, value);
    else if (key == "combiners") {
      cfg.combiners.clear();
      for (const auto& c : split_list(value)) cfg.combiners.push_back(parse_combiner_kind(c));
    } else if (key == "combiner_hidden") {
      cfg.combiner_hidden.clear();
      if (value != "default")
        for (const auto& w : split_list(value)) cfg.combiner_hidden.push_back(parse_size(key, w));
    } else if (key == "combiner_epochs") cfg.combiner_epochs = parse_size(key, value);
    else if (key == "combiner_learning_rate") cfg.combiner_learning_rate = parse_real(key, value);
    else if (key == "bootstrap") cfg.bootstrap = parse_bool(key, value);
    else if (key == "seed") {
      cfg.seed = parse_size(key, value);
      cfg.seed_set = true;
    } else if (key == "train_fraction") cfg.train_fraction = parse_real(key, value);
    else if (key == "stack_fraction") cfg.stack_fraction = parse_real(key, value);
    else if (key == "output") cfg.output = value;
    else if (key == "format") cfg.format = parse_report_format(value);
    else throw InputError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
  }
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

// ---------------------------------------------------------------------------

struct SplitIndices {
  std::vector<std::size_t> train, stack, test;
};

/// Seeded shuffle, then contiguous train / stack / test blocks.
inline SplitIndices split_indices(std::size_t count, double train_fraction, double stack_fraction,
                                  std::uint64_t seed) {
  std::vector<std::size_t> idx(count);
  for (std::size_t i = 0; i < count; ++i) idx[i] = i;
  Rng rng = make_rng(seed, 0x5b117);
  for (std::size_t i = count; i > 1; --i) std::swap(idx[i - 1], idx[uniform_index(rng, i)]);

  const auto n_train = static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(count)));
  const auto n_stack = static_cast<std::size_t>(std::floor(stack_fraction * static_cast<double>(count)));
  if (n_train == 0 || n_stack == 0 || n_train + n_stack >= count) {
    throw InputError("dataset of " + std::to_string(count) + " instances is too small for the configured split");
  }
  SplitIndices s;
  s.train.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
  s.stack.assign(idx.begin() + static_cast<std::ptrdiff_t>(n_train),
                 idx.begin() + static_cast<std::ptrdiff_t>(n_train + n_stack));
  s.test.assign(idx.begin() + static_cast<std::ptrdiff_t>(n_train + n_stack), idx.end());
  return s;
}

/// Rounds to 6 significant digits, the precision reports are serialized at.
inline double round_sig6(double v) {
  if (!std::isfinite(v) || v == 0.0) return v;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return std::strtod(buf, nullptr);
}

inline MetricsReport round_metrics(const MetricsReport& m) {
  auto v = metric_values(m);
  for (auto& x : v) x = round_sig6(x);
  return metrics_from_values(v);
}

struct RunMetadata {
  std::uint64_t seed = 0;
  std::size_t copies = 0;
  std::vector<std::uint64_t> copy_seeds;
  std::string dataset;
  std::size_t dimension = 0;
  std::size_t train_size = 0, stack_size = 0, test_size = 0;
  std::size_t best_copy = 0;                 // index of the single best copy
  std::size_t unit_parameter_count = 0;      // per copy
  std::size_t combiner_parameter_count = 0;  // 0 without a stacked combiner
  std::map<std::string, double> durations_ms;  // wall clock; excluded from reports unless asked
};

struct ExperimentReport {
  std::vector<std::string> methods;  // configured order
  std::map<std::string, MetricsReport> metrics;
  RankedTable ranks;
  RunMetadata metadata;
};

/// Seed of copy i: derived from the experiment seed so copies of different runs differ.
inline std::uint64_t copy_seed(std::uint64_t experiment_seed, std::size_t copy) {
  return mix_seed(experiment_seed) + copy;
}

inline ExperimentReport run_experiment(const ExperimentConfig& config) {
  config.validate();
  using Clock = std::chrono::steady_clock;
  const auto ms_since = [](Clock::time_point t) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t).count();
  };
  auto t0 = Clock::now();

  const Dataset data = config.dataset_path
                           ? load_csv_dataset(*config.dataset_path, config.label_column)
                           : gen_synthetic(config.synthetic.kind, config.synthetic.d, config.synthetic.count,
                                           config.synthetic.noise_rate, config.seed);
  if (data.label_space().kind != LabelKind::Binary) {
    throw InputError("experiment: the logistic unit model needs binary {0,1} labels");
  }
  const auto split = split_indices(data.size(), config.train_fraction, config.stack_fraction, config.seed);
  const Dataset train = data.subset(split.train);
  const Dataset stack = data.subset(split.stack);
  const Dataset test = data.subset(split.test);

  ExperimentReport report;
  auto& meta = report.metadata;
  meta.seed = config.seed;
  meta.copies = config.copies;
  meta.dataset = config.dataset_path ? *config.dataset_path
                                     : std::string("synthetic:") + to_string(config.synthetic.kind) +
                                           ":d=" + std::to_string(config.synthetic.d) +
                                           ":count=" + std::to_string(config.synthetic.count) +
                                           ":noise=" + std::to_string(config.synthetic.noise_rate);
  meta.dimension = data.dim();
  meta.train_size = train.size();
  meta.stack_size = stack.size();
  meta.test_size = test.size();
  meta.unit_parameter_count = data.dim() + 1;
  meta.durations_ms["load_and_split"] = ms_since(t0);

  // Copies train independently; results land by index, so the join order is irrelevant.
  t0 = Clock::now();
  std::vector<UnitModel> models(config.copies);
  std::vector<std::string> failures(config.copies);
  for (std::size_t i = 0; i < config.copies; ++i) meta.copy_seeds.push_back(copy_seed(config.seed, i));
  {
    const std::size_t workers =
        std::min<std::size_t>(config.copies, std::max(1U, std::thread::hardware_concurrency()));
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < config.copies; i += workers) {
          try {
            const auto s = meta.copy_seeds[i];
            if (config.bootstrap) {
              Rng rng = make_rng(s, 0xb007);
              std::vector<std::size_t> pick(train.size());
              for (auto& p : pick) p = uniform_index(rng, train.size());
              models[i] = train_logistic_unit(train.subset(pick), config.unit_epochs,
                                              config.unit_learning_rate, s);
            } else {
              models[i] = train_logistic_unit(train, config.unit_epochs, config.unit_learning_rate, s);
            }
          } catch (const std::exception& e) {
            failures[i] = std::string("copy ") + std::to_string(i) + " (seed " +
                          std::to_string(meta.copy_seeds[i]) + "): " + e.what();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
  }
  for (const auto& f : failures)
    if (!f.empty()) throw RunError(f);
  meta.durations_ms["train_copies"] = ms_since(t0);

  t0 = Clock::now();
  const auto outputs = [&](const Dataset& ds) {
    std::vector<std::vector<double>> rows(ds.size(), std::vector<double>(models.size()));
    for (std::size_t r = 0; r < ds.size(); ++r)
      for (std::size_t m = 0; m < models.size(); ++m) rows[r][m] = models[m].predict_proba(ds[r].x);
    return rows;
  };
  const auto stack_rows = outputs(stack);
  const auto test_rows = outputs(test);
  const auto stack_labels = stack.labels();
  const auto test_labels = test.labels();

  // Single best copy by accuracy on the stacking split, ties to the lowest index.
  std::size_t best = 0;
  std::size_t best_correct = 0;
  for (std::size_t m = 0; m < models.size(); ++m) {
    std::size_t correct = 0;
    for (std::size_t r = 0; r < stack.size(); ++r)
      correct += (stack_rows[r][m] >= 0.5 ? 1 : 0) == stack_labels[r];
    if (m == 0 || correct > best_correct) {
      best = m;
      best_correct = correct;
    }
  }
  meta.best_copy = best;

  for (auto kind : config.combiners) {
    const std::string name = to_string(kind);
    if (report.metrics.count(name)) continue;
    std::vector<int> predictions(test.size());
    switch (kind) {
      case CombinerKind::SingleBest:
        for (std::size_t r = 0; r < test.size(); ++r) predictions[r] = test_rows[r][best] >= 0.5 ? 1 : 0;
        break;
      case CombinerKind::MajorityVote:
        for (std::size_t r = 0; r < test.size(); ++r) {
          std::vector<int> votes(models.size());
          for (std::size_t m = 0; m < models.size(); ++m) votes[m] = test_rows[r][m] >= 0.5 ? 1 : 0;
          predictions[r] = majority_vote(votes);
        }
        break;
      case CombinerKind::Stacked: {
        const auto t1 = Clock::now();
        const auto hidden = config.combiner_hidden.empty() ? default_combiner_hidden(models.size())
                                                           : config.combiner_hidden;
        const auto combiner = train_stacked_combiner(stack_rows, stack_labels, hidden, config.combiner_epochs,
                                                     config.combiner_learning_rate, mix_seed(config.seed ^ 0xc0b));
        meta.combiner_parameter_count = combiner.parameter_count();
        for (std::size_t r = 0; r < test.size(); ++r) predictions[r] = combiner.predict(test_rows[r]);
        meta.durations_ms["train_stacked"] = ms_since(t1);
        break;
      }
    }
    report.methods.push_back(name);
    report.metrics[name] = round_metrics(compute_metrics(predictions, test_labels));
  }
  report.ranks = rank_methods(report.metrics);
  for (auto& [name, r] : report.ranks) r.average = round_sig6(r.average);
  meta.durations_ms["combine"] = ms_since(t0);
  return report;
}

}  // namespace deepens
