#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <map>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "deepens/error.hpp"

namespace deepens {

/// Real-valued feature vector of fixed dimension d >= 1 with finite entries.
class FeatureVector {
public:
  FeatureVector() = default;

  explicit FeatureVector(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw InputError("feature vector must have dimension >= 1");
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (!std::isfinite(values_[i])) {
        throw InputError("feature vector entry " + std::to_string(i) + " is not finite");
      }
    }
  }

  FeatureVector(std::initializer_list<double> values)
      : FeatureVector(std::vector<double>(values)) {}

  std::size_t dim() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const noexcept { return values_; }

  bool on_cube() const noexcept {
    return std::all_of(values_.begin(), values_.end(),
                       [](double v) { return v == 0.0 || v == 1.0; });
  }

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;

private:
  std::vector<double> values_;
};

/// The cube point whose coordinate i is 1 iff bit i of `mask` is set.
inline FeatureVector cube_point(std::uint32_t mask, std::size_t d) {
  std::vector<double> v(d);
  for (std::size_t i = 0; i < d; ++i) v[i] = (mask >> i) & 1U ? 1.0 : 0.0;
  return FeatureVector(std::move(v));
}

enum class LabelKind { Binary, Integer };

struct LabelSpace {
  LabelKind kind = LabelKind::Binary;
  std::vector<int> classes{0, 1};  // sorted, distinct

  static LabelSpace binary() { return {}; }

  /// Binary when every label is 0 or 1, otherwise the integer space of the distinct labels.
  static LabelSpace infer(std::span<const int> labels) {
    std::set<int> distinct(labels.begin(), labels.end());
    if (std::all_of(distinct.begin(), distinct.end(), [](int l) { return l == 0 || l == 1; })) {
      return binary();
    }
    return {LabelKind::Integer, std::vector<int>(distinct.begin(), distinct.end())};
  }

  bool contains(int label) const {
    return std::binary_search(classes.begin(), classes.end(), label);
  }
  std::size_t size() const noexcept { return classes.size(); }

  friend bool operator==(const LabelSpace&, const LabelSpace&) = default;
};

struct Instance {
  FeatureVector x;
  int label = 0;
  friend bool operator==(const Instance&, const Instance&) = default;
};

/// Labelled instances sharing one dimension, with labels drawn from a declared space.
class Dataset {
public:
  Dataset() = default;

  Dataset(std::vector<Instance> instances, LabelSpace space)
      : instances_(std::move(instances)), space_(std::move(space)) {
    if (instances_.empty()) return;
    const std::size_t d = instances_.front().x.dim();
    for (std::size_t i = 0; i < instances_.size(); ++i) {
      if (instances_[i].x.dim() != d) {
        throw InputError("instance " + std::to_string(i) + " has dimension " +
                         std::to_string(instances_[i].x.dim()) + ", expected " +
                         std::to_string(d));
      }
      if (!space_.contains(instances_[i].label)) {
        throw InputError("instance " + std::to_string(i) + " has label " +
                         std::to_string(instances_[i].label) + " outside the label space");
      }
    }
  }

  /// Dataset whose label space is inferred from the labels present.
  static Dataset with_inferred_space(std::vector<Instance> instances) {
    std::vector<int> labels;
    labels.reserve(instances.size());
    for (const auto& inst : instances) labels.push_back(inst.label);
    auto space = LabelSpace::infer(labels);
    return Dataset(std::move(instances), std::move(space));
  }

  std::size_t size() const noexcept { return instances_.size(); }
  bool empty() const noexcept { return instances_.empty(); }
  std::size_t dim() const noexcept { return empty() ? 0 : instances_.front().x.dim(); }
  const Instance& operator[](std::size_t i) const { return instances_[i]; }
  const std::vector<Instance>& instances() const noexcept { return instances_; }
  const LabelSpace& label_space() const noexcept { return space_; }

  std::vector<int> labels() const {
    std::vector<int> out;
    out.reserve(size());
    for (const auto& inst : instances_) out.push_back(inst.label);
    return out;
  }

  /// Subset by index, keeping the declared label space.
  Dataset subset(std::span<const std::size_t> indices) const {
    std::vector<Instance> picked;
    picked.reserve(indices.size());
    for (auto i : indices) picked.push_back(instances_.at(i));
    return Dataset(std::move(picked), space_);
  }

  friend bool operator==(const Dataset&, const Dataset&) = default;

private:
  std::vector<Instance> instances_;
  LabelSpace space_;
};

// ---------------------------------------------------------------------------
// Metrics

/// The seven reported metrics. F1/precision/recall are macro-averaged over the
/// union of classes seen in truth and predictions; MSE/MAE/R^2 treat labels as integers.
struct MetricsReport {
  double accuracy = 0.0;
  double f1 = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double mse = 0.0;
  double mae = 0.0;
  double r2 = 0.0;

  friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

inline constexpr std::size_t kMetricCount = 7;
inline constexpr std::array<const char*, kMetricCount> kMetricNames = {
    "accuracy", "f1", "precision", "recall", "mse", "mae", "r2"};
inline constexpr std::array<bool, kMetricCount> kHigherIsBetter = {
    true, true, true, true, false, false, true};

inline std::array<double, kMetricCount> metric_values(const MetricsReport& m) {
  return {m.accuracy, m.f1, m.precision, m.recall, m.mse, m.mae, m.r2};
}

inline MetricsReport metrics_from_values(const std::array<double, kMetricCount>& v) {
  return {v[0], v[1], v[2], v[3], v[4], v[5], v[6]};
}

inline MetricsReport compute_metrics(std::span<const int> predictions, std::span<const int> truth) {
  if (predictions.size() != truth.size()) {
    throw InputError("prediction/truth length mismatch: " + std::to_string(predictions.size()) +
                     " vs " + std::to_string(truth.size()));
  }
  if (truth.empty()) throw InputError("cannot compute metrics on empty input");

  const auto n = static_cast<double>(truth.size());
  std::set<int> classes(truth.begin(), truth.end());
  classes.insert(predictions.begin(), predictions.end());

  std::map<int, std::size_t> tp, pred_count, true_count;
  std::size_t correct = 0;
  double abs_sum = 0.0, sq_sum = 0.0, truth_sum = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const int p = predictions[i], t = truth[i];
    ++pred_count[p];
    ++true_count[t];
    if (p == t) {
      ++correct;
      ++tp[t];
    }
    const double diff = static_cast<double>(p) - static_cast<double>(t);
    abs_sum += std::abs(diff);
    sq_sum += diff * diff;
    truth_sum += t;
  }

  MetricsReport m;
  m.accuracy = static_cast<double>(correct) / n;
  for (int c : classes) {
    const double tpc = static_cast<double>(tp[c]);
    const double prec = pred_count[c] ? tpc / static_cast<double>(pred_count[c]) : 0.0;
    const double rec = true_count[c] ? tpc / static_cast<double>(true_count[c]) : 0.0;
    const double f1 = prec + rec > 0.0 ? 2.0 * prec * rec / (prec + rec) : 0.0;
    m.precision += prec;
    m.recall += rec;
    m.f1 += f1;
  }
  const auto k = static_cast<double>(classes.size());
  m.precision /= k;
  m.recall /= k;
  m.f1 /= k;
  m.mse = sq_sum / n;
  m.mae = abs_sum / n;

  const double mean = truth_sum / n;
  double sst = 0.0;
  for (int t : truth) sst += (t - mean) * (t - mean);
  if (sst > 0.0) {
    m.r2 = 1.0 - sq_sum / sst;
  } else {
    // Constant truth: R^2 is undefined; exact fit reports 1, anything else -inf.
    m.r2 = sq_sum == 0.0 ? 1.0 : -std::numeric_limits<double>::infinity();
  }
  return m;
}

// ---------------------------------------------------------------------------
// Ranking

struct MethodRanks {
  std::array<int, kMetricCount> per_metric{};
  double average = 0.0;
  int overall = 0;  // rank of `average`, lower is better

  friend bool operator==(const MethodRanks&, const MethodRanks&) = default;
};

using RankedTable = std::map<std::string, MethodRanks>;

namespace detail {

/// Competition ranking ("1224"): equal scores share the better rank, the next rank is skipped.
inline std::vector<int> competition_ranks(const std::vector<double>& scores, bool higher_better) {
  std::vector<int> ranks(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    int better = 0;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (higher_better ? scores[j] > scores[i] : scores[j] < scores[i]) ++better;
    }
    ranks[i] = better + 1;
  }
  return ranks;
}

}  // namespace detail

inline RankedTable rank_methods(const std::map<std::string, MetricsReport>& reports) {
  if (reports.empty()) throw InputError("rank_methods needs at least one report");

  std::vector<std::string> names;
  std::vector<std::array<double, kMetricCount>> values;
  for (const auto& [name, m] : reports) {
    names.push_back(name);
    values.push_back(metric_values(m));
  }

  RankedTable table;
  for (const auto& name : names) table[name];
  for (std::size_t k = 0; k < kMetricCount; ++k) {
    std::vector<double> column;
    for (const auto& v : values) column.push_back(v[k]);
    const auto ranks = detail::competition_ranks(column, kHigherIsBetter[k]);
    for (std::size_t i = 0; i < names.size(); ++i) table[names[i]].per_metric[k] = ranks[i];
  }

  std::vector<double> averages;
  for (const auto& name : names) {
    auto& r = table[name];
    double sum = 0.0;
    for (int v : r.per_metric) sum += v;
    r.average = sum / static_cast<double>(kMetricCount);
    averages.push_back(r.average);
  }
  const auto overall = detail::competition_ranks(averages, false);
  for (std::size_t i = 0; i < names.size(); ++i) table[names[i]].overall = overall[i];
  return table;
}

}  // namespace deepens
