#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "deepens/activation.hpp"
#include "deepens/core.hpp"
#include "deepens/error.hpp"
#include "deepens/random.hpp"

namespace deepens {

struct LossAndGradient {
  double loss = 0.0;
  std::vector<double> gradient;
};

namespace detail {

/// log(1 + e^z) without overflow.
inline double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

inline double logistic(double z) { return eval_activation(ActivationSpec::logistic(), z); }

/// Gradient descent that halves the step whenever a step would raise the loss, so the
/// accepted loss sequence never increases. `objective` maps parameters to loss and gradient.
template <typename Objective>
std::vector<double> descend(std::vector<double> params, Objective&& objective, std::size_t epochs,
                            double learning_rate, std::uint64_t seed,
                            std::vector<double>* loss_trace) {
  LossAndGradient current = objective(params);
  if (!std::isfinite(current.loss)) {
    throw RunError("training diverged at initialization (seed " + std::to_string(seed) + ")");
  }
  if (loss_trace) loss_trace->assign(1, current.loss);
  double step = learning_rate;
  std::vector<double> candidate(params.size());
  for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
    for (std::size_t i = 0; i < params.size(); ++i) candidate[i] = params[i] - step * current.gradient[i];
    LossAndGradient next = objective(candidate);
    if (!std::isfinite(next.loss)) {
      throw RunError("training diverged: non-finite loss at epoch " + std::to_string(epoch) +
                     " (seed " + std::to_string(seed) + ")");
    }
    if (next.loss <= current.loss) {
      params.swap(candidate);
      current = std::move(next);
    } else {
      step *= 0.5;
    }
    if (loss_trace) loss_trace->push_back(current.loss);
  }
  return params;
}

inline std::vector<double> uniform_init(std::size_t count, std::uint64_t seed, std::uint64_t stream) {
  Rng rng = make_rng(seed, stream);
  std::vector<double> p(count);
  for (auto& v : p) v = uniform(rng, -0.1, 0.1);
  return p;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Unit model: f(x) = sigma(w.x + w0)

struct UnitModel {
  std::vector<double> weights;
  double bias = 0.0;
  ActivationSpec activation = ActivationSpec::logistic();
  std::uint64_t seed = 0;

  double score(std::span<const double> x) const {
    if (x.size() != weights.size()) throw InputError("unit model: dimension mismatch");
    double z = bias;
    for (std::size_t i = 0; i < x.size(); ++i) z += weights[i] * x[i];
    return z;
  }
  double predict_proba(const FeatureVector& x) const { return eval_activation(activation, score(x.values())); }
  int predict(const FeatureVector& x) const { return predict_proba(x) >= 0.5 ? 1 : 0; }

  /// Parameters as [w_1..w_d, w0].
  std::vector<double> parameters() const {
    auto p = weights;
    p.push_back(bias);
    return p;
  }
};

/// Mean cross-entropy of sigma(w.x + w0) against binary labels, with its gradient
/// ordered as UnitModel::parameters().
inline LossAndGradient logistic_objective(std::span<const double> params, const Dataset& data) {
  const std::size_t d = data.dim();
  if (params.size() != d + 1) throw InputError("logistic_objective: parameter count mismatch");
  if (data.empty()) throw InputError("logistic_objective: empty dataset");
  LossAndGradient out{0.0, std::vector<double>(d + 1, 0.0)};
  for (const auto& inst : data.instances()) {
    double z = params[d];
    for (std::size_t i = 0; i < d; ++i) z += params[i] * inst.x[i];
    const double y = inst.label;
    out.loss += detail::softplus(z) - y * z;
    const double residual = detail::logistic(z) - y;
    for (std::size_t i = 0; i < d; ++i) out.gradient[i] += residual * inst.x[i];
    out.gradient[d] += residual;
  }
  const double n = static_cast<double>(data.size());
  out.loss /= n;
  for (auto& g : out.gradient) g /= n;
  return out;
}

inline constexpr std::size_t kDefaultUnitEpochs = 300;
inline constexpr double kDefaultUnitLearningRate = 1.0;

/// Full-batch gradient descent on cross-entropy from a seed-derived uniform[-0.1, 0.1] init.
inline UnitModel train_logistic_unit(const Dataset& data, std::size_t epochs = kDefaultUnitEpochs,
                                     double learning_rate = kDefaultUnitLearningRate,
                                     std::uint64_t seed = 0,
                                     std::vector<double>* loss_trace = nullptr) {
  if (data.empty()) throw InputError("train_logistic_unit: empty dataset");
  for (const auto& inst : data.instances()) {
    if (inst.label != 0 && inst.label != 1) {
      throw InputError("train_logistic_unit: labels must be binary, found " + std::to_string(inst.label));
    }
  }
  const std::size_t d = data.dim();
  auto params = detail::descend(
      detail::uniform_init(d + 1, seed, 0),
      [&data](const std::vector<double>& p) { return logistic_objective(p, data); }, epochs,
      learning_rate, seed, loss_trace);

  UnitModel m;
  m.bias = params.back();
  params.pop_back();
  m.weights = std::move(params);
  m.seed = seed;
  return m;
}

// ---------------------------------------------------------------------------
// Stacked combiner: logistic hidden layers, softmax output over the label classes

struct DenseLayer {
  std::size_t inputs = 0;
  std::size_t outputs = 0;
  std::vector<double> weights;  // row-major, outputs x inputs
  std::vector<double> biases;

  std::size_t parameter_count() const noexcept { return weights.size() + biases.size(); }
};

class StackedCombiner {
public:
  StackedCombiner() = default;

  /// Layers initialized uniformly in [-0.1, 0.1] from `seed`.
  StackedCombiner(std::size_t inputs, std::vector<std::size_t> hidden, std::vector<int> classes,
                  std::uint64_t seed)
      : hidden_(std::move(hidden)), classes_(std::move(classes)), seed_(seed) {
    if (inputs < 1) throw InputError("stacked combiner needs at least one input");
    if (classes_.size() < 2) throw InputError("stacked combiner needs at least two classes");
    std::size_t in = inputs;
    std::vector<std::size_t> widths = hidden_;
    widths.push_back(classes_.size());
    for (auto w : widths) {
      if (w < 1) throw InputError("stacked combiner layer widths must be >= 1");
      layers_.push_back({in, w, std::vector<double>(in * w), std::vector<double>(w)});
      in = w;
    }
    set_parameters(detail::uniform_init(parameter_count(), seed_, 1));
  }

  std::size_t input_width() const noexcept { return layers_.empty() ? 0 : layers_.front().inputs; }
  std::size_t output_width() const noexcept { return layers_.empty() ? 0 : layers_.back().outputs; }
  const std::vector<std::size_t>& hidden_widths() const noexcept { return hidden_; }
  const std::vector<int>& classes() const noexcept { return classes_; }
  const std::vector<DenseLayer>& layers() const noexcept { return layers_; }
  std::uint64_t seed() const noexcept { return seed_; }

  std::size_t parameter_count() const noexcept {
    std::size_t n = 0;
    for (const auto& l : layers_) n += l.parameter_count();
    return n;
  }

  /// Flattened as, per layer, weights then biases.
  std::vector<double> parameters() const {
    std::vector<double> p;
    p.reserve(parameter_count());
    for (const auto& l : layers_) {
      p.insert(p.end(), l.weights.begin(), l.weights.end());
      p.insert(p.end(), l.biases.begin(), l.biases.end());
    }
    return p;
  }

  void set_parameters(std::span<const double> p) {
    if (p.size() != parameter_count()) throw InputError("stacked combiner: parameter count mismatch");
    std::size_t k = 0;
    for (auto& l : layers_) {
      for (auto& w : l.weights) w = p[k++];
      for (auto& b : l.biases) b = p[k++];
    }
  }

  /// Class probabilities for one row of unit outputs.
  std::vector<double> predict_proba(std::span<const double> row) const {
    auto acts = forward(row);
    return std::move(acts.back());
  }

  int predict(std::span<const double> row) const {
    const auto probs = predict_proba(row);
    const auto best = std::max_element(probs.begin(), probs.end()) - probs.begin();
    return classes_[static_cast<std::size_t>(best)];
  }

  /// Mean cross-entropy over the rows and its gradient in parameters() order.
  LossAndGradient objective(const std::vector<std::vector<double>>& rows,
                            std::span<const int> labels) const {
    if (rows.size() != labels.size()) throw InputError("stacked combiner: rows/labels length mismatch");
    if (rows.empty()) throw InputError("stacked combiner: no training rows");
    LossAndGradient out{0.0, std::vector<double>(parameter_count(), 0.0)};
    std::vector<std::size_t> offsets;
    std::size_t off = 0;
    for (const auto& l : layers_) {
      offsets.push_back(off);
      off += l.parameter_count();
    }

    for (std::size_t r = 0; r < rows.size(); ++r) {
      const auto acts = forward(rows[r]);
      const std::size_t target = class_index(labels[r]);
      const auto& probs = acts.back();
      out.loss -= std::log(std::max(probs[target], 1e-300));

      // Softmax + cross-entropy: dL/dz = p - onehot.
      std::vector<double> delta = probs;
      delta[target] -= 1.0;
      for (std::size_t li = layers_.size(); li-- > 0;) {
        const auto& l = layers_[li];
        const auto& input = acts[li];
        double* gw = out.gradient.data() + offsets[li];
        double* gb = gw + l.weights.size();
        for (std::size_t o = 0; o < l.outputs; ++o) {
          gb[o] += delta[o];
          for (std::size_t i = 0; i < l.inputs; ++i) gw[o * l.inputs + i] += delta[o] * input[i];
        }
        if (li == 0) break;
        std::vector<double> prev(l.inputs, 0.0);
        for (std::size_t o = 0; o < l.outputs; ++o)
          for (std::size_t i = 0; i < l.inputs; ++i) prev[i] += l.weights[o * l.inputs + i] * delta[o];
        for (std::size_t i = 0; i < l.inputs; ++i) prev[i] *= input[i] * (1.0 - input[i]);
        delta = std::move(prev);
      }
    }
    const double n = static_cast<double>(rows.size());
    out.loss /= n;
    for (auto& g : out.gradient) g /= n;
    return out;
  }

private:
  std::size_t class_index(int label) const {
    const auto it = std::lower_bound(classes_.begin(), classes_.end(), label);
    if (it == classes_.end() || *it != label) {
      throw InputError("stacked combiner: label " + std::to_string(label) + " not among its classes");
    }
    return static_cast<std::size_t>(it - classes_.begin());
  }

  /// Activations per layer boundary: acts[0] is the input, acts.back() the softmax output.
  std::vector<std::vector<double>> forward(std::span<const double> row) const {
    if (row.size() != input_width()) throw InputError("stacked combiner: input width mismatch");
    std::vector<std::vector<double>> acts;
    acts.emplace_back(row.begin(), row.end());
    for (std::size_t li = 0; li < layers_.size(); ++li) {
      const auto& l = layers_[li];
      const auto& in = acts.back();
      std::vector<double> z(l.biases);
      for (std::size_t o = 0; o < l.outputs; ++o)
        for (std::size_t i = 0; i < l.inputs; ++i) z[o] += l.weights[o * l.inputs + i] * in[i];
      if (li + 1 < layers_.size()) {
        for (auto& v : z) v = detail::logistic(v);
      } else {
        const double peak = *std::max_element(z.begin(), z.end());
        double total = 0.0;
        for (auto& v : z) total += (v = std::exp(v - peak));
        for (auto& v : z) v /= total;
      }
      acts.push_back(std::move(z));
    }
    return acts;
  }

  std::vector<std::size_t> hidden_;
  std::vector<int> classes_;
  std::uint64_t seed_ = 0;
  std::vector<DenseLayer> layers_;
};

inline constexpr std::size_t kDefaultCombinerEpochs = 400;
inline constexpr double kDefaultCombinerLearningRate = 2.0;

/// Default architecture: one hidden layer of width 2n.
inline std::vector<std::size_t> default_combiner_hidden(std::size_t n) { return {2 * n}; }

/// Trains a combiner mapping each row of n unit outputs to a class. Classes are the sorted
/// distinct labels, widened to {0, 1} when only one binary label is present.
inline StackedCombiner train_stacked_combiner(const std::vector<std::vector<double>>& unit_outputs,
                                              std::span<const int> labels,
                                              std::vector<std::size_t> hidden, std::size_t epochs,
                                              double learning_rate, std::uint64_t seed,
                                              std::vector<double>* loss_trace = nullptr) {
  if (unit_outputs.size() != labels.size()) {
    throw InputError("train_stacked_combiner: " + std::to_string(unit_outputs.size()) + " rows but " +
                     std::to_string(labels.size()) + " labels");
  }
  if (unit_outputs.empty()) throw InputError("train_stacked_combiner: no training rows");
  const std::size_t n = unit_outputs.front().size();
  if (n < 1) throw InputError("train_stacked_combiner: rows must have at least one unit output");
  for (std::size_t r = 0; r < unit_outputs.size(); ++r) {
    if (unit_outputs[r].size() != n) {
      throw InputError("train_stacked_combiner: row " + std::to_string(r) + " has " +
                       std::to_string(unit_outputs[r].size()) + " outputs, expected " + std::to_string(n));
    }
  }
  auto space = LabelSpace::infer(labels);
  StackedCombiner model(n, std::move(hidden), space.classes, seed);
  auto params = detail::descend(
      model.parameters(),
      [&](const std::vector<double>& p) {
        StackedCombiner probe = model;
        probe.set_parameters(p);
        return probe.objective(unit_outputs, labels);
      },
      epochs, learning_rate, seed, loss_trace);
  model.set_parameters(params);
  return model;
}

}  // namespace deepens
