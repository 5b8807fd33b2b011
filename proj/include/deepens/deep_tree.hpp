#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "deepens/activation.hpp"
#include "deepens/core.hpp"
#include "deepens/error.hpp"
#include "deepens/shallow.hpp"

namespace deepens {

enum class Topology { Balanced, Chain };

inline const char* to_string(Topology t) { return t == Topology::Balanced ? "balanced" : "chain"; }

inline Topology parse_topology(const std::string& name) {
  if (name == "balanced") return Topology::Balanced;
  if (name == "chain") return Topology::Chain;
  throw InputError("unknown topology '" + name + "' (expected balanced or chain)");
}

/// A child slot of an internal node: either input coordinate `index` or internal node `index`.
struct TreeChild {
  bool is_leaf = true;
  std::size_t index = 0;
  friend bool operator==(const TreeChild&, const TreeChild&) = default;
};

/// Internal node computing (approximately) left * right with a 4-unit product gadget.
struct ProductNode {
  TreeChild left;
  TreeChild right;
  ShallowNetwork gadget;
  std::size_t level = 1;  // 1 + max(child levels); leaves sit at level 0
};

/// Binary tree of product gadgets over d leaves. Nodes are stored children-first, the
/// root is the last node.
struct DeepNetwork {
  std::size_t dim = 0;
  Topology topology = Topology::Balanced;
  std::vector<ProductNode> nodes;
  std::size_t total_units = 0;
  std::size_t ensemble_layers = 0;  // internal levels, leaves excluded

  /// Level count including the leaf level, the convention that reports ceil(log d) + 1.
  std::size_t layers_including_leaves() const noexcept { return ensemble_layers + 1; }
  std::size_t internal_node_count() const noexcept { return nodes.size(); }
};

namespace detail {

inline std::size_t child_level(const std::vector<ProductNode>& nodes, const TreeChild& c) {
  return c.is_leaf ? 0 : nodes[c.index].level;
}

inline TreeChild build_subtree(std::vector<ProductNode>& nodes, std::size_t lo, std::size_t hi,
                               Topology topology, const ShallowNetwork& gadget) {
  const std::size_t count = hi - lo;
  if (count == 1) return {true, lo};
  // Balanced trees put the extra leaf on the left; chains peel one leaf per level.
  const std::size_t split = topology == Topology::Balanced ? lo + (count + 1) / 2 : lo + 1;
  const TreeChild left = build_subtree(nodes, lo, split, topology, gadget);
  const TreeChild right = build_subtree(nodes, split, hi, topology, gadget);
  ProductNode node{left, right, gadget, 0};
  node.level = 1 + std::max(child_level(nodes, left), child_level(nodes, right));
  nodes.push_back(std::move(node));
  return {false, nodes.size() - 1};
}

inline std::size_t ceil_log2(std::size_t d) {
  std::size_t levels = 0;
  while ((std::size_t{1} << levels) < d) ++levels;
  return levels;
}

}  // namespace detail

inline DeepNetwork build_deep_monomial_network(std::size_t d, Topology topology,
                                               const ActivationSpec& activation, double lambda) {
  if (d < 2) throw InputError("deep monomial network needs d >= 2");
  const ShallowNetwork gadget = build_monomial_network(2, activation, lambda);

  DeepNetwork net;
  net.dim = d;
  net.topology = topology;
  net.nodes.reserve(d - 1);
  detail::build_subtree(net.nodes, 0, d, topology, gadget);
  net.total_units = 0;
  for (const auto& n : net.nodes) net.total_units += n.gadget.unit_count();
  net.ensemble_layers = net.nodes.back().level;
  return net;
}

inline double eval_deep(const DeepNetwork& net, std::span<const double> x) {
  if (x.size() != net.dim) {
    throw InputError("eval_deep: input has dimension " + std::to_string(x.size()) +
                     ", network expects " + std::to_string(net.dim));
  }
  std::vector<double> out(net.nodes.size());
  const auto value = [&](const TreeChild& c) { return c.is_leaf ? x[c.index] : out[c.index]; };
  for (std::size_t i = 0; i < net.nodes.size(); ++i) {
    const auto& node = net.nodes[i];
    const std::array<double, 2> pair{value(node.left), value(node.right)};
    out[i] = eval_shallow(node.gadget, std::span<const double>(pair));
  }
  return out.back();
}

inline double eval_deep(const DeepNetwork& net, const FeatureVector& x) {
  return eval_deep(net, x.values());
}

inline double sup_cube_error_vs_monomial(const DeepNetwork& net) {
  detail::check_cube_dimension(net.dim);
  const std::size_t n = std::size_t{1} << net.dim;
  std::vector<double> x(net.dim);
  double worst = 0.0;
  for (Subset p = 0; p < n; ++p) {
    for (std::size_t i = 0; i < net.dim; ++i) x[i] = (p >> i) & 1U ? 1.0 : 0.0;
    const double target = p == n - 1 ? 1.0 : 0.0;
    worst = std::max(worst, std::abs(eval_deep(net, std::span<const double>(x)) - target));
  }
  return worst;
}

/// sup |G(a, b) - a b| of a product gadget over a grid on [-delta, 1 + delta]^2. Inner tree
/// nodes see inputs perturbed by the previous level's error, so this is the relevant accuracy.
inline double product_gadget_box_error(const ShallowNetwork& gadget, double delta,
                                       std::size_t grid = 41) {
  if (gadget.dim != 2) throw InputError("product gadget must have dimension 2");
  grid = std::max<std::size_t>(grid, 2);
  double worst = 0.0;
  for (std::size_t i = 0; i < grid; ++i) {
    for (std::size_t j = 0; j < grid; ++j) {
      const double a = -delta + (1.0 + 2.0 * delta) * static_cast<double>(i) / static_cast<double>(grid - 1);
      const double b = -delta + (1.0 + 2.0 * delta) * static_cast<double>(j) / static_cast<double>(grid - 1);
      const std::array<double, 2> p{a, b};
      worst = std::max(worst, std::abs(eval_shallow(gadget, std::span<const double>(p)) - a * b));
    }
  }
  return worst;
}

struct UnitCountRow {
  std::size_t d = 0;
  std::uint64_t shallow_units = 0;  // 2^d
  std::uint64_t deep_units = 0;     // 4 (d - 1)
  std::size_t shallow_layers = 1;
  std::size_t deep_layers_balanced = 0;  // ceil(log2 d) internal levels
  std::size_t deep_layers_including_leaves = 0;

  friend bool operator==(const UnitCountRow&, const UnitCountRow&) = default;
};

inline std::vector<UnitCountRow> unit_count_comparison(const std::vector<std::size_t>& dims) {
  std::vector<UnitCountRow> rows;
  for (auto d : dims) {
    if (d < 2) throw InputError("unit_count_comparison: every d must be >= 2");
    if (d > 63) throw SizeError("unit_count_comparison: 2^d overflows for d > 63");
    UnitCountRow r;
    r.d = d;
    r.shallow_units = std::uint64_t{1} << d;
    r.deep_units = 4 * static_cast<std::uint64_t>(d - 1);
    r.deep_layers_balanced = detail::ceil_log2(d);
    r.deep_layers_including_leaves = r.deep_layers_balanced + 1;
    rows.push_back(r);
  }
  return rows;
}

}  // namespace deepens
