#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "deepens/activation.hpp"
#include "deepens/core.hpp"
#include "deepens/error.hpp"
#include "deepens/multilinear.hpp"
#include "deepens/rational.hpp"

namespace deepens {

/// |c_k| at or below this is treated as a vanishing Taylor coefficient.
inline constexpr double kDegenerateCoefficient = 1e-12;

/// One sigmoidal unit v * sigma(lambda * <signs, x> + inner_bias).
struct ShallowUnit {
  double output_weight = 0.0;
  std::vector<int> input_signs;  // entries in {-1, 0, +1}
  double inner_bias = 0.0;

  friend bool operator==(const ShallowUnit&, const ShallowUnit&) = default;
};

/// One ensemble layer of sigmoidal units with identity outer map:
/// F(x) = output_offset + sum_i v_i sigma(lambda <w_i, x> + w0_i).
struct ShallowNetwork {
  std::size_t dim = 0;
  double input_scale = 1.0;  // lambda
  ActivationSpec activation;
  double output_offset = 0.0;
  std::vector<ShallowUnit> units;

  std::size_t unit_count() const noexcept { return units.size(); }

  friend bool operator==(const ShallowNetwork&, const ShallowNetwork&) = default;
};

namespace detail {

inline double factorial(std::size_t k) {
  double f = 1.0;
  for (std::size_t i = 2; i <= k; ++i) f *= static_cast<double>(i);
  return f;
}

inline void require_positive_scale(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw DomainError("input scale lambda must be a positive finite number");
  }
}

inline double nonvanishing_coefficient(const TaylorCoeffs& coeffs, std::size_t k,
                                       const ActivationSpec& act, const std::string& context) {
  const double ck = coeffs[k];
  if (std::abs(ck) <= kDegenerateCoefficient) {
    throw DegenerateActivationError(
        context + ": Taylor coefficient sigma_" + std::to_string(k) + " of " + to_string(act.kind) +
        " vanishes at expansion point b=" + std::to_string(act.bias_offset) +
        "; use a shifted activation");
  }
  return ck;
}

/// Appends the 2^|S| units approximating scale * prod_{i in S} x_i. Units follow
/// increasing submask order T of S; unit T has sign -1 on T and +1 on S \ T.
inline void append_monomial_units(std::vector<ShallowUnit>& units, std::size_t d, Subset vars,
                                  double scale, double ck, double lambda) {
  const std::size_t k = subset_size(vars);
  const double denom = std::ldexp(1.0, static_cast<int>(k)) * factorial(k) * ck * std::pow(lambda, static_cast<double>(k));
  for (Subset t = 0; t <= vars; ++t) {
    if ((t & ~vars) != 0) continue;
    ShallowUnit u;
    u.input_signs.assign(d, 0);
    for (std::size_t j = 0; j < d; ++j) {
      if ((vars >> j) & 1U) u.input_signs[j] = ((t >> j) & 1U) ? -1 : +1;
    }
    const double parity = subset_size(t) % 2 == 0 ? 1.0 : -1.0;
    u.output_weight = scale * parity / denom;
    u.inner_bias = 0.0;
    units.push_back(std::move(u));
  }
}

}  // namespace detail

/// 2^d units with subset-sign input weights approximating prod_i x_i.
/// Output weights are (-1)^{|S|} / (2^d d! c_d lambda^d), where c_d is the d-th Taylor
/// coefficient of the activation at its bias offset; the error on the cube is O(lambda).
inline ShallowNetwork build_monomial_network(std::size_t d, const ActivationSpec& activation,
                                             double lambda) {
  if (d < 1) throw InputError("monomial network needs d >= 1");
  detail::check_cube_dimension(d);
  detail::require_positive_scale(lambda);
  const auto coeffs = taylor_coeffs(activation, d);
  const double cd = detail::nonvanishing_coefficient(coeffs, d, activation, "build_monomial_network");

  ShallowNetwork net;
  net.dim = d;
  net.input_scale = lambda;
  net.activation = activation;
  net.units.reserve(std::size_t{1} << d);
  const Subset all = static_cast<Subset>((std::size_t{1} << d) - 1);
  detail::append_monomial_units(net.units, d, all, 1.0, cd, lambda);
  return net;
}

/// Concatenates one monomial sub-network per nonzero term of `poly`, scaled by the term's
/// coefficient; the constant term becomes the output offset.
inline ShallowNetwork build_function_network(const MultilinearPoly& poly,
                                             const ActivationSpec& activation, double lambda) {
  detail::require_positive_scale(lambda);
  const auto terms = poly.nonzero_terms();

  ShallowNetwork net;
  net.dim = poly.dim();
  net.input_scale = lambda;
  net.activation = activation;

  std::size_t max_order = 0;
  for (const auto& [s, v] : terms) max_order = std::max(max_order, subset_size(s));
  TaylorCoeffs coeffs;
  if (max_order > 0) coeffs = taylor_coeffs(activation, max_order);

  for (const auto& [s, v] : terms) {
    if (s == 0) {
      net.output_offset = v.get_d();
      continue;
    }
    const double ck = detail::nonvanishing_coefficient(
        coeffs, subset_size(s), activation,
        "build_function_network (subset " + subset_to_string(s) + ", size " +
            std::to_string(subset_size(s)) + ")");
    detail::append_monomial_units(net.units, net.dim, s, v.get_d(), ck, lambda);
  }
  return net;
}

inline double eval_shallow(const ShallowNetwork& net, std::span<const double> x) {
  if (x.size() != net.dim) {
    throw InputError("eval_shallow: input has dimension " + std::to_string(x.size()) +
                     ", network expects " + std::to_string(net.dim));
  }
  double sum = net.output_offset;
  for (const auto& u : net.units) {
    double dot = 0.0;
    for (std::size_t j = 0; j < net.dim; ++j) dot += u.input_signs[j] * x[j];
    sum += u.output_weight * eval_activation(net.activation, net.input_scale * dot + u.inner_bias);
  }
  return sum;
}

inline double eval_shallow(const ShallowNetwork& net, const FeatureVector& x) {
  return eval_shallow(net, x.values());
}

/// Network values at every cube point, indexed by cube-point mask.
inline std::vector<double> cube_values(const ShallowNetwork& net) {
  detail::check_cube_dimension(net.dim);
  std::vector<double> out(std::size_t{1} << net.dim);
  std::vector<double> x(net.dim);
  for (Subset p = 0; p < out.size(); ++p) {
    for (std::size_t i = 0; i < net.dim; ++i) x[i] = (p >> i) & 1U ? 1.0 : 0.0;
    out[p] = eval_shallow(net, std::span<const double>(x));
  }
  return out;
}

/// sup over {0,1}^d of |F(x) - prod_i x_i|.
inline double sup_cube_error_vs_monomial(const ShallowNetwork& net) {
  const auto values = cube_values(net);
  const Subset all = static_cast<Subset>(values.size() - 1);
  double worst = 0.0;
  for (Subset p = 0; p < values.size(); ++p) {
    worst = std::max(worst, std::abs(values[p] - (p == all ? 1.0 : 0.0)));
  }
  return worst;
}

/// Exact multilinear coefficients of the network's restriction to the cube.
inline MultilinearPoly network_multilinear_coeffs(const ShallowNetwork& net) {
  const auto values = cube_values(net);
  std::vector<Rational> exact;
  exact.reserve(values.size());
  for (double v : values) exact.push_back(to_rational(v));
  return interpolate_multilinear(std::move(exact), net.dim);
}

// ---------------------------------------------------------------------------
// Necessity certificate

struct RankReport {
  std::size_t rank = 0;
  std::size_t rows = 0;     // 2^d subsets
  std::size_t columns = 0;  // units
  bool full_rank = false;   // rank == 2^d
};

/// Rank over Q of A(S, j) = prod_{i in S} w^j_i, rows indexed by every S subset {1..d}.
inline RankReport necessity_rank_certificate(const ShallowNetwork& net) {
  detail::check_cube_dimension(net.dim);
  const std::size_t rows = std::size_t{1} << net.dim;
  RationalMatrix a(rows, std::vector<Rational>(net.unit_count()));
  for (Subset s = 0; s < rows; ++s) {
    for (std::size_t j = 0; j < net.unit_count(); ++j) {
      int prod = 1;
      for (std::size_t i = 0; i < net.dim; ++i)
        if ((s >> i) & 1U) prod *= net.units[j].input_signs[i];
      a[s][j] = prod;
    }
  }
  RankReport r;
  r.rows = rows;
  r.columns = net.unit_count();
  r.rank = exact_rank(std::move(a));
  r.full_rank = r.rank == rows;
  return r;
}

}  // namespace deepens
