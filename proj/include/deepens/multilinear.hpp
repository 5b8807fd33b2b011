#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "deepens/core.hpp"
#include "deepens/error.hpp"
#include "deepens/rational.hpp"

namespace deepens {

/// Subset of {1..d} as a bitmask: variable i+1 is in the subset iff bit i is set.
/// Cube points use the same encoding (bit i set iff x_{i+1} = 1).
using Subset = std::uint32_t;

inline constexpr std::size_t kMaxCubeDimension = 20;

inline std::size_t subset_size(Subset s) noexcept { return static_cast<std::size_t>(std::popcount(s)); }

inline std::string subset_to_string(Subset s) {
  std::string out = "{";
  bool first = true;
  for (std::size_t i = 0; i < 32; ++i) {
    if ((s >> i) & 1U) {
      if (!first) out += ",";
      out += std::to_string(i + 1);
      first = false;
    }
  }
  return out + "}";
}

/// g(x) = sum_S v_S prod_{i in S} x_i with exact rational coefficients, stored densely
/// (2^d entries, zeros included).
class MultilinearPoly {
public:
  MultilinearPoly() = default;

  MultilinearPoly(std::size_t d, std::vector<Rational> coeffs) : d_(d), coeffs_(std::move(coeffs)) {
    if (d_ > kMaxCubeDimension) {
      throw SizeError("multilinear dimension " + std::to_string(d_) + " exceeds cap " +
                      std::to_string(kMaxCubeDimension));
    }
    if (coeffs_.size() != (std::size_t{1} << d_)) {
      throw InputError("multilinear poly needs exactly 2^d coefficients");
    }
  }

  /// Sparse construction; unspecified subsets get coefficient 0.
  static MultilinearPoly from_terms(std::size_t d, const std::map<Subset, Rational>& terms) {
    if (d > kMaxCubeDimension) throw SizeError("multilinear dimension exceeds cap");
    std::vector<Rational> c(std::size_t{1} << d);
    for (const auto& [s, v] : terms) {
      if (s >> d) throw InputError("subset " + subset_to_string(s) + " is not valid for d=" + std::to_string(d));
      c[s] = v;
    }
    return MultilinearPoly(d, std::move(c));
  }

  std::size_t dim() const noexcept { return d_; }
  std::size_t term_capacity() const noexcept { return coeffs_.size(); }
  const Rational& coeff(Subset s) const { return coeffs_.at(s); }
  const std::vector<Rational>& coeffs() const noexcept { return coeffs_; }

  std::map<Subset, Rational> nonzero_terms() const {
    std::map<Subset, Rational> out;
    for (Subset s = 0; s < coeffs_.size(); ++s)
      if (coeffs_[s] != 0) out.emplace(s, coeffs_[s]);
    return out;
  }

  friend bool operator==(const MultilinearPoly&, const MultilinearPoly&) = default;

private:
  std::size_t d_ = 0;
  std::vector<Rational> coeffs_{Rational(0)};
};

namespace detail {

inline void check_cube_dimension(std::size_t d) {
  if (d > kMaxCubeDimension) {
    throw SizeError("cube dimension " + std::to_string(d) + " exceeds cap " +
                    std::to_string(kMaxCubeDimension) + " (2^d blowup)");
  }
}

/// In-place Moebius transform over the subset lattice:
/// v_S = sum_{T subset S} (-1)^{|S \ T|} g(1_T).
inline void moebius_in_place(std::vector<Rational>& values, std::size_t d) {
  for (std::size_t i = 0; i < d; ++i) {
    const Subset bit = Subset{1} << i;
    for (Subset s = 0; s < values.size(); ++s)
      if (s & bit) values[s] -= values[s ^ bit];
  }
}

}  // namespace detail

/// Truth table indexed by cube-point mask.
using TruthTable = std::map<Subset, Rational>;

inline MultilinearPoly interpolate_multilinear(const TruthTable& table, std::size_t d) {
  detail::check_cube_dimension(d);
  const std::size_t n = std::size_t{1} << d;
  std::vector<Rational> values(n);
  for (Subset p = 0; p < n; ++p) {
    auto it = table.find(p);
    if (it == table.end()) {
      throw InputError("truth table is missing cube point " + subset_to_string(p) +
                       " (coordinates set to 1)");
    }
    values[p] = it->second;
  }
  for (const auto& [p, v] : table) {
    if (p >= n) throw InputError("truth table has point outside {0,1}^" + std::to_string(d));
  }
  detail::moebius_in_place(values, d);
  return MultilinearPoly(d, std::move(values));
}

/// Interpolation from a dense table of cube values (index = cube-point mask).
inline MultilinearPoly interpolate_multilinear(std::vector<Rational> values, std::size_t d) {
  detail::check_cube_dimension(d);
  if (values.size() != (std::size_t{1} << d)) {
    throw InputError("dense truth table must have 2^d entries");
  }
  detail::moebius_in_place(values, d);
  return MultilinearPoly(d, std::move(values));
}

inline Rational eval_poly(const MultilinearPoly& poly, const FeatureVector& x) {
  if (x.dim() != poly.dim()) {
    throw InputError("eval_poly: point has dimension " + std::to_string(x.dim()) +
                     ", poly has " + std::to_string(poly.dim()));
  }
  std::vector<Rational> xs;
  xs.reserve(x.dim());
  for (double v : x.values()) xs.push_back(to_rational(v));
  Rational total = 0;
  for (Subset s = 0; s < poly.term_capacity(); ++s) {
    const auto& c = poly.coeff(s);
    if (c == 0) continue;
    Rational term = c;
    for (std::size_t i = 0; i < poly.dim(); ++i)
      if ((s >> i) & 1U) term *= xs[i];
    total += term;
  }
  return total;
}

/// Evaluation at a cube point: sum of v_S over S contained in the point.
inline Rational eval_poly(const MultilinearPoly& poly, Subset point) {
  if (point >> poly.dim()) throw InputError("eval_poly: cube point outside dimension");
  Rational total = 0;
  // Enumerate submasks of `point`.
  for (Subset s = point;; s = (s - 1) & point) {
    total += poly.coeff(s);
    if (s == 0) break;
  }
  return total;
}

}  // namespace deepens
