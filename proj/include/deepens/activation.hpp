#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "deepens/core.hpp"
#include "deepens/error.hpp"

namespace deepens {

enum class ActivationKind { Logistic, ShiftedLogistic, HyperbolicSigmoid, HardThreshold };

inline const char* to_string(ActivationKind kind) {
  switch (kind) {
    case ActivationKind::Logistic: return "logistic";
    case ActivationKind::ShiftedLogistic: return "shifted-logistic";
    case ActivationKind::HyperbolicSigmoid: return "hyperbolic-sigmoid";
    case ActivationKind::HardThreshold: return "hard-threshold";
  }
  return "unknown";
}

inline ActivationKind parse_activation_kind(const std::string& name) {
  if (name == "logistic") return ActivationKind::Logistic;
  if (name == "shifted-logistic") return ActivationKind::ShiftedLogistic;
  if (name == "hyperbolic-sigmoid") return ActivationKind::HyperbolicSigmoid;
  if (name == "hard-threshold") return ActivationKind::HardThreshold;
  throw InputError("unknown activation kind '" + name + "'");
}

/// A squashing function sigma(u + bias_offset) bounded in magnitude by `bound`.
///
/// Logistic and shifted-logistic share the formula 1/(1+e^{-(u+b)}); the shifted
/// kind exists so the constructive networks get an expansion point where every
/// Taylor coefficient is generically nonzero (b = 1 by default).
/// Hyperbolic-sigmoid is (1 + tanh(u+b))/2. Hard-threshold is 1 for u+b >= 0, else 0.
struct ActivationSpec {
  ActivationKind kind = ActivationKind::Logistic;
  double bias_offset = 0.0;
  double bound = 1.0;

  static ActivationSpec logistic(double b = 0.0) { return {ActivationKind::Logistic, b, 1.0}; }
  static ActivationSpec shifted_logistic(double b = 1.0) {
    return {ActivationKind::ShiftedLogistic, b, 1.0};
  }
  static ActivationSpec hyperbolic_sigmoid(double b = 0.0) {
    return {ActivationKind::HyperbolicSigmoid, b, 1.0};
  }
  static ActivationSpec hard_threshold(double b = 0.0) {
    return {ActivationKind::HardThreshold, b, 1.0};
  }

  bool smooth() const noexcept { return kind != ActivationKind::HardThreshold; }

  friend bool operator==(const ActivationSpec&, const ActivationSpec&) = default;
};

inline double eval_activation(const ActivationSpec& spec, double u) {
  const double z = u + spec.bias_offset;
  switch (spec.kind) {
    case ActivationKind::Logistic:
    case ActivationKind::ShiftedLogistic:
      // Split on sign so exp never overflows.
      if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
      else {
        const double e = std::exp(z);
        return e / (1.0 + e);
      }
    case ActivationKind::HyperbolicSigmoid:
      return 0.5 * (1.0 + std::tanh(z));
    case ActivationKind::HardThreshold:
      return z >= 0.0 ? 1.0 : 0.0;
  }
  return 0.0;
}

/// Taylor coefficients c_k = sigma^{(k)}(b) / k! of the activation around its bias offset,
/// i.e. eval_activation(spec, u) ~ sum_k c_k u^k for small u.
struct TaylorCoeffs {
  std::vector<double> c;

  std::size_t order() const noexcept { return c.empty() ? 0 : c.size() - 1; }
  double operator[](std::size_t k) const { return c.at(k); }

  double eval(double u) const {
    double acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * u + *it;
    return acc;
  }
};

namespace detail {

using Poly = std::vector<long double>;  // ascending powers

inline Poly poly_derivative(const Poly& p) {
  if (p.size() <= 1) return {0.0L};
  Poly d(p.size() - 1);
  for (std::size_t i = 1; i < p.size(); ++i) d[i - 1] = static_cast<long double>(i) * p[i];
  return d;
}

inline Poly poly_mul(const Poly& a, const Poly& b) {
  Poly r(a.size() + b.size() - 1, 0.0L);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

inline long double poly_eval(const Poly& p, long double s) {
  long double acc = 0.0L;
  for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * s + *it;
  return acc;
}

}  // namespace detail

/// Derivatives are tracked as polynomials in the activation's own state variable:
/// for the logistic s' = s(1 - s); for (1 + tanh)/2 the state is t = tanh with t' = 1 - t^2.
/// The polynomials keep dyadic coefficients (exact in floating point), so symmetric
/// cases such as the even coefficients of the logistic at 0 come out exactly zero.
inline TaylorCoeffs taylor_coeffs(const ActivationSpec& spec, std::size_t order) {
  using detail::Poly;
  Poly derivative;  // k-th derivative of sigma as a polynomial in the state variable
  Poly state_rate;  // d(state)/du as a polynomial in the state variable
  long double state = 0.0L;
  switch (spec.kind) {
    case ActivationKind::Logistic:
    case ActivationKind::ShiftedLogistic:
      derivative = {0.0L, 1.0L};
      state_rate = {0.0L, 1.0L, -1.0L};
      state = 1.0L / (1.0L + std::exp(-static_cast<long double>(spec.bias_offset)));
      break;
    case ActivationKind::HyperbolicSigmoid:
      derivative = {0.5L, 0.5L};
      state_rate = {1.0L, 0.0L, -1.0L};
      state = std::tanh(static_cast<long double>(spec.bias_offset));
      break;
    case ActivationKind::HardThreshold:
      throw UnsupportedKindError("taylor_coeffs: hard-threshold activation is not differentiable");
  }

  TaylorCoeffs out;
  out.c.reserve(order + 1);
  long double factorial = 1.0L;
  for (std::size_t k = 0; k <= order; ++k) {
    if (k > 0) factorial *= static_cast<long double>(k);
    out.c.push_back(k == 0 ? eval_activation(spec, 0.0)
                           : static_cast<double>(detail::poly_eval(derivative, state) / factorial));
    derivative = detail::poly_mul(detail::poly_derivative(derivative), state_rate);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sigmoidal / bounded checks

struct SigmoidalCheck {
  double value_at_plus = 0.0;   // sigma(+U)
  double value_at_minus = 0.0;  // sigma(-U)
  double max_abs_sampled = 0.0;
  bool upper_limit = false;  // |sigma(U) - 1| <= tol
  bool lower_limit = false;  // |sigma(-U)| <= tol
  bool bounded = false;      // sampled |sigma| <= B
  bool passed() const noexcept { return upper_limit && lower_limit && bounded; }
};

/// Probes an arbitrary scalar function for the sigmoidal limits at +-U and for
/// |f| <= bound on a uniform grid over [-U, U].
template <typename F>
SigmoidalCheck check_sigmoidal_bounded(F&& f, double bound, double probe, double tol,
                                       std::size_t samples = 2001) {
  if (!(probe > 0.0)) throw DomainError("probe magnitude must be positive");
  SigmoidalCheck r;
  r.value_at_plus = f(probe);
  r.value_at_minus = f(-probe);
  r.upper_limit = std::abs(r.value_at_plus - 1.0) <= tol;
  r.lower_limit = std::abs(r.value_at_minus) <= tol;
  samples = std::max<std::size_t>(samples, 2);
  for (std::size_t i = 0; i < samples; ++i) {
    const double u = -probe + 2.0 * probe * static_cast<double>(i) / static_cast<double>(samples - 1);
    r.max_abs_sampled = std::max(r.max_abs_sampled, std::abs(f(u)));
  }
  r.bounded = r.max_abs_sampled <= bound;
  return r;
}

inline SigmoidalCheck check_sigmoidal_bounded(const ActivationSpec& spec, double probe, double tol) {
  return check_sigmoidal_bounded([&spec](double u) { return eval_activation(spec, u); },
                                 spec.bound, probe, tol);
}

// ---------------------------------------------------------------------------
// Pointwise limit of sigma(lambda (w.x + w0) + phi) as lambda grows

enum class LimitCase { ToOne, ToZero, Hyperplane };

inline const char* to_string(LimitCase c) {
  switch (c) {
    case LimitCase::ToOne: return "positive-half-space";
    case LimitCase::ToZero: return "negative-half-space";
    case LimitCase::Hyperplane: return "hyperplane";
  }
  return "unknown";
}

struct LimitProbe {
  std::vector<std::pair<double, double>> trace;  // (lambda, value)
  double affine = 0.0;                           // w.x + w0
  LimitCase limit_case = LimitCase::Hyperplane;
  double limit = 0.0;  // 1, 0, or sigma(phi)
};

inline LimitProbe discriminatory_limit_probe(const ActivationSpec& spec, const FeatureVector& w,
                                             double w0, double phi,
                                             const std::vector<double>& lambda_schedule,
                                             const FeatureVector& x) {
  if (w.dim() != x.dim()) throw InputError("probe: weight and point dimensions differ");
  if (lambda_schedule.empty()) throw InputError("probe: empty lambda schedule");
  for (std::size_t i = 0; i < lambda_schedule.size(); ++i) {
    if (!(lambda_schedule[i] > 0.0)) throw InputError("probe: lambda values must be positive");
    if (i > 0 && !(lambda_schedule[i] > lambda_schedule[i - 1])) {
      throw InputError("probe: lambda schedule must be strictly increasing");
    }
  }

  LimitProbe out;
  for (std::size_t i = 0; i < w.dim(); ++i) out.affine += w[i] * x[i];
  out.affine += w0;
  for (double lambda : lambda_schedule) {
    out.trace.emplace_back(lambda, eval_activation(spec, lambda * out.affine + phi));
  }
  if (out.affine > 0.0) {
    out.limit_case = LimitCase::ToOne;
    out.limit = 1.0;
  } else if (out.affine < 0.0) {
    out.limit_case = LimitCase::ToZero;
    out.limit = 0.0;
  } else {
    out.limit_case = LimitCase::Hyperplane;
    out.limit = eval_activation(spec, phi);
  }
  return out;
}

}  // namespace deepens
