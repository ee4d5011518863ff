#pragma once

// Integration of functions with algebraic endpoint singularities,
// f(x) ~ C (x - a)^(-p) or C (b - x)^(-p) with p < 1.
//
// Two schemes are provided and are expected to agree:
//   * double_exponential: tanh-sinh nodes, which cluster doubly
//     exponentially at the endpoints and damp any integrable power law;
//   * substitution: x = b - t^q with q = 1/(1-p) (q = 2 for inverse square
//     roots) turns the singular integrand into a bounded one, which is then
//     handled by adaptive Gauss-Kronrod 7/15.
//
// Integrands may take either (x) or (x, dist_from_a, dist_to_b). The second
// form receives the distances to both endpoints computed without
// cancellation, which matters when the integrand itself is a difference of
// nearly equal quantities close to a turning point.

#include <cstddef>
#include <functional>
#include <string>
#include <type_traits>
#include <utility>

namespace dlab {

enum class SingularityHint { none, inverse_sqrt };

struct SingularitySpec {
  double left_exponent = 0.0;
  double right_exponent = 0.0;
  SingularityHint hint = SingularityHint::none;

  static SingularitySpec inverse_sqrt_left() { return {0.5, 0.0, SingularityHint::inverse_sqrt}; }
  static SingularitySpec inverse_sqrt_right() { return {0.0, 0.5, SingularityHint::inverse_sqrt}; }
  static SingularitySpec inverse_sqrt_both() { return {0.5, 0.5, SingularityHint::inverse_sqrt}; }

  /// Throws DomainError unless both exponents lie in [0, 1).
  void validate() const;
};

struct QuadResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::size_t evaluations = 0;
};

enum class QuadScheme { double_exponential, substitution };

QuadScheme parse_quad_scheme(const std::string& name);  // "de" | "subst"
std::string to_string(QuadScheme scheme);

struct QuadOptions {
  double rel_tol = 1e-10;
  double abs_floor = 1e-14;
  int max_depth = 12;
  QuadScheme scheme = QuadScheme::double_exponential;
};

using EndpointIntegrand = std::function<double(double x, double from_a, double to_b)>;

/// Integrates f over (a, b). Throws NonIntegrableError when an endpoint
/// probe shows an exponent >= 1, AccuracyError when the refinement budget is
/// exhausted, DomainError on a >= b or invalid exponents.
QuadResult integrate_endpoint_singular(const EndpointIntegrand& f, double a, double b,
                                       const SingularitySpec& sing,
                                       const QuadOptions& options = {});

template <class F>
  requires(std::is_invocable_r_v<double, F, double> &&
           !std::is_invocable_v<F, double, double, double>)
QuadResult integrate_endpoint_singular(F&& f, double a, double b, const SingularitySpec& sing,
                                       const QuadOptions& options = {}) {
  // Nodes that round onto an endpoint carry negligible weight but cannot be
  // evaluated through x alone.
  EndpointIntegrand wrapped = [&f, a, b](double x, double, double) {
    return (x <= a || x >= b) ? 0.0 : f(x);
  };
  return integrate_endpoint_singular(wrapped, a, b, sing, options);
}

/// Estimates the local power-law exponent p of |f| ~ d^(-p) at an endpoint
/// from two probes at relative distances 1e-7 and 1e-9 of the interval.
double empirical_endpoint_exponent(const EndpointIntegrand& f, double a, double b, bool at_left);

}  // namespace dlab
