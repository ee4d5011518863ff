#include <cmath>
#include <numbers>

#include "doctest.h"
#include "dlab/errors.hpp"
#include "dlab/quadrature.hpp"
#include "oracle_values.hpp"

using namespace dlab;

namespace {

QuadOptions scheme(QuadScheme s) {
  QuadOptions o;
  o.scheme = s;
  return o;
}

const QuadScheme kSchemes[] = {QuadScheme::double_exponential, QuadScheme::substitution};

}  // namespace

TEST_SUITE("quadrature") {

TEST_CASE("inverse square root at the right end integrates to 2") {
  for (auto s : kSchemes) {
    EndpointIntegrand f = [](double, double, double to_b) { return 1.0 / std::sqrt(to_b); };
    const auto r =
        integrate_endpoint_singular(f, 0.0, 1.0, SingularitySpec::inverse_sqrt_right(), scheme(s));
    CHECK(r.value == doctest::Approx(2.0).epsilon(1e-10));
    // through x alone the last ~1e-16 of the interval is unresolvable,
    // which costs about 2 sqrt(1e-16)
    const auto rx = integrate_endpoint_singular([](double x) { return 1.0 / std::sqrt(1.0 - x); },
                                                0.0, 1.0, SingularitySpec::inverse_sqrt_right(),
                                                scheme(s));
    CHECK(rx.value == doctest::Approx(2.0).epsilon(1e-7));
    CHECK(r.error_estimate >= 0.0);
    CHECK(r.evaluations >= 1);
  }
}

TEST_CASE("arcsine weight on both ends integrates to pi") {
  for (auto s : kSchemes) {
    EndpointIntegrand f = [](double, double from_a, double to_b) {
      return 1.0 / std::sqrt(from_a * to_b);  // 1 - x^2 = (1 + x)(1 - x)
    };
    const auto r = integrate_endpoint_singular(f, -1.0, 1.0, SingularitySpec::inverse_sqrt_both(),
                                               scheme(s));
    CHECK(r.value == doctest::Approx(std::numbers::pi).epsilon(1e-10));
  }
}

TEST_CASE("beta = 2 level-set integrand at eta = 0.5") {
  const double eta = 0.5, X = std::sqrt(2.0 * std::log(2.0));
  EndpointIntegrand f = [&](double, double, double to_b) {
    const double gap = eta * eta * std::expm1(to_b * (2.0 * X - to_b));
    return eta / std::sqrt(gap);
  };
  for (auto s : kSchemes) {
    const double v = 2.0 * integrate_endpoint_singular(f, 0.0, X, SingularitySpec::inverse_sqrt_right(),
                                                       scheme(s))
                               .value;
    CHECK(v == doctest::Approx(oracle::kOracleTable1[2][4]).epsilon(1e-10));
    CHECK(v == doctest::Approx(2.62703).epsilon(1e-4));
  }
}

TEST_CASE("general algebraic exponent at the left end") {
  for (auto s : kSchemes) {
    const auto r = integrate_endpoint_singular([](double x) { return std::pow(x, -0.3); }, 0.0, 1.0,
                                               SingularitySpec{0.3, 0.0}, scheme(s));
    CHECK(r.value == doctest::Approx(1.0 / 0.7).epsilon(1e-9));
  }
}

TEST_CASE("linearity on smooth integrands") {
  const double a = 2.5, b = -0.75;
  for (auto s : kSchemes) {
    auto f = [](double x) { return std::cos(3.0 * x); };
    auto g = [](double x) { return std::exp(x); };
    const SingularitySpec none{};
    const double If = integrate_endpoint_singular(f, 0.0, 2.0, none, scheme(s)).value;
    const double Ig = integrate_endpoint_singular(g, 0.0, 2.0, none, scheme(s)).value;
    const double Ih =
        integrate_endpoint_singular([&](double x) { return a * f(x) + b * g(x); }, 0.0, 2.0, none,
                                    scheme(s))
            .value;
    CHECK(std::abs(Ih - (a * If + b * Ig)) <= 10 * 1e-10 * std::abs(Ih));
  }
}

TEST_CASE("interval additivity with a singular end") {
  EndpointIntegrand f = [](double x, double, double to_b) { return std::exp(x) / std::sqrt(to_b); };
  for (auto s : kSchemes) {
    const auto whole = integrate_endpoint_singular(f, 0.0, 1.0, SingularitySpec::inverse_sqrt_right(),
                                                   scheme(s));
    for (double c : {0.1, 0.5, 0.93}) {
      const auto left = integrate_endpoint_singular(
          [](double x) { return std::exp(x) / std::sqrt(1.0 - x); }, 0.0, c, SingularitySpec{},
          scheme(s));
      const auto right =
          integrate_endpoint_singular(f, c, 1.0, SingularitySpec::inverse_sqrt_right(), scheme(s));
      const double tol = whole.error_estimate + left.error_estimate + right.error_estimate + 1e-13;
      CHECK(std::abs(left.value + right.value - whole.value) <= tol);
    }
  }
}

TEST_CASE("schemes agree and results are bit-reproducible") {
  EndpointIntegrand g = [](double x, double from_a, double to_b) {
    return std::log1p(x) / std::sqrt(from_a * to_b);
  };
  const auto de = integrate_endpoint_singular(g, 0.0, 2.0, SingularitySpec::inverse_sqrt_both(),
                                              scheme(QuadScheme::double_exponential));
  const auto sb = integrate_endpoint_singular(g, 0.0, 2.0, SingularitySpec::inverse_sqrt_both(),
                                              scheme(QuadScheme::substitution));
  CHECK(std::abs(de.value - sb.value) <= 1e-8 * std::abs(de.value));
  const auto again = integrate_endpoint_singular(g, 0.0, 2.0, SingularitySpec::inverse_sqrt_both(),
                                                 scheme(QuadScheme::double_exponential));
  CHECK(again.value == de.value);
  CHECK(again.evaluations == de.evaluations);
}

TEST_CASE("empirical exponent probe") {
  EndpointIntegrand f = [](double, double, double to_b) { return std::pow(to_b, -0.5); };
  CHECK(empirical_endpoint_exponent(f, 0.0, 1.0, false) == doctest::Approx(0.5).epsilon(1e-6));
  EndpointIntegrand g = [](double, double from_a, double) { return std::pow(from_a, -0.25); };
  CHECK(empirical_endpoint_exponent(g, 0.0, 1.0, true) == doctest::Approx(0.25).epsilon(1e-6));
}

TEST_CASE("simple pole is rejected as non-integrable") {
  for (auto s : kSchemes) {
    EndpointIntegrand f = [](double, double, double to_b) { return 1.0 / to_b; };
    try {
      integrate_endpoint_singular(f, 0.0, 1.0, SingularitySpec::inverse_sqrt_right(), scheme(s));
      FAIL("expected NonIntegrableError");
    } catch (const NonIntegrableError& e) {
      CHECK(e.exponent() >= 0.98);
    }
  }
}

TEST_CASE("invalid arguments") {
  auto f = [](double) { return 1.0; };
  CHECK_THROWS_AS(integrate_endpoint_singular(f, 1.0, 1.0, SingularitySpec{}), DomainError);
  CHECK_THROWS_AS(integrate_endpoint_singular(f, 2.0, 1.0, SingularitySpec{}), DomainError);
  CHECK_THROWS_AS(integrate_endpoint_singular(f, 0.0, 1.0, SingularitySpec{1.0, 0.0}), DomainError);
  CHECK_THROWS_AS(integrate_endpoint_singular(f, 0.0, 1.0, SingularitySpec{0.0, -0.1}), DomainError);
  CHECK_THROWS_AS(parse_quad_scheme("simpson"), ValidationError);
  CHECK(parse_quad_scheme("subst") == QuadScheme::substitution);
  CHECK(to_string(QuadScheme::double_exponential) == "de");
}

TEST_CASE("non-finite integrand values are reported") {
  auto f = [](double x) { return x > 0.5 ? std::nan("") : 1.0; };
  CHECK_THROWS_AS(integrate_endpoint_singular(f, 0.0, 1.0, SingularitySpec{}), NumericalError);
}

TEST_CASE("refinement budget exhaustion carries the best value") {
  QuadOptions o = scheme(QuadScheme::substitution);
  o.max_depth = 1;
  o.rel_tol = 1e-15;
  o.abs_floor = 0.0;
  try {
    integrate_endpoint_singular([](double x) { return std::sin(400.0 * x); }, 0.0, 1.0,
                                SingularitySpec{}, o);
    FAIL("expected AccuracyError");
  } catch (const AccuracyError& e) {
    CHECK(std::isfinite(e.best_value()));
    CHECK(e.error_estimate() > 0.0);
  }
}

}  // TEST_SUITE
