#include <cmath>
#include <numbers>

#include "doctest.h"
#include "dlab/errors.hpp"
#include "dlab/nls_limit.hpp"
#include "oracle_values.hpp"

using namespace dlab;

namespace {

double lattice_error(double epsilon, double t, double window) {
  const NlsBetaWell w(2.0);
  const double lo = 0.5 * t - 2.0, hi = t + 2.0;
  const auto n = static_cast<std::size_t>((hi - lo) / (epsilon / 4.0)) + 1;
  const auto lat = soliton_lattice(w, epsilon, t, {lo, hi}, n);
  const auto avg = local_average(lat.field, window);
  double worst = 0.0;
  for (double lam : {0.6, 0.7, 0.8}) {
    const double x = lam * t;
    const auto i = static_cast<std::size_t>(std::lround((x - lo) / lat.field.grid.dx));
    const double expect =
        4.0 / (std::numbers::pi * t) * phi_nls(w, lam).value * std::sqrt(1.0 - lam * lam);
    worst = std::max(worst, std::abs(avg.at(i) - expect) / expect);
  }
  return worst;
}

}  // namespace

TEST_SUITE("nls_limit") {

TEST_CASE("phi at the branch edge and inside") {
  const NlsBetaWell w(2.0);
  CHECK(phi_nls(w, 0.5).value == 0.0);
  CHECK(phi_nls(w, 0.9).value == doctest::Approx(5.6498).epsilon(1e-3));
  for (double lam = 0.51; lam < 1.0; lam += 0.06) CHECK(phi_nls(w, lam).value > 0.0);
  CHECK_THROWS_AS(phi_nls(w, 0.2), DomainError);
  CHECK_THROWS_AS(phi_nls(w, 1.0), DomainError);
}

TEST_CASE("g77 reproduces the oracle and the reference table") {
  for (int b = 0; b < 4; ++b) {
    const NlsBetaWell w(oracle::kTable2Betas[b]);
    for (int i = 0; i < 5; ++i) {
      const double lam = (i + 5) / 10.0;
      const double g = g77(w, lam).value;
      if (i == 0) {
        CHECK(g == 0.0);
        continue;
      }
      CHECK(g == doctest::Approx(oracle::kOracleTable2[b][i]).epsilon(1e-9));
      CHECK(g == doctest::Approx(oracle::kReferenceTable2[b][i]).epsilon(1e-2));
    }
  }
  CHECK_THROWS_AS(g77(NlsBetaWell(2.0), 0.45), DomainError);
}

TEST_CASE("phi and g77 are consistent") {
  for (double beta : {1.5, 2.0, 3.0, 3.5}) {
    const NlsBetaWell w(beta);
    for (double lam : {0.55, 0.7, 0.85, 0.97}) {
      const double via_g = g77(w, lam).value / (lam * std::sqrt(1.0 - lam * lam));
      CHECK(phi_nls(w, lam).value == doctest::Approx(via_g).epsilon(1e-8));
      CHECK(whitham_flux_density(w, lam).value == doctest::Approx(g77(w, lam).value).epsilon(1e-12));
    }
  }
}

TEST_CASE("unsquare-rooted integrand diverges at the turning point") {
  const NlsBetaWell w(2.0);
  const double lam = 0.8;
  const double X = std::sqrt(-std::log(2.0 * (1.0 - lam)));
  EndpointIntegrand printed = [&](double, double, double to_b) {
    const double below = w.excess_below(lam, to_b);
    const double rp = lam - below;
    return lam * lam * std::sqrt(1.0 - lam * lam) / (below * (lam + rp));
  };
  CHECK_THROWS_AS(integrate_endpoint_singular(printed, 0.0, X, SingularitySpec::inverse_sqrt_right()),
                  NonIntegrableError);
}

TEST_CASE("asymptotic density") {
  const NlsBetaWell w(2.0);
  auto v = rhobar_asymptotic(w, 0.0, 10.0);
  CHECK(v.value == 1.0);
  CHECK(v.tag == RegionTag::background);
  v = rhobar_asymptotic(w, 90.0, 100.0);
  CHECK(v.value == doctest::Approx(0.96866).epsilon(5e-5));
  CHECK(v.tag == RegionTag::whitham);
  CHECK(rhobar_asymptotic(w, 150.0, 100.0).value == 1.0);
  CHECK(rhobar_asymptotic(w, -150.0, 100.0).value == 1.0);
  const auto mirror = rhobar_asymptotic(w, -90.0, 100.0);
  CHECK(mirror.value == doctest::Approx(v.value).epsilon(1e-10));
  CHECK_THROWS_AS(rhobar_asymptotic(w, 1.0, 0.0), DomainError);
}

TEST_CASE("condition (g)' >= 0 on the sampled grid") {
  const auto grid = table2_lambdas();
  CHECK(check_flux_monotonicity(NlsBetaWell(1.5), grid).classification == SignClass::diffusive);
  CHECK(check_flux_monotonicity(NlsBetaWell(2.0), grid).classification == SignClass::diffusive);
  const auto b3 = check_flux_monotonicity(NlsBetaWell(3.0), grid);
  CHECK(b3.classification == SignClass::diffusive);
  CHECK_FALSE(b3.notes.empty());  // pointwise slope at 0.9 is negative
  const auto b35 = check_flux_monotonicity(NlsBetaWell(3.5), grid);
  CHECK(b35.classification == SignClass::mixed);
  REQUIRE(b35.violating_pairs.size() == 1);
  CHECK(b35.violating_pairs[0].from == doctest::Approx(0.8));
  CHECK(b35.violating_pairs[0].to == doctest::Approx(0.9));
  CHECK(b35.violating_pairs[0].value_from == doctest::Approx(1.70143).epsilon(1e-5));
  CHECK(b35.violating_pairs[0].value_to == doctest::Approx(1.64733).epsilon(1e-5));
  const auto single = check_flux_monotonicity(NlsBetaWell(2.0), std::vector<double>{0.5});
  CHECK(single.classification == SignClass::diffusive);
}

TEST_CASE("pointwise slopes match the oracle") {
  for (int b = 0; b < 4; ++b) {
    const auto rep = check_flux_monotonicity(NlsBetaWell(oracle::kTable2Betas[b]),
                                       std::vector<double>{0.6, 0.7, 0.8, 0.9});
    for (int i = 0; i < 4; ++i)
      CHECK(rep.witness_points[i].derivative ==
            doctest::Approx(oracle::kOracleTable2Slope[b][i]).epsilon(2e-3));
  }
}

TEST_CASE("table 2 emission") {
  const auto t = emit_table2(std::vector<double>{1.5, 3.0}, table2_lambdas());
  REQUIRE(t.size() == 2);
  CHECK(t[0].values[0] == 0.0);
  CHECK(t[1].values[0] == 0.0);
  CHECK(t[0].values[4] == doctest::Approx(2.69501).epsilon(1e-5));
  CHECK(emit_table2(std::vector<double>{}, table2_lambdas()).empty());
}

TEST_CASE("dark soliton profile") {
  CHECK(soliton_dip(0.0, 0.6, 0.01) == doctest::Approx(0.64));
  CHECK(soliton_dip(1.0, 0.6, 0.01) < 1e-30);
  CHECK(soliton_dip(0.013, 0.6, 0.01) == soliton_dip(-0.013, 0.6, 0.01));
}

TEST_CASE("lattice invariants") {
  const NlsBetaWell w(2.0);
  const double eps = 0.01, t = 50.0;
  const auto lat = soliton_lattice(w, eps, t, {20.0, 52.0}, 64001);
  REQUIRE(lat.wavenumbers.size() >= 2);
  for (std::size_t n = 0; n + 1 < lat.wavenumbers.size(); ++n) {
    const double a = lat.wavenumbers[n], b = lat.wavenumbers[n + 1];
    CHECK(b > a);
    // pi eps / (b - a) is a mean value of phi over [a, b]
    const double mean_phi = std::numbers::pi * eps / (b - a);
    const double pa = phi_nls(w, a).value, pb = phi_nls(w, b).value;
    CHECK(mean_phi >= std::min(pa, pb) * (1.0 - 1e-3));
    CHECK(mean_phi <= std::max(pa, pb) * (1.0 + 1e-3));
  }
  const double dx = lat.field.grid.dx;
  for (std::size_t n = 0; n < lat.wavenumbers.size(); n += 7) {
    const double eta = lat.wavenumbers[n];
    const double x = eta * t;
    const auto i = static_cast<std::size_t>(std::lround((x - 20.0) / dx));
    // sech^2 y >= 1 - y^2 bounds the sampling offset; neighbouring tails add
    // their value at the sample
    const double a = std::sqrt(1.0 - eta * eta) / (2.0 * eps);
    double slack = (1.0 - eta * eta) * a * a * dx * dx / 4.0 + 1e-9;
    for (std::size_t m = 0; m < lat.wavenumbers.size(); ++m) {
      if (m != n) slack += soliton_dip(lat.field.grid.x(i) - lat.wavenumbers[m] * t, lat.wavenumbers[m], eps);
    }
    CHECK(std::abs(lat.field.at(i) - eta * eta) <= slack);
  }
  CHECK_THROWS_AS(soliton_lattice(w, 1.0, t, {20.0, 52.0}, 100), DomainError);
}

TEST_CASE("Weyl counter inverts its cumulative integral") {
  const NlsBetaWell w(2.0);
  const WeylCounter c(w);
  CHECK(c.cumulative(0.5) == 0.0);
  CHECK(c.cumulative(1.0) == c.total());
  for (double lam : {0.55, 0.7, 0.95}) CHECK(c.inverse(c.cumulative(lam)) == doctest::Approx(lam).epsilon(1e-10));
}

TEST_CASE("local average") {
  const FieldGrid g = FieldGrid::line(200, 0.05, 0.0, false);
  RealField flat(g, 1, 0.7);
  const auto a = local_average(flat, 1.0);
  for (double v : a.data) CHECK(v == doctest::Approx(0.3));
  RealField background(g, 1, 1.0);
  const auto bg = local_average(background, 1.0);
  for (double v : bg.data) CHECK(v == doctest::Approx(0.0));
  CHECK_THROWS_AS(local_average(flat, 0.01), DomainError);
}

TEST_CASE("lattice average approaches the weak-limit deficit") {
  const double e1 = lattice_error(0.02, 50.0, 2.0);
  const double e2 = lattice_error(0.01, 50.0, 2.0);
  CHECK(e2 < e1);
  CHECK(e2 < 0.1);
}

TEST_CASE("NLS turbulent viscosity field") {
  const FieldGrid g = FieldGrid::line(40, 0.1, -2.0, false);
  RealField mu(g, 1), rho(g, 1, 1.0), q(g, 1);
  for (std::size_t i = 0; i < g.nx; ++i) {
    mu.at(i) = g.x(i);
    q.at(i) = q_flux(1.0, g.x(i));
  }
  auto nu = nu_turb_nls_field(mu, q, rho, 1e-8);
  CHECK(nu.defined_count() == g.nx);
  for (std::size_t i = 0; i < g.nx; ++i) CHECK(nu.field.at(i) == doctest::Approx(0.0).epsilon(1e-12));
  for (std::size_t i = 0; i < g.nx; ++i) q.at(i) = g.x(i) * g.x(i) + 0.5 + 0.25;
  nu = nu_turb_nls_field(mu, q, rho, 1e-8);
  for (std::size_t i = 0; i < g.nx; ++i) CHECK(nu.field.at(i) == doctest::Approx(0.25).epsilon(1e-9));
  RealField flat_mu(g, 1, 0.1), big_q(g, 1, 5.0);
  CHECK(nu_turb_nls_field(flat_mu, big_q, rho, 1e-8).defined_count() == 0);
  RealField bad_rho(g, 1, 0.0);
  CHECK_THROWS_AS(nu_turb_nls_field(mu, q, bad_rho, 1e-8), DomainError);
  CHECK(q_flux(2.0, 2.0) == doctest::Approx(4.0));
}

}  // TEST_SUITE
