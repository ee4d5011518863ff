#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "dlab/errors.hpp"
#include "dlab/semiclassical.hpp"
#include "dlab/wigner.hpp"

using namespace dlab;

namespace {

constexpr double kPi = std::numbers::pi;

// Direct O(N^3) evaluation: dx Re sum_n P_n(x_j) exp(-i k n dx), where P_n
// pairs samples n/2 apart (averaging both half-sample placements for odd n)
// and the unpaired shift -N/2 keeps its real part.
double direct_wigner(const std::vector<cplx>& a, const std::vector<cplx>& b, double dx,
                     std::size_t j, double k) {
  const long n = static_cast<long>(a.size());
  auto at = [&](const std::vector<cplx>& v, long i) { return v[static_cast<std::size_t>((i % n + n) % n)]; };
  auto sym = [&](long p, long m) {
    return 0.5 * (at(a, p) * std::conj(at(b, m)) + at(b, p) * std::conj(at(a, m)));
  };
  const long jj = static_cast<long>(j);
  cplx total = 0.0;
  for (long s = -n / 2; s < n / 2; ++s) {
    cplx p;
    if (s % 2 == 0) {
      p = sym(jj + s / 2, jj - s / 2);
    } else {
      const long m = static_cast<long>(std::floor(s / 2.0));
      p = 0.5 * (sym(jj + m + 1, jj - m) + sym(jj + m, jj - m - 1));
    }
    if (s == -n / 2) p = p.real();
    total += p * std::exp(cplx(0.0, -k * static_cast<double>(s) * dx));
  }
  return total.real() * dx;
}

RealField random_line(std::size_t n, double length, std::size_t comps, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d(0.0, 1.0);
  RealField f(FieldGrid::periodic_line(n, length), comps);
  for (auto& v : f.data) v = d(rng);
  return f;
}

Trajectory line_run(const Grid1D& g, double eps, const std::vector<double>& times,
                    const std::function<double(double, double)>& u) {
  Trajectory t;
  t.kind = FlowKind::kdv;
  t.grid = g;
  t.epsilon = eps;
  t.dt = times.size() > 1 ? times[1] - times[0] : 1.0;
  t.times = times;
  for (double tt : times) {
    std::vector<cplx> f;
    for (double x : g.abscissae()) f.emplace_back(u(x, tt), 0.0);
    t.frames.push_back(f);
  }
  return t;
}

std::size_t argmax_row(const WignerTensor& w, std::size_t ib) {
  std::size_t best = 0;
  for (std::size_t id = 1; id < w.dual.size(); ++id)
    if (w.at(0, ib, id) > w.at(0, ib, best)) best = id;
  return best;
}

}  // namespace

TEST_SUITE("wigner") {

TEST_CASE("plane wave concentrates on its wavenumber") {
  const double length = 10.0;
  const std::size_t n = 64;
  ComplexField f{FieldGrid::periodic_line(n, length), {}};
  const int m = 5;
  const double k0 = 2.0 * kPi * m / length;
  for (std::size_t i = 0; i < n; ++i) f.values.push_back(std::exp(cplx(0.0, k0 * f.grid.x(i))));
  const auto w = wigner_space(f);
  REQUIRE(w.components() == 1);
  CHECK(std::is_sorted(w.dual.begin(), w.dual.end()));
  for (std::size_t ib = 0; ib < n; ib += 9) {
    for (std::size_t id = 0; id < n; ++id) {
      const double expect = std::abs(w.dual[id] - k0) < 1e-9 ? length : 0.0;
      CHECK(w.at(0, ib, id) == doctest::Approx(expect).scale(1.0).epsilon(1e-10));
    }
  }
  ComplexField zero{f.grid, std::vector<cplx>(n, 0.0)};
  const auto wz = wigner_space(zero);
  for (double v : wz.values[0]) CHECK(v == 0.0);
}

TEST_CASE("two modes interfere halfway between") {
  const double length = 2.0 * kPi;
  const std::size_t n = 128;
  ComplexField f{FieldGrid::periodic_line(n, length, 0.0), {}};
  for (std::size_t i = 0; i < n; ++i) {
    const double x = f.grid.x(i);
    f.values.push_back(std::exp(cplx(0.0, 4.0 * x)) + std::exp(cplx(0.0, 10.0 * x)));
  }
  const auto w = wigner_space(f);
  auto slot = [&](double k) {
    return static_cast<std::size_t>(std::find_if(w.dual.begin(), w.dual.end(),
                                                 [&](double v) { return std::abs(v - k) < 1e-9; }) -
                                    w.dual.begin());
  };
  // at x = 0 the cross term 2 cos(6 x) is at its maximum
  CHECK(w.at(0, 0, slot(4.0)) == doctest::Approx(length));
  CHECK(w.at(0, 0, slot(10.0)) == doctest::Approx(length));
  // odd shifts average two half-cell placements, which damps the cross
  // term by cos(3 dx) on half of the shifts
  CHECK(w.at(0, 0, slot(7.0)) == doctest::Approx(length * (1.0 + std::cos(3.0 * f.grid.dx))));
  CHECK(std::abs(w.at(0, 0, slot(1.0))) < 1e-9);
  const auto r = w.dual_integral();
  for (std::size_t i = 0; i < n; ++i)
    CHECK(r[i] == doctest::Approx(std::norm(f.values[i])).scale(1.0).epsilon(1e-10));
}

TEST_CASE("FFT evaluation matches the direct sum") {
  const auto f = random_line(128, 7.0, 2, 21);
  const auto w = wigner_space(f);
  REQUIRE(w.components() == 3);
  const auto a = f.component(0), b = f.component(1);
  const std::vector<cplx> ca(a.begin(), a.end()), cb(b.begin(), b.end());
  const std::vector<const std::vector<cplx>*> comp_a{&ca, &ca, &cb};
  const std::vector<const std::vector<cplx>*> comp_b{&ca, &cb, &cb};
  double worst = 0.0;
  for (std::size_t ib : {0u, 17u, 64u, 127u}) {
    for (std::size_t id = 0; id < w.dual.size(); id += 5) {
      for (std::size_t c = 0; c < 3; ++c) {
        const double d = direct_wigner(*comp_a[c], *comp_b[c], f.grid.dx, ib, w.dual[id]);
        worst = std::max(worst, std::abs(d - w.at(c, ib, id)));
      }
    }
  }
  CHECK(worst < 1e-11);
}

TEST_CASE("dual integral reconstructs the local product") {
  for (unsigned seed = 0; seed < 20; ++seed) {
    const auto f = random_line(seed % 2 ? 96 : 64, 5.0, 2, seed);
    const std::optional<double> window = seed % 3 == 0 ? std::optional<double>(2.0) : std::nullopt;
    const auto w = wigner_space(f, window);
    const auto r11 = w.dual_integral(0), r12 = w.dual_integral(1), r22 = w.dual_integral(2);
    for (std::size_t i = 0; i < f.grid.nx; ++i) {
      CHECK(r11[i] == doctest::Approx(f.at(i, 0) * f.at(i, 0)).scale(1.0).epsilon(1e-10));
      CHECK(r12[i] == doctest::Approx(f.at(i, 0) * f.at(i, 1)).scale(1.0).epsilon(1e-10));
      CHECK(r22[i] == doctest::Approx(f.at(i, 1) * f.at(i, 1)).scale(1.0).epsilon(1e-10));
    }
  }
}

TEST_CASE("space transform validation") {
  const auto f = random_line(32, 4.0, 1, 3);
  CHECK_THROWS_AS(wigner_space(f, 5.0), DomainError);
  CHECK_THROWS_AS(wigner_space(f, 0.0), DomainError);
  CHECK_NOTHROW(wigner_space(f, 4.0));
  RealField open(FieldGrid::line(32, 0.1, 0.0, false), 1);
  CHECK_THROWS_AS(wigner_space(open), DomainError);
  CHECK_THROWS_AS(wigner_space(random_line(32, 4.0, 3, 1)), ShapeError);
}

TEST_CASE("time transform of tones and chirps") {
  const double dt = 0.1;
  const std::size_t m = 64;
  std::vector<cplx> tone, chirp;
  const double w0 = 2.0, rate = 0.5;
  for (std::size_t i = 0; i < m; ++i) {
    const double t = dt * static_cast<double>(i);
    tone.push_back(std::exp(cplx(0.0, w0 * t)));
    chirp.push_back(std::exp(cplx(0.0, 0.5 * rate * t * t)));
  }
  const auto wk = wigner_time(std::vector<cplx>(m, cplx(0.0, 2.0)), 0.0, dt);
  const std::size_t zero_slot = wk.dual.size() / 2;
  REQUIRE(wk.dual[zero_slot] == 0.0);
  for (std::size_t ib = 0; ib < m; ib += 7) {
    CHECK(argmax_row(wk, ib) == zero_slot);
    CHECK(wk.dual_integral()[ib] == doctest::Approx(4.0).epsilon(1e-12));
  }
  const auto wt = wigner_time(tone, 0.0, dt);
  CHECK(wt.mode == WignerMode::time);
  CHECK(wt.dual.size() == 128);
  for (std::size_t ib = 8; ib < m - 8; ib += 5)
    CHECK(std::abs(wt.dual[argmax_row(wt, ib)] - w0) <= wt.dual_spacing);
  const auto wc = wigner_time(chirp, 0.0, dt);
  for (std::size_t ib = 16; ib < m - 16; ib += 5)
    CHECK(std::abs(wc.dual[argmax_row(wc, ib)] - rate * wc.base[ib]) <= wc.dual_spacing);
  // the dual integral returns |u(t)|^2 whatever the taper
  const auto wg = wigner_time(chirp, 0.0, dt, TimeWindow{0.8});
  for (double v : wg.dual_integral()) CHECK(v == doctest::Approx(1.0).epsilon(1e-12));
  // real series: symmetric in tau
  std::vector<double> c;
  for (std::size_t i = 0; i < m; ++i) c.push_back(std::cos(1.3 * dt * static_cast<double>(i)));
  const auto wr = wigner_time(c, 0.0, dt);
  const std::size_t nd = wr.dual.size();
  for (std::size_t id = 1; id < nd; ++id)
    CHECK(wr.at(0, 30, id) == doctest::Approx(wr.at(0, 30, nd - id)).scale(1.0).epsilon(1e-12));
  CHECK(TimeWindow{}(3.0) == 1.0);
  CHECK(TimeWindow{1.0}(1.0) == doctest::Approx(std::exp(-0.5)));
  CHECK_THROWS_AS(wigner_time(tone, 0.0, -dt), DomainError);
  CHECK_THROWS_AS(wigner_time(std::vector<cplx>{1.0}, 0.0, dt), DomainError);
}

TEST_CASE("defect spectrum integrates to the defect tensor") {
  const auto member = random_line(128, 6.0, 1, 9);
  RealField limit(member.grid, 1);
  for (std::size_t i = 0; i < 128; ++i) limit.at(i) = 0.3 * std::sin(member.grid.x(i));
  const auto spec = defect_spectrum(member, limit, 1.0);
  const auto tensor = defect_tensor(member, limit, 1.0);
  const auto integral = spec.dual_integral();
  for (std::size_t i = 0; i < 128; ++i)
    CHECK(integral[i] == doctest::Approx(tensor.at(i)).scale(1.0).epsilon(1e-10));

  // an oscillation at scale eps puts its defect at k = +-1/eps; the
  // interference term between the two lies at k = 0 and is damped by the
  // mollifier down to Hann leakage
  const Grid1D g(2.0 * kPi, 256, 0.0);
  const auto run = line_run(g, 1.0 / 20, {0.0}, [](double x, double) { return std::sin(20.0 * x); });
  const auto run2 = line_run(g, 1.0 / 10, {0.0}, [](double x, double) { return std::sin(10.0 * x); });
  const RealField zero(g.field_grid(), 1);
  const auto s = defect_spectrum(std::vector<Trajectory>{run2, run}, zero, 1.0, 0);
  for (std::size_t ib = 0; ib < 256; ib += 31) {
    double off = 0.0, on = 0.0;
    for (std::size_t id = 0; id < s.dual.size(); ++id) {
      if (std::abs(std::abs(s.dual[id]) - 20.0) < 1.5) on += std::abs(s.at(0, ib, id));
      else off += std::abs(s.at(0, ib, id));
    }
    CHECK(off < 5e-3 * on);
  }
}

TEST_CASE("isotropic spectrum") {
  const std::size_t n = 32;
  const double h = 2.0 * kPi / n;
  const auto g = FieldGrid::plane(n, n, h, h);
  RealField u(g, 2);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) {
      u.at(g.index(i, j), 0) = std::sin(3.0 * g.y(j));
      u.at(g.index(i, j), 1) = std::sin(3.0 * g.x(i));
    }
  const auto t = mean_spectral_tensor(u);
  CHECK(t.reconstructed_energy() == doctest::Approx(1.0).epsilon(1e-12));
  const auto spec = isotropic_spectrum(t);
  CHECK(spec.integral == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(spec.mean_energy == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(spec.shell_width == doctest::Approx(1.0));
  for (std::size_t b = 0; b < spec.energy.size(); ++b) {
    if (b == 3) CHECK(spec.energy[b] == doctest::Approx(1.0).epsilon(1e-12));
    else CHECK(std::abs(spec.energy[b]) < 1e-14);
  }
  CHECK(spec.warnings.empty());

  RealField still(g, 2);
  const auto zero = isotropic_spectrum(mean_spectral_tensor(still));
  CHECK(zero.integral == 0.0);
  CHECK(zero.isotropy_residual == 0.0);

  // a compressive wave is far from the solenoidal isotropic form
  RealField comp(g, 2);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) comp.at(g.index(i, j), 0) = std::sin(3.0 * g.x(i));
  CHECK(isotropic_spectrum(mean_spectral_tensor(comp)).isotropy_residual > 0.5);
  RealField shear(g, 2);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i) shear.at(g.index(i, j), 0) = std::sin(g.y(j));
  const auto ss = isotropic_spectrum(mean_spectral_tensor(shear));
  CHECK(ss.isotropy_residual > 0.1);
  CHECK(ss.integral == doctest::Approx(0.5).epsilon(1e-12));

  // 1D: mean of cos^2 = 1/2
  RealField line(FieldGrid::periodic_line(64, 5.0), 1);
  for (std::size_t i = 0; i < 64; ++i) line.at(i) = std::cos(2.0 * kPi * 3.0 * line.grid.x(i) / 5.0);
  const auto s1 = isotropic_spectrum(mean_spectral_tensor(line));
  CHECK(s1.integral == doctest::Approx(0.5).epsilon(1e-12));

  SpectralTensor t3;
  t3.dim = 3;
  t3.n = {8, 8, 8};
  t3.dk = {1.0, 1.0, 1.0};
  t3.values.assign(9, std::vector<double>(512, 0.0));
  t3.values[0][1] = 2.0;  // k = (1, 0, 0)
  t3.values[4][8] = 1.0;  // k = (0, 1, 0)
  const auto s3 = isotropic_spectrum(t3);
  CHECK(s3.integral == doctest::Approx(std::pow(2.0 * kPi, 3) / 2.0 * s3.mean_energy).epsilon(1e-12));
  CHECK(s3.integral == doctest::Approx(1.5));

  CHECK_THROWS_AS(mean_spectral_tensor(RealField(g, 1)), ShapeError);
  CHECK_THROWS_AS(mean_spectral_tensor(RealField(FieldGrid::plane(4, 4, 1, 1, 0, 0, false), 2)),
                  DomainError);
}

TEST_CASE("trace split") {
  RealField r(FieldGrid::periodic_line(2, 1.0), 3);
  r.at(0, 0) = 3.0;
  r.at(0, 1) = 1.0;
  r.at(0, 2) = 1.0;
  const auto s = split_trace(r);
  CHECK(s.trace.at(0) == doctest::Approx(2.0));
  CHECK(s.tracefree.at(0, 0) + s.tracefree.at(0, 2) == doctest::Approx(0.0));
  CHECK(s.min_eigenvalue == doctest::Approx(0.0).scale(1.0));  // second point is zero
  r.at(1, 0) = 1.0;
  r.at(1, 2) = 1.0;
  CHECK(split_trace(r).min_eigenvalue == doctest::Approx(2.0 - std::sqrt(2.0)));
}

TEST_CASE("trace-free decomposition") {
  const std::size_t n = 32;
  const double h = 2.0 * kPi / n;
  const auto g = FieldGrid::plane(n, n, h, h);

  SUBCASE("shear stress against a shear flow") {
    RealField u(g, 2), s(g, 3);
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < n; ++i) {
        u.at(g.index(i, j), 0) = std::sin(g.y(j));
        s.at(g.index(i, j), 1) = std::cos(g.y(j));
      }
    const auto d = tracefree_decompose_velocity(s, u);
    for (std::size_t p = 0; p < g.size(); ++p) {
      if (!d.nu.mask[p]) continue;
      CHECK(d.nu.field.at(p) == doctest::Approx(1.0).epsilon(1e-10));
      CHECK(d.delta.field.at(p) == doctest::Approx(0.0).scale(1.0).epsilon(1e-10));
    }
    CHECK(d.nu.defined_count() > g.size() / 2);
    CHECK(d.max_residual < 1e-10);
  }

  SUBCASE("linear shear with its own strain") {
    RealField grad(g, 4), s(g, 3);
    for (std::size_t p = 0; p < g.size(); ++p) {
      grad.at(p, 1) = 1.0;  // u = (y, 0)
      s.at(p, 1) = 1.0;
    }
    const auto d = tracefree_decompose(s, grad);
    CHECK(d.nu.field.at(7) == 1.0);
    CHECK(d.delta.field.at(7) == 0.0);
    CHECK(d.max_residual == 0.0);
  }

  SUBCASE("pure Phi component and a rigid rotation") {
    RealField grad(g, 4), s(g, 3);
    for (std::size_t p = 0; p < g.size(); ++p) {
      grad.at(p, 1) = 0.7;  // d2u1
      s.at(p, 0) = 0.35;
      s.at(p, 2) = -0.35;
    }
    auto d = tracefree_decompose(s, grad);
    CHECK(d.delta.field.at(0) == doctest::Approx(1.0));
    CHECK(d.nu.field.at(0) == doctest::Approx(0.0).scale(1.0));
    for (std::size_t p = 0; p < g.size(); ++p) {
      grad.at(p, 1) = -1.0;
      grad.at(p, 2) = 1.0;
    }
    d = tracefree_decompose(s, grad);
    CHECK(d.nu.defined_count() == 0);
    CHECK(d.delta.defined_count() == 0);
    CHECK(std::isnan(d.nu.field.at(5)));
  }

  SUBCASE("B and Phi are orthogonal for divergence-free flows") {
    // stream function psi = sin x cos 2y + 0.3 cos(3x + y)
    RealField u(g, 2), s(g, 3);
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t i = 0; i < n; ++i) {
        const double x = g.x(i), y = g.y(j), p = g.index(i, j);
        u.at(p, 0) = -2.0 * std::sin(x) * std::sin(2.0 * y) - 0.3 * std::sin(3.0 * x + y);
        u.at(p, 1) = -(std::cos(x) * std::cos(2.0 * y) - 0.9 * std::sin(3.0 * x + y));
      }
    const auto grad = velocity_gradient(u);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> coef(-2.0, 2.0);
    std::vector<double> nu(g.size()), delta(g.size());
    for (std::size_t p = 0; p < g.size(); ++p) {
      nu[p] = coef(rng);
      delta[p] = coef(rng);
      const double g11 = grad.at(p, 0), g12 = grad.at(p, 1), g21 = grad.at(p, 2), g22 = grad.at(p, 3);
      const double sh = g12 + g21;
      s.at(p, 0) = nu[p] * 2.0 * g11 + delta[p] * 0.5 * sh;
      s.at(p, 1) = nu[p] * sh + delta[p] * g22;
      s.at(p, 2) = nu[p] * 2.0 * g22 - delta[p] * 0.5 * sh;
    }
    const auto d = tracefree_decompose(s, grad);
    CHECK(d.max_divergence < 1e-12);
    for (std::size_t p = 0; p < g.size(); ++p) {
      if (d.nu.mask[p]) CHECK(d.nu.field.at(p) == doctest::Approx(nu[p]).epsilon(1e-10));
      if (d.delta.mask[p]) CHECK(d.delta.field.at(p) == doctest::Approx(delta[p]).epsilon(1e-10));
    }
    CHECK(d.max_residual < 1e-12);
  }

  SUBCASE("validation") {
    RealField grad(g, 4), s(g, 3);
    s.at(0, 0) = 1.0;
    CHECK_THROWS_AS(tracefree_decompose(s, grad), ValidationError);
    s.at(0, 0) = 0.0;
    grad.at(3, 0) = 1.0;
    CHECK_THROWS_AS(tracefree_decompose(s, grad), ValidationError);
    CHECK_THROWS_AS(tracefree_decompose(RealField(g, 2), grad), ShapeError);
    CHECK_THROWS_AS(velocity_gradient(RealField(g, 1)), ShapeError);
  }
}

TEST_CASE("strong-convergence diagnostic") {
  const Grid1D g(2.0 * kPi, 128, 0.0);
  const std::vector<double> times{0.0, 0.5, 1.0};
  auto base = [](double x, double t) { return std::cos(x - t); };
  const auto limit = line_run(g, 0.0, times, base);

  SUBCASE("identical sequence") {
    const std::vector<Trajectory> members{line_run(g, 0.1, times, base), line_run(g, 0.05, times, base)};
    const auto r = prop1_report(members, limit, std::nullopt, {});
    CHECK(r.values.at("gap") == 0.0);
    CHECK(r.labels.at("verdict") == "consistent");
    CHECK(r.passed);
    CHECK(r.warnings.empty());
  }

  SUBCASE("oscillating error without dissipation") {
    const double e = 0.01;
    auto osc = [&](double x, double t) { return base(x, t) + e * std::sin(16.0 * x); };
    const std::vector<Trajectory> members{line_run(g, 0.05, times, osc)};
    const auto r = prop1_report(members, limit, std::nullopt, {});
    CHECK(r.values.at("gap") == doctest::Approx(e * e * kPi).epsilon(1e-10));
    CHECK(r.values.at("defect_trace") == doctest::Approx(e * e / 2.0).epsilon(1e-3));
    CHECK(r.labels.at("convergence") == "weak");
    CHECK(r.labels.at("verdict") == "inconsistent");
    CHECK_FALSE(r.passed);
    CHECK_FALSE(r.warnings.empty());

    // a positive viscosity balances the gap
    const RealField nu(g.field_grid(), 1, 0.01);
    const auto rv = prop1_report(members, limit, nu, {});
    CHECK(rv.values.at("dissipation") == doctest::Approx(0.01 * kPi * 1.0).epsilon(1e-10));
    CHECK(rv.labels.at("verdict") == "consistent");
  }

  SUBCASE("horizon and shape checks") {
    const std::vector<Trajectory> members{line_run(g, 0.1, times, base)};
    Prop1Options o;
    o.t_horizon = 0.5;
    CHECK(prop1_report(members, limit, std::nullopt, o).values.at("t_horizon") == doctest::Approx(0.5));
    const auto other = line_run(g, 0.0, {0.0, 0.4, 1.0}, base);
    CHECK_THROWS_AS(prop1_report(members, other, std::nullopt, {}), ShapeError);
    CHECK_THROWS_AS(prop1_report({}, limit, std::nullopt, {}), ValidationError);
  }
}

TEST_CASE("Wigner CSV and manifest") {
  const auto w = wigner_space(random_line(16, 2.0, 2, 1));
  std::ostringstream os;
  write_wigner_csv(os, w);
  const std::string text = os.str();
  CHECK(text.rfind("x,k,r11,r12,r22\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 16 * 16);
  const auto j = wigner_manifest(w);
  CHECK(j["mode"] == "space");
  CHECK(j["components"].size() == 3);
  CHECK(j["window"] == "none");
}

}  // TEST_SUITE
