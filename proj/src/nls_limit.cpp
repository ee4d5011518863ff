#include "dlab/nls_limit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "dlab/errors.hpp"

namespace dlab {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

// Soliton tails beyond this many half-widths are below 1e-34.
constexpr double kDipCutoff = 40.0;

}  // namespace

QuadResult phi_nls(const NlsProfile& profile, double lambda, const QuadOptions& options) {
  const Branch branch = profile.branch_of(lambda);
  const auto exact = profile.exact_turning_points(lambda);
  const TurningPoints tp = exact ? *exact : nls_turning_points(profile, lambda);
  const double x0 =
      branch == Branch::positive ? profile.r_plus_min_point() : profile.r_minus_max_point();
  QuadResult total{};
  auto accumulate = [&](const QuadResult& r) {
    total.value += r.value;
    total.error_estimate += r.error_estimate;
    total.evaluations += r.evaluations;
  };
  if (tp.x_plus > x0) {
    EndpointIntegrand right = [&](double, double, double to_b) {
      const auto p = profile.integrand_parts(lambda, tp, Side::right, to_b);
      return p.numerator / std::sqrt(p.product);
    };
    accumulate(integrate_endpoint_singular(right, x0, tp.x_plus,
                                           SingularitySpec::inverse_sqrt_right(), options));
  }
  if (profile.symmetric()) {
    total.value *= 2.0;
    total.error_estimate *= 2.0;
  } else if (tp.x_minus < x0) {
    EndpointIntegrand left = [&](double, double from_a, double) {
      const auto p = profile.integrand_parts(lambda, tp, Side::left, from_a);
      return p.numerator / std::sqrt(p.product);
    };
    accumulate(integrate_endpoint_singular(left, tp.x_minus, x0,
                                           SingularitySpec::inverse_sqrt_left(), options));
  }
  return total;
}

QuadResult g77(const NlsBetaWell& profile, double lambda, const QuadOptions& options) {
  if (!(lambda >= 0.5)) throw DomainError("lambda = " + fmt(lambda) + " is below lambda_min");
  if (!(lambda < 1.0)) throw DomainError("lambda must be below 1");
  const TurningPoints tp = *profile.exact_turning_points(lambda);
  const double x0 = profile.center();
  if (!(tp.x_plus > x0)) return {};
  const double scale = lambda * lambda * std::sqrt(1.0 - lambda * lambda);
  EndpointIntegrand f = [&](double, double, double to_b) {
    const double below = profile.excess_below(lambda, to_b);  // lambda - r_plus
    const double rp = lambda - below;
    return scale / std::sqrt(below * (lambda + rp));
  };
  QuadResult r =
      integrate_endpoint_singular(f, x0, tp.x_plus, SingularitySpec::inverse_sqrt_right(), options);
  r.value *= 2.0;
  r.error_estimate *= 2.0;
  return r;
}

QuadResult whitham_flux_density(const NlsProfile& profile, double lambda,
                                const QuadOptions& options) {
  if (const auto* bw = dynamic_cast<const NlsBetaWell*>(&profile)) {
    return g77(*bw, lambda, options);
  }
  QuadResult r = phi_nls(profile, lambda, options);
  const double factor = lambda * std::sqrt(1.0 - lambda * lambda);
  r.value *= factor;
  r.error_estimate *= std::abs(factor);
  return r;
}

AsymptoticValue rhobar_asymptotic(const NlsProfile& profile, double x, double t, double delta,
                                  const QuadOptions& options) {
  if (!(t > 0.0)) throw DomainError("t must be positive");
  if (!(delta > 0.0)) throw DomainError("delta must be positive");
  const double lam = x / t;
  const double lmin = profile.lambda_min();
  const double lmax = profile.lambda_max();
  const bool positive = lam > lmin && lam < 1.0;
  const bool negative = lam > -1.0 && lam < lmax;
  if (!positive && !negative) return {1.0, RegionTag::background};
  const bool near_edge = positive ? (lam < lmin + delta || lam > 1.0 - delta)
                                  : (lam < -1.0 + delta || lam > lmax - delta);
  const double phi = std::abs(phi_nls(profile, lam, options).value);
  const double value = 1.0 - 4.0 / (std::numbers::pi * t) * phi * std::sqrt(1.0 - lam * lam);
  return {value, near_edge ? RegionTag::transition : RegionTag::whitham};
}

SignReport check_flux_monotonicity(const NlsProfile& profile, std::span<const double> lambda_grid,
                             double h, const QuadOptions& options) {
  if (!(h > 0.0)) throw DomainError("finite-difference step must be positive");
  SignReport rep;
  rep.kind = "nls";
  if (const auto* bw = dynamic_cast<const NlsBetaWell*>(&profile)) rep.beta = bw->beta();
  rep.tolerance = h;
  const double lmin = profile.lambda_min();
  auto g = [&](double l) { return whitham_flux_density(profile, l, options).value; };

  std::vector<double> values;
  for (double l : lambda_grid) {
    if (!(l >= lmin && l + h < 1.0)) {
      throw DomainError("lambda = " + fmt(l) + " is outside [lambda_min, 1)");
    }
    const double gl = g(l);
    values.push_back(gl);
    const double d = (l - h >= lmin) ? (g(l + h) - g(l - h)) / (2.0 * h) : (g(l + h) - gl) / h;
    rep.witness_points.push_back({l, d, d < 0.0 ? -1 : (d > 0.0 ? 1 : 0)});
  }

  bool nondecreasing = true, nonincreasing = true;
  if (values.size() == 1) {
    nondecreasing = rep.witness_points.front().derivative >= 0.0;
    nonincreasing = !nondecreasing;
  }
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] < values[i - 1]) {
      nondecreasing = false;
      rep.violating_pairs.push_back(
          {lambda_grid[i - 1], lambda_grid[i], values[i - 1], values[i]});
    }
    if (values[i] > values[i - 1]) nonincreasing = false;
  }
  for (const auto& w : rep.witness_points) {
    if (w.sign < 0 && nondecreasing) {
      rep.notes.push_back("pointwise derivative negative at lambda = " + fmt(w.at) +
                          " although the sampled values are nondecreasing");
    }
  }
  rep.classification = nondecreasing
                           ? SignClass::diffusive
                           : (nonincreasing ? SignClass::antidiffusive : SignClass::mixed);
  return rep;
}

std::vector<double> table2_lambdas() { return {0.5, 0.6, 0.7, 0.8, 0.9}; }
std::vector<double> table2_betas() { return {1.5, 2.0, 3.0, 3.5}; }

std::vector<PhiTable> emit_table2(std::span<const double> betas, std::span<const double> lambdas,
                                  const QuadOptions& options) {
  std::vector<PhiTable> out;
  for (double beta : betas) {
    const NlsBetaWell well(beta);
    PhiTable t;
    t.kind = PhiKind::nls_lambda;
    t.beta = beta;
    for (double l : lambdas) {
      const QuadResult r = g77(well, l, options);
      t.grid.push_back(l);
      t.values.push_back(r.value);
      t.error_estimates.push_back(r.error_estimate);
    }
    out.push_back(std::move(t));
  }
  return out;
}

double soliton_dip(double x, double eta, double epsilon) {
  const double a = std::sqrt(1.0 - eta * eta);
  const double arg = a * x / (2.0 * epsilon);
  if (std::abs(arg) > kDipCutoff) return 0.0;
  const double c = std::cosh(arg);
  return (1.0 - eta * eta) / (c * c);
}

// ---------------------------------------------------------------------------

WeylCounter::WeylCounter(const NlsProfile& profile, const QuadOptions& options,
                         std::size_t panels)
    : lambda_min_(profile.lambda_min()) {
  if (panels < 16) throw DomainError("WeylCounter needs at least 16 panels");
  // lambda = lmin + (1 - lmin) w(v), w = 3v^2 - 2v^3 flattens both edges
  const double span = 1.0 - lambda_min_;
  auto lam = [&](double v) { return lambda_min_ + span * v * v * (3.0 - 2.0 * v); };
  auto jac = [&](double v) { return span * 6.0 * v * (1.0 - v); };
  std::vector<double> f(panels + 1, 0.0);
  lambda_.resize(panels + 1);
  for (std::size_t k = 0; k <= panels; ++k) {
    const double v = static_cast<double>(k) / static_cast<double>(panels);
    lambda_[k] = lam(v);
    if (k == 0 || k == panels) continue;  // integrand vanishes at both ends
    f[k] = std::abs(phi_nls(profile, lambda_[k], options).value) * jac(v);
  }
  lambda_.front() = lambda_min_;
  lambda_.back() = 1.0;
  const double dv = 1.0 / static_cast<double>(panels);
  cumulative_.assign(panels + 1, 0.0);
  for (std::size_t k = 1; k <= panels; ++k) {
    cumulative_[k] = cumulative_[k - 1] + 0.5 * dv * (f[k] + f[k - 1]);
  }
}

double WeylCounter::cumulative(double lambda) const {
  if (lambda <= lambda_min_) return 0.0;
  if (lambda >= 1.0) return total();
  const auto it = std::upper_bound(lambda_.begin(), lambda_.end(), lambda);
  const std::size_t k = static_cast<std::size_t>(it - lambda_.begin()) - 1;
  const double w = (lambda - lambda_[k]) / (lambda_[k + 1] - lambda_[k]);
  return cumulative_[k] + w * (cumulative_[k + 1] - cumulative_[k]);
}

double WeylCounter::inverse(double c) const {
  if (c <= 0.0) return lambda_min_;
  if (c >= total()) return 1.0;
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), c);
  const std::size_t k = static_cast<std::size_t>(it - cumulative_.begin()) - 1;
  const double w = (c - cumulative_[k]) / (cumulative_[k + 1] - cumulative_[k]);
  return lambda_[k] + w * (lambda_[k + 1] - lambda_[k]);
}

SolitonLattice soliton_lattice(const NlsProfile& profile, double epsilon, double t,
                               std::pair<double, double> x_range, std::size_t n_samples,
                               const QuadOptions& options) {
  if (!(epsilon > 0.0)) throw DomainError("epsilon must be positive");
  if (!(t > 0.0)) throw DomainError("t must be positive");
  if (n_samples < 2 || !(x_range.second > x_range.first)) {
    throw DomainError("lattice sampling needs a nonempty range and at least 2 samples");
  }
  const WeylCounter counter(profile, options);
  const double quantum = std::numbers::pi * epsilon;
  const auto count = static_cast<std::size_t>(std::floor(counter.total() / quantum));
  if (count < 2) {
    throw DomainError("lattice too coarse: epsilon = " + fmt(epsilon) +
                      " leaves fewer than two wavenumbers in the branch");
  }
  SolitonLattice lat;
  lat.epsilon = epsilon;
  lat.time = t;
  for (std::size_t n = 1; n <= count; ++n) {
    lat.wavenumbers.push_back(counter.inverse(quantum * (static_cast<double>(n) - 0.5)));
    lat.phases.push_back(0.0);
  }

  const double dx = (x_range.second - x_range.first) / static_cast<double>(n_samples - 1);
  const FieldGrid grid = FieldGrid::line(n_samples, dx, x_range.first, false);
  lat.field = RealField(grid, 1, 1.0);
  for (std::size_t n = 0; n < lat.wavenumbers.size(); ++n) {
    const double eta = lat.wavenumbers[n];
    const double centre = eta * t + lat.phases[n];
    const double reach = kDipCutoff * 2.0 * epsilon / std::sqrt(1.0 - eta * eta);
    const double lo = std::max(0.0, std::floor((centre - reach - grid.x0) / dx));
    const double hi =
        std::min(static_cast<double>(n_samples - 1), std::ceil((centre + reach - grid.x0) / dx));
    for (auto i = static_cast<std::size_t>(lo); static_cast<double>(i) <= hi; ++i) {
      lat.field.at(i) -= soliton_dip(grid.x(i) - centre, eta, epsilon);
    }
  }
  return lat;
}

RealField local_average(const RealField& density, double window, AverageKernel kernel) {
  RealField deficit = density;
  for (auto& v : deficit.data) v = 1.0 - v;
  return moving_average(deficit, window, kernel);
}

double q_flux(double rho, double mu) { return mu * mu / rho + 0.5 * rho * rho; }

MaskedField nu_turb_nls_field(const RealField& mubar, const RealField& qbar,
                              const RealField& rhobar, double eps_grad, double convexity_tol) {
  require_same_grid(mubar.grid, qbar.grid, "nu_turb_nls_field");
  require_same_grid(mubar.grid, rhobar.grid, "nu_turb_nls_field");
  const std::size_t n = mubar.grid.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (!(rhobar.at(i) > 0.0)) {
      throw DomainError("rhobar must be positive (x = " + fmt(mubar.grid.x(i)) + ")");
    }
    const double defect = qbar.at(i) - q_flux(rhobar.at(i), mubar.at(i));
    if (defect < -convexity_tol) {
      throw ValidationError("convexity violated at x = " + fmt(mubar.grid.x(i)) +
                            ": Qbar - Q(rhobar, mubar) = " + fmt(defect));
    }
  }
  const RealField grad = finite_difference(mubar, 0);
  MaskedField out{RealField(mubar.grid, 1), std::vector<std::uint8_t>(n, 0)};
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(grad.at(i)) > eps_grad) {
      out.field.at(i) = (qbar.at(i) - q_flux(rhobar.at(i), mubar.at(i))) / grad.at(i);
      out.mask[i] = 1;
    } else {
      out.field.at(i) = std::nan("");
    }
  }
  return out;
}

}  // namespace dlab
