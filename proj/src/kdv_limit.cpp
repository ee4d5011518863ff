#include "dlab/kdv_limit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <sstream>

#include "dlab/errors.hpp"

namespace dlab {

namespace {

// Edge clamp for the transition bands, where eta hits 0 or 1.
constexpr double kEtaEdge = 1e-9;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

void add(QuadResult& total, const QuadResult& part) {
  total.value += part.value;
  total.error_estimate += part.error_estimate;
  total.evaluations += part.evaluations;
}

}  // namespace

std::string to_string(RegionTag tag) {
  switch (tag) {
    case RegionTag::whitham:
      return "whitham";
    case RegionTag::transition:
      return "transition";
    case RegionTag::decay:
      return "decay_O(t^-2)";
    case RegionTag::background:
      return "background";
  }
  return "whitham";
}

QuadResult phi_kdv(const KdvProfile& profile, double eta, const QuadOptions& options) {
  if (!(eta > 0.0 && eta < 1.0)) throw DomainError("eta = " + fmt(eta) + " is outside (0, 1)");
  const auto exact = profile.exact_turning_points(eta);
  const TurningPoints tp = exact ? *exact : kdv_turning_points(profile, eta);
  const double x0 = profile.minimum_point();

  QuadResult total{};
  if (tp.x_plus > x0) {
    EndpointIntegrand right = [&](double, double, double to_b) {
      return eta / std::sqrt(profile.level_gap(eta, tp, Side::right, to_b));
    };
    add(total, integrate_endpoint_singular(right, x0, tp.x_plus,
                                           SingularitySpec::inverse_sqrt_right(), options));
  }
  if (profile.symmetric()) {
    total.value *= 2.0;
    total.error_estimate *= 2.0;
  } else if (tp.x_minus < x0) {
    EndpointIntegrand left = [&](double, double from_a, double) {
      return eta / std::sqrt(profile.level_gap(eta, tp, Side::left, from_a));
    };
    add(total, integrate_endpoint_singular(left, tp.x_minus, x0,
                                           SingularitySpec::inverse_sqrt_left(), options));
  }
  return total;
}

AsymptoticValue ubar_asymptotic(const KdvProfile& profile, double x, double t, double delta,
                                const QuadOptions& options) {
  if (!(t > 0.0)) throw DomainError("t must be positive");
  if (!(delta > 0.0)) throw DomainError("delta must be positive");
  const double s = x / t;
  if (s < 0.0 || s > 4.0) return {0.0, RegionTag::decay};
  const RegionTag tag = (s > delta && s < 4.0 - delta) ? RegionTag::whitham : RegionTag::transition;
  const double eta = std::clamp(std::sqrt(s / 4.0), kEtaEdge, 1.0 - kEtaEdge);
  const double phi = phi_kdv(profile, eta, options).value;
  return {-phi / (4.0 * std::numbers::pi * t), tag};
}

QuadOptions derivative_quad_options(QuadOptions base) {
  base.rel_tol = std::min(base.rel_tol, 1e-13);
  base.abs_floor = std::min(base.abs_floor, 1e-15);
  return base;
}

DerivativeEstimate dphi_deta(const KdvProfile& profile, double eta, double h,
                             const QuadOptions& options) {
  if (!(h > 0.0)) throw DomainError("finite-difference step must be positive");
  if (!(eta - h > 0.0 && eta + h < 1.0)) {
    throw DomainError("finite-difference stencil around eta = " + fmt(eta) + " leaves (0, 1)");
  }
  auto phi = [&](double e) { return phi_kdv(profile, e, options).value; };
  DerivativeEstimate d;
  d.coarse = (phi(eta + h) - phi(eta - h)) / (2.0 * h);
  d.fine = (phi(eta + 0.5 * h) - phi(eta - 0.5 * h)) / h;
  d.value = (4.0 * d.fine - d.coarse) / 3.0;
  const double scale = std::max(std::abs(d.fine), 1e-300);
  d.consistent = std::abs(d.coarse - d.fine) <= 1e-4 * scale;
  return d;
}

SignReport classify_kdv_sign(const KdvProfile& profile, std::span<const double> eta_grid,
                             double h, const QuadOptions& options) {
  SignReport rep;
  rep.kind = "kdv";
  if (const auto* bw = dynamic_cast<const KdvBetaWell*>(&profile)) rep.beta = bw->beta();
  rep.tolerance = h;
  bool all_neg = !eta_grid.empty();
  bool all_pos = !eta_grid.empty();
  std::vector<double> values;
  for (double eta : eta_grid) {
    const DerivativeEstimate d = dphi_deta(profile, eta, h, options);
    const int sign = d.value < 0.0 ? -1 : (d.value > 0.0 ? 1 : 0);
    rep.witness_points.push_back({eta, d.value, sign});
    all_neg = all_neg && sign < 0;
    all_pos = all_pos && sign > 0;
    if (!d.consistent) {
      rep.notes.push_back("derivative at eta = " + fmt(eta) + " failed the h vs h/2 check");
    }
    values.push_back(phi_kdv(profile, eta, options).value);
  }
  // a diffusive profile needs phi decreasing; report where it is not
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[i - 1]) {
      rep.violating_pairs.push_back({eta_grid[i - 1], eta_grid[i], values[i - 1], values[i]});
    }
  }
  rep.classification =
      all_neg ? SignClass::diffusive : (all_pos ? SignClass::antidiffusive : SignClass::mixed);
  return rep;
}

std::vector<double> table1_etas() {
  std::vector<double> e;
  for (int k = 1; k <= 9; ++k) e.push_back(k / 10.0);
  return e;
}

std::vector<double> table1_betas() { return {1.0, 1.5, 2.0, 4.0}; }

std::vector<PhiTable> emit_table1(std::span<const double> betas, std::span<const double> etas,
                                  const QuadOptions& options) {
  std::vector<PhiTable> out;
  for (double beta : betas) {
    const KdvBetaWell well(beta);
    PhiTable t;
    t.kind = PhiKind::kdv_eta;
    t.beta = beta;
    for (double eta : etas) {
      const QuadResult r = phi_kdv(well, eta, options);
      t.grid.push_back(eta);
      t.values.push_back(r.value);
      t.error_estimates.push_back(r.error_estimate);
    }
    out.push_back(std::move(t));
  }
  return out;
}

void write_phi_csv(std::ostream& out, const std::vector<PhiTable>& tables,
                   csv::Precision precision) {
  const bool kdv = tables.empty() || tables.front().kind == PhiKind::kdv_eta;
  csv::write_row(out, kdv ? std::vector<std::string>{"beta", "eta", "phi", "err"}
                          : std::vector<std::string>{"beta", "lambda", "g", "err"});
  for (const auto& t : tables) {
    for (std::size_t i = 0; i < t.grid.size(); ++i) {
      std::string err;
      if (precision == csv::Precision::table) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.1e", t.error_estimates[i]);
        err = buf;
      } else {
        err = csv::format(t.error_estimates[i], precision);
      }
      csv::write_row(out, {csv::format(t.beta, precision), csv::format(t.grid[i], precision),
                           csv::format(t.values[i], precision), err});
    }
  }
}

MaskedField nu_turb_field(const RealField& ubar, const RealField& u2bar, double eps_grad,
                          double convexity_tol) {
  require_same_grid(ubar.grid, u2bar.grid, "nu_turb_field");
  if (ubar.components != 1 || u2bar.components != 1) {
    throw ShapeError("nu_turb_field expects scalar fields");
  }
  const std::size_t n = ubar.grid.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double defect = u2bar.at(i) - ubar.at(i) * ubar.at(i);
    if (defect < -convexity_tol) {
      throw ValidationError("convexity violated at x = " + fmt(ubar.grid.x(i)) +
                            ": u2bar - ubar^2 = " + fmt(defect));
    }
  }
  const RealField grad = finite_difference(ubar, 0);
  MaskedField out{RealField(ubar.grid, 1), std::vector<std::uint8_t>(n, 0)};
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(grad.at(i)) > eps_grad) {
      out.field.at(i) = (u2bar.at(i) - ubar.at(i) * ubar.at(i)) / grad.at(i);
      out.mask[i] = 1;
    } else {
      out.field.at(i) = std::nan("");
    }
  }
  return out;
}

}  // namespace dlab
