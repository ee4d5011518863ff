#pragma once

// Lax-Levermore density phi(eta) for single-well KdV data, its long-time
// weak limit and the sign diagnostic for the effective viscosity.

#include <iosfwd>
#include <span>
#include <vector>

#include "dlab/csv.hpp"
#include "dlab/field.hpp"
#include "dlab/profiles.hpp"
#include "dlab/quadrature.hpp"
#include "dlab/report.hpp"

namespace dlab {

enum class PhiKind { kdv_eta, nls_lambda };

/// phi sampled on a grid for one profile parameter.
struct PhiTable {
  PhiKind kind = PhiKind::kdv_eta;
  double beta = 0.0;
  std::vector<double> grid;
  std::vector<double> values;
  std::vector<double> error_estimates;
};

/// phi(eta) = integral over (x_-, x_+) of eta (-u0(x) - eta^2)^(-1/2) dx.
/// Symmetric wells integrate one half and double it; others are split at
/// the minimum point. Throws DomainError for eta outside (0, 1).
QuadResult phi_kdv(const KdvProfile& profile, double eta, const QuadOptions& options = {});

enum class RegionTag {
  whitham,     // interior of the oscillation region, formula valid
  transition,  // within delta of an edge, formula value returned but unreliable
  decay,       // outside, value 0 standing for O(t^-2)
  background,  // NLS: outside the Whitham branches, rho = 1
};

std::string to_string(RegionTag tag);

struct AsymptoticValue {
  double value = 0.0;
  RegionTag tag = RegionTag::whitham;
};

/// Large-t weak limit -phi(sqrt(x/4t)) / (4 pi t) for delta < x/t < 4 - delta.
AsymptoticValue ubar_asymptotic(const KdvProfile& profile, double x, double t,
                                double delta = 1e-3, const QuadOptions& options = {});

struct DerivativeEstimate {
  double value = 0.0;   // Richardson-refined
  double coarse = 0.0;  // central difference with step h
  double fine = 0.0;    // central difference with step h/2
  bool consistent = true;
};

/// Quadrature settings used for finite differences of phi.
QuadOptions derivative_quad_options(QuadOptions base = {});

/// phi'(eta) by central differences with one Richardson step. `consistent`
/// is false when the h and h/2 estimates differ by more than 1e-4 relative.
DerivativeEstimate dphi_deta(const KdvProfile& profile, double eta, double h = 1e-4,
                             const QuadOptions& options = derivative_quad_options());

/// Diffusive iff phi' < 0 at every grid point, antidiffusive iff > 0.
SignReport classify_kdv_sign(const KdvProfile& profile, std::span<const double> eta_grid,
                             double h = 1e-4,
                             const QuadOptions& options = derivative_quad_options());

/// One PhiTable per beta for u0 = -exp(-|x|^beta).
std::vector<PhiTable> emit_table1(std::span<const double> betas, std::span<const double> etas,
                                  const QuadOptions& options = {});

/// `beta,eta,phi,err` rows (`beta,lambda,g,err` for NLS tables).
void write_phi_csv(std::ostream& out, const std::vector<PhiTable>& tables,
                   csv::Precision precision);

/// Eta grid {0.1, ..., 0.9}.
std::vector<double> table1_etas();
std::vector<double> table1_betas();

/// nu = (u2bar - ubar^2) / d_x ubar where |d_x ubar| > eps_grad, masked
/// elsewhere. Throws ShapeError on grid mismatch and ValidationError when
/// u2bar < ubar^2 - convexity_tol anywhere.
MaskedField nu_turb_field(const RealField& ubar, const RealField& u2bar, double eps_grad,
                          double convexity_tol = 1e-10);

}  // namespace dlab
