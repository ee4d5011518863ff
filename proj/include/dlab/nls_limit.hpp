#pragma once

// Whitham density phi(lambda) for single-well defocusing NLS data, the
// long-time weak limit of |u|^2, the sign condition on
// d/dlambda [lambda phi(lambda) sqrt(1 - lambda^2)], and the multisoliton
// lattice whose local average reproduces the weak limit.

#include <span>
#include <utility>
#include <vector>

#include "dlab/field.hpp"
#include "dlab/kdv_limit.hpp"
#include "dlab/profiles.hpp"
#include "dlab/quadrature.hpp"
#include "dlab/report.hpp"

namespace dlab {

/// Integral over (x_-, x_+) of (lambda - (r_+ + r_-)/2) ((lambda - r_+)(lambda - r_-))^(-1/2).
/// Returns 0 at a branch edge; throws DomainError in the solitonless gap.
QuadResult phi_nls(const NlsProfile& profile, double lambda, const QuadOptions& options = {});

/// lambda phi(lambda) sqrt(1 - lambda^2) for the symmetric beta-family,
/// 2 int_0^X lambda^2 sqrt(1 - lambda^2) (lambda^2 - r_+(x)^2)^(-1/2) dx with
/// X = (-ln 2(1 - lambda))^(1/beta). Zero at lambda = 1/2.
QuadResult g77(const NlsBetaWell& profile, double lambda, const QuadOptions& options = {});

/// lambda phi(lambda) sqrt(1 - lambda^2) for any single-well profile
/// (dispatches to g77 for the beta-family).
QuadResult whitham_flux_density(const NlsProfile& profile, double lambda,
                                const QuadOptions& options = {});

/// 1 - (4 / (pi t)) |phi(x/t)| sqrt(1 - (x/t)^2) inside the Whitham branches,
/// 1 elsewhere.
AsymptoticValue rhobar_asymptotic(const NlsProfile& profile, double x, double t,
                                  double delta = 1e-3, const QuadOptions& options = {});

/// Condition (g)' >= 0 on the positive branch. The verdict uses finite
/// differences between consecutive grid nodes (forward difference with
/// step h for a single node); pointwise central derivatives are reported as
/// witnesses.
SignReport check_flux_monotonicity(const NlsProfile& profile, std::span<const double> lambda_grid,
                             double h = 1e-4,
                             const QuadOptions& options = derivative_quad_options());

std::vector<double> table2_lambdas();
std::vector<double> table2_betas();

/// One PhiTable (kind nls_lambda) per beta holding g77 values.
std::vector<PhiTable> emit_table2(std::span<const double> betas, std::span<const double> lambdas,
                                  const QuadOptions& options = {});

/// Dark soliton dip s(x, eta) = (1 - eta^2) / cosh^2(sqrt(1 - eta^2) x / (2 eps)).
double soliton_dip(double x, double eta, double epsilon);

struct SolitonLattice {
  double epsilon = 0.0;
  double time = 0.0;
  std::vector<double> wavenumbers;  // increasing, inside (lambda_min, 1)
  std::vector<double> phases;
  RealField field;  // |u|^2 samples
};

/// Weyl counting function (1 / (pi eps)) int_{lambda_min}^{lambda} phi on the
/// positive branch, tabulated on a smooth map of (lambda_min, 1).
class WeylCounter {
 public:
  WeylCounter(const NlsProfile& profile, const QuadOptions& options = {},
              std::size_t panels = 2048);

  /// int_{lambda_min}^{lambda} phi(s) ds.
  double cumulative(double lambda) const;
  double total() const { return cumulative_.back(); }
  /// lambda with cumulative(lambda) = c, for 0 <= c <= total().
  double inverse(double c) const;

 private:
  double lambda_min_;
  std::vector<double> lambda_, cumulative_;
};

/// Multisoliton lattice at time t: wavenumbers at the half-integer
/// quantiles of the Weyl counting function, zero phases, and
/// |u|^2 = 1 - sum_n s(x - eta_n t, eta_n) sampled on `n_samples` points of
/// `x_range`. Throws DomainError ("lattice too coarse") when fewer than two
/// wavenumbers fit the branch.
SolitonLattice soliton_lattice(const NlsProfile& profile, double epsilon, double t,
                               std::pair<double, double> x_range, std::size_t n_samples,
                               const QuadOptions& options = {});

/// Local average of 1 - |u|^2.
RealField local_average(const RealField& density, double window,
                        AverageKernel kernel = AverageKernel::hann);

/// Q(rho, mu) = mu^2 / rho + rho^2 / 2.
double q_flux(double rho, double mu);

/// nu = (Qbar - Q(rhobar, mubar)) / d_x mubar where |d_x mubar| > eps_grad,
/// masked elsewhere. Throws DomainError if rhobar <= 0 anywhere and
/// ValidationError if the convexity defect is below -convexity_tol.
MaskedField nu_turb_nls_field(const RealField& mubar, const RealField& qbar,
                              const RealField& rhobar, double eps_grad,
                              double convexity_tol = 1e-10);

}  // namespace dlab
