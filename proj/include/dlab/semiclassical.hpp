#pragma once

// Pseudo-spectral solvers for the small-dispersion KdV and defocusing NLS
// flows on a periodic interval, Madelung fields, and finite-epsilon weak
// limits by mollification.
//
//   KdV:  u_t - 6 u u_x + eps^2 u_xxx = 0           (integrating-factor RK4)
//   NLS:  i eps u_t + eps^2/2 u_xx + (1 - |u|^2) u = 0  (Strang split-step)

#include <complex>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <vector>

#include "dlab/field.hpp"

namespace dlab {

using cplx = std::complex<double>;

/// Periodic interval [origin, origin + length) with a power-of-two point count.
struct Grid1D {
  double length = 60.0;
  std::size_t points = 1024;
  double origin = -30.0;

  Grid1D() = default;
  Grid1D(double length, std::size_t points);  // centred on 0
  Grid1D(double length, std::size_t points, double origin);

  void validate() const;  // N >= 16, power of two, length > 0
  double dx() const { return length / static_cast<double>(points); }
  double x(std::size_t i) const { return origin + dx() * static_cast<double>(i); }
  std::vector<double> abscissae() const;
  FieldGrid field_grid() const { return FieldGrid::periodic_line(points, length, origin); }
};

enum class FlowKind { kdv, nls };

struct ConservedSample {
  double time = 0.0;
  double mass = 0.0;    // KdV: int u dx;     NLS: int |u|^2 dx
  double second = 0.0;  // KdV: int u^2 dx;   NLS: Hamiltonian
};

struct Trajectory {
  FlowKind kind = FlowKind::kdv;
  Grid1D grid;
  double epsilon = 0.0;
  double dt = 0.0;
  std::vector<double> times;
  std::vector<std::vector<cplx>> frames;  // imaginary parts zero for KdV
  std::vector<ConservedSample> conserved_log;

  RealField real_frame(std::size_t i) const;
  ComplexField complex_frame(std::size_t i) const;
  /// max over the log of |q(t) - q(0)| / max(|q(0)|, floor).
  double mass_drift() const;
  double second_drift() const;
};

struct SolverOptions {
  double dt = 1e-3;       // signed; negative integrates backward
  double t_final = 1.0;   // signed, same sign as dt
  std::size_t snap_every = 0;  // 0: only first and last frame
  double stability_c = 0.05;   // KdV: |dt| <= C dx / max|u|
  bool dealias = true;         // 2/3 rule on the KdV nonlinear product
  double blowup = 1e6;
  /// Throw AccuracyError when a conserved quantity drifts past its bound.
  bool enforce_conservation = false;
};

/// Relative drift bounds: KdV 1e-6 on both invariants; NLS 1e-8 on mass and
/// 1e-6 on energy.
inline constexpr double kKdvDriftBound = 1e-6;
inline constexpr double kNlsMassDriftBound = 1e-8;
inline constexpr double kNlsEnergyDriftBound = 1e-6;

/// Largest KdV step allowed by the stability rule for the given data.
double kdv_stable_dt(const std::vector<double>& u0, const Grid1D& grid, double c = 0.05);
/// NLS nonlinear phase-accuracy guard dx^2 / (pi eps).
double nls_max_dt(const Grid1D& grid, double epsilon);

/// Throws DomainError for a non-periodic-compatible u0 or a step violating
/// the stability rule, InstabilityError on blow-up.
Trajectory solve_kdv(const std::vector<double>& u0, double epsilon, const Grid1D& grid,
                     const SolverOptions& options);

/// Initial data u = A exp(i S / eps).
Trajectory solve_nls(const std::vector<double>& amplitude, const std::vector<double>& phase,
                     double epsilon, const Grid1D& grid, const SolverOptions& options);
Trajectory solve_nls(const std::vector<cplx>& u0, double epsilon, const Grid1D& grid,
                     const SolverOptions& options);

/// Continues a trajectory from its last frame for `duration` with step `dt`
/// (both may be negative).
Trajectory continue_run(const Trajectory& run, const SolverOptions& options);

double kdv_mass(const std::vector<cplx>& u, const Grid1D& grid);
double kdv_l2(const std::vector<cplx>& u, const Grid1D& grid);
double nls_mass(const std::vector<cplx>& u, const Grid1D& grid);
double nls_energy(const std::vector<cplx>& u, double epsilon, const Grid1D& grid);

/// Spectral derivative of a periodic complex sample vector.
std::vector<cplx> spectral_derivative(const std::vector<cplx>& u, double length);

struct MadelungFields {
  RealField rho;  // |u|^2
  RealField mu;   // eps Im(conj(u) u_x)
};

MadelungFields madelung(const std::vector<cplx>& frame, double epsilon, const Grid1D& grid);

struct WeakLimits {
  FlowKind kind = FlowKind::kdv;
  double epsilon = 0.0;  // smallest epsilon, the one the fields come from
  double mollifier = 0.0;
  // KdV
  RealField ubar, u2bar;
  // NLS
  RealField rhobar, mubar, qbar;
  /// max |primary(eps_min) - primary(eps_next)| / max(1, max|primary|),
  /// primary = ubar or rhobar.
  double convergence_indicator = 0.0;
};

/// Mollified weak limits at output frame `frame` from runs sharing a grid
/// and output times. Needs at least two runs.
WeakLimits ensemble_weak_limits(const std::vector<Trajectory>& runs, double mollifier,
                                std::size_t frame);

/// Mollified (u - ubar) (x) (u - ubar): one component for scalar fields,
/// three (11, 12, 22) for 2-component fields.
RealField defect_tensor(const RealField& member, const RealField& limit, double mollifier);

/// defect_tensor of the smallest-epsilon KdV run at `frame`.
RealField defect_tensor(const std::vector<Trajectory>& runs, const RealField& limit,
                        double mollifier, std::size_t frame);

/// Frames as CSV files plus `manifest.json` in `dir`.
void write_trajectory(const std::filesystem::path& dir, const Trajectory& run);
Trajectory read_trajectory(const std::filesystem::path& manifest);

}  // namespace dlab
