#pragma once

// Space and time Wigner transforms, defect spectra, shell-averaged energy
// spectra, the trace-free decomposition of turbulent stresses, and the
// strong-convergence diagnostic.

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dlab/field.hpp"
#include "dlab/report.hpp"
#include "dlab/semiclassical.hpp"

namespace dlab {

enum class WignerMode { space, time };

/// Samples of a symmetrized Wigner transform on (base, dual) grids. Stored
/// components are the upper triangle of the d x d block in row-major order
/// (d = 1: "11"; d = 2: "11", "12", "22").
struct WignerTensor {
  WignerMode mode = WignerMode::space;
  std::vector<double> base;  // x or t
  std::vector<double> dual;  // k or tau, ascending
  double dual_spacing = 0.0;
  std::size_t dim = 1;
  std::vector<std::string> component_names;
  std::vector<std::vector<double>> values;  // [component][ib * dual.size() + id]
  std::string window;

  std::size_t components() const { return values.size(); }
  double at(std::size_t comp, std::size_t ib, std::size_t id) const {
    return values[comp][ib * dual.size() + id];
  }
  /// (1/2pi) sum over the dual axis, one value per base point.
  std::vector<double> dual_integral(std::size_t comp = 0) const;
};

/// Component order for a d-dimensional symmetric block.
std::vector<std::string> tensor_component_names(std::size_t dim);

/// Space transform of a periodic line field. `window_width` tapers the shift
/// variable with cos^2(pi r / W); nullopt means no taper. Throws DomainError
/// when W exceeds the domain length or is not positive.
WignerTensor wigner_space(const ComplexField& field, std::optional<double> window_width = {});
/// Real line field with 1 or 2 components.
WignerTensor wigner_space(const RealField& field, std::optional<double> window_width = {});

/// Truncated Gaussian theta(s) = exp(-s^2 / (2 sigma^2)), theta(0) = 1.
struct TimeWindow {
  double sigma = 0.0;  // 0: no taper
  double operator()(double s) const;
  std::string describe() const;
};

/// Time transform of a uniformly sampled series at a fixed point. Samples
/// beyond the series are zero; the shift axis is zero-padded to a power of
/// two.
WignerTensor wigner_time(const std::vector<std::complex<double>>& series, double t0, double dt,
                         const TimeWindow& theta = {});
WignerTensor wigner_time(const std::vector<double>& series, double t0, double dt,
                         const TimeWindow& theta = {});

/// Space transform of u - ubar for the smallest-epsilon KdV run at `frame`,
/// mollified in x so its k-integral equals defect_tensor.
WignerTensor defect_spectrum(const std::vector<Trajectory>& runs, const RealField& limit,
                             double mollifier, std::size_t frame);
WignerTensor defect_spectrum(const RealField& member, const RealField& limit, double mollifier);

/// x-averaged Wigner tensor on a d-dimensional wavenumber lattice in FFT
/// order. `values[c]` uses the full d x d component c = a * d + b.
struct SpectralTensor {
  std::size_t dim = 1;
  std::vector<std::size_t> n;  // points per axis
  std::vector<double> dk;      // lattice spacing per axis
  std::vector<std::vector<double>> values;

  std::size_t size() const;
  std::vector<double> wavevector(std::size_t index) const;
  double trace(std::size_t index) const;
  /// (1/2pi)^d sum trace dk^d.
  double reconstructed_energy() const;
};

/// Mean spectral tensor (1/|Omega|) Re(u_hat_a conj(u_hat_b)) of a periodic
/// 1D or 2D field with `dim` components.
SpectralTensor mean_spectral_tensor(const RealField& field);

struct IsotropicSpectrum {
  std::size_t dim = 1;
  std::vector<double> k;       // shell centres
  std::vector<double> energy;  // E(k)
  double shell_width = 0.0;
  double integral = 0.0;       // sum E dk
  double mean_energy = 0.0;    // (1/2pi)^d sum trace dk^d
  double isotropy_residual = 0.0;
  std::vector<std::string> warnings;
};

/// Shell average of the trace. For d = 1, 2 the integral equals the mean
/// energy; for d = 3, E = 2 pi |k|^2 times the shell-mean trace, whose
/// integral is (2 pi)^3 / 2 times the mean energy.
IsotropicSpectrum isotropic_spectrum(const SpectralTensor& tensor);

/// Velocity gradient components (d1u1, d2u1, d1u2, d2u2) of a 2-component
/// plane field: spectral when periodic and `spectral`, else finite
/// differences.
RealField velocity_gradient(const RealField& u, bool spectral = true);

struct TraceFreeDecomposition {
  MaskedField nu;
  MaskedField delta;
  RealField residual;  // S - nu B - delta Phi; components 11, 12, 22
  double max_residual = 0.0;
  double max_divergence = 0.0;
  double max_trace = 0.0;
};

struct DecomposeOptions {
  double eps_basis = 1e-12;
  double trace_tol = 1e-8;
  double divergence_tol = 1e-6;
};

/// S as (S11, S12, S22). Throws ValidationError when S is not trace-free or u
/// is not divergence-free within tolerance.
TraceFreeDecomposition tracefree_decompose(const RealField& s, const RealField& gradient,
                                           const DecomposeOptions& options = {});
TraceFreeDecomposition tracefree_decompose_velocity(const RealField& s, const RealField& u,
                                                    const DecomposeOptions& options = {});

/// T = (R11 + R22) / 2 and S = R - T I for a symmetric (R11, R12, R22) field.
struct TraceSplit {
  RealField trace;
  RealField tracefree;
  double min_eigenvalue = 0.0;
};
TraceSplit split_trace(const RealField& r);

struct Prop1Options {
  double t_horizon = 0.0;  // 0: whole run
  double tol = 1e-6;
  double mollifier = 0.0;  // 0: one eighth of the domain
};

/// Strong-convergence diagnostic for the smallest-epsilon member against the
/// limit trajectory, with eddy viscosity `nu` (empty: nu = 0).
DiagnosticsReport prop1_report(const std::vector<Trajectory>& members, const Trajectory& limit,
                               const std::optional<RealField>& nu, const Prop1Options& options);

void write_wigner_csv(std::ostream& out, const WignerTensor& w, bool full_precision = true);
nlohmann::ordered_json wigner_manifest(const WignerTensor& w);

}  // namespace dlab
