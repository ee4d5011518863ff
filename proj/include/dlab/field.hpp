#pragma once

// Uniformly sampled 1D/2D fields and the local operations shared by the
// weak-limit, semiclassical and Wigner diagnostics.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace dlab {

struct FieldGrid {
  std::size_t nx = 0;
  std::size_t ny = 1;  // 1 for a line
  double dx = 1.0;
  double dy = 1.0;
  double x0 = 0.0;
  double y0 = 0.0;
  bool periodic = true;

  static FieldGrid line(std::size_t n, double spacing, double origin = 0.0, bool periodic = true);
  /// Periodic line of `n` points covering [origin, origin + length).
  static FieldGrid periodic_line(std::size_t n, double length, double origin = 0.0);
  static FieldGrid plane(std::size_t nx, std::size_t ny, double dx, double dy, double x0 = 0.0,
                         double y0 = 0.0, bool periodic = true);

  int dims() const { return ny > 1 ? 2 : 1; }
  std::size_t size() const { return nx * ny; }
  std::size_t index(std::size_t i, std::size_t j = 0) const { return j * nx + i; }
  double x(std::size_t i) const { return x0 + dx * static_cast<double>(i); }
  double y(std::size_t j) const { return y0 + dy * static_cast<double>(j); }
  double length_x() const { return dx * static_cast<double>(nx); }
  double length_y() const { return dy * static_cast<double>(ny); }
  double cell_area() const { return dims() == 2 ? dx * dy : dx; }

  bool same_as(const FieldGrid& o, double rel_tol = 1e-12) const;
};

/// Throws ShapeError when the grids differ.
void require_same_grid(const FieldGrid& a, const FieldGrid& b, const std::string& context);

/// Real field with `components` values per point, stored component-major.
struct RealField {
  FieldGrid grid;
  std::size_t components = 1;
  std::vector<double> data;

  RealField() = default;
  RealField(FieldGrid g, std::size_t comps, double fill = 0.0)
      : grid(g), components(comps), data(g.size() * comps, fill) {}
  RealField(FieldGrid g, std::vector<double> values)
      : grid(g), components(1), data(std::move(values)) {}

  double& at(std::size_t point, std::size_t comp = 0) { return data[comp * grid.size() + point]; }
  double at(std::size_t point, std::size_t comp = 0) const {
    return data[comp * grid.size() + point];
  }
  std::vector<double> component(std::size_t comp) const;
};

struct ComplexField {
  FieldGrid grid;
  std::vector<std::complex<double>> values;
};

/// Field with a per-point definedness mask (1 = defined).
struct MaskedField {
  RealField field;
  std::vector<std::uint8_t> mask;

  std::size_t defined_count() const;
};

enum class AverageKernel { boxcar, hann };

/// Local average over a window of width `window` (in x, and in y for 2D
/// fields). Periodic grids wrap; others renormalize the truncated window.
/// Throws DomainError when the window is narrower than the grid spacing.
RealField moving_average(const RealField& f, double window,
                         AverageKernel kernel = AverageKernel::boxcar);

/// Second-order finite-difference derivative along `axis` (0 = x, 1 = y);
/// one-sided second-order stencils at the ends of non-periodic grids.
RealField finite_difference(const RealField& f, int axis = 0);

// CSV persistence for line fields: `x,<name>` for real and `x,re,im` for
// complex fields.
void write_real_csv(std::ostream& out, const RealField& f, const std::string& name,
                    bool full_precision = true);
void write_complex_csv(std::ostream& out, const ComplexField& f, bool full_precision = true);
RealField read_real_csv(std::istream& in, const std::string& name, bool periodic = true);
ComplexField read_complex_csv(std::istream& in, bool periodic = true);

/// 2D fields as `x,y,<names...>` rows with x varying fastest.
void write_plane_csv(std::ostream& out, const RealField& f, const std::vector<std::string>& names);
RealField read_plane_csv(std::istream& in, const std::vector<std::string>& names,
                         bool periodic = true);

}  // namespace dlab
