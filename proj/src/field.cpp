#include "dlab/field.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <set>

#include "dlab/csv.hpp"
#include "dlab/errors.hpp"

namespace dlab {

FieldGrid FieldGrid::line(std::size_t n, double spacing, double origin, bool periodic) {
  if (n == 0 || !(spacing > 0.0)) throw DomainError("grid needs n > 0 and positive spacing");
  FieldGrid g;
  g.nx = n;
  g.dx = spacing;
  g.x0 = origin;
  g.periodic = periodic;
  return g;
}

FieldGrid FieldGrid::periodic_line(std::size_t n, double length, double origin) {
  if (n == 0) throw DomainError("grid needs n > 0");
  return line(n, length / static_cast<double>(n), origin, true);
}

FieldGrid FieldGrid::plane(std::size_t nx, std::size_t ny, double dx, double dy, double x0,
                           double y0, bool periodic) {
  if (nx == 0 || ny == 0 || !(dx > 0.0) || !(dy > 0.0)) {
    throw DomainError("grid needs positive sizes and spacings");
  }
  FieldGrid g;
  g.nx = nx;
  g.ny = ny;
  g.dx = dx;
  g.dy = dy;
  g.x0 = x0;
  g.y0 = y0;
  g.periodic = periodic;
  return g;
}

bool FieldGrid::same_as(const FieldGrid& o, double rel_tol) const {
  auto close = [rel_tol](double a, double b) {
    return std::abs(a - b) <= rel_tol * std::max({1.0, std::abs(a), std::abs(b)});
  };
  return nx == o.nx && ny == o.ny && periodic == o.periodic && close(dx, o.dx) &&
         close(dy, o.dy) && close(x0, o.x0) && close(y0, o.y0);
}

void require_same_grid(const FieldGrid& a, const FieldGrid& b, const std::string& context) {
  if (!a.same_as(b)) throw ShapeError(context + ": fields are not on the same grid");
}

std::vector<double> RealField::component(std::size_t comp) const {
  const std::size_t n = grid.size();
  return {data.begin() + static_cast<std::ptrdiff_t>(comp * n),
          data.begin() + static_cast<std::ptrdiff_t>((comp + 1) * n)};
}

std::size_t MaskedField::defined_count() const {
  return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), std::uint8_t{1}));
}

namespace {

std::vector<double> kernel_weights(double window, double spacing, AverageKernel kernel) {
  if (!(window >= spacing)) throw DomainError("averaging window is narrower than the grid spacing");
  const auto half = static_cast<long>(std::floor(0.5 * window / spacing + 1e-9));
  std::vector<double> w(static_cast<std::size_t>(2 * half + 1), 1.0);
  if (kernel == AverageKernel::hann) {
    for (long k = -half; k <= half; ++k) {
      const double c = std::cos(std::numbers::pi * static_cast<double>(k) * spacing / window);
      w[static_cast<std::size_t>(k + half)] = c * c;
    }
  }
  return w;
}

// Averages `stride`-separated samples of a line of length n starting at base.
void average_line(const std::vector<double>& in, std::vector<double>& out, std::size_t base,
                  std::size_t stride, std::size_t n, const std::vector<double>& w,
                  bool periodic) {
  const long half = static_cast<long>(w.size() / 2);
  const long ln = static_cast<long>(n);
  for (long i = 0; i < ln; ++i) {
    double s = 0.0, ws = 0.0;
    for (long k = -half; k <= half; ++k) {
      long j = i + k;
      if (periodic) {
        j = ((j % ln) + ln) % ln;
      } else if (j < 0 || j >= ln) {
        continue;
      }
      const double wk = w[static_cast<std::size_t>(k + half)];
      s += wk * in[base + static_cast<std::size_t>(j) * stride];
      ws += wk;
    }
    out[base + static_cast<std::size_t>(i) * stride] = s / ws;
  }
}

}  // namespace

RealField moving_average(const RealField& f, double window, AverageKernel kernel) {
  const FieldGrid& g = f.grid;
  RealField out = f;
  const auto wx = kernel_weights(window, g.dx, kernel);
  for (std::size_t c = 0; c < f.components; ++c) {
    const std::size_t off = c * g.size();
    for (std::size_t j = 0; j < g.ny; ++j) {
      average_line(f.data, out.data, off + g.index(0, j), 1, g.nx, wx, g.periodic);
    }
  }
  if (g.dims() == 2) {
    const auto wy = kernel_weights(window, g.dy, kernel);
    const std::vector<double> tmp = out.data;
    for (std::size_t c = 0; c < f.components; ++c) {
      const std::size_t off = c * g.size();
      for (std::size_t i = 0; i < g.nx; ++i) {
        average_line(tmp, out.data, off + i, g.nx, g.ny, wy, g.periodic);
      }
    }
  }
  return out;
}

RealField finite_difference(const RealField& f, int axis) {
  const FieldGrid& g = f.grid;
  if (axis == 1 && g.dims() != 2) throw DomainError("y derivative of a line field");
  const std::size_t n = axis == 0 ? g.nx : g.ny;
  const double h = axis == 0 ? g.dx : g.dy;
  if (n < 3) throw DomainError("finite differences need at least 3 points along the axis");
  RealField out = f;
  auto idx = [&](std::size_t line, std::size_t k) {
    return axis == 0 ? g.index(k, line) : g.index(line, k);
  };
  const std::size_t lines = axis == 0 ? g.ny : g.nx;
  for (std::size_t c = 0; c < f.components; ++c) {
    for (std::size_t l = 0; l < lines; ++l) {
      auto v = [&](std::size_t k) { return f.at(idx(l, k), c); };
      for (std::size_t k = 0; k < n; ++k) {
        double d;
        if (k > 0 && k + 1 < n) {
          d = (v(k + 1) - v(k - 1)) / (2.0 * h);
        } else if (g.periodic) {
          const std::size_t kp = (k + 1) % n;
          const std::size_t km = (k + n - 1) % n;
          d = (v(kp) - v(km)) / (2.0 * h);
        } else if (k == 0) {
          d = (-3.0 * v(0) + 4.0 * v(1) - v(2)) / (2.0 * h);
        } else {
          d = (3.0 * v(n - 1) - 4.0 * v(n - 2) + v(n - 3)) / (2.0 * h);
        }
        out.at(idx(l, k), c) = d;
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// CSV

namespace {

csv::Precision prec(bool full) { return full ? csv::Precision::full : csv::Precision::table; }

FieldGrid infer_line(const std::vector<double>& x, bool periodic) {
  if (x.size() < 2) throw DataError("a field needs at least 2 samples");
  const double dx = (x.back() - x.front()) / static_cast<double>(x.size() - 1);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double expect = x.front() + dx * static_cast<double>(i);
    if (std::abs(x[i] - expect) > 1e-9 * std::max(1.0, std::abs(expect))) {
      throw DataError("field abscissae are not uniformly spaced");
    }
  }
  return FieldGrid::line(x.size(), dx, x.front(), periodic);
}

}  // namespace

void write_real_csv(std::ostream& out, const RealField& f, const std::string& name,
                    bool full_precision) {
  csv::write_row(out, {"x", name});
  for (std::size_t i = 0; i < f.grid.nx; ++i) {
    csv::write_row(out, {csv::format(f.grid.x(i), prec(full_precision)),
                         csv::format(f.at(i), prec(full_precision))});
  }
}

void write_complex_csv(std::ostream& out, const ComplexField& f, bool full_precision) {
  csv::write_row(out, {"x", "re", "im"});
  for (std::size_t i = 0; i < f.grid.nx; ++i) {
    csv::write_row(out, {csv::format(f.grid.x(i), prec(full_precision)),
                         csv::format(f.values[i].real(), prec(full_precision)),
                         csv::format(f.values[i].imag(), prec(full_precision))});
  }
}

RealField read_real_csv(std::istream& in, const std::string& name, bool periodic) {
  const csv::Table t = csv::read(in, {"x", name});
  return RealField(infer_line(t.column_values("x"), periodic), t.column_values(name));
}

ComplexField read_complex_csv(std::istream& in, bool periodic) {
  const csv::Table t = csv::read(in, {"x", "re", "im"});
  ComplexField f;
  f.grid = infer_line(t.column_values("x"), periodic);
  const auto re = t.column_values("re");
  const auto im = t.column_values("im");
  for (std::size_t i = 0; i < re.size(); ++i) f.values.emplace_back(re[i], im[i]);
  return f;
}

void write_plane_csv(std::ostream& out, const RealField& f, const std::vector<std::string>& names) {
  if (names.size() != f.components) throw ShapeError("column names do not match components");
  std::vector<std::string> header{"x", "y"};
  header.insert(header.end(), names.begin(), names.end());
  csv::write_row(out, header);
  const FieldGrid& g = f.grid;
  for (std::size_t j = 0; j < g.ny; ++j) {
    for (std::size_t i = 0; i < g.nx; ++i) {
      std::vector<std::string> row{csv::format(g.x(i), csv::Precision::full),
                                   csv::format(g.y(j), csv::Precision::full)};
      for (std::size_t c = 0; c < f.components; ++c) {
        row.push_back(csv::format(f.at(g.index(i, j), c), csv::Precision::full));
      }
      csv::write_row(out, row);
    }
  }
}

RealField read_plane_csv(std::istream& in, const std::vector<std::string>& names, bool periodic) {
  std::vector<std::string> header{"x", "y"};
  header.insert(header.end(), names.begin(), names.end());
  const csv::Table t = csv::read(in, header);
  const auto xs = t.column_values("x");
  const auto ys = t.column_values("y");
  const std::set<double> ux(xs.begin(), xs.end());
  const std::set<double> uy(ys.begin(), ys.end());
  const std::size_t nx = ux.size(), ny = uy.size();
  if (nx * ny != t.rows.size() || nx < 2 || ny < 2) {
    throw DataError("plane CSV does not describe a full rectangular grid");
  }
  const FieldGrid gx = infer_line({ux.begin(), ux.end()}, periodic);
  const FieldGrid gy = infer_line({uy.begin(), uy.end()}, periodic);
  RealField f(FieldGrid::plane(nx, ny, gx.dx, gy.dx, gx.x0, gy.x0, periodic), names.size());
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const std::size_t i = r % nx, j = r / nx;
    if (std::abs(xs[r] - gx.x(i)) > 1e-9 * std::max(1.0, std::abs(xs[r])) ||
        std::abs(ys[r] - gy.x(j)) > 1e-9 * std::max(1.0, std::abs(ys[r]))) {
      throw DataError("plane CSV rows must be ordered with x varying fastest");
    }
    for (std::size_t c = 0; c < names.size(); ++c) {
      f.at(f.grid.index(i, j), c) = t.rows[r][t.column(names[c])];
    }
  }
  return f;
}

}  // namespace dlab
