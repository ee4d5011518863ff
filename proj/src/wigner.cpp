#include "dlab/wigner.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>
#include <thread>

#include "dlab/csv.hpp"
#include "dlab/errors.hpp"
#include "dlab/fft.hpp"

namespace dlab {

namespace {

using cplx = std::complex<double>;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

// Runs body(begin, end) over [0, n) on up to hardware_concurrency threads.
template <class F>
void parallel_for(std::size_t n, F body) {
  const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers = std::min<std::size_t>(hw, n / 64 + 1);
  if (workers <= 1) {
    body(std::size_t{0}, n);
    return;
  }
  std::vector<std::thread> pool;
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t b = w * chunk, e = std::min(n, b + chunk);
    if (b >= e) break;
    pool.emplace_back([=] { body(b, e); });
  }
  for (auto& t : pool) t.join();
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

long floor_half(long n) { return n >= 0 ? n / 2 : -((-n + 1) / 2); }

// Symmetrized product u_a(+) conj(u_b(-)) + u_b(+) conj(u_a(-)), halved, for
// shift index n; `get(c, i)` returns sample i of component c or zero.
template <class Get>
cplx shift_product(const Get& get, std::size_t a, std::size_t b, long j, long n) {
  auto pair = [&](long p, long m) {
    const cplx ab = get(a, p) * std::conj(get(b, m));
    if (a == b) return ab;
    return 0.5 * (ab + get(b, p) * std::conj(get(a, m)));
  };
  if (n % 2 == 0) return pair(j + n / 2, j - n / 2);
  const long m = floor_half(n);
  return 0.5 * (pair(j + m + 1, j - m) + pair(j + m, j - m - 1));
}

// Ascending dual ordering of an FFT output of length p.
std::size_t ascending_slot(std::size_t l, std::size_t p) { return (l + p / 2) % p; }

struct ComponentPair {
  std::size_t a, b;
};

std::vector<ComponentPair> upper_pairs(std::size_t dim) {
  std::vector<ComponentPair> out;
  for (std::size_t a = 0; a < dim; ++a)
    for (std::size_t b = a; b < dim; ++b) out.push_back({a, b});
  return out;
}

WignerTensor space_transform(const std::vector<std::vector<cplx>>& comps, const FieldGrid& grid,
                             std::optional<double> window_width) {
  if (grid.dims() != 1) throw DomainError("the space transform takes a line field");
  if (!grid.periodic) throw DomainError("the space transform needs a periodic field");
  const std::size_t n = grid.nx;
  if (n < 2) throw DomainError("field too short for a Wigner transform");
  const double dx = grid.dx;
  const double length = grid.length_x();
  if (window_width) {
    if (!(*window_width > 0.0)) throw DomainError("window width must be positive");
    if (*window_width > length * (1.0 + 1e-12))
      throw DomainError("window width " + fmt(*window_width) + " exceeds the domain length " +
                        fmt(length));
  }
  const std::size_t dim = comps.size();
  const auto pairs = upper_pairs(dim);

  WignerTensor w;
  w.mode = WignerMode::space;
  w.dim = dim;
  w.component_names = tensor_component_names(dim);
  w.base.resize(n);
  for (std::size_t i = 0; i < n; ++i) w.base[i] = grid.x(i);
  const auto k = fft::wavenumbers(n, length);
  w.dual.resize(n);
  for (std::size_t l = 0; l < n; ++l) w.dual[ascending_slot(l, n)] = k[l];
  w.dual_spacing = kTwoPi / length;
  w.window = window_width ? "cos2 taper, width " + fmt(*window_width) : "none";
  w.values.assign(pairs.size(), std::vector<double>(n * n, 0.0));

  const long nn = static_cast<long>(n);
  const long lo = -nn / 2;
  std::vector<double> taper(n, 1.0);
  for (long s = lo; s < lo + nn; ++s) {
    const std::size_t slot = static_cast<std::size_t>((s % nn + nn) % nn);
    if (window_width) {
      const double r = static_cast<double>(s) * dx;
      taper[slot] = std::abs(r) < 0.5 * *window_width
                        ? std::pow(std::cos(std::numbers::pi * r / *window_width), 2)
                        : 0.0;
    }
  }
  auto get = [&](std::size_t c, long i) {
    return comps[c][static_cast<std::size_t>((i % nn + nn) % nn)];
  };
  const fft::Plan plan(n);
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    std::vector<cplx> buf(n);
    for (std::size_t j = begin; j < end; ++j) {
      for (std::size_t p = 0; p < pairs.size(); ++p) {
        for (long s = lo; s < lo + nn; ++s) {
          const std::size_t slot = static_cast<std::size_t>((s % nn + nn) % nn);
          cplx v = shift_product(get, pairs[p].a, pairs[p].b, static_cast<long>(j), s);
          if (n % 2 == 0 && s == lo) v = v.real();
          buf[slot] = v * taper[slot];
        }
        plan.forward(buf);
        auto& out = w.values[p];
        for (std::size_t l = 0; l < n; ++l) out[j * n + ascending_slot(l, n)] = buf[l].real() * dx;
      }
    }
  });
  return w;
}

WignerTensor time_transform(const std::vector<cplx>& series, double t0, double dt,
                            const TimeWindow& theta) {
  const std::size_t m = series.size();
  if (m < 2) throw DomainError("time series needs at least 2 samples");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("time step must be positive");
  if (theta.sigma < 0.0 || !std::isfinite(theta.sigma))
    throw DomainError("window sigma must be nonnegative");
  const std::size_t p = next_pow2(2 * m);
  const long pl = static_cast<long>(p), ml = static_cast<long>(m);

  WignerTensor w;
  w.mode = WignerMode::time;
  w.dim = 1;
  w.component_names = tensor_component_names(1);
  w.base.resize(m);
  for (std::size_t i = 0; i < m; ++i) w.base[i] = t0 + dt * static_cast<double>(i);
  const auto tau = fft::wavenumbers(p, dt * static_cast<double>(p));
  w.dual.resize(p);
  for (std::size_t l = 0; l < p; ++l) w.dual[ascending_slot(l, p)] = tau[l];
  w.dual_spacing = kTwoPi / (dt * static_cast<double>(p));
  w.window = theta.describe();
  w.values.assign(1, std::vector<double>(m * p, 0.0));

  auto get = [&](std::size_t, long i) { return i >= 0 && i < ml ? series[static_cast<std::size_t>(i)] : cplx{}; };
  const fft::Plan plan(p);
  parallel_for(m, [&](std::size_t begin, std::size_t end) {
    std::vector<cplx> buf(p);
    for (std::size_t j = begin; j < end; ++j) {
      for (long s = -pl / 2; s < pl / 2; ++s) {
        const std::size_t slot = static_cast<std::size_t>((s % pl + pl) % pl);
        buf[slot] = shift_product(get, 0, 0, static_cast<long>(j), s) *
                    theta(static_cast<double>(s) * dt);
      }
      plan.forward(buf);
      for (std::size_t l = 0; l < p; ++l)
        w.values[0][j * p + ascending_slot(l, p)] = buf[l].real() * dt;
    }
  });
  return w;
}

std::vector<std::vector<cplx>> components_of(const RealField& f) {
  std::vector<std::vector<cplx>> out(f.components);
  for (std::size_t c = 0; c < f.components; ++c) {
    const auto v = f.component(c);
    out[c].assign(v.begin(), v.end());
  }
  return out;
}

}  // namespace

std::vector<std::string> tensor_component_names(std::size_t dim) {
  std::vector<std::string> names;
  for (std::size_t a = 0; a < dim; ++a)
    for (std::size_t b = a; b < dim; ++b) names.push_back(std::to_string(a + 1) + std::to_string(b + 1));
  return names;
}

std::vector<double> WignerTensor::dual_integral(std::size_t comp) const {
  const std::size_t nd = dual.size();
  std::vector<double> out(base.size(), 0.0);
  for (std::size_t ib = 0; ib < base.size(); ++ib) {
    double s = 0.0;
    for (std::size_t id = 0; id < nd; ++id) s += values[comp][ib * nd + id];
    out[ib] = s * dual_spacing / kTwoPi;
  }
  return out;
}

WignerTensor wigner_space(const ComplexField& field, std::optional<double> window_width) {
  if (field.values.size() != field.grid.size()) throw ShapeError("field size does not match grid");
  return space_transform({field.values}, field.grid, window_width);
}

WignerTensor wigner_space(const RealField& field, std::optional<double> window_width) {
  if (field.components < 1 || field.components > 2)
    throw ShapeError("the space transform takes 1 or 2 components");
  return space_transform(components_of(field), field.grid, window_width);
}

double TimeWindow::operator()(double s) const {
  if (sigma == 0.0) return 1.0;
  return std::exp(-0.5 * (s / sigma) * (s / sigma));
}

std::string TimeWindow::describe() const {
  return sigma == 0.0 ? "none" : "gaussian, sigma " + fmt(sigma);
}

WignerTensor wigner_time(const std::vector<std::complex<double>>& series, double t0, double dt,
                         const TimeWindow& theta) {
  return time_transform(series, t0, dt, theta);
}

WignerTensor wigner_time(const std::vector<double>& series, double t0, double dt,
                         const TimeWindow& theta) {
  return time_transform(std::vector<cplx>(series.begin(), series.end()), t0, dt, theta);
}

WignerTensor defect_spectrum(const RealField& member, const RealField& limit, double mollifier) {
  require_same_grid(member.grid, limit.grid, "defect spectrum");
  if (member.components != limit.components)
    throw ShapeError("member and limit have different component counts");
  if (!(mollifier > 0.0)) throw DomainError("mollifier width must be positive");
  RealField diff = member;
  for (std::size_t i = 0; i < diff.data.size(); ++i) diff.data[i] -= limit.data[i];
  WignerTensor w = wigner_space(diff);
  // mollify each k column along x
  const std::size_t nb = w.base.size(), nd = w.dual.size();
  const FieldGrid line = member.grid;
  for (auto& comp : w.values) {
    RealField col(line, 1);
    for (std::size_t id = 0; id < nd; ++id) {
      for (std::size_t ib = 0; ib < nb; ++ib) col.at(ib) = comp[ib * nd + id];
      const RealField sm = moving_average(col, mollifier, AverageKernel::hann);
      for (std::size_t ib = 0; ib < nb; ++ib) comp[ib * nd + id] = sm.at(ib);
    }
  }
  w.window = "none; mollified in x, width " + fmt(mollifier);
  return w;
}

WignerTensor defect_spectrum(const std::vector<Trajectory>& runs, const RealField& limit,
                             double mollifier, std::size_t frame) {
  if (runs.empty()) throw ValidationError("defect spectrum needs at least one run");
  const Trajectory* fine = &runs.front();
  for (const auto& r : runs) {
    require_same_grid(r.grid.field_grid(), runs.front().grid.field_grid(), "defect spectrum");
    if (r.epsilon < fine->epsilon) fine = &r;
  }
  if (fine->kind != FlowKind::kdv) throw ValidationError("defect spectrum needs real (KdV) runs");
  if (frame >= fine->frames.size()) throw ShapeError("frame index beyond the run's output");
  return defect_spectrum(fine->real_frame(frame), limit, mollifier);
}

// ---------------------------------------------------------------------------
// Spectral tensors

std::size_t SpectralTensor::size() const {
  std::size_t s = 1;
  for (auto v : n) s *= v;
  return s;
}

std::vector<double> SpectralTensor::wavevector(std::size_t index) const {
  std::vector<double> k(dim);
  for (std::size_t a = 0; a < dim; ++a) {
    const std::size_t i = index % n[a];
    index /= n[a];
    const long m = i < n[a] / 2 + n[a] % 2 ? static_cast<long>(i)
                                             : static_cast<long>(i) - static_cast<long>(n[a]);
    k[a] = static_cast<double>(m) * dk[a];
  }
  return k;
}

double SpectralTensor::trace(std::size_t index) const {
  double t = 0.0;
  for (std::size_t a = 0; a < dim; ++a) t += values[a * dim + a][index];
  return t;
}

double SpectralTensor::reconstructed_energy() const {
  double cell = 1.0;
  for (double d : dk) cell *= d / kTwoPi;
  double s = 0.0;
  for (std::size_t i = 0; i < size(); ++i) s += trace(i);
  return s * cell;
}

namespace {

// In-place 2D DFT of an nx-by-ny array stored x-fastest.
void fft2(std::vector<cplx>& a, std::size_t nx, std::size_t ny) {
  const fft::Plan px(nx);
  std::vector<cplx> line(std::max(nx, ny));
  for (std::size_t j = 0; j < ny; ++j) px.forward(std::span<cplx>(a.data() + j * nx, nx));
  if (ny == 1) return;
  const fft::Plan py(ny);
  std::span<cplx> col(line.data(), ny);
  for (std::size_t i = 0; i < nx; ++i) {
    for (std::size_t j = 0; j < ny; ++j) col[j] = a[j * nx + i];
    py.forward(col);
    for (std::size_t j = 0; j < ny; ++j) a[j * nx + i] = col[j];
  }
}

void ifft2(std::vector<cplx>& a, std::size_t nx, std::size_t ny) {
  for (auto& v : a) v = std::conj(v);
  fft2(a, nx, ny);
  const double scale = 1.0 / static_cast<double>(nx * ny);
  for (auto& v : a) v = std::conj(v) * scale;
}

}  // namespace

SpectralTensor mean_spectral_tensor(const RealField& field) {
  const FieldGrid& g = field.grid;
  if (!g.periodic) throw DomainError("the spectral tensor needs a periodic field");
  const std::size_t dim = static_cast<std::size_t>(g.dims());
  if (field.components != dim)
    throw ShapeError("component count must equal the spatial dimension");
  SpectralTensor t;
  t.dim = dim;
  t.n = dim == 1 ? std::vector<std::size_t>{g.nx} : std::vector<std::size_t>{g.nx, g.ny};
  t.dk = dim == 1 ? std::vector<double>{kTwoPi / g.length_x()}
                  : std::vector<double>{kTwoPi / g.length_x(), kTwoPi / g.length_y()};
  std::vector<std::vector<cplx>> hats(dim);
  for (std::size_t c = 0; c < dim; ++c) {
    const auto v = field.component(c);
    hats[c].assign(v.begin(), v.end());
    fft2(hats[c], g.nx, g.ny);
  }
  const double area = g.cell_area() * static_cast<double>(g.size());
  const double scale = g.cell_area() * g.cell_area() / area;
  t.values.assign(dim * dim, std::vector<double>(g.size(), 0.0));
  for (std::size_t a = 0; a < dim; ++a)
    for (std::size_t b = 0; b < dim; ++b)
      for (std::size_t i = 0; i < g.size(); ++i)
        t.values[a * dim + b][i] = scale * (hats[a][i] * std::conj(hats[b][i])).real();
  return t;
}

IsotropicSpectrum isotropic_spectrum(const SpectralTensor& t) {
  if (t.dim < 1 || t.dim > 3) throw DomainError("dimension must be 1, 2 or 3");
  if (t.n.size() != t.dim || t.dk.size() != t.dim || t.values.size() != t.dim * t.dim)
    throw ShapeError("spectral tensor layout does not match its dimension");
  for (const auto& v : t.values)
    if (v.size() != t.size()) throw ShapeError("spectral tensor component has the wrong length");
  const std::size_t d = t.dim;
  IsotropicSpectrum out;
  out.dim = d;
  out.shell_width = *std::min_element(t.dk.begin(), t.dk.end());
  double cell = 1.0;
  for (double v : t.dk) cell *= v;

  std::vector<std::size_t> bin(t.size());
  std::size_t nbins = 0;
  double min_trace = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const auto k = t.wavevector(i);
    double kk = 0.0;
    for (double c : k) kk += c * c;
    bin[i] = static_cast<std::size_t>(std::lround(std::sqrt(kk) / out.shell_width));
    nbins = std::max(nbins, bin[i] + 1);
    min_trace = std::min(min_trace, t.trace(i));
  }
  std::vector<double> sum(nbins, 0.0);
  std::vector<std::size_t> count(nbins, 0);
  for (std::size_t i = 0; i < t.size(); ++i) {
    sum[bin[i]] += t.trace(i);
    ++count[bin[i]];
  }
  const double norm = d == 3 ? 2.0 : std::pow(kTwoPi, static_cast<double>(d));
  out.k.resize(nbins);
  out.energy.resize(nbins);
  for (std::size_t b = 0; b < nbins; ++b) {
    out.k[b] = static_cast<double>(b) * out.shell_width;
    out.energy[b] = sum[b] * cell / (norm * out.shell_width);
    out.integral += out.energy[b] * out.shell_width;
  }
  out.mean_energy = t.reconstructed_energy();
  double scale = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i)
    for (std::size_t c = 0; c < d * d; ++c) scale = std::max(scale, std::abs(t.values[c][i]));
  if (min_trace < -1e-12 * std::max(1.0, scale))
    out.warnings.push_back("negative spectral trace " + fmt(min_trace));

  // Deviation from the shell-averaged isotropic form.
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const auto k = t.wavevector(i);
    double kk = 0.0;
    for (double c : k) kk += c * c;
    const double mean_trace = sum[bin[i]] / static_cast<double>(count[bin[i]]);
    for (std::size_t a = 0; a < d; ++a) {
      for (std::size_t b = 0; b < d; ++b) {
        double model;
        if (d == 1) {
          model = mean_trace;
        } else if (kk == 0.0) {
          model = a == b ? mean_trace / static_cast<double>(d) : 0.0;
        } else {
          const double proj = (a == b ? 1.0 : 0.0) - k[a] * k[b] / kk;
          model = mean_trace / static_cast<double>(d - 1) * proj;
        }
        const double v = t.values[a * d + b][i];
        num += (v - model) * (v - model);
        den += v * v;
      }
    }
  }
  out.isotropy_residual = den > 0.0 ? std::sqrt(num / den) : 0.0;
  return out;
}

// ---------------------------------------------------------------------------
// Trace-free decomposition

RealField velocity_gradient(const RealField& u, bool spectral) {
  const FieldGrid& g = u.grid;
  if (g.dims() != 2 || u.components != 2)
    throw ShapeError("velocity gradient needs a 2-component plane field");
  RealField grad(g, 4);
  if (spectral && g.periodic) {
    const auto kx = fft::wavenumbers(g.nx, g.length_x());
    const auto ky = fft::wavenumbers(g.ny, g.length_y());
    for (std::size_t c = 0; c < 2; ++c) {
      const auto v = u.component(c);
      std::vector<cplx> hat(v.begin(), v.end());
      fft2(hat, g.nx, g.ny);
      for (int axis = 0; axis < 2; ++axis) {
        std::vector<cplx> h = hat;
        for (std::size_t j = 0; j < g.ny; ++j) {
          for (std::size_t i = 0; i < g.nx; ++i) {
            double k = axis == 0 ? kx[i] : ky[j];
            if (axis == 0 && g.nx % 2 == 0 && i == g.nx / 2) k = 0.0;
            if (axis == 1 && g.ny % 2 == 0 && j == g.ny / 2) k = 0.0;
            h[g.index(i, j)] *= cplx(0.0, k);
          }
        }
        ifft2(h, g.nx, g.ny);
        // layout: d1u1, d2u1, d1u2, d2u2
        const std::size_t slot = c * 2 + static_cast<std::size_t>(axis);
        for (std::size_t i = 0; i < g.size(); ++i) grad.at(i, slot) = h[i].real();
      }
    }
    return grad;
  }
  const RealField dx = finite_difference(u, 0);
  const RealField dy = finite_difference(u, 1);
  for (std::size_t i = 0; i < g.size(); ++i) {
    grad.at(i, 0) = dx.at(i, 0);
    grad.at(i, 1) = dy.at(i, 0);
    grad.at(i, 2) = dx.at(i, 1);
    grad.at(i, 3) = dy.at(i, 1);
  }
  return grad;
}

namespace {

struct Sym {
  double a11, a12, a22;
};

double frob(const Sym& a, const Sym& b) {
  return a.a11 * b.a11 + 2.0 * a.a12 * b.a12 + a.a22 * b.a22;
}

}  // namespace

TraceFreeDecomposition tracefree_decompose(const RealField& s, const RealField& gradient,
                                           const DecomposeOptions& o) {
  require_same_grid(s.grid, gradient.grid, "trace-free decomposition");
  if (s.components != 3) throw ShapeError("S needs components 11, 12, 22");
  if (gradient.components != 4) throw ShapeError("gradient needs components d1u1, d2u1, d1u2, d2u2");
  if (!(o.eps_basis >= 0.0)) throw DomainError("eps_basis must be nonnegative");
  const std::size_t n = s.grid.size();
  TraceFreeDecomposition out;
  double smax = 0.0, gmax = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    out.max_trace = std::max(out.max_trace, std::abs(s.at(i, 0) + s.at(i, 2)));
    out.max_divergence =
        std::max(out.max_divergence, std::abs(gradient.at(i, 0) + gradient.at(i, 3)));
    for (std::size_t c = 0; c < 3; ++c) smax = std::max(smax, std::abs(s.at(i, c)));
    for (std::size_t c = 0; c < 4; ++c) gmax = std::max(gmax, std::abs(gradient.at(i, c)));
  }
  if (out.max_trace > o.trace_tol * std::max(1.0, smax))
    throw ValidationError("S is not trace-free: max |S11 + S22| = " + fmt(out.max_trace));
  if (out.max_divergence > o.divergence_tol * std::max(1.0, gmax))
    throw ValidationError("velocity is not divergence-free: max |div u| = " +
                          fmt(out.max_divergence));

  out.nu = MaskedField{RealField(s.grid, 1), std::vector<std::uint8_t>(n, 0)};
  out.delta = MaskedField{RealField(s.grid, 1), std::vector<std::uint8_t>(n, 0)};
  out.residual = RealField(s.grid, 3);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < n; ++i) {
    const double g11 = gradient.at(i, 0), g12 = gradient.at(i, 1);  // d1u1, d2u1
    const double g21 = gradient.at(i, 2), g22 = gradient.at(i, 3);  // d1u2, d2u2
    const Sym b{2.0 * g11, g12 + g21, 2.0 * g22};
    const double shear = g12 + g21;
    const Sym phi{0.5 * shear, g22, -0.5 * shear};
    const Sym sv{s.at(i, 0), s.at(i, 1), s.at(i, 2)};
    const double bb = frob(b, b), pp = frob(phi, phi);
    double nu = 0.0, delta = 0.0;
    if (bb >= o.eps_basis && bb > 0.0) {
      nu = frob(sv, b) / bb;
      out.nu.mask[i] = 1;
      out.nu.field.at(i) = nu;
    } else {
      out.nu.field.at(i) = nan;
    }
    if (pp >= o.eps_basis && pp > 0.0) {
      delta = frob(sv, phi) / pp;
      out.delta.mask[i] = 1;
      out.delta.field.at(i) = delta;
    } else {
      out.delta.field.at(i) = nan;
    }
    out.residual.at(i, 0) = sv.a11 - nu * b.a11 - delta * phi.a11;
    out.residual.at(i, 1) = sv.a12 - nu * b.a12 - delta * phi.a12;
    out.residual.at(i, 2) = sv.a22 - nu * b.a22 - delta * phi.a22;
    for (std::size_t c = 0; c < 3; ++c)
      out.max_residual = std::max(out.max_residual, std::abs(out.residual.at(i, c)));
  }
  return out;
}

TraceFreeDecomposition tracefree_decompose_velocity(const RealField& s, const RealField& u,
                                                    const DecomposeOptions& options) {
  return tracefree_decompose(s, velocity_gradient(u, true), options);
}

TraceSplit split_trace(const RealField& r) {
  if (r.components != 3) throw ShapeError("R needs components 11, 12, 22");
  TraceSplit out{RealField(r.grid, 1), RealField(r.grid, 3), 0.0};
  double min_eig = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < r.grid.size(); ++i) {
    const double t = 0.5 * (r.at(i, 0) + r.at(i, 2));
    out.trace.at(i) = t;
    out.tracefree.at(i, 0) = r.at(i, 0) - t;
    out.tracefree.at(i, 1) = r.at(i, 1);
    out.tracefree.at(i, 2) = r.at(i, 2) - t;
    const double half = 0.5 * (r.at(i, 0) - r.at(i, 2));
    min_eig = std::min(min_eig, t - std::hypot(half, r.at(i, 1)));
  }
  out.min_eigenvalue = r.grid.size() ? min_eig : 0.0;
  return out;
}

// ---------------------------------------------------------------------------
// Strong-convergence diagnostic

DiagnosticsReport prop1_report(const std::vector<Trajectory>& members, const Trajectory& limit,
                               const std::optional<RealField>& nu, const Prop1Options& o) {
  if (members.empty()) throw ValidationError("prop1 needs at least one member run");
  const Trajectory* fine = &members.front();
  for (const auto& m : members)
    if (m.epsilon < fine->epsilon) fine = &m;
  require_same_grid(fine->grid.field_grid(), limit.grid.field_grid(), "prop1");
  if (nu) require_same_grid(nu->grid, limit.grid.field_grid(), "prop1 viscosity");
  if (!(o.tol > 0.0)) throw DomainError("tolerance must be positive");

  std::vector<std::size_t> frames;
  for (std::size_t i = 0; i < fine->times.size(); ++i) {
    if (o.t_horizon > 0.0 && fine->times[i] > fine->times.front() + o.t_horizon + 1e-12) break;
    if (i >= limit.times.size() || std::abs(fine->times[i] - limit.times[i]) > 1e-9 * (1.0 + std::abs(fine->times[i])))
      throw ShapeError("member and limit do not share output times");
    frames.push_back(i);
  }
  if (frames.empty()) throw ValidationError("no frames inside the time horizon");

  const Grid1D& grid = limit.grid;
  const double dx = grid.dx();
  const double window = o.mollifier > 0.0 ? o.mollifier : grid.length / 8.0;
  std::vector<double> gap(frames.size()), energy(frames.size()), dissip(frames.size()),
      defect(frames.size());
  double sup_nu = 0.0;
  if (nu)
    for (double v : nu->data) sup_nu = std::max(sup_nu, std::abs(v));
  for (std::size_t f = 0; f < frames.size(); ++f) {
    const auto& un = fine->frames[frames[f]];
    const auto& u = limit.frames[frames[f]];
    RealField sq(grid.field_grid(), 1);
    double en = 0.0, el = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      sq.at(i) = std::norm(un[i] - u[i]);
      en += std::norm(un[i]);
      el += std::norm(u[i]);
    }
    double g = 0.0;
    for (double v : sq.data) g += v;
    gap[f] = g * dx;
    energy[f] = std::abs(en - el) * dx;
    const RealField moll = moving_average(sq, window, AverageKernel::hann);
    double mean = 0.0;
    for (double v : moll.data) mean += v;
    defect[f] = mean / static_cast<double>(moll.data.size());
    if (nu) {
      const auto ux = spectral_derivative(u, grid.length);
      double s = 0.0;
      for (std::size_t i = 0; i < u.size(); ++i) s += nu->at(i) * std::norm(ux[i]);
      dissip[f] = s * dx;
    }
  }
  auto time_integral = [&](const std::vector<double>& v) {
    double s = 0.0;
    for (std::size_t f = 1; f < frames.size(); ++f)
      s += 0.5 * (v[f] + v[f - 1]) * (fine->times[frames[f]] - fine->times[frames[f - 1]]);
    return s;
  };
  auto time_average = [&](const std::vector<double>& v) {
    if (frames.size() == 1) return v.front();
    const double span = fine->times[frames.back()] - fine->times[frames.front()];
    return time_integral(v) / span;
  };

  DiagnosticsReport r;
  r.kind = "prop1";
  r.tolerance = o.tol;
  r.values["gap"] = time_average(gap);
  r.values["energy_gap"] = time_average(energy);
  r.values["initial_gap"] = gap.front();
  r.values["sup_nu"] = sup_nu;
  r.values["dissipation"] = time_integral(dissip);
  r.values["defect_trace"] = time_average(defect);
  r.values["epsilon"] = fine->epsilon;
  r.values["t_horizon"] = fine->times[frames.back()] - fine->times[frames.front()];
  r.values["mollifier"] = window;
  if (gap.front() > o.tol)
    r.warnings.push_back("initial data do not converge strongly: gap at t0 = " + fmt(gap.front()));
  const bool strong = r.values["gap"] <= o.tol;
  const bool lossless = std::abs(r.values["dissipation"]) <= o.tol;
  r.labels["convergence"] = strong ? "strong" : "weak";
  r.labels["dissipation"] = lossless ? "none" : "positive";
  r.labels["verdict"] = strong == lossless ? "consistent" : "inconsistent";
  if (strong != lossless)
    r.fail(strong ? "strong convergence with nonzero dissipation integral"
                  : "convergence gap without matching dissipation");
  return r;
}

// ---------------------------------------------------------------------------
// Output

void write_wigner_csv(std::ostream& out, const WignerTensor& w, bool full_precision) {
  const auto p = full_precision ? csv::Precision::full : csv::Precision::table;
  std::vector<std::string> header = {w.mode == WignerMode::space ? "x" : "t",
                                     w.mode == WignerMode::space ? "k" : "tau"};
  for (const auto& n : w.component_names) header.push_back("r" + n);
  csv::write_row(out, header);
  std::vector<std::string> row(header.size());
  const std::size_t nd = w.dual.size();
  for (std::size_t ib = 0; ib < w.base.size(); ++ib) {
    for (std::size_t id = 0; id < nd; ++id) {
      row[0] = csv::format(w.base[ib], p);
      row[1] = csv::format(w.dual[id], p);
      for (std::size_t c = 0; c < w.components(); ++c)
        row[2 + c] = csv::format(w.values[c][ib * nd + id], p);
      csv::write_row(out, row);
    }
  }
}

nlohmann::ordered_json wigner_manifest(const WignerTensor& w) {
  nlohmann::ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["mode"] = w.mode == WignerMode::space ? "space" : "time";
  j["dim"] = w.dim;
  auto cols = nlohmann::ordered_json::array();
  for (const auto& n : w.component_names) cols.push_back("r" + n);
  j["components"] = cols;
  j["component_order"] = "upper triangle, row-major";
  j["base_points"] = w.base.size();
  j["dual_points"] = w.dual.size();
  j["dual_spacing"] = w.dual_spacing;
  j["window"] = w.window;
  return j;
}

}  // namespace dlab
