#include "dlab/semiclassical.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "dlab/errors.hpp"
#include "dlab/fft.hpp"
#include "dlab/report.hpp"
#include "json.hpp"

namespace dlab {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

constexpr double kPeriodicTol = 1e-10;

void require_periodic(const std::vector<cplx>& u) {
  if (std::abs(u.front() - u.back()) > kPeriodicTol)
    throw DomainError("initial data is not periodic-compatible: |u(0) - u(L)| = " +
                      fmt(std::abs(u.front() - u.back())));
}

double max_abs(const std::vector<cplx>& u) {
  double m = 0.0;
  for (const auto& v : u) m = std::max(m, std::abs(v));
  return m;
}

bool finite(const std::vector<cplx>& u) {
  return std::all_of(u.begin(), u.end(),
                     [](const cplx& v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); });
}

struct StepPlan {
  std::size_t steps;
  double dt;
};

StepPlan plan_steps(const SolverOptions& o) {
  if (!(o.dt != 0.0) || !std::isfinite(o.dt)) throw DomainError("dt must be nonzero and finite");
  if (!std::isfinite(o.t_final) || o.t_final == 0.0)
    throw DomainError("t_final must be nonzero and finite");
  if ((o.dt > 0) != (o.t_final > 0)) throw DomainError("dt and t_final must have the same sign");
  const double ratio = o.t_final / o.dt;
  const auto n = static_cast<std::size_t>(std::ceil(ratio - 1e-9));
  return {std::max<std::size_t>(n, 1), o.t_final / static_cast<double>(std::max<std::size_t>(n, 1))};
}

bool snapshot_due(std::size_t step, std::size_t total, std::size_t every) {
  if (step == total) return true;
  return every > 0 && step % every == 0;
}

double relative_drift(const std::vector<ConservedSample>& log, double ConservedSample::*field) {
  if (log.empty()) return 0.0;
  const double q0 = log.front().*field;
  const double scale = std::max(std::abs(q0), 1e-300);
  double worst = 0.0;
  for (const auto& s : log) worst = std::max(worst, std::abs(s.*field - q0) / scale);
  return worst;
}

}  // namespace

Grid1D::Grid1D(double length_, std::size_t points_)
    : length(length_), points(points_), origin(-0.5 * length_) {}

Grid1D::Grid1D(double length_, std::size_t points_, double origin_)
    : length(length_), points(points_), origin(origin_) {}

void Grid1D::validate() const {
  if (points < 16 || !fft::is_power_of_two(points))
    throw DomainError("grid size must be a power of two >= 16, got " + std::to_string(points));
  if (!(length > 0.0) || !std::isfinite(length)) throw DomainError("grid length must be positive");
}

std::vector<double> Grid1D::abscissae() const {
  std::vector<double> xs(points);
  for (std::size_t i = 0; i < points; ++i) xs[i] = x(i);
  return xs;
}

RealField Trajectory::real_frame(std::size_t i) const {
  RealField f(grid.field_grid(), 1);
  for (std::size_t k = 0; k < grid.points; ++k) f.at(k) = frames.at(i)[k].real();
  return f;
}

ComplexField Trajectory::complex_frame(std::size_t i) const {
  return ComplexField{grid.field_grid(), frames.at(i)};
}

double Trajectory::mass_drift() const { return relative_drift(conserved_log, &ConservedSample::mass); }
double Trajectory::second_drift() const {
  return relative_drift(conserved_log, &ConservedSample::second);
}

double kdv_stable_dt(const std::vector<double>& u0, const Grid1D& grid, double c) {
  double m = 0.0;
  for (double v : u0) m = std::max(m, std::abs(v));
  if (m == 0.0) return std::numeric_limits<double>::infinity();
  return c * grid.dx() / m;
}

double nls_max_dt(const Grid1D& grid, double epsilon) {
  return grid.dx() * grid.dx() / (std::numbers::pi * epsilon);
}

double kdv_mass(const std::vector<cplx>& u, const Grid1D& grid) {
  double s = 0.0;
  for (const auto& v : u) s += v.real();
  return s * grid.dx();
}

double kdv_l2(const std::vector<cplx>& u, const Grid1D& grid) {
  double s = 0.0;
  for (const auto& v : u) s += v.real() * v.real();
  return s * grid.dx();
}

double nls_mass(const std::vector<cplx>& u, const Grid1D& grid) {
  double s = 0.0;
  for (const auto& v : u) s += std::norm(v);
  return s * grid.dx();
}

std::vector<cplx> spectral_derivative(const std::vector<cplx>& u, double length) {
  const std::size_t n = u.size();
  const auto k = fft::wavenumbers(n, length);
  auto h = fft::forward(u);
  for (std::size_t j = 0; j < n; ++j) h[j] *= cplx(0.0, k[j]);
  if (n % 2 == 0) h[n / 2] = 0.0;  // Nyquist mode has no odd derivative
  return fft::inverse(std::move(h));
}

double nls_energy(const std::vector<cplx>& u, double epsilon, const Grid1D& grid) {
  const auto ux = spectral_derivative(u, grid.length);
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double d = 1.0 - std::norm(u[i]);
    s += 0.5 * epsilon * epsilon * std::norm(ux[i]) + 0.5 * d * d;
  }
  return s * grid.dx();
}

namespace {

void enforce(const Trajectory& t, const SolverOptions& o) {
  if (!o.enforce_conservation) return;
  const double first_bound = t.kind == FlowKind::kdv ? kKdvDriftBound : kNlsMassDriftBound;
  const double second_bound = t.kind == FlowKind::kdv ? kKdvDriftBound : kNlsEnergyDriftBound;
  const double m = t.mass_drift(), s = t.second_drift();
  if (m > first_bound)
    throw AccuracyError("mass drift " + fmt(m) + " exceeds " + fmt(first_bound), m, first_bound);
  if (s > second_bound)
    throw AccuracyError((t.kind == FlowKind::kdv ? "L2 drift " : "energy drift ") + fmt(s) +
                            " exceeds " + fmt(second_bound),
                        s, second_bound);
}

Trajectory run_kdv(std::vector<cplx> u, double t0, double epsilon, const Grid1D& grid,
                   const SolverOptions& o) {
  grid.validate();
  if (!(epsilon > 0.0)) throw DomainError("epsilon must be positive");
  if (u.size() != grid.points) throw ShapeError("initial data length does not match the grid");
  const StepPlan plan = plan_steps(o);
  std::vector<double> re(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) re[i] = u[i].real();
  const double limit = kdv_stable_dt(re, grid, o.stability_c);
  if (std::abs(plan.dt) > limit * (1.0 + 1e-12))
    throw DomainError("dt = " + fmt(plan.dt) + " violates the stability rule |dt| <= " +
                      fmt(limit));

  const std::size_t n = grid.points;
  const double dt = plan.dt;
  const auto k = fft::wavenumbers(n, grid.length);
  const double kmax = std::numbers::pi / grid.dx();
  std::vector<cplx> e_half(n), e_full(n), nl_factor(n);
  std::vector<double> mask(n, 1.0);
  for (std::size_t j = 0; j < n; ++j) {
    // u_hat_t = i eps^2 k^3 u_hat + 3 i k F[u^2]
    const double lin = epsilon * epsilon * k[j] * k[j] * k[j];
    e_half[j] = std::exp(cplx(0.0, lin * dt / 2.0));
    e_full[j] = e_half[j] * e_half[j];
    if (o.dealias && std::abs(k[j]) > 2.0 / 3.0 * kmax) mask[j] = 0.0;
    nl_factor[j] = cplx(0.0, 3.0 * k[j]) * mask[j];
  }
  if (n % 2 == 0) nl_factor[n / 2] = 0.0;

  const fft::Plan fplan(n);
  std::vector<cplx> work(n);
  auto nonlinear = [&](const std::vector<cplx>& vh, std::vector<cplx>& out) {
    for (std::size_t j = 0; j < n; ++j) work[j] = vh[j] * mask[j];
    fplan.inverse(work);
    for (auto& w : work) w = cplx(w.real() * w.real(), 0.0);
    fplan.forward(work);
    for (std::size_t j = 0; j < n; ++j) out[j] = nl_factor[j] * work[j];
  };

  Trajectory traj;
  traj.kind = FlowKind::kdv;
  traj.grid = grid;
  traj.epsilon = epsilon;
  traj.dt = dt;
  auto record = [&](double t, const std::vector<cplx>& frame) {
    traj.times.push_back(t);
    traj.frames.push_back(frame);
    traj.conserved_log.push_back({t, kdv_mass(frame, grid), kdv_l2(frame, grid)});
  };
  for (auto& v : u) v = cplx(v.real(), 0.0);
  record(t0, u);

  std::vector<cplx> v = u;
  fplan.forward(v);
  std::vector<cplx> a(n), b(n), c(n), d(n), tmp(n), phys(n);
  std::vector<cplx> last_good = u;
  double last_time = t0;
  for (std::size_t step = 1; step <= plan.steps; ++step) {
    nonlinear(v, a);
    for (std::size_t j = 0; j < n; ++j) tmp[j] = e_half[j] * (v[j] + 0.5 * dt * a[j]);
    nonlinear(tmp, b);
    for (std::size_t j = 0; j < n; ++j) tmp[j] = e_half[j] * v[j] + 0.5 * dt * b[j];
    nonlinear(tmp, c);
    for (std::size_t j = 0; j < n; ++j) tmp[j] = e_full[j] * v[j] + dt * e_half[j] * c[j];
    nonlinear(tmp, d);
    for (std::size_t j = 0; j < n; ++j)
      v[j] = e_full[j] * v[j] + dt / 6.0 * (e_full[j] * a[j] + 2.0 * e_half[j] * (b[j] + c[j]) + d[j]);

    const double t = t0 + dt * static_cast<double>(step);
    const bool snap = snapshot_due(step, plan.steps, o.snap_every);
    const bool check = snap || step % 16 == 0;
    if (!check) continue;
    phys = v;
    fplan.inverse(phys);
    for (auto& p : phys) p = cplx(p.real(), 0.0);
    if (!finite(phys) || max_abs(phys) > o.blowup)
      throw InstabilityError("KdV solution blew up near t = " + fmt(t), last_time, last_good);
    last_good = phys;
    last_time = t;
    if (snap) record(t, phys);
  }
  enforce(traj, o);
  return traj;
}

Trajectory run_nls(std::vector<cplx> u, double t0, double epsilon, const Grid1D& grid,
                   const SolverOptions& o) {
  grid.validate();
  if (!(epsilon > 0.0)) throw DomainError("epsilon must be positive");
  if (u.size() != grid.points) throw ShapeError("initial data length does not match the grid");
  const StepPlan plan = plan_steps(o);
  const double guard = nls_max_dt(grid, epsilon);
  if (std::abs(plan.dt) > guard * (1.0 + 1e-12))
    throw DomainError("dt = " + fmt(plan.dt) + " exceeds the phase-accuracy guard dx^2/(pi eps) = " +
                      fmt(guard));

  const std::size_t n = grid.points;
  const double dt = plan.dt;
  const auto k = fft::wavenumbers(n, grid.length);
  std::vector<cplx> half(n);
  for (std::size_t j = 0; j < n; ++j) half[j] = std::exp(cplx(0.0, -epsilon * k[j] * k[j] * dt / 4.0));
  const fft::Plan fplan(n);

  Trajectory traj;
  traj.kind = FlowKind::nls;
  traj.grid = grid;
  traj.epsilon = epsilon;
  traj.dt = dt;
  auto record = [&](double t, const std::vector<cplx>& frame) {
    traj.times.push_back(t);
    traj.frames.push_back(frame);
    traj.conserved_log.push_back({t, nls_mass(frame, grid), nls_energy(frame, epsilon, grid)});
  };
  record(t0, u);

  auto linear_half = [&](std::vector<cplx>& w) {
    fplan.forward(w);
    for (std::size_t j = 0; j < n; ++j) w[j] *= half[j];
    fplan.inverse(w);
  };
  std::vector<cplx> last_good = u;
  double last_time = t0;
  for (std::size_t step = 1; step <= plan.steps; ++step) {
    linear_half(u);
    for (auto& w : u) w *= std::exp(cplx(0.0, (1.0 - std::norm(w)) * dt / epsilon));
    linear_half(u);
    const double t = t0 + dt * static_cast<double>(step);
    const bool snap = snapshot_due(step, plan.steps, o.snap_every);
    if (!snap && step % 16 != 0) continue;
    if (!finite(u) || max_abs(u) > o.blowup)
      throw InstabilityError("NLS solution blew up near t = " + fmt(t), last_time, last_good);
    last_good = u;
    last_time = t;
    if (snap) record(t, u);
  }
  enforce(traj, o);
  return traj;
}

}  // namespace

Trajectory solve_kdv(const std::vector<double>& u0, double epsilon, const Grid1D& grid,
                     const SolverOptions& options) {
  std::vector<cplx> u(u0.begin(), u0.end());
  if (u.empty()) throw ShapeError("empty initial data");
  require_periodic(u);
  return run_kdv(std::move(u), 0.0, epsilon, grid, options);
}

Trajectory solve_nls(const std::vector<double>& amplitude, const std::vector<double>& phase,
                     double epsilon, const Grid1D& grid, const SolverOptions& options) {
  if (amplitude.size() != phase.size()) throw ShapeError("amplitude and phase lengths differ");
  if (!(epsilon > 0.0)) throw DomainError("epsilon must be positive");
  std::vector<cplx> u(amplitude.size());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = std::polar(amplitude[i], phase[i] / epsilon);
  return solve_nls(u, epsilon, grid, options);
}

Trajectory solve_nls(const std::vector<cplx>& u0, double epsilon, const Grid1D& grid,
                     const SolverOptions& options) {
  if (u0.empty()) throw ShapeError("empty initial data");
  require_periodic(u0);
  return run_nls(u0, 0.0, epsilon, grid, options);
}

Trajectory continue_run(const Trajectory& run, const SolverOptions& options) {
  if (run.frames.empty()) throw DataError("trajectory has no frames");
  const double t0 = run.times.back();
  Trajectory next = run.kind == FlowKind::kdv
                        ? run_kdv(run.frames.back(), t0, run.epsilon, run.grid, options)
                        : run_nls(run.frames.back(), t0, run.epsilon, run.grid, options);
  return next;
}

MadelungFields madelung(const std::vector<cplx>& frame, double epsilon, const Grid1D& grid) {
  grid.validate();
  if (frame.size() != grid.points) throw ShapeError("frame length does not match the grid");
  const auto ux = spectral_derivative(frame, grid.length);
  MadelungFields m{RealField(grid.field_grid(), 1), RealField(grid.field_grid(), 1)};
  for (std::size_t i = 0; i < frame.size(); ++i) {
    m.rho.at(i) = std::norm(frame[i]);
    m.mu.at(i) = epsilon * (std::conj(frame[i]) * ux[i]).imag();
  }
  return m;
}

namespace {

void check_ensemble(const std::vector<Trajectory>& runs, std::size_t frame) {
  if (runs.size() < 2) throw ValidationError("weak limits need at least two runs");
  for (const auto& r : runs) {
    if (r.kind != runs.front().kind) throw ValidationError("runs mix KdV and NLS flows");
    require_same_grid(r.grid.field_grid(), runs.front().grid.field_grid(), "ensemble");
    if (frame >= r.frames.size()) throw ShapeError("frame index beyond a run's output");
    if (std::abs(r.times[frame] - runs.front().times[frame]) > 1e-9 * (1.0 + std::abs(r.times[frame])))
      throw ShapeError("runs do not share output times");
  }
}

std::vector<std::size_t> order_by_epsilon(const std::vector<Trajectory>& runs) {
  std::vector<std::size_t> idx(runs.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return runs[a].epsilon < runs[b].epsilon; });
  return idx;
}

RealField mollify(const RealField& f, double width) {
  return moving_average(f, width, AverageKernel::hann);
}

double indicator(const RealField& fine, const RealField& coarse) {
  double diff = 0.0, scale = 1.0;
  for (std::size_t i = 0; i < fine.data.size(); ++i) {
    diff = std::max(diff, std::abs(fine.data[i] - coarse.data[i]));
    scale = std::max(scale, std::abs(fine.data[i]));
  }
  return diff / scale;
}

}  // namespace

WeakLimits ensemble_weak_limits(const std::vector<Trajectory>& runs, double mollifier,
                                std::size_t frame) {
  check_ensemble(runs, frame);
  if (!(mollifier > 0.0)) throw DomainError("mollifier width must be positive");
  const auto order = order_by_epsilon(runs);
  const Trajectory& fine = runs[order[0]];
  const Trajectory& next = runs[order[1]];
  WeakLimits w;
  w.kind = fine.kind;
  w.epsilon = fine.epsilon;
  w.mollifier = mollifier;
  if (fine.kind == FlowKind::kdv) {
    auto fields = [&](const Trajectory& r, RealField& ubar, RealField* u2bar) {
      RealField u = r.real_frame(frame);
      ubar = mollify(u, mollifier);
      if (u2bar) {
        RealField sq = u;
        for (auto& v : sq.data) v *= v;
        *u2bar = mollify(sq, mollifier);
      }
    };
    fields(fine, w.ubar, &w.u2bar);
    RealField coarse;
    fields(next, coarse, nullptr);
    w.convergence_indicator = indicator(w.ubar, coarse);
  } else {
    auto rho_of = [&](const Trajectory& r) {
      return madelung(r.frames[frame], r.epsilon, r.grid);
    };
    const auto m = rho_of(fine);
    RealField q = m.rho;
    for (std::size_t i = 0; i < q.data.size(); ++i) {
      const double rho = m.rho.data[i], mu = m.mu.data[i];
      q.data[i] = (rho > 0.0 ? mu * mu / rho : 0.0) + 0.5 * rho * rho;
    }
    w.rhobar = mollify(m.rho, mollifier);
    w.mubar = mollify(m.mu, mollifier);
    w.qbar = mollify(q, mollifier);
    const auto coarse = mollify(rho_of(next).rho, mollifier);
    w.convergence_indicator = indicator(w.rhobar, coarse);
  }
  return w;
}

RealField defect_tensor(const RealField& member, const RealField& limit, double mollifier) {
  require_same_grid(member.grid, limit.grid, "defect tensor");
  if (member.components != limit.components)
    throw ShapeError("member and limit have different component counts");
  if (!(mollifier > 0.0)) throw DomainError("mollifier width must be positive");
  const std::size_t n = member.grid.size();
  if (member.components == 1) {
    RealField sq(member.grid, 1);
    for (std::size_t i = 0; i < n; ++i) {
      const double d = member.at(i) - limit.at(i);
      sq.at(i) = d * d;
    }
    return mollify(sq, mollifier);
  }
  if (member.components != 2) throw ShapeError("defect tensor needs 1 or 2 components");
  RealField prod(member.grid, 3);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = member.at(i, 0) - limit.at(i, 0);
    const double b = member.at(i, 1) - limit.at(i, 1);
    prod.at(i, 0) = a * a;
    prod.at(i, 1) = a * b;
    prod.at(i, 2) = b * b;
  }
  return mollify(prod, mollifier);
}

RealField defect_tensor(const std::vector<Trajectory>& runs, const RealField& limit,
                        double mollifier, std::size_t frame) {
  check_ensemble(runs, frame);
  const auto order = order_by_epsilon(runs);
  const Trajectory& fine = runs[order[0]];
  if (fine.kind != FlowKind::kdv) throw ValidationError("defect tensor needs real (KdV) runs");
  return defect_tensor(fine.real_frame(frame), limit, mollifier);
}

namespace {

std::string frame_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "frame_%05zu.csv", i);
  return buf;
}

}  // namespace

void write_trajectory(const std::filesystem::path& dir, const Trajectory& run) {
  std::filesystem::create_directories(dir);
  nlohmann::ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = run.kind == FlowKind::kdv ? "kdv" : "nls";
  j["epsilon"] = run.epsilon;
  j["dt"] = run.dt;
  j["grid"] = {{"length", run.grid.length}, {"points", run.grid.points}, {"origin", run.grid.origin}};
  j["times"] = run.times;
  auto frames = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < run.frames.size(); ++i) {
    const auto name = frame_name(i);
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw DataError("cannot write " + (dir / name).string());
    if (run.kind == FlowKind::kdv)
      write_real_csv(out, run.real_frame(i), "value");
    else
      write_complex_csv(out, run.complex_frame(i));
    frames.push_back(name);
  }
  j["frames"] = frames;
  auto log = nlohmann::ordered_json::array();
  for (const auto& s : run.conserved_log)
    log.push_back({{"time", s.time}, {"mass", s.mass}, {"second", s.second}});
  j["conserved_log"] = log;
  std::ofstream out(dir / "manifest.json", std::ios::binary);
  if (!out) throw DataError("cannot write manifest in " + dir.string());
  out << j.dump(2) << '\n';
}

Trajectory read_trajectory(const std::filesystem::path& manifest) {
  std::ifstream in(manifest, std::ios::binary);
  if (!in) throw DataError("cannot open manifest " + manifest.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
    Trajectory t;
    const std::string kind = j.at("kind");
    if (kind != "kdv" && kind != "nls") throw DataError("unknown trajectory kind '" + kind + "'");
    t.kind = kind == "kdv" ? FlowKind::kdv : FlowKind::nls;
    t.epsilon = j.at("epsilon");
    t.dt = j.at("dt");
    const auto& g = j.at("grid");
    t.grid = Grid1D(g.at("length").get<double>(), g.at("points").get<std::size_t>(),
                    g.at("origin").get<double>());
    t.grid.validate();
    t.times = j.at("times").get<std::vector<double>>();
    const auto names = j.at("frames").get<std::vector<std::string>>();
    if (names.size() != t.times.size()) throw DataError("manifest lists unequal times and frames");
    const auto base = manifest.parent_path();
    for (const auto& name : names) {
      std::ifstream f(base / name, std::ios::binary);
      if (!f) throw DataError("cannot open frame " + (base / name).string());
      std::vector<cplx> frame;
      if (t.kind == FlowKind::kdv) {
        const auto r = read_real_csv(f, "value");
        frame.assign(r.data.begin(), r.data.end());
      } else {
        frame = read_complex_csv(f).values;
      }
      if (frame.size() != t.grid.points) throw DataError("frame " + name + " has the wrong length");
      t.frames.push_back(std::move(frame));
    }
    if (j.contains("conserved_log"))
      for (const auto& s : j.at("conserved_log"))
        t.conserved_log.push_back({s.at("time"), s.at("mass"), s.at("second")});
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed manifest " + manifest.string() + ": " + e.what());
  }
}

}  // namespace dlab
