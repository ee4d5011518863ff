#include "dlab/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <memory>
#include <optional>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "dlab/csv.hpp"
#include "dlab/errors.hpp"
#include "dlab/kdv_limit.hpp"
#include "dlab/nls_limit.hpp"
#include "dlab/profiles.hpp"
#include "dlab/quadrature.hpp"
#include "dlab/report.hpp"
#include "dlab/semiclassical.hpp"
#include "dlab/wigner.hpp"
#include "json.hpp"

namespace dlab::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Flags shared by every leaf command.
struct Common {
  double tol = 1e-10;
  std::string out = "-";
  std::string format = "auto";
  std::string precision = "table";
  std::string quad_scheme = "de";
  std::uint64_t seed = 0;
  std::string config;

  void attach(CLI::App* app) {
    app->add_option("--tol", tol, "relative quadrature / diagnostic tolerance")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app->add_option("--out", out, "output file ('-' for stdout; a directory for simulate)")
        ->capture_default_str();
    app->add_option("--format", format, "csv | json")
        ->check(CLI::IsMember({"auto", "csv", "json"}))
        ->capture_default_str();
    app->add_option("--precision", precision, "table (5 decimals) | full (round trip)")
        ->check(CLI::IsMember({"table", "full"}))
        ->capture_default_str();
    app->add_option("--quad-scheme", quad_scheme, "de (tanh-sinh) | subst (Gauss-Kronrod)")
        ->check(CLI::IsMember({"de", "subst"}))
        ->capture_default_str();
    app->add_option("--seed", seed, "seed for generated test data")->capture_default_str();
    app->add_option("--config", config, "key = value file; explicit flags win");
  }

  QuadOptions quad() const {
    QuadOptions q;
    q.rel_tol = tol;
    q.scheme = parse_quad_scheme(quad_scheme);
    return q;
  }
  csv::Precision prec() const { return csv::parse_precision(precision); }
  bool json_out(bool default_json) const {
    return format == "auto" ? default_json : format == "json";
  }
};

void emit(const Common& c, std::ostream& out, const std::string& text) {
  if (c.out.empty() || c.out == "-") {
    out << text;
    return;
  }
  std::ofstream f(c.out, std::ios::binary);
  if (!f) throw DataError("cannot write " + c.out);
  f << text;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::vector<double> linspace(double lo, double hi, int steps) {
  if (steps < 1) throw DomainError("steps must be at least 1");
  std::vector<double> v;
  for (int i = 0; i < steps; ++i)
    v.push_back(steps == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / (steps - 1));
  return v;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  return in;
}

std::vector<std::string> header_of(const std::string& path) {
  auto in = open_input(path);
  std::string line;
  std::getline(in, line);
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  std::vector<std::string> cols;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cols.push_back(trim(cell));
  return cols;
}

json table_json(const std::vector<PhiTable>& tables, const char* var, const char* val) {
  json j;
  j["schema_version"] = kSchemaVersion;
  auto arr = json::array();
  for (const auto& t : tables) {
    json e;
    e["beta"] = t.beta;
    auto rows = json::array();
    for (std::size_t i = 0; i < t.grid.size(); ++i)
      rows.push_back({{var, t.grid[i]}, {val, t.values[i]}, {"err", t.error_estimates[i]}});
    e["rows"] = rows;
    arr.push_back(e);
  }
  j["tables"] = arr;
  return j;
}

// Table cells in parallel, one task per beta.
template <class F>
std::vector<PhiTable> per_beta(const std::vector<double>& betas, F make) {
  std::vector<std::future<PhiTable>> jobs;
  for (double b : betas) jobs.push_back(std::async(std::launch::async, make, b));
  std::vector<PhiTable> out;
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

// ---------------------------------------------------------------------------

struct PhiArgs {
  Common c;
  std::optional<double> beta;
  std::string profile;
  double lo = 0.1, hi = 0.9;
  int steps = 9;
};

void run_phi_kdv(const PhiArgs& a, std::ostream& out) {
  std::unique_ptr<KdvProfile> owned;
  if (!a.profile.empty()) {
    auto in = open_input(a.profile);
    owned = read_kdv_profile_csv(in);
  } else {
    if (!a.beta) throw ValidationError("phi kdv needs --beta or --profile");
    owned = std::make_unique<KdvBetaWell>(*a.beta);
  }
  PhiTable t;
  t.beta = a.beta.value_or(0.0);
  for (double eta : linspace(a.lo, a.hi, a.steps)) {
    const auto r = phi_kdv(*owned, eta, a.c.quad());
    t.grid.push_back(eta);
    t.values.push_back(r.value);
    t.error_estimates.push_back(r.error_estimate);
  }
  std::ostringstream os;
  if (a.c.json_out(false)) {
    os << dump(table_json({t}, "eta", "phi"));
  } else {
    write_phi_csv(os, {t}, a.c.prec());
  }
  emit(a.c, out, os.str());
}

void run_phi_nls(const PhiArgs& a, std::ostream& out) {
  std::unique_ptr<NlsProfile> owned;
  if (!a.profile.empty()) {
    auto in = open_input(a.profile);
    owned = read_nls_profile_csv(in);
  } else {
    if (!a.beta) throw ValidationError("phi nls needs --beta or --profile");
    owned = std::make_unique<NlsBetaWell>(*a.beta);
  }
  std::ostringstream os;
  const auto lambdas = linspace(a.lo, a.hi, a.steps);
  std::vector<QuadResult> rs;
  for (double l : lambdas) rs.push_back(phi_nls(*owned, l, a.c.quad()));
  const double beta = a.beta.value_or(0.0);
  if (a.c.json_out(false)) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["beta"] = beta;
    auto rows = json::array();
    for (std::size_t i = 0; i < rs.size(); ++i)
      rows.push_back({{"lambda", lambdas[i]}, {"phi", rs[i].value}, {"err", rs[i].error_estimate}});
    j["rows"] = rows;
    os << dump(j);
  } else {
    const auto p = a.c.prec();
    csv::write_row(os, {"beta", "lambda", "phi", "err"});
    for (std::size_t i = 0; i < rs.size(); ++i) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.1e", rs[i].error_estimate);
      csv::write_row(os, {csv::format(beta, p), csv::format(lambdas[i], p),
                          csv::format(rs[i].value, p),
                          p == csv::Precision::table ? buf : csv::format(rs[i].error_estimate, p)});
    }
  }
  emit(a.c, out, os.str());
}

struct TableArgs {
  Common c;
  std::vector<double> betas;
};

void run_table(const TableArgs& a, bool kdv, std::ostream& out) {
  const auto q = a.c.quad();
  std::vector<PhiTable> tables;
  if (kdv) {
    const auto etas = table1_etas();
    tables = per_beta(a.betas, [&](double b) { return emit_table1(std::vector{b}, etas, q).front(); });
  } else {
    const auto lambdas = table2_lambdas();
    tables = per_beta(a.betas, [&](double b) { return emit_table2(std::vector{b}, lambdas, q).front(); });
  }
  std::ostringstream os;
  if (a.c.json_out(false))
    os << dump(kdv ? table_json(tables, "eta", "phi") : table_json(tables, "lambda", "g"));
  else
    write_phi_csv(os, tables, a.c.prec());
  emit(a.c, out, os.str());
}

struct SignArgs {
  Common c;
  double beta = 1.0;
  double h = 1e-4;
  std::vector<double> grid;
};

void write_sign_csv(std::ostream& os, const SignReport& r, csv::Precision p) {
  csv::write_row(os, {"at", "derivative", "sign"});
  for (const auto& w : r.witness_points)
    csv::write_row(os, {csv::format(w.at, p), csv::format(w.derivative, p), std::to_string(w.sign)});
}

void run_sign(const SignArgs& a, bool kdv, std::ostream& out) {
  QuadOptions q = derivative_quad_options(a.c.quad());
  SignReport r;
  if (kdv) {
    const KdvBetaWell well(a.beta);
    r = classify_kdv_sign(well, a.grid.empty() ? table1_etas() : a.grid, a.h, q);
  } else {
    const NlsBetaWell well(a.beta);
    r = check_flux_monotonicity(well, a.grid.empty() ? table2_lambdas() : a.grid, a.h, q);
  }
  std::ostringstream os;
  if (a.c.json_out(true))
    os << dump(to_json(r));
  else
    write_sign_csv(os, r, a.c.prec());
  emit(a.c, out, os.str());
}

struct LatticeArgs {
  Common c;
  double beta = 2.0;
  double epsilon = 0.01;
  double time = 50.0;
  std::optional<double> x_min, x_max, window;
  std::size_t samples = 0;
};

void run_lattice(const LatticeArgs& a, std::ostream& out) {
  const NlsBetaWell well(a.beta);
  const double lo = a.x_min.value_or(well.lambda_min() * a.time - 1.0);
  const double hi = a.x_max.value_or(a.time + 1.0);
  std::size_t n = a.samples;
  if (n == 0) n = static_cast<std::size_t>(std::ceil((hi - lo) / (a.epsilon / 4.0))) + 1;
  const auto lat = soliton_lattice(well, a.epsilon, a.time, {lo, hi}, n, a.c.quad());
  std::optional<RealField> avg;
  if (a.window) avg = local_average(lat.field, *a.window);
  const auto p = a.c.prec();
  std::ostringstream os;
  if (a.c.json_out(false)) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["beta"] = a.beta;
    j["epsilon"] = a.epsilon;
    j["time"] = a.time;
    j["wavenumbers"] = lat.wavenumbers;
    j["x_min"] = lo;
    j["x_max"] = hi;
    j["samples"] = n;
    os << dump(j);
  } else {
    std::vector<std::string> header = {"x", "rho"};
    if (avg) header.push_back("deficit_avg");
    csv::write_row(os, header);
    for (std::size_t i = 0; i < lat.field.grid.nx; ++i) {
      std::vector<std::string> row = {csv::format(lat.field.grid.x(i), p),
                                      csv::format(lat.field.at(i), p)};
      if (avg) row.push_back(csv::format(avg->at(i), p));
      csv::write_row(os, row);
    }
  }
  emit(a.c, out, os.str());
}

struct SimulateArgs {
  Common c;
  double beta = 2.0;
  std::vector<double> epsilons{0.1};
  std::size_t grid_n = 1024;
  double length = 60.0;
  std::optional<double> dt;
  double t_final = 1.0;
  std::size_t snap_every = 0;
};

std::string eps_dir(double eps) {
  std::ostringstream os;
  os << "eps_" << std::setprecision(10) << eps;
  return os.str();
}

void run_simulate(const SimulateArgs& a, bool kdv, std::ostream& out) {
  if (!(a.beta > 0.0)) throw DomainError("beta must be positive");
  const Grid1D grid(a.length, a.grid_n);
  grid.validate();
  for (double e : a.epsilons)
    if (!(e >= 1e-3)) throw DomainError("epsilon must be at least 1e-3");
  std::vector<double> w(grid.points);
  for (std::size_t i = 0; i < grid.points; ++i) w[i] = std::exp(-std::pow(std::abs(grid.x(i)), a.beta));

  auto one = [&](double eps) {
    SolverOptions o;
    o.t_final = a.t_final;
    o.snap_every = a.snap_every;
    o.enforce_conservation = true;
    if (kdv) {
      std::vector<double> u0(w.size());
      for (std::size_t i = 0; i < w.size(); ++i) u0[i] = -w[i];
      o.dt = a.dt.value_or(std::copysign(kdv_stable_dt(u0, grid), a.t_final));
      return solve_kdv(u0, eps, grid, o);
    }
    std::vector<double> amp(w.size()), phase(w.size(), 0.0);
    for (std::size_t i = 0; i < w.size(); ++i) amp[i] = 1.0 - 0.5 * w[i];
    o.dt = a.dt.value_or(std::copysign(0.1 * nls_max_dt(grid, eps), a.t_final));
    return solve_nls(amp, phase, eps, grid, o);
  };
  std::vector<std::future<Trajectory>> jobs;
  for (double e : a.epsilons) jobs.push_back(std::async(std::launch::async, one, e));
  std::vector<Trajectory> runs;
  for (auto& j : jobs) runs.push_back(j.get());

  const fs::path dir = a.c.out == "-" || a.c.out.empty() ? fs::path("run") : fs::path(a.c.out);
  json summary;
  summary["schema_version"] = kSchemaVersion;
  summary["kind"] = kdv ? "kdv" : "nls";
  summary["beta"] = a.beta;
  auto members = json::array();
  auto report = json::array();
  for (const auto& r : runs) {
    const auto sub = eps_dir(r.epsilon);
    write_trajectory(dir / sub, r);
    members.push_back(sub + "/manifest.json");
    report.push_back({{"epsilon", r.epsilon},
                      {"dt", r.dt},
                      {"frames", r.frames.size()},
                      {"mass_drift", r.mass_drift()},
                      {kdv ? "l2_drift" : "energy_drift", r.second_drift()}});
  }
  summary["members"] = members;
  std::ofstream f(dir / "runs.json", std::ios::binary);
  if (!f) throw DataError("cannot write " + (dir / "runs.json").string());
  f << dump(summary);
  json j;
  j["schema_version"] = kSchemaVersion;
  j["directory"] = dir.string();
  j["runs"] = report;
  out << dump(j);
}

struct WignerArgs {
  Common c;
  std::string input;
  std::optional<double> window;
  double sigma = 0.0;
  std::size_t random_n = 0;
};

std::vector<std::complex<double>> random_series(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto uniform = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0; };
  std::vector<std::complex<double>> v(n);
  for (auto& z : v) {
    const double re = uniform();
    z = {re, uniform()};
  }
  return v;
}

void write_wigner(const WignerArgs& a, const WignerTensor& w, std::ostream& out) {
  std::ostringstream os;
  if (a.c.json_out(false)) {
    json j = wigner_manifest(w);
    j["base"] = w.base;
    j["dual"] = w.dual;
    j["values"] = w.values;
    os << dump(j);
    emit(a.c, out, os.str());
    return;
  }
  write_wigner_csv(os, w, a.c.prec() == csv::Precision::full);
  emit(a.c, out, os.str());
  if (!(a.c.out.empty() || a.c.out == "-")) {
    std::ofstream m(a.c.out + ".manifest.json", std::ios::binary);
    if (!m) throw DataError("cannot write manifest for " + a.c.out);
    m << dump(wigner_manifest(w));
  }
}

void run_wigner(const WignerArgs& a, bool space, std::ostream& out) {
  std::vector<std::complex<double>> values;
  std::vector<double> axis;
  bool complex_input = true;
  if (!a.input.empty()) {
    const auto cols = header_of(a.input);
    auto in = open_input(a.input);
    const std::string t = space ? "x" : "t";
    if (cols.size() == 3 && cols[0] == t && cols[1] == "re" && cols[2] == "im") {
      const auto tab = csv::read(in, {t, "re", "im"});
      axis = tab.column_values(t);
      const auto re = tab.column_values("re"), im = tab.column_values("im");
      for (std::size_t i = 0; i < re.size(); ++i) values.emplace_back(re[i], im[i]);
    } else if (cols.size() == 2 && cols[0] == t) {
      const auto tab = csv::read(in, {t, cols[1]});
      axis = tab.column_values(t);
      for (double v : tab.column_values(cols[1])) values.emplace_back(v, 0.0);
      complex_input = false;
    } else {
      throw DataError(a.input + ": expected header '" + t + ",value' or '" + t + ",re,im'");
    }
  } else if (a.random_n > 0) {
    values = random_series(a.random_n, a.c.seed);
    for (std::size_t i = 0; i < a.random_n; ++i) axis.push_back(static_cast<double>(i) / static_cast<double>(a.random_n));
  } else {
    throw ValidationError("wigner needs --input or --random-n");
  }
  if (axis.size() < 2) throw DataError("input needs at least 2 samples");
  const double step = (axis.back() - axis.front()) / static_cast<double>(axis.size() - 1);
  for (std::size_t i = 0; i < axis.size(); ++i)
    if (std::abs(axis[i] - (axis.front() + step * static_cast<double>(i))) > 1e-9 * std::max(1.0, std::abs(axis[i])))
      throw DataError("input abscissae are not uniformly spaced");
  if (space) {
    ComplexField f{FieldGrid::line(values.size(), step, axis.front(), true), values};
    if (complex_input) {
      write_wigner(a, wigner_space(f, a.window), out);
    } else {
      RealField r(f.grid, 1);
      for (std::size_t i = 0; i < values.size(); ++i) r.at(i) = values[i].real();
      write_wigner(a, wigner_space(r, a.window), out);
    }
  } else {
    write_wigner(a, wigner_time(values, axis.front(), step, TimeWindow{a.sigma}), out);
  }
}

struct DecomposeArgs {
  Common c;
  std::string s_field, u_field;
  double eps_basis = 1e-12;
  double divergence_tol = 1e-6;
  double trace_tol = 1e-8;
  bool non_periodic = false;
};

void run_decompose(const DecomposeArgs& a, std::ostream& out) {
  auto sin = open_input(a.s_field);
  const RealField s = read_plane_csv(sin, {"s11", "s12", "s22"}, !a.non_periodic);
  auto uin = open_input(a.u_field);
  const RealField u = read_plane_csv(uin, {"u1", "u2"}, !a.non_periodic);
  DecomposeOptions o;
  o.eps_basis = a.eps_basis;
  o.divergence_tol = a.divergence_tol;
  o.trace_tol = a.trace_tol;
  const auto d = tracefree_decompose(s, velocity_gradient(u, !a.non_periodic), o);
  std::ostringstream os;
  if (a.c.json_out(false)) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["points"] = s.grid.size();
    j["nu_defined"] = d.nu.defined_count();
    j["delta_defined"] = d.delta.defined_count();
    j["max_residual"] = d.max_residual;
    j["max_divergence"] = d.max_divergence;
    j["max_trace"] = d.max_trace;
    os << dump(j);
  } else {
    RealField all(s.grid, 5);
    for (std::size_t i = 0; i < s.grid.size(); ++i) {
      all.at(i, 0) = d.nu.field.at(i);
      all.at(i, 1) = d.delta.field.at(i);
      for (std::size_t c = 0; c < 3; ++c) all.at(i, 2 + c) = d.residual.at(i, c);
    }
    write_plane_csv(os, all, {"nu", "delta", "res11", "res12", "res22"});
  }
  emit(a.c, out, os.str());
}

struct Prop1Args {
  Common c;
  std::string runs;
  double t_horizon = 0.0;
  double mollifier = 0.0;
};

void run_prop1(const Prop1Args& a, std::ostream& out) {
  auto in = open_input(a.runs);
  nlohmann::json m;
  try {
    m = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed runs manifest: " + std::string(e.what()));
  }
  const fs::path base = fs::path(a.runs).parent_path();
  std::vector<Trajectory> members;
  std::optional<Trajectory> limit;
  std::optional<RealField> nu;
  try {
    for (const auto& p : m.at("members")) members.push_back(read_trajectory(base / p.get<std::string>()));
    limit = read_trajectory(base / m.at("limit").get<std::string>());
    if (m.contains("nu")) {
      auto nin = open_input((base / m.at("nu").get<std::string>()).string());
      nu = read_real_csv(nin, "nu");
    }
  } catch (const nlohmann::json::exception& e) {
    throw DataError("runs manifest needs 'members' and 'limit': " + std::string(e.what()));
  }
  Prop1Options o;
  o.t_horizon = a.t_horizon;
  o.tol = a.c.tol;
  o.mollifier = a.mollifier;
  const auto r = prop1_report(members, *limit, nu, o);
  std::ostringstream os;
  if (a.c.json_out(true)) {
    os << dump(to_json(r));
  } else {
    const auto p = a.c.prec();
    csv::write_row(os, {"quantity", "value"});
    for (const auto& [k, v] : r.values) csv::write_row(os, {k, csv::format(v, p)});
  }
  emit(a.c, out, os.str());
}

}  // namespace

std::vector<std::string> merge_config(const std::vector<std::string>& args,
                                      const std::string& text) {
  std::vector<std::string> merged = args;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw DataError("config line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.rfind("--", 0) == 0) key.erase(0, 2);
    if (key.empty()) throw DataError("config line " + std::to_string(lineno) + ": empty key");
    const std::string flag = "--" + key;
    const bool given = std::any_of(args.begin(), args.end(), [&](const std::string& a) {
      return a == flag || a.rfind(flag + "=", 0) == 0;
    });
    if (given) continue;
    if (value == "true") {
      merged.push_back(flag);
    } else if (value != "false") {
      merged.push_back(flag);
      merged.push_back(value);
    }
  }
  return merged;
}

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args = raw_args;
  try {
    for (std::size_t i = 0; i < raw_args.size(); ++i) {
      std::string path;
      if (raw_args[i] == "--config" && i + 1 < raw_args.size()) path = raw_args[i + 1];
      if (raw_args[i].rfind("--config=", 0) == 0) path = raw_args[i].substr(9);
      if (path.empty()) continue;
      std::ifstream f(path, std::ios::binary);
      if (!f) throw DataError("cannot open config " + path);
      std::stringstream ss;
      ss << f.rdbuf();
      args = merge_config(raw_args, ss.str());
      break;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }

  CLI::App app{"Zero-dispersion limit diagnostics for KdV and defocusing NLS", "dispersion-lab"};
  app.require_subcommand(1);

  PhiArgs phi_kdv_a, phi_nls_a;
  phi_nls_a.lo = 0.5;
  phi_nls_a.steps = 5;
  auto* phi = app.add_subcommand("phi", "Whitham density on a parameter grid");
  phi->require_subcommand(1);
  auto* phi_kdv_cmd = phi->add_subcommand("kdv", "phi(eta) for u0 = -exp(-|x|^beta) or a sampled well");
  auto* phi_nls_cmd = phi->add_subcommand("nls", "phi(lambda) for r+ = 1 - exp(-|x|^beta)/2 or a sampled well");
  for (auto [cmd, a, var] : {std::tuple{phi_kdv_cmd, &phi_kdv_a, "eta"}, std::tuple{phi_nls_cmd, &phi_nls_a, "lambda"}}) {
    a->c.attach(cmd);
    cmd->add_option("--beta", a->beta, "well exponent")->check(CLI::PositiveNumber);
    cmd->add_option("--profile", a->profile, "sampled well CSV")->check(CLI::ExistingFile);
    cmd->add_option(std::string("--") + var + "-min", a->lo)->capture_default_str();
    cmd->add_option(std::string("--") + var + "-max", a->hi)->capture_default_str();
    cmd->add_option("--steps", a->steps, "grid points")->check(CLI::PositiveNumber)->capture_default_str();
  }

  TableArgs t1{Common{}, table1_betas()}, t2{Common{}, table2_betas()};
  auto* table1 = app.add_subcommand("table1", "phi(eta) for the KdV beta-family on eta = 0.1..0.9");
  auto* table2 = app.add_subcommand("table2", "lambda phi sqrt(1 - lambda^2) for the NLS beta-family");
  for (auto [cmd, a] : {std::pair{table1, &t1}, std::pair{table2, &t2}}) {
    a->c.attach(cmd);
    cmd->add_option("--betas", a->betas, "beta values")->check(CLI::PositiveNumber)->capture_default_str();
  }

  SignArgs sk, sn;
  auto* sign = app.add_subcommand("sign", "sign of the effective viscosity");
  sign->require_subcommand(1);
  auto* sign_kdv = sign->add_subcommand("kdv", "monotonicity of phi(eta)");
  auto* sign_nls = sign->add_subcommand("nls", "monotonicity of lambda phi sqrt(1 - lambda^2)");
  for (auto [cmd, a] : {std::pair{sign_kdv, &sk}, std::pair{sign_nls, &sn}}) {
    a->c.attach(cmd);
    cmd->add_option("--beta", a->beta, "well exponent")->required()->check(CLI::PositiveNumber);
    cmd->add_option("--fd-step", a->h, "finite-difference step")->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--grid", a->grid, "parameter grid (default: the table grid)");
  }

  LatticeArgs la;
  auto* lattice = app.add_subcommand("lattice", "multisoliton lattice |u|^2 for the NLS beta-family");
  la.c.attach(lattice);
  lattice->add_option("--beta", la.beta)->check(CLI::PositiveNumber)->capture_default_str();
  lattice->add_option("--epsilon", la.epsilon)->check(CLI::PositiveNumber)->capture_default_str();
  lattice->add_option("--time", la.time)->check(CLI::PositiveNumber)->capture_default_str();
  lattice->add_option("--x-min", la.x_min);
  lattice->add_option("--x-max", la.x_max);
  lattice->add_option("--samples", la.samples, "sample count (0: eps/4 spacing)");
  lattice->add_option("--window", la.window, "adds a Hann-averaged 1 - |u|^2 column")->check(CLI::PositiveNumber);

  SimulateArgs simk, simn;
  simn.epsilons = {0.1};
  auto* simulate = app.add_subcommand("simulate", "pseudo-spectral runs from beta-family data");
  simulate->require_subcommand(1);
  auto* sim_kdv = simulate->add_subcommand("kdv", "u_t - 6 u u_x + eps^2 u_xxx = 0");
  auto* sim_nls = simulate->add_subcommand("nls", "i eps u_t + eps^2/2 u_xx + (1 - |u|^2) u = 0");
  for (auto [cmd, a] : {std::pair{sim_kdv, &simk}, std::pair{sim_nls, &simn}}) {
    a->c.attach(cmd);
    cmd->add_option("--beta", a->beta)->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--epsilon", a->epsilons, "one or more epsilons")->capture_default_str();
    cmd->add_option("--grid-n", a->grid_n, "points (power of two >= 16)")->capture_default_str();
    cmd->add_option("--length", a->length)->check(CLI::PositiveNumber)->capture_default_str();
    cmd->add_option("--dt", a->dt, "time step (default: from the stability rule)");
    cmd->add_option("--t-final", a->t_final)->capture_default_str();
    cmd->add_option("--snap-every", a->snap_every, "steps between frames (0: first and last)")
        ->capture_default_str();
  }

  WignerArgs ws, wt;
  auto* wigner = app.add_subcommand("wigner", "Wigner transforms of line fields or time series");
  wigner->require_subcommand(1);
  auto* wig_space = wigner->add_subcommand("space", "transform in x of a periodic field");
  auto* wig_time = wigner->add_subcommand("time", "transform in t of a series");
  for (auto [cmd, a] : {std::pair{wig_space, &ws}, std::pair{wig_time, &wt}}) {
    a->c.attach(cmd);
    cmd->add_option("--input", a->input, "CSV x,value | x,re,im (t,... for time)")->check(CLI::ExistingFile);
    cmd->add_option("--random-n", a->random_n, "random complex test field of this length (uses --seed)");
  }
  wig_space->add_option("--window", ws.window, "cos^2 taper width in the shift variable")
      ->check(CLI::PositiveNumber);
  wig_time->add_option("--window", wt.sigma, "Gaussian window sigma (0: none)")->capture_default_str();

  DecomposeArgs da;
  auto* decompose = app.add_subcommand("decompose", "project a trace-free stress onto strain and its complement");
  da.c.attach(decompose);
  decompose->add_option("--s-field", da.s_field, "CSV x,y,s11,s12,s22")->required()->check(CLI::ExistingFile);
  decompose->add_option("--u-field", da.u_field, "CSV x,y,u1,u2")->required()->check(CLI::ExistingFile);
  decompose->add_option("--eps-basis", da.eps_basis)->capture_default_str();
  decompose->add_option("--divergence-tol", da.divergence_tol)->capture_default_str();
  decompose->add_option("--trace-tol", da.trace_tol)->capture_default_str();
  decompose->add_flag("--non-periodic", da.non_periodic, "finite differences instead of spectral");

  Prop1Args pa;
  pa.c.tol = 1e-6;
  auto* prop1 = app.add_subcommand("prop1", "strong-convergence versus dissipation diagnostic");
  pa.c.attach(prop1);
  prop1->add_option("--runs", pa.runs, "JSON with 'members', 'limit' and optional 'nu'")
      ->required()
      ->check(CLI::ExistingFile);
  prop1->add_option("--t-horizon", pa.t_horizon, "0: whole run")->capture_default_str();
  prop1->add_option("--mollifier", pa.mollifier, "0: one eighth of the domain")->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*phi_kdv_cmd) run_phi_kdv(phi_kdv_a, out);
    else if (*phi_nls_cmd) run_phi_nls(phi_nls_a, out);
    else if (*table1) run_table(t1, true, out);
    else if (*table2) run_table(t2, false, out);
    else if (*sign_kdv) run_sign(sk, true, out);
    else if (*sign_nls) run_sign(sn, false, out);
    else if (*lattice) run_lattice(la, out);
    else if (*sim_kdv) run_simulate(simk, true, out);
    else if (*sim_nls) run_simulate(simn, false, out);
    else if (*wig_space) run_wigner(ws, true, out);
    else if (*wig_time) run_wigner(wt, false, out);
    else if (*decompose) run_decompose(da, out);
    else if (*prop1) run_prop1(pa, out);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitOk;
}

}  // namespace dlab::cli
