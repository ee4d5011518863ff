#include "dlab/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <istream>
#include <sstream>

#include "dlab/csv.hpp"
#include "dlab/errors.hpp"

namespace dlab {

namespace {
// Fraction of the well width below which level differences are linearized.
constexpr double kLinearGapFraction = 1e-8;
}  // namespace

namespace {

constexpr int kScanSteps = 256;
constexpr int kMaxBisections = 400;
// Far-field cut-off for the beta families: |x|^beta up to this value,
// i.e. relative deviation from the background down to ~e^-70.
constexpr double kBetaTailExponent = 70.0;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

void require_sorted(const std::vector<double>& x) {
  if (x.size() < 3) throw DataError("a sampled profile needs at least 3 points");
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (!(x[i] > x[i - 1])) throw DataError("profile abscissae must be strictly increasing");
  }
}

// Root of g on a side of `origin` where g(origin) < 0 and g grows outward.
// Returns nullopt when the scan never changes sign inside [origin, edge].
std::optional<double> bracket_and_bisect(const std::function<double(double)>& g, double origin,
                                         double edge, double tol) {
  const double step = (edge - origin) / kScanSteps;
  double lo = origin;
  double hi = origin;
  bool found = false;
  for (int i = 1; i <= kScanSteps; ++i) {
    hi = origin + step * i;
    if (i == kScanSteps) hi = edge;
    if (g(hi) >= 0.0) {
      found = true;
      break;
    }
    lo = hi;
  }
  if (!found) return std::nullopt;
  for (int it = 0; it < kMaxBisections && std::abs(hi - lo) > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (g(mid) >= 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

struct ExtremaScan {
  std::vector<std::size_t> minima;
  std::vector<std::size_t> maxima;
  std::vector<std::size_t> flats;
};

ExtremaScan scan_extrema(const std::vector<double>& v) {
  ExtremaScan s;
  int last_sign = 0;
  std::size_t last_turn = 0;
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    const double d = v[i + 1] - v[i];
    const int sign = d > 0.0 ? 1 : (d < 0.0 ? -1 : 0);
    if (sign == 0) {
      s.flats.push_back(i);
      continue;
    }
    if (last_sign == -1 && sign == 1) s.minima.push_back(last_turn);
    if (last_sign == 1 && sign == -1) s.maxima.push_back(last_turn);
    last_sign = sign;
    last_turn = i + 1;
  }
  return s;
}

std::vector<double> dense_samples(std::pair<double, double> range) {
  constexpr int n = 4001;
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) {
    x[i] = range.first + (range.second - range.first) * i / (n - 1);
  }
  return x;
}

}  // namespace

// ---------------------------------------------------------------------------
// MonotoneCubic

MonotoneCubic::MonotoneCubic(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  if (x_.size() != y_.size()) throw DataError("abscissae and values differ in length");
  require_sorted(x_);
  const std::size_t n = x_.size();
  std::vector<double> h(n - 1), delta(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = x_[i + 1] - x_[i];
    delta[i] = (y_[i + 1] - y_[i]) / h[i];
  }
  d_.assign(n, 0.0);
  for (std::size_t k = 1; k + 1 < n; ++k) {
    if (delta[k - 1] * delta[k] <= 0.0) continue;
    const double w1 = 2.0 * h[k] + h[k - 1];
    const double w2 = h[k] + 2.0 * h[k - 1];
    d_[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
  }
  auto end_slope = [](double h0, double h1, double m0, double m1) {
    double d = ((2.0 * h0 + h1) * m0 - h0 * m1) / (h0 + h1);
    if (d * m0 <= 0.0) {
      d = 0.0;
    } else if (m0 * m1 <= 0.0 && std::abs(d) > std::abs(3.0 * m0)) {
      d = 3.0 * m0;
    }
    return d;
  };
  d_[0] = end_slope(h[0], h[1], delta[0], delta[1]);
  d_[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
}

double MonotoneCubic::operator()(double x) const {
  if (x <= x_.front()) return y_.front();
  if (x >= x_.back()) return y_.back();
  const auto it = std::upper_bound(x_.begin(), x_.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - x_.begin()) - 1;
  const double h = x_[i + 1] - x_[i];
  const double t = (x - x_[i]) / h;
  const double t2 = t * t;
  const double t3 = t2 * t;
  const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
  const double h10 = t3 - 2.0 * t2 + t;
  const double h01 = -2.0 * t3 + 3.0 * t2;
  const double h11 = t3 - t2;
  return h00 * y_[i] + h10 * h * d_[i] + h01 * y_[i + 1] + h11 * h * d_[i + 1];
}

// ---------------------------------------------------------------------------
// KdV profiles

double KdvProfile::level_gap(double eta, const TurningPoints& tp, Side side, double dist) const {
  auto raw = [&](double d) {
    const double x = side == Side::left ? tp.x_minus + d : tp.x_plus - d;
    // |.| absorbs the sign error left by a root that is only accurate to tol
    return std::abs(-value(x) - eta * eta);
  };
  // Closer than `lin` the difference is dominated by rounding; continue it
  // linearly to zero at the turning point.
  const double lin = kLinearGapFraction * (tp.x_plus - tp.x_minus);
  if (dist >= lin || !(lin > 0.0)) return raw(dist);
  return raw(lin) * (dist / lin);
}

std::vector<double> KdvProfile::validation_samples() const { return dense_samples(search_range()); }

KdvBetaWell::KdvBetaWell(double beta, double center) : beta_(beta), center_(center) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw DomainError("beta must be positive");
}

double KdvBetaWell::value(double x) const {
  return -std::exp(-std::pow(std::abs(x - center_), beta_));
}

std::pair<double, double> KdvBetaWell::search_range() const {
  const double r = std::pow(kBetaTailExponent, 1.0 / beta_);
  return {center_ - r, center_ + r};
}

std::optional<TurningPoints> KdvBetaWell::exact_turning_points(double eta) const {
  if (!(eta > 0.0 && eta < 1.0)) throw DomainError("eta must lie in (0, 1)");
  const double x = std::pow(-2.0 * std::log(eta), 1.0 / beta_);
  return TurningPoints{center_ - x, center_ + x};
}

double KdvBetaWell::level_gap(double eta, const TurningPoints& tp, Side side, double dist) const {
  const double reach = side == Side::right ? tp.x_plus - center_ : center_ - tp.x_minus;
  const double reach_pow = -2.0 * std::log(eta);  // reach^beta
  // reach^beta - |x|^beta with |x| = reach - dist
  const double drop = -reach_pow * std::expm1(beta_ * std::log1p(-std::min(dist / reach, 1.0)));
  return eta * eta * std::expm1(drop);
}

std::unique_ptr<KdvProfile> KdvBetaWell::shifted(double s) const {
  return std::make_unique<KdvBetaWell>(beta_, center_ + s);
}

std::string KdvBetaWell::describe() const {
  return "kdv beta-well beta=" + fmt(beta_) + " center=" + fmt(center_);
}

SampledKdvWell::SampledKdvWell(std::vector<double> x, std::vector<double> values)
    : interp_(std::move(x), std::move(values)) {
  const auto& v = interp_.values();
  min_index_ = static_cast<std::size_t>(std::min_element(v.begin(), v.end()) - v.begin());
}

double SampledKdvWell::minimum_point() const { return interp_.abscissae()[min_index_]; }

std::pair<double, double> SampledKdvWell::search_range() const {
  return {interp_.abscissae().front(), interp_.abscissae().back()};
}

std::unique_ptr<KdvProfile> SampledKdvWell::shifted(double s) const {
  auto x = interp_.abscissae();
  for (auto& xi : x) xi += s;
  return std::make_unique<SampledKdvWell>(std::move(x), interp_.values());
}

std::string SampledKdvWell::describe() const {
  return "kdv sampled well (" + std::to_string(interp_.abscissae().size()) + " points)";
}

TurningPoints kdv_turning_points(const KdvProfile& profile, double eta, double tol) {
  if (!(eta > 0.0 && eta < 1.0)) throw DomainError("eta must lie in (0, 1)");
  const double level = -eta * eta;
  const double x0 = profile.minimum_point();
  if (!(profile.value(x0) < level)) {
    throw DataError("profile minimum does not reach the level -eta^2");
  }
  const auto [lo, hi] = profile.search_range();
  auto g = [&](double x) { return profile.value(x) - level; };
  const auto right = bracket_and_bisect(g, x0, hi, tol);
  const auto left = bracket_and_bisect(g, x0, lo, tol);
  if (!right || !left) {
    throw DataError("no turning point bracket for eta = " + fmt(eta) + " inside the profile range");
  }
  return {*left, *right};
}

// ---------------------------------------------------------------------------
// NLS profiles

NlsProfile::Parts NlsProfile::integrand_parts(double lambda, const TurningPoints& tp, Side side,
                                              double dist) const {
  auto at = [&](double d) {
    const double x = side == Side::left ? tp.x_minus + d : tp.x_plus - d;
    const double rp = r_plus(x);
    const double rm = r_minus(x);
    return Parts{lambda - 0.5 * (rp + rm), std::abs((lambda - rp) * (lambda - rm))};
  };
  const double lin = kLinearGapFraction * (tp.x_plus - tp.x_minus);
  if (dist >= lin || !(lin > 0.0)) return at(dist);
  Parts p = at(lin);
  p.product *= dist / lin;
  return p;
}

std::vector<double> NlsProfile::validation_samples() const { return dense_samples(search_range()); }

Branch NlsProfile::branch_of(double lambda) const {
  if (!(lambda > -1.0 && lambda < 1.0)) throw DomainError("lambda must lie in (-1, 1)");
  if (lambda >= lambda_min()) return Branch::positive;
  if (lambda <= lambda_max()) return Branch::negative;
  throw DomainError("lambda = " + fmt(lambda) + " lies in the solitonless gap (" +
                    fmt(lambda_max()) + ", " + fmt(lambda_min()) + ")");
}

NlsBetaWell::NlsBetaWell(double beta, double center) : beta_(beta), center_(center) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw DomainError("beta must be positive");
}

double NlsBetaWell::r_plus(double x) const {
  return 1.0 - 0.5 * std::exp(-std::pow(std::abs(x - center_), beta_));
}

std::pair<double, double> NlsBetaWell::search_range() const {
  const double r = std::pow(kBetaTailExponent, 1.0 / beta_);
  return {center_ - r, center_ + r};
}

std::optional<TurningPoints> NlsBetaWell::exact_turning_points(double lambda) const {
  const double a = std::abs(lambda);
  if (!(a >= 0.5 && a < 1.0)) {
    throw DomainError("lambda = " + fmt(lambda) + " is outside the Whitham branches");
  }
  const double x = std::pow(std::max(0.0, -std::log(2.0 * (1.0 - a))), 1.0 / beta_);
  return TurningPoints{center_ - x, center_ + x};
}

double NlsBetaWell::excess_below(double lambda, double dist) const {
  const double reach_pow = -std::log(2.0 * (1.0 - lambda));  // X^beta
  const double reach = std::pow(reach_pow, 1.0 / beta_);
  const double drop = -reach_pow * std::expm1(beta_ * std::log1p(-std::min(dist / reach, 1.0)));
  return (1.0 - lambda) * std::expm1(drop);
}

NlsProfile::Parts NlsBetaWell::integrand_parts(double lambda, const TurningPoints& tp, Side side,
                                               double dist) const {
  (void)tp;
  (void)side;
  const double a = std::abs(lambda);
  const double below = excess_below(a, dist);  // a - r_plus(x)
  const double rp = a - below;
  return {lambda, below * (a + rp)};
}

std::unique_ptr<NlsProfile> NlsBetaWell::shifted(double s) const {
  return std::make_unique<NlsBetaWell>(beta_, center_ + s);
}

std::string NlsBetaWell::describe() const {
  return "nls beta-well beta=" + fmt(beta_) + " center=" + fmt(center_);
}

SampledNlsWell::SampledNlsWell(std::vector<double> x, std::vector<double> r_plus,
                               std::vector<double> r_minus)
    : plus_(x, std::move(r_plus)), minus_(std::move(x), std::move(r_minus)) {
  const auto& p = plus_.values();
  const auto& m = minus_.values();
  min_index_ = static_cast<std::size_t>(std::min_element(p.begin(), p.end()) - p.begin());
  max_index_ = static_cast<std::size_t>(std::max_element(m.begin(), m.end()) - m.begin());
}

double SampledNlsWell::r_plus_min_point() const { return plus_.abscissae()[min_index_]; }
double SampledNlsWell::r_minus_max_point() const { return minus_.abscissae()[max_index_]; }

std::pair<double, double> SampledNlsWell::search_range() const {
  return {plus_.abscissae().front(), plus_.abscissae().back()};
}

std::unique_ptr<NlsProfile> SampledNlsWell::shifted(double s) const {
  auto x = plus_.abscissae();
  for (auto& xi : x) xi += s;
  return std::make_unique<SampledNlsWell>(std::move(x), plus_.values(), minus_.values());
}

std::string SampledNlsWell::describe() const {
  return "nls sampled well (" + std::to_string(plus_.abscissae().size()) + " points)";
}

TurningPoints nls_turning_points(const NlsProfile& profile, double lambda, double tol) {
  const Branch branch = profile.branch_of(lambda);
  const double x0 =
      branch == Branch::positive ? profile.r_plus_min_point() : profile.r_minus_max_point();
  const double edge = branch == Branch::positive ? profile.lambda_min() : profile.lambda_max();
  if (lambda == edge) return {x0, x0};
  std::function<double(double)> g;
  if (branch == Branch::positive) {
    g = [&](double x) { return profile.r_plus(x) - lambda; };
  } else {
    g = [&](double x) { return lambda - profile.r_minus(x); };
  }
  const auto [lo, hi] = profile.search_range();
  const auto right = bracket_and_bisect(g, x0, hi, tol);
  const auto left = bracket_and_bisect(g, x0, lo, tol);
  if (!right || !left) {
    throw DataError("no turning point bracket for lambda = " + fmt(lambda) +
                    " inside the profile range");
  }
  return {*left, *right};
}

// ---------------------------------------------------------------------------
// Validation

namespace {

void check_single_extremum(DiagnosticsReport& rep, const std::vector<double>& x,
                           const std::vector<double>& v, bool strict_flats,
                           const std::string& what) {
  const ExtremaScan s = scan_extrema(v);
  if (strict_flats && !s.flats.empty()) {
    rep.fail(what + " is not strictly monotone near x = " + fmt(x[s.flats.front()]));
  }
  if (s.minima.empty()) {
    rep.fail(what + " has no interior minimum");
  } else if (s.minima.size() > 1) {
    rep.fail(what + " has a second local minimum at x = " + fmt(x[s.minima[1]]));
    rep.values[what + ".second_minimum_x"] = x[s.minima[1]];
  }
  rep.values[what + ".local_minima"] = static_cast<double>(s.minima.size());
}

}  // namespace

DiagnosticsReport validate_single_well(const KdvProfile& profile) {
  DiagnosticsReport rep;
  rep.kind = "kdv_single_well";
  rep.tolerance = 1e-8;
  rep.labels["profile"] = profile.describe();
  const bool sampled = dynamic_cast<const SampledKdvWell*>(&profile) != nullptr;
  const std::vector<double> xs = profile.validation_samples();
  std::vector<double> vs;
  vs.reserve(xs.size());
  for (double x : xs) vs.push_back(profile.value(x));
  check_single_extremum(rep, xs, vs, sampled, "u0");

  const double x0 = profile.minimum_point();
  const double m = profile.value(x0);
  rep.values["minimum_point"] = x0;
  rep.values["minimum_value"] = m;
  if (std::abs(m + 1.0) > rep.tolerance) {
    rep.fail("minimum value " + fmt(m) + " differs from -1");
  }
  if (std::any_of(vs.begin(), vs.end(), [](double v) { return v >= 0.0; })) {
    rep.warnings.push_back("profile is not strictly negative everywhere");
  }
  if (const auto* bw = dynamic_cast<const KdvBetaWell*>(&profile); bw && bw->beta() <= 1.0) {
    rep.warnings.push_back("beta <= 1: profile is not smooth at its minimum");
  }
  return rep;
}

DiagnosticsReport validate_single_well(const NlsProfile& profile) {
  DiagnosticsReport rep;
  rep.kind = "nls_single_well";
  rep.tolerance = 1e-12;
  rep.labels["profile"] = profile.describe();
  const bool sampled = dynamic_cast<const SampledNlsWell*>(&profile) != nullptr;
  const std::vector<double> xs = profile.validation_samples();
  std::vector<double> rp, neg_rm;
  for (double x : xs) {
    rp.push_back(profile.r_plus(x));
    neg_rm.push_back(-profile.r_minus(x));
  }
  check_single_extremum(rep, xs, rp, sampled, "r_plus");
  check_single_extremum(rep, xs, neg_rm, sampled, "-r_minus");

  const double lmin = profile.lambda_min();
  const double lmax = profile.lambda_max();
  rep.values["lambda_min"] = lmin;
  rep.values["lambda_max"] = lmax;
  const double tol = rep.tolerance;
  const double rp_max = *std::max_element(rp.begin(), rp.end());
  const double rm_min = -*std::max_element(neg_rm.begin(), neg_rm.end());
  if (!(lmax < lmin)) rep.fail("lambda_max must be below lambda_min");
  if (rp_max > 1.0 + tol) rep.fail("r_plus exceeds 1");
  if (rm_min < -1.0 - tol) rep.fail("r_minus is below -1");
  if (*std::min_element(rp.begin(), rp.end()) < lmin - tol) {
    rep.fail("r_plus dips below its reported minimum");
  }
  if (const auto* bw = dynamic_cast<const NlsBetaWell*>(&profile); bw && bw->beta() <= 1.0) {
    rep.warnings.push_back("beta <= 1: profile is not smooth at its minimum");
  }
  return rep;
}

std::unique_ptr<SampledKdvWell> read_kdv_profile_csv(std::istream& in) {
  const csv::Table t = csv::read(in, {"x", "value"});
  auto well = std::make_unique<SampledKdvWell>(t.column_values("x"), t.column_values("value"));
  const auto rep = validate_single_well(*well);
  if (!rep.passed) throw DataError("sampled KdV profile rejected: " + rep.failures.front());
  return well;
}

std::unique_ptr<SampledNlsWell> read_nls_profile_csv(std::istream& in) {
  const csv::Table t = csv::read(in, {"x", "r_plus", "r_minus"});
  auto well = std::make_unique<SampledNlsWell>(t.column_values("x"), t.column_values("r_plus"),
                                               t.column_values("r_minus"));
  const auto rep = validate_single_well(*well);
  if (!rep.passed) throw DataError("sampled NLS profile rejected: " + rep.failures.front());
  return well;
}

}  // namespace dlab
