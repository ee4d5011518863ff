#pragma once

// Single-well initial data for the KdV and defocusing NLS weak-limit
// formulas, with turning-point solvers.

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dlab/report.hpp"

namespace dlab {

enum class Side { left, right };

struct TurningPoints {
  double x_minus = 0.0;
  double x_plus = 0.0;
};

inline constexpr double kTurningTol = 1e-13;

/// Monotone piecewise-cubic (Fritsch-Carlson) interpolant. Constant
/// extrapolation outside the sample range.
class MonotoneCubic {
 public:
  MonotoneCubic() = default;
  MonotoneCubic(std::vector<double> x, std::vector<double> y);

  double operator()(double x) const;
  const std::vector<double>& abscissae() const { return x_; }
  const std::vector<double>& values() const { return y_; }

 private:
  std::vector<double> x_, y_, d_;
};

// ---------------------------------------------------------------------------
// KdV

class KdvProfile {
 public:
  virtual ~KdvProfile() = default;

  virtual double value(double x) const = 0;
  virtual double minimum_point() const = 0;
  double minimum_value() const { return value(minimum_point()); }

  /// Interval on which the well differs from its far-field value; turning
  /// point searches never leave it.
  virtual std::pair<double, double> search_range() const = 0;

  /// Mirror symmetric about the minimum point.
  virtual bool symmetric() const { return false; }

  /// Closed-form turning points, if the family has them.
  virtual std::optional<TurningPoints> exact_turning_points(double /*eta*/) const {
    return std::nullopt;
  }

  /// -u0(x) - eta^2 at distance `dist` inside the sublevel set from the
  /// turning point on `side`. Overridden where it can be computed without
  /// cancellation.
  virtual double level_gap(double eta, const TurningPoints& tp, Side side, double dist) const;

  virtual std::unique_ptr<KdvProfile> shifted(double s) const = 0;
  virtual std::string describe() const = 0;
  /// Abscissae for validation sampling.
  virtual std::vector<double> validation_samples() const;
};

/// u0(x) = -exp(-|x - center|^beta).
class KdvBetaWell final : public KdvProfile {
 public:
  explicit KdvBetaWell(double beta, double center = 0.0);

  double beta() const { return beta_; }
  double center() const { return center_; }

  double value(double x) const override;
  double minimum_point() const override { return center_; }
  std::pair<double, double> search_range() const override;
  bool symmetric() const override { return true; }
  std::optional<TurningPoints> exact_turning_points(double eta) const override;
  double level_gap(double eta, const TurningPoints& tp, Side side, double dist) const override;
  std::unique_ptr<KdvProfile> shifted(double s) const override;
  std::string describe() const override;

 private:
  double beta_;
  double center_;
};

class SampledKdvWell final : public KdvProfile {
 public:
  /// Abscissae must be strictly increasing; the shape is not checked here
  /// (see validate_single_well and read_kdv_profile_csv).
  SampledKdvWell(std::vector<double> x, std::vector<double> values);

  double value(double x) const override { return interp_(x); }
  double minimum_point() const override;
  std::pair<double, double> search_range() const override;
  std::unique_ptr<KdvProfile> shifted(double s) const override;
  std::string describe() const override;
  std::vector<double> validation_samples() const override { return interp_.abscissae(); }

  const MonotoneCubic& samples() const { return interp_; }

 private:
  MonotoneCubic interp_;
  std::size_t min_index_ = 0;
};

/// Turning points u0(x_pm) = -eta^2, x_minus < x0 < x_plus, by bracketing
/// scan plus bisection to `tol`. Throws DomainError for eta outside (0,1)
/// and DataError when no bracket exists inside the search range.
TurningPoints kdv_turning_points(const KdvProfile& profile, double eta, double tol = kTurningTol);

// ---------------------------------------------------------------------------
// NLS

enum class Branch { positive, negative };

class NlsProfile {
 public:
  virtual ~NlsProfile() = default;

  virtual double r_plus(double x) const = 0;
  virtual double r_minus(double x) const = 0;
  virtual double r_plus_min_point() const = 0;
  virtual double r_minus_max_point() const = 0;
  double lambda_min() const { return r_plus(r_plus_min_point()); }
  double lambda_max() const { return r_minus(r_minus_max_point()); }

  virtual std::pair<double, double> search_range() const = 0;
  virtual bool symmetric() const { return false; }
  virtual std::optional<TurningPoints> exact_turning_points(double /*lambda*/) const {
    return std::nullopt;
  }

  struct Parts {
    double numerator;  // lambda - (r_plus + r_minus)/2
    double product;    // (lambda - r_plus)(lambda - r_minus), > 0 inside
  };
  /// Integrand pieces at distance `dist` inside from the turning point.
  virtual Parts integrand_parts(double lambda, const TurningPoints& tp, Side side,
                                double dist) const;

  virtual std::unique_ptr<NlsProfile> shifted(double s) const = 0;
  virtual std::string describe() const = 0;
  virtual std::vector<double> validation_samples() const;

  Branch branch_of(double lambda) const;  // throws DomainError in the gap
};

/// r_plus(x) = 1 - exp(-|x - center|^beta)/2, r_minus = -r_plus, S = 0.
/// The amplitude is A = r_plus and the density A^2.
class NlsBetaWell final : public NlsProfile {
 public:
  explicit NlsBetaWell(double beta, double center = 0.0);

  double beta() const { return beta_; }
  double center() const { return center_; }

  double r_plus(double x) const override;
  double r_minus(double x) const override { return -r_plus(x); }
  double r_plus_min_point() const override { return center_; }
  double r_minus_max_point() const override { return center_; }
  std::pair<double, double> search_range() const override;
  bool symmetric() const override { return true; }
  std::optional<TurningPoints> exact_turning_points(double lambda) const override;
  Parts integrand_parts(double lambda, const TurningPoints& tp, Side side,
                        double dist) const override;
  std::unique_ptr<NlsProfile> shifted(double s) const override;
  std::string describe() const override;

  /// lambda - r_plus at distance `dist` inside the right turning point
  /// X(lambda), evaluated without cancellation. Requires lambda > 1/2.
  double excess_below(double lambda, double dist) const;

 private:
  double beta_;
  double center_;
};

class SampledNlsWell final : public NlsProfile {
 public:
  SampledNlsWell(std::vector<double> x, std::vector<double> r_plus, std::vector<double> r_minus);

  double r_plus(double x) const override { return plus_(x); }
  double r_minus(double x) const override { return minus_(x); }
  double r_plus_min_point() const override;
  double r_minus_max_point() const override;
  std::pair<double, double> search_range() const override;
  std::unique_ptr<NlsProfile> shifted(double s) const override;
  std::string describe() const override;
  std::vector<double> validation_samples() const override { return plus_.abscissae(); }

 private:
  MonotoneCubic plus_, minus_;
  std::size_t min_index_ = 0, max_index_ = 0;
};

/// r(x_pm) = lambda on the branch selected by lambda. lambda equal to the
/// branch edge returns the degenerate pair x_minus = x_plus.
TurningPoints nls_turning_points(const NlsProfile& profile, double lambda,
                                 double tol = kTurningTol);

// ---------------------------------------------------------------------------

DiagnosticsReport validate_single_well(const KdvProfile& profile);
DiagnosticsReport validate_single_well(const NlsProfile& profile);

/// CSV ingest (header `x,value`); rejects data that fail validation.
std::unique_ptr<SampledKdvWell> read_kdv_profile_csv(std::istream& in);
/// CSV ingest (header `x,r_plus,r_minus`); rejects data that fail validation.
std::unique_ptr<SampledNlsWell> read_nls_profile_csv(std::istream& in);

}  // namespace dlab
