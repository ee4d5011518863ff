#include "dlab/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

#include "dlab/errors.hpp"

namespace dlab {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;
// Above this empirical exponent an endpoint is declared non-integrable.
constexpr double kDivergenceThreshold = 0.98;

struct Counter {
  const EndpointIntegrand& f;
  std::size_t calls = 0;
  double operator()(double x, double da, double db) {
    ++calls;
    const double v = f(x, da, db);
    if (!std::isfinite(v)) {
      std::ostringstream os;
      os << "integrand is not finite at x = " << x;
      throw NumericalError(os.str());
    }
    return v;
  }
};

bool accurate_enough(double err, double value, const QuadOptions& opt) {
  return err <= std::max(opt.rel_tol * std::abs(value), opt.abs_floor);
}

// ---------------------------------------------------------------------------
// tanh-sinh

struct DeNode {
  double x, from_a, to_b, weight;
};

DeNode de_node(double t, double a, double b) {
  const double half = 0.5 * (b - a);
  const double u = kHalfPi * std::sinh(t);
  const double e = std::exp(-2.0 * std::abs(u));
  const double near = 2.0 * half * e / (1.0 + e);
  const double far = 2.0 * half / (1.0 + e);
  DeNode n{};
  if (t >= 0.0) {
    n.to_b = near;
    n.from_a = far;
    n.x = b - near;
  } else {
    n.from_a = near;
    n.to_b = far;
    n.x = a + near;
  }
  n.weight = half * kHalfPi * std::cosh(t) * 4.0 * e / ((1.0 + e) * (1.0 + e));
  return n;
}

// Largest |t| worth sampling on one side: beyond it the node distance
// underflows or the damped integrand is below 1e-22 of its scale.
double de_tmax(double exponent) {
  const double umax = std::min(340.0, 25.0 / (1.0 - exponent) + 3.0);
  return std::asinh(umax / kHalfPi);
}

QuadResult integrate_de(Counter& f, double a, double b, double pl, double pr,
                        const QuadOptions& opt) {
  const double tl = de_tmax(pl);
  const double tr = de_tmax(pr);
  auto sum_nodes = [&](double h, bool odd_only) {
    double s = 0.0;
    const long jl = static_cast<long>(std::floor(tl / h));
    const long jr = static_cast<long>(std::floor(tr / h));
    for (long j = -jl; j <= jr; ++j) {
      if (odd_only && (j % 2 == 0)) continue;
      const DeNode n = de_node(static_cast<double>(j) * h, a, b);
      if (n.from_a <= 0.0 || n.to_b <= 0.0 || n.weight == 0.0) continue;
      s += n.weight * f(n.x, n.from_a, n.to_b);
    }
    return s;
  };

  double h = 1.0;
  double raw = sum_nodes(h, false);
  double estimate = h * raw;
  double err = std::numeric_limits<double>::infinity();
  for (int level = 1; level <= opt.max_depth; ++level) {
    h *= 0.5;
    raw += sum_nodes(h, true);
    const double next = h * raw;
    err = std::abs(next - estimate);
    estimate = next;
    if (level >= 3 && accurate_enough(err, estimate, opt)) {
      return {estimate, err, f.calls};
    }
  }
  throw AccuracyError("tanh-sinh refinement budget exhausted", estimate, err);
}

// ---------------------------------------------------------------------------
// Gauss-Kronrod 7/15 on a smooth (transformed) integrand.

constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

using SmoothFn = std::function<double(double)>;

struct GkPanel {
  double value, err;
};

GkPanel gk15(const SmoothFn& g, double lo, double hi) {
  const double c = 0.5 * (lo + hi);
  const double r = 0.5 * (hi - lo);
  const double fc = g(c);
  double kron = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = r * kXgk[j];
    const double f1 = g(c - dx);
    const double f2 = g(c + dx);
    kron += kWgk[j] * (f1 + f2);
    if (j % 2 == 1) gauss += kWg[j / 2] * (f1 + f2);
  }
  return {kron * r, std::abs((kron - gauss) * r)};
}

QuadResult adaptive_gk(const SmoothFn& g, double lo, double hi, const QuadOptions& opt,
                       std::size_t& calls_out, const Counter& counter) {
  struct Item {
    double lo, hi;
    GkPanel panel;
    int depth;
  };
  std::vector<Item> done;
  std::vector<Item> work{{lo, hi, gk15(g, lo, hi), 0}};
  double total = work.front().panel.value;
  double total_err = work.front().panel.err;
  bool budget_hit = false;
  while (!accurate_enough(total_err, total, opt)) {
    // refine the panel with the largest error
    auto it = std::max_element(work.begin(), work.end(), [](const Item& x, const Item& y) {
      return x.panel.err < y.panel.err;
    });
    if (it == work.end()) break;
    if (it->depth >= opt.max_depth) {
      budget_hit = true;
      done.push_back(*it);
      work.erase(it);
      if (work.empty()) break;
      continue;
    }
    const Item item = *it;
    work.erase(it);
    const double mid = 0.5 * (item.lo + item.hi);
    Item left{item.lo, mid, gk15(g, item.lo, mid), item.depth + 1};
    Item right{mid, item.hi, gk15(g, mid, item.hi), item.depth + 1};
    total += left.panel.value + right.panel.value - item.panel.value;
    total_err += left.panel.err + right.panel.err - item.panel.err;
    work.push_back(left);
    work.push_back(right);
  }
  // resum to avoid drift from incremental updates
  double v = 0.0, e = 0.0;
  for (const auto& w : work) {
    v += w.panel.value;
    e += w.panel.err;
  }
  for (const auto& d : done) {
    v += d.panel.value;
    e += d.panel.err;
  }
  calls_out = counter.calls;
  if (budget_hit && !accurate_enough(e, v, opt)) {
    throw AccuracyError("Gauss-Kronrod refinement budget exhausted", v, e);
  }
  return {v, e, calls_out};
}

QuadResult integrate_subst(Counter& f, double a, double b, double pl, double pr,
                           const QuadOptions& opt) {
  const double len = b - a;
  QuadResult total{0.0, 0.0, 0};
  std::size_t calls = 0;
  auto add = [&](const QuadResult& r) {
    total.value += r.value;
    total.error_estimate += r.error_estimate;
  };
  QuadOptions piece_opt = opt;

  if (pl == 0.0 && pr == 0.0) {
    SmoothFn g = [&](double x) { return f(x, x - a, b - x); };
    add(adaptive_gk(g, a, b, piece_opt, calls, f));
  } else {
    // singular sides get their own piece; split at the midpoint when both are
    const double mid = (pl > 0.0 && pr > 0.0) ? a + 0.5 * len : (pl > 0.0 ? b : a);
    if (pl > 0.0) {
      const double q = 1.0 / (1.0 - pl);
      const double piece = mid - a;
      const double tmax = std::pow(piece, 1.0 / q);
      SmoothFn g = [&, q](double t) {
        if (t <= 0.0) return 0.0;
        const double d = std::pow(t, q);
        const double jac = q * std::pow(t, q - 1.0);
        return f(a + d, d, len - d) * jac;
      };
      add(adaptive_gk(g, 0.0, tmax, piece_opt, calls, f));
    }
    if (pr > 0.0) {
      const double q = 1.0 / (1.0 - pr);
      const double piece = b - mid;
      const double tmax = std::pow(piece, 1.0 / q);
      SmoothFn g = [&, q](double t) {
        if (t <= 0.0) return 0.0;
        const double d = std::pow(t, q);
        const double jac = q * std::pow(t, q - 1.0);
        return f(b - d, len - d, d) * jac;
      };
      add(adaptive_gk(g, 0.0, tmax, piece_opt, calls, f));
    }
  }
  total.evaluations = f.calls;
  return total;
}

double probe_exponent(Counter& f, double a, double b, bool at_left) {
  const double len = b - a;
  const double d1 = 1e-7 * len;
  const double d2 = 1e-9 * len;
  auto eval = [&](double d) {
    return at_left ? std::abs(f(a + d, d, len - d)) : std::abs(f(b - d, len - d, d));
  };
  const double f1 = eval(d1);
  const double f2 = eval(d2);
  if (f1 == 0.0 || f2 == 0.0) return 0.0;
  return std::log(f2 / f1) / std::log(d1 / d2);
}

}  // namespace

void SingularitySpec::validate() const {
  auto ok = [](double p) { return p >= 0.0 && p < 1.0 && std::isfinite(p); };
  if (!ok(left_exponent) || !ok(right_exponent)) {
    throw DomainError("singularity exponents must lie in [0, 1)");
  }
}

QuadScheme parse_quad_scheme(const std::string& name) {
  if (name == "de") return QuadScheme::double_exponential;
  if (name == "subst") return QuadScheme::substitution;
  throw ValidationError("unknown quadrature scheme '" + name + "' (expected de or subst)");
}

std::string to_string(QuadScheme scheme) {
  return scheme == QuadScheme::double_exponential ? "de" : "subst";
}

double empirical_endpoint_exponent(const EndpointIntegrand& f, double a, double b, bool at_left) {
  Counter c{f};
  return probe_exponent(c, a, b, at_left);
}

QuadResult integrate_endpoint_singular(const EndpointIntegrand& f, double a, double b,
                                       const SingularitySpec& sing, const QuadOptions& options) {
  if (!(a < b)) throw DomainError("integration interval requires a < b");
  sing.validate();
  if (!(options.rel_tol > 0.0) || options.abs_floor < 0.0 || options.max_depth < 1) {
    throw DomainError("invalid quadrature tolerances");
  }
  Counter counter{f};

  double pl = sing.left_exponent;
  double pr = sing.right_exponent;
  for (bool left : {true, false}) {
    const double p = probe_exponent(counter, a, b, left);
    if (p >= kDivergenceThreshold) {
      std::ostringstream os;
      os << "integrand is not integrable at the " << (left ? "left" : "right")
         << " endpoint (empirical exponent " << p << ")";
      throw NonIntegrableError(os.str(), p);
    }
    // an undeclared singularity still gets desingularized
    if (p > 0.05) {
      double& declared = left ? pl : pr;
      const double snapped = std::abs(p - 0.5) < 0.02 ? 0.5 : std::min(p, 0.95);
      declared = std::max(declared, snapped);
    }
  }
  if (sing.hint == SingularityHint::inverse_sqrt) {
    if (sing.left_exponent > 0.0) pl = 0.5;
    if (sing.right_exponent > 0.0) pr = 0.5;
  }

  if (options.scheme == QuadScheme::double_exponential) {
    return integrate_de(counter, a, b, pl, pr, options);
  }
  return integrate_subst(counter, a, b, pl, pr, options);
}

}  // namespace dlab
