#pragma once

// One-dimensional peak location and half-maximum width of smooth line shapes.

#include <cmath>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "sivsim/errors.hpp"

namespace sivsim::detail {

struct Peak {
  double x = 0.0;
  double height = 0.0;
  double lo = 0.0;  // left half-maximum crossing
  double hi = 0.0;  // right half-maximum crossing
  double fwhm() const { return hi - lo; }
};

/// Maximum of fn on [a, b]: coarse scan with `samples` points, then Brent.
inline std::pair<double, double> locate_max(const std::function<double(double)>& fn, double a, double b,
                                            int samples) {
  const double h = (b - a) / (samples - 1);
  int best = 0;
  double best_val = -INFINITY;
  for (int i = 0; i < samples; ++i) {
    const double v = fn(a + h * i);
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  const double lo = a + h * std::max(best - 1, 0);
  const double hi = a + h * std::min(best + 1, samples - 1);
  std::uintmax_t iters = 200;
  const auto [x, negf] =
      boost::math::tools::brent_find_minima([&](double x) { return -fn(x); }, lo, hi, 40, iters);
  return -negf >= best_val ? std::pair{x, -negf} : std::pair{a + h * best, best_val};
}

/// Crossing of fn = level walking from x0 in direction dir with initial step h.
inline double half_crossing(const std::function<double(double)>& fn, double x0, double level, double dir,
                            double h) {
  double inner = x0;
  double outer = x0 + dir * h;
  for (int k = 0; fn(outer) > level; ++k) {
    if (k > 60) throw Error("line shape does not fall to half maximum");
    inner = outer;
    h *= 2.0;
    outer = x0 + dir * h;
  }
  std::uintmax_t iters = 200;
  auto tol = boost::math::tools::eps_tolerance<double>(44);
  const auto [l, r] = boost::math::tools::toms748_solve([&](double x) { return fn(x) - level; },
                                                        std::min(inner, outer), std::max(inner, outer), tol, iters);
  return 0.5 * (l + r);
}

/// Peak on [a, b] with its full width at half maximum; `step` seeds the
/// outward search for the half-maximum points.
inline Peak find_peak(const std::function<double(double)>& fn, double a, double b, int samples, double step) {
  Peak p;
  std::tie(p.x, p.height) = locate_max(fn, a, b, samples);
  p.lo = half_crossing(fn, p.x, 0.5 * p.height, -1.0, step);
  p.hi = half_crossing(fn, p.x, 0.5 * p.height, +1.0, step);
  return p;
}

}  // namespace sivsim::detail
