#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "utiliconf/errors.hpp"

namespace utiliconf {

struct SimpsonOptions {
  double rel_tol = 1e-9;
  double abs_floor = 1e-15;
  int initial_panels = 32;
  int max_depth = 48;
};

namespace detail {

template <class F>
double simpson_refine(const F& f, double a, double b, double fa, double fm, double fb, double whole,
                      double tol, int depth, int& unconverged, double& worst_error) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  if (depth <= 0 || m <= a || m >= b) {
    ++unconverged;
    worst_error = std::max(worst_error, std::abs(delta));
    return left + right + delta / 15.0;
  }
  return simpson_refine(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, unconverged, worst_error) +
         simpson_refine(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, unconverged, worst_error);
}

}  // namespace detail

// Adaptive composite Simpson rule on [a, b]. The interval is first split into
// `initial_panels` equal panels so that narrow features are not skipped, then
// each panel is refined recursively. Throws NumericError if any panel hits
// the depth limit without meeting its share of the tolerance.
template <class F>
double adaptive_simpson(const F& f, double a, double b, const SimpsonOptions& opt = {}) {
  if (!(b > a)) return 0.0;
  const int panels = std::max(1, opt.initial_panels);
  const double h = (b - a) / panels;

  // Coarse pass to size the absolute tolerance.
  double coarse = 0.0;
  double f_prev = f(a);
  std::vector<double> nodes(panels + 1), f_nodes(panels + 1), f_mids(panels);
  nodes[0] = a;
  f_nodes[0] = f_prev;
  for (int k = 0; k < panels; ++k) {
    const double lo = a + k * h;
    const double hi = (k + 1 == panels) ? b : a + (k + 1) * h;
    nodes[k + 1] = hi;
    f_mids[k] = f(0.5 * (lo + hi));
    f_nodes[k + 1] = f(hi);
    coarse += (hi - lo) / 6.0 * (f_nodes[k] + 4.0 * f_mids[k] + f_nodes[k + 1]);
  }
  const double tol = std::max(opt.rel_tol * std::abs(coarse), opt.abs_floor);

  double total = 0.0;
  int unconverged = 0;
  double worst = 0.0;
  for (int k = 0; k < panels; ++k) {
    const double lo = nodes[k];
    const double hi = nodes[k + 1];
    const double whole = (hi - lo) / 6.0 * (f_nodes[k] + 4.0 * f_mids[k] + f_nodes[k + 1]);
    total += detail::simpson_refine(f, lo, hi, f_nodes[k], f_mids[k], f_nodes[k + 1], whole,
                                    tol / panels, opt.max_depth, unconverged, worst);
  }
  if (unconverged > 0 && worst > 1e3 * tol) {
    std::ostringstream msg;
    msg << "adaptive Simpson did not converge on [" << a << ", " << b << "]: " << unconverged
        << " subintervals at depth limit, worst local error " << worst << " vs tolerance " << tol
        << ", estimate " << total;
    throw NumericError(msg.str());
  }
  return total;
}

}  // namespace utiliconf
