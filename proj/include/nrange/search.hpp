#pragma once

#include <cmath>
#include <utility>

#include "nrange/types.hpp"

namespace nrange {

struct MinResult {
  Real x = 0.0;
  Real fx = 0.0;
};

/// Golden-section minimization on [a, b]; the best of the endpoints and the
/// final bracket is returned, so it is safe on non-unimodal input.
template <typename F>
MinResult golden_min(F&& f, Real a, Real b, Real xtol = 1e-13, int max_iter = 200) {
  const Real g = (std::sqrt(5.0) - 1.0) / 2.0;
  MinResult best{a, f(a)};
  const Real fb = f(b);
  if (fb < best.fx) best = {b, fb};
  Real c = b - g * (b - a);
  Real d = a + g * (b - a);
  Real fc = f(c);
  Real fd = f(d);
  for (int it = 0; it < max_iter && std::abs(b - a) > xtol; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  if (fc < best.fx) best = {c, fc};
  if (fd < best.fx) best = {d, fd};
  return best;
}

/// Bisection on a predicate with pred(lo) == false and pred(hi) == true;
/// returns the final (lo, hi) bracket.
template <typename P>
std::pair<Real, Real> bisect_predicate(P&& pred, Real lo, Real hi, int iters = 60) {
  for (int it = 0; it < iters; ++it) {
    const Real mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (pred(mid))
      hi = mid;
    else
      lo = mid;
  }
  return {lo, hi};
}

}  // namespace nrange
