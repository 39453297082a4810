#pragma once

#include <cmath>
#include <utility>

namespace fopa {

// Golden-section search for the minimum of a unimodal f on [a, b].
// Stops when the bracket is narrower than tol·(1 + |x|).
template <typename T, typename F>
T golden_section_minimize(F&& f, T a, T b, T tol, int max_iter = 500) {
  const T inv_phi = (std::sqrt(T(5)) - T(1)) / T(2);
  T c = b - inv_phi * (b - a);
  T d = a + inv_phi * (b - a);
  T fc = f(c);
  T fd = f(d);
  for (int it = 0; it < max_iter && std::abs(b - a) > tol * (T(1) + std::abs(c)); ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return (a + b) / T(2);
}

}  // namespace fopa
