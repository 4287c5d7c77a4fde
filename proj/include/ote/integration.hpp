#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "ote/types.hpp"

namespace ote {

struct Estimate {
  cplx value = 0.0;
  double error = 0.0;             // absolute error estimate
  std::size_t evaluations = 0;    // leaf integrand calls
};

struct AdaptiveOptions {
  double rel_tol = 1e-6;
  double abs_tol = 0.0;
  int max_panels = 2000;
  int workers = 1;                // >1 evaluates panel nodes concurrently
  bool throw_on_failure = true;
};

// Integrand returning a value and, for nested integrals, the error of that value.
using Integrand1D = std::function<Estimate(double)>;

// Globally adaptive 7/15-point Gauss-Kronrod on [breaks[0], breaks.back()],
// bisecting the worst panels until sum |K - G| <= max(abs_tol, rel_tol * scale),
// scale = max(|I|, 0.1 * int |f|). Panel sums run in a fixed order.
Estimate integrate_adaptive(const Integrand1D& f, const std::vector<double>& breaks,
                            const AdaptiveOptions& options);

// Leaf convenience wrapper.
Estimate integrate_adaptive(const std::function<cplx(double)>& f, double a, double b,
                            const AdaptiveOptions& options);

}  // namespace ote
