#pragma once
// ============================================================================
// gamma.hpp -- upper incomplete gamma function for real order
//
// upper_gamma(a, x) = integral_x^inf t^(a-1) e^(-t) dt,  x > 0, a real.
//
// Orders down to a ~ -15 and x >= ~1 are the regime exercised by the
// modular-split lattice sums; accuracy there is ~1e-12 relative or better.
// ============================================================================

namespace laten {

double upper_gamma(double a, double x);

// g(a, x) = upper_gamma(a, x) * x^(-a).  This combination is what the
// modular-split sums consume; computing it jointly avoids overflow for
// moderately large |a|.
double upper_gamma_scaled(double a, double x);

}  // namespace laten
