// ============================================================================
// gamma.cpp -- upper incomplete gamma for real order
//
// Positive orders use the classic series / continued-fraction pair.  The
// Lentz continued fraction also converges for negative orders and is the
// primary path there: the alternative downward recurrence
//   Gamma(a, x) = (Gamma(a+1, x) - x^a e^(-x)) / a
// amplifies roundoff by ~x/|a| per step once x exceeds |a| (the subtraction
// cancels catastrophically), so it is kept only for x < 0.25 where every
// amplifying step has x/|c| bounded and the fraction converges slowly.
// Order zero is the exponential integral E1.
// ============================================================================

#include "latenergy/gamma.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace laten {

namespace {

constexpr double kEps = 1e-16;
constexpr int kMaxIter = 600;

// Lower incomplete gamma by series, x < a + 1, a > 0.
double lower_gamma_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < kMaxIter; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::abs(term) < kEps * std::abs(sum)) break;
  }
  return sum * std::exp(a * std::log(x) - x);
}

// Upper incomplete gamma by modified Lentz continued fraction, x >= ~a + 1.
double upper_gamma_cf(double a, double x) {
  const double fpmin = std::numeric_limits<double>::min() / kEps;
  double b = x + 1.0 - a;
  double c = 1.0 / fpmin;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIter; ++i) {
    const double an = -static_cast<double>(i) * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < fpmin) d = fpmin;
    c = b + an / c;
    if (std::abs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return std::exp(a * std::log(x) - x) * h;
}

// E1(x) = Gamma(0, x).
double expint_e1(double x) {
  if (x < 1.0) {
    // -gamma_E - ln x + sum (-1)^(n+1) x^n / (n n!)
    constexpr double kEulerGamma = 0.57721566490153286060651209008240243;
    double sum = -kEulerGamma - std::log(x);
    double term = 1.0;
    for (int n = 1; n < kMaxIter; ++n) {
      term *= -x / n;
      const double add = -term / n;
      sum += add;
      if (std::abs(add) < kEps * std::abs(sum)) break;
    }
    return sum;
  }
  return upper_gamma_cf(0.0, x);
}

double upper_gamma_positive(double a, double x) {
  if (x < a + 1.0) return std::tgamma(a) - lower_gamma_series(a, x);
  return upper_gamma_cf(a, x);
}

}  // namespace

double upper_gamma(double a, double x) {
  if (!(x > 0.0)) {
    throw std::invalid_argument("upper_gamma requires x > 0");
  }
  if (std::abs(a) < 1e-13) return expint_e1(x);
  if (a > 0.0) return upper_gamma_positive(a, x);
  if (x >= 0.25) return upper_gamma_cf(a, x);

  const double lx = std::log(x);
  const double r = std::round(a);
  if (std::abs(a - r) < 1e-13) {
    // Negative integer order: the recurrence chain passes through order 0,
    // so it must start from E1 rather than divide by zero on the way down.
    const int k = static_cast<int>(-r);
    double c = 0.0;
    double G = expint_e1(x);
    for (int i = 0; i < k; ++i) {
      c -= 1.0;
      G = (G - std::exp(c * lx - x)) / c;
    }
    return G;
  }

  // Lift the order into (0, 1), then recurse back down.
  const int k = static_cast<int>(std::ceil(-a));
  double c = a + k;
  double G = upper_gamma_positive(c, x);
  for (int i = 0; i < k; ++i) {
    c -= 1.0;
    G = (G - std::exp(c * lx - x)) / c;
  }
  return G;
}

double upper_gamma_scaled(double a, double x) {
  return upper_gamma(a, x) * std::pow(x, -a);
}

}  // namespace laten
