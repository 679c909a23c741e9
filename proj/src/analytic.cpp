#include "cmc/analytic.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "cmc/errors.hpp"

namespace cmc::analytic {

namespace {

constexpr double kPi = std::numbers::pi;

// Bisection of f on [lo, hi] given a sign change; runs to machine resolution.
template <typename F>
double bisect(F&& f, double lo, double hi) {
  double flo = f(lo);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double bessel_series(int m, double x) {
  const double half = 0.5 * x;
  double term = 1.0;
  for (int i = 1; i <= m; ++i) term *= half / i;
  double sum = term;
  const double q = half * half;
  for (int k = 1; k < 200; ++k) {
    term *= -q / (static_cast<double>(k) * static_cast<double>(k + m));
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum) && k > half) break;
  }
  return sum;
}

double bessel_miller(int m, double x) {
  const double top = std::max(static_cast<double>(m), x);
  int start = static_cast<int>(top + 20.0 + std::sqrt(60.0 * top));
  start += start % 2;
  double next = 0.0;  // J_{k+1}
  double cur = 1e-30; // J_k
  double result = 0.0;
  double norm = 0.0;
  for (int k = start; k > 0; --k) {
    const double prev = 2.0 * k / x * cur - next;  // J_{k-1}
    next = cur;
    cur = prev;
    if (std::abs(cur) > 1e250) {
      cur *= 1e-250;
      next *= 1e-250;
      result *= 1e-250;
      norm *= 1e-250;
    }
    if ((k - 1) == m) result = cur;
    if ((k - 1) % 2 == 0 && k - 1 > 0) norm += 2.0 * cur;
  }
  norm += cur;  // J_0 + 2 sum J_{2j} = 1
  return result / norm;
}

}  // namespace

double circle_dirichlet_lambda(int k, double t) {
  const double kk = static_cast<double>(k);
  return kk * kk * kPi * kPi / (t * t) - 1.0;
}

double psi(double t) { return 2.0 - 2.0 * std::cos(t) - t * std::sin(t); }

double psi_zero(int k) {
  if (k < 1) throw InputError("psi_zero needs k >= 1");
  const double upper = (k + 1) * kPi;
  if (k % 2 == 1) {
    // psi(2 j pi) = 0 exactly; psi ~ -2 j pi delta nearby, a simple zero
    const double eps = 1e-6 * upper;
    if (!(psi(upper - eps) > 0.0 && psi(upper + eps) < 0.0)) {
      throw NumericError("psi has no sign change around " + std::to_string(upper), psi(upper - eps));
    }
    return upper;
  }
  const double lower = (k + 0.5) * kPi;
  const double a = psi(lower);
  const double b = psi(upper);
  if (!((a < 0.0) != (b < 0.0))) {
    throw NumericError("psi bracket without sign change for k = " + std::to_string(k), a);
  }
  return bisect(psi, lower, upper);
}

std::vector<double> psi_zeros(int count) {
  std::vector<double> out;
  for (int k = 1; k <= count; ++k) out.push_back(psi_zero(k));
  return out;
}

double circle_twisted_lambda(int k, double t) {
  const double l = psi_zero(k) / t;
  return l * l - 1.0;
}

double twisted_det(double lambda, double t) {
  const double w2 = 1.0 + lambda;
  const double x = w2 * t * t;
  const double t4 = t * t * t * t;
  if (std::abs(x) < 0.5) {
    // psi(s) / w^4 = t^4 sum_{n>=2} (-1)^n (2n - 2) / (2n)! x^{n-2}
    double sum = 0.0;
    double power = 1.0;
    double fact = 24.0;  // (2n)! for n = 2
    for (int n = 2; n <= 7; ++n) {
      const double sign = (n % 2 == 0) ? 1.0 : -1.0;
      sum += sign * (2.0 * n - 2.0) / fact * power;
      power *= x;
      fact *= (2.0 * n + 1.0) * (2.0 * n + 2.0);
    }
    return t4 * sum;
  }
  if (w2 > 0.0) {
    const double s = std::sqrt(w2) * t;
    return psi(s) / (w2 * w2);
  }
  const double s = std::sqrt(-w2) * t;
  return (2.0 - 2.0 * std::cosh(s) + s * std::sinh(s)) / (w2 * w2);
}

double bessel_j(int m, double x) {
  if (m < 0) throw InputError("bessel_j needs m >= 0");
  if (x < 0.0) throw InputError("bessel_j needs x >= 0");
  if (x == 0.0) return m == 0 ? 1.0 : 0.0;
  return x <= 12.0 ? bessel_series(m, x) : bessel_miller(m, x);
}

double bessel_zero(int m, int n) {
  if (m < 0 || n < 1) throw InputError("bessel_zero needs m >= 0, n >= 1");
  auto f = [m](double x) { return bessel_j(m, x); };

  const double mu = 4.0 * m * m;
  const double beta = (n + 0.5 * m - 0.25) * kPi;
  const double b8 = 8.0 * beta;
  const double guess = beta - (mu - 1.0) / b8 - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * b8 * b8 * b8);

  // Zeros of J_m all exceed m; count sign changes from there.
  const double start = std::max(static_cast<double>(m), 1e-3);
  const double step = 0.1;
  auto count_changes = [&](double upto) {
    int changes = 0;
    double prev = f(start);
    for (double x = start + step; x < upto; x += step) {
      const double cur = f(x);
      if ((cur < 0.0) != (prev < 0.0)) ++changes;
      prev = cur;
    }
    return changes;
  };

  const double lo = std::max(start, guess - 1.0);
  const double hi = guess + 1.0;
  if ((f(lo) < 0.0) != (f(hi) < 0.0) && count_changes(lo) == n - 1) {
    return bisect(f, lo, hi);
  }

  // McMahon is poor for small n and large m: scan instead.
  int changes = 0;
  double prev = f(start);
  for (double x = start + step;; x += step) {
    const double cur = f(x);
    if ((cur < 0.0) != (prev < 0.0) && ++changes == n) return bisect(f, x - step, x);
    prev = cur;
    if (x > start + (n + m + 4) * kPi) break;
  }
  throw NumericError("no bracket for Bessel zero", guess);
}

double disk_dirichlet_lambda(int m, int n, double t) {
  const double j = bessel_zero(m, n) / t;
  return j * j - 1.0;
}

double gap_lambda1(double t) {
  if (!(t > 0.0 && t <= 1.0)) throw InputError("gap_lambda1 needs 0 < t <= 1");
  return t < 1.0 ? 1.0 / (t * t) : 0.25;
}

}  // namespace cmc::analytic
