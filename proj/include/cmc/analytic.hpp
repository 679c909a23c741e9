#pragma once

#include <vector>

namespace cmc::analytic {

/// k^2 pi^2 / t^2 - 1: Dirichlet eigenvalues of -f'' - f on (0, t).
double circle_dirichlet_lambda(int k, double t);

/// psi(t) = 2 - 2 cos t - t sin t. Its positive zeros are exactly the interval
/// lengths carrying a Jacobi field for -f'' - f.
double psi(double t);

/// The k-th positive zero l_k of psi, with k pi < l_k <= (k+1) pi.
/// Odd k: l_k = (k+1) pi exactly. Even k: bisection on ((k+1/2) pi, (k+1) pi).
double psi_zero(int k);

/// The first `count` zeros of psi.
std::vector<double> psi_zeros(int count);

/// (l_k / t)^2 - 1: the k-th volume-constrained eigenvalue on (0, t).
///
/// -u'' - u = lambda u + c with u(0) = u(t) = 0 and int u = 0 has a nontrivial
/// solution iff psi(omega t) = 0 where omega^2 = 1 + lambda.
double circle_twisted_lambda(int k, double t);

/// Solvability determinant of {u(0) = 0, u(t) = 0, int_0^t u = 0} for
///   u = A cos(w x) + B sin(w x) / w + c (cos(w x) - 1) / w^2,  w^2 = 1 + lambda,
/// which equals psi(w t) / w^4. This basis stays regular through w = 0, where
/// the value is t^4 / 12; the determinant is analytic in lambda and vanishes
/// exactly at the constrained eigenvalues. At lambda = 0 it equals psi(t).
///
/// Branches: |(1 + lambda) t^2| < 1/2 uses a 6-term series in (1 + lambda) t^2;
/// lambda > -1 the trigonometric form; lambda < -1 the hyperbolic form
/// (2 - 2 cosh s + s sinh s) / kappa^4, which has no positive roots.
double twisted_det(double lambda, double t);

/// Bessel function of the first kind J_m(x), x >= 0: ascending series for
/// x <= 12, Miller backward recurrence above.
double bessel_j(int m, double x);

/// n-th positive zero of J_m (McMahon bracket verified by a sign-change count).
double bessel_zero(int m, int n);

/// (j_{m,n} / t)^2 - 1: eigenvalue of -Laplace - 1 on the flat disk of radius t
/// for azimuthal mode m.
double disk_dirichlet_lambda(int m, int n, double t);

/// First Dirichlet eigenvalue of -f'' on the gap family: 1/t^2 while the two
/// congruent components are separate (t < 1), 1/4 once they join (t = 1).
double gap_lambda1(double t);

}  // namespace cmc::analytic
