#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

namespace cmc::linalg {

/// Symmetric tridiagonal matrix in standard form (unit mass).
struct SymTridiagonal {
  std::vector<double> diag;
  std::vector<double> off;  // size n-1

  std::size_t size() const { return diag.size(); }
  /// Gershgorin enclosure of the spectrum.
  std::pair<double, double> gershgorin() const;
  double norm_bound() const;
};

/// Number of eigenvalues strictly below mu (LDL^T inertia).
int sturm_count(const SymTridiagonal& t, double mu);

/// Inertia of T - mu together with the secular value z^T (T - mu)^{-1} z,
/// both from one LDL^T sweep.
struct SecularProbe {
  int below = 0;
  double secular = 0.0;
};
SecularProbe secular_probe(const SymTridiagonal& t, std::span<const double> z, double mu);

/// The k smallest eigenvalues by Sturm bisection, ascending.
std::vector<double> smallest_eigenvalues(const SymTridiagonal& t, std::size_t k);

/// Full eigendecomposition by implicit-shift QL. Eigenvalues ascending;
/// columns of `vectors` orthonormal when requested (null skips the O(n^3)
/// accumulation). Throws NumericError past the sweep cap.
void ql_implicit(const SymTridiagonal& t, Eigen::VectorXd& values, Eigen::MatrixXd* vectors);

/// Solves (T - sigma I) x = rhs by Gaussian elimination with partial pivoting.
Eigen::VectorXd shifted_solve(const SymTridiagonal& t, double sigma, const Eigen::VectorXd& rhs);

/// Cyclic Jacobi rotations for a dense symmetric matrix. Eigenvalues
/// ascending, vectors as columns.
void jacobi_eigen(const Eigen::MatrixXd& a, Eigen::VectorXd& values, Eigen::MatrixXd& vectors);

}  // namespace cmc::linalg
