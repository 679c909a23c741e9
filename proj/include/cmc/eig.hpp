#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "cmc/discretize.hpp"

namespace cmc {

/// Ascending eigenvalues of A x = lambda M x, optionally with M-orthonormal
/// eigenvectors as columns. `constrained` marks the volume-constrained
/// (mean-zero) problem.
struct EigenResult {
  std::vector<double> values;
  std::optional<Eigen::MatrixXd> vectors;
  bool constrained = false;
  OperatorMeta meta;
};

struct IndexNullity {
  int index = 0;    // eigenvalues below -tol
  int nullity = 0;  // eigenvalues within [-tol, tol]
  double tol = 0.0;
};

/// Blocks of this size or smaller are diagonalized in full by implicit QL;
/// larger ones use Sturm bisection for the wanted eigenvalues.
inline constexpr std::size_t kDenseBlockLimit = 256;

/// The k smallest Dirichlet eigenpairs. The problem is scaled by M^{-1/2}
/// and each tridiagonal block is solved on its own, then the block spectra
/// are merged; eigenvectors therefore live on a single block.
EigenResult solve_dirichlet(const AssembledOperator& op, std::size_t k, bool want_vectors = true);

/// The k smallest eigenvalues of f^T A f on {w^T f = 0, |f|_M = 1}.
///
/// With c_j = w^T v_j the constrained spectrum is the Dirichlet eigenvalues
/// with c_j = 0 together with the roots of the secular function
///   S(mu) = sum_j c_j^2 / (lambda_j - mu) = w^T (A - mu M)^{-1} w.
/// S is evaluated exactly through the LDL^T factorization of the scaled
/// tridiagonal blocks, which also yields the inertia of the bordered system
/// [[A - mu M, w], [w^T, 0]]. Hence
///   #{twisted eigenvalues < mu} = #{lambda_j < mu} + [S(mu) > 0] - 1,
/// and the k-th twisted eigenvalue is bisected inside [lambda_k, lambda_{k+1}].
/// Degenerate Dirichlet clusters and c_j = 0 persistors fall out of the count
/// without an explicit deflation step. Interlacing is exact by construction.
///
/// Eigenvectors come from inverse iteration on the constrained (KKT) resolvent.
/// If w vanishes the constraint is vacuous and the Dirichlet result is returned.
EigenResult solve_twisted(const AssembledOperator& op, std::size_t k, bool want_vectors = true);

/// Eigenvalues only, both problems from one Dirichlet pass.
struct SpectrumPair {
  EigenResult dirichlet;
  EigenResult twisted;
};
SpectrumPair solve_pair(const AssembledOperator& op, std::size_t k);

/// Reference route for the constrained problem: an explicit orthonormal basis
/// of the complement of the scaled constraint (one Householder reflector) and
/// a dense cyclic-Jacobi diagonalization of the projected matrix. O(n^3).
EigenResult solve_twisted_projected(const AssembledOperator& op, std::size_t k);

IndexNullity index_nullity(const EigenResult& res, double tol);

/// Rayleigh quotient f^T A f / f^T M f.
double rayleigh(const AssembledOperator& op, const Eigen::VectorXd& f);

/// Number of Dirichlet eigenvalues strictly below mu, over the full spectrum.
int dirichlet_count_below(const AssembledOperator& op, double mu);

/// Number of constrained eigenvalues strictly below mu, over the full spectrum.
int twisted_count_below(const AssembledOperator& op, double mu);

/// Exact index/nullity of the full discrete spectrum by inertia counts.
IndexNullity dirichlet_index_nullity(const AssembledOperator& op, double tol);
IndexNullity twisted_index_nullity(const AssembledOperator& op, double tol);

/// max(1e-6, kappa h^2 (1 + |B|^2)), kappa = 5: the O(h^2) discretization
/// error of an eigenvalue near zero, where the -Laplacian part equals |B|^2.
double default_null_tol(double h, double b_sq);

}  // namespace cmc
