#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "cmc/surfaces.hpp"

namespace cmc {

/// One decoupled tridiagonal block of a discretized quadratic form.
///
/// The block represents I(f, f) = int |Df|^2 - |B|^2 f^2 restricted to the
/// nodes of one component (or one azimuthal mode), with zero Dirichlet data
/// at the excluded boundary nodes:
///   f^T A f ~ I(f, f),   f^T M g ~ int f g,   w^T f ~ int_D f.
struct OperatorBlock {
  std::vector<double> diag;  // A_ii
  std::vector<double> off;   // A_{i,i+1}, size n-1
  std::vector<double> mass;  // M_ii > 0
  std::vector<double> mean;  // w_i
  std::vector<double> nodes;
  double h = 0.0;

  std::size_t size() const { return diag.size(); }
};

struct OperatorMeta {
  std::optional<FamilyKind> family;
  double t = 0.0;
  int m = 0;  // azimuthal mode; 0 for dim-1 problems
  int n = 0;  // interior points per component (radial: per mode)
  bool radial = false;
};

/// Block-diagonal symmetric discretization with diagonal mass and a single
/// global mean functional spanning every block.
class AssembledOperator {
 public:
  AssembledOperator(std::vector<OperatorBlock> blocks, OperatorMeta meta);

  const std::vector<OperatorBlock>& blocks() const { return blocks_; }
  const OperatorMeta& meta() const { return meta_; }
  void set_family(FamilyKind kind) { meta_.family = kind; }
  std::size_t size() const { return size_; }
  std::size_t offset(std::size_t block) const { return offsets_[block]; }

  Eigen::MatrixXd stiffness_dense() const;
  Eigen::VectorXd mass_diagonal() const;
  Eigen::VectorXd mean() const;

  /// A f, block by block.
  Eigen::VectorXd apply(const Eigen::VectorXd& f) const;

  bool mean_vanishes() const;

 private:
  std::vector<OperatorBlock> blocks_;
  std::vector<std::size_t> offsets_;
  std::size_t size_ = 0;
  OperatorMeta meta_;
};

/// Second-order central differences for -f'' - b_sq f on every component of
/// a dim-1 slice, n interior nodes per component.
AssembledOperator assemble_interval(const DomainSlice& slice, double b_sq, int n);

/// Radial operator for azimuthal mode m on a rotationally symmetric slice:
///   -(1/w)(w u')' + (m^2 / w^2) u - |B|^2 u,   weight w = r or sin(theta).
///
/// Finite-volume assembly keeps the matrix exactly symmetric: stiffness
/// entries are face fluxes w(r_{i+1/2}) / h plus the node term
/// h (m^2 / w(r_i) - |B|^2 w(r_i)). For m = 0 nodes are cell-centred,
/// r_i = (i - 1/2) h with h = t / (n + 1/2), and the pole face carries zero
/// flux (w(0) = 0), which is the zero-derivative regularity closure. For
/// m >= 1 nodes are r_i = i h with h = t / (n + 1) and u(0) = 0.
///
/// Mass and mean include the 2 pi angular factor. The mean vector vanishes
/// for m >= 1.
AssembledOperator assemble_radial(const DomainSlice& slice, const SurfaceModel& surface, int m, int n);

/// w with w^T f ~ int_D f.
Eigen::VectorXd mean_functional(const AssembledOperator& op);

/// Grid density used when assembling along a family.
struct Resolution {
  int n_per_unit = 400;
  int n_min = 16;
  int m_max = 8;
};

/// Interior points for a component of the given length.
int points_for_length(double length, const Resolution& res);

/// Dim-1 family slices: interval assembly sized by the resolution. Radial
/// slices: the m-th azimuthal mode.
AssembledOperator assemble(const DomainFamily& family, double t, const Resolution& res, int m = 0);

}  // namespace cmc
