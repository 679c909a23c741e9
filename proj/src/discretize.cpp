#include "cmc/discretize.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cmc/errors.hpp"

namespace cmc {

AssembledOperator::AssembledOperator(std::vector<OperatorBlock> blocks, OperatorMeta meta)
    : blocks_(std::move(blocks)), meta_(meta) {
  if (blocks_.empty()) throw InputError("operator needs at least one block");
  offsets_.reserve(blocks_.size());
  for (const auto& b : blocks_) {
    if (b.size() == 0 || b.off.size() + 1 != b.size() || b.mass.size() != b.size() ||
        b.mean.size() != b.size()) {
      throw InputError("inconsistent operator block sizes");
    }
    offsets_.push_back(size_);
    size_ += b.size();
  }
}

Eigen::MatrixXd AssembledOperator::stiffness_dense() const {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(size_, size_);
  for (std::size_t k = 0; k < blocks_.size(); ++k) {
    const auto& b = blocks_[k];
    const auto o = static_cast<Eigen::Index>(offsets_[k]);
    for (std::size_t i = 0; i < b.size(); ++i) {
      const auto r = o + static_cast<Eigen::Index>(i);
      a(r, r) = b.diag[i];
      if (i + 1 < b.size()) {
        a(r, r + 1) = b.off[i];
        a(r + 1, r) = b.off[i];
      }
    }
  }
  return a;
}

Eigen::VectorXd AssembledOperator::mass_diagonal() const {
  Eigen::VectorXd m(size_);
  for (std::size_t k = 0; k < blocks_.size(); ++k) {
    std::copy(blocks_[k].mass.begin(), blocks_[k].mass.end(), m.data() + offsets_[k]);
  }
  return m;
}

Eigen::VectorXd AssembledOperator::mean() const {
  Eigen::VectorXd w(size_);
  for (std::size_t k = 0; k < blocks_.size(); ++k) {
    std::copy(blocks_[k].mean.begin(), blocks_[k].mean.end(), w.data() + offsets_[k]);
  }
  return w;
}

Eigen::VectorXd AssembledOperator::apply(const Eigen::VectorXd& f) const {
  if (static_cast<std::size_t>(f.size()) != size_) throw InputError("vector size mismatch");
  Eigen::VectorXd y(size_);
  for (std::size_t k = 0; k < blocks_.size(); ++k) {
    const auto& b = blocks_[k];
    const double* x = f.data() + offsets_[k];
    double* out = y.data() + offsets_[k];
    const std::size_t n = b.size();
    for (std::size_t i = 0; i < n; ++i) {
      double s = b.diag[i] * x[i];
      if (i > 0) s += b.off[i - 1] * x[i - 1];
      if (i + 1 < n) s += b.off[i] * x[i + 1];
      out[i] = s;
    }
  }
  return y;
}

bool AssembledOperator::mean_vanishes() const {
  return std::all_of(blocks_.begin(), blocks_.end(), [](const OperatorBlock& b) {
    return std::all_of(b.mean.begin(), b.mean.end(), [](double v) { return v == 0.0; });
  });
}

AssembledOperator assemble_interval(const DomainSlice& slice, double b_sq, int n) {
  if (n < 3) throw InputError("need at least 3 interior points per component");
  if (slice.components.empty()) throw InputError("empty slice");
  if (slice.radial) throw InputError("assemble_interval needs a dim-1 slice");

  std::vector<OperatorBlock> blocks;
  blocks.reserve(slice.components.size());
  const auto un = static_cast<std::size_t>(n);
  for (const auto& c : slice.components) {
    if (!(c.length() > 0.0)) throw InputError("component with non-positive length");
    OperatorBlock b;
    b.h = c.length() / (n + 1);
    const double h = b.h;
    // (1/h) tridiag(-1, 2, -1) - b_sq h I, i.e. h times the difference operator
    b.diag.assign(un, 2.0 / h - b_sq * h);
    b.off.assign(un - 1, -1.0 / h);
    b.mass.assign(un, h);
    b.mean.assign(un, h);
    b.nodes.resize(un);
    for (std::size_t i = 0; i < un; ++i) b.nodes[i] = c.lo + static_cast<double>(i + 1) * h;
    blocks.push_back(std::move(b));
  }
  return AssembledOperator(std::move(blocks), {std::nullopt, slice.t, 0, n, false});
}

AssembledOperator assemble_radial(const DomainSlice& slice, const SurfaceModel& surface, int m, int n) {
  if (surface.dim != 2) throw InputError("assemble_radial needs a 2-dimensional surface");
  if (m < 0) throw InputError("azimuthal mode must be >= 0");
  if (n < 3) throw InputError("need at least 3 radial points");
  if (!slice.radial || slice.components.size() != 1) throw InputError("assemble_radial needs a radial slice");

  const double t = slice.components.front().hi;
  const double two_pi = 2.0 * std::numbers::pi;
  const double b_sq = surface.b_norm_sq;
  const auto un = static_cast<std::size_t>(n);
  const double m2 = static_cast<double>(m) * static_cast<double>(m);

  OperatorBlock b;
  b.diag.resize(un);
  b.off.resize(un - 1);
  b.mass.resize(un);
  b.mean.resize(un);
  b.nodes.resize(un);

  // node i sits at r_i; faces at r_i -/+ h/2
  double shift = 0.0;
  if (m == 0) {
    b.h = t / (n + 0.5);
    shift = -0.5;
  } else {
    b.h = t / (n + 1);
  }
  const double h = b.h;
  for (std::size_t i = 0; i < un; ++i) {
    const double r = (static_cast<double>(i + 1) + shift) * h;
    const double w = surface.weight(r);
    const double lo_face = (m == 0 && i == 0) ? 0.0 : surface.weight(r - 0.5 * h);
    const double hi_face = surface.weight(r + 0.5 * h);
    b.nodes[i] = r;
    b.diag[i] = (lo_face + hi_face) / h + h * (m2 / w - b_sq * w);
    if (i + 1 < un) b.off[i] = -hi_face / h;
    b.mass[i] = w * h;
  }
  for (auto* v : {&b.diag, &b.off, &b.mass}) {
    for (double& x : *v) x *= two_pi;
  }
  if (m == 0) {
    b.mean = b.mass;
  } else {
    std::fill(b.mean.begin(), b.mean.end(), 0.0);
  }
  return AssembledOperator({std::move(b)}, {std::nullopt, slice.t, m, n, true});
}

Eigen::VectorXd mean_functional(const AssembledOperator& op) { return op.mean(); }

int points_for_length(double length, const Resolution& res) {
  const double want = std::ceil(static_cast<double>(res.n_per_unit) * length);
  return std::max(std::max(res.n_min, 3), static_cast<int>(want));
}

AssembledOperator assemble(const DomainFamily& family, double t, const Resolution& res, int m) {
  const DomainSlice slice = domain_at(family, t);
  double longest = 0.0;
  for (const auto& c : slice.components) longest = std::max(longest, c.length());
  const int n = points_for_length(longest, res);
  AssembledOperator op = slice.radial ? assemble_radial(slice, family.surface, m, n)
                                      : assemble_interval(slice, family.surface.b_norm_sq, n);
  op.set_family(family.kind);
  return op;
}

}  // namespace cmc
