#include "cmc/eig.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <tuple>

#include "cmc/errors.hpp"
#include "cmc/tridiagonal.hpp"

namespace cmc {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// The generalized problem in standard form: T = M^{-1/2} A M^{-1/2} per
// block, z = M^{-1/2} w. Vectors in this space map back by v = M^{-1/2} q.
struct ScaledSystem {
  std::vector<linalg::SymTridiagonal> blocks;
  std::vector<std::size_t> offsets;
  Eigen::VectorXd z;
  Eigen::VectorXd inv_sqrt_mass;
  std::size_t n = 0;
  double norm = 0.0;

  static ScaledSystem from(const AssembledOperator& op) {
    ScaledSystem s;
    s.n = op.size();
    s.z.resize(static_cast<Eigen::Index>(s.n));
    s.inv_sqrt_mass.resize(static_cast<Eigen::Index>(s.n));
    for (std::size_t k = 0; k < op.blocks().size(); ++k) {
      const auto& b = op.blocks()[k];
      const std::size_t o = op.offset(k);
      linalg::SymTridiagonal t;
      t.diag.resize(b.size());
      t.off.resize(b.size() - 1);
      for (std::size_t i = 0; i < b.size(); ++i) {
        const double r = 1.0 / std::sqrt(b.mass[i]);
        s.inv_sqrt_mass(static_cast<Eigen::Index>(o + i)) = r;
        s.z(static_cast<Eigen::Index>(o + i)) = b.mean[i] * r;
        t.diag[i] = b.diag[i] * r * r;
      }
      for (std::size_t i = 0; i + 1 < b.size(); ++i) {
        t.off[i] = b.off[i] / std::sqrt(b.mass[i] * b.mass[i + 1]);
      }
      s.norm = std::max(s.norm, t.norm_bound());
      s.blocks.push_back(std::move(t));
      s.offsets.push_back(o);
    }
    return s;
  }

  Eigen::VectorXd solve(double sigma, const Eigen::VectorXd& rhs) const {
    Eigen::VectorXd x(rhs.size());
    for (std::size_t k = 0; k < blocks.size(); ++k) {
      const auto o = static_cast<Eigen::Index>(offsets[k]);
      const auto m = static_cast<Eigen::Index>(blocks[k].size());
      x.segment(o, m) = linalg::shifted_solve(blocks[k], sigma, rhs.segment(o, m));
    }
    return x;
  }

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const {
    Eigen::VectorXd y(x.size());
    for (std::size_t k = 0; k < blocks.size(); ++k) {
      const auto& t = blocks[k];
      const auto o = static_cast<Eigen::Index>(offsets[k]);
      const auto m = t.size();
      for (std::size_t i = 0; i < m; ++i) {
        const auto r = o + static_cast<Eigen::Index>(i);
        double s = t.diag[i] * x(r);
        if (i > 0) s += t.off[i - 1] * x(r - 1);
        if (i + 1 < m) s += t.off[i] * x(r + 1);
        y(r) = s;
      }
    }
    return y;
  }

  int count_below(double mu) const {
    int c = 0;
    for (const auto& t : blocks) c += linalg::sturm_count(t, mu);
    return c;
  }

  // Inertia of the bordered system; assumes z != 0.
  int twisted_count_below(double mu) const {
    for (int attempt = 0; attempt < 4; ++attempt) {
      int below = 0;
      double secular = 0.0;
      for (std::size_t k = 0; k < blocks.size(); ++k) {
        const auto& t = blocks[k];
        const auto p = linalg::secular_probe(
            t, std::span<const double>(z.data() + offsets[k], t.size()), mu);
        below += p.below;
        secular += p.secular;
      }
      if (std::isfinite(secular)) return below + (secular > 0.0 ? 1 : 0) - 1;
      // landed on a pole: nudge off it
      mu += 4.0 * kEps * (std::abs(mu) + norm);
    }
    throw NumericError("secular function not finite near mu", mu);
  }

  Eigen::VectorXd unscale(const Eigen::VectorXd& q) const { return inv_sqrt_mass.cwiseProduct(q); }
};

void orthogonalize(Eigen::VectorXd& x, const std::vector<Eigen::VectorXd>& basis) {
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& b : basis) x -= b.dot(x) * b;
  }
}

// Inverse iteration at mu, optionally restricted to z^T x = 0 through the
// KKT resolvent y = (T - mu)^{-1} (x - nu z) with nu chosen so z^T y = 0.
Eigen::VectorXd inverse_iteration(const ScaledSystem& sys, double mu, bool constrained,
                                  const std::vector<Eigen::VectorXd>& basis, std::uint64_t seed) {
  const auto n = static_cast<Eigen::Index>(sys.n);
  const double zz = constrained ? sys.z.squaredNorm() : 0.0;
  auto project = [&](Eigen::VectorXd& x) {
    if (constrained) x -= (sys.z.dot(x) / zz) * sys.z;
  };

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  auto random_start = [&]() {
    Eigen::VectorXd x(n);
    for (Eigen::Index i = 0; i < n; ++i) x(i) = unif(rng);
    project(x);
    orthogonalize(x, basis);
    return Eigen::VectorXd(x / x.norm());
  };

  Eigen::VectorXd b;
  double zb = 0.0;
  if (constrained) {
    b = sys.solve(mu, sys.z);
    zb = sys.z.dot(b);
    if (zb == 0.0) zb = std::numeric_limits<double>::min();
  }

  const double scale = sys.norm + std::abs(mu) + 1.0;
  Eigen::VectorXd x = random_start();
  double residual = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 8; ++it) {
    Eigen::VectorXd y = sys.solve(mu, x);
    if (constrained) {
      y -= (sys.z.dot(y) / zb) * b;
      project(y);
    }
    orthogonalize(y, basis);
    const double norm = y.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      x = random_start();
      continue;
    }
    x = y / norm;
    Eigen::VectorXd r = sys.apply(x) - mu * x;
    project(r);
    residual = r.norm();
    if (it >= 1 && residual <= 1e3 * kEps * scale) break;
  }
  if (!(residual <= 1e-6 * scale)) {
    throw NumericError("inverse iteration did not converge at mu = " + std::to_string(mu), residual);
  }
  return x;
}

struct BlockSpectrum {
  std::vector<double> values;
  Eigen::MatrixXd vectors;  // filled for the QL path only
  bool dense = false;
};

BlockSpectrum block_smallest(const linalg::SymTridiagonal& t, std::size_t k, bool want_vectors) {
  BlockSpectrum out;
  if (t.size() <= kDenseBlockLimit) {
    Eigen::VectorXd vals;
    linalg::ql_implicit(t, vals, want_vectors ? &out.vectors : nullptr);
    out.values.assign(vals.data(), vals.data() + k);
    out.dense = true;
  } else {
    out.values = linalg::smallest_eigenvalues(t, k);
  }
  return out;
}

}  // namespace

EigenResult solve_dirichlet(const AssembledOperator& op, std::size_t k, bool want_vectors) {
  if (k < 1 || k > op.size()) throw InputError("k out of range for solve_dirichlet");
  const ScaledSystem sys = ScaledSystem::from(op);

  std::vector<BlockSpectrum> spectra;
  std::vector<std::tuple<double, std::size_t, std::size_t>> merged;
  for (std::size_t b = 0; b < sys.blocks.size(); ++b) {
    const std::size_t kb = std::min(k, sys.blocks[b].size());
    spectra.push_back(block_smallest(sys.blocks[b], kb, want_vectors));
    for (std::size_t j = 0; j < kb; ++j) merged.emplace_back(spectra[b].values[j], b, j);
  }
  std::stable_sort(merged.begin(), merged.end());
  merged.resize(k);

  EigenResult res;
  res.meta = op.meta();
  res.values.reserve(k);
  for (const auto& [v, b, j] : merged) res.values.push_back(v);
  if (!want_vectors) return res;

  // Vectors per block: the chosen local indices form a prefix of each block.
  std::vector<std::size_t> used(sys.blocks.size(), 0);
  for (const auto& [v, b, j] : merged) used[b] = std::max(used[b], j + 1);
  std::vector<std::vector<Eigen::VectorXd>> local(sys.blocks.size());
  for (std::size_t b = 0; b < sys.blocks.size(); ++b) {
    if (spectra[b].dense) {
      for (std::size_t j = 0; j < used[b]; ++j) {
        local[b].push_back(spectra[b].vectors.col(static_cast<Eigen::Index>(j)));
      }
      continue;
    }
    ScaledSystem single;
    single.blocks = {sys.blocks[b]};
    single.offsets = {0};
    single.n = sys.blocks[b].size();
    single.norm = sys.blocks[b].norm_bound();
    for (std::size_t j = 0; j < used[b]; ++j) {
      local[b].push_back(inverse_iteration(single, spectra[b].values[j], false, local[b], 1000 * b + j + 1));
    }
  }

  Eigen::MatrixXd vecs = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(op.size()), static_cast<Eigen::Index>(k));
  for (std::size_t c = 0; c < merged.size(); ++c) {
    const auto& [v, b, j] = merged[c];
    const auto& q = local[b][j];
    vecs.col(static_cast<Eigen::Index>(c)).segment(static_cast<Eigen::Index>(sys.offsets[b]), q.size()) = q;
  }
  for (Eigen::Index c = 0; c < vecs.cols(); ++c) vecs.col(c) = sys.unscale(vecs.col(c));
  res.vectors = std::move(vecs);
  return res;
}

namespace {

std::vector<double> twisted_values(const ScaledSystem& sys, const std::vector<double>& dir, std::size_t k) {
  std::vector<double> out;
  out.reserve(k);
  for (std::size_t j = 0; j < k; ++j) {
    double lo = dir[j];
    double hi = dir[j + 1];
    const double tol = 1e-12 * (1.0 + std::abs(lo) + std::abs(hi));
    const int target = static_cast<int>(j) + 1;
    int iter = 0;
    while (hi - lo > tol) {
      if (++iter > 200) throw NumericError("twisted bisection hit the iteration cap", hi - lo);
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      if (sys.twisted_count_below(mid) >= target) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    out.push_back(0.5 * (lo + hi));
  }
  return out;
}

}  // namespace

EigenResult solve_twisted(const AssembledOperator& op, std::size_t k, bool want_vectors) {
  if (op.mean_vanishes()) {
    EigenResult r = solve_dirichlet(op, k, want_vectors);
    r.constrained = true;
    return r;
  }
  if (k < 1 || k + 1 > op.size()) throw InputError("k out of range for solve_twisted");

  const ScaledSystem sys = ScaledSystem::from(op);
  EigenResult res;
  res.meta = op.meta();
  res.constrained = true;
  res.values = twisted_values(sys, solve_dirichlet(op, k + 1, false).values, k);
  if (!want_vectors) return res;

  std::vector<Eigen::VectorXd> basis;
  for (std::size_t j = 0; j < k; ++j) {
    basis.push_back(inverse_iteration(sys, res.values[j], true, basis, 7000 + j));
  }
  Eigen::MatrixXd vecs(static_cast<Eigen::Index>(op.size()), static_cast<Eigen::Index>(k));
  for (std::size_t j = 0; j < k; ++j) vecs.col(static_cast<Eigen::Index>(j)) = sys.unscale(basis[j]);
  res.vectors = std::move(vecs);
  return res;
}

SpectrumPair solve_pair(const AssembledOperator& op, std::size_t k) {
  if (k < 1 || k > op.size()) throw InputError("k out of range for solve_pair");
  SpectrumPair out;
  out.twisted.meta = op.meta();
  out.twisted.constrained = true;
  if (op.mean_vanishes()) {
    out.dirichlet = solve_dirichlet(op, k, false);
    out.twisted.values = out.dirichlet.values;
    return out;
  }
  if (k + 1 > op.size()) throw InputError("k out of range for solve_pair");
  out.dirichlet = solve_dirichlet(op, k + 1, false);
  out.twisted.values = twisted_values(ScaledSystem::from(op), out.dirichlet.values, k);
  out.dirichlet.values.resize(k);
  return out;
}

EigenResult solve_twisted_projected(const AssembledOperator& op, std::size_t k) {
  const auto n = static_cast<Eigen::Index>(op.size());
  if (op.mean_vanishes()) {
    EigenResult r = solve_dirichlet(op, k, true);
    r.constrained = true;
    return r;
  }
  if (k < 1 || static_cast<Eigen::Index>(k) > n - 1) throw InputError("k out of range for solve_twisted_projected");

  const Eigen::VectorXd d = op.mass_diagonal().cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXd t = d.asDiagonal() * op.stiffness_dense() * d.asDiagonal();
  const Eigen::VectorXd z = d.cwiseProduct(op.mean());

  // H z is a multiple of e_1, so columns 2..n of H span z-perp.
  Eigen::VectorXd v = z;
  v(0) += std::copysign(z.norm(), z(0));
  const Eigen::MatrixXd h = Eigen::MatrixXd::Identity(n, n) - 2.0 * v * v.transpose() / v.squaredNorm();
  const Eigen::MatrixXd q = h.rightCols(n - 1);
  const Eigen::MatrixXd projected = q.transpose() * t * q;

  Eigen::VectorXd vals;
  Eigen::MatrixXd vecs;
  linalg::jacobi_eigen(projected, vals, vecs);

  EigenResult res;
  res.meta = op.meta();
  res.constrained = true;
  res.values.assign(vals.data(), vals.data() + k);
  Eigen::MatrixXd full = q * vecs.leftCols(static_cast<Eigen::Index>(k));
  res.vectors = d.asDiagonal() * full;
  return res;
}

IndexNullity index_nullity(const EigenResult& res, double tol) {
  if (!(tol > 0.0)) throw InputError("nullity tolerance must be positive");
  IndexNullity out;
  out.tol = tol;
  for (double v : res.values) {
    if (v < -tol) {
      ++out.index;
    } else if (v <= tol) {
      ++out.nullity;
    }
  }
  return out;
}

double rayleigh(const AssembledOperator& op, const Eigen::VectorXd& f) {
  if (static_cast<std::size_t>(f.size()) != op.size()) throw InputError("vector size mismatch");
  const double denom = f.cwiseProduct(op.mass_diagonal()).dot(f);
  if (!(denom > 0.0)) throw InputError("rayleigh quotient of the zero vector");
  return f.dot(op.apply(f)) / denom;
}

int dirichlet_count_below(const AssembledOperator& op, double mu) {
  return ScaledSystem::from(op).count_below(mu);
}

int twisted_count_below(const AssembledOperator& op, double mu) {
  const ScaledSystem sys = ScaledSystem::from(op);
  if (op.mean_vanishes()) return sys.count_below(mu);
  return sys.twisted_count_below(mu);
}

IndexNullity dirichlet_index_nullity(const AssembledOperator& op, double tol) {
  if (!(tol > 0.0)) throw InputError("nullity tolerance must be positive");
  const ScaledSystem sys = ScaledSystem::from(op);
  const int below = sys.count_below(-tol);
  return {below, sys.count_below(tol) - below, tol};
}

IndexNullity twisted_index_nullity(const AssembledOperator& op, double tol) {
  if (!(tol > 0.0)) throw InputError("nullity tolerance must be positive");
  const ScaledSystem sys = ScaledSystem::from(op);
  if (op.mean_vanishes()) {
    const int below = sys.count_below(-tol);
    return {below, sys.count_below(tol) - below, tol};
  }
  const int below = sys.twisted_count_below(-tol);
  return {below, sys.twisted_count_below(tol) - below, tol};
}

double default_null_tol(double h, double b_sq) { return std::max(1e-6, 5.0 * h * h * (1.0 + b_sq)); }

}  // namespace cmc
