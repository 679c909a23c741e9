#include "cmc/tridiagonal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "cmc/errors.hpp"

namespace cmc::linalg {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double pivot_floor(const SymTridiagonal& t) {
  double emax = 1.0;
  for (double e : t.off) emax = std::max(emax, e * e);
  return std::numeric_limits<double>::min() * emax;
}

}  // namespace

std::pair<double, double> SymTridiagonal::gershgorin() const {
  const std::size_t n = size();
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < n; ++i) {
    double r = 0.0;
    if (i > 0) r += std::abs(off[i - 1]);
    if (i + 1 < n) r += std::abs(off[i]);
    lo = std::min(lo, diag[i] - r);
    hi = std::max(hi, diag[i] + r);
  }
  return {lo, hi};
}

double SymTridiagonal::norm_bound() const {
  const auto [lo, hi] = gershgorin();
  return std::max(std::abs(lo), std::abs(hi));
}

int sturm_count(const SymTridiagonal& t, double mu) {
  const double pivmin = pivot_floor(t);
  int count = 0;
  double d = 1.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    d = t.diag[i] - mu - (i > 0 ? t.off[i - 1] * t.off[i - 1] / d : 0.0);
    if (std::abs(d) < pivmin) d = -pivmin;
    if (d < 0.0) ++count;
  }
  return count;
}

SecularProbe secular_probe(const SymTridiagonal& t, std::span<const double> z, double mu) {
  const double pivmin = pivot_floor(t);
  SecularProbe p;
  double d = 1.0;
  double y = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i > 0) {
      const double l = t.off[i - 1] / d;
      y = z[i] - l * y;
      d = t.diag[i] - mu - l * t.off[i - 1];
    } else {
      y = z[0];
      d = t.diag[0] - mu;
    }
    if (std::abs(d) < pivmin) d = -pivmin;
    if (d < 0.0) ++p.below;
    p.secular += y * y / d;
  }
  return p;
}

std::vector<double> smallest_eigenvalues(const SymTridiagonal& t, std::size_t k) {
  const std::size_t n = t.size();
  if (k > n) throw InputError("requested more eigenvalues than the matrix dimension");
  auto [glo, ghi] = t.gershgorin();
  const double span = std::max(ghi - glo, 1.0);
  glo -= kEps * span;
  ghi += kEps * span;
  const double abstol = 2.0 * kEps * t.norm_bound() + std::numeric_limits<double>::min();

  // lo[j] has fewer than j+1 eigenvalues below it, hi[j] at least j+1
  std::vector<double> lo(k, glo), hi(k, ghi);
  std::vector<double> out(k);
  for (std::size_t j = 0; j < k; ++j) {
    if (j > 0) lo[j] = std::max(lo[j], out[j - 1] - abstol);
    for (int iter = 0; iter < 200; ++iter) {
      const double width = hi[j] - lo[j];
      const double tol = std::max(abstol, 2.0 * kEps * std::max(std::abs(lo[j]), std::abs(hi[j])));
      if (width <= tol) break;
      const double mid = 0.5 * (lo[j] + hi[j]);
      if (mid <= lo[j] || mid >= hi[j]) break;
      const auto c = static_cast<std::size_t>(sturm_count(t, mid));
      // one probe tightens every bracket it informs
      for (std::size_t q = j; q < k; ++q) {
        if (c >= q + 1) {
          hi[q] = std::min(hi[q], mid);
        } else {
          lo[q] = std::max(lo[q], mid);
        }
      }
    }
    out[j] = 0.5 * (lo[j] + hi[j]);
  }
  return out;
}

void ql_implicit(const SymTridiagonal& t, Eigen::VectorXd& values, Eigen::MatrixXd* vectors) {
  const auto n = static_cast<Eigen::Index>(t.size());
  Eigen::VectorXd d = Eigen::Map<const Eigen::VectorXd>(t.diag.data(), n);
  Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) e(i) = t.off[static_cast<std::size_t>(i)];
  const bool accumulate = vectors != nullptr;
  Eigen::MatrixXd z;
  if (accumulate) z = Eigen::MatrixXd::Identity(n, n);
  const int cap = 30;

  for (Eigen::Index l = 0; l < n; ++l) {
    int iter = 0;
    Eigen::Index m = l;
    do {
      for (m = l; m + 1 < n; ++m) {
        const double dd = std::abs(d(m)) + std::abs(d(m + 1));
        if (std::abs(e(m)) <= kEps * dd) break;
      }
      if (m != l) {
        if (iter++ == cap) {
          throw NumericError("implicit QL did not converge", std::abs(e(l)));
        }
        double g = (d(l + 1) - d(l)) / (2.0 * e(l));
        double r = std::hypot(g, 1.0);
        g = d(m) - d(l) + e(l) / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        Eigen::Index i = m - 1;
        bool underflow = false;
        for (; i >= l; --i) {
          double f = s * e(i);
          const double b = c * e(i);
          r = std::hypot(f, g);
          e(i + 1) = r;
          if (r == 0.0) {
            d(i + 1) -= p;
            e(m) = 0.0;
            underflow = true;
            break;
          }
          s = f / r;
          c = g / r;
          g = d(i + 1) - p;
          r = (d(i) - g) * s + 2.0 * c * b;
          p = s * r;
          d(i + 1) = g + p;
          g = c * r - b;
          for (Eigen::Index k = 0; accumulate && k < n; ++k) {
            f = z(k, i + 1);
            z(k, i + 1) = s * z(k, i) + c * f;
            z(k, i) = c * z(k, i) - s * f;
          }
        }
        if (underflow) continue;
        d(l) -= p;
        e(l) = g;
        e(m) = 0.0;
      }
    } while (m != l);
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return d(a) < d(b); });
  values.resize(n);
  if (accumulate) vectors->resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto src = order[static_cast<std::size_t>(j)];
    values(j) = d(src);
    if (accumulate) vectors->col(j) = z.col(src);
  }
}

Eigen::VectorXd shifted_solve(const SymTridiagonal& t, double sigma, const Eigen::VectorXd& rhs) {
  const std::size_t n = t.size();
  if (static_cast<std::size_t>(rhs.size()) != n) throw InputError("rhs size mismatch");
  std::vector<double> dl(t.off), d(n), du(t.off), du2(n > 2 ? n - 2 : 0, 0.0);
  std::vector<char> swapped(n, 0);
  for (std::size_t i = 0; i < n; ++i) d[i] = t.diag[i] - sigma;

  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (std::abs(d[i]) >= std::abs(dl[i])) {
      if (d[i] != 0.0) {
        const double fact = dl[i] / d[i];
        dl[i] = fact;
        d[i + 1] -= fact * du[i];
      }
    } else {
      swapped[i] = 1;
      const double fact = d[i] / dl[i];
      d[i] = dl[i];
      dl[i] = fact;
      const double temp = du[i];
      du[i] = d[i + 1];
      d[i + 1] = temp - fact * d[i + 1];
      if (i + 2 < n) {
        du2[i] = du[i + 1];
        du[i + 1] = -fact * du[i + 1];
      }
    }
  }
  const double tiny = kEps * std::max(t.norm_bound(), std::abs(sigma)) + std::numeric_limits<double>::min();
  for (double& v : d) {
    if (std::abs(v) < tiny) v = std::copysign(tiny, v == 0.0 ? 1.0 : v);
  }

  Eigen::VectorXd b = rhs;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    if (!swapped[i]) {
      b(k + 1) -= dl[i] * b(k);
    } else {
      const double temp = b(k);
      b(k) = b(k + 1);
      b(k + 1) = temp - dl[i] * b(k);
    }
  }
  Eigen::VectorXd x(static_cast<Eigen::Index>(n));
  for (std::size_t ii = n; ii-- > 0;) {
    const auto k = static_cast<Eigen::Index>(ii);
    double s = b(k);
    if (ii + 1 < n) s -= du[ii] * x(k + 1);
    if (ii + 2 < n) s -= du2[ii] * x(k + 2);
    x(k) = s / d[ii];
  }
  return x;
}

void jacobi_eigen(const Eigen::MatrixXd& a_in, Eigen::VectorXd& values, Eigen::MatrixXd& vectors) {
  const Eigen::Index n = a_in.rows();
  if (a_in.cols() != n) throw InputError("jacobi_eigen needs a square matrix");
  Eigen::MatrixXd a = 0.5 * (a_in + a_in.transpose());
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
  const double scale = std::max(a.norm(), std::numeric_limits<double>::min());

  const int max_sweeps = 60;
  int sweep = 0;
  for (; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    }
    if (std::sqrt(2.0 * off) <= kEps * scale) break;

    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) <= std::numeric_limits<double>::min()) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double tn = std::copysign(1.0, theta) / (std::abs(theta) + std::hypot(theta, 1.0));
        const double c = 1.0 / std::hypot(tn, 1.0);
        const double s = tn * c;
        // A <- J^T A J on rows/columns p, q
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  if (sweep == max_sweeps) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    }
    throw NumericError("cyclic Jacobi did not converge", std::sqrt(off));
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto x, auto y) { return a(x, x) < a(y, y); });
  values.resize(n);
  vectors.resize(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    values(j) = a(order[static_cast<std::size_t>(j)], order[static_cast<std::size_t>(j)]);
    vectors.col(j) = v.col(order[static_cast<std::size_t>(j)]);
  }
}

}  // namespace cmc::linalg
