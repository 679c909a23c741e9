#include "cmc/morse.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <thread>

#include "cmc/errors.hpp"

namespace cmc {

namespace {

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

double max_h(const AssembledOperator& op) {
  double h = 0.0;
  for (const auto& b : op.blocks()) h = std::max(h, b.h);
  return h;
}

template <typename F>
auto annotated(double t, int m, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const NumericError& e) {
    throw NumericError(std::string(e.what()) + " (t = " + num(t) + ", m = " + std::to_string(m) + ")",
                       e.residual());
  }
}

// Leading-order finite-difference error of an eigenvalue, (lambda + |B|^2)^2 h^2 / 12.
double discretization_error(double lambda, double b_sq, double h) {
  const double s = std::abs(lambda) + b_sq;
  return s * s * h * h / 12.0;
}

// Count of eigenvalues below zero at t, over the same mode set the curves use.
int zero_count(const DomainFamily& family, double t, const TraceOptions& opts, EventKind kind) {
  const Resolution& res = opts.resolution;
  const bool twisted = kind == EventKind::TwistedZero;
  if (family.surface.dim == 1) {
    const auto op = assemble(family, t, res);
    return twisted ? twisted_count_below(op, 0.0) : dirichlet_count_below(op, 0.0);
  }
  int count = 0;
  for (int m = 0; m <= res.m_max; ++m) {
    const auto op = assemble(family, t, res, m);
    if (m == 0) {
      count += twisted ? twisted_count_below(op, 0.0) : dirichlet_count_below(op, 0.0);
    } else {
      count += 2 * dirichlet_count_below(op, 0.0);
    }
  }
  return count;
}

bool is_dilation_family(FamilyKind kind) {
  // flat metric and D(t) = t D(1): lambda + |B|^2 scales like 1/t^2
  return kind == FamilyKind::CircleInterval || kind == FamilyKind::CylinderDisk;
}

}  // namespace

std::string_view to_string(EventKind kind) {
  return kind == EventKind::DirichletZero ? "DirichletZero" : "TwistedZero";
}

double event_cluster_tol(double t) { return 1e-5 * (1.0 + std::abs(t)); }

SpectrumSlice spectrum_at(const DomainFamily& family, double t, std::size_t k, const TraceOptions& opts) {
  if (k < 1) throw InputError("need at least one eigenvalue per slice");
  const Resolution& res = opts.resolution;
  const double b_sq = family.surface.b_norm_sq;
  SpectrumSlice out;
  out.t = t;

  if (family.surface.dim == 1) {
    const auto op = assemble(family, t, res);
    const auto pair = annotated(t, 0, [&] { return solve_pair(op, k); });
    out.dirichlet = pair.dirichlet.values;
    out.twisted = pair.twisted.values;
    out.h = max_h(op);
    const double tol = opts.null_tol > 0.0 ? opts.null_tol : default_null_tol(out.h, b_sq);
    out.dirichlet_index = dirichlet_index_nullity(op, tol);
    out.twisted_index = twisted_index_nullity(op, tol);
    return out;
  }

  if (res.m_max < 0) throw InputError("m_max must be >= 0");
  std::vector<double> dir, tw;
  int d_below = 0, d_null = 0, t_below = 0, t_null = 0;
  double tol = opts.null_tol;
  for (int m = 0; m <= res.m_max; ++m) {
    const auto op = assemble(family, t, res, m);
    if (m == 0) {
      out.h = max_h(op);
      if (!(tol > 0.0)) tol = default_null_tol(out.h, b_sq);
      const auto pair = annotated(t, m, [&] { return solve_pair(op, k); });
      dir.insert(dir.end(), pair.dirichlet.values.begin(), pair.dirichlet.values.end());
      tw.insert(tw.end(), pair.twisted.values.begin(), pair.twisted.values.end());
      const auto di = dirichlet_index_nullity(op, tol);
      const auto ti = twisted_index_nullity(op, tol);
      d_below += di.index;
      d_null += di.nullity;
      t_below += ti.index;
      t_null += ti.nullity;
      continue;
    }
    const std::size_t km = std::min(k, op.size());
    const auto vals = annotated(t, m, [&] { return solve_dirichlet(op, km, false).values; });
    for (double v : vals) {
      dir.insert(dir.end(), 2, v);
      tw.insert(tw.end(), 2, v);
    }
    const auto di = dirichlet_index_nullity(op, tol);
    d_below += 2 * di.index;
    d_null += 2 * di.nullity;
    t_below += 2 * di.index;
    t_null += 2 * di.nullity;
  }
  std::sort(dir.begin(), dir.end());
  std::sort(tw.begin(), tw.end());
  dir.resize(k);
  tw.resize(k);
  out.dirichlet = std::move(dir);
  out.twisted = std::move(tw);
  out.dirichlet_index = {d_below, d_null, tol};
  out.twisted_index = {t_below, t_null, tol};

  const int next = res.m_max + 1;
  const auto op_next = assemble(family, t, res, next);
  const double lowest_next = annotated(t, next, [&] { return solve_dirichlet(op_next, 1, false).values[0]; });
  out.modes_resolved = lowest_next > out.dirichlet.back();
  return out;
}

EigenCurve trace_curves(const DomainFamily& family, const std::vector<double>& t_grid, std::size_t k,
                        const TraceOptions& opts) {
  if (k < 1) throw InputError("K must be >= 1");
  if (t_grid.empty()) throw InputError("empty t grid");
  for (std::size_t i = 1; i < t_grid.size(); ++i) {
    if (!(t_grid[i - 1] < t_grid[i])) throw InputError("t grid must be strictly ascending");
  }
  for (double t : t_grid) (void)domain_at(family, t);

  const std::size_t n = t_grid.size();
  std::vector<SpectrumSlice> slices(n);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&]() {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        slices[i] = spectrum_at(family, t_grid[i], k, opts);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = n;
      }
    }
  };
  const int threads = std::max(1, std::min<int>(opts.threads, static_cast<int>(n)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  EigenCurve curve;
  curve.family = family;
  curve.t = t_grid;
  curve.k = k;
  curve.options = opts;
  curve.dirichlet.assign(k, std::vector<double>(n));
  curve.twisted.assign(k, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      curve.dirichlet[j][i] = slices[i].dirichlet[j];
      curve.twisted[j][i] = slices[i].twisted[j];
    }
    curve.dirichlet_index.push_back(slices[i].dirichlet_index);
    curve.twisted_index.push_back(slices[i].twisted_index);
    curve.h.push_back(slices[i].h);
    curve.modes_resolved.push_back(slices[i].modes_resolved);
  }
  return curve;
}

EventDetection detect_events(const EigenCurve& curve, bool refine) {
  EventDetection out;
  const std::size_t n = curve.t.size();
  const double b_sq = curve.family.surface.b_norm_sq;

  for (std::size_t i = 0; i < n; ++i) {
    if (!curve.modes_resolved.empty() && !curve.modes_resolved[i]) {
      out.warnings.push_back("azimuthal truncation m_max may hide eigenvalues at t = " + num(curve.t[i]));
    }
  }

  std::vector<JacobiEvent> raw;
  for (const EventKind kind : {EventKind::DirichletZero, EventKind::TwistedZero}) {
    const auto& rows = kind == EventKind::DirichletZero ? curve.dirichlet : curve.twisted;
    const auto& index = kind == EventKind::DirichletZero ? curve.dirichlet_index : curve.twisted_index;

    for (std::size_t r = 0; r < rows.size(); ++r) {
      const auto& v = rows[r];
      const int label = static_cast<int>(r) + 1;
      for (std::size_t i = 0; i + 1 < n; ++i) {
        if (curve.family.set_continuous) {
          const double slack = 2.0 * std::max(discretization_error(v[i], b_sq, curve.h[i]),
                                              discretization_error(v[i + 1], b_sq, curve.h[i + 1])) + 1e-9;
          if (v[i + 1] - v[i] > slack) {
            throw ConsistencyError(std::string(to_string(kind)) + " row " + std::to_string(label) +
                                   " increases between t = " + num(curve.t[i]) + " and " +
                                   num(curve.t[i + 1]) + "; discretization too coarse");
          }
        }
        const bool pos0 = v[i] > 0.0;
        const bool pos1 = v[i + 1] > 0.0;
        if (pos0 == pos1) continue;

        JacobiEvent ev;
        ev.kind = kind;
        ev.k = label;
        const double t0 = curve.t[i];
        const double t1 = curve.t[i + 1];
        ev.t_star = t0 + v[i] / (v[i] - v[i + 1]) * (t1 - t0);
        ev.refined_width = t1 - t0;
        if (refine) {
          auto negative = [&](double t) { return zero_count(curve.family, t, curve.options, kind) >= label; };
          double lo = t0;
          double hi = t1;
          const bool neg_lo = negative(lo);
          if (neg_lo == negative(hi)) {
            out.warnings.push_back("could not refine " + std::string(to_string(kind)) + " row " +
                                   std::to_string(label) + " crossing in [" + num(t0) + ", " + num(t1) + "]");
          } else {
            while (hi - lo > 1e-6 * (1.0 + hi)) {
              const double mid = 0.5 * (lo + hi);
              if (negative(mid) == neg_lo) {
                lo = mid;
              } else {
                hi = mid;
              }
            }
            ev.t_star = 0.5 * (lo + hi);
            ev.refined_width = hi - lo;
          }
        }
        raw.push_back(ev);
      }
    }

    // Exact index changes among the tracked labels that no row accounts for.
    for (std::size_t i = 0; i + 1 < n; ++i) {
      int crossings = 0;
      for (const auto& row : rows) crossings += (row[i] > 0.0) != (row[i + 1] > 0.0) ? 1 : 0;
      const int rows_k = static_cast<int>(rows.size());
      const int jump = std::abs(std::min(index[i + 1].index, rows_k) - std::min(index[i].index, rows_k));
      if (jump > crossings) {
        out.warnings.push_back("missed event: " + std::string(to_string(kind)) + " index changes by " +
                               std::to_string(jump) + " in [" + num(curve.t[i]) + ", " + num(curve.t[i + 1]) +
                               "] but only " + std::to_string(crossings) + " tracked rows cross zero");
      }
    }
  }

  std::stable_sort(raw.begin(), raw.end(), [](const JacobiEvent& a, const JacobiEvent& b) {
    if (a.kind != b.kind) return a.kind < b.kind;
    return a.t_star < b.t_star;
  });
  for (std::size_t i = 0; i < raw.size();) {
    JacobiEvent merged = raw[i];
    std::size_t j = i + 1;
    while (j < raw.size() && raw[j].kind == merged.kind &&
           raw[j].t_star - raw[i].t_star <= event_cluster_tol(raw[i].t_star)) {
      merged.multiplicity += raw[j].multiplicity;
      merged.k = std::min(merged.k, raw[j].k);
      merged.refined_width = std::max(merged.refined_width, raw[j].refined_width);
      ++j;
    }
    out.events.push_back(merged);
    i = j;
  }
  std::stable_sort(out.events.begin(), out.events.end(), [](const JacobiEvent& a, const JacobiEvent& b) {
    if (a.t_star != b.t_star) return a.t_star < b.t_star;
    return a.kind < b.kind;
  });
  return out;
}

bool MorseReport::all_ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.ok || c.expected; });
}

MorseReport verify(const EigenCurve& curve, const EventDetection& detection) {
  const std::size_t n = curve.t.size();
  if (curve.dirichlet.size() != curve.k || curve.twisted.size() != curve.k ||
      curve.dirichlet_index.size() != n || curve.twisted_index.size() != n) {
    throw InputError("curve arrays do not match its sample grid");
  }
  for (const auto& ev : detection.events) {
    if (ev.k < 1 || static_cast<std::size_t>(ev.k) > curve.k || ev.multiplicity < 1) {
      throw InputError("event does not belong to this curve");
    }
  }

  MorseReport rep;
  rep.curve = curve;
  rep.events = detection.events;
  rep.warnings = detection.warnings;
  const double b_sq = curve.family.surface.b_norm_sq;
  const bool continuous_family = curve.family.set_continuous;

  std::vector<double> dir_zeros;
  std::vector<int> dir_mult;
  std::vector<const JacobiEvent*> twisted_events;
  for (const auto& ev : rep.events) {
    if (ev.kind == EventKind::DirichletZero) {
      dir_zeros.push_back(ev.t_star);
      dir_mult.push_back(ev.multiplicity);
    } else {
      twisted_events.push_back(&ev);
    }
  }

  // nested domains along the grid
  {
    Check c{"nested_domains", true, false, ""};
    const auto meta = family_metadata(curve.family, curve.t);
    c.ok = meta.monotone_ok;
    c.detail = std::string("set_continuous declared ") + (meta.set_continuous ? "true" : "false");
    rep.checks.push_back(c);
  }

  // global Morse index identity: twisted index at r equals the Jacobi
  // fields (with multiplicity) on the domains before r
  {
    int failures = 0;
    int saturated = 0;
    for (std::size_t i = 0; i < n; ++i) {
      IdentityPoint p;
      p.r = curve.t[i];
      p.twisted_index = curve.twisted_index[i].index;
      p.twisted_nullity = curve.twisted_index[i].nullity;
      for (const auto* ev : twisted_events) {
        if (ev->t_star < p.r) p.events_below += ev->multiplicity;
      }
      // only the k tracked rows can cross, so the count saturates at k
      const int k = static_cast<int>(curve.k);
      p.ok = std::min(p.twisted_index, k) <= p.events_below &&
             p.events_below <= std::min(p.twisted_index + p.twisted_nullity, k);
      if (p.twisted_index > k) ++saturated;
      if (!p.ok) ++failures;
      rep.identity.push_back(p);
    }
    rep.identity_ok = failures == 0;
    rep.checks.push_back({"morse_identity", rep.identity_ok, false,
                          std::to_string(n - static_cast<std::size_t>(failures)) + "/" + std::to_string(n) +
                              " grid points satisfy twisted index = events below r" +
                              (saturated > 0 ? "; " + std::to_string(saturated) + " points beyond the " +
                                                   std::to_string(curve.k) + " tracked rows compared up to " +
                                                   std::to_string(curve.k)
                                             : std::string())});
  }

  {
    int failures = 0;
    for (std::size_t i = 0; i < n; ++i) {
      LemmaDPoint p{curve.t[i], curve.dirichlet_index[i].index, curve.twisted_index[i].index, true};
      p.ok = p.index - 1 <= p.twisted_index && p.twisted_index <= p.index;
      if (!p.ok) ++failures;
      rep.lemma_d.push_back(p);
    }
    rep.lemma_d_ok = failures == 0;
    rep.checks.push_back({"lemma_d", rep.lemma_d_ok, false,
                          std::to_string(failures) + " grid points violate i - 1 <= twisted i <= i"});
  }

  {
    constexpr double tol = 1e-9;
    double worst = 0.0;
    for (std::size_t j = 0; j < curve.k; ++j) {
      for (std::size_t i = 0; i < n; ++i) {
        worst = std::max(worst, curve.dirichlet[j][i] - curve.twisted[j][i]);
        if (j + 1 < curve.k) worst = std::max(worst, curve.twisted[j][i] - curve.dirichlet[j + 1][i]);
      }
    }
    rep.interlacing_ok = worst <= tol;
    rep.checks.push_back({"interlacing", rep.interlacing_ok, false, "worst violation " + num(worst)});
  }

  // strict decrease between samples; strictness demanded where the dilation
  // derivative 2 (lambda + |B|^2) / t exceeds 1e-3
  {
    int increases = 0;
    int not_strict = 0;
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto* rows : {&curve.dirichlet, &curve.twisted}) {
      for (const auto& v : *rows) {
        for (std::size_t i = 0; i + 1 < n; ++i) {
          const double d = v[i + 1] - v[i];
          worst = std::max(worst, d);
          if (d > 1e-9) ++increases;
          if (is_dilation_family(curve.family.kind)) {
            const double rate = 2.0 * (v[i] + b_sq) / curve.t[i];
            if (rate > 1e-3 && !(d < 0.0)) ++not_strict;
          }
        }
      }
    }
    rep.monotone_ok = increases == 0 && not_strict == 0;
    Check c{"monotone_decrease", rep.monotone_ok, !continuous_family && !rep.monotone_ok,
            std::to_string(increases) + " increases, " + std::to_string(not_strict) +
                " non-strict steps; largest step " + num(worst)};
    rep.checks.push_back(c);
  }

  // continuity: a step may not exceed 5x the neighbouring secant slopes
  {
    int jumps = 0;
    std::string first;
    for (const auto* rows : {&curve.dirichlet, &curve.twisted}) {
      const bool is_dir = rows == &curve.dirichlet;
      for (std::size_t r = 0; r < rows->size(); ++r) {
        const auto& v = (*rows)[r];
        for (std::size_t i = 0; i + 1 < n; ++i) {
          double slope = 0.0;
          bool have = false;
          if (i > 0) {
            slope = std::max(slope, std::abs(v[i] - v[i - 1]) / (curve.t[i] - curve.t[i - 1]));
            have = true;
          }
          if (i + 2 < n) {
            slope = std::max(slope, std::abs(v[i + 2] - v[i + 1]) / (curve.t[i + 2] - curve.t[i + 1]));
            have = true;
          }
          if (!have) continue;
          // an end interval has one neighbour; extrapolate its slope trend
          auto secant = [&](std::size_t a) { return std::abs(v[a + 1] - v[a]) / (curve.t[a + 1] - curve.t[a]); };
          if (i == 0 && n >= 4 && secant(2) > 0.0) slope *= std::max(1.0, secant(1) / secant(2));
          if (i + 2 == n && n >= 4 && secant(n - 4) > 0.0) slope *= std::max(1.0, secant(n - 3) / secant(n - 4));
          const double step = std::abs(v[i + 1] - v[i]);
          if (step > 5.0 * slope * (curve.t[i + 1] - curve.t[i]) + 1e-9) {
            if (jumps++ == 0) {
              first = std::string(is_dir ? "dirichlet" : "twisted") + " row " + std::to_string(r + 1) +
                      " jumps " + num(v[i]) + " -> " + num(v[i + 1]) + " on [" + num(curve.t[i]) + ", " +
                      num(curve.t[i + 1]) + "]";
            }
          }
        }
      }
    }
    rep.continuity_ok = jumps == 0;
    std::string detail = std::to_string(jumps) + " jumps";
    if (jumps > 0) detail += "; first: " + first;
    if (jumps > 0 && !continuous_family) detail += " (family is not set-continuous: expected)";
    rep.checks.push_back({"continuity", rep.continuity_ok, !continuous_family && jumps > 0, detail});
  }

  // first twisted zero c against the first two Dirichlet zero times
  {
    Check c{"prop_5_1", true, false, ""};
    if (dir_zeros.size() < 2 || twisted_events.empty()) {
      c.detail = "not applicable: needs two Dirichlet zeros and one twisted zero";
    } else {
      const double t1 = dir_zeros[0];
      const double t2 = dir_zeros[1];
      const double cz = twisted_events.front()->t_star;
      rep.prop_5_1_ok = cz > t1 + event_cluster_tol(t1) && cz <= t2 + event_cluster_tol(t2);
      rep.prop_5_1_strict = rep.prop_5_1_ok && cz < t2 - event_cluster_tol(t2);
      c.ok = rep.prop_5_1_ok;
      c.detail = "t1 = " + num(t1) + ", c = " + num(cz) + ", t2 = " + num(t2) +
                 (rep.prop_5_1_strict ? " (strict)" : (rep.prop_5_1_ok ? " (c coincides with t2)" : ""));
    }
    rep.checks.push_back(c);
  }

  {
    int failures = 0;
    for (std::size_t h = 1; h < dir_zeros.size(); ++h) {
      TheoremJInterval iv;
      iv.t_prev = dir_zeros[h - 1];
      iv.t_cur = dir_zeros[h];
      iv.m_prev = dir_mult[h - 1];
      iv.m_cur = dir_mult[h];
      const double da = event_cluster_tol(iv.t_prev);
      const double db = event_cluster_tol(iv.t_cur);
      for (const auto* ev : twisted_events) {
        const double s = ev->t_star;
        if (s > iv.t_prev + da && s <= iv.t_cur + db) iv.mu_half_open += ev->multiplicity;
        if (s >= iv.t_prev - da && s <= iv.t_cur + db) iv.mu_closed += ev->multiplicity;
        if (std::abs(s - iv.t_cur) <= db) iv.mu_point += ev->multiplicity;
      }
      iv.half_open_ok = iv.m_cur - 1 <= iv.mu_half_open && iv.mu_half_open <= iv.m_cur + 1;
      iv.closed_ok = iv.m_prev + iv.m_cur - 1 <= iv.mu_closed && iv.mu_closed <= iv.m_prev + iv.m_cur + 1;
      iv.point_ok = iv.m_cur - 1 <= iv.mu_point && iv.mu_point <= iv.m_cur + 1;
      if (!(iv.half_open_ok && iv.closed_ok && iv.point_ok)) ++failures;
      rep.theorem_j.push_back(iv);
    }
    rep.theorem_j_ok = failures == 0;
    rep.checks.push_back({"theorem_j", rep.theorem_j_ok, false,
                          std::to_string(rep.theorem_j.size()) + " intervals, " + std::to_string(failures) +
                              " out of bounds"});
  }
  return rep;
}

}  // namespace cmc
