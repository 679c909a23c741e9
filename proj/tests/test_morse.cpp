#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cmc/analytic.hpp"
#include "cmc/errors.hpp"
#include "cmc/morse.hpp"

using namespace cmc;
using std::numbers::pi;

namespace {

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = a + (b - a) * i / (n - 1);
  return v;
}

struct CircleRun {
  EigenCurve curve;
  EventDetection detection;
  MorseReport report;
};

const CircleRun& circle_run() {
  static const CircleRun run = [] {
    CircleRun r;
    r.curve = trace_curves(make_family(FamilyKind::CircleInterval), linspace(0.5, 22.0, 200), 6, TraceOptions{});
    r.detection = detect_events(r.curve, true);
    r.report = verify(r.curve, r.detection);
    return r;
  }();
  return run;
}

// A hand-built curve on the circle family with one row per kind.
EigenCurve synthetic(const std::vector<double>& t, const std::vector<std::vector<double>>& dir,
                     const std::vector<std::vector<double>>& tw, FamilyKind kind = FamilyKind::CircleInterval) {
  EigenCurve c;
  c.family = make_family(kind);
  c.t = t;
  c.k = dir.size();
  c.dirichlet = dir;
  c.twisted = tw;
  for (std::size_t i = 0; i < t.size(); ++i) {
    int di = 0, ti = 0;
    for (const auto& row : dir) di += row[i] < 0 ? 1 : 0;
    for (const auto& row : tw) ti += row[i] < 0 ? 1 : 0;
    c.dirichlet_index.push_back({di, 0, 1e-6});
    c.twisted_index.push_back({ti, 0, 1e-6});
    c.h.push_back(1e-3);
    c.modes_resolved.push_back(true);
  }
  return c;
}

std::vector<double> sorted_first(std::vector<double> v, std::size_t k) {
  std::sort(v.begin(), v.end());
  v.resize(k);
  return v;
}

}  // namespace

TEST_CASE("spectrum_at on the circle interval matches the closed forms") {
  TraceOptions opts;
  opts.resolution.n_per_unit = 600;
  const auto s = spectrum_at(make_family(FamilyKind::CircleInterval), 7.0, 6, opts);
  for (int k = 1; k <= 6; ++k) {
    CHECK(s.dirichlet[k - 1] == doctest::Approx(analytic::circle_dirichlet_lambda(k, 7.0)).epsilon(1e-3));
    CHECK(s.twisted[k - 1] == doctest::Approx(analytic::circle_twisted_lambda(k, 7.0)).epsilon(1e-3));
  }
  CHECK(s.dirichlet_index.index == 2);
  CHECK(s.twisted_index.index == 1);
}

TEST_CASE("spectrum_at merges azimuthal modes with multiplicity") {
  const double t = 2.0;
  std::vector<double> dir, tw;
  for (int n = 1; n <= 6; ++n) tw.push_back(std::pow(analytic::bessel_zero(2, n) / t, 2) - 1);
  for (int m = 0; m <= 6; ++m) {
    for (int n = 1; n <= 6; ++n) {
      const double v = analytic::disk_dirichlet_lambda(m, n, t);
      dir.push_back(v);
      if (m >= 1) {
        dir.push_back(v);
        tw.push_back(v);
        tw.push_back(v);
      }
    }
  }
  const auto s = spectrum_at(make_family(FamilyKind::CylinderDisk), t, 8, TraceOptions{});
  const auto d_ref = sorted_first(dir, 8);
  const auto t_ref = sorted_first(tw, 8);
  for (std::size_t j = 0; j < 8; ++j) {
    CHECK(s.dirichlet[j] == doctest::Approx(d_ref[j]).epsilon(1e-3));
    CHECK(s.twisted[j] == doctest::Approx(t_ref[j]).epsilon(1e-3));
  }
  CHECK(s.modes_resolved);
  CHECK(s.dirichlet_index.index == 0);

  TraceOptions axisymmetric;
  axisymmetric.resolution.m_max = 0;
  CHECK_FALSE(spectrum_at(make_family(FamilyKind::CylinderDisk), t, 3, axisymmetric).modes_resolved);
}

TEST_CASE("trace_curves is independent of the thread count") {
  const auto family = make_family(FamilyKind::CylinderDisk);
  const auto grid = linspace(1.0, 4.0, 7);
  TraceOptions one, many;
  one.resolution = many.resolution = Resolution{80, 16, 4};
  many.threads = 3;
  const auto a = trace_curves(family, grid, 4, one);
  const auto b = trace_curves(family, grid, 4, many);
  CHECK(a.dirichlet == b.dirichlet);
  CHECK(a.twisted == b.twisted);
}

TEST_CASE("trace_curves input errors") {
  const auto family = make_family(FamilyKind::CircleInterval);
  CHECK_THROWS_AS(trace_curves(family, {}, 3, TraceOptions{}), InputError);
  CHECK_THROWS_AS(trace_curves(family, {2.0, 1.0}, 3, TraceOptions{}), InputError);
  CHECK_THROWS_AS(trace_curves(family, {1.0, 2.0}, 0, TraceOptions{}), InputError);
  CHECK_THROWS_AS(trace_curves(family, {1.0, 40.0}, 3, TraceOptions{}), ParameterRangeError);
}

TEST_CASE("circle interval events sit at k pi and at the psi zeros") {
  const auto& run = circle_run();
  std::vector<double> dz, tz;
  for (const auto& e : run.detection.events) (e.kind == EventKind::DirichletZero ? dz : tz).push_back(e.t_star);
  REQUIRE(dz.size() == 6);
  REQUIRE(tz.size() == 6);
  for (int k = 1; k <= 6; ++k) {
    CHECK(std::abs(dz[k - 1] - k * pi) < 1e-4);
    CHECK(std::abs(tz[k - 1] - analytic::psi_zero(k)) < 1e-4);
  }
  CHECK(std::is_sorted(run.detection.events.begin(), run.detection.events.end(),
                       [](const JacobiEvent& a, const JacobiEvent& b) { return a.t_star < b.t_star; }));
}

TEST_CASE("each refined event changes sign across its bracket") {
  const auto& run = circle_run();
  const auto family = make_family(FamilyKind::CircleInterval);
  for (const auto& e : run.detection.events) {
    CHECK(e.multiplicity >= 1);
    CHECK(e.refined_width <= 1e-6 * (1 + e.t_star) + 1e-12);
    const auto lo = spectrum_at(family, e.t_star - e.refined_width, 6, TraceOptions{});
    const auto hi = spectrum_at(family, e.t_star + e.refined_width, 6, TraceOptions{});
    const auto& a = e.kind == EventKind::DirichletZero ? lo.dirichlet : lo.twisted;
    const auto& b = e.kind == EventKind::DirichletZero ? hi.dirichlet : hi.twisted;
    CHECK(a[e.k - 1] > 0.0);
    CHECK(b[e.k - 1] < 0.0);
  }
}

TEST_CASE("twisted index increments equal the events in between") {
  const auto& run = circle_run();
  const auto& c = run.curve;
  for (std::size_t i = 0; i + 1 < c.t.size(); ++i) {
    int between = 0;
    for (const auto& e : run.detection.events) {
      if (e.kind == EventKind::TwistedZero && e.t_star > c.t[i] && e.t_star <= c.t[i + 1]) between += e.multiplicity;
    }
    CHECK(c.twisted_index[i + 1].index - c.twisted_index[i].index == between);
  }
}

TEST_CASE("circle interval report") {
  const auto& rep = circle_run().report;
  CHECK(rep.identity_ok);
  CHECK(rep.lemma_d_ok);
  CHECK(rep.interlacing_ok);
  CHECK(rep.monotone_ok);
  CHECK(rep.continuity_ok);
  CHECK(rep.theorem_j_ok);
  CHECK(rep.all_ok());
  // just above l_6 < 7 pi: six Jacobi fields precede r
  const auto& last = rep.identity.back();
  CHECK(last.r > analytic::psi_zero(6));
  CHECK(last.twisted_index == 6);
  CHECK(last.events_below == 6);
  REQUIRE(rep.theorem_j.size() == 5);
  for (const auto& iv : rep.theorem_j) {
    CHECK(iv.mu_half_open == 1);
    CHECK(iv.half_open_ok);
    CHECK(iv.closed_ok);
    CHECK(iv.point_ok);
  }
  // even Dirichlet modes have zero mean, so c = l_1 = 2 pi = t_2
  CHECK(rep.prop_5_1_ok);
  CHECK_FALSE(rep.prop_5_1_strict);
}

TEST_CASE("FlatGap jump is an expected continuity violation") {
  const auto curve = trace_curves(make_family(FamilyKind::FlatGap), linspace(0.5, 1.0, 51), 2, TraceOptions{});
  const auto rep = verify(curve, detect_events(curve, false));
  const auto it = std::find_if(rep.checks.begin(), rep.checks.end(), [](const Check& c) { return c.name == "continuity"; });
  REQUIRE(it != rep.checks.end());
  CHECK_FALSE(it->ok);
  CHECK(it->expected);
  CHECK_FALSE(rep.continuity_ok);
  CHECK(rep.all_ok());
  CHECK(curve.dirichlet[0][49] == doctest::Approx(1.0 / (0.99 * 0.99)).epsilon(2e-3));
  CHECK(curve.dirichlet[0][50] == doctest::Approx(0.25).epsilon(2e-3));
}

TEST_CASE("positive rows produce no events") {
  const auto c = synthetic({1, 2, 3}, {{3, 2, 1}}, {{4, 3, 2}});
  const auto d = detect_events(c, false);
  CHECK(d.events.empty());
  CHECK(d.warnings.empty());
}

TEST_CASE("simultaneous crossings merge") {
  const auto c = synthetic({1, 2, 3}, {{1, -1, -2}, {1, -1, -2}}, {{2, 1, 0.5}, {3, 2, 1}});
  const auto d = detect_events(c, false);
  REQUIRE(d.events.size() == 1);
  CHECK(d.events[0].t_star == doctest::Approx(1.5));
  CHECK(d.events[0].multiplicity == 2);
  CHECK(d.events[0].k == 1);
  CHECK(d.events[0].kind == EventKind::DirichletZero);
}

TEST_CASE("an increasing row is inconsistent on a set-continuous family") {
  CHECK_THROWS_AS(detect_events(synthetic({1, 2, 3}, {{1, 2, 3}}, {{2, 3, 4}}), false), ConsistencyError);
  CHECK_NOTHROW(detect_events(synthetic({0.5, 0.7, 0.9}, {{1, 2, 3}}, {{2, 3, 4}}, FamilyKind::FlatGap), false));
}

TEST_CASE("index jumps without a crossing raise a missed-event warning") {
  auto c = synthetic({1, 2, 3}, {{3, 2, 1}}, {{4, 3, 2}});
  c.dirichlet_index[2].index = 1;
  const auto d = detect_events(c, false);
  REQUIRE(d.warnings.size() == 1);
  CHECK(d.warnings[0].find("missed event") != std::string::npos);
}

TEST_CASE("verify rejects mismatched inputs and flags unexpected failures") {
  auto c = synthetic({1, 2, 3}, {{3, 2, 1}}, {{4, 3, 2}});
  EventDetection bad;
  bad.events.push_back({1.5, EventKind::TwistedZero, 2, 1, 0.1});
  CHECK_THROWS_AS(verify(c, bad), InputError);
  auto short_curve = c;
  short_curve.twisted_index.pop_back();
  CHECK_THROWS_AS(verify(short_curve, EventDetection{}), InputError);

  // twisted below Dirichlet breaks interlacing
  const auto broken = synthetic({1, 2, 3}, {{3, 2, 1}}, {{2.5, 1.5, 0.5}});
  const auto rep = verify(broken, detect_events(broken, false));
  CHECK_FALSE(rep.interlacing_ok);
  CHECK_FALSE(rep.all_ok());
}

TEST_CASE("Jacobi-field interval counts on a synthetic double zero") {
  // Dirichlet zeros at 1.5 (m = 1) and 2.5 (m = 2), twisted zeros at 2.5 (x2)
  const auto c = synthetic({1, 2, 3}, {{1, -1, -2}, {2, 1, -1}, {2, 1, -1}}, {{2, 1, -1}, {2, 1, -1}, {3, 2, 1}});
  const auto rep = verify(c, detect_events(c, false));
  REQUIRE(rep.theorem_j.size() == 1);
  const auto& iv = rep.theorem_j[0];
  CHECK(iv.m_prev == 1);
  CHECK(iv.m_cur == 2);
  CHECK(iv.mu_half_open == 2);
  CHECK(iv.mu_closed == 2);
  CHECK(iv.mu_point == 2);
  CHECK(iv.half_open_ok);
  CHECK(iv.closed_ok);
  CHECK(iv.point_ok);
}

TEST_CASE("identity saturates once the index passes the tracked rows") {
  TraceOptions opt;
  opt.resolution.n_per_unit = 100;
  const auto curve = trace_curves(make_family(FamilyKind::CircleInterval), linspace(0.5, 16.0, 40), 2, opt);
  const auto rep = verify(curve, detect_events(curve, true));
  CHECK(curve.twisted_index.back().index == 4);
  CHECK(rep.identity.back().events_below == 2);
  CHECK(rep.identity_ok);
  const auto it = std::find_if(rep.checks.begin(), rep.checks.end(), [](const Check& c) { return c.name == "morse_identity"; });
  REQUIRE(it != rep.checks.end());
  CHECK(it->detail.find("tracked rows") != std::string::npos);
}

TEST_CASE("steep smooth curves at the grid ends are not jumps") {
  // pi^2 / t^2 - 1 on a coarse grid starting near 0
  const auto t = linspace(0.3, 3.0, 10);
  std::vector<double> dir, tw;
  for (double s : t) {
    dir.push_back(pi * pi / (s * s) - 1);
    tw.push_back(4 * pi * pi / (s * s) - 1);
  }
  const auto c = synthetic(t, {dir}, {tw});
  CHECK(verify(c, detect_events(c, false)).continuity_ok);

  // a genuine step on the last interval is still caught
  auto stepped = dir;
  stepped.back() -= 5.0;
  const auto s = synthetic(t, {stepped}, {tw});
  CHECK_FALSE(verify(s, detect_events(s, false)).continuity_ok);
}
