#pragma once

#include <string>
#include <vector>

#include "cmc/discretize.hpp"
#include "cmc/eig.hpp"
#include "cmc/surfaces.hpp"

namespace cmc {

struct TraceOptions {
  Resolution resolution;
  /// Nullity tolerance; non-positive selects default_null_tol per slice.
  double null_tol = 0.0;
  /// Worker threads for the per-t sweep (results are merged in t order).
  int threads = 1;
};

/// The K smallest Dirichlet and twisted eigenvalues at one t, plus the exact
/// index and nullity of both full discrete spectra.
struct SpectrumSlice {
  double t = 0.0;
  std::vector<double> dirichlet;
  std::vector<double> twisted;
  IndexNullity dirichlet_index;
  IndexNullity twisted_index;
  double h = 0.0;
  /// Radial families: the lowest eigenvalue of mode m_max lies above the
  /// K-th merged eigenvalue, so the truncation in m cannot hide a value.
  bool modes_resolved = true;
};

/// Radial families merge the azimuthal modes m = 0..m_max, counting m >= 1
/// twice (cos and sin). The volume constraint binds only the m = 0 block,
/// so the twisted spectrum is the constrained m = 0 spectrum joined with the
/// unconstrained m >= 1 spectra.
SpectrumSlice spectrum_at(const DomainFamily& family, double t, std::size_t k, const TraceOptions& opts);

struct EigenCurve {
  DomainFamily family;
  std::vector<double> t;
  std::size_t k = 0;
  // rows indexed [label - 1][sample]
  std::vector<std::vector<double>> dirichlet;
  std::vector<std::vector<double>> twisted;
  std::vector<IndexNullity> dirichlet_index;
  std::vector<IndexNullity> twisted_index;
  std::vector<double> h;
  std::vector<bool> modes_resolved;
  TraceOptions options;
};

EigenCurve trace_curves(const DomainFamily& family, const std::vector<double>& t_grid, std::size_t k,
                        const TraceOptions& opts);

enum class EventKind { DirichletZero, TwistedZero };
std::string_view to_string(EventKind kind);

/// A zero crossing of an eigenvalue curve: an extremal domain (Dirichlet,
/// k = 1) or a domain carrying Jacobi fields (twisted).
struct JacobiEvent {
  double t_star = 0.0;
  EventKind kind = EventKind::DirichletZero;
  int k = 0;  // smallest row label in the merged event
  int multiplicity = 1;
  double refined_width = 0.0;
};

struct EventDetection {
  std::vector<JacobiEvent> events;
  std::vector<std::string> warnings;
};

/// Relative merge tolerance for coincident crossings: 1e-5 (1 + t).
double event_cluster_tol(double t);

/// Finds the sign changes of every row. With `refine`, each crossing is
/// bisected in t down to 1e-6 (1 + t) using the exact negative-eigenvalue
/// count at a fresh assembly per probe, which is valid because the curves
/// are strictly decreasing on set-continuous families. Crossings of one kind
/// at the same t merge with summed multiplicity.
///
/// Throws ConsistencyError when a row of a set-continuous family increases
/// beyond the discretization noise.
EventDetection detect_events(const EigenCurve& curve, bool refine);

struct Check {
  std::string name;
  bool ok = true;
  /// A violation that the family's declared metadata predicts (continuity
  /// failures on families that are not set-continuous).
  bool expected = false;
  std::string detail;
};

struct IdentityPoint {
  double r = 0.0;
  int twisted_index = 0;
  int twisted_nullity = 0;
  int events_below = 0;
  bool ok = true;
};

struct LemmaDPoint {
  double t = 0.0;
  int index = 0;
  int twisted_index = 0;
  bool ok = true;
};

/// Jacobi-field counts between consecutive distinct Dirichlet zero times.
struct TheoremJInterval {
  double t_prev = 0.0;
  double t_cur = 0.0;
  int m_prev = 0;
  int m_cur = 0;
  int mu_half_open = 0;  // (t_prev, t_cur]
  int mu_closed = 0;     // [t_prev, t_cur]
  int mu_point = 0;      // {t_cur}
  bool half_open_ok = true;
  bool closed_ok = true;
  bool point_ok = true;
};

struct MorseReport {
  EigenCurve curve;
  std::vector<JacobiEvent> events;
  std::vector<std::string> warnings;

  bool identity_ok = true;
  std::vector<IdentityPoint> identity;
  bool lemma_d_ok = true;
  std::vector<LemmaDPoint> lemma_d;
  bool interlacing_ok = true;
  bool monotone_ok = true;
  bool continuity_ok = true;
  bool theorem_j_ok = true;
  std::vector<TheoremJInterval> theorem_j;
  bool prop_5_1_ok = true;
  /// First twisted zero strictly inside (t_1, t_2), not merely t_1 < c <= t_2.
  bool prop_5_1_strict = false;

  std::vector<Check> checks;

  /// True when every check passed or failed only in the expected way.
  bool all_ok() const;
};

/// Checks the index identities, interlacing, monotonicity, continuity and
/// the Jacobi-field distribution bounds on a traced curve and its events.
MorseReport verify(const EigenCurve& curve, const EventDetection& detection);

}  // namespace cmc
