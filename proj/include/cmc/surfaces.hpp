#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cmc {

enum class SurfaceKind { CircleImmersedLine, FlatLine, UnitCylinder, UnitSphere2 };

/// Area element in the radial coordinate: 1 on a line, r on the flat
/// (cylinder) disk, sin(theta) on a sphere cap.
enum class RadialWeight { Unit, Radius, SinTheta };

/// A model CMC surface with constant |B|^2.
struct SurfaceModel {
  SurfaceKind kind;
  double b_norm_sq;
  int dim;
  RadialWeight radial_weight;

  static SurfaceModel make(SurfaceKind kind);

  /// Evaluates the area element at radial coordinate r.
  double weight(double r) const;
};

/// Squared norm of the second fundamental form, derived from the principal
/// curvatures of the model (circle: 1; line: 0; unit cylinder: 1, 0;
/// unit sphere: 1, 1).
double b_norm_sq(const SurfaceModel& surface);

enum class FamilyKind { CircleInterval, FlatGap, CylinderDisk, SphereCap };

std::string_view to_string(FamilyKind kind);
std::string_view to_string(SurfaceKind kind);

/// Accepts "circle", "gap", "cylinder", "sphere" as well as the enum names.
FamilyKind parse_family_kind(std::string_view name);

struct Interval {
  double lo;
  double hi;
  double length() const { return hi - lo; }
  bool contains(const Interval& other) const { return lo <= other.lo && other.hi <= hi; }
};

/// One domain D(t). Dim-1 families carry their components directly; radial
/// families carry the single extent (0, t) and `radial` is set.
struct DomainSlice {
  double t = 0.0;
  std::vector<Interval> components;
  bool radial = false;
  double volume = 0.0;
};

struct DomainFamily {
  SurfaceModel surface;
  FamilyKind kind;
  double t_min;
  double t_max;
  // Declared, not computed: set-continuity of an abstract family is not decidable here.
  bool set_continuous;
  std::string description;
};

inline constexpr double kDefaultTMin = 0.3;

/// Builds one of the four shipped families. A non-positive t_max selects the
/// family's default upper end.
DomainFamily make_family(FamilyKind kind, double t_min = kDefaultTMin, double t_max = 0.0);

/// Domain D(t) of the family.
///
/// CircleInterval: (0, t) on the line immersed onto the unit circle.
/// FlatGap: (-pi, -pi(1-t)) u (pi(1-t), pi) for t < 1, and (-pi, pi) at t = 1.
/// CylinderDisk: geodesic disk of radius t, represented on its abstract
///   (pulled-back) disk for every t, so past t = pi the self-overlap of the
///   immersed disk does not enter the spectral problem.
/// SphereCap: geodesic cap of angular radius t < pi.
///
/// Throws ParameterRangeError outside [t_min, t_max] and GeometryError for a
/// sphere cap with t >= pi.
DomainSlice domain_at(const DomainFamily& family, double t);

struct FamilyMetadata {
  bool monotone_ok;
  bool set_continuous;
};

/// Checks nesting of consecutive slices over an ascending grid and echoes the
/// declared set-continuity flag. Throws InputError on an unsorted grid.
FamilyMetadata family_metadata(const DomainFamily& family, std::span<const double> t_grid);

/// True iff every component of `inner` lies in some component of `outer`.
bool slice_contained(const DomainSlice& inner, const DomainSlice& outer);

}  // namespace cmc
