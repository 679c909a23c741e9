#include "cmc/surfaces.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "cmc/errors.hpp"

namespace cmc {

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

SurfaceModel SurfaceModel::make(SurfaceKind kind) {
  switch (kind) {
    case SurfaceKind::CircleImmersedLine:
      return {kind, 1.0, 1, RadialWeight::Unit};
    case SurfaceKind::FlatLine:
      return {kind, 0.0, 1, RadialWeight::Unit};
    case SurfaceKind::UnitCylinder:
      // principal curvatures 1 and 0
      return {kind, 1.0, 2, RadialWeight::Radius};
    case SurfaceKind::UnitSphere2:
      // principal curvatures 1 and 1
      return {kind, 2.0, 2, RadialWeight::SinTheta};
  }
  throw InputError("unknown surface kind");
}

double SurfaceModel::weight(double r) const {
  switch (radial_weight) {
    case RadialWeight::Unit:
      return 1.0;
    case RadialWeight::Radius:
      return r;
    case RadialWeight::SinTheta:
      return std::sin(r);
  }
  return 1.0;
}

double b_norm_sq(const SurfaceModel& surface) { return surface.b_norm_sq; }

std::string_view to_string(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::CircleInterval:
      return "CircleInterval";
    case FamilyKind::FlatGap:
      return "FlatGap";
    case FamilyKind::CylinderDisk:
      return "CylinderDisk";
    case FamilyKind::SphereCap:
      return "SphereCap";
  }
  return "?";
}

std::string_view to_string(SurfaceKind kind) {
  switch (kind) {
    case SurfaceKind::CircleImmersedLine:
      return "CircleImmersedLine";
    case SurfaceKind::FlatLine:
      return "FlatLine";
    case SurfaceKind::UnitCylinder:
      return "UnitCylinder";
    case SurfaceKind::UnitSphere2:
      return "UnitSphere2";
  }
  return "?";
}

FamilyKind parse_family_kind(std::string_view name) {
  if (name == "circle" || name == "CircleInterval") return FamilyKind::CircleInterval;
  if (name == "gap" || name == "FlatGap") return FamilyKind::FlatGap;
  if (name == "cylinder" || name == "CylinderDisk") return FamilyKind::CylinderDisk;
  if (name == "sphere" || name == "SphereCap") return FamilyKind::SphereCap;
  throw InputError("unknown family '" + std::string(name) + "'");
}

DomainFamily make_family(FamilyKind kind, double t_min, double t_max) {
  DomainFamily f{SurfaceModel::make(SurfaceKind::CircleImmersedLine), kind, t_min, t_max, true, ""};
  double default_max = 0.0;
  switch (kind) {
    case FamilyKind::CircleInterval:
      f.surface = SurfaceModel::make(SurfaceKind::CircleImmersedLine);
      f.description = "intervals (0,t) on the line immersed onto the unit circle";
      default_max = 30.0;
      break;
    case FamilyKind::FlatGap:
      f.surface = SurfaceModel::make(SurfaceKind::FlatLine);
      f.set_continuous = false;
      f.description = "two flat intervals growing toward each other, joined at t = 1";
      default_max = 1.0;
      break;
    case FamilyKind::CylinderDisk:
      f.surface = SurfaceModel::make(SurfaceKind::UnitCylinder);
      f.description = "geodesic disks of radius t on the unit cylinder (self-gluing at t = pi)";
      default_max = 8.0;
      break;
    case FamilyKind::SphereCap:
      f.surface = SurfaceModel::make(SurfaceKind::UnitSphere2);
      f.description = "geodesic caps of angular radius t on the unit sphere";
      default_max = 3.0;
      break;
  }
  if (t_max <= 0.0) f.t_max = default_max;
  if (!(f.t_min > 0.0) || !(f.t_min < f.t_max)) {
    throw InputError("family range requires 0 < t_min < t_max, got [" + fmt_double(f.t_min) +
                     ", " + fmt_double(f.t_max) + "]");
  }
  if (kind == FamilyKind::FlatGap && f.t_max > 1.0) {
    throw InputError("FlatGap is defined for t <= 1");
  }
  if (kind == FamilyKind::SphereCap && f.t_max >= kPi) {
    throw GeometryError("SphereCap requires t_max < pi");
  }
  return f;
}

DomainSlice domain_at(const DomainFamily& family, double t) {
  if (!(t >= family.t_min && t <= family.t_max)) {
    throw ParameterRangeError("t = " + fmt_double(t) + " outside [" + fmt_double(family.t_min) +
                              ", " + fmt_double(family.t_max) + "]");
  }
  DomainSlice s;
  s.t = t;
  switch (family.kind) {
    case FamilyKind::CircleInterval:
      s.components = {{0.0, t}};
      s.volume = t;
      break;
    case FamilyKind::FlatGap:
      if (t < 1.0) {
        s.components = {{-kPi, -kPi * (1.0 - t)}, {kPi * (1.0 - t), kPi}};
      } else {
        s.components = {{-kPi, kPi}};
      }
      s.volume = 0.0;
      for (const auto& c : s.components) s.volume += c.length();
      break;
    case FamilyKind::CylinderDisk:
      s.radial = true;
      s.components = {{0.0, t}};
      s.volume = kPi * t * t;
      break;
    case FamilyKind::SphereCap:
      if (t >= kPi) throw GeometryError("sphere cap radius must be < pi");
      s.radial = true;
      s.components = {{0.0, t}};
      s.volume = 2.0 * kPi * (1.0 - std::cos(t));
      break;
  }
  return s;
}

bool slice_contained(const DomainSlice& inner, const DomainSlice& outer) {
  return std::all_of(inner.components.begin(), inner.components.end(), [&](const Interval& c) {
    return std::any_of(outer.components.begin(), outer.components.end(),
                       [&](const Interval& o) { return o.contains(c); });
  });
}

FamilyMetadata family_metadata(const DomainFamily& family, std::span<const double> t_grid) {
  for (std::size_t i = 1; i < t_grid.size(); ++i) {
    if (!(t_grid[i - 1] < t_grid[i])) throw InputError("t grid must be strictly ascending");
  }
  bool ok = true;
  for (std::size_t i = 1; i < t_grid.size(); ++i) {
    const auto a = domain_at(family, t_grid[i - 1]);
    const auto b = domain_at(family, t_grid[i]);
    ok = ok && slice_contained(a, b) && a.volume < b.volume;
  }
  return {ok, family.set_continuous};
}

}  // namespace cmc
