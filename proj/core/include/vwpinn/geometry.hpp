#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vwpinn/array.hpp"
#include "vwpinn/errors.hpp"

namespace vwpinn::geom {

struct BodyShape {
  enum class Kind { kCircle, kNaca0012 } kind = Kind::kCircle;
  double center_x = 0.0, center_y = 0.0;  // circle center / airfoil leading edge
  double diameter = 1.0;                  // circle
  double chord = 1.0;                     // airfoil
  double aoa_deg = 0.0;                   // airfoil angle of attack
};

/// Computational domain. Rectangles cover space or space-time boxes (the last
/// axis is time when `space_time` is set); the exterior kinds carve a body out
/// of a circular far field or a rectangle.
struct Domain {
  enum class Kind { kRectangle, kAnnularExterior, kRectangleMinusBody } kind = Kind::kRectangle;
  std::vector<double> lo, hi;  // rectangle bounds, one entry per axis
  double far_diameter = 40.0;  // annular exterior, centered on the body
  std::optional<BodyShape> body;
  bool space_time = false;

  int dim() const { return kind == Kind::kRectangle ? static_cast<int>(lo.size()) : 2; }
  void validate() const;
};

Domain make_rectangle(std::vector<double> lo, std::vector<double> hi, bool space_time = false);
Domain make_annular_exterior(BodyShape body, double far_diameter);
Domain make_rectangle_minus_body(std::vector<double> lo, std::vector<double> hi, BodyShape body);

enum class BoundaryTag { kBody, kFarField, kInflow, kOutflow, kUpper, kLower, kInitial };
std::string to_string(BoundaryTag tag);

struct BoundarySample {
  Array points;   // n x dim
  Array normals;  // n x dim, unit outward normals of the tagged curve
  BoundaryTag tag = BoundaryTag::kBody;
};

bool contains(const Domain& domain, std::span<const double> point);

struct SurfacePoint {
  double x = 0, y = 0;    // position
  double nx = 0, ny = 0;  // outward unit normal
};

/// Standard NACA 4-digit 12% thickness profile with the closed trailing edge,
/// rotated by -aoa about the leading edge. s in [0,1] runs chordwise.
SurfacePoint naca0012_surface(double s, bool upper, double chord, double aoa_deg);

/// Signed check used by contains(): true when (x, y) lies inside the airfoil.
bool naca0012_inside(const BodyShape& body, double x, double y);

BoundarySample sample_boundary(const Domain& domain, BoundaryTag tag, int n, std::uint64_t seed);

struct AreaEstimate {
  double value = 0.0;
  double std_error = 0.0;  // zero for analytic results
  long mc_samples = 0;
};

/// Total measure V_s. Analytic except for the rectangle-minus-airfoil case,
/// which uses Monte Carlo with the requested sample count.
AreaEstimate domain_area(const Domain& domain, long mc_samples = 2000000,
                         std::uint64_t seed = 988776655);

}  // namespace vwpinn::geom
