#include "vwpinn/geometry.hpp"

#include <cmath>

#include "rng_util.hpp"

namespace vwpinn::geom {

namespace {
constexpr double kPi = 3.14159265358979323846;

double body_radius(const BodyShape& b) {
  // Circumscribing radius about the body reference point.
  if (b.kind == BodyShape::Kind::kCircle) return 0.5 * b.diameter;
  return b.chord;  // airfoil: leading edge to trailing edge
}

// Half thickness of the unit-chord NACA0012 profile, closed trailing edge.
double naca_half_thickness(double xc) {
  const double s = std::sqrt(xc);
  return 5.0 * 0.12 *
         (0.2969 * s - 0.1260 * xc - 0.3516 * xc * xc + 0.2843 * xc * xc * xc -
          0.1036 * xc * xc * xc * xc);
}

double naca_half_thickness_deriv(double xc) {
  const double s = std::sqrt(std::max(xc, 1e-300));
  return 5.0 * 0.12 *
         (0.2969 * 0.5 / s - 0.1260 - 2.0 * 0.3516 * xc + 3.0 * 0.2843 * xc * xc -
          4.0 * 0.1036 * xc * xc * xc);
}
}  // namespace

void Domain::validate() const {
  switch (kind) {
    case Kind::kRectangle: {
      if (lo.size() != hi.size() || lo.empty())
        throw ConfigError("Domain: rectangle bounds mismatch");
      for (std::size_t i = 0; i < lo.size(); ++i)
        if (!(hi[i] > lo[i])) throw ConfigError("Domain: empty rectangle extent");
      break;
    }
    case Kind::kAnnularExterior: {
      if (!body || body->kind != BodyShape::Kind::kCircle)
        throw ConfigError("Domain: annular exterior requires a circular body");
      if (!(body->diameter > 0) || !(far_diameter > body->diameter))
        throw ConfigError("Domain: body must lie strictly inside the far field");
      break;
    }
    case Kind::kRectangleMinusBody: {
      if (lo.size() != 2 || hi.size() != 2) throw ConfigError("Domain: need 2D rectangle");
      if (!body) throw ConfigError("Domain: missing body");
      const double r = body_radius(*body);
      if (body->center_x - r <= lo[0] || body->center_x + r >= hi[0] ||
          body->center_y - r <= lo[1] || body->center_y + r >= hi[1])
        throw ConfigError("Domain: body must lie strictly inside the rectangle");
      break;
    }
  }
}

Domain make_rectangle(std::vector<double> lo, std::vector<double> hi, bool space_time) {
  Domain d;
  d.kind = Domain::Kind::kRectangle;
  d.lo = std::move(lo);
  d.hi = std::move(hi);
  d.space_time = space_time;
  d.validate();
  return d;
}

Domain make_annular_exterior(BodyShape body, double far_diameter) {
  Domain d;
  d.kind = Domain::Kind::kAnnularExterior;
  d.body = body;
  d.far_diameter = far_diameter;
  d.lo = {body.center_x - 0.5 * far_diameter, body.center_y - 0.5 * far_diameter};
  d.hi = {body.center_x + 0.5 * far_diameter, body.center_y + 0.5 * far_diameter};
  d.validate();
  return d;
}

Domain make_rectangle_minus_body(std::vector<double> lo, std::vector<double> hi, BodyShape body) {
  Domain d;
  d.kind = Domain::Kind::kRectangleMinusBody;
  d.lo = std::move(lo);
  d.hi = std::move(hi);
  d.body = body;
  d.validate();
  return d;
}

std::string to_string(BoundaryTag tag) {
  switch (tag) {
    case BoundaryTag::kBody: return "body";
    case BoundaryTag::kFarField: return "far-field";
    case BoundaryTag::kInflow: return "inflow";
    case BoundaryTag::kOutflow: return "outflow";
    case BoundaryTag::kUpper: return "upper";
    case BoundaryTag::kLower: return "lower";
    case BoundaryTag::kInitial: return "initial";
  }
  return "?";
}

bool naca0012_inside(const BodyShape& body, double x, double y) {
  const double th = body.aoa_deg * kPi / 180.0;
  const double dx = x - body.center_x, dy = y - body.center_y;
  // Undo the -aoa rotation to get chord-frame coordinates.
  const double qx = std::cos(th) * dx - std::sin(th) * dy;
  const double qy = std::sin(th) * dx + std::cos(th) * dy;
  if (qx <= 0.0 || qx >= body.chord) return false;
  return std::abs(qy) < naca_half_thickness(qx / body.chord) * body.chord;
}

namespace {
bool inside_body(const BodyShape& body, double x, double y) {
  if (body.kind == BodyShape::Kind::kCircle) {
    const double dx = x - body.center_x, dy = y - body.center_y;
    const double r = 0.5 * body.diameter;
    return dx * dx + dy * dy < r * r;
  }
  return naca0012_inside(body, x, y);
}
}  // namespace

bool contains(const Domain& domain, std::span<const double> point) {
  switch (domain.kind) {
    case Domain::Kind::kRectangle: {
      if (point.size() != domain.lo.size()) throw ShapeError("contains: dimension mismatch");
      for (std::size_t i = 0; i < domain.lo.size(); ++i)
        if (point[i] < domain.lo[i] || point[i] > domain.hi[i]) return false;
      return true;
    }
    case Domain::Kind::kAnnularExterior: {
      const BodyShape& b = *domain.body;
      const double dx = point[0] - b.center_x, dy = point[1] - b.center_y;
      const double r2 = dx * dx + dy * dy;
      const double rb = 0.5 * b.diameter, rf = 0.5 * domain.far_diameter;
      return r2 >= rb * rb && r2 <= rf * rf;
    }
    case Domain::Kind::kRectangleMinusBody: {
      for (int i = 0; i < 2; ++i)
        if (point[i] < domain.lo[i] || point[i] > domain.hi[i]) return false;
      return !inside_body(*domain.body, point[0], point[1]);
    }
  }
  return false;
}

SurfacePoint naca0012_surface(double s, bool upper, double chord, double aoa_deg) {
  if (s < 0.0 || s > 1.0) throw ConfigError("naca0012_surface: parameter out of [0,1]");
  const double xc = s;
  const double yt = naca_half_thickness(xc) * chord;
  const double x = xc * chord;
  const double y = upper ? yt : -yt;
  double nx, ny;
  if (xc < 1e-14) {
    nx = -1.0;
    ny = 0.0;
  } else {
    const double yp = naca_half_thickness_deriv(xc);  // d(yt)/d(xc) for unit chord
    const double len = std::hypot(yp, 1.0);
    nx = -yp / len;
    ny = (upper ? 1.0 : -1.0) / len;
  }
  // Rotate by -aoa about the leading edge.
  const double th = aoa_deg * kPi / 180.0;
  const double c = std::cos(th), sn = std::sin(th);
  SurfacePoint p;
  p.x = c * x + sn * y;
  p.y = -sn * x + c * y;
  p.nx = c * nx + sn * ny;
  p.ny = -sn * nx + c * ny;
  return p;
}

BoundarySample sample_boundary(const Domain& domain, BoundaryTag tag, int n, std::uint64_t seed) {
  if (n < 1) throw ConfigError("sample_boundary: n must be >= 1");
  domain.validate();
  std::mt19937_64 rng(seed);
  const int dim = domain.dim();
  BoundarySample out;
  out.tag = tag;
  out.points = Array(n, dim);
  out.normals = Array(n, dim);

  auto circle_points = [&](double cx, double cy, double radius) {
    for (int i = 0; i < n; ++i) {
      const double th = 2.0 * kPi * unit_uniform(rng);
      const double nx = std::cos(th), ny = std::sin(th);
      out.points(i, 0) = cx + radius * nx;
      out.points(i, 1) = cy + radius * ny;
      out.normals(i, 0) = nx;
      out.normals(i, 1) = ny;
    }
  };
  auto rect_edge = [&](int axis, bool at_hi, double normal_sign) {
    for (int i = 0; i < n; ++i) {
      for (int d = 0; d < dim; ++d)
        out.points(i, d) = d == axis ? (at_hi ? domain.hi[d] : domain.lo[d])
                                     : uniform_in(rng, domain.lo[d], domain.hi[d]);
      out.normals(i, axis) = normal_sign;
    }
  };

  switch (domain.kind) {
    case Domain::Kind::kAnnularExterior: {
      const BodyShape& b = *domain.body;
      if (tag == BoundaryTag::kBody)
        circle_points(b.center_x, b.center_y, 0.5 * b.diameter);
      else if (tag == BoundaryTag::kFarField)
        circle_points(b.center_x, b.center_y, 0.5 * domain.far_diameter);
      else
        throw ConfigError("sample_boundary: tag '" + to_string(tag) + "' not on this domain");
      break;
    }
    case Domain::Kind::kRectangleMinusBody: {
      const BodyShape& b = *domain.body;
      if (tag == BoundaryTag::kBody) {
        if (b.kind == BodyShape::Kind::kCircle) {
          circle_points(b.center_x, b.center_y, 0.5 * b.diameter);
        } else {
          for (int i = 0; i < n; ++i) {
            const double sigma = 2.0 * unit_uniform(rng);
            const bool upper = sigma < 1.0;
            const double s = upper ? sigma : sigma - 1.0;
            SurfacePoint p = naca0012_surface(s, upper, b.chord, b.aoa_deg);
            out.points(i, 0) = b.center_x + p.x;
            out.points(i, 1) = b.center_y + p.y;
            out.normals(i, 0) = p.nx;
            out.normals(i, 1) = p.ny;
          }
        }
      } else if (tag == BoundaryTag::kInflow) {
        rect_edge(0, false, -1.0);
      } else if (tag == BoundaryTag::kOutflow) {
        rect_edge(0, true, 1.0);
      } else if (tag == BoundaryTag::kUpper) {
        rect_edge(1, true, 1.0);
      } else if (tag == BoundaryTag::kLower) {
        rect_edge(1, false, -1.0);
      } else {
        throw ConfigError("sample_boundary: tag '" + to_string(tag) + "' not on this domain");
      }
      break;
    }
    case Domain::Kind::kRectangle: {
      if (domain.space_time) {
        const int t_axis = dim - 1;
        if (tag == BoundaryTag::kInitial)
          rect_edge(t_axis, false, -1.0);
        else if (tag == BoundaryTag::kLower)
          rect_edge(0, false, -1.0);
        else if (tag == BoundaryTag::kUpper)
          rect_edge(0, true, 1.0);
        else
          throw ConfigError("sample_boundary: tag '" + to_string(tag) + "' not on this domain");
      } else {
        if (tag == BoundaryTag::kInflow)
          rect_edge(0, false, -1.0);
        else if (tag == BoundaryTag::kOutflow)
          rect_edge(0, true, 1.0);
        else if (tag == BoundaryTag::kUpper)
          rect_edge(1, true, 1.0);
        else if (tag == BoundaryTag::kLower)
          rect_edge(1, false, -1.0);
        else
          throw ConfigError("sample_boundary: tag '" + to_string(tag) + "' not on this domain");
      }
      break;
    }
  }
  return out;
}

AreaEstimate domain_area(const Domain& domain, long mc_samples, std::uint64_t seed) {
  domain.validate();
  AreaEstimate est;
  switch (domain.kind) {
    case Domain::Kind::kRectangle: {
      est.value = 1.0;
      for (std::size_t i = 0; i < domain.lo.size(); ++i) est.value *= domain.hi[i] - domain.lo[i];
      return est;
    }
    case Domain::Kind::kAnnularExterior: {
      const double rb = 0.5 * domain.body->diameter, rf = 0.5 * domain.far_diameter;
      est.value = kPi * (rf * rf - rb * rb);
      return est;
    }
    case Domain::Kind::kRectangleMinusBody: {
      const double rect = (domain.hi[0] - domain.lo[0]) * (domain.hi[1] - domain.lo[1]);
      const BodyShape& b = *domain.body;
      if (b.kind == BodyShape::Kind::kCircle) {
        est.value = rect - kPi * 0.25 * b.diameter * b.diameter;
        return est;
      }
      // Monte Carlo over the chord-frame bounding box of the airfoil.
      std::mt19937_64 rng(seed);
      const double tmax = 0.061 * b.chord;  // just above the max half thickness
      long hits = 0;
      for (long i = 0; i < mc_samples; ++i) {
        const double x = uniform_in(rng, 0.0, b.chord);
        const double y = uniform_in(rng, -tmax, tmax);
        if (std::abs(y) < naca_half_thickness(x / b.chord) * b.chord) ++hits;
      }
      const double box = b.chord * 2.0 * tmax;
      const double frac = static_cast<double>(hits) / static_cast<double>(mc_samples);
      const double body_area = box * frac;
      est.value = rect - body_area;
      est.std_error = box * std::sqrt(frac * (1.0 - frac) / static_cast<double>(mc_samples));
      est.mc_samples = mc_samples;
      return est;
    }
  }
  return est;
}

}  // namespace vwpinn::geom
