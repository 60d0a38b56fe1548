#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "vwpinn/array.hpp"
#include "vwpinn/geometry.hpp"

namespace vwpinn::sampling {

enum class Provenance { kUniform, kGradedRadial, kRefinedBand, kAdaptive, kImported };

struct CollocationSet {
  Array points;  // n x dim
  std::uint64_t seed = 0;
  Provenance provenance = Provenance::kUniform;
  int adaptive_cycle = -1;
  int count() const { return points.rows(); }
};

struct AdaptiveConfig {
  double k = 1.0;
  double c = 1.0;
  int n_dense = 20000;
  int period_adam_steps = 1000;   // per sampling period
  int period_lbfgs_steps = 1000;  // per sampling period
  int cycles = 20;
};

/// Rejection sampling, uniform over the domain.
CollocationSet sample_uniform(const geom::Domain& domain, int n, std::uint64_t seed);

struct GradedRadialConfig {
  double growth = 1.08;  // ratio between successive ring spacings, > 1
  int rings = 40;
};

/// Jittered rings around the body whose radial spacing grows geometrically,
/// so the point density falls off with distance from the body.
CollocationSet sample_graded_radial(const geom::Domain& domain, int n, double growth,
                                    std::uint64_t seed, int rings = 40);

struct BandSpec {
  int axis = 0;
  double lo = 0.0;
  double hi = 0.0;
  double density_ratio = 1.0;  // band density / outside density
};

/// Piecewise-uniform sampling of a rectangle with a denser axis-aligned band.
CollocationSet sample_refined_band(const geom::Domain& rectangle, int n, const BandSpec& band,
                                   std::uint64_t seed);

/// Nonnegative residual magnitudes for a batch of candidate points.
using ResidualMagnitudeFn = std::function<std::vector<double>(const Array& points)>;

/// Draws a dense uniform candidate set, weights it by eps^k / mean(eps^k) + c,
/// and resamples n points with replacement. An all-zero weight vector (k > 0,
/// c = 0) falls back to uniform and sets `degenerate_fallback`.
CollocationSet adaptive_resample(const ResidualMagnitudeFn& residual_fn,
                                 const geom::Domain& domain, int n, const AdaptiveConfig& config,
                                 std::uint64_t seed, bool* degenerate_fallback = nullptr);

void write_points_csv(const std::string& path, const CollocationSet& set, bool space_time);
CollocationSet read_points_csv(const std::string& path);

}  // namespace vwpinn::sampling
