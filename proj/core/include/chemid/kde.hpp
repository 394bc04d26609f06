#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace chemid {

/// Gaussian kernel density estimate sampled on a grid.
struct KdeCurve {
  std::vector<double> grid;
  std::vector<double> density;
  double bandwidth = 0.0;

  /// Trapezoid-rule integral over the grid.
  double integral() const;
  /// Grid point with the highest density (first on ties).
  double mode() const;
};

struct GridSpec {
  double lo = 0.0;
  double hi = 1.0;
  std::size_t points = 512;
};

/// Bandwidth floor for degenerate (zero-spread) samples.
inline constexpr double kMinBandwidth = 1e-3;

/// Silverman's rule of thumb, 0.9 * min(sd, IQR/1.34) * m^(-1/5), falling back
/// to sd when the IQR is zero and clamped below at kMinBandwidth.
double silverman_bandwidth(std::span<const double> samples);

/// Evaluates the KDE on an explicit grid. The bandwidth is never narrower
/// than the grid step, so even a degenerate spike integrates to one. Throws std::invalid_argument on an
/// empty sample list or a grid with fewer than two points.
KdeCurve estimate_kde(std::span<const double> samples, const GridSpec& grid);

/// Evaluates on a grid spanning [min - 5h, max + 5h], which captures the
/// whole support to well below 1e-3 of the mass. With the default 512 points
/// the step is below h, so the bandwidth is Silverman's unchanged.
KdeCurve estimate_kde(std::span<const double> samples, std::size_t points = 512);

}  // namespace chemid
