#include "chemid/kde.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace chemid {

namespace {

// Linear-interpolated quantile (type 7, as in R and numpy defaults).
double quantile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

double KdeCurve::integral() const {
  double total = 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    total += 0.5 * (density[i] + density[i - 1]) * (grid[i] - grid[i - 1]);
  }
  return total;
}

double KdeCurve::mode() const {
  if (grid.empty()) throw std::logic_error("mode of an empty curve");
  const auto it = std::max_element(density.begin(), density.end());
  return grid[static_cast<std::size_t>(it - density.begin())];
}

double silverman_bandwidth(std::span<const double> samples) {
  if (samples.empty()) throw std::invalid_argument("bandwidth of an empty sample");
  const auto m = static_cast<double>(samples.size());
  if (samples.size() < 2) return kMinBandwidth;

  double mean = 0.0;
  for (double x : samples) mean += x;
  mean /= m;
  double ss = 0.0;
  for (double x : samples) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / (m - 1.0));

  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double iqr = quantile(sorted, 0.75) - quantile(sorted, 0.25);

  const double spread = iqr > 0.0 ? std::min(sd, iqr / 1.34) : sd;
  return std::max(0.9 * spread * std::pow(m, -0.2), kMinBandwidth);
}

KdeCurve estimate_kde(std::span<const double> samples, const GridSpec& spec) {
  if (samples.empty()) throw std::invalid_argument("KDE of an empty sample");
  if (spec.points < 2 || !(spec.hi > spec.lo)) throw std::invalid_argument("KDE grid needs hi > lo and >= 2 points");

  KdeCurve curve;
  const double step = (spec.hi - spec.lo) / static_cast<double>(spec.points - 1);
  curve.bandwidth = std::max(silverman_bandwidth(samples), step);
  curve.grid.resize(spec.points);
  curve.density.assign(spec.points, 0.0);
  for (std::size_t i = 0; i < spec.points; ++i) curve.grid[i] = spec.lo + step * static_cast<double>(i);

  const double h = curve.bandwidth;
  const double norm = 1.0 / (static_cast<double>(samples.size()) * h * std::sqrt(2.0 * std::numbers::pi));
  // Samples farther than 9h contribute below exp(-40); skip them.
  const double cutoff = 9.0 * h;
  for (std::size_t i = 0; i < spec.points; ++i) {
    const double x = curve.grid[i];
    double acc = 0.0;
    for (double s : samples) {
      const double d = x - s;
      if (std::abs(d) > cutoff) continue;
      const double z = d / h;
      acc += std::exp(-0.5 * z * z);
    }
    curve.density[i] = acc * norm;
  }
  return curve;
}

KdeCurve estimate_kde(std::span<const double> samples, std::size_t points) {
  if (samples.empty()) throw std::invalid_argument("KDE of an empty sample");
  const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
  const double h = silverman_bandwidth(samples);
  return estimate_kde(samples, GridSpec{*lo - 5.0 * h, *hi + 5.0 * h, points});
}

}  // namespace chemid
