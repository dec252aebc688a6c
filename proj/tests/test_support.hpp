#pragma once

// Seeded generators and small helpers shared by the test binaries.

#include <cstdint>
#include <random>
#include <vector>

#include "flowcomp/flowcomp.hpp"

namespace flowcomp::testing {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  Point box(int n, double lo, double hi) {
    Point x(static_cast<std::size_t>(n));
    for (double& c : x) c = uniform(lo, hi);
    return x;
  }

  /// Uniform in [lo, hi]^n, conditioned on lying in M with margin at least `margin`.
  Point in_manifold(const VectorFieldSpec& v, double lo, double hi, double margin = 0.0) {
    for (;;) {
      Point x = box(v.dimension(), lo, hi);
      if (!v.manifold.contains(x)) continue;
      if (margin > 0.0) {
        if (auto m = v.manifold.margin_at(x); m && *m < margin) continue;
      }
      return x;
    }
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

inline double max_abs_diff(const Point& a, const Point& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

/// Closed-form flow of the unit horizontal field on the plane minus the
/// segment {0} x [-half, half] (half = 0 is the punctured plane). Returns
/// nullopt when the path x + [0, t] e1 meets the segment.
inline std::optional<Point> shift_flow(const Point& x, double t, double half) {
  const double a = std::min(x[0], x[0] + t);
  const double b = std::max(x[0], x[0] + t);
  if (a <= 0.0 && 0.0 <= b && std::fabs(x[1]) <= half) return std::nullopt;
  return Point{x[0] + t, x[1]};
}

}  // namespace flowcomp::testing
