#pragma once

// The manifold M as an open subset of R^n, the vector field X on it, and
// tagged points (s, x) of R x M.

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "flowcomp/errors.hpp"
#include "flowcomp/expr.hpp"

namespace flowcomp {

using Point = std::vector<double>;

inline double norm(std::span<const double> v) {
  double s = 0.0;
  for (double c : v) s += c * c;
  return std::sqrt(s);
}

inline double distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

inline std::string format_point(std::span<const double> x) {
  std::string out = "(";
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i) out += ", ";
    out += detail::format_number(x[i]);
  }
  return out + ")";
}

struct ManifoldSpec {
  int dimension = 1;
  Predicate inside = Predicate::always();
  /// Lower bound on the distance to the complement of M. Lets escape detection
  /// find measure-zero excluded sets that sampling alone would miss.
  std::optional<Expression> margin;

  bool contains(std::span<const double> x) const {
    check_dimension(x);
    return inside(x);
  }

  std::optional<double> margin_at(std::span<const double> x) const {
    if (!margin) return std::nullopt;
    return (*margin)(x);
  }

  void check_dimension(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != dimension) {
      throw EvalError(EvalErrorKind::dimension_mismatch,
                      "point has dimension " + std::to_string(x.size()) + ", manifold has " +
                          std::to_string(dimension));
    }
  }
};

inline ManifoldSpec make_manifold(int dimension, std::string_view inside,
                                  std::optional<std::string_view> margin = std::nullopt) {
  if (dimension <= 0) throw Error("manifold dimension must be positive");
  ManifoldSpec m;
  m.dimension = dimension;
  const ParseOptions opts{dimension, false};
  m.inside = Predicate::parse(inside, opts);
  if (margin) m.margin = Expression::parse(*margin, opts);
  return m;
}

inline bool contains(const ManifoldSpec& m, std::span<const double> x) { return m.contains(x); }

/// An autonomous vector field on M, optionally with its closed-form flow.
struct VectorFieldSpec {
  ManifoldSpec manifold;
  std::vector<Expression> rhs;
  /// Components of Fl_t(x) as expressions in x1..xn and t.
  std::optional<std::vector<Expression>> oracle_flow;

  int dimension() const noexcept { return manifold.dimension; }

  /// Componentwise rhs without a membership test; used by the integrator at stage points.
  void evaluate(std::span<const double> x, std::span<double> out) const {
    for (std::size_t i = 0; i < rhs.size(); ++i) out[i] = rhs[i](x);
  }

  Point oracle(std::span<const double> x, double t) const {
    if (!oracle_flow) throw Error("vector field has no closed-form flow");
    Point out(rhs.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = (*oracle_flow)[i](x, t);
    return out;
  }
};

inline VectorFieldSpec make_field(ManifoldSpec manifold, std::span<const std::string> rhs,
                                  std::optional<std::vector<std::string>> oracle = std::nullopt) {
  const int n = manifold.dimension;
  if (static_cast<int>(rhs.size()) != n) {
    throw Error("rhs has " + std::to_string(rhs.size()) + " components, dimension is " + std::to_string(n));
  }
  VectorFieldSpec v;
  v.manifold = std::move(manifold);
  for (const auto& src : rhs) v.rhs.push_back(Expression::parse(src, ParseOptions{n, false}));
  if (oracle) {
    if (static_cast<int>(oracle->size()) != n) throw Error("oracle flow must have one component per dimension");
    std::vector<Expression> flow;
    for (const auto& src : *oracle) flow.push_back(Expression::parse(src, ParseOptions{n, true}));
    v.oracle_flow = std::move(flow);
  }
  return v;
}

/// X(x); throws OutsideDomain when x is not in M.
inline Point field_at(const VectorFieldSpec& v, std::span<const double> x) {
  if (!v.manifold.contains(x)) throw OutsideDomain("point " + format_point(x) + " is not in M");
  Point out(x.size());
  v.evaluate(x, out);
  return out;
}

/// A point (s, x) of R x M.
struct TaggedPoint {
  double s = 0.0;
  Point x;
};

/// Regular grid over an axis-aligned box, `count[i]` nodes along axis i.
struct BoxGrid {
  Point lo;
  Point hi;
  std::vector<int> count;

  std::size_t size() const {
    std::size_t n = 1;
    for (int c : count) n *= static_cast<std::size_t>(c);
    return n;
  }

  double spacing(std::size_t axis) const {
    return count[axis] > 1 ? (hi[axis] - lo[axis]) / (count[axis] - 1) : 0.0;
  }

  double min_spacing() const {
    double h = 0.0;
    for (std::size_t i = 0; i < count.size(); ++i) {
      const double s = spacing(i);
      if (s > 0.0 && (h == 0.0 || s < h)) h = s;
    }
    return h;
  }

  /// Node coordinates for flat index `k` (axis 0 varies fastest).
  Point node(std::size_t k) const {
    Point x(count.size());
    for (std::size_t i = 0; i < count.size(); ++i) {
      const auto c = static_cast<std::size_t>(count[i]);
      const auto j = k % c;
      k /= c;
      x[i] = count[i] > 1 ? lo[i] + (hi[i] - lo[i]) * static_cast<double>(j) / (count[i] - 1) : lo[i];
    }
    return x;
  }

  /// Flat index of the node within `tol` of x, if any.
  std::optional<std::size_t> snap(std::span<const double> x, double tol) const {
    std::size_t k = 0;
    std::size_t stride = 1;
    for (std::size_t i = 0; i < count.size(); ++i) {
      const double h = spacing(i);
      long j = 0;
      if (h > 0.0) {
        j = std::lround((x[i] - lo[i]) / h);
        if (j < 0 || j >= count[i]) return std::nullopt;
        const double xi = lo[i] + (hi[i] - lo[i]) * static_cast<double>(j) / (count[i] - 1);
        if (std::fabs(xi - x[i]) > tol) return std::nullopt;
      } else if (std::fabs(x[i] - lo[i]) > tol) {
        return std::nullopt;
      }
      k += static_cast<std::size_t>(j) * stride;
      stride *= static_cast<std::size_t>(count[i]);
    }
    return k;
  }
};

/// Checks that rhs evaluates wherever `inside` holds on the grid; returns the
/// first failing node, if any.
inline std::optional<Point> find_rhs_failure(const VectorFieldSpec& v, const BoxGrid& grid) {
  Point out(static_cast<std::size_t>(v.dimension()));
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const Point x = grid.node(k);
    try {
      if (!v.manifold.contains(x)) continue;
    } catch (const EvalError&) {
      continue;
    }
    try {
      v.evaluate(x, out);
    } catch (const EvalError&) {
      return x;
    }
  }
  return std::nullopt;
}

}  // namespace flowcomp
