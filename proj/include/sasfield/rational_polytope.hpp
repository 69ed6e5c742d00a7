// Exact H-polytopes over Q: linear programming, projection, slicing, vertex
// enumeration and volume.
#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "sasfield/integer_matrix.hpp"

namespace sasfield {

using RatVec = std::vector<Rational>;

/// normal . x <= bound
struct HalfSpace {
    RatVec normal;
    Rational bound;
};

struct LpResult {
    enum class Status { optimal, infeasible, unbounded };
    Status status = Status::infeasible;
    Rational value;
    RatVec argmax;
};

class HPolytope {
public:
    HPolytope() = default;
    HPolytope(std::size_t dim, std::vector<HalfSpace> rows);

    std::size_t dimension() const { return dim_; }
    const std::vector<HalfSpace>& rows() const { return rows_; }
    /// True when a variable-free row was violated while building; such a
    /// polytope has no points.
    bool trivially_empty() const { return empty_; }

    bool contains(const RatVec& x) const;
    /// Floating-point membership with absolute slack `tol`.
    bool contains(std::span<const double> x, double tol = 0.0) const;

    /// Fixes the leading coordinates to `values`; the result lives in the
    /// remaining dimension() - values.size() coordinates.
    HPolytope slice_leading(const RatVec& values) const;

    /// Projects onto the leading dimension() - count coordinates by
    /// Fourier-Motzkin elimination of the trailing `count` ones.
    HPolytope eliminate_trailing(std::size_t count) const;

    /// Drops rows implied by the others. Requires the origin to be feasible.
    HPolytope without_redundant_rows() const;

    /// All vertices, by solving every dimension()-subset of rows. Requires a
    /// bounded polytope; dimension 0 yields the empty vector when feasible.
    std::vector<RatVec> vertices() const;

    /// Exact volume; dimension 0 gives 1 when nonempty. Cost grows like
    /// rows^(dimension - 2), so callers cap the dimension.
    Rational exact_volume() const;

    /// Coordinatewise bounds via linear programming; the origin must be feasible.
    std::pair<RatVec, RatVec> bounding_box() const;

private:
    std::size_t dim_ = 0;
    std::vector<HalfSpace> rows_;
    bool empty_ = false;
};

/// Maximizes objective . x over a polytope whose bounds are all >= 0, so the
/// origin is feasible. Dense simplex with Bland's rule over Q.
LpResult maximize(const RatVec& objective, const HPolytope& poly);

/// Exact rational value of a double.
Rational to_rational(double x);
RatVec to_rational(std::span<const double> x);

/// Solves the square system a x = b over Q; returns false when singular.
bool solve_square(std::vector<RatVec> a, RatVec b, RatVec& x);

/// Area of a convex polygon given its vertices in any order.
Rational convex_polygon_area(std::vector<RatVec> vertices);

}  // namespace sasfield
