// The lifted polytope P = {(y, lambda) : ||U y + V lambda||_inf <= 1}, its
// projection C onto the y coordinates, and the fiber volumes
// V(y) = vol_q {lambda : (y, lambda) in P}.
//
// Volumes are exact rational computations: vertex enumeration up to
// dimension 2 and Lasserre's facet recursion above, with |C| and vol(P) exact
// up to dimension 4 and fiber volumes exact up to q = 4. Integrals over C
// use nested Gauss-Legendre rules on the pieces cut out by projected vertices
// when p <= 2 and q <= 2, where the fiber volume is polynomial on each piece.
// Everything else falls back to Monte Carlo with a reported standard error.
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "sasfield/lattice.hpp"
#include "sasfield/rational_polytope.hpp"
#include "sasfield/rng.hpp"

namespace sasfield {

/// A value with its Monte Carlo standard error (zero when computed exactly).
struct Estimate {
    double value = 0.0;
    double std_error = 0.0;
    bool exact = true;
};

struct GeometryOptions {
    std::uint64_t seed = 0x9e3779b97f4a7c15ULL;
    std::size_t volume_samples = 400'000;
    std::size_t fiber_samples = 20'000;
};

class Geometry {
public:
    /// Geometry of a quotient structure.
    static Geometry build(const QuotientStructure& qs, const GeometryOptions& options = {});
    /// Geometry for explicit bases U (d x p), V (d x q) and torsion order l.
    static Geometry from_bases(const IntMatrix& u, const IntMatrix& v, std::int64_t torsion,
                               const GeometryOptions& options = {});

    std::size_t effective_dimension() const { return p_; }
    std::size_t kernel_rank() const { return q_; }
    std::size_t dimension() const { return p_ + q_; }
    std::int64_t torsion_order() const { return torsion_; }
    /// True when p <= 2 and q <= 2, so integrate() is deterministic quadrature.
    bool exact() const { return p_ <= 2 && q_ <= 2; }

    const HPolytope& lifted() const { return lifted_; }
    /// Half-space description of C (Fourier-Motzkin projection of P).
    const HPolytope& body() const { return body_; }
    /// For p = 1: the half-width y* of C = [-y*, y*].
    const Rational& half_width() const;
    /// Vertices of C for p = 2, in counterclockwise order.
    const std::vector<RatVec>& polygon() const { return polygon_; }

    const std::vector<double>& box_lower() const { return box_lo_; }
    const std::vector<double>& box_upper() const { return box_hi_; }

    bool contains(std::span<const double> y) const;

    /// |C|; p = 0 gives 1.
    const Estimate& volume() const { return volume_; }

    /// V(y); zero outside C, one everywhere on C when q = 0.
    Estimate fiber_volume(std::span<const double> y) const;
    /// Exact fiber volume for q <= 4 at a rational point.
    Rational fiber_volume_exact(const RatVec& y) const;

    /// sup_C V = V(0) (C is symmetric and V^{1/q} is concave).
    double sup_fiber_volume() const;

    /// Integral over C of phi(V(y), y) dy.
    Estimate integrate(const std::function<double(double, std::span<const double>)>& phi) const;

    /// Integral of V over C.
    const Estimate& integral_of_fiber_volume() const { return integral_v_; }

    /// c = (l |C|)^{1/p}; throws std::domain_error when p = 0.
    double scaling_constant() const;

    /// Uniform draw from C by rejection from the bounding box.
    std::vector<double> sample_uniform(RandomStream& rng) const;

private:
    Geometry() = default;
    void finish();
    double integrate_exact(const HPolytope& poly, std::size_t free_dims, std::vector<double>& prefix,
                           const std::function<double(double, std::span<const double>)>& phi, int order) const;
    Estimate fiber_volume_mc(std::span<const double> y) const;

    std::size_t p_ = 0, q_ = 0;
    std::int64_t torsion_ = 1;
    GeometryOptions options_;
    std::vector<std::vector<double>> w_rows_;  // rows of [U : V] as doubles
    HPolytope lifted_;
    HPolytope body_;
    Rational half_width_;
    std::vector<RatVec> polygon_;
    std::vector<double> box_lo_, box_hi_;              // bounding box of C
    std::vector<double> lambda_lo_, lambda_hi_;        // bounding box of P in lambda
    Estimate volume_;
    Estimate integral_v_;
};

/// m_{k,n}(y) = m(x_k + sum_i floor(n y_i) u_i, n) / n^q, exactly.
Rational m_profile(std::size_t coset, std::int64_t n, std::span<const double> y, const QuotientStructure& qs);

/// max over listed n and u in H_n of m(u, n) / n^q.
double kappa0_empirical(const QuotientStructure& qs, const std::vector<std::int64_t>& radii);

/// Points of a uniform grid with `per_axis` points per axis over the
/// bounding box of C, keeping those inside C.
std::vector<std::vector<double>> body_grid(const Geometry& geometry, std::size_t per_axis);

}  // namespace sasfield
