// Exact enumeration of integer points z in Z^m with ||t + M z||_inf <= n.
//
// The constraint system is projected once, symbolically in (t, n), by
// Fourier-Motzkin elimination. A query then walks the variables in order,
// reading integer bounds for z_k off the projection onto z_0..z_k. Every
// integer point of the polytope is visited exactly once, so counts are exact.
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "sasfield/checked_int.hpp"

namespace sasfield {

class BoxLatticeEnumerator {
public:
    /// `columns` are the m columns of M, each in Z^d. They must be linearly
    /// independent (otherwise the point set is infinite); throws
    /// std::invalid_argument if not. m = 0 is allowed.
    BoxLatticeEnumerator(std::size_t dim, const std::vector<IntVec>& columns);

    std::size_t dimension() const { return dim_; }
    std::size_t variables() const { return vars_; }

    /// Number of z with ||t + Mz||_inf <= n.
    std::int64_t count(const IntVec& t, std::int64_t n) const;

    /// Whether at least one such z exists.
    bool exists(const IntVec& t, std::int64_t n) const;

    /// Smallest n >= 0 for which exists(t, n) holds.
    std::int64_t min_radius(const IntVec& t) const;

    /// Calls `fn` with each integer prefix (z_0..z_{outer-1}) that extends to
    /// at least one full solution. outer == variables() visits every solution.
    void for_each_prefix(const IntVec& t, std::int64_t n, std::size_t outer,
                         const std::function<void(std::span<const std::int64_t>)>& fn) const;

private:
    struct Row {
        IntVec coeff;  // over z_0..z_{k}
        IntVec rhs;    // linear form over (t_0..t_{d-1}, n)
    };

    struct Query;

    Query make_query(const IntVec& t, std::int64_t n) const;
    void bounds(const Query& q, std::size_t k, const IntVec& prefix, std::int64_t& lo,
                std::int64_t& hi) const;
    bool feasible_checks(const Query& q) const;
    std::int64_t count_from(const Query& q, std::size_t k, IntVec& prefix) const;
    bool exists_from(const Query& q, std::size_t k, IntVec& prefix) const;
    void visit_from(const Query& q, std::size_t k, std::size_t outer, IntVec& prefix,
                    const std::function<void(std::span<const std::int64_t>)>& fn) const;

    std::size_t dim_ = 0;
    std::size_t vars_ = 0;
    std::vector<IntVec> columns_;
    // levels_[k]: rows with nonzero coefficient on z_k, over z_0..z_k.
    std::vector<std::vector<Row>> levels_;
    // Rows with no variables left; each requires rhs >= 0.
    std::vector<Row> checks_;
};

}  // namespace sasfield
