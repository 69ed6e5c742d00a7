// The quotient group Z^d / K for a kernel lattice K, realized concretely.
//
// K is split off through the Smith normal form of its generator matrix. That
// yields a free complement F (basis U), an independent basis V of K, and
// representatives x_1 = 0, ..., x_l of Z^d / (F + K). The set
// H = union_k (x_k + F) meets every coset of K exactly once; with addition
// modulo K it is a group isomorphic to Z^d / K.
#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "sasfield/box_enumeration.hpp"
#include "sasfield/integer_matrix.hpp"

namespace sasfield {

/// Declaration of a group action by its kernel lattice K in Z^d.
struct GroupSpec {
    std::size_t dimension = 0;
    /// d x q0 matrix whose columns generate K. Zero columns (q0 = 0) mean K = {0}.
    IntMatrix kernel_generators;

    static GroupSpec from_generators(std::size_t dimension, const std::vector<IntVec>& generators);
    void validate() const;
};

/// An element of H: the unique point of its K-coset lying in some x_k + F.
class HElement {
public:
    HElement() = default;

    const IntVec& vec() const { return vec_; }
    std::int64_t operator[](std::size_t i) const { return vec_[i]; }
    std::size_t dimension() const { return vec_.size(); }

    auto operator<=>(const HElement&) const = default;

private:
    friend class QuotientStructure;
    explicit HElement(IntVec v) : vec_(std::move(v)) {}
    IntVec vec_;
};

class QuotientStructure {
public:
    std::size_t dimension() const { return dimension_; }
    /// Rank p of the free part (effective dimension).
    std::size_t effective_dimension() const { return free_basis_.cols(); }
    /// Rank q of K.
    std::size_t kernel_rank() const { return kernel_basis_.cols(); }
    /// l = |torsion of Z^d/K|.
    std::int64_t torsion_order() const { return static_cast<std::int64_t>(coset_reps_.size()); }

    const IntMatrix& free_basis() const { return free_basis_; }      ///< U, d x p
    const IntMatrix& kernel_basis() const { return kernel_basis_; }  ///< V, d x q
    const std::vector<IntVec>& coset_reps() const { return coset_reps_; }
    const SmithDecomposition& smith() const { return smith_; }
    const std::vector<Integer>& invariant_factors() const { return invariant_factors_; }

    /// The canonical H point of v + K.
    HElement canonical(const IntVec& v) const;
    /// Index k of the coset x_k + F + K containing v.
    std::size_t coset_index(const IntVec& v) const;
    /// Coordinates (alpha, beta) with v = x_k + U alpha + V beta.
    IntVec coordinates(const IntVec& v, std::size_t& coset) const;

    HElement identity() const;
    /// x_k + U alpha.
    HElement element(std::size_t coset, std::span<const std::int64_t> alpha) const;

    /// Whether v lies in K.
    bool in_kernel(const IntVec& v) const;

    const BoxLatticeEnumerator& kernel_enumerator() const { return kernel_enum_; }
    const BoxLatticeEnumerator& full_enumerator() const { return full_enum_; }

private:
    friend QuotientStructure analyze_quotient(const GroupSpec& spec);
    QuotientStructure(std::size_t dim, IntMatrix u, IntMatrix v, std::vector<IntVec> reps, SmithDecomposition snf);

    std::size_t dimension_ = 0;
    IntMatrix free_basis_;
    IntMatrix kernel_basis_;
    std::vector<IntVec> coset_reps_;
    SmithDecomposition smith_;
    std::vector<Integer> invariant_factors_;

    // int64 working copies
    std::vector<IntVec> s64_;          // rows of S
    IntVec torsion_moduli_;            // invariant factors > 1
    std::vector<std::size_t> torsion_rows_;  // their row positions in S*v
    std::map<IntVec, std::size_t> coset_lookup_;
    std::vector<IntVec> u_cols_;
    std::vector<IntVec> adj_rows_;     // adjugate of W = [U : V]
    std::int64_t det_w_ = 1;

    BoxLatticeEnumerator kernel_enum_;  // over V
    BoxLatticeEnumerator full_enum_;    // over W = [U : V]
};

/// Splits Z^d / K via the Smith normal form; see the file comment.
QuotientStructure analyze_quotient(const GroupSpec& spec);

/// u1 (+) u2: the canonical point of (u1 + u2) + K.
HElement group_add(const HElement& u1, const HElement& u2, const QuotientStructure& qs);
HElement group_inverse(const HElement& u, const QuotientStructure& qs);
/// u1 (-) u2 = u1 (+) u2^{-1}
HElement group_subtract(const HElement& u1, const HElement& u2, const QuotientStructure& qs);

/// N(u) = min over v in K of ||u + v||_inf.
std::int64_t norm_N(const HElement& u, const QuotientStructure& qs);

/// H_n = {u in H : N(u) <= n}, sorted.
std::vector<HElement> enumerate_Hn(std::int64_t n, const QuotientStructure& qs);

/// m(t, n) = number of points of t + K in the box [-n, n]^d.
std::int64_t count_m(const HElement& t, std::int64_t n, const QuotientStructure& qs);

}  // namespace sasfield
