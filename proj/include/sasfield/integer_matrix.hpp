// Arbitrary-precision integer and rational matrices, and the Smith normal
// form with unimodular certificates.
#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "sasfield/checked_int.hpp"

namespace sasfield {

using Integer = mpz_class;
using Rational = mpq_class;

/// Dense row-major matrix over Z (GMP integers).
class IntMatrix {
public:
    IntMatrix() = default;
    IntMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
    IntMatrix(std::initializer_list<std::initializer_list<long>> rows);

    static IntMatrix identity(std::size_t n);
    /// Matrix whose columns are the given vectors (each of length `rows`).
    static IntMatrix from_columns(std::size_t rows, const std::vector<IntVec>& columns);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    Integer& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const Integer& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    IntVec column64(std::size_t j) const;
    std::vector<IntVec> columns64() const;
    /// Row-major int64 copy; throws std::overflow_error if an entry does not fit.
    std::vector<IntVec> rows64() const;

    IntMatrix transpose() const;
    IntMatrix block_columns(std::size_t first, std::size_t count) const;
    /// [this : other], same row count.
    IntMatrix concat_columns(const IntMatrix& other) const;

    void swap_rows(std::size_t a, std::size_t b);
    void swap_cols(std::size_t a, std::size_t b);
    /// row[dst] += factor * row[src]
    void add_row_multiple(std::size_t dst, std::size_t src, const Integer& factor);
    /// col[dst] += factor * col[src]
    void add_col_multiple(std::size_t dst, std::size_t src, const Integer& factor);
    void negate_row(std::size_t r);

    bool is_zero() const;
    bool operator==(const IntMatrix& other) const = default;

    std::string to_string() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Integer> data_;
};

IntMatrix operator*(const IntMatrix& a, const IntMatrix& b);
IntVec multiply64(const IntMatrix& a, const IntVec& v);

/// Exact determinant (fraction-free Bareiss elimination). Square input only.
Integer determinant(const IntMatrix& m);

/// Rank over Q.
std::size_t rank(const IntMatrix& m);

/// Dense matrix over Q.
using RatMatrix = std::vector<std::vector<Rational>>;

/// Inverse over Q of a square nonsingular matrix; throws std::domain_error if singular.
RatMatrix inverse(const IntMatrix& m);

/// Rational left inverse Z with Z*M = I for a full-column-rank M; throws std::domain_error otherwise.
RatMatrix left_inverse(const IntMatrix& m);

/// Max absolute row sum of a rational matrix.
Rational sup_norm(const RatMatrix& m);

/// Smith normal form S*B*T = D with S, T unimodular.
struct SmithDecomposition {
    IntMatrix S;  ///< rows(B) x rows(B)
    IntMatrix T;  ///< cols(B) x cols(B)
    IntMatrix D;  ///< rows(B) x cols(B), diagonal d_1 | d_2 | ... | d_r, then zeros

    std::size_t rank() const;
    /// Nonzero diagonal entries d_1..d_r (all positive).
    std::vector<Integer> invariant_factors() const;
};

/// Computes the Smith normal form of B and checks the certificate before
/// returning (throws std::logic_error if S*B*T != D or a unimodularity or
/// divisibility condition fails).
SmithDecomposition smith_normal_form(const IntMatrix& b);

/// Throws std::logic_error unless `snf` is a valid certificate for `b`.
void verify_smith(const IntMatrix& b, const SmithDecomposition& snf);

}  // namespace sasfield
