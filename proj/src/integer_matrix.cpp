#include "sasfield/integer_matrix.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace sasfield {

IntMatrix::IntMatrix(std::initializer_list<std::initializer_list<long>> rows)
{
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) throw std::invalid_argument("IntMatrix: ragged initializer");
        for (long v : r) data_.emplace_back(v);
    }
}

IntMatrix IntMatrix::identity(std::size_t n)
{
    IntMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
}

IntMatrix IntMatrix::from_columns(std::size_t rows, const std::vector<IntVec>& columns)
{
    IntMatrix m(rows, columns.size());
    for (std::size_t j = 0; j < columns.size(); ++j) {
        if (columns[j].size() != rows)
            throw std::invalid_argument("IntMatrix::from_columns: column length mismatch");
        for (std::size_t i = 0; i < rows; ++i) m(i, j) = static_cast<long>(columns[j][i]);
    }
    return m;
}

namespace {
std::int64_t to_int64(const Integer& v)
{
    if (!v.fits_slong_p()) throw std::overflow_error("integer entry does not fit in int64");
    return v.get_si();
}
}  // namespace

IntVec IntMatrix::column64(std::size_t j) const
{
    IntVec out(rows_);
    for (std::size_t i = 0; i < rows_; ++i) out[i] = to_int64((*this)(i, j));
    return out;
}

std::vector<IntVec> IntMatrix::columns64() const
{
    std::vector<IntVec> out;
    out.reserve(cols_);
    for (std::size_t j = 0; j < cols_; ++j) out.push_back(column64(j));
    return out;
}

std::vector<IntVec> IntMatrix::rows64() const
{
    std::vector<IntVec> out(rows_, IntVec(cols_));
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) out[i][j] = to_int64((*this)(i, j));
    return out;
}

IntMatrix IntMatrix::transpose() const
{
    IntMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

IntMatrix IntMatrix::block_columns(std::size_t first, std::size_t count) const
{
    if (first + count > cols_) throw std::out_of_range("IntMatrix::block_columns");
    IntMatrix m(rows_, count);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < count; ++j) m(i, j) = (*this)(i, first + j);
    return m;
}

IntMatrix IntMatrix::concat_columns(const IntMatrix& other) const
{
    if (other.rows_ != rows_) throw std::invalid_argument("IntMatrix::concat_columns: row mismatch");
    IntMatrix m(rows_, cols_ + other.cols_);
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t j = 0; j < cols_; ++j) m(i, j) = (*this)(i, j);
        for (std::size_t j = 0; j < other.cols_; ++j) m(i, cols_ + j) = other(i, j);
    }
    return m;
}

void IntMatrix::swap_rows(std::size_t a, std::size_t b)
{
    if (a == b) return;
    for (std::size_t j = 0; j < cols_; ++j) std::swap((*this)(a, j), (*this)(b, j));
}

void IntMatrix::swap_cols(std::size_t a, std::size_t b)
{
    if (a == b) return;
    for (std::size_t i = 0; i < rows_; ++i) std::swap((*this)(i, a), (*this)(i, b));
}

void IntMatrix::add_row_multiple(std::size_t dst, std::size_t src, const Integer& factor)
{
    if (factor == 0) return;
    for (std::size_t j = 0; j < cols_; ++j) (*this)(dst, j) += factor * (*this)(src, j);
}

void IntMatrix::add_col_multiple(std::size_t dst, std::size_t src, const Integer& factor)
{
    if (factor == 0) return;
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, dst) += factor * (*this)(i, src);
}

void IntMatrix::negate_row(std::size_t r)
{
    for (std::size_t j = 0; j < cols_; ++j) (*this)(r, j) = -(*this)(r, j);
}

bool IntMatrix::is_zero() const
{
    return std::all_of(data_.begin(), data_.end(), [](const Integer& v) { return v == 0; });
}

std::string IntMatrix::to_string() const
{
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < rows_; ++i) {
        os << (i ? "; " : "");
        for (std::size_t j = 0; j < cols_; ++j) os << (j ? " " : "") << (*this)(i, j);
    }
    os << ']';
    return os.str();
}

IntMatrix operator*(const IntMatrix& a, const IntMatrix& b)
{
    if (a.cols() != b.rows()) throw std::invalid_argument("IntMatrix multiply: shape mismatch");
    IntMatrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            if (a(i, k) == 0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += a(i, k) * b(k, j);
        }
    return c;
}

IntVec multiply64(const IntMatrix& a, const IntVec& v)
{
    if (a.cols() != v.size()) throw std::invalid_argument("multiply64: shape mismatch");
    IntVec out(a.rows(), 0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        Integer acc = 0;
        for (std::size_t j = 0; j < a.cols(); ++j) acc += a(i, j) * static_cast<long>(v[j]);
        out[i] = to_int64(acc);
    }
    return out;
}

Integer determinant(const IntMatrix& m)
{
    if (m.rows() != m.cols()) throw std::invalid_argument("determinant: matrix not square");
    const std::size_t n = m.rows();
    if (n == 0) return 1;
    IntMatrix a = m;
    Integer prev = 1;
    int sign = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (a(k, k) == 0) {
            std::size_t p = k + 1;
            while (p < n && a(p, k) == 0) ++p;
            if (p == n) return 0;
            a.swap_rows(k, p);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            for (std::size_t j = k + 1; j < n; ++j) {
                Integer v = a(i, j) * a(k, k) - a(i, k) * a(k, j);
                mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), prev.get_mpz_t());
                a(i, j) = v;
            }
        }
        prev = a(k, k);
    }
    return sign * a(n - 1, n - 1);
}

namespace {

RatMatrix to_rational(const IntMatrix& m)
{
    RatMatrix r(m.rows(), std::vector<Rational>(m.cols()));
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) r[i][j] = m(i, j);
    return r;
}

// Reduced row echelon form in place; returns pivot columns.
std::vector<std::size_t> rref(RatMatrix& a, std::size_t ncols)
{
    std::vector<std::size_t> pivots;
    std::size_t row = 0;
    for (std::size_t col = 0; col < ncols && row < a.size(); ++col) {
        std::size_t p = row;
        while (p < a.size() && a[p][col] == 0) ++p;
        if (p == a.size()) continue;
        std::swap(a[p], a[row]);
        const Rational inv = 1 / a[row][col];
        for (auto& v : a[row]) v *= inv;
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (i == row || a[i][col] == 0) continue;
            const Rational f = a[i][col];
            for (std::size_t j = 0; j < a[i].size(); ++j) a[i][j] -= f * a[row][j];
        }
        pivots.push_back(col);
        ++row;
    }
    return pivots;
}

}  // namespace

std::size_t rank(const IntMatrix& m)
{
    RatMatrix a = to_rational(m);
    return rref(a, m.cols()).size();
}

RatMatrix inverse(const IntMatrix& m)
{
    if (m.rows() != m.cols()) throw std::invalid_argument("inverse: matrix not square");
    const std::size_t n = m.rows();
    RatMatrix a(n, std::vector<Rational>(2 * n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) a[i][j] = m(i, j);
        a[i][n + i] = 1;
    }
    if (rref(a, n).size() != n) throw std::domain_error("inverse: singular matrix");
    RatMatrix inv(n, std::vector<Rational>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) inv[i][j] = a[i][n + j];
    return inv;
}

RatMatrix left_inverse(const IntMatrix& m)
{
    // Z = (M^T M)^{-1} M^T
    const std::size_t k = m.cols();
    if (k == 0) return {};
    const IntMatrix mt = m.transpose();
    const IntMatrix gram = mt * m;
    if (rank(gram) != k) throw std::domain_error("left_inverse: columns are dependent");
    const RatMatrix gi = inverse(gram);
    RatMatrix z(k, std::vector<Rational>(m.rows()));
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < m.rows(); ++j) {
            Rational acc = 0;
            for (std::size_t t = 0; t < k; ++t) acc += gi[i][t] * Rational(mt(t, j));
            z[i][j] = acc;
        }
    return z;
}

Rational sup_norm(const RatMatrix& m)
{
    Rational best = 0;
    for (const auto& row : m) {
        Rational s = 0;
        for (const auto& v : row) s += abs(v);
        if (s > best) best = s;
    }
    return best;
}

std::size_t SmithDecomposition::rank() const
{
    std::size_t r = 0;
    while (r < std::min(D.rows(), D.cols()) && D(r, r) != 0) ++r;
    return r;
}

std::vector<Integer> SmithDecomposition::invariant_factors() const
{
    std::vector<Integer> out;
    for (std::size_t i = 0; i < rank(); ++i) out.push_back(D(i, i));
    return out;
}

namespace {

// Locate the nonzero entry of smallest magnitude in the trailing block.
bool find_pivot(const IntMatrix& d, std::size_t t, std::size_t& pi, std::size_t& pj)
{
    bool found = false;
    Integer best;
    for (std::size_t i = t; i < d.rows(); ++i)
        for (std::size_t j = t; j < d.cols(); ++j) {
            if (d(i, j) == 0) continue;
            Integer a = abs(d(i, j));
            if (!found || a < best) {
                best = a;
                pi = i;
                pj = j;
                found = true;
            }
        }
    return found;
}

}  // namespace

SmithDecomposition smith_normal_form(const IntMatrix& b)
{
    const std::size_t m = b.rows();
    const std::size_t n = b.cols();
    IntMatrix d = b;
    IntMatrix s = IntMatrix::identity(m);
    IntMatrix tm = IntMatrix::identity(n);

    for (std::size_t t = 0; t < std::min(m, n); ++t) {
        std::size_t pi = 0, pj = 0;
        if (!find_pivot(d, t, pi, pj)) break;
        for (;;) {
            d.swap_rows(t, pi);
            s.swap_rows(t, pi);
            d.swap_cols(t, pj);
            tm.swap_cols(t, pj);

            bool clean = true;
            for (std::size_t i = t + 1; i < m; ++i) {
                if (d(i, t) == 0) continue;
                Integer q;
                mpz_fdiv_q(q.get_mpz_t(), d(i, t).get_mpz_t(), d(t, t).get_mpz_t());
                d.add_row_multiple(i, t, -q);
                s.add_row_multiple(i, t, -q);
                if (d(i, t) != 0) clean = false;
            }
            for (std::size_t j = t + 1; j < n; ++j) {
                if (d(t, j) == 0) continue;
                Integer q;
                mpz_fdiv_q(q.get_mpz_t(), d(t, j).get_mpz_t(), d(t, t).get_mpz_t());
                d.add_col_multiple(j, t, -q);
                tm.add_col_multiple(j, t, -q);
                if (d(t, j) != 0) clean = false;
            }
            if (!clean) {
                find_pivot(d, t, pi, pj);
                continue;
            }

            // The pivot must divide the whole trailing block.
            bool divides = true;
            for (std::size_t i = t + 1; i < m && divides; ++i)
                for (std::size_t j = t + 1; j < n; ++j) {
                    if (!mpz_divisible_p(d(i, j).get_mpz_t(), d(t, t).get_mpz_t())) {
                        d.add_row_multiple(t, i, 1);
                        s.add_row_multiple(t, i, 1);
                        divides = false;
                        break;
                    }
                }
            if (divides) break;
            find_pivot(d, t, pi, pj);
        }
        if (d(t, t) < 0) {
            d.negate_row(t);
            s.negate_row(t);
        }
    }

    SmithDecomposition out{std::move(s), std::move(tm), std::move(d)};
    verify_smith(b, out);
    return out;
}

void verify_smith(const IntMatrix& b, const SmithDecomposition& snf)
{
    const IntMatrix& d = snf.D;
    if (snf.S.rows() != b.rows() || snf.S.cols() != b.rows() || snf.T.rows() != b.cols() ||
        snf.T.cols() != b.cols() || d.rows() != b.rows() || d.cols() != b.cols())
        throw std::logic_error("Smith certificate: shape mismatch");
    if (!(snf.S * b * snf.T == d)) throw std::logic_error("Smith certificate: S*B*T != D");
    if (abs(determinant(snf.S)) != 1) throw std::logic_error("Smith certificate: S not unimodular");
    if (abs(determinant(snf.T)) != 1) throw std::logic_error("Smith certificate: T not unimodular");
    const std::size_t r = snf.rank();
    for (std::size_t i = 0; i < d.rows(); ++i)
        for (std::size_t j = 0; j < d.cols(); ++j) {
            if (i == j && i < r) {
                if (d(i, j) <= 0) throw std::logic_error("Smith certificate: nonpositive invariant factor");
            } else if (d(i, j) != 0) {
                throw std::logic_error("Smith certificate: D not diagonal in normal form");
            }
        }
    for (std::size_t i = 1; i < r; ++i)
        if (!mpz_divisible_p(d(i, i).get_mpz_t(), d(i - 1, i - 1).get_mpz_t()))
            throw std::logic_error("Smith certificate: divisibility chain broken");
}

}  // namespace sasfield
