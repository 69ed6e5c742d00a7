#include "sasfield/lattice.hpp"

#include <algorithm>
#include <stdexcept>

namespace sasfield {

GroupSpec GroupSpec::from_generators(std::size_t dimension, const std::vector<IntVec>& generators)
{
    for (const auto& g : generators)
        if (g.size() != dimension)
            throw std::invalid_argument("GroupSpec: generator length differs from the dimension");
    GroupSpec spec;
    spec.dimension = dimension;
    spec.kernel_generators = IntMatrix::from_columns(dimension, generators);
    return spec;
}

void GroupSpec::validate() const
{
    if (dimension < 1) throw std::invalid_argument("GroupSpec: dimension must be at least 1");
    if (kernel_generators.rows() != dimension)
        throw std::invalid_argument("GroupSpec: generator matrix must have d rows");
}

namespace {

IntMatrix integer_matrix(const RatMatrix& r)
{
    const std::size_t rows = r.size();
    const std::size_t cols = rows ? r[0].size() : 0;
    IntMatrix out(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) {
            if (r[i][j].get_den() != 1) throw std::logic_error("expected an integer matrix");
            out(i, j) = r[i][j].get_num();
        }
    return out;
}

IntVec add(const IntVec& a, const IntVec& b)
{
    IntVec out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = checked_add(a[i], b[i]);
    return out;
}

IntVec negate(const IntVec& a)
{
    IntVec out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = checked_sub(0, a[i]);
    return out;
}

void normalize_sign(IntVec& v)
{
    for (auto x : v) {
        if (x == 0) continue;
        if (x < 0)
            for (auto& y : v) y = -y;
        return;
    }
}

// Representative of u + K of least sup-norm, sign-normalized; ties go to the
// lexicographically greatest vector.
IntVec shortest_in_coset(const IntVec& u, const BoxLatticeEnumerator& kernel, const std::vector<IntVec>& vcols)
{
    const std::int64_t r = kernel.min_radius(u);
    IntVec best;
    kernel.for_each_prefix(u, r, kernel.variables(), [&](std::span<const std::int64_t> beta) {
        IntVec cand = u;
        for (std::size_t j = 0; j < vcols.size(); ++j)
            for (std::size_t i = 0; i < cand.size(); ++i)
                cand[i] = checked_add(cand[i], checked_mul(beta[j], vcols[j][i]));
        normalize_sign(cand);
        if (best.empty() || cand > best) best = std::move(cand);
    });
    return best;
}

// x - W*round(W^{-1} x): a short representative of x + G.
IntVec babai_reduce(const IntVec& x, const IntMatrix& w, const RatMatrix& winv)
{
    const std::size_t d = x.size();
    IntVec out = x;
    for (std::size_t j = 0; j < d; ++j) {
        Rational c = 0;
        for (std::size_t i = 0; i < d; ++i) c += winv[j][i] * static_cast<long>(x[i]);
        const Rational shifted = c + Rational(1, 2);
        Integer r;
        mpz_fdiv_q(r.get_mpz_t(), shifted.get_num_mpz_t(), shifted.get_den_mpz_t());
        if (r == 0) continue;
        for (std::size_t i = 0; i < d; ++i) {
            Integer v = Integer(static_cast<long>(out[i])) - r * w(i, j);
            out[i] = v.get_si();
            if (!v.fits_slong_p()) throw std::overflow_error("coset representative overflows int64");
        }
    }
    return out;
}

}  // namespace

QuotientStructure::QuotientStructure(std::size_t dim, IntMatrix u, IntMatrix v, std::vector<IntVec> reps,
                                     SmithDecomposition snf)
    : dimension_(dim),
      free_basis_(std::move(u)),
      kernel_basis_(std::move(v)),
      coset_reps_(std::move(reps)),
      smith_(std::move(snf)),
      invariant_factors_(smith_.invariant_factors()),
      kernel_enum_(dim, kernel_basis_.columns64()),
      full_enum_(dim, free_basis_.concat_columns(kernel_basis_).columns64())
{
    s64_ = smith_.S.rows64();
    for (std::size_t i = 0; i < invariant_factors_.size(); ++i)
        if (invariant_factors_[i] != 1) {
            torsion_rows_.push_back(i);
            torsion_moduli_.push_back(invariant_factors_[i].get_si());
        }
    for (std::size_t k = 0; k < coset_reps_.size(); ++k) {
        IntVec key;
        for (std::size_t t = 0; t < torsion_rows_.size(); ++t) {
            std::int64_t z = 0;
            for (std::size_t i = 0; i < dim; ++i)
                z = checked_add(z, checked_mul(s64_[torsion_rows_[t]][i], coset_reps_[k][i]));
            key.push_back(mod_floor(z, torsion_moduli_[t]));
        }
        if (!coset_lookup_.emplace(std::move(key), k).second)
            throw std::logic_error("coset representatives are not distinct modulo G");
    }
    u_cols_ = free_basis_.columns64();

    const IntMatrix w = free_basis_.concat_columns(kernel_basis_);
    const Integer det = determinant(w);
    if (det == 0) throw std::logic_error("[U : V] is singular");
    if (!det.fits_slong_p()) throw std::overflow_error("det [U : V] overflows int64");
    det_w_ = det.get_si();
    RatMatrix inv = inverse(w);
    for (auto& row : inv)
        for (auto& e : row) e *= det;
    adj_rows_ = integer_matrix(inv).rows64();
}

std::size_t QuotientStructure::coset_index(const IntVec& v) const
{
    if (v.size() != dimension_) throw std::invalid_argument("vector dimension mismatch");
    IntVec key;
    key.reserve(torsion_rows_.size());
    for (std::size_t t = 0; t < torsion_rows_.size(); ++t) {
        std::int64_t z = 0;
        const auto& row = s64_[torsion_rows_[t]];
        for (std::size_t i = 0; i < dimension_; ++i) z = checked_add(z, checked_mul(row[i], v[i]));
        key.push_back(mod_floor(z, torsion_moduli_[t]));
    }
    const auto it = coset_lookup_.find(key);
    if (it == coset_lookup_.end()) throw std::logic_error("coset residue not found");
    return it->second;
}

IntVec QuotientStructure::coordinates(const IntVec& v, std::size_t& coset) const
{
    coset = coset_index(v);
    const IntVec& x = coset_reps_[coset];
    IntVec diff(dimension_);
    for (std::size_t i = 0; i < dimension_; ++i) diff[i] = checked_sub(v[i], x[i]);
    IntVec coords(dimension_);
    for (std::size_t j = 0; j < dimension_; ++j) {
        std::int64_t acc = 0;
        for (std::size_t i = 0; i < dimension_; ++i) acc = checked_add(acc, checked_mul(adj_rows_[j][i], diff[i]));
        if (acc % det_w_ != 0) throw std::logic_error("v - x_k is not in G");
        coords[j] = acc / det_w_;
    }
    return coords;
}

HElement QuotientStructure::canonical(const IntVec& v) const
{
    std::size_t k = 0;
    const IntVec coords = coordinates(v, k);
    return element(k, std::span<const std::int64_t>(coords.data(), effective_dimension()));
}

HElement QuotientStructure::identity() const { return HElement(IntVec(dimension_, 0)); }

HElement QuotientStructure::element(std::size_t coset, std::span<const std::int64_t> alpha) const
{
    if (coset >= coset_reps_.size()) throw std::out_of_range("coset index out of range");
    if (alpha.size() != u_cols_.size()) throw std::invalid_argument("free coordinate count mismatch");
    IntVec out = coset_reps_[coset];
    for (std::size_t j = 0; j < alpha.size(); ++j) {
        if (alpha[j] == 0) continue;
        for (std::size_t i = 0; i < dimension_; ++i)
            out[i] = checked_add(out[i], checked_mul(alpha[j], u_cols_[j][i]));
    }
    return HElement(std::move(out));
}

bool QuotientStructure::in_kernel(const IntVec& v) const
{
    std::size_t k = 0;
    const IntVec coords = coordinates(v, k);
    if (k != 0) return false;
    return std::all_of(coords.begin(), coords.begin() + static_cast<std::ptrdiff_t>(effective_dimension()),
                       [](std::int64_t c) { return c == 0; });
}

QuotientStructure analyze_quotient(const GroupSpec& spec)
{
    spec.validate();
    const std::size_t d = spec.dimension;
    SmithDecomposition snf = smith_normal_form(spec.kernel_generators);
    const std::size_t r = snf.rank();
    const std::vector<Integer> factors = snf.invariant_factors();
    const IntMatrix s_inv = integer_matrix(inverse(snf.S));

    std::vector<IntVec> vcols;
    for (std::size_t i = 0; i < r; ++i) {
        IntVec col(d);
        for (std::size_t k = 0; k < d; ++k) {
            const Integer e = factors[i] * s_inv(k, i);
            if (!e.fits_slong_p()) throw std::overflow_error("kernel basis overflows int64");
            col[k] = e.get_si();
        }
        normalize_sign(col);
        vcols.push_back(std::move(col));
    }
    const BoxLatticeEnumerator kernel(d, vcols);

    std::vector<IntVec> ucols;
    for (std::size_t i = r; i < d; ++i)
        ucols.push_back(shortest_in_coset(s_inv.column64(i), kernel, vcols));

    const IntMatrix u = IntMatrix::from_columns(d, ucols);
    const IntMatrix v = IntMatrix::from_columns(d, vcols);
    const IntMatrix w = u.concat_columns(v);
    const RatMatrix w_inv = inverse(w);

    // Mixed-radix walk over 0 <= a_i < d_i; a = 0 comes first.
    std::vector<IntVec> reps;
    std::vector<Integer> digits(r, 0);
    for (;;) {
        IntVec x(d, 0);
        for (std::size_t i = 0; i < r; ++i) {
            if (digits[i] == 0) continue;
            for (std::size_t k = 0; k < d; ++k)
                x[k] = checked_add(x[k], checked_mul(digits[i].get_si(), s_inv(k, i).get_si()));
        }
        reps.push_back(babai_reduce(x, w, w_inv));
        std::size_t i = 0;
        while (i < r) {
            digits[i] += 1;
            if (digits[i] < factors[i]) break;
            digits[i] = 0;
            ++i;
        }
        if (i == r) break;
    }

    return QuotientStructure(d, u, v, std::move(reps), std::move(snf));
}

HElement group_add(const HElement& u1, const HElement& u2, const QuotientStructure& qs)
{
    return qs.canonical(add(u1.vec(), u2.vec()));
}

HElement group_inverse(const HElement& u, const QuotientStructure& qs) { return qs.canonical(negate(u.vec())); }

HElement group_subtract(const HElement& u1, const HElement& u2, const QuotientStructure& qs)
{
    return qs.canonical(add(u1.vec(), negate(u2.vec())));
}

std::int64_t norm_N(const HElement& u, const QuotientStructure& qs)
{
    return qs.kernel_enumerator().min_radius(u.vec());
}

std::vector<HElement> enumerate_Hn(std::int64_t n, const QuotientStructure& qs)
{
    if (n < 0) throw std::invalid_argument("enumerate_Hn: negative radius");
    std::vector<HElement> out;
    const std::size_t p = qs.effective_dimension();
    for (std::size_t k = 0; k < qs.coset_reps().size(); ++k)
        qs.full_enumerator().for_each_prefix(qs.coset_reps()[k], n, p, [&](std::span<const std::int64_t> alpha) {
            out.push_back(qs.element(k, alpha));
        });
    std::sort(out.begin(), out.end());
    return out;
}

std::int64_t count_m(const HElement& t, std::int64_t n, const QuotientStructure& qs)
{
    if (n < 0) throw std::invalid_argument("count_m: negative radius");
    return qs.kernel_enumerator().count(t.vec(), n);
}

}  // namespace sasfield
