#include "sasfield/box_enumeration.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>

#include "sasfield/integer_matrix.hpp"

namespace sasfield {

namespace {

std::int64_t gcd_all(const IntVec& a, const IntVec& b)
{
    std::int64_t g = 0;
    for (auto v : a) g = std::gcd(g, abs_checked(v));
    for (auto v : b) g = std::gcd(g, abs_checked(v));
    return g;
}

}  // namespace

struct BoxLatticeEnumerator::Query {
    // rhs values per level row, then per check row.
    std::vector<IntVec> level_rhs;
    IntVec check_rhs;
};

BoxLatticeEnumerator::BoxLatticeEnumerator(std::size_t dim, const std::vector<IntVec>& columns)
    : dim_(dim), vars_(columns.size()), columns_(columns)
{
    for (const auto& c : columns)
        if (c.size() != dim) throw std::invalid_argument("BoxLatticeEnumerator: column length mismatch");
    if (vars_ > 0 && rank(IntMatrix::from_columns(dim, columns)) != vars_)
        throw std::invalid_argument("BoxLatticeEnumerator: columns are linearly dependent");

    // M_j z <= n - t_j and -M_j z <= n + t_j.
    std::vector<Row> current;
    for (std::size_t j = 0; j < dim; ++j) {
        Row up{IntVec(vars_), IntVec(dim + 1, 0)};
        Row down{IntVec(vars_), IntVec(dim + 1, 0)};
        for (std::size_t k = 0; k < vars_; ++k) {
            up.coeff[k] = columns[k][j];
            down.coeff[k] = -columns[k][j];
        }
        up.rhs[j] = -1;
        up.rhs[dim] = 1;
        down.rhs[j] = 1;
        down.rhs[dim] = 1;
        current.push_back(std::move(up));
        current.push_back(std::move(down));
    }

    levels_.resize(vars_);
    for (std::size_t k = vars_; k-- > 0;) {
        std::vector<Row> pos, neg, rest;
        for (auto& r : current) {
            r.coeff.resize(k + 1);
            if (r.coeff[k] > 0)
                pos.push_back(r);
            else if (r.coeff[k] < 0)
                neg.push_back(r);
            else
                rest.push_back(r);
        }
        levels_[k].insert(levels_[k].end(), pos.begin(), pos.end());
        levels_[k].insert(levels_[k].end(), neg.begin(), neg.end());

        std::set<std::pair<IntVec, IntVec>> seen;
        std::vector<Row> next;
        auto push = [&](Row r) {
            r.coeff.resize(k);
            const std::int64_t g = gcd_all(r.coeff, r.rhs);
            if (g > 1) {
                for (auto& v : r.coeff) v /= g;
                for (auto& v : r.rhs) v /= g;
            }
            if (seen.insert({r.coeff, r.rhs}).second) next.push_back(std::move(r));
        };
        for (auto& r : rest) push(r);
        for (const auto& a : pos)
            for (const auto& b : neg) {
                const std::int64_t fa = -b.coeff[k];
                const std::int64_t fb = a.coeff[k];
                Row c{IntVec(k + 1), IntVec(dim + 1)};
                for (std::size_t i = 0; i <= k; ++i)
                    c.coeff[i] = checked_add(checked_mul(fa, a.coeff[i]), checked_mul(fb, b.coeff[i]));
                for (std::size_t i = 0; i <= dim; ++i)
                    c.rhs[i] = checked_add(checked_mul(fa, a.rhs[i]), checked_mul(fb, b.rhs[i]));
                push(std::move(c));
            }
        current = std::move(next);
    }
    checks_ = std::move(current);
}

namespace {

std::int64_t eval_rhs(const IntVec& form, const IntVec& t, std::int64_t n)
{
    std::int64_t acc = checked_mul(form.back(), n);
    for (std::size_t i = 0; i < t.size(); ++i)
        if (form[i] != 0) acc = checked_add(acc, checked_mul(form[i], t[i]));
    return acc;
}

}  // namespace

bool BoxLatticeEnumerator::feasible_checks(const Query& q) const
{
    return std::all_of(q.check_rhs.begin(), q.check_rhs.end(), [](std::int64_t v) { return v >= 0; });
}

void BoxLatticeEnumerator::bounds(const Query& q, std::size_t k, const IntVec& prefix, std::int64_t& lo,
                                  std::int64_t& hi) const
{
    lo = std::numeric_limits<std::int64_t>::min();
    hi = std::numeric_limits<std::int64_t>::max();
    const auto& rows = levels_[k];
    for (std::size_t r = 0; r < rows.size(); ++r) {
        std::int64_t rhs = q.level_rhs[k][r];
        for (std::size_t i = 0; i < k; ++i)
            if (rows[r].coeff[i] != 0) rhs = checked_sub(rhs, checked_mul(rows[r].coeff[i], prefix[i]));
        const std::int64_t a = rows[r].coeff[k];
        if (a > 0)
            hi = std::min(hi, floor_div(rhs, a));
        else
            lo = std::max(lo, ceil_div(rhs, a));
    }
}

std::int64_t BoxLatticeEnumerator::count_from(const Query& q, std::size_t k, IntVec& prefix) const
{
    std::int64_t lo, hi;
    bounds(q, k, prefix, lo, hi);
    if (hi < lo) return 0;
    if (k + 1 == vars_) return checked_add(checked_sub(hi, lo), 1);
    std::int64_t total = 0;
    for (std::int64_t z = lo; z <= hi; ++z) {
        prefix[k] = z;
        total = checked_add(total, count_from(q, k + 1, prefix));
    }
    return total;
}

bool BoxLatticeEnumerator::exists_from(const Query& q, std::size_t k, IntVec& prefix) const
{
    if (k == vars_) return true;
    std::int64_t lo, hi;
    bounds(q, k, prefix, lo, hi);
    if (hi < lo) return false;
    if (k + 1 == vars_) return true;
    for (std::int64_t z = lo; z <= hi; ++z) {
        prefix[k] = z;
        if (exists_from(q, k + 1, prefix)) return true;
    }
    return false;
}

void BoxLatticeEnumerator::visit_from(const Query& q, std::size_t k, std::size_t outer, IntVec& prefix,
                                      const std::function<void(std::span<const std::int64_t>)>& fn) const
{
    if (k == outer) {
        if (exists_from(q, k, prefix)) fn(std::span<const std::int64_t>(prefix.data(), outer));
        return;
    }
    std::int64_t lo, hi;
    bounds(q, k, prefix, lo, hi);
    for (std::int64_t z = lo; z <= hi; ++z) {
        prefix[k] = z;
        visit_from(q, k + 1, outer, prefix, fn);
    }
}

namespace {
void check_query(std::size_t dim, const IntVec& t, std::int64_t n)
{
    if (t.size() != dim) throw std::invalid_argument("BoxLatticeEnumerator: offset dimension mismatch");
    if (n < 0) throw std::invalid_argument("BoxLatticeEnumerator: negative radius");
}
}  // namespace

BoxLatticeEnumerator::Query BoxLatticeEnumerator::make_query(const IntVec& t, std::int64_t n) const
{
    check_query(dim_, t, n);
    Query q;
    q.level_rhs.resize(vars_);
    for (std::size_t k = 0; k < vars_; ++k) {
        q.level_rhs[k].reserve(levels_[k].size());
        for (const auto& r : levels_[k]) q.level_rhs[k].push_back(eval_rhs(r.rhs, t, n));
    }
    for (const auto& r : checks_) q.check_rhs.push_back(eval_rhs(r.rhs, t, n));
    return q;
}

std::int64_t BoxLatticeEnumerator::count(const IntVec& t, std::int64_t n) const
{
    const Query q = make_query(t, n);
    if (!feasible_checks(q)) return 0;
    if (vars_ == 0) return 1;
    IntVec prefix(vars_, 0);
    return count_from(q, 0, prefix);
}

bool BoxLatticeEnumerator::exists(const IntVec& t, std::int64_t n) const
{
    const Query q = make_query(t, n);
    if (!feasible_checks(q)) return false;
    IntVec prefix(vars_, 0);
    return exists_from(q, 0, prefix);
}

void BoxLatticeEnumerator::for_each_prefix(const IntVec& t, std::int64_t n, std::size_t outer,
                                           const std::function<void(std::span<const std::int64_t>)>& fn) const
{
    if (outer > vars_) throw std::invalid_argument("BoxLatticeEnumerator: prefix longer than variable count");
    const Query q = make_query(t, n);
    if (!feasible_checks(q)) return;
    IntVec prefix(vars_, 0);
    visit_from(q, 0, outer, prefix, fn);
}

std::int64_t BoxLatticeEnumerator::min_radius(const IntVec& t) const
{
    // z = 0 is feasible at radius ||t||_inf.
    std::int64_t lo = 0, hi = sup_norm(t);
    while (lo < hi) {
        const std::int64_t mid = lo + (hi - lo) / 2;
        if (exists(t, mid))
            hi = mid;
        else
            lo = mid + 1;
    }
    return lo;
}

}  // namespace sasfield
