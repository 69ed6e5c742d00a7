#include "sasfield/rational_polytope.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace sasfield {

namespace {

Rational dot(const RatVec& a, const RatVec& x)
{
    Rational acc = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] != 0) acc += a[i] * x[i];
    return acc;
}

bool is_zero(const RatVec& v)
{
    return std::all_of(v.begin(), v.end(), [](const Rational& r) { return r == 0; });
}

// Scales so the first nonzero normal entry has magnitude one.
HalfSpace normalized(HalfSpace h)
{
    for (const auto& c : h.normal) {
        if (c == 0) continue;
        const Rational s = abs(c);
        for (auto& e : h.normal) e /= s;
        h.bound /= s;
        break;
    }
    return h;
}

struct RowKey {
    bool operator()(const HalfSpace& a, const HalfSpace& b) const
    {
        if (a.normal != b.normal) return a.normal < b.normal;
        return a.bound < b.bound;
    }
};

}  // namespace

Rational to_rational(double x)
{
    if (!std::isfinite(x)) throw std::domain_error("to_rational: non-finite value");
    return Rational(x);
}

RatVec to_rational(std::span<const double> x)
{
    RatVec out;
    out.reserve(x.size());
    for (double v : x) out.push_back(to_rational(v));
    return out;
}

HPolytope::HPolytope(std::size_t dim, std::vector<HalfSpace> rows) : dim_(dim)
{
    std::set<HalfSpace, RowKey> seen;
    for (auto& r : rows) {
        if (r.normal.size() != dim) throw std::invalid_argument("HPolytope: row dimension mismatch");
        if (is_zero(r.normal)) {
            if (r.bound < 0) empty_ = true;
            continue;
        }
        HalfSpace h = normalized(std::move(r));
        if (seen.insert(h).second) rows_.push_back(std::move(h));
    }
}

bool HPolytope::contains(const RatVec& x) const
{
    if (empty_) return false;
    return std::all_of(rows_.begin(), rows_.end(), [&](const HalfSpace& h) { return dot(h.normal, x) <= h.bound; });
}

bool HPolytope::contains(std::span<const double> x, double tol) const
{
    if (empty_) return false;
    for (const auto& h : rows_) {
        double acc = 0;
        for (std::size_t i = 0; i < dim_; ++i) acc += h.normal[i].get_d() * x[i];
        if (acc > h.bound.get_d() + tol) return false;
    }
    return true;
}

HPolytope HPolytope::slice_leading(const RatVec& values) const
{
    const std::size_t k = values.size();
    if (k > dim_) throw std::invalid_argument("slice_leading: too many fixed coordinates");
    std::vector<HalfSpace> out;
    out.reserve(rows_.size());
    for (const auto& h : rows_) {
        HalfSpace r{RatVec(h.normal.begin() + static_cast<std::ptrdiff_t>(k), h.normal.end()), h.bound};
        for (std::size_t i = 0; i < k; ++i)
            if (h.normal[i] != 0) r.bound -= h.normal[i] * values[i];
        out.push_back(std::move(r));
    }
    HPolytope p(dim_ - k, std::move(out));
    p.empty_ = p.empty_ || empty_;
    return p;
}

HPolytope HPolytope::eliminate_trailing(std::size_t count) const
{
    if (count > dim_) throw std::invalid_argument("eliminate_trailing: too many coordinates");
    HPolytope cur = *this;
    for (std::size_t step = 0; step < count; ++step) {
        const std::size_t k = cur.dim_ - 1;
        std::vector<HalfSpace> pos, neg, next;
        for (const auto& h : cur.rows_) {
            if (h.normal[k] > 0)
                pos.push_back(h);
            else if (h.normal[k] < 0)
                neg.push_back(h);
            else
                next.push_back({RatVec(h.normal.begin(), h.normal.end() - 1), h.bound});
        }
        for (const auto& a : pos)
            for (const auto& b : neg) {
                const Rational fa = -b.normal[k];
                const Rational fb = a.normal[k];
                HalfSpace c{RatVec(k), fa * a.bound + fb * b.bound};
                for (std::size_t i = 0; i < k; ++i) c.normal[i] = fa * a.normal[i] + fb * b.normal[i];
                next.push_back(std::move(c));
            }
        const bool was_empty = cur.empty_;
        cur = HPolytope(k, std::move(next));
        cur.empty_ = cur.empty_ || was_empty;
        if (cur.rows_.size() > 4 * (cur.dim_ + 1) && cur.contains(RatVec(cur.dim_, 0)))
            cur = cur.without_redundant_rows();
    }
    return cur;
}

HPolytope HPolytope::without_redundant_rows() const
{
    if (!contains(RatVec(dim_, 0))) throw std::domain_error("without_redundant_rows: origin infeasible");
    std::vector<HalfSpace> kept = rows_;
    for (std::size_t i = kept.size(); i-- > 0;) {
        std::vector<HalfSpace> others;
        for (std::size_t j = 0; j < kept.size(); ++j)
            if (j != i) others.push_back(kept[j]);
        const LpResult r = maximize(kept[i].normal, HPolytope(dim_, others));
        if (r.status == LpResult::Status::optimal && r.value <= kept[i].bound) kept.erase(kept.begin() + static_cast<std::ptrdiff_t>(i));
    }
    return HPolytope(dim_, std::move(kept));
}

bool solve_square(std::vector<RatVec> a, RatVec b, RatVec& x)
{
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        while (piv < n && a[piv][col] == 0) ++piv;
        if (piv == n) return false;
        std::swap(a[piv], a[col]);
        std::swap(b[piv], b[col]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col || a[r][col] == 0) continue;
            const Rational f = a[r][col] / a[col][col];
            for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    x.assign(n, 0);
    for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
    return true;
}

std::vector<RatVec> HPolytope::vertices() const
{
    std::vector<RatVec> out;
    if (empty_) return out;
    if (dim_ == 0) {
        out.emplace_back();
        return out;
    }
    const std::size_t m = rows_.size();
    if (m < dim_) return out;
    std::set<RatVec> found;
    std::vector<std::size_t> idx(dim_);
    for (std::size_t i = 0; i < dim_; ++i) idx[i] = i;
    for (;;) {
        std::vector<RatVec> a;
        RatVec b;
        for (auto i : idx) {
            a.push_back(rows_[i].normal);
            b.push_back(rows_[i].bound);
        }
        RatVec x;
        if (solve_square(std::move(a), std::move(b), x) && contains(x)) found.insert(std::move(x));
        std::size_t i = dim_;
        while (i-- > 0) {
            if (idx[i] < m - dim_ + i) {
                ++idx[i];
                for (std::size_t j = i + 1; j < dim_; ++j) idx[j] = idx[j - 1] + 1;
                break;
            }
            if (i == 0) return {found.begin(), found.end()};
        }
    }
}

Rational convex_polygon_area(std::vector<RatVec> v)
{
    if (v.size() < 3) return 0;
    double cx = 0, cy = 0;
    for (const auto& p : v) {
        cx += p[0].get_d();
        cy += p[1].get_d();
    }
    cx /= static_cast<double>(v.size());
    cy /= static_cast<double>(v.size());
    std::sort(v.begin(), v.end(), [&](const RatVec& a, const RatVec& b) {
        return std::atan2(a[1].get_d() - cy, a[0].get_d() - cx) < std::atan2(b[1].get_d() - cy, b[0].get_d() - cx);
    });
    Rational twice = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const auto& a = v[i];
        const auto& b = v[(i + 1) % v.size()];
        twice += a[0] * b[1] - a[1] * b[0];
    }
    return abs(twice) / 2;
}

Rational HPolytope::exact_volume() const
{
    if (empty_) return 0;
    switch (dim_) {
    case 0:
        return 1;
    case 1: {
        const auto vs = vertices();
        if (vs.empty()) return 0;
        const auto [lo, hi] = std::minmax_element(vs.begin(), vs.end(), [](const RatVec& a, const RatVec& b) { return a[0] < b[0]; });
        return (*hi)[0] - (*lo)[0];
    }
    case 2:
        return convex_polygon_area(vertices());
    default:
        break;
    }
    // Lasserre: vol_n(P) = (1/n) sum_i b_i / |a_ij| vol_{n-1}(face i projected along x_j).
    Rational total = 0;
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        const HalfSpace& face = rows_[i];
        std::size_t pivot = 0;
        while (face.normal[pivot] == 0) ++pivot;
        const Rational& a = face.normal[pivot];
        std::vector<HalfSpace> projected;
        projected.reserve(rows_.size() - 1);
        for (std::size_t k = 0; k < rows_.size(); ++k) {
            if (k == i) continue;
            const HalfSpace& h = rows_[k];
            const Rational ratio = h.normal[pivot] / a;
            HalfSpace r{RatVec(), h.bound - ratio * face.bound};
            r.normal.reserve(dim_ - 1);
            for (std::size_t c = 0; c < dim_; ++c)
                if (c != pivot) r.normal.push_back(h.normal[c] - ratio * face.normal[c]);
            projected.push_back(std::move(r));
        }
        const HPolytope sub(dim_ - 1, std::move(projected));
        if (face.bound != 0) total += face.bound / abs(a) * sub.exact_volume();
    }
    return total / Rational(static_cast<long>(dim_));
}

std::pair<RatVec, RatVec> HPolytope::bounding_box() const
{
    RatVec lo(dim_), hi(dim_);
    for (std::size_t i = 0; i < dim_; ++i) {
        RatVec e(dim_, 0);
        e[i] = 1;
        const LpResult up = maximize(e, *this);
        e[i] = -1;
        const LpResult down = maximize(e, *this);
        if (up.status != LpResult::Status::optimal || down.status != LpResult::Status::optimal)
            throw std::domain_error("bounding_box: polytope is unbounded");
        hi[i] = up.value;
        lo[i] = -down.value;
    }
    return {lo, hi};
}

LpResult maximize(const RatVec& objective, const HPolytope& poly)
{
    const std::size_t n = poly.dimension();
    const auto& rows = poly.rows();
    const std::size_t m = rows.size();
    if (objective.size() != n) throw std::invalid_argument("maximize: objective dimension mismatch");
    LpResult res;
    if (poly.trivially_empty()) return res;
    for (const auto& r : rows)
        if (r.bound < 0) throw std::domain_error("maximize: origin must be feasible");

    // Columns: x+ (n), x- (n), slacks (m). Tableau rows hold [A | -A | I | b].
    const std::size_t cols = 2 * n + m;
    std::vector<RatVec> t(m, RatVec(cols + 1, 0));
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            t[i][j] = rows[i].normal[j];
            t[i][n + j] = -rows[i].normal[j];
        }
        t[i][2 * n + i] = 1;
        t[i][cols] = rows[i].bound;
    }
    // Reduced costs for maximization: z_j - c_j, optimal when all >= 0.
    RatVec cost(cols + 1, 0);
    for (std::size_t j = 0; j < n; ++j) {
        cost[j] = -objective[j];
        cost[n + j] = objective[j];
    }
    std::vector<std::size_t> basis(m);
    for (std::size_t i = 0; i < m; ++i) basis[i] = 2 * n + i;

    for (;;) {
        std::size_t enter = cols;
        for (std::size_t j = 0; j < cols; ++j)
            if (cost[j] < 0) {
                enter = j;
                break;
            }
        if (enter == cols) break;
        std::size_t leave = m;
        Rational best;
        for (std::size_t i = 0; i < m; ++i) {
            if (t[i][enter] <= 0) continue;
            const Rational ratio = t[i][cols] / t[i][enter];
            if (leave == m || ratio < best || (ratio == best && basis[i] < basis[leave])) {
                best = ratio;
                leave = i;
            }
        }
        if (leave == m) {
            res.status = LpResult::Status::unbounded;
            return res;
        }
        const Rational piv = t[leave][enter];
        for (auto& e : t[leave]) e /= piv;
        for (std::size_t i = 0; i < m; ++i) {
            if (i == leave || t[i][enter] == 0) continue;
            const Rational f = t[i][enter];
            for (std::size_t j = 0; j <= cols; ++j) t[i][j] -= f * t[leave][j];
        }
        if (cost[enter] != 0) {
            const Rational f = cost[enter];
            for (std::size_t j = 0; j <= cols; ++j) cost[j] -= f * t[leave][j];
        }
        basis[leave] = enter;
    }

    RatVec z(cols, 0);
    for (std::size_t i = 0; i < m; ++i) z[basis[i]] = t[i][cols];
    res.status = LpResult::Status::optimal;
    res.argmax.assign(n, 0);
    for (std::size_t j = 0; j < n; ++j) res.argmax[j] = z[j] - z[n + j];
    res.value = dot(objective, res.argmax);
    return res;
}

}  // namespace sasfield
