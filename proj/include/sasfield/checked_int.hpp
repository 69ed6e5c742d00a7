// Overflow-checked 64-bit integer helpers.
//
// The lattice hot loops (canonical reduction, box enumeration) run on int64.
// Every operation is checked; an overflow throws instead of wrapping, so a
// result is either exact or absent.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace sasfield {

using IntVec = std::vector<std::int64_t>;

inline std::int64_t checked_add(std::int64_t a, std::int64_t b)
{
    std::int64_t r;
    if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("int64 overflow (add)");
    return r;
}

inline std::int64_t checked_sub(std::int64_t a, std::int64_t b)
{
    std::int64_t r;
    if (__builtin_sub_overflow(a, b, &r)) throw std::overflow_error("int64 overflow (sub)");
    return r;
}

inline std::int64_t checked_mul(std::int64_t a, std::int64_t b)
{
    std::int64_t r;
    if (__builtin_mul_overflow(a, b, &r)) throw std::overflow_error("int64 overflow (mul)");
    return r;
}

/// Floor of a/b for b != 0.
inline std::int64_t floor_div(std::int64_t a, std::int64_t b)
{
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

/// Ceiling of a/b for b != 0.
inline std::int64_t ceil_div(std::int64_t a, std::int64_t b)
{
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) == (b < 0))) ++q;
    return q;
}

/// Non-negative remainder, m > 0.
inline std::int64_t mod_floor(std::int64_t a, std::int64_t m)
{
    std::int64_t r = a % m;
    return r < 0 ? r + m : r;
}

inline std::int64_t abs_checked(std::int64_t a)
{
    if (a == INT64_MIN) throw std::overflow_error("int64 overflow (abs)");
    return a < 0 ? -a : a;
}

inline std::int64_t sup_norm(const IntVec& v)
{
    std::int64_t m = 0;
    for (auto x : v) m = std::max(m, abs_checked(x));
    return m;
}

}  // namespace sasfield
