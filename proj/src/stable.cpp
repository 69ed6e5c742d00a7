#include "sasfield/stable.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "sasfield/errors.hpp"

namespace sasfield {

void require_stable_index(double alpha)
{
    if (!(alpha > 0.0 && alpha < 2.0))
        throw DomainError("stable index must lie in (0, 2), got " + std::to_string(alpha));
}

double stable_tail_constant(double alpha)
{
    require_stable_index(alpha);
    if (alpha == 1.0) return 2.0 / std::numbers::pi;
    return (1.0 - alpha) / (std::tgamma(2.0 - alpha) * std::cos(std::numbers::pi * alpha / 2.0));
}

double sample_standard_sas(double alpha, RandomStream& rng)
{
    require_stable_index(alpha);
    const double v = std::numbers::pi * (rng.uniform_open() - 0.5);
    if (alpha == 1.0) return std::tan(v);
    const double w = rng.exponential();
    return std::sin(alpha * v) / std::pow(std::cos(v), 1.0 / alpha) *
           std::pow(std::cos((1.0 - alpha) * v) / w, (1.0 - alpha) / alpha);
}

}  // namespace sasfield
