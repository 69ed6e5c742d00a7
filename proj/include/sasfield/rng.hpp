// Reproducible random streams addressed by (master seed, path of ids).
//
// Each stream is a std::mt19937_64 seeded through std::seed_seq from the
// 32-bit words of its address, so a stream's draws depend only on the
// address and never on which thread or in what order streams are consumed.
#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace sasfield {

class RandomStream {
public:
    explicit RandomStream(std::uint64_t master_seed, std::vector<std::uint64_t> path = {});

    std::uint64_t master_seed() const { return master_; }
    const std::vector<std::uint64_t>& path() const { return path_; }

    /// Independent child stream at path + {id}.
    RandomStream substream(std::uint64_t id) const;

    std::uint64_t next_u64() { return engine_(); }
    /// Uniform on the open interval (0, 1), 53-bit resolution.
    double uniform_open();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform_open(); }
    /// Standard exponential.
    double exponential();
    /// +1 or -1 with probability 1/2 each.
    int sign() { return (engine_() >> 63) ? 1 : -1; }
    /// Uniform on {0, ..., n - 1}; n must be positive.
    std::uint64_t below(std::uint64_t n);

private:
    std::uint64_t master_;
    std::vector<std::uint64_t> path_;
    std::mt19937_64 engine_;
};

/// Stream for replicate `index` of an experiment identified by `tag`.
RandomStream replicate_stream(std::uint64_t master_seed, std::uint64_t tag, std::uint64_t index);

}  // namespace sasfield
