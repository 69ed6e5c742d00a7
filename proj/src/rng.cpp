#include "sasfield/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace sasfield {

namespace {

std::mt19937_64 seeded_engine(std::uint64_t master, const std::vector<std::uint64_t>& path)
{
    std::vector<std::uint32_t> words;
    words.reserve(2 * (path.size() + 2));
    auto push = [&](std::uint64_t v) {
        words.push_back(static_cast<std::uint32_t>(v));
        words.push_back(static_cast<std::uint32_t>(v >> 32));
    };
    push(master);
    push(path.size());
    for (auto id : path) push(id);
    std::seed_seq seq(words.begin(), words.end());
    return std::mt19937_64(seq);
}

}  // namespace

RandomStream::RandomStream(std::uint64_t master_seed, std::vector<std::uint64_t> path)
    : master_(master_seed), path_(std::move(path)), engine_(seeded_engine(master_, path_))
{
}

RandomStream RandomStream::substream(std::uint64_t id) const
{
    auto child = path_;
    child.push_back(id);
    return RandomStream(master_, std::move(child));
}

double RandomStream::uniform_open()
{
    // (k + 0.5) / 2^53 for k uniform on [0, 2^53) never hits 0 or 1.
    const std::uint64_t k = engine_() >> 11;
    return (static_cast<double>(k) + 0.5) * 0x1.0p-53;
}

double RandomStream::exponential() { return -std::log(uniform_open()); }

std::uint64_t RandomStream::below(std::uint64_t n)
{
    if (n == 0) throw std::invalid_argument("RandomStream::below: empty range");
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    for (;;) {
        const std::uint64_t x = engine_();
        if (x < limit) return x % n;
    }
}

RandomStream replicate_stream(std::uint64_t master_seed, std::uint64_t tag, std::uint64_t index)
{
    return RandomStream(master_seed, {tag, index});
}

}  // namespace sasfield
