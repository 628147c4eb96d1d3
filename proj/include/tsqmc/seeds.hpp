#pragma once

#include <cstdint>
#include <initializer_list>

namespace tsqmc {

/// Independent random streams derived from one master seed.
enum class Stream : std::uint64_t {
    parameters = 1,
    scenarios = 2,
    randomization = 3,
    replication = 4,
};

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Seed for replication `index` of `stream`. Replication r of an experiment
/// always uses derive_seed(master, stream, r); nothing else draws from it.
inline constexpr std::uint64_t derive_seed(std::uint64_t master, Stream stream, std::uint64_t index = 0) noexcept {
    std::uint64_t h = splitmix64(master);
    h = splitmix64(h ^ static_cast<std::uint64_t>(stream));
    return splitmix64(h ^ (index * 0xD1B54A32D192ED03ULL));
}

inline constexpr std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) noexcept {
    std::uint64_t h = splitmix64(master);
    for (auto p : path) h = splitmix64(h ^ (p + 0x632BE59BD9B4E019ULL));
    return h;
}

} // namespace tsqmc
