#ifndef DAGMCMC_RNG_HPP
#define DAGMCMC_RNG_HPP

#include <cstdint>
#include <random>

namespace dagmcmc {

// splitmix64, used to derive independent generator seeds from one
// user-visible 64-bit seed plus a stream index.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::mt19937_64 makeRng(std::uint64_t seed, std::uint64_t stream = 0) {
    std::uint64_t s = splitmix64(seed ^ splitmix64(stream));
    return std::mt19937_64(s);
}

} // namespace dagmcmc

#endif
