#ifndef SPLITMETRIC_RNG_HPP
#define SPLITMETRIC_RNG_HPP

#include <cstdint>
#include <random>

namespace splitmetric {

// splitmix64 finalizer; used to derive independent sub-seeds from
// (seed, counter) so that parallel schedules reproduce identical streams.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t counter) {
    return mix64(seed ^ mix64(counter));
}

inline std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t counter) {
    return std::mt19937_64(sub_seed(seed, counter));
}

}  // namespace splitmetric

#endif
