#ifndef FOON_RNG_HPP
#define FOON_RNG_HPP

#include <cstdint>

namespace foon {

/// Deterministic 64-bit generator used wherever reproducibility across runs
/// and languages matters (benchmark sampling). State advances by the
/// splitmix64 step; bounded draws use rejection so they stay unbiased.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    /// Independent stream for (seed, index), e.g. one per benchmark trial.
    static Rng substream(std::uint64_t seed, std::uint64_t index) {
        Rng r(seed + (index + 1) * 0x9e3779b97f4a7c15ULL);
        r.next();
        return r;
    }

    std::uint64_t next() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform draw from [0, n). n must be nonzero.
    std::uint64_t bounded(std::uint64_t n) {
        const std::uint64_t threshold = (0ULL - n) % n;  // 2^64 mod n
        for (;;) {
            std::uint64_t r = next();
            if (r >= threshold)
                return r % n;
        }
    }

    double unit_double() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    bool chance(double p) { return unit_double() < p; }

private:
    std::uint64_t state_;
};

} // namespace foon

#endif
