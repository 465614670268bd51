#pragma once

#include <cstdint>

namespace nk {

// Deterministic random stream: xoshiro256++ seeded through splitmix64.
// Every (seed, stream) pair fully determines the sequence, and distinct
// stream indices give decorrelated sequences.  The parallel Monte Carlo
// drivers rely on this: chunk c always draws from StreamRng(seed, c), no
// matter which worker thread runs it.
class StreamRng {
public:
    explicit StreamRng(std::uint64_t seed, std::uint64_t stream = 0) {
        // Hash the stream index through the splitmix64 finalizer before
        // mixing it into the seed, so streams 0,1,2,... do not produce
        // overlapping splitmix walks (they would if we only offset the
        // starting point by a multiple of the increment).
        std::uint64_t x =
            seed ^ mix(0x6a09e667f3bcc909ULL + 0x9e3779b97f4a7c15ULL * stream);
        for (auto& word : state_) {
            x += 0x9e3779b97f4a7c15ULL;
            word = mix(x);
        }
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform draw on the open interval (0,1): the top 53 bits placed at the
    // midpoint of their cell.  Neither endpoint can occur, so downstream
    // quantile transforms (log, tan, normal inverse) never hit a pole.
    double next_uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

private:
    static std::uint64_t rotl(std::uint64_t v, int k) {
        return (v << k) | (v >> (64 - k));
    }

    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t state_[4];
};

} // namespace nk
