#pragma once

#include <cstdint>
#include <numeric>
#include <vector>

namespace capnet {

// Counter-based determinism: every random stream in the project is derived
// from (top seed, stream tag, counter) through splitmix64, so results are
// identical across platforms and independent of thread scheduling.
inline uint64_t splitmix64_next(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline uint64_t mix_seed(uint64_t seed, uint64_t stream) {
    uint64_t s = seed ^ (0x6a09e667f3bcc909ULL + stream * 0x9e3779b97f4a7c15ULL);
    return splitmix64_next(s);
}

class Rng {
   public:
    explicit Rng(uint64_t seed) : state_(seed) {
        // one warmup step so seed=0 does not emit 0 first
        splitmix64_next(state_);
    }

    static Rng derived(uint64_t seed, uint64_t stream) { return Rng(mix_seed(seed, stream)); }

    uint64_t next_u64() { return splitmix64_next(state_); }

    // uniform in [0,1) with 53 random bits
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // unbiased uniform integer in [0, n)
    uint64_t below(uint64_t n) {
        if (n == 0) return 0;
        uint64_t threshold = (~n + 1) % n;  // 2^64 mod n
        for (;;) {
            uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    // k distinct indices from [0, n), order = first k of a Fisher-Yates pass
    std::vector<uint32_t> sample_without_replacement(uint32_t n, uint32_t k) {
        std::vector<uint32_t> idx(n);
        std::iota(idx.begin(), idx.end(), 0u);
        if (k > n) k = n;
        for (uint32_t i = 0; i < k; ++i) {
            uint32_t j = i + static_cast<uint32_t>(below(n - i));
            std::swap(idx[i], idx[j]);
        }
        idx.resize(k);
        return idx;
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = static_cast<size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

   private:
    uint64_t state_;
};

}  // namespace capnet
