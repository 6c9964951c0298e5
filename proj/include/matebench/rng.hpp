#ifndef MATEBENCH_RNG_HPP
#define MATEBENCH_RNG_HPP

// Seeded RNG with bounded-int draws implemented by hand. The distribution
// adapters in <random> are implementation-defined, which would make sampled
// splits differ across standard libraries; this keeps them byte-stable.

#include <cstdint>
#include <random>
#include <vector>

namespace matebench {

class Rng {
public:
    explicit Rng(uint64_t seed) : gen_(seed) {}

    uint64_t next_u64() { return gen_(); }

    // Uniform in [0, bound), bound > 0. Rejection sampling, no modulo bias.
    uint64_t below(uint64_t bound) {
        const uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        uint64_t v;
        do {
            v = gen_();
        } while (v >= limit);
        return v % bound;
    }

    size_t index(size_t size) { return static_cast<size_t>(below(size)); }

    // Uniform double in [0, 1) with 53 random bits.
    double unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
    }

    template <typename T>
    const T& pick(const std::vector<T>& v) {
        return v[index(v.size())];
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace matebench

#endif  // MATEBENCH_RNG_HPP
