#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace spinnet {

// mt19937_64 with hand-rolled variate mappings. The standard distributions are
// allowed to differ between library implementations; these mappings are pinned
// so that (seed -> network) is reproducible everywhere.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next() { return gen_(); }

    // Uniform on [0,1) with 53 random bits.
    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        // Rejection-free would bias; n is tiny everywhere we use this, so the
        // classic rejection loop is fine and portable.
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t v;
        do {
            v = gen_();
        } while (v >= limit);
        return v % n;
    }

    // Knuth's product-of-uniforms Poisson. Exact for any lambda; cost grows
    // linearly with lambda, which stays modest (< ~30) in every caller here.
    int poisson(double lambda) {
        const double limit = std::exp(-lambda);
        double prod = 1.0;
        int k = -1;
        do {
            ++k;
            prod *= uniform01();
        } while (prod > limit);
        return k;
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace spinnet
