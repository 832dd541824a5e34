#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace slicelab {

// Counter-based generator: (seed, stream) fully determines the sequence, so
// parallel consumers keyed by stream index reproduce the sequential run.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
        : key_(mix(seed ^ mix(stream + kGolden))) {}

    std::uint64_t next() { return mix(key_ + kGolden * ++ctr_); }

    // uniform on [0, 1)
    double uniform() { return double(next() >> 11) * 0x1.0p-53; }

    // uniform on (0, 1], safe under log()
    double uniform_pos() { return double((next() >> 11) + 1) * 0x1.0p-53; }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double r = std::sqrt(-2.0 * std::log(uniform_pos()));
        double a = 6.28318530717958647693 * uniform();
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    std::vector<double> unit_vector(std::size_t n) {
        std::vector<double> v(n);
        while (true) {
            double s = 0.0;
            for (auto& c : v) {
                c = normal();
                s += c * c;
            }
            if (s > 1e-24) {
                double inv = 1.0 / std::sqrt(s);
                for (auto& c : v) c *= inv;
                return v;
            }
        }
    }

private:
    static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xBF58476D1CE4E5B9ull;
        z ^= z >> 27;
        z *= 0x94D049BB133111EBull;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t key_;
    std::uint64_t ctr_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace slicelab
