#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace finslernav {

// Counter-based generator built on the SplitMix64 output function:
//   z = seed + (counter + 1) * 0x9E3779B97F4A7C15
//   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   out = z ^ (z >> 31)
// Every draw is a pure function of (seed, counter), so sample points are
// reproducible across platforms, thread schedules, and reimplementations.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t seed() const { return seed_; }

    std::uint64_t raw(std::uint64_t counter) const {
        std::uint64_t z = seed_ + (counter + 1) * 0x9E3779B97F4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1): top 53 bits of the output word.
    double uniform(std::uint64_t counter) const {
        return static_cast<double>(raw(counter) >> 11) * 0x1.0p-53;
    }

    // Uniform in (0, 1]: never zero, safe under log().
    double uniform_pos(std::uint64_t counter) const {
        return static_cast<double>((raw(counter) >> 11) + 1) * 0x1.0p-53;
    }

    double uniform(std::uint64_t counter, double lo, double hi) const {
        return lo + (hi - lo) * uniform(counter);
    }

private:
    std::uint64_t seed_;
};

// Disjoint counter block for sample index `i`; draws within a sample use
// counters stream_base(i) + k. 2^20 draws per sample is ample for any
// rejection loop the toolkit runs.
inline std::uint64_t stream_base(std::uint64_t sample_index) {
    return sample_index << 20;
}

// A stateful view over one sample's counter block.
class SampleStream {
public:
    SampleStream(const CounterRng& rng, std::uint64_t sample_index)
        : rng_(&rng), counter_(stream_base(sample_index)) {}

    double uniform() { return rng_->uniform(counter_++); }
    double uniform_pos() { return rng_->uniform_pos(counter_++); }
    double uniform(double lo, double hi) { return rng_->uniform(counter_++, lo, hi); }

    // Standard normal via Box-Muller.
    double gaussian() {
        double u1 = uniform_pos();
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
    }

    // Point uniform in an axis-aligned box.
    std::vector<double> box_point(std::span<const std::pair<double, double>> box) {
        std::vector<double> x(box.size());
        for (std::size_t i = 0; i < box.size(); ++i) x[i] = uniform(box[i].first, box[i].second);
        return x;
    }

    // Direction uniform on the Euclidean unit sphere.
    std::vector<double> sphere_point(int dim) {
        std::vector<double> y(static_cast<std::size_t>(dim));
        double norm2 = 0.0;
        do {
            norm2 = 0.0;
            for (auto& c : y) {
                c = gaussian();
                norm2 += c * c;
            }
        } while (norm2 < 1e-12);
        double inv = 1.0 / std::sqrt(norm2);
        for (auto& c : y) c *= inv;
        return y;
    }

private:
    const CounterRng* rng_;
    std::uint64_t counter_;
};

// Low-discrepancy points from the additive recurrence x_k = frac(1/2 + k a),
// with a built from the generalized golden ratio for the given dimension
// (unique positive root of t^(d+1) = t + 1). Seedless and deterministic;
// used for precondition scans where coverage matters more than randomness.
class QuasiRandomSequence {
public:
    explicit QuasiRandomSequence(int dim) : alpha_(static_cast<std::size_t>(dim)) {
        double phi = 2.0;
        for (int it = 0; it < 64; ++it) phi = std::pow(1.0 + phi, 1.0 / (dim + 1));
        double inv = 1.0 / phi;
        double a = inv;
        for (auto& c : alpha_) {
            c = a;
            a *= inv;
        }
    }

    std::vector<double> unit_point(std::uint64_t k) const {
        std::vector<double> x(alpha_.size());
        for (std::size_t j = 0; j < alpha_.size(); ++j) {
            double v = 0.5 + static_cast<double>(k + 1) * alpha_[j];
            x[j] = v - std::floor(v);
        }
        return x;
    }

    std::vector<double> box_point(std::uint64_t k,
                                  std::span<const std::pair<double, double>> box) const {
        std::vector<double> x = unit_point(k);
        for (std::size_t j = 0; j < x.size(); ++j)
            x[j] = box[j].first + (box[j].second - box[j].first) * x[j];
        return x;
    }

private:
    std::vector<double> alpha_;
};

} // namespace finslernav
