#pragma once

#include <cstdint>
#include <string_view>

namespace conductor {

// Counter-based draws: every random decision is a pure function of
// (seed, entity id, salt), so results do not depend on evaluation order.

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    }
    return h;
}

constexpr std::uint64_t mix(std::uint64_t seed, std::string_view id, std::uint64_t salt) {
    return splitmix64(splitmix64(seed ^ fnv1a(id)) + salt);
}

/// Uniform in [0, 1).
constexpr double unit(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

constexpr double draw(std::uint64_t seed, std::string_view id, std::uint64_t salt) {
    return unit(mix(seed, id, salt));
}

/// Sequential stream for generators that walk a fixed loop order.
class Stream {
  public:
    explicit Stream(std::uint64_t seed) : state_(seed) {}
    std::uint64_t next() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return splitmix64(state_);
    }
    double uniform() { return unit(next()); }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    bool bernoulli(double p) { return uniform() < p; }
    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : next() % n; }

  private:
    std::uint64_t state_;
};

}  // namespace conductor
