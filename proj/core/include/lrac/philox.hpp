#pragma once

#include <array>
#include <cstdint>
#include <utility>

namespace lrac {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    explicit Philox4x32(std::uint64_t seed)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

    Counter operator()(Counter ctr) const;

    // Two independent standard normals from one counter (Box-Muller on 2x53-bit uniforms).
    std::pair<double, double> normal_pair(const Counter& ctr) const;

private:
    Key key_;
};

} // namespace lrac
