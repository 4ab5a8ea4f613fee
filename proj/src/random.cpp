#include "sadoe/random.hpp"

#include <cmath>
#include <numbers>

namespace sadoe {

Rng Rng::split(std::uint64_t stream) const {
    return Rng(mix(key_ ^ mix(stream + 0x3c6ef372fe94f82bULL)), 0, 0);
}

double Rng::uniform() {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

double Rng::uniform_open() {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
}

std::size_t Rng::uniform_index(std::size_t n) {
    const std::uint64_t bound = n;
    const std::uint64_t limit = max() - max() % bound;
    std::uint64_t x;
    do {
        x = (*this)();
    } while (x >= limit);
    return static_cast<std::size_t>(x % bound);
}

double Rng::normal() {
    const double u1 = uniform_open();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace sadoe
