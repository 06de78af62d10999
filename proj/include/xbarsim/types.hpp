#pragma once

#include <cstdint>
#include <cstddef>
#include <vector>

namespace xbarsim {

// Row-major integer matrix. Entries are small ({-1,0,+1} for the quantized
// alphabets) but stored as int to keep the functional interface simple.
struct IntMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<int> data;

    IntMatrix() = default;
    IntMatrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0) {}

    int& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
    int at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
};

// Row-major {0,1} matrix used for cell programming targets.
struct BitMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<std::uint8_t> bits;

    BitMatrix() = default;
    BitMatrix(int r, int c) : rows(r), cols(c), bits(static_cast<std::size_t>(r) * c, 0) {}

    std::uint8_t& at(int r, int c) { return bits[static_cast<std::size_t>(r) * cols + c]; }
    std::uint8_t at(int r, int c) const { return bits[static_cast<std::size_t>(r) * cols + c]; }
};

// splitmix64, used everywhere a derived seed is needed.
inline std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    return mix_seed(a ^ mix_seed(b));
}

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    return mix_seed(mix_seed(a, b) ^ mix_seed(c));
}

} // namespace xbarsim
