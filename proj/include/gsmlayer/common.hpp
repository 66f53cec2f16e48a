#pragma once

#include <complex>
#include <cstdint>
#include <cstring>
#include <string>

namespace gsml {

using cplx = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double speed_of_light = 299792458.0;        // m/s
inline constexpr double vacuum_permittivity = 8.8541878128e-12;  // F/m
inline constexpr double vacuum_permeability = 1.25663706212e-6;  // H/m

// j^n for integer n of either sign, without trig round-off
inline cplx ipow(int n) {
    switch (((n % 4) + 4) % 4) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, 1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, -1.0};
    }
}

// FNV-1a 64-bit, used for stack/contour fingerprints and file checksums
struct fnv1a64 {
    std::uint64_t state = 0xcbf29ce484222325ull;
    void feed(const void* data, std::size_t n) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < n; ++i) {
            state ^= p[i];
            state *= 0x100000001b3ull;
        }
    }
    void feed_double(double v) { feed(&v, sizeof v); }
    void feed_u64(std::uint64_t v) { feed(&v, sizeof v); }
    void feed_i32(std::int32_t v) { feed(&v, sizeof v); }
    std::uint64_t digest() const { return state; }
};

std::string hex64(std::uint64_t v);

} // namespace gsml
