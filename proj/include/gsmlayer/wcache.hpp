#pragma once

// Disk cache for assembled interaction matrices, keyed by the combined
// (basis, stack, frequency, contour) fingerprint.  Payloads are exact binary
// doubles, so a cache hit reproduces the cold computation bit for bit.

#include <cstdint>
#include <string>

#include "gsmlayer/wmatrix.hpp"

namespace gsml {

std::uint64_t w_cache_key(int l_max, std::uint64_t stack_hash, double frequency_hz,
                          std::uint64_t contour_hash);

// returns false on miss; throws on a corrupt or mismatched entry
bool load_wmatrix(const std::string& cache_dir, std::uint64_t key, wmatrix& out);

void store_wmatrix(const std::string& cache_dir, std::uint64_t key, const wmatrix& w);

} // namespace gsml
