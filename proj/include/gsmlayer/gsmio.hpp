#pragma once

// Free-space GSM persistence (a self-describing header plus an exact binary
// payload) and synthetic GSM generators standing in for a full-wave
// extraction pipeline when exercising the composite solve.

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "gsmlayer/interaction.hpp"

namespace gsml {

struct gsm_file {
    std::string antenna = "synthetic";
    double r_min_m = 0.0;                 // circumscribing sphere radius
    int l_max = 0;
    int ports = 0;
    std::vector<std::string> port_labels;
    std::vector<double> frequencies_hz;   // strictly increasing
    std::vector<gsm_blocks> blocks;       // one per frequency

    void validate() const;
};

// binary container: "GSMB 1" magic, one-line JSON header, then row-major
// little-endian (re,im) float64 blocks per frequency, checksummed so that
// truncation or corruption is always detected
gsm_file read_gsm(const std::string& path);
void write_gsm(const gsm_file& file, const std::string& path);

enum class synthetic_kind { single_mode_radiator, diagonal_scatterer, random_passive };

struct synthetic_gsm_spec {
    synthetic_kind kind = synthetic_kind::single_mode_radiator;

    // single_mode_radiator / diagonal_scatterer
    svwf_index excited{2, 0, 0, 1};
    cplx gamma0{0.0, 0.0};
    // diagonal_scatterer: S diagonal per (tau, l); unlisted pairs default to 1
    std::map<std::pair<int, int>, cplx> s_diagonal;

    // random_passive
    std::uint64_t seed = 1;
    double radius_bound = 0.5;  // feedback spectral radius after normalization
    int ports = 1;
    double r_min_m = 0.05;  // circumscribing-sphere radius anchoring the
                            // high-degree roll-off of the drawn couplings
};

// Deterministic synthetic GSM at one frequency.  For random_passive, the
// feedback operator's spectral radius is normalized to radius_bound exactly
// when the interaction matrix is supplied; without it a singular-value proxy
// on (1/2)(S-1) is used.  Degenerate draws are regenerated (new derived
// seed) up to 10 times before failing.
gsm_blocks synthesize_gsm(const synthetic_gsm_spec& spec, const svwf_basis& basis,
                          double frequency_hz, const wmatrix* w_ref = nullptr);

// restrict a GSM to a lower truncation degree; the canonical basis for a
// smaller l_max is a strict prefix of the larger one, so blocks truncate by
// plain row/column restriction
gsm_blocks truncate_gsm(const gsm_blocks& b, int l_max_new);

} // namespace gsml
