#pragma once

#include <cstdint>

#include "carlsim/fock.hpp"

namespace carlsim {

struct CountHistogram {
    std::vector<long> counts;  // indexed by atom number n
    long shots = 0;
};

/// i.i.d. atom-counting samples from the diagonal of a single-mode state;
/// deterministic for a fixed seed.
CountHistogram atom_count_statistics(const DensityOperator& tau, long shots,
                                     std::uint64_t rng_seed);

/// Full-state metrics are simulation-only (verifying off-diagonals would
/// need a joint measurement with the condensate); diagonal metrics are the
/// experimentally accessible part.
struct DiagonalReport {
    double fidelity;        // simulation-only
    double trace_distance;  // simulation-only
    double diagonal_tv;     // accessible: total variation of diagonals
    double odd_weight;      // accessible: odd-n population of tau
    double count_variance;  // accessible: variance of n in tau
};
DiagonalReport diagonal_fidelity_report(const DensityOperator& sigma,
                                        const DensityOperator& tau);

/// Entanglement entropy of a pure state across the given mode partition.
double entanglement_report(const StateVector& state,
                           std::span<const int> partition);

}  // namespace carlsim
