#include "carlsim/readout.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace carlsim {

CountHistogram atom_count_statistics(const DensityOperator& tau, long shots,
                                     std::uint64_t rng_seed) {
    if (tau.space().num_modes() != 1)
        throw std::invalid_argument("atom_count_statistics: expects single-mode state");
    if (shots < 1)
        throw std::invalid_argument("atom_count_statistics: shots must be >= 1");
    RealVector diag = tau.diagonal().cwiseMax(0.0);
    const long d = diag.size();
    std::vector<double> cdf(d);
    double total = 0.0;
    for (long n = 0; n < d; ++n) {
        total += diag[n];
        cdf[n] = total;
    }
    CountHistogram hist{std::vector<long>(d, 0), shots};
    std::mt19937_64 eng(rng_seed);
    for (long s = 0; s < shots; ++s) {
        double u = double(eng() >> 11) * 0x1.0p-53 * total;
        auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
        ++hist.counts[std::min<long>(it - cdf.begin(), d - 1)];
    }
    return hist;
}

DiagonalReport diagonal_fidelity_report(const DensityOperator& sigma,
                                        const DensityOperator& tau) {
    if (sigma.space() != tau.space())
        throw std::invalid_argument("diagonal_fidelity_report: dimension mismatch");
    StateMetrics m = state_metrics(sigma, tau);
    RealVector ds = sigma.diagonal(), dt = tau.diagonal();
    double tv = 0.5 * (ds - dt).cwiseAbs().sum();
    double odd = 0.0, mean = 0.0, second = 0.0;
    for (long n = 0; n < dt.size(); ++n) {
        if (n % 2 == 1) odd += dt[n];
        mean += n * dt[n];
        second += double(n) * n * dt[n];
    }
    return {m.fidelity, m.trace_distance, tv, odd, second - mean * mean};
}

double entanglement_report(const StateVector& state,
                           std::span<const int> partition) {
    if (partition.empty() ||
        partition.size() >= static_cast<std::size_t>(state.space().num_modes()))
        throw std::invalid_argument("entanglement_report: partition must be a proper subset");
    DensityOperator reduced =
        partial_trace(DensityOperator::from_pure(state), partition);
    return von_neumann_entropy(reduced);
}

}  // namespace carlsim
