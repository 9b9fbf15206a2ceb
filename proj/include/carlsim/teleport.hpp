#pragma once

#include <cstdint>
#include <optional>
#include <utility>

#include "carlsim/carl.hpp"
#include "carlsim/fock.hpp"

namespace carlsim {

/// One Bell-measurement result with its probability density.
struct BellOutcome {
    Complex alpha;
    double weight;  // p_alpha, >= 0
};

/// Gaussian-noise parameter of the equivalent channel, with the populations
/// it was computed from when known.
struct ChannelSpec {
    double k = 0.0;
    struct Provenance {
        double n1, n3, time;
    };
    std::optional<Provenance> provenance;
};

/// K = 1 + N1 + N3 - sqrt((N1 + N3)(N1 + N3 + 2)); in (0, 1].
ChannelSpec channel_parameter(double n1, double n3, double time = 0.0);

/// Polar quadrature grid over a disk: Gauss-Legendre in r^2, uniform in
/// angle. Node weights include the area element, so
/// integral f d^2alpha ~= sum_k weights[k] f(nodes[k]).
struct PolarGrid {
    std::vector<Complex> nodes;
    std::vector<double> weights;
    std::vector<double> radii;   // distinct radial nodes
    int angular = 0;
    double radius = 0.0;

    static PolarGrid build(double radius, int radial, int angular);
};

struct GridSpec {
    int radial = 64;
    int angular = 64;
    double radius = 0.0;  // 0 = derived from the coverage heuristic
};

/// Pi_alpha = (1/pi) D(alpha) sigma^T D^dag(alpha) on a single-mode space;
/// the transposition is taken in the Fock number basis.
Matrix povm_element(Complex alpha, const DensityOperator& sigma);

struct ConditionalState {
    double p_alpha = 0.0;
    // Empty when p_alpha <= 1e-14 (negligible outcome; caller must not
    // normalize).
    std::optional<DensityOperator> rho_alpha;  // before the correction
    std::optional<DensityOperator> tau_alpha;  // after D(alpha)
};

/// Resource is a two-mode state over (a1, a3); sigma lives on the a3-sized
/// single-mode space.
ConditionalState conditional_state(const DensityOperator& resource,
                                   const DensityOperator& sigma, Complex alpha);
ConditionalState conditional_state(const StateVector& resource,
                                   const DensityOperator& sigma, Complex alpha);

struct TeleportedState {
    DensityOperator tau;        // normalized average
    double quadrature_defect;   // |integral p_alpha d^2alpha - 1|
    double grid_radius;
};

TeleportedState teleported_state_quadrature(const StateVector& resource,
                                            const DensityOperator& sigma,
                                            const GridSpec& grid = {});
TeleportedState teleported_state_quadrature(const DensityOperator& resource,
                                            const DensityOperator& sigma,
                                            const GridSpec& grid = {});

/// tau = integral d^2alpha exp(-|alpha|^2/K)/(pi K) D(alpha) sigma D^dag(alpha).
/// K below 1e-12 short-circuits to the identity channel.
DensityOperator gaussian_channel_apply(const DensityOperator& sigma,
                                       const ChannelSpec& spec,
                                       const GridSpec& grid = {});

/// Deterministic i.i.d. samples of the Bell outcome via inverse CDF on the
/// quadrature grid.
std::vector<BellOutcome> sample_bell_outcome(const StateVector& resource,
                                             const DensityOperator& sigma,
                                             std::uint64_t rng_seed, long count,
                                             const GridSpec& grid = {});

/// Monte Carlo estimate of the teleported state: average of tau_alpha over
/// sampled outcomes (same sampling stream as sample_bell_outcome).
DensityOperator teleported_state_sampled(const StateVector& resource,
                                         const DensityOperator& sigma,
                                         std::uint64_t rng_seed, long count,
                                         const GridSpec& grid = {});

/// Short classical pulse generating the corrective displacement:
/// H2 = i g sqrt(N) [conj(gamma)(a1^dag + a2) - h.c.] on a two-mode (a1, a2)
/// space, with alpha = -g conj(gamma) sqrt(N) tau_pulse.
struct DisplacementPulse {
    Complex alpha_applied;
    Matrix unitary;            // exp(i H2 tau_pulse)
    double factorization_deviation;  // vs D1(alpha) (x) D2^dag(alpha), central
                                     // block, up to global phase
    Complex global_phase;
};
DisplacementPulse displacement_pulse(const CarlParams& params, Complex gamma,
                                     double tau_pulse, const FockSpace& space);

struct PulseSetting {
    Complex gamma;
    double tau_pulse;
};
PulseSetting inverse_pulse_for(Complex alpha_target, const CarlParams& params,
                               double tau_pulse = 1.0);

/// Channel averaged over a discrete distribution of condensate atom numbers;
/// populations at each N come from the exact Gaussian evolution at time t.
DensityOperator channel_with_number_fluctuations(
    const DensityOperator& sigma, const CarlParams& params, double t,
    const std::vector<std::pair<double, double>>& n_distribution,  // (N, prob)
    const GridSpec& grid = {});

}  // namespace carlsim
