#pragma once

#include <Eigen/Sparse>

#include "carlsim/fock.hpp"
#include "carlsim/gaussian.hpp"

namespace carlsim {

using SparseMatrix = Eigen::SparseMatrix<Complex>;

/// Model parameters of the linearized CARL dynamics. The collective
/// coupling enters only as g*sqrt(N).
struct CarlParams {
    double g = 0.0;        // single-atom coupling, inverse time
    double n_atoms = 1.0;  // N, treated as a real parameter
    double omega_r = 0.0;  // recoil frequency
    double delta = 0.0;    // pump-probe detuning

    double g_sqrt_n() const { return g * std::sqrt(n_atoms); }
    double delta_plus() const { return delta + omega_r; }
    double delta_minus() const { return delta - omega_r; }
    /// Quantum limit g sqrt(N) < 2 omega_r.
    bool quantum_limit() const { return g_sqrt_n() < 2.0 * omega_r; }
    void validate() const;
};

struct PhysicalParams {
    double rabi = 0.0;            // pump Rabi frequency Omega_0
    double detuning20 = 0.0;      // Delta_20, pump vs atomic resonance
    double pump_frequency = 0.0;  // omega_2
    double dipole = 0.0;          // d
    double volume = 0.0;          // interaction volume V
    double mass = 0.0;            // atomic mass M
    Eigen::Vector3d k1 = Eigen::Vector3d::Zero();  // scattered wave vector
    Eigen::Vector3d k2 = Eigen::Vector3d::Zero();  // pump wave vector
    double condensate_size = 0.0;  // L
    double wavelength = 0.0;       // lambda
    double n_atoms = 1.0;
};

struct ModelConversion {
    CarlParams params;
    double q = 0.0;  // |k1 - k2|
    bool delocalization_ok = true;  // L >> lambda (flagged at L <= 10 lambda)
};

/// q = |k1 - k2|, omega_r = hbar q^2 / 2M,
/// g = (Omega_0 / 2 Delta_20) sqrt(omega_2 d^2 / 2 hbar eps_0 V).
ModelConversion physical_to_model(const PhysicalParams& p);

/// H0 = delta_+ a2^dag a2 - delta_- a1^dag a1
///      + i g sqrt(N) [(a1^dag + a2) a3^dag - h.c.]
/// Mode order: 0 = a1, 1 = a2, 2 = a3.
QuadraticHamiltonian build_three_mode_hamiltonian(const CarlParams& params);

SparseMatrix fock_hamiltonian_sparse(const QuadraticHamiltonian& h,
                                     const FockSpace& space);
Matrix fock_hamiltonian(const QuadraticHamiltonian& h, const FockSpace& space);

/// exp(-iHt) applied to a state: dense eigendecomposition up to total
/// dimension 4096, adaptive Lanczos propagation above. Reusable across
/// times for a fixed (Hamiltonian, space) pair.
class FockPropagator {
public:
    FockPropagator(const QuadraticHamiltonian& h, const FockSpace& space);
    StateVector evolve(double t, const StateVector& initial) const;

private:
    FockSpace space_;
    bool dense_;
    Matrix eigvecs_;
    RealVector eigvals_;
    SparseMatrix h_sparse_;
};

StateVector evolve_fock(const QuadraticHamiltonian& h, double t,
                        const StateVector& initial);

/// <C> = <a2^dag a2> - <a1^dag a1> + <a3^dag a3> on a three-mode state.
double constant_of_motion(const StateVector& psi);

struct AnalyticPopulations {
    double n1, n2, n3;
    bool quantum_limit_ok;  // g sqrt(N) < 2 omega_r
    bool asymptotic_ok;     // 2 g sqrt(N) t >> 1 (threshold 4)
};
AnalyticPopulations analytic_populations(const CarlParams& params, double t);

class EmptyWindowError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct InteractionWindow {
    double t_lower_scale;  // 1 / (g sqrt(N))
    double t_upper;        // (1 / g sqrt(N)) ln(4 omega_r / g sqrt(N))
};
InteractionWindow interaction_window(const CarlParams& params);

/// The entangled three-mode state generated from vacuum, built from its
/// closed form with populations and pair-correlator phases taken from the
/// exact Gaussian evolution at the same time.
struct State0 {
    StateVector state;
    Complex alpha, beta;
    double n1, n2, n3;
    double truncated_mass;  // amplitude mass lost to the truncation
};
State0 build_state_0(const CarlParams& params, double t, const FockSpace& space);

/// Pure twin-beam resource on modes (a1, a3) with N2 dropped:
/// sum beta^n |n,n> / sqrt(1 + n_mean), beta = sqrt(n_mean / (1 + n_mean)).
StateVector twin_state_vector(double n3_mean, const FockSpace& two_mode_space);
DensityOperator reduced_twin_state(double n3_mean, const FockSpace& two_mode_space);

// --- classical CARL cross-check ---------------------------------------------

struct ClassicalAtomState {
    std::vector<double> theta;  // positions, radians
    std::vector<double> p;      // momenta, hbar q units
    Complex field;              // a
};

struct ClassicalSample {
    double t;
    ClassicalAtomState state;
    double hamiltonian;          // H_cl
    double momentum_invariant;   // |a|^2 + sum_j p_j
};

/// Fixed-step RK4 integration of theta_dot = 2 w_r p,
/// p_dot = -g (a e^{i theta} + c.c.), a_dot = g sum e^{-i theta} + i Delta a.
std::vector<ClassicalSample> classical_carl_simulate(const CarlParams& params,
                                                     const ClassicalAtomState& initial,
                                                     double t_final, double dt,
                                                     int sample_stride = 1);

double classical_hamiltonian(const CarlParams& params, const ClassicalAtomState& s);

}  // namespace carlsim
