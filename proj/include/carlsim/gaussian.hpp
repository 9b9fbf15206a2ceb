#pragma once

#include "carlsim/fock.hpp"

namespace carlsim {

/// First and second quadrature moments of an M-mode Gaussian state.
/// Layout is interleaved (x0, y0, x1, y1, ...); vacuum variance is 1/4,
/// matching quadratures x = (a + a^dag)/2, y = (a - a^dag)/2i.
struct GaussianState {
    RealVector mean;  // length 2M
    RealMatrix cov;   // 2M x 2M, symmetric

    int num_modes() const { return static_cast<int>(mean.size()) / 2; }
    static GaussianState vacuum(int modes);
};

/// H = sum A_ij a_i^dag a_j + sum (B_ij a_i^dag a_j^dag + h.c.)
///       + sum (c_i a_i^dag + h.c.)
/// with A Hermitian and B symmetric.
struct QuadraticHamiltonian {
    Matrix hermitian_block;  // A
    Matrix squeezing_block;  // B
    Vector linear;           // c

    int num_modes() const { return static_cast<int>(linear.size()); }
    void validate() const;
};

/// Symplectic form Omega (interleaved layout): [R_a, R_b] = (i/2) Omega_ab.
RealMatrix symplectic_form(int modes);

/// Linear phase-space flow of the Hamiltonian over time t: the symplectic
/// propagator S and the drift from the linear term, so that
/// mean -> S mean + drift, cov -> S cov S^T.
struct LinearFlow {
    RealMatrix propagator;
    RealVector drift;
};
LinearFlow gaussian_flow(const QuadraticHamiltonian& h, double t);

GaussianState evolve_gaussian(const QuadraticHamiltonian& h, double t,
                              const GaussianState& initial);

/// <a_i^dag a_i> per mode; vacuum gives zeros.
std::vector<double> mode_populations(const GaussianState& s);

/// Full second moment <a_i a_j> (not mean-subtracted).
Complex moment_aa(const GaussianState& s, int mode_i, int mode_j);
Complex mode_mean(const GaussianState& s, int mode);

/// Quadrature moments of a Fock-space density operator, in GaussianState
/// layout for direct comparison against the symplectic oracle.
GaussianState fock_moments(const DensityOperator& rho);

/// Smallest eigenvalue of cov + (i/4) Omega; >= -1e-9 for physical states.
double uncertainty_margin(const GaussianState& s);

}  // namespace carlsim
