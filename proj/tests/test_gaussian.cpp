#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "carlsim/carl.hpp"
#include "carlsim/gaussian.hpp"

using namespace carlsim;

namespace {

QuadraticHamiltonian free_mode(double omega) {
    QuadraticHamiltonian h;
    h.hermitian_block = Matrix::Constant(1, 1, omega);
    h.squeezing_block = Matrix::Zero(1, 1);
    h.linear = Vector::Zero(1);
    return h;
}

QuadraticHamiltonian two_mode_squeezer(double g) {
    // i g (a^dag b^dag - a b)
    QuadraticHamiltonian h;
    h.hermitian_block = Matrix::Zero(2, 2);
    h.squeezing_block = Matrix::Zero(2, 2);
    h.squeezing_block(0, 1) = Complex(0, 0.5 * g);
    h.squeezing_block(1, 0) = Complex(0, 0.5 * g);
    h.linear = Vector::Zero(2);
    return h;
}

CarlParams sample_params() {
    CarlParams p;
    p.g = 1.0;
    p.n_atoms = 1.0;
    p.omega_r = 5.0;
    p.delta = -5.0;
    return p;
}

}  // namespace

TEST_CASE("vacuum state and zero-time evolution") {
    GaussianState vac = GaussianState::vacuum(3);
    CHECK(vac.mean.norm() == 0.0);
    CHECK((vac.cov - 0.25 * RealMatrix::Identity(6, 6)).norm() == 0.0);

    QuadraticHamiltonian h = build_three_mode_hamiltonian(sample_params());
    GaussianState same = evolve_gaussian(h, 0.0, vac);
    CHECK((same.cov - vac.cov).norm() <= 1e-12);
    CHECK(same.mean.norm() <= 1e-12);
}

TEST_CASE("free evolution rotates phase space") {
    const double omega = 2.0;
    GaussianState s = GaussianState::vacuum(1);
    s.mean[0] = 1.0;  // coherent mu = 1
    GaussianState out = evolve_gaussian(free_mode(omega), M_PI / (2.0 * omega), s);
    // <a> = e^{-i omega t} mu = -i
    CHECK(std::abs(out.mean[0]) <= 1e-12);
    CHECK(out.mean[1] == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK((out.cov - s.cov).norm() <= 1e-12);
}

TEST_CASE("two-mode squeezer populations") {
    GaussianState out =
        evolve_gaussian(two_mode_squeezer(1.0), 1.0, GaussianState::vacuum(2));
    auto pops = mode_populations(out);
    double expected = std::sinh(1.0) * std::sinh(1.0);
    CHECK(std::abs(pops[0] - expected) <= 1e-10);
    CHECK(std::abs(pops[1] - expected) <= 1e-10);
}

TEST_CASE("mode populations conventions") {
    CHECK(mode_populations(GaussianState::vacuum(2)) ==
          std::vector<double>{0.0, 0.0});

    GaussianState coh = GaussianState::vacuum(1);
    coh.mean[0] = 1.0;
    coh.mean[1] = 1.0;  // mu = 1 + i
    CHECK(mode_populations(coh)[0] == doctest::Approx(2.0).epsilon(1e-12));

    GaussianState thermal = GaussianState::vacuum(1);
    thermal.cov *= 3.0;  // (2 n + 1)/4 with n = 1
    CHECK(mode_populations(thermal)[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("fock moments bridge") {
    FockSpace space({25});
    GaussianState vac =
        fock_moments(DensityOperator::from_pure(vacuum_state(space)));
    CHECK(vac.mean.norm() <= 1e-12);
    CHECK((vac.cov - 0.25 * RealMatrix::Identity(2, 2)).norm() <= 1e-12);

    GaussianState coh =
        fock_moments(DensityOperator::from_pure(coherent_state(space, 0, 0.5)));
    CHECK(std::abs(coh.mean[0] - 0.5) <= 1e-9);
    CHECK(std::abs(coh.mean[1]) <= 1e-9);
    CHECK((coh.cov - 0.25 * RealMatrix::Identity(2, 2)).norm() <= 1e-9);

    GaussianState sq =
        fock_moments(DensityOperator::from_pure(squeezed_vacuum(space, 0, 0.3)));
    CHECK(std::abs(sq.cov(0, 0) / sq.cov(1, 1) - std::exp(-4.0 * 0.3)) <= 1e-8);

    StateVector top = basis_state(FockSpace({4}), std::vector<int>{3});
    CHECK_THROWS_AS(fock_moments(DensityOperator::from_pure(top)),
                    TruncationError);
}

TEST_CASE("symplectic propagator property") {
    QuadraticHamiltonian h = build_three_mode_hamiltonian(sample_params());
    RealMatrix omega = symplectic_form(3);
    for (double t : {0.3, 1.0, 2.5}) {
        LinearFlow flow = gaussian_flow(h, t);
        RealMatrix lhs = flow.propagator * omega * flow.propagator.transpose();
        CHECK((lhs - omega).norm() <= 1e-10);
    }
}

TEST_CASE("evolution preserves purity and uncertainty") {
    QuadraticHamiltonian h = build_three_mode_hamiltonian(sample_params());
    GaussianState vac = GaussianState::vacuum(3);
    double det0 = vac.cov.determinant();
    for (double t : {0.5, 1.5}) {
        GaussianState out = evolve_gaussian(h, t, vac);
        CHECK(std::abs(out.cov.determinant() - det0) <= 1e-10);
        CHECK(uncertainty_margin(out) >= -1e-9);
        CHECK((out.cov - out.cov.transpose()).norm() <= 1e-12);
    }
}

TEST_CASE("CARL conservation in the Gaussian oracle") {
    QuadraticHamiltonian h = build_three_mode_hamiltonian(sample_params());
    for (double t : {0.2, 0.7, 1.3, 2.0}) {
        auto pops = mode_populations(evolve_gaussian(h, t, GaussianState::vacuum(3)));
        CHECK(std::abs(pops[1] - pops[0] + pops[2]) <= 1e-10);
    }
}

TEST_CASE("hamiltonian validation") {
    QuadraticHamiltonian h = free_mode(1.0);
    h.hermitian_block(0, 0) = Complex(1.0, 0.5);  // not Hermitian
    CHECK_THROWS_AS(evolve_gaussian(h, 1.0, GaussianState::vacuum(1)),
                    std::invalid_argument);

    QuadraticHamiltonian h2 = two_mode_squeezer(1.0);
    h2.squeezing_block(0, 1) = Complex(0, 0.3);  // not symmetric
    CHECK_THROWS_AS(evolve_gaussian(h2, 1.0, GaussianState::vacuum(2)),
                    std::invalid_argument);

    CHECK_THROWS_AS(evolve_gaussian(free_mode(1.0), -1.0, GaussianState::vacuum(1)),
                    std::invalid_argument);
}

TEST_CASE("linear drive displaces the mean") {
    QuadraticHamiltonian h;
    h.hermitian_block = Matrix::Zero(1, 1);
    h.squeezing_block = Matrix::Zero(1, 1);
    h.linear = Vector::Constant(1, Complex(0, 0.5));  // i c a^dag + h.c.
    GaussianState out = evolve_gaussian(h, 2.0, GaussianState::vacuum(1));
    // d<a>/dt = -i c -> <a> = -i (i 0.5) t = 0.5 t
    CHECK(std::abs(out.mean[0] - 1.0) <= 1e-10);
    CHECK(std::abs(out.mean[1]) <= 1e-10);
    CHECK((out.cov - 0.25 * RealMatrix::Identity(2, 2)).norm() <= 1e-10);
}

TEST_CASE("moment_aa matches the fock computation") {
    FockSpace space({25});
    DensityOperator sq = DensityOperator::from_pure(squeezed_vacuum(space, 0, 0.4));
    GaussianState moments = fock_moments(sq);
    Complex aa = moment_aa(moments, 0, 0);
    CHECK(std::abs(aa - expect_aa(sq, 0, 0)) <= 1e-8);
}
