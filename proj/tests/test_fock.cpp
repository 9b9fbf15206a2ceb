#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "carlsim/fock.hpp"

using namespace carlsim;

namespace {

DensityOperator thermal_state(int dim, double n_mean) {
    FockSpace space({dim});
    Matrix m = Matrix::Zero(dim, dim);
    double ratio = n_mean / (1.0 + n_mean);
    double norm = 0.0;
    for (int n = 0; n < dim; ++n) norm += std::pow(ratio, n);
    for (int n = 0; n < dim; ++n) m(n, n) = std::pow(ratio, n) / norm;
    return DensityOperator(space, m);
}

StateVector twin_vector(int dim, double beta) {
    FockSpace space({dim, dim});
    Vector amp = Vector::Zero(space.total_dim());
    for (int n = 0; n < dim; ++n)
        amp[space.index(std::vector<int>{n, n})] = std::pow(beta, n);
    return StateVector(space, amp, /*renormalize=*/true);
}

}  // namespace

TEST_CASE("fock space indexing is little-endian") {
    FockSpace space({3, 4, 2});
    CHECK(space.total_dim() == 24);
    CHECK(space.index(std::vector<int>{1, 0, 0}) == 1);
    CHECK(space.index(std::vector<int>{0, 1, 0}) == 3);
    CHECK(space.index(std::vector<int>{0, 0, 1}) == 12);
    CHECK(space.occupation(17) == std::vector<int>{2, 1, 1});
    CHECK(space.occupation_of(17, 1) == 1);
    CHECK_THROWS_AS(FockSpace({3, 1}), std::invalid_argument);
}

TEST_CASE("annihilation matrix elements") {
    FockSpace d2({2});
    CHECK(annihilation(d2, 0)(0, 1) == Complex(1.0));

    FockSpace d16({16});
    CHECK(annihilation(d16, 0)(8, 9).real() == doctest::Approx(3.0).epsilon(1e-15));

    Matrix a = annihilation(d16, 0);
    Matrix comm = a * a.adjoint() - a.adjoint() * a;
    // canonical commutator away from the top level
    CHECK((comm.topLeftCorner(15, 15) - Matrix::Identity(15, 15)).norm() <= 1e-12);
}

TEST_CASE("annihilation acts as identity on other modes") {
    FockSpace space({3, 3});
    Matrix a0 = annihilation(space, 0);
    CHECK(a0(space.index(std::vector<int>{0, 2}),
             space.index(std::vector<int>{1, 2}))
              .real() == doctest::Approx(1.0));
    CHECK(std::abs(a0(space.index(std::vector<int>{0, 1}),
                      space.index(std::vector<int>{1, 2}))) == 0.0);
    CHECK_THROWS_AS(annihilation(space, 2), std::invalid_argument);
}

TEST_CASE("displacement operator") {
    FockSpace d20({20});
    CHECK((displacement(d20, 0, 0.0) - Matrix::Identity(20, 20)).norm() <= 1e-14);

    Matrix d = displacement(d20, 0, 0.5);
    CHECK(std::abs(d(0, 0) - std::exp(-0.125)) <= 1e-10);

    FockSpace d25({25});
    Complex alpha(0.7, 0.3);
    Matrix prod = displacement(d25, 0, alpha) * displacement(d25, 0, -alpha);
    CHECK((prod - Matrix::Identity(25, 25)).norm() <= 1e-8);

    // unitary on the lower half of the ladder
    Matrix du = displacement(d25, 0, alpha);
    Matrix gram = du.adjoint() * du;
    CHECK((gram.topLeftCorner(12, 12) - Matrix::Identity(12, 12)).norm() <= 1e-8);

    FockSpace d10({10});
    CHECK_THROWS_AS(displacement(d10, 0, 4.0), TruncationError);
}

TEST_CASE("coherent state") {
    FockSpace space({25});
    StateVector psi = coherent_state(space, 0, Complex(0.5, -0.2));
    StateVector via_d(space,
                      displacement(space, 0, Complex(0.5, -0.2)) *
                          vacuum_state(space).amplitudes());
    CHECK((psi.amplitudes() - via_d.amplitudes()).norm() <= 1e-9);
    CHECK(psi.mode_populations()[0] == doctest::Approx(0.29).epsilon(1e-8));
}

TEST_CASE("squeezed vacuum") {
    FockSpace space({30});
    CHECK((squeezed_vacuum(space, 0, 0.0).amplitudes() -
           vacuum_state(space).amplitudes())
              .norm() == 0.0);

    StateVector sq = squeezed_vacuum(space, 0, 0.5);
    for (int n = 1; n < 30; n += 2) CHECK(std::abs(sq.amplitudes()[n]) == 0.0);

    double p0 = std::norm(sq.amplitudes()[0]);
    double p2 = std::norm(sq.amplitudes()[2]);
    double t = std::tanh(0.5);
    CHECK(std::abs(p2 / p0 - t * t / 2.0) <= 1e-10);

    CHECK_THROWS_AS(squeezed_vacuum(FockSpace({6}), 0, 1.5), TruncationError);
}

TEST_CASE("partial trace") {
    FockSpace space({8, 13});
    StateVector a = coherent_state(FockSpace({8}), 0, 0.4);
    StateVector b = squeezed_vacuum(FockSpace({13}), 0, 0.3);
    const int total = 8 * 13;
    Matrix joint = Matrix::Zero(total, total);
    for (int i = 0; i < total; ++i)
        for (int j = 0; j < total; ++j)
            joint(i, j) = a.amplitudes()[i % 8] * b.amplitudes()[i / 8] *
                          std::conj(a.amplitudes()[j % 8] * b.amplitudes()[j / 8]);
    DensityOperator rho(space, joint);

    DensityOperator r0 = partial_trace(rho, std::vector<int>{0});
    CHECK((r0.matrix() - DensityOperator::from_pure(a).matrix()).norm() <= 1e-12);
    CHECK(std::abs(r0.matrix().trace().real() - 1.0) <= 1e-12);

    CHECK_THROWS_AS(partial_trace(rho, std::vector<int>{}), std::invalid_argument);
    CHECK_THROWS_AS(partial_trace(rho, std::vector<int>{2}), std::invalid_argument);
}

TEST_CASE("reduced twin state is thermal") {
    // |beta|^2 = 0.5 -> n_mean = 1
    StateVector twin = twin_vector(30, std::sqrt(0.5));
    DensityOperator reduced =
        partial_trace(DensityOperator::from_pure(twin), std::vector<int>{0});
    DensityOperator thermal = thermal_state(30, 1.0);
    CHECK((reduced.matrix() - thermal.matrix()).norm() <= 1e-8);
}

TEST_CASE("state metrics") {
    FockSpace space({10});
    DensityOperator vac = DensityOperator::from_pure(vacuum_state(space));
    auto same = state_metrics(vac, vac);
    CHECK(same.fidelity == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(same.trace_distance <= 1e-10);

    DensityOperator one =
        DensityOperator::from_pure(basis_state(space, std::vector<int>{1}));
    auto orth = state_metrics(vac, one);
    CHECK(orth.fidelity <= 1e-10);
    CHECK(orth.trace_distance == doctest::Approx(1.0).epsilon(1e-10));

    DensityOperator thermal = thermal_state(40, 1.0);
    DensityOperator vac40 =
        DensityOperator::from_pure(vacuum_state(FockSpace({40})));
    auto vt = state_metrics(vac40, thermal);
    CHECK(std::abs(vt.fidelity - 1.0 / std::sqrt(2.0)) <= 1e-8);

    CHECK_THROWS_AS(state_metrics(vac, vac40), std::invalid_argument);
}

TEST_CASE("von Neumann entropy") {
    FockSpace space({10});
    CHECK(von_neumann_entropy(DensityOperator::from_pure(
              coherent_state(space, 0, 0.5))) <= 1e-10);

    double expected = 2.0 * std::log(2.0);  // (1+n)ln(1+n) - n ln n at n=1
    CHECK(std::abs(von_neumann_entropy(thermal_state(40, 1.0)) - expected) <= 1e-8);

    FockSpace qubit({2});
    Matrix mixed = 0.5 * Matrix::Identity(2, 2);
    CHECK(von_neumann_entropy(DensityOperator(qubit, mixed)) ==
          doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("entanglement entropy is partition-symmetric") {
    StateVector twin = twin_vector(25, std::sqrt(0.4));
    DensityOperator rho = DensityOperator::from_pure(twin);
    double s0 = von_neumann_entropy(partial_trace(rho, std::vector<int>{0}));
    double s1 = von_neumann_entropy(partial_trace(rho, std::vector<int>{1}));
    CHECK(std::abs(s0 - s1) <= 1e-8);
}

TEST_CASE("density operator invariants enforced") {
    FockSpace space({3});
    Matrix bad = Matrix::Zero(3, 3);
    bad(0, 1) = 0.5;  // not Hermitian
    bad(0, 0) = 1.0;
    CHECK_THROWS_AS(DensityOperator(space, bad), std::invalid_argument);

    Matrix off_trace = 0.9 * Matrix::Identity(3, 3) / 3.0;
    CHECK_THROWS_AS(DensityOperator(space, off_trace), std::invalid_argument);
}

TEST_CASE("state vector norm check and leakage") {
    FockSpace space({5});
    Vector amp = Vector::Zero(5);
    amp[0] = 0.5;
    CHECK_THROWS_AS(StateVector(space, amp), std::invalid_argument);
    StateVector fixed(space, amp, /*renormalize=*/true);
    CHECK(std::abs(fixed.amplitudes().norm() - 1.0) <= 1e-12);
    CHECK(fixed.leakage() == 0.0);

    StateVector top = basis_state(space, std::vector<int>{4});
    CHECK(top.top_level_population(0) == doctest::Approx(1.0));
}

TEST_CASE("moment accessors match operator expectations") {
    FockSpace space({12, 8});
    StateVector psi = coherent_state(space, 0, Complex(0.4, 0.3));
    DensityOperator rho = DensityOperator::from_pure(psi);
    Matrix a0 = annihilation(space, 0);
    Complex direct = (psi.amplitudes().adjoint() * a0 * psi.amplitudes())(0, 0);
    CHECK(std::abs(expect_a(rho, 0) - direct) <= 1e-12);
    Complex aa = (psi.amplitudes().adjoint() * a0 * a0 * psi.amplitudes())(0, 0);
    CHECK(std::abs(expect_aa(rho, 0, 0) - aa) <= 1e-12);
    Matrix n0 = number_operator(space, 0);
    Complex nn = (psi.amplitudes().adjoint() * n0 * psi.amplitudes())(0, 0);
    CHECK(std::abs(expect_adag_a(rho, 0, 0) - nn) <= 1e-12);
}
