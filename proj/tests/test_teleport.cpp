#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "carlsim/teleport.hpp"

using namespace carlsim;

namespace {

constexpr double kPi = std::numbers::pi;

DensityOperator pure(const StateVector& psi) {
    return DensityOperator::from_pure(psi);
}

DensityOperator thermal_state(int dim, double n_mean) {
    FockSpace space({dim});
    Matrix m = Matrix::Zero(dim, dim);
    double ratio = n_mean / (1.0 + n_mean);
    double norm = 0.0;
    for (int n = 0; n < dim; ++n) norm += std::pow(ratio, n);
    for (int n = 0; n < dim; ++n) m(n, n) = std::pow(ratio, n) / norm;
    return DensityOperator(space, m);
}

StateVector product_vacuum(int dim) {
    return vacuum_state(FockSpace({dim, dim}));
}

}  // namespace

TEST_CASE("channel parameter formula") {
    CHECK(channel_parameter(0.0, 0.0).k == doctest::Approx(1.0).epsilon(1e-14));

    double prev = 2.0;
    for (double s : {0.0, 1.0, 2.0, 4.0, 8.0}) {
        double k = channel_parameter(0.5 * s, 0.5 * s).k;
        CHECK(k < prev);
        CHECK(k > 0.0);
        CHECK(k <= 1.0);
        prev = k;
    }

    double k8 = channel_parameter(4.0, 4.0).k;
    CHECK(std::abs(k8 - (9.0 - std::sqrt(80.0))) <= 1e-10);

    ChannelSpec spec = channel_parameter(1.0, 2.0, 0.7);
    REQUIRE(spec.provenance.has_value());
    CHECK(spec.provenance->n1 == 1.0);
    CHECK(spec.provenance->n3 == 2.0);
    CHECK(spec.provenance->time == 0.7);
    double recomputed = 1.0 + 3.0 - std::sqrt(3.0 * 5.0);
    CHECK(std::abs(spec.k - recomputed) <= 1e-12);

    CHECK_THROWS_AS(channel_parameter(-0.1, 0.0), std::invalid_argument);
}

TEST_CASE("povm element for vacuum sigma is a coherent projector") {
    const int d = 30;
    FockSpace space({d});
    Complex alpha(0.8, -0.1);
    Matrix pi = povm_element(alpha, pure(vacuum_state(space)));
    Vector coh = coherent_state(space, 0, alpha).amplitudes();
    Matrix expected = coh * coh.adjoint() / kPi;
    CHECK((pi - expected).norm() <= 1e-9);
}

TEST_CASE("povm element positivity") {
    FockSpace space({25});
    Matrix pi = povm_element(Complex(0.3, -0.2),
                             pure(squeezed_vacuum(space, 0, 0.4)));
    Eigen::SelfAdjointEigenSolver<Matrix> es(pi);
    CHECK(es.eigenvalues().minCoeff() >= -1e-10);
}

TEST_CASE("povm completeness improves with radius") {
    const int d = 60;
    FockSpace space({d});
    DensityOperator sigma = pure(vacuum_state(space));
    double prev = 1.0;
    for (double radius : {4.0, 5.0, 6.0}) {
        PolarGrid grid = PolarGrid::build(radius, 48, 48);
        Matrix acc = Matrix::Zero(d, d);
        for (std::size_t k = 0; k < grid.nodes.size(); ++k)
            acc += grid.weights[k] * povm_element(grid.nodes[k], sigma);
        double dev = (acc.topLeftCorner(10, 10) - Matrix::Identity(10, 10))
                         .cwiseAbs()
                         .maxCoeff();
        CHECK(dev < prev);
        prev = dev;
    }
    CHECK(prev <= 1e-2);
}

TEST_CASE("conditional state for an unentangled resource") {
    const int d = 30;
    Complex alpha(0.7, -0.2);
    DensityOperator sigma = pure(vacuum_state(FockSpace({d})));
    ConditionalState cs = conditional_state(product_vacuum(d), sigma, alpha);

    double expected_p = std::exp(-std::norm(alpha)) / kPi;
    CHECK(std::abs(cs.p_alpha - expected_p) <= 1e-10);

    REQUIRE(cs.rho_alpha.has_value());
    CHECK(std::abs(cs.rho_alpha->matrix()(0, 0).real() - 1.0) <= 1e-10);
    CHECK(std::abs(cs.rho_alpha->matrix().trace().real() - 1.0) <= 1e-10);

    REQUIRE(cs.tau_alpha.has_value());
    // Correction amplitude is -conj(alpha), so a vacuum resource lands there.
    DensityOperator coh =
        pure(coherent_state(FockSpace({d}), 0, -std::conj(alpha)));
    CHECK(state_metrics(*cs.tau_alpha, coh).trace_distance <= 1e-8);
}

TEST_CASE("negligible outcomes carry no state") {
    const int d = 12;
    DensityOperator sigma = pure(vacuum_state(FockSpace({d})));
    ConditionalState cs = conditional_state(product_vacuum(d), sigma,
                                            Complex(6.5, 0.0));
    CHECK(cs.p_alpha <= 1e-14);
    CHECK_FALSE(cs.rho_alpha.has_value());
    CHECK_FALSE(cs.tau_alpha.has_value());
}

TEST_CASE("outcome density integrates to one") {
    const int d = 25;
    StateVector resource = twin_state_vector(1.0, FockSpace({d, d}));
    DensityOperator sigma = pure(vacuum_state(FockSpace({d})));
    PolarGrid grid = PolarGrid::build(6.0, 48, 48);
    double mass = 0.0;
    for (std::size_t k = 0; k < grid.nodes.size(); ++k)
        mass += grid.weights[k] *
                conditional_state(resource, sigma, grid.nodes[k]).p_alpha;
    CHECK(std::abs(mass - 1.0) <= 1e-3);
}

TEST_CASE("unentangled teleportation gives the K=1 thermal channel") {
    const int d = 40;
    StateVector resource = product_vacuum(d);
    DensityOperator sigma = pure(vacuum_state(FockSpace({d})));
    TeleportedState tele = teleported_state_quadrature(resource, sigma);
    CHECK(tele.quadrature_defect <= 1e-4);

    CHECK(state_metrics(tele.tau, thermal_state(d, 1.0)).trace_distance <= 1e-3);

    ChannelSpec spec;
    spec.k = 1.0;
    DensityOperator chan = gaussian_channel_apply(sigma, spec);
    CHECK(state_metrics(tele.tau, chan).trace_distance <= 1e-3);
}

TEST_CASE("gaussian channel basics") {
    const int d = 35;
    FockSpace space({d});
    DensityOperator sigma = pure(coherent_state(space, 0, Complex(0.5, 0.2)));

    ChannelSpec zero;
    zero.k = 0.0;
    CHECK(state_metrics(gaussian_channel_apply(sigma, zero), sigma)
              .trace_distance <= 1e-12);

    ChannelSpec spec;
    spec.k = 0.3;
    DensityOperator tau = gaussian_channel_apply(sigma, spec);
    double n_out = tau.mode_populations()[0];
    double n_in = sigma.mode_populations()[0];
    CHECK(std::abs(n_out - (n_in + spec.k)) <= 1e-6);
    // first moments pass through unchanged
    CHECK(std::abs(expect_a(tau, 0) - expect_a(sigma, 0)) <= 1e-6);

    ChannelSpec one;
    one.k = 1.0;
    DensityOperator vac_out =
        gaussian_channel_apply(pure(vacuum_state(space)), one);
    DensityOperator thermal = thermal_state(d, 1.0);
    CHECK((vac_out.diagonal() - thermal.diagonal()).cwiseAbs().maxCoeff() <= 1e-6);

    ChannelSpec negative;
    negative.k = -0.1;
    CHECK_THROWS_AS(gaussian_channel_apply(sigma, negative), std::invalid_argument);
}

TEST_CASE("channel fidelity decreases with K") {
    const int d = 40;
    FockSpace space({d});
    DensityOperator sigmas[] = {
        pure(coherent_state(space, 0, 0.5)),
        pure(squeezed_vacuum(space, 0, 0.5)),
        pure(basis_state(space, std::vector<int>{2}))};
    for (const auto& sigma : sigmas) {
        double prev = 2.0;
        for (double k : {0.01, 0.1, 0.5, 1.0}) {
            ChannelSpec spec;
            spec.k = k;
            double f = state_metrics(sigma, gaussian_channel_apply(sigma, spec))
                           .fidelity;
            CHECK(f < prev);
            prev = f;
        }
    }
}

TEST_CASE("channel theorem for a twin-beam resource") {
    const int d = 40;
    StateVector resource = twin_state_vector(1.0, FockSpace({d, d}));
    auto pops = resource.mode_populations();
    ChannelSpec spec = channel_parameter(pops[0], pops[1]);
    DensityOperator sigma = pure(coherent_state(FockSpace({d}), 0, 0.5));

    TeleportedState tele = teleported_state_quadrature(resource, sigma);
    DensityOperator chan = gaussian_channel_apply(sigma, spec);
    CHECK(state_metrics(tele.tau, chan).trace_distance <= 1e-3);
}

TEST_CASE("bell outcome sampling") {
    const int d = 25;
    StateVector resource = product_vacuum(d);
    DensityOperator sigma = pure(vacuum_state(FockSpace({d})));

    auto a = sample_bell_outcome(resource, sigma, 42, 1000);
    auto b = sample_bell_outcome(resource, sigma, 42, 1000);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].alpha == b[i].alpha);
        CHECK(a[i].weight == b[i].weight);
        CHECK(a[i].weight >= 0.0);
    }

    // p_alpha = e^{-|alpha|^2}/pi has mean |alpha|^2 = 1, var 1
    const long n = 100000;
    auto samples = sample_bell_outcome(resource, sigma, 7, n);
    double mean = 0.0;
    for (const auto& s : samples) mean += std::norm(s.alpha);
    mean /= double(n);
    CHECK(std::abs(mean - 1.0) <= 3.0 / std::sqrt(double(n)));
}

TEST_CASE("sampled radial histogram agrees with the density") {
    // chi^2 against the grid's own node masses, binned by |alpha|^2
    // quantiles of Exp(1); 10 bins, 1% critical value for df = 9.
    const int d = 25;
    StateVector resource = product_vacuum(d);
    DensityOperator sigma = pure(vacuum_state(FockSpace({d})));
    const long n = 100000;
    auto samples = sample_bell_outcome(resource, sigma, 11, n);

    const int bins = 10;
    std::vector<double> edges(bins + 1);
    for (int b = 0; b <= bins; ++b)
        edges[b] = (b == bins) ? 1e9 : -std::log(1.0 - double(b) / bins);

    auto bin_of = [&](double u) {
        int b = 0;
        while (u >= edges[b + 1]) ++b;
        return b;
    };

    // expected bin masses from one exhaustive low-discrepancy pass: reuse the
    // sampler itself with a huge count is circular, so accumulate the grid
    // masses analytically from a fresh dense sample of the density.
    PolarGrid grid = PolarGrid::build(6.0, 64, 64);
    std::vector<double> expected(bins, 0.0);
    double total = 0.0;
    for (std::size_t k = 0; k < grid.nodes.size(); ++k) {
        double w = grid.weights[k] *
                   conditional_state(resource, sigma, grid.nodes[k]).p_alpha;
        expected[bin_of(std::norm(grid.nodes[k]))] += w;
        total += w;
    }
    for (double& e : expected) e *= double(n) / total;

    std::vector<double> observed(bins, 0.0);
    for (const auto& s : samples) observed[bin_of(std::norm(s.alpha))] += 1.0;

    // A bin narrower than the radial node spacing can contain no grid nodes
    // at all; the sampler then never emits it either, so skip it.
    double chi2 = 0.0;
    int used = 0;
    for (int b = 0; b < bins; ++b) {
        if (expected[b] == 0.0) {
            CHECK(observed[b] == 0.0);
            continue;
        }
        chi2 += (observed[b] - expected[b]) * (observed[b] - expected[b]) /
                expected[b];
        ++used;
    }
    CHECK(used >= 8);
    CHECK(chi2 <= 21.67);  // chi^2_{0.99}(9), conservative for df < 9
}

TEST_CASE("displacement pulse") {
    CarlParams p;
    p.g = 1.0;
    p.n_atoms = 1.0;
    p.omega_r = 5.0;
    p.delta = -5.0;
    FockSpace space({20, 20});

    DisplacementPulse idle = displacement_pulse(p, 0.0, 1.0, space);
    CHECK(std::abs(idle.alpha_applied) == 0.0);
    CHECK((idle.unitary - Matrix::Identity(400, 400)).norm() <= 1e-12);

    PulseSetting setting = inverse_pulse_for(0.5, p);
    DisplacementPulse pulse =
        displacement_pulse(p, setting.gamma, setting.tau_pulse, space);
    CHECK(std::abs(pulse.alpha_applied - 0.5) <= 1e-12);
    CHECK(pulse.factorization_deviation <= 1e-8);

    DisplacementPulse doubled =
        displacement_pulse(p, setting.gamma, 2.0 * setting.tau_pulse, space);
    CHECK(std::abs(doubled.alpha_applied - 2.0 * pulse.alpha_applied) <= 1e-14);
}

TEST_CASE("inverse pulse round trips") {
    CarlParams p;
    p.g = 1.0;
    p.n_atoms = 4.0;
    p.omega_r = 10.0;
    p.delta = -10.0;

    CHECK(std::abs(inverse_pulse_for(0.0, p).gamma) == 0.0);

    Complex target = 0.7 * std::exp(Complex(0, std::numbers::pi / 3.0));
    PulseSetting s = inverse_pulse_for(target, p);
    Complex applied = -p.g_sqrt_n() * std::conj(s.gamma) * s.tau_pulse;
    CHECK(std::abs(applied - target) <= 1e-12);

    PulseSetting half = inverse_pulse_for(target, p, 0.5);
    CHECK(std::abs(half.gamma) == doctest::Approx(2.0 * std::abs(s.gamma))
                                      .epsilon(1e-12));

    CHECK_THROWS_AS(inverse_pulse_for(target, p, 0.0), std::invalid_argument);
}

TEST_CASE("number fluctuation channel") {
    CarlParams p;
    p.g = 0.1;
    p.n_atoms = 100.0;
    p.omega_r = 5.0;
    p.delta = 5.0;
    const double t = 2.0;
    const int d = 25;
    DensityOperator sigma = pure(coherent_state(FockSpace({d}), 0, 0.5));

    DensityOperator point = channel_with_number_fluctuations(
        sigma, p, t, {{100.0, 1.0}});
    QuadraticHamiltonian h = build_three_mode_hamiltonian(p);
    auto pops = mode_populations(evolve_gaussian(h, t, GaussianState::vacuum(3)));
    DensityOperator fixed =
        gaussian_channel_apply(sigma, channel_parameter(pops[0], pops[2], t));
    CHECK(state_metrics(point, fixed).trace_distance <= 1e-10);

    DensityOperator spread = channel_with_number_fluctuations(
        sigma, p, t, {{80.0, 0.5}, {120.0, 0.5}});
    CHECK(std::abs(spread.matrix().trace().real() - 1.0) <= 1e-8);
    double f_fixed = state_metrics(sigma, fixed).fidelity;
    double f_spread = state_metrics(sigma, spread).fidelity;
    CHECK(f_spread <= f_fixed + 1e-12);

    CHECK_THROWS_AS(channel_with_number_fluctuations(sigma, p, t, {}),
                    std::invalid_argument);
}
