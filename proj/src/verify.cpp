#include "carlsim/verify.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>

#include "carlsim/carl.hpp"
#include "carlsim/readout.hpp"
#include "carlsim/scenario.hpp"
#include "carlsim/teleport.hpp"

namespace carlsim {

namespace {

// Quantum-limit operating point with g sqrt(N) = 1 and the given coupling
// ratio g sqrt(N) / 2 omega_r, probe on resonance (delta = omega_r).
CarlParams resonant_params(double ratio) {
    CarlParams p;
    p.g = 1.0;
    p.n_atoms = 1.0;
    p.omega_r = 0.5 / ratio;
    p.delta = p.omega_r;
    return p;
}

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

struct Check {
    bool ok = true;
    std::ostringstream detail;

    void require(bool cond, const std::string& what) {
        if (!detail.str().empty()) detail << "; ";
        detail << what;
        if (!cond) {
            ok = false;
            detail << " [FAILED]";
        }
    }
};

CriterionResult criterion_conservation() {
    Check c;
    CarlParams p = resonant_params(0.1);
    QuadraticHamiltonian h = build_three_mode_hamiltonian(p);
    InteractionWindow window = interaction_window(p);

    double worst = 0.0;
    for (int i = 1; i <= 50; ++i) {
        double t = window.t_upper * i / 50.0;
        auto pops = mode_populations(evolve_gaussian(h, t, GaussianState::vacuum(3)));
        worst = std::max(worst, std::abs(pops[0] - pops[1] - pops[2]));
    }
    c.require(worst <= 1e-10, "gaussian N1-N2-N3 dev " + fmt(worst));

    // Fock check over a time span where the 16x8x16 truncation stays clean:
    // largest t with exact N1 <= 0.3.
    double lo = 0.0, hi = window.t_upper;
    for (int it = 0; it < 60; ++it) {
        double mid = 0.5 * (lo + hi);
        auto pops = mode_populations(evolve_gaussian(h, mid, GaussianState::vacuum(3)));
        (pops[0] <= 0.3 ? lo : hi) = mid;
    }
    double t_fock = lo;

    FockSpace space({16, 8, 16});
    FockPropagator prop(h, space);
    StateVector psi = vacuum_state(space);
    double drift = 0.0, leak = 0.0, t_prev = 0.0;
    for (int i = 1; i <= 10; ++i) {
        double t = t_fock * i / 10.0;
        psi = prop.evolve(t - t_prev, psi);
        t_prev = t;
        drift = std::max(drift, std::abs(constant_of_motion(psi)));
        leak = std::max(leak, psi.leakage());
    }
    c.require(drift <= 1e-8, "fock <C> drift " + fmt(drift) + " at t<=" + fmt(t_fock));
    c.require(leak < 1e-8, "fock leakage " + fmt(leak));
    return {1, "conservation", c.ok, c.detail.str()};
}

CriterionResult criterion_engine_equivalence() {
    Check c;
    CarlParams p = resonant_params(0.1);
    QuadraticHamiltonian h = build_three_mode_hamiltonian(p);

    FockSpace space({128, 12, 128});
    FockPropagator prop(h, space);
    StateVector psi = vacuum_state(space);
    double worst = 0.0, t_prev = 0.0;
    for (double t : {0.3, 0.6, 0.9, 1.2, 1.5}) {
        psi = prop.evolve(t - t_prev, psi);
        t_prev = t;
        auto fp = psi.mode_populations();
        auto gp = mode_populations(evolve_gaussian(h, t, GaussianState::vacuum(3)));
        for (int m = 0; m < 3; ++m)
            worst = std::max(worst, std::abs(fp[m] - gp[m]));
    }
    c.require(worst <= 1e-6, "max population deviation " + fmt(worst));
    return {2, "engine equivalence", c.ok, c.detail.str()};
}

CriterionResult criterion_asymptotics() {
    Check c;
    const double ratio = 0.05;
    CarlParams p = resonant_params(ratio);
    const double t = 5.0;  // 2 g sqrt(N) t = 10
    QuadraticHamiltonian h = build_three_mode_hamiltonian(p);
    auto exact = mode_populations(evolve_gaussian(h, t, GaussianState::vacuum(3)));
    AnalyticPopulations a = analytic_populations(p, t);
    c.require(a.asymptotic_ok, "asymptotic regime flag");
    double r1 = std::abs(a.n1 - exact[0]) / exact[0];
    double r2 = std::abs(a.n2 - exact[1]) / exact[1];
    double r3 = std::abs(a.n3 - exact[2]) / exact[2];
    c.require(r1 <= 0.1, "N1 rel dev " + fmt(r1));
    c.require(r2 <= 0.1, "N2 rel dev " + fmt(r2));
    c.require(r3 <= 0.1, "N3 rel dev " + fmt(r3));
    double ratio_dev = std::abs(a.n2 / a.n3 - ratio * ratio);
    c.require(ratio_dev <= 1e-14, "N2/N3 vs ratio^2 dev " + fmt(ratio_dev));
    return {3, "asymptotics", c.ok, c.detail.str()};
}

CriterionResult criterion_window() {
    Check c;
    CarlParams p = resonant_params(0.02);
    InteractionWindow window = interaction_window(p);
    QuadraticHamiltonian h = build_three_mode_hamiltonian(p);
    auto pops = mode_populations(
        evolve_gaussian(h, window.t_upper, GaussianState::vacuum(3)));
    c.require(std::abs(pops[1] - 1.0) <= 0.05,
              "N2 at t_upper " + fmt(pops[1]));

    CarlParams bad = resonant_params(0.02);
    bad.omega_r = 0.25;  // g sqrt(N) = 4 omega_r
    bad.delta = bad.omega_r;
    bool threw = false;
    try {
        interaction_window(bad);
    } catch (const EmptyWindowError&) {
        threw = true;
    }
    c.require(threw, "empty-window error raised");
    return {4, "interaction window", c.ok, c.detail.str()};
}

CriterionResult criterion_state_form() {
    Check c;
    CarlParams p = resonant_params(0.1);
    double t = 0.4 * interaction_window(p).t_upper;
    FockSpace space({64, 8, 64});
    QuadraticHamiltonian h = build_three_mode_hamiltonian(p);
    StateVector evolved = FockPropagator(h, space).evolve(t, vacuum_state(space));
    State0 s0 = build_state_0(p, t, space);
    Complex ov = (s0.state.amplitudes().adjoint() * evolved.amplitudes())(0, 0);
    double fid = std::norm(ov);
    c.require(fid >= 1.0 - 1e-6, "fidelity " + fmt(fid) + " at t " + fmt(t));
    return {5, "closed-form state", c.ok, c.detail.str()};
}

CriterionResult criterion_channel_theorem() {
    Check c;
    GridSpec grid{48, 32, 0.0};
    for (double s : {2.0, 8.0}) {
        const int d = s > 4.0 ? 100 : 40;
        FockSpace rspace({d, d});
        StateVector resource = twin_state_vector(0.5 * s, rspace);
        auto rp = resource.mode_populations();
        ChannelSpec spec = channel_parameter(rp[0], rp[1]);
        FockSpace sspace({d});

        DensityOperator sigmas[] = {
            DensityOperator::from_pure(coherent_state(sspace, 0, 0.5)),
            DensityOperator::from_pure(squeezed_vacuum(sspace, 0, 0.5)),
            DensityOperator::from_pure(basis_state(sspace, std::vector<int>{2}))};
        const char* names[] = {"coherent", "squeezed", "fock2"};
        for (int i = 0; i < 3; ++i) {
            TeleportedState tele = teleported_state_quadrature(resource, sigmas[i], grid);
            DensityOperator chan = gaussian_channel_apply(sigmas[i], spec);
            double td = state_metrics(tele.tau, chan).trace_distance;
            c.require(td <= 1e-3, std::string(names[i]) + " S=" + fmt(s) +
                                      " trace dist " + fmt(td));
        }
    }
    return {6, "channel theorem", c.ok, c.detail.str()};
}

CriterionResult criterion_povm_completeness() {
    Check c;
    const int d = 80;
    FockSpace space({d});
    DensityOperator sigma = DensityOperator::from_pure(vacuum_state(space));
    PolarGrid grid = PolarGrid::build(6.0, 64, 64);
    Matrix acc = Matrix::Zero(d, d);
    for (std::size_t k = 0; k < grid.nodes.size(); ++k)
        acc += grid.weights[k] * povm_element(grid.nodes[k], sigma);
    double dev = (acc.topLeftCorner(10, 10) - Matrix::Identity(10, 10))
                     .cwiseAbs()
                     .maxCoeff();
    c.require(dev <= 1e-2, "identity deviation " + fmt(dev));
    return {7, "POVM completeness", c.ok, c.detail.str()};
}

CriterionResult criterion_coherent_fidelity() {
    Check c;
    const int d = 40;
    FockSpace space({d});
    StateVector mu = coherent_state(space, 0, 0.5);
    DensityOperator sigma = DensityOperator::from_pure(mu);
    for (double k : {0.056, 0.27, 1.0}) {
        ChannelSpec spec;
        spec.k = k;
        DensityOperator tau = gaussian_channel_apply(sigma, spec);
        double f = std::real(
            (mu.amplitudes().adjoint() * tau.matrix() * mu.amplitudes())(0, 0));
        double dev = std::abs(f - 1.0 / (1.0 + k));
        c.require(dev <= 1e-4, "K=" + fmt(k) + " |F - 1/(1+K)| " + fmt(dev));
    }
    return {8, "coherent fidelity", c.ok, c.detail.str()};
}

CriterionResult criterion_monte_carlo() {
    Check c;
    const int d = 25;
    const std::uint64_t seed = 20260826;
    FockSpace rspace({d, d});
    StateVector resource = twin_state_vector(1.0, rspace);
    DensityOperator sigma =
        DensityOperator::from_pure(vacuum_state(FockSpace({d})));
    DensityOperator exact = teleported_state_quadrature(resource, sigma).tau;

    double prev = 2.0;
    double last = 0.0;
    bool decreasing = true;
    for (long n : {1000L, 10000L, 100000L}) {
        DensityOperator est = teleported_state_sampled(resource, sigma, seed, n);
        last = state_metrics(exact, est).trace_distance;
        if (last >= prev) decreasing = false;
        c.require(true, "n=" + fmt(double(n)) + " td " + fmt(last));
        prev = last;
    }
    c.require(decreasing, "monotone decrease");
    c.require(last <= 5e-3, "final td " + fmt(last));
    return {9, "Monte Carlo convergence", c.ok, c.detail.str()};
}

CriterionResult criterion_pulse_factorization() {
    Check c;
    CarlParams p = resonant_params(0.1);
    FockSpace space({20, 20});
    for (double alpha : {0.3, 0.7, 1.0}) {
        PulseSetting setting = inverse_pulse_for(alpha, p);
        DisplacementPulse pulse =
            displacement_pulse(p, setting.gamma, setting.tau_pulse, space);
        c.require(std::abs(pulse.alpha_applied - alpha) <= 1e-12,
                  "alpha=" + fmt(alpha) + " applied dev " +
                      fmt(std::abs(pulse.alpha_applied - alpha)));
        c.require(pulse.factorization_deviation <= 1e-8,
                  "alpha=" + fmt(alpha) + " factorization dev " +
                      fmt(pulse.factorization_deviation));
    }
    return {10, "pulse factorization", c.ok, c.detail.str()};
}

CriterionResult criterion_readout_signatures() {
    Check c;
    const int d = 30;
    FockSpace space({d});
    ChannelSpec spec;
    spec.k = 0.05;

    DensityOperator sq =
        DensityOperator::from_pure(squeezed_vacuum(space, 0, 0.5));
    DensityOperator tau_sq = gaussian_channel_apply(sq, spec);
    DiagonalReport rep = diagonal_fidelity_report(sq, tau_sq);
    c.require(rep.odd_weight <= 0.02, "squeezed odd weight " + fmt(rep.odd_weight));
    CountHistogram hist = atom_count_statistics(tau_sq, 100000, 20260826);
    long odd = 0;
    for (std::size_t n = 1; n < hist.counts.size(); n += 2) odd += hist.counts[n];
    double frac = double(odd) / double(hist.shots);
    c.require(frac <= 0.02, "squeezed empirical odd fraction " + fmt(frac));

    DensityOperator f2 =
        DensityOperator::from_pure(basis_state(space, std::vector<int>{2}));
    DensityOperator tau_f2 = gaussian_channel_apply(f2, spec);
    DiagonalReport rep2 = diagonal_fidelity_report(f2, tau_f2);
    c.require(rep2.count_variance < 0.25,
              "fock2 count variance " + fmt(rep2.count_variance));
    return {11, "readout signatures", c.ok, c.detail.str()};
}

CriterionResult criterion_classical() {
    Check c;
    CarlParams p;
    p.g = 0.1;
    p.n_atoms = 100.0;
    p.omega_r = 1.0;
    p.delta = 0.5;

    ClassicalAtomState init;
    const int n = 100;
    init.theta.resize(n);
    init.p.assign(n, 0.0);
    for (int j = 0; j < n; ++j)
        init.theta[j] = 2.0 * std::numbers::pi * j / n + 0.3 * std::sin(1.0 + j);
    init.field = Complex(0.2, 0.1);

    auto samples = classical_carl_simulate(p, init, 1.0, 0.001, 10);
    double h0 = samples.front().hamiltonian;
    double p0 = samples.front().momentum_invariant;
    double hdev = 0.0, pdev = 0.0;
    for (const auto& s : samples) {
        hdev = std::max(hdev, std::abs(s.hamiltonian - h0));
        pdev = std::max(pdev, std::abs(s.momentum_invariant - p0));
    }
    double hscale = std::max(1.0, std::abs(h0));
    double pscale = std::max(1.0, std::abs(p0));
    c.require(hdev <= 1e-8 * hscale, "H drift " + fmt(hdev));
    c.require(pdev <= 1e-8 * pscale, "P_cl drift " + fmt(pdev));
    return {12, "classical cross-check", c.ok, c.detail.str()};
}

std::string read_bytes(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

CriterionResult criterion_determinism(const std::string& scratch_dir) {
    Check c;
    const std::string config_text = R"({
        "params": {"g": 1.0, "n_atoms": 1.0, "omega_r": 5.0, "delta": 5.0},
        "window_fraction": 0.1,
        "input_state": {"kind": "vacuum"},
        "dims": [16, 6, 16],
        "sigma_dim": 20,
        "grid": {"radial": 24, "angular": 16},
        "shots": 5000,
        "sample_count": 500,
        "time_samples": 20,
        "seed": 7
    })";

    std::vector<std::string> files;
    for (const char* sub : {"a", "b"}) {
        ScenarioConfig cfg = ScenarioConfig::parse_string(config_text);
        cfg.out_dir = scratch_dir + "/" + sub;
        run_dynamics(cfg);
        run_teleport(cfg);
        run_readout(cfg);
    }
    for (const char* name :
         {"dynamics.csv", "dynamics_summary.json", "outcomes.csv",
          "teleport_report.json", "histogram.csv", "readout_report.json"}) {
        std::string a = read_bytes(scratch_dir + "/a/" + name);
        std::string b = read_bytes(scratch_dir + "/b/" + name);
        c.require(!a.empty() && a == b, std::string(name) + " identical");
    }
    return {13, "determinism", c.ok, c.detail.str()};
}

CriterionResult guarded(int id, const std::string& name,
                        const std::function<CriterionResult()>& fn) {
    try {
        return fn();
    } catch (const std::exception& e) {
        return {id, name, false, std::string("exception: ") + e.what()};
    }
}

}  // namespace

std::vector<CriterionResult> run_acceptance_suite(
    const std::string& scratch_dir,
    const std::function<void(const CriterionResult&)>& on_result) {
    std::filesystem::create_directories(scratch_dir);
    std::vector<CriterionResult> out;
    auto run = [&](int id, const std::string& name,
                   const std::function<CriterionResult()>& fn) {
        out.push_back(guarded(id, name, fn));
        if (on_result) on_result(out.back());
    };
    run(1, "conservation", criterion_conservation);
    run(2, "engine equivalence", criterion_engine_equivalence);
    run(3, "asymptotics", criterion_asymptotics);
    run(4, "interaction window", criterion_window);
    run(5, "closed-form state", criterion_state_form);
    run(6, "channel theorem", criterion_channel_theorem);
    run(7, "POVM completeness", criterion_povm_completeness);
    run(8, "coherent fidelity", criterion_coherent_fidelity);
    run(9, "Monte Carlo convergence", criterion_monte_carlo);
    run(10, "pulse factorization", criterion_pulse_factorization);
    run(11, "readout signatures", criterion_readout_signatures);
    run(12, "classical cross-check", criterion_classical);
    run(13, "determinism", [&] { return criterion_determinism(scratch_dir); });
    return out;
}

}  // namespace carlsim
