#include "carlsim/scenario.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "carlsim/readout.hpp"
#include "carlsim/report.hpp"
#include "carlsim/verify.hpp"

namespace carlsim {

using nlohmann::json;

namespace {

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const std::string& context) {
    if (!obj.is_object()) throw ConfigError(context + ": expected an object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) {
                ok = true;
                break;
            }
        if (!ok) throw ConfigError(context + ": unknown key '" + it.key() + "'");
    }
}

double require_number(const json& obj, const char* key, const std::string& ctx) {
    if (!obj.contains(key)) throw ConfigError(ctx + ": missing key '" + key + "'");
    if (!obj[key].is_number()) throw ConfigError(ctx + ": '" + key + "' must be a number");
    return obj[key].get<double>();
}

Eigen::Vector3d parse_vec3(const json& v, const std::string& ctx) {
    if (!v.is_array() || v.size() != 3)
        throw ConfigError(ctx + ": expected a 3-vector");
    return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
}

CarlParams parse_model_params(const json& obj) {
    check_keys(obj, {"g", "n_atoms", "omega_r", "delta"}, "params");
    CarlParams p;
    p.g = require_number(obj, "g", "params");
    p.n_atoms = require_number(obj, "n_atoms", "params");
    p.omega_r = require_number(obj, "omega_r", "params");
    p.delta = require_number(obj, "delta", "params");
    return p;
}

PhysicalParams parse_physical_params(const json& obj) {
    check_keys(obj,
               {"rabi", "detuning20", "pump_frequency", "dipole", "volume", "mass",
                "k1", "k2", "condensate_size", "wavelength", "n_atoms"},
               "physical_params");
    PhysicalParams p;
    p.rabi = require_number(obj, "rabi", "physical_params");
    p.detuning20 = require_number(obj, "detuning20", "physical_params");
    p.pump_frequency = require_number(obj, "pump_frequency", "physical_params");
    p.dipole = require_number(obj, "dipole", "physical_params");
    p.volume = require_number(obj, "volume", "physical_params");
    p.mass = require_number(obj, "mass", "physical_params");
    p.k1 = parse_vec3(obj.value("k1", json::array()), "physical_params.k1");
    p.k2 = parse_vec3(obj.value("k2", json::array()), "physical_params.k2");
    p.condensate_size = require_number(obj, "condensate_size", "physical_params");
    p.wavelength = require_number(obj, "wavelength", "physical_params");
    p.n_atoms = require_number(obj, "n_atoms", "physical_params");
    return p;
}

InputStateSpec parse_input_state(const json& obj) {
    check_keys(obj, {"kind", "amplitude", "r", "n"}, "input_state");
    if (!obj.contains("kind")) throw ConfigError("input_state: missing 'kind'");
    std::string kind = obj["kind"].get<std::string>();
    InputStateSpec spec;
    if (kind == "vacuum") {
        spec.kind = InputStateSpec::Kind::Vacuum;
        if (obj.size() != 1) throw ConfigError("input_state: vacuum takes no fields");
    } else if (kind == "coherent") {
        spec.kind = InputStateSpec::Kind::Coherent;
        if (!obj.contains("amplitude") || !obj["amplitude"].is_array() ||
            obj["amplitude"].size() != 2)
            throw ConfigError("input_state: coherent needs amplitude [re, im]");
        spec.amplitude = {obj["amplitude"][0].get<double>(),
                          obj["amplitude"][1].get<double>()};
    } else if (kind == "squeezed") {
        spec.kind = InputStateSpec::Kind::Squeezed;
        spec.r = require_number(obj, "r", "input_state");
    } else if (kind == "fock") {
        spec.kind = InputStateSpec::Kind::Fock;
        if (!obj.contains("n") || !obj["n"].is_number_integer())
            throw ConfigError("input_state: fock needs integer 'n'");
        spec.n = obj["n"].get<int>();
        if (spec.n < 0) throw ConfigError("input_state: fock n must be >= 0");
    } else {
        throw ConfigError("input_state: unknown kind '" + kind + "'");
    }
    return spec;
}

}  // namespace

StateVector InputStateSpec::build_pure(int dim) const {
    FockSpace space({dim});
    switch (kind) {
        case Kind::Vacuum:
            return vacuum_state(space);
        case Kind::Coherent:
            return coherent_state(space, 0, amplitude);
        case Kind::Squeezed:
            return squeezed_vacuum(space, 0, r);
        case Kind::Fock: {
            if (n >= dim) throw ConfigError("input_state: fock n exceeds dimension");
            int occ[1] = {n};
            return basis_state(space, occ);
        }
    }
    throw std::logic_error("unreachable");
}

DensityOperator InputStateSpec::build(int dim) const {
    return DensityOperator::from_pure(build_pure(dim));
}

std::string InputStateSpec::describe() const {
    std::ostringstream os;
    switch (kind) {
        case Kind::Vacuum:
            return "vacuum";
        case Kind::Coherent:
            os << "coherent(" << amplitude.real() << (amplitude.imag() < 0 ? "" : "+")
               << amplitude.imag() << "i)";
            return os.str();
        case Kind::Squeezed:
            os << "squeezed(r=" << r << ")";
            return os.str();
        case Kind::Fock:
            os << "fock(" << n << ")";
            return os.str();
    }
    return "?";
}

ScenarioConfig ScenarioConfig::parse_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_string(ss.str());
}

ScenarioConfig ScenarioConfig::parse_string(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    check_keys(root,
               {"params", "physical_params", "time", "window_fraction",
                "input_state", "dims", "sigma_dim", "grid", "shots",
                "sample_count", "time_samples", "seed", "out_dir"},
               "config");

    ScenarioConfig cfg;
    const bool has_model = root.contains("params");
    const bool has_phys = root.contains("physical_params");
    if (has_model == has_phys)
        throw ConfigError("config: exactly one of 'params' or 'physical_params' required");
    if (has_model) cfg.params = parse_model_params(root["params"]);
    if (has_phys) cfg.physical = parse_physical_params(root["physical_params"]);

    const bool has_time = root.contains("time");
    const bool has_frac = root.contains("window_fraction");
    if (has_time == has_frac)
        throw ConfigError("config: exactly one of 'time' or 'window_fraction' required");
    cfg.time = has_time ? require_number(root, "time", "config")
                        : require_number(root, "window_fraction", "config");
    cfg.time_is_window_fraction = has_frac;
    if (cfg.time < 0.0) throw ConfigError("config: time must be >= 0");

    if (!root.contains("input_state"))
        throw ConfigError("config: missing 'input_state'");
    cfg.input_state = parse_input_state(root["input_state"]);

    if (root.contains("dims")) {
        cfg.dims = root["dims"].get<std::vector<int>>();
        if (cfg.dims.size() != 3) throw ConfigError("config: dims must have 3 entries");
    }
    if (root.contains("sigma_dim")) cfg.sigma_dim = root["sigma_dim"].get<int>();
    for (int d : cfg.dims)
        if (d < 4) throw ConfigError("config: dims entries must be >= 4");
    if (cfg.sigma_dim < 4) throw ConfigError("config: sigma_dim must be >= 4");

    if (root.contains("grid")) {
        check_keys(root["grid"], {"radial", "angular", "radius"}, "grid");
        cfg.grid.radial = root["grid"].value("radial", cfg.grid.radial);
        cfg.grid.angular = root["grid"].value("angular", cfg.grid.angular);
        cfg.grid.radius = root["grid"].value("radius", cfg.grid.radius);
    }
    if (root.contains("shots")) cfg.shots = root["shots"].get<long>();
    if (root.contains("sample_count")) cfg.sample_count = root["sample_count"].get<long>();
    if (root.contains("time_samples")) cfg.time_samples = root["time_samples"].get<int>();
    if (cfg.shots < 1 || cfg.sample_count < 1 || cfg.time_samples < 1)
        throw ConfigError("config: shots, sample_count, time_samples must be >= 1");

    if (!root.contains("seed"))
        throw ConfigError("config: 'seed' is required (no wall-clock seeding)");
    cfg.seed = root["seed"].get<std::uint64_t>();
    if (root.contains("out_dir")) cfg.out_dir = root["out_dir"].get<std::string>();
    return cfg;
}

CarlParams ScenarioConfig::model_params() const {
    if (!physical) return params;
    return physical_to_model(*physical).params;
}

double ScenarioConfig::resolve_time(const CarlParams& p) const {
    if (!time_is_window_fraction) return time;
    return time * interaction_window(p).t_upper;
}

namespace {

void ensure_out_dir(const std::string& dir) {
    std::filesystem::create_directories(dir);
}

json params_to_json(const CarlParams& p) {
    return {{"g", p.g},
            {"n_atoms", p.n_atoms},
            {"omega_r", p.omega_r},
            {"delta", p.delta},
            {"delta_plus", p.delta_plus()},
            {"delta_minus", p.delta_minus()},
            {"g_sqrt_n", p.g_sqrt_n()}};
}

}  // namespace

void run_dynamics(const ScenarioConfig& config) {
    CarlParams p = config.model_params();
    p.validate();
    InteractionWindow window = interaction_window(p);  // empty window is an error
    const double t_final = config.resolve_time(p);

    QuadraticHamiltonian h = build_three_mode_hamiltonian(p);
    FockSpace space(config.dims);
    FockPropagator prop(h, space);

    ensure_out_dir(config.out_dir);
    std::ostringstream csv;
    csv << "t,n1,n2,n3,c_expect,leakage,n1_analytic,n2_analytic,n3_analytic,"
           "window_lower_scale,window_upper\n";

    StateVector psi = vacuum_state(space);
    double t_prev = 0.0;
    double max_gaussian_dev = 0.0;
    double final_leakage = 0.0;
    for (int i = 0; i <= config.time_samples; ++i) {
        double t = t_final * i / config.time_samples;
        if (i > 0) psi = prop.evolve(t - t_prev, psi);
        t_prev = t;
        auto pops = psi.mode_populations();
        auto analytic = analytic_populations(p, t);
        final_leakage = psi.leakage();

        auto gpops = mode_populations(
            evolve_gaussian(h, t, GaussianState::vacuum(3)));
        for (int m = 0; m < 3; ++m)
            max_gaussian_dev = std::max(max_gaussian_dev, std::abs(pops[m] - gpops[m]));

        csv << format_full(t) << ',' << format_full(pops[0]) << ','
            << format_full(pops[1]) << ',' << format_full(pops[2]) << ','
            << format_full(constant_of_motion(psi)) << ','
            << format_full(final_leakage) << ',' << format_full(analytic.n1) << ','
            << format_full(analytic.n2) << ',' << format_full(analytic.n3) << ','
            << format_full(window.t_lower_scale) << ','
            << format_full(window.t_upper) << '\n';
    }
    write_text_file(config.out_dir + "/dynamics.csv", csv.str());

    json summary = {{"schema_version", 1},
                    {"kind", "dynamics"},
                    {"params", params_to_json(p)},
                    {"time", t_final},
                    {"time_samples", config.time_samples},
                    {"dims", config.dims},
                    {"window",
                     {{"t_lower_scale", window.t_lower_scale},
                      {"t_upper", window.t_upper}}},
                    {"max_gaussian_population_deviation", max_gaussian_dev},
                    {"final_leakage", final_leakage},
                    {"seed", config.seed}};
    write_text_file(config.out_dir + "/dynamics_summary.json", summary.dump(2) + "\n");
}

void run_teleport(const ScenarioConfig& config) {
    CarlParams p = config.model_params();
    p.validate();
    const double t = config.resolve_time(p);

    QuadraticHamiltonian h = build_three_mode_hamiltonian(p);
    auto gpops = mode_populations(evolve_gaussian(h, t, GaussianState::vacuum(3)));
    // Twin-beam resource: |psi13> with |beta|^2 = N3/(1+N1), the N2-dropped
    // limit of the entangled state.
    double beta_sq = gpops[2] / (1.0 + gpops[0]);
    if (beta_sq >= 1.0)
        throw TruncationError("run_teleport: resource beyond twin-beam regime", beta_sq);
    double n_twin = beta_sq / (1.0 - beta_sq);

    const int d = config.sigma_dim;
    FockSpace resource_space({d, d});
    StateVector resource = twin_state_vector(n_twin, resource_space);
    auto rpops = resource.mode_populations();
    ChannelSpec spec = channel_parameter(rpops[0], rpops[1], t);

    DensityOperator sigma = config.input_state.build(d);
    StateVector sigma_pure = config.input_state.build_pure(d);

    TeleportedState quad = teleported_state_quadrature(resource, sigma, config.grid);
    DensityOperator chan = gaussian_channel_apply(sigma, spec);
    StateMetrics quad_metrics = state_metrics(sigma, quad.tau);
    StateMetrics consistency = state_metrics(quad.tau, chan);
    double overlap = std::real(
        (sigma_pure.amplitudes().adjoint() * quad.tau.matrix() *
         sigma_pure.amplitudes())(0, 0));

    auto outcomes = sample_bell_outcome(resource, sigma, config.seed,
                                        config.sample_count, config.grid);
    std::ostringstream csv;
    csv << "alpha_re,alpha_im,weight\n";
    for (const auto& o : outcomes)
        csv << format_full(o.alpha.real()) << ',' << format_full(o.alpha.imag())
            << ',' << format_full(o.weight) << '\n';

    ensure_out_dir(config.out_dir);
    write_text_file(config.out_dir + "/outcomes.csv", csv.str());

    json report = {
        {"schema_version", 1},
        {"kind", "teleport"},
        {"params", params_to_json(p)},
        {"time", t},
        {"sigma", config.input_state.describe()},
        {"sigma_dim", d},
        {"grid",
         {{"radial", config.grid.radial},
          {"angular", config.grid.angular},
          {"radius", quad.grid_radius}}},
        {"n1", rpops[0]},
        {"n3", rpops[1]},
        {"n2_dropped", gpops[1]},
        {"dynamics_populations", {gpops[0], gpops[1], gpops[2]}},
        {"k", spec.k},
        {"fidelity_uhlmann", quad_metrics.fidelity},
        {"input_overlap", overlap},
        {"trace_distance_to_input", quad_metrics.trace_distance},
        {"channel_consistency_trace_distance", consistency.trace_distance},
        {"quadrature_defect", quad.quadrature_defect},
        {"sample_count", config.sample_count},
        {"seed", config.seed}};
    write_text_file(config.out_dir + "/teleport_report.json", report.dump(2) + "\n");
}

void run_readout(const ScenarioConfig& config) {
    CarlParams p = config.model_params();
    p.validate();
    const double t = config.resolve_time(p);

    QuadraticHamiltonian h = build_three_mode_hamiltonian(p);
    auto gpops = mode_populations(evolve_gaussian(h, t, GaussianState::vacuum(3)));
    double beta_sq = gpops[2] / (1.0 + gpops[0]);
    if (beta_sq >= 1.0)
        throw TruncationError("run_readout: resource beyond twin-beam regime", beta_sq);
    double n_twin = beta_sq / (1.0 - beta_sq);
    ChannelSpec spec = channel_parameter(n_twin, n_twin, t);

    const int d = config.sigma_dim;
    DensityOperator sigma = config.input_state.build(d);
    DensityOperator tau = gaussian_channel_apply(sigma, spec);
    DiagonalReport rep = diagonal_fidelity_report(sigma, tau);
    CountHistogram hist = atom_count_statistics(tau, config.shots, config.seed);

    long odd = 0;
    for (std::size_t n = 1; n < hist.counts.size(); n += 2) odd += hist.counts[n];
    double odd_fraction = double(odd) / double(hist.shots);

    ensure_out_dir(config.out_dir);
    std::ostringstream csv;
    csv << "n,count\n";
    for (std::size_t n = 0; n < hist.counts.size(); ++n)
        csv << n << ',' << hist.counts[n] << '\n';
    write_text_file(config.out_dir + "/histogram.csv", csv.str());

    json report = {
        {"schema_version", 1},
        {"kind", "readout"},
        {"params", params_to_json(p)},
        {"time", t},
        {"sigma", config.input_state.describe()},
        {"sigma_dim", d},
        {"k", spec.k},
        {"shots", config.shots},
        {"seed", config.seed},
        {"experimentally_accessible",
         {{"diagonal_tv_distance", rep.diagonal_tv},
          {"odd_weight", rep.odd_weight},
          {"odd_fraction_empirical", odd_fraction},
          {"count_variance", rep.count_variance}}},
        {"simulation_only",
         {{"fidelity", rep.fidelity}, {"trace_distance", rep.trace_distance}}}};
    write_text_file(config.out_dir + "/readout_report.json", report.dump(2) + "\n");
}

int run_verify_all(const ScenarioConfig& config) {
    ensure_out_dir(config.out_dir);
    auto results = run_acceptance_suite(config.out_dir + "/verify_scratch");

    std::ostringstream txt;
    json jres = json::array();
    int failures = 0;
    for (const auto& r : results) {
        txt << (r.passed ? "PASS" : "FAIL") << "  criterion " << r.id << ": "
            << r.name << ": " << r.detail << '\n';
        jres.push_back({{"id", r.id},
                        {"name", r.name},
                        {"passed", r.passed},
                        {"detail", r.detail}});
        if (!r.passed) ++failures;
    }
    json report = {{"schema_version", 1},
                   {"kind", "verify"},
                   {"failures", failures},
                   {"criteria", jres}};
    write_text_file(config.out_dir + "/verify_report.json", report.dump(2) + "\n");
    write_text_file(config.out_dir + "/verify_report.txt", txt.str());
    return failures;
}

}  // namespace carlsim
