#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "carlsim/carl.hpp"
#include "carlsim/teleport.hpp"

namespace carlsim {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct InputStateSpec {
    enum class Kind { Vacuum, Coherent, Squeezed, Fock };
    Kind kind = Kind::Vacuum;
    Complex amplitude{};  // coherent
    double r = 0.0;       // squeezed
    int n = 0;            // fock

    DensityOperator build(int dim) const;
    StateVector build_pure(int dim) const;
    std::string describe() const;
};

/// One scenario per invocation. Parsed from a strict JSON config: unknown
/// keys are errors, the seed is mandatory (no wall-clock seeding).
struct ScenarioConfig {
    CarlParams params;
    std::optional<PhysicalParams> physical;
    double time = 0.0;
    bool time_is_window_fraction = false;
    InputStateSpec input_state;
    std::vector<int> dims{16, 8, 16};  // three-mode Fock dims for dynamics
    int sigma_dim = 30;                // single-mode dim for teleport/readout
    GridSpec grid;
    long shots = 100000;
    long sample_count = 10000;
    int time_samples = 50;
    std::uint64_t seed = 0;
    std::string out_dir = ".";

    static ScenarioConfig parse_file(const std::string& path);
    static ScenarioConfig parse_string(const std::string& json_text);

    /// Effective model parameters (after physical conversion, if given).
    CarlParams model_params() const;
    /// Absolute interaction time (resolves window fractions).
    double resolve_time(const CarlParams& p) const;
};

void run_dynamics(const ScenarioConfig& config);
void run_teleport(const ScenarioConfig& config);
void run_readout(const ScenarioConfig& config);

/// Runs the acceptance suite, writes verify_report.json and verify_report.txt
/// under out_dir; returns the number of failed criteria.
int run_verify_all(const ScenarioConfig& config);

}  // namespace carlsim
