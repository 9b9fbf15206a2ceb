#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "carlsim/capi.h"

namespace {

struct Options {
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::vector<int> dims;
};

int fail(int rc) {
    std::cerr << "error: " << carl_last_error() << "\n";
    return rc;
}

int apply_overrides(carl_config_t* cfg, const Options& opt) {
    if (!opt.out_dir.empty()) {
        int rc = carl_config_set_out_dir(cfg, opt.out_dir.c_str());
        if (rc != CARL_OK) return rc;
    }
    if (opt.seed_set) {
        int rc = carl_config_set_seed(cfg, opt.seed);
        if (rc != CARL_OK) return rc;
    }
    if (!opt.dims.empty()) {
        if (opt.dims.size() != 3) return CARL_ERR_CONFIG;
        int rc = carl_config_set_dims(cfg, opt.dims[0], opt.dims[1], opt.dims[2]);
        if (rc != CARL_OK) return rc;
    }
    return CARL_OK;
}

void add_common(CLI::App* cmd, Options& opt) {
    cmd->add_option("--config", opt.config_path, "scenario config file")
        ->required();
    cmd->add_option("--out", opt.out_dir, "output directory override");
    cmd->add_option("--seed", opt.seed, "seed override")
        ->each([&](const std::string&) { opt.seed_set = true; });
    cmd->add_option("--dims", opt.dims, "Fock dims override (a,b,c)")
        ->delimiter(',')
        ->expected(3);
}

int run(const Options& opt, int (*op)(const carl_config_t*)) {
    carl_config_t* cfg = carl_config_parse_file(opt.config_path.c_str());
    if (!cfg) return fail(CARL_ERR_CONFIG);
    int rc = apply_overrides(cfg, opt);
    if (rc == CARL_OK) rc = op(cfg);
    carl_config_free(cfg);
    return rc == CARL_OK ? 0 : fail(rc);
}

int run_verify(const Options& opt) {
    carl_config_t* cfg = carl_config_parse_file(opt.config_path.c_str());
    if (!cfg) return fail(CARL_ERR_CONFIG);
    int rc = apply_overrides(cfg, opt);
    int failures = 0;
    std::string out_dir;
    if (rc == CARL_OK) {
        out_dir = carl_config_get_out_dir(cfg);
        rc = carl_run_verify_all(cfg, &failures);
    }
    carl_config_free(cfg);
    if (rc != CARL_OK) return fail(rc);

    std::string report_path = out_dir + "/verify_report.txt";
    std::ifstream report(report_path);
    if (report) std::cout << report.rdbuf();
    std::cout << (failures == 0 ? "all criteria passed"
                                : std::to_string(failures) + " criteria failed")
              << "\n";
    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"CARL teleportation simulator"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(carl_version()));

    Options opt;
    CLI::App* dynamics = app.add_subcommand("dynamics", "three-mode dynamics run");
    CLI::App* teleport = app.add_subcommand("teleport", "teleportation channel run");
    CLI::App* readout = app.add_subcommand("readout", "atom-counting readout run");
    CLI::App* verify = app.add_subcommand("verify-all", "full acceptance suite");
    for (CLI::App* cmd : {dynamics, teleport, readout, verify})
        add_common(cmd, opt);

    CLI11_PARSE(app, argc, argv);

    if (dynamics->parsed()) return run(opt, &carl_run_dynamics);
    if (teleport->parsed()) return run(opt, &carl_run_teleport);
    if (readout->parsed()) return run(opt, &carl_run_readout);
    return run_verify(opt);
}
