#include "carlsim/capi.h"

#include <string>

#include "carlsim/carl.hpp"
#include "carlsim/scenario.hpp"

using namespace carlsim;

struct carl_config {
    ScenarioConfig cfg;
};

namespace {

thread_local std::string g_last_error;

int record_error(const std::exception& e, int code) {
    g_last_error = e.what();
    return code;
}

template <typename Fn>
int wrap(Fn&& fn) {
    try {
        fn();
        g_last_error.clear();
        return CARL_OK;
    } catch (const ConfigError& e) {
        return record_error(e, CARL_ERR_CONFIG);
    } catch (const std::invalid_argument& e) {
        return record_error(e, CARL_ERR_CONFIG);
    } catch (const TruncationError& e) {
        return record_error(e, CARL_ERR_TRUNCATION);
    } catch (const EmptyWindowError& e) {
        return record_error(e, CARL_ERR_EMPTY_WINDOW);
    } catch (const std::exception& e) {
        return record_error(e, CARL_ERR_INTERNAL);
    }
}

carl_config_t* parse_with(const char* text,
                          ScenarioConfig (*parse)(const std::string&)) {
    if (!text) {
        g_last_error = "null argument";
        return nullptr;
    }
    carl_config_t* out = nullptr;
    int rc = wrap([&] { out = new carl_config{parse(text)}; });
    return rc == CARL_OK ? out : nullptr;
}

}  // namespace

extern "C" {

carl_config_t* carl_config_parse_file(const char* path) {
    return parse_with(path, &ScenarioConfig::parse_file);
}

carl_config_t* carl_config_parse_string(const char* json_text) {
    return parse_with(json_text, &ScenarioConfig::parse_string);
}

void carl_config_free(carl_config_t* config) { delete config; }

int carl_config_set_seed(carl_config_t* config, uint64_t seed) {
    if (!config) {
        g_last_error = "null config";
        return CARL_ERR_CONFIG;
    }
    config->cfg.seed = seed;
    return CARL_OK;
}

int carl_config_set_dims(carl_config_t* config, int d1, int d2, int d3) {
    if (!config || d1 < 4 || d2 < 4 || d3 < 4) {
        g_last_error = "dims entries must be >= 4";
        return CARL_ERR_CONFIG;
    }
    config->cfg.dims = {d1, d2, d3};
    return CARL_OK;
}

int carl_config_set_out_dir(carl_config_t* config, const char* dir) {
    if (!config || !dir || !*dir) {
        g_last_error = "null or empty out_dir";
        return CARL_ERR_CONFIG;
    }
    config->cfg.out_dir = dir;
    return CARL_OK;
}

const char* carl_config_get_out_dir(const carl_config_t* config) {
    return config ? config->cfg.out_dir.c_str() : "";
}

int carl_run_dynamics(const carl_config_t* config) {
    if (!config) {
        g_last_error = "null config";
        return CARL_ERR_CONFIG;
    }
    return wrap([&] { run_dynamics(config->cfg); });
}

int carl_run_teleport(const carl_config_t* config) {
    if (!config) {
        g_last_error = "null config";
        return CARL_ERR_CONFIG;
    }
    return wrap([&] { run_teleport(config->cfg); });
}

int carl_run_readout(const carl_config_t* config) {
    if (!config) {
        g_last_error = "null config";
        return CARL_ERR_CONFIG;
    }
    return wrap([&] { run_readout(config->cfg); });
}

int carl_run_verify_all(const carl_config_t* config, int* failures) {
    if (!config || !failures) {
        g_last_error = "null argument";
        return CARL_ERR_CONFIG;
    }
    return wrap([&] { *failures = run_verify_all(config->cfg); });
}

const char* carl_last_error(void) { return g_last_error.c_str(); }

const char* carl_version(void) { return "0.1.0"; }

}  // extern "C"
