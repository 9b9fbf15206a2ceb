#ifndef CARLSIM_CAPI_H
#define CARLSIM_CAPI_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

/* Error codes double as process exit codes for the CLI. */
enum {
    CARL_OK = 0,
    CARL_ERR_INTERNAL = 1,
    CARL_ERR_CONFIG = 2,
    CARL_ERR_TRUNCATION = 3,
    CARL_ERR_EMPTY_WINDOW = 4
};

typedef struct carl_config carl_config_t;

/* Parse a scenario config; returns NULL on error (see carl_last_error). */
carl_config_t* carl_config_parse_file(const char* path);
carl_config_t* carl_config_parse_string(const char* json_text);
void carl_config_free(carl_config_t* config);

int carl_config_set_seed(carl_config_t* config, uint64_t seed);
int carl_config_set_dims(carl_config_t* config, int d1, int d2, int d3);
int carl_config_set_out_dir(carl_config_t* config, const char* dir);
/* Valid until the config is freed or the out_dir is changed. */
const char* carl_config_get_out_dir(const carl_config_t* config);

int carl_run_dynamics(const carl_config_t* config);
int carl_run_teleport(const carl_config_t* config);
int carl_run_readout(const carl_config_t* config);
/* Returns CARL_OK with *failures set; nonzero only on execution errors. */
int carl_run_verify_all(const carl_config_t* config, int* failures);

/* Message from the last failing call on this thread; empty string if none. */
const char* carl_last_error(void);
const char* carl_version(void);

#ifdef __cplusplus
}
#endif

#endif /* CARLSIM_CAPI_H */
