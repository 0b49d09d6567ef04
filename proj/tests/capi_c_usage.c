/* Compiled as C to keep pitsim.h usable from C callers. */
#include "pitsim/pitsim.h"

int capi_c_preset_iterations(const char* variant, size_t* iterations, double* cost) {
    pitsim_config* config = NULL;
    pitsim_result* result = NULL;
    pitsim_ledger ledger;
    pitsim_status status = pitsim_config_preset("buck", &config);
    if (status != PITSIM_OK) return (int)status;
    status = pitsim_config_set_variant(config, variant);
    if (status == PITSIM_OK) status = pitsim_run(config, 0, &result);
    if (status == PITSIM_OK) status = pitsim_result_ledger(result, &ledger);
    if (status == PITSIM_OK) {
        *iterations = pitsim_result_iterations(result);
        *cost = ledger.cost_units;
    }
    pitsim_result_free(result);
    pitsim_config_free(config);
    return (int)status;
}
