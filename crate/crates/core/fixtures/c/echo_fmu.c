/* Minimal FMI 3.0 co-simulation library with the echo interface:
 * Int32 input vr 1 is copied to Int32 output vr 2 on every doStep.
 *
 * -DOMIT_DOSTEP          leave out fmi3DoStep
 * -DEARLY_PERCENT=<n>    the first doStep returns early after n% of the step
 */
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#if defined(_WIN32)
#define EXPORT __declspec(dllexport)
#else
#define EXPORT __attribute__((visibility("default")))
#endif

typedef void* fmi3Instance;
typedef int fmi3Status;
enum { fmi3OK = 0, fmi3Warning = 1, fmi3Discard = 2, fmi3Error = 3 };

typedef struct {
    int32_t data_in;
    int32_t data_out;
    double time;
    int steps;
} echo_fmu;

EXPORT const char* fmi3GetVersion(void) { return "3.0"; }

EXPORT fmi3Instance fmi3InstantiateCoSimulation(const char* name, const char* token, const char* resources,
                                                bool visible, bool logging, bool event_mode, bool early_return,
                                                const uint32_t* required, size_t n_required, void* env,
                                                void* log_message, void* intermediate_update) {
    (void)name; (void)token; (void)resources; (void)visible; (void)logging; (void)event_mode;
    (void)early_return; (void)required; (void)n_required; (void)env; (void)log_message;
    (void)intermediate_update;
    return calloc(1, sizeof(echo_fmu));
}

EXPORT fmi3Status fmi3EnterInitializationMode(fmi3Instance inst, bool tol_defined, double tol, double start,
                                              bool stop_defined, double stop) {
    (void)tol_defined; (void)tol; (void)stop_defined; (void)stop;
    ((echo_fmu*)inst)->time = start;
    return fmi3OK;
}

EXPORT fmi3Status fmi3ExitInitializationMode(fmi3Instance inst) {
    (void)inst;
    return fmi3OK;
}

EXPORT fmi3Status fmi3SetInt32(fmi3Instance inst, const uint32_t vr[], size_t nvr, const int32_t values[],
                               size_t n_values) {
    echo_fmu* fmu = inst;
    (void)n_values;
    for (size_t i = 0; i < nvr; ++i) {
        if (vr[i] != 1) return fmi3Error;
        fmu->data_in = values[i];
    }
    return fmi3OK;
}

EXPORT fmi3Status fmi3GetInt32(fmi3Instance inst, const uint32_t vr[], size_t nvr, int32_t values[],
                               size_t n_values) {
    echo_fmu* fmu = inst;
    (void)n_values;
    for (size_t i = 0; i < nvr; ++i) {
        if (vr[i] == 1) values[i] = fmu->data_in;
        else if (vr[i] == 2) values[i] = fmu->data_out;
        else return fmi3Error;
    }
    return fmi3OK;
}

#ifndef OMIT_DOSTEP
EXPORT fmi3Status fmi3DoStep(fmi3Instance inst, double current, double step, bool no_prior_state,
                             bool* event_needed, bool* terminate, bool* early_return, double* last_successful) {
    echo_fmu* fmu = inst;
    (void)no_prior_state;
    *event_needed = false;
    *terminate = false;
    *early_return = false;
    fmu->data_out = fmu->data_in;
#ifdef EARLY_PERCENT
    if (fmu->steps++ == 0) {
        *early_return = true;
        *last_successful = step * EARLY_PERCENT / 100.0;
        fmu->time = current + *last_successful;
        return fmi3OK;
    }
#endif
    fmu->time = current + step;
    *last_successful = step;
    return fmi3OK;
}
#endif

EXPORT fmi3Status fmi3Terminate(fmi3Instance inst) {
    (void)inst;
    return fmi3OK;
}

EXPORT void fmi3FreeInstance(fmi3Instance inst) { free(inst); }
