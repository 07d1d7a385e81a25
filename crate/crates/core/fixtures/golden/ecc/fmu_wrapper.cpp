// Generated by tlm2fmu for model 'ecc'. Do not edit.
#include <cstdint>
#include <cstring>
#include <new>

#include <systemc>

#include "fmi3Functions.h"
#include "top.h"

static const char* const INSTANTIATION_TOKEN = "{5f28d0aa-cedf-fb5a-c517-616e75e4de01}";

template <int W>
static sc_dt::sc_bv<W> bytes_to_bv(const fmi3Byte* bytes) {
    sc_dt::sc_bv<W> v;
    for (int i = 0; i < W; ++i) {
        v[i] = ((bytes[i / 8] >> (i % 8)) & 1) ? sc_dt::SC_LOGIC_1 : sc_dt::SC_LOGIC_0;
    }
    return v;
}

template <int W>
static void bv_to_bytes(const sc_dt::sc_bv<W>& v, fmi3Byte* bytes) {
    std::memset(bytes, 0, (W + 7) / 8);
    for (int i = 0; i < W; ++i) {
        if (v[i] == sc_dt::SC_LOGIC_1) {
            bytes[i / 8] |= static_cast<fmi3Byte>(1u << (i % 8));
        }
    }
}

struct WRAPPER_STRUCT {
    Top* top;
    sc_core::sc_time current_time;
    fmi3Boolean fmi_enable;
    fmi3Boolean fmi_word_mode;
    fmi3Boolean fmi_parity_in;
    fmi3Boolean fmi_clear;
    fmi3Byte fmi_data_in[2];
    fmi3Boolean fmi_parity_out;
    fmi3Boolean fmi_error;
    fmi3Boolean fmi_error_latched;
    fmi3Byte fmi_data_out[2];
    fmi3Byte fmi_status[1];
};

extern "C" {

const char* fmi3GetVersion(void) {
    return fmi3Version;
}

fmi3Instance fmi3InstantiateCoSimulation(fmi3String instanceName, fmi3String instantiationToken,
                                         fmi3String resourcePath, fmi3Boolean visible, fmi3Boolean loggingOn,
                                         fmi3Boolean eventModeUsed, fmi3Boolean earlyReturnAllowed,
                                         const fmi3ValueReference requiredIntermediateVariables[],
                                         size_t nRequiredIntermediateVariables,
                                         fmi3InstanceEnvironment instanceEnvironment,
                                         fmi3LogMessageCallback logMessage,
                                         fmi3IntermediateUpdateCallback intermediateUpdate) {
    (void)instanceName; (void)resourcePath; (void)visible; (void)loggingOn; (void)eventModeUsed;
    (void)earlyReturnAllowed; (void)requiredIntermediateVariables; (void)nRequiredIntermediateVariables;
    (void)instanceEnvironment; (void)logMessage; (void)intermediateUpdate;
    if (instantiationToken == nullptr || std::strcmp(instantiationToken, INSTANTIATION_TOKEN) != 0) {
        return nullptr;
    }
    WRAPPER_STRUCT* fmu = new (std::nothrow) WRAPPER_STRUCT();
    if (fmu == nullptr) {
        return nullptr;
    }
    fmu->top = new Top("top");
    fmu->current_time = sc_core::SC_ZERO_TIME;
    fmu->fmi_enable = fmi3False;
    fmu->fmi_word_mode = fmi3False;
    fmu->fmi_parity_in = fmi3False;
    fmu->fmi_clear = fmi3False;
    fmu->fmi_data_in[0] = 0x00;
    fmu->fmi_data_in[1] = 0x00;
    sc_core::sc_start(sc_core::SC_ZERO_TIME);
    return fmu;
}

fmi3Status fmi3EnterInitializationMode(fmi3Instance instance, fmi3Boolean toleranceDefined,
                                       fmi3Float64 tolerance, fmi3Float64 startTime,
                                       fmi3Boolean stopTimeDefined, fmi3Float64 stopTime) {
    (void)toleranceDefined; (void)tolerance; (void)stopTimeDefined; (void)stopTime;
    WRAPPER_STRUCT* fmu = static_cast<WRAPPER_STRUCT*>(instance);
    fmu->current_time = sc_core::sc_time(startTime, sc_core::SC_SEC);
    return fmi3OK;
}

fmi3Status fmi3ExitInitializationMode(fmi3Instance instance) {
    (void)instance;
    return fmi3OK;
}

fmi3Status fmi3GetBinary(fmi3Instance instance, const fmi3ValueReference valueReferences[],
                         size_t nValueReferences, size_t valueSizes[], fmi3Binary values[], size_t nValues) {
    WRAPPER_STRUCT* fmu = static_cast<WRAPPER_STRUCT*>(instance);
    if (nValues != nValueReferences) {
        return fmi3Error;
    }
    for (size_t i = 0; i < nValueReferences; ++i) {
        switch (valueReferences[i]) {
        case 5: valueSizes[i] = 2; values[i] = fmu->fmi_data_in; break;
        case 9: valueSizes[i] = 2; values[i] = fmu->fmi_data_out; break;
        case 10: valueSizes[i] = 1; values[i] = fmu->fmi_status; break;
        default: return fmi3Error;
        }
    }
    return fmi3OK;
}

fmi3Status fmi3SetBinary(fmi3Instance instance, const fmi3ValueReference valueReferences[],
                         size_t nValueReferences, const size_t valueSizes[], const fmi3Binary values[], size_t nValues) {
    WRAPPER_STRUCT* fmu = static_cast<WRAPPER_STRUCT*>(instance);
    if (nValues != nValueReferences) {
        return fmi3Error;
    }
    for (size_t i = 0; i < nValueReferences; ++i) {
        switch (valueReferences[i]) {
        case 5: if (valueSizes[i] > 2) { return fmi3Error; } std::memset(fmu->fmi_data_in, 0, 2); std::memcpy(fmu->fmi_data_in, values[i], valueSizes[i]); break;
        default: return fmi3Error;
        }
    }
    return fmi3OK;
}

fmi3Status fmi3GetBoolean(fmi3Instance instance, const fmi3ValueReference valueReferences[],
                          size_t nValueReferences, fmi3Boolean values[], size_t nValues) {
    WRAPPER_STRUCT* fmu = static_cast<WRAPPER_STRUCT*>(instance);
    if (nValues != nValueReferences) {
        return fmi3Error;
    }
    for (size_t i = 0; i < nValueReferences; ++i) {
        switch (valueReferences[i]) {
        case 1: values[i] = fmu->fmi_enable; break;
        case 2: values[i] = fmu->fmi_word_mode; break;
        case 3: values[i] = fmu->fmi_parity_in; break;
        case 4: values[i] = fmu->fmi_clear; break;
        case 6: values[i] = fmu->fmi_parity_out; break;
        case 7: values[i] = fmu->fmi_error; break;
        case 8: values[i] = fmu->fmi_error_latched; break;
        default: return fmi3Error;
        }
    }
    return fmi3OK;
}

fmi3Status fmi3SetBoolean(fmi3Instance instance, const fmi3ValueReference valueReferences[],
                          size_t nValueReferences, const fmi3Boolean values[], size_t nValues) {
    WRAPPER_STRUCT* fmu = static_cast<WRAPPER_STRUCT*>(instance);
    if (nValues != nValueReferences) {
        return fmi3Error;
    }
    for (size_t i = 0; i < nValueReferences; ++i) {
        switch (valueReferences[i]) {
        case 1: fmu->fmi_enable = values[i]; break;
        case 2: fmu->fmi_word_mode = values[i]; break;
        case 3: fmu->fmi_parity_in = values[i]; break;
        case 4: fmu->fmi_clear = values[i]; break;
        default: return fmi3Error;
        }
    }
    return fmi3OK;
}

fmi3Status fmi3DoStep(fmi3Instance instance, fmi3Float64 currentCommunicationPoint,
                      fmi3Float64 communicationStepSize, fmi3Boolean noSetFMUStatePriorToCurrentPoint,
                      fmi3Boolean* eventHandlingNeeded, fmi3Boolean* terminateSimulation,
                      fmi3Boolean* earlyReturn, fmi3Float64* lastSuccessfulTime) {
    (void)currentCommunicationPoint;
    (void)noSetFMUStatePriorToCurrentPoint;
    WRAPPER_STRUCT* fmu = static_cast<WRAPPER_STRUCT*>(instance);
    sc_core::sc_time step_size(communicationStepSize, sc_core::SC_SEC);
    const sc_core::sc_time step_end = fmu->current_time + step_size;

    fmu->top->set_and_send(sc_dt::sc_logic(fmu->fmi_enable != fmi3False), sc_dt::sc_logic(fmu->fmi_word_mode != fmi3False), sc_dt::sc_logic(fmu->fmi_parity_in != fmi3False), sc_dt::sc_logic(fmu->fmi_clear != fmi3False), bytes_to_bv<16>(fmu->fmi_data_in));
    sc_core::sc_start(step_size);

    sc_dt::sc_logic parity_out;
    sc_dt::sc_logic error;
    sc_dt::sc_logic error_latched;
    sc_dt::sc_bv<16> data_out;
    sc_dt::sc_bv<8> status;
    fmu->top->retrieve_result(parity_out, error, error_latched, data_out, status);
    fmu->fmi_parity_out = (parity_out == sc_dt::SC_LOGIC_1) ? fmi3True : fmi3False;
    fmu->fmi_error = (error == sc_dt::SC_LOGIC_1) ? fmi3True : fmi3False;
    fmu->fmi_error_latched = (error_latched == sc_dt::SC_LOGIC_1) ? fmi3True : fmi3False;
    bv_to_bytes<16>(data_out, fmu->fmi_data_out);
    bv_to_bytes<8>(status, fmu->fmi_status);

    *eventHandlingNeeded = fmi3False;
    *terminateSimulation = fmi3False;
    *earlyReturn = (sc_core::sc_time_stamp() < step_end) ? fmi3True : fmi3False;
    if (*earlyReturn) {
        *lastSuccessfulTime = (sc_core::sc_time_stamp() - fmu->current_time).to_seconds();
    }

    sc_core::sc_time next_time;
    if (!(*earlyReturn)) {
        next_time = fmu->current_time + step_size;
    } else {
        next_time = fmu->current_time + sc_core::sc_time(*lastSuccessfulTime, sc_core::SC_SEC);
    }
    fmu->current_time = next_time;
    return fmi3OK;
}

fmi3Status fmi3Terminate(fmi3Instance instance) {
    (void)instance;
    return fmi3OK;
}

void fmi3FreeInstance(fmi3Instance instance) {
    WRAPPER_STRUCT* fmu = static_cast<WRAPPER_STRUCT*>(instance);
    if (fmu == nullptr) {
        return;
    }
    delete fmu->top;
    delete fmu;
}

} // extern "C"
