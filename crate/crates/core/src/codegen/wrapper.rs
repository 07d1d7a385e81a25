use std::fmt::Write;

use super::{c_int_type, source_type_name, WrapperPlan, TOP_HEADER};
use crate::fmi_map::{Causality, FmiType, FmiVariable, Value};
use crate::tlm_scan::{PayloadField, SourceType};

const BV_HELPERS: &str = r#"template <int W>
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

"#;

fn member(field: &PayloadField) -> String {
    format!("fmi_{}", field.name)
}

/// Expression converting the wrapper member into the field's SystemC type.
fn to_source(field: &PayloadField, ty: FmiType) -> String {
    let m = format!("fmu->{}", member(field));
    match &field.source_type {
        SourceType::ScInt(_) | SourceType::ScUint(_) => format!("static_cast<{}>({m})", c_int_type(ty)),
        SourceType::ScBv(w) => format!("bytes_to_bv<{w}>({m})"),
        SourceType::ScLogic => format!("sc_dt::sc_logic({m} != fmi3False)"),
        SourceType::Bool => format!("({m} != fmi3False)"),
        SourceType::Float { .. } => format!("static_cast<float>({m})"),
        SourceType::Double { .. } => format!("static_cast<double>({m})"),
        SourceType::Enum(name) => format!("static_cast<{name}>({m})"),
        SourceType::Other(t) => format!("static_cast<{t}>({m})"),
    }
}

/// Statement storing a retrieved SystemC value into the wrapper member.
fn from_source(field: &PayloadField, ty: FmiType) -> String {
    let m = format!("fmu->{}", member(field));
    let local = &field.name;
    match &field.source_type {
        SourceType::ScBv(w) => format!("bv_to_bytes<{w}>({local}, {m});"),
        SourceType::ScLogic => format!("{m} = ({local} == sc_dt::SC_LOGIC_1) ? fmi3True : fmi3False;"),
        SourceType::Bool => format!("{m} = {local} ? fmi3True : fmi3False;"),
        _ => format!("{m} = static_cast<{}>({local});", ty.c_type()),
    }
}

fn start_statements(var: &FmiVariable) -> Vec<String> {
    let Some(value) = var.start_value() else { return Vec::new() };
    let m = format!("fmu->{}", var.name);
    match value {
        Value::Bool(b) => vec![format!("{m} = {};", if b { "fmi3True" } else { "fmi3False" })],
        Value::Binary(bytes) => {
            bytes.iter().enumerate().map(|(i, b)| format!("{m}[{i}] = 0x{b:02x};")).collect()
        }
        Value::Int64(i64::MIN) => vec![format!("{m} = INT64_MIN;")],
        Value::Int64(v) => vec![format!("{m} = {v}LL;")],
        Value::UInt64(v) => vec![format!("{m} = {v}ULL;")],
        Value::UInt32(v) => vec![format!("{m} = {v}u;")],
        Value::Int32(i32::MIN) => vec![format!("{m} = INT32_MIN;")],
        Value::Float32(v) => vec![format!("{m} = {:?}f;", v)],
        Value::Float64(v) => vec![format!("{m} = {:?};", v)],
        other => vec![format!("{m} = {other};")],
    }
}

fn accessor(out: &mut String, plan: &WrapperPlan, tag: &str, setter: bool) {
    let vars: Vec<&FmiVariable> =
        plan.md.variables.iter().filter(|v| v.fmi_type.element_name() == tag).collect();
    let binary = tag == "Binary";
    let c_type = vars[0].fmi_type.c_type();
    let (verb, sig) = match (setter, binary) {
        (true, true) => ("Set", "const size_t valueSizes[], const fmi3Binary values[], size_t nValues".to_string()),
        (false, true) => ("Get", "size_t valueSizes[], fmi3Binary values[], size_t nValues".to_string()),
        (true, false) => ("Set", format!("const {c_type} values[], size_t nValues")),
        (false, false) => ("Get", format!("{c_type} values[], size_t nValues")),
    };
    let head = format!("fmi3Status fmi3{verb}{tag}(");
    let pad = " ".repeat(head.len());
    writeln!(out, "{head}fmi3Instance instance, const fmi3ValueReference valueReferences[],").unwrap();
    writeln!(out, "{pad}size_t nValueReferences, {sig}) {{").unwrap();
    out.push_str("    WRAPPER_STRUCT* fmu = static_cast<WRAPPER_STRUCT*>(instance);\n");
    out.push_str("    if (nValues != nValueReferences) {\n        return fmi3Error;\n    }\n");
    out.push_str("    for (size_t i = 0; i < nValueReferences; ++i) {\n");
    out.push_str("        switch (valueReferences[i]) {\n");
    for v in vars {
        let size = v.fmi_type.binary_size_bytes().unwrap_or(0);
        let line = match (setter, binary) {
            (true, _) if v.causality != Causality::Input => continue,
            (true, true) => format!(
                "if (valueSizes[i] > {size}) {{ return fmi3Error; }} std::memset(fmu->{0}, 0, {size}); \
                 std::memcpy(fmu->{0}, values[i], valueSizes[i]);",
                v.name
            ),
            (true, false) => format!("fmu->{} = values[i];", v.name),
            (false, true) => format!("valueSizes[i] = {size}; values[i] = fmu->{};", v.name),
            (false, false) => format!("values[i] = fmu->{};", v.name),
        };
        writeln!(out, "        case {}: {line} break;", v.value_reference).unwrap();
    }
    out.push_str("        default: return fmi3Error;\n");
    out.push_str("        }\n    }\n    return fmi3OK;\n}\n\n");
}

/// Renders `fmu_wrapper.cpp`: the wrapper record and the FMI 3.0 functions.
pub fn render_wrapper(plan: &WrapperPlan) -> String {
    let md = &plan.md;
    let uses_binary = md.variables.iter().any(|v| v.fmi_type.binary_size_bytes().is_some());
    let mut out = String::new();
    writeln!(out, "// Generated by tlm2fmu for model '{}'. Do not edit.", plan.model_name).unwrap();
    out.push_str("#include <cstdint>\n#include <cstring>\n#include <new>\n\n#include <systemc>\n\n");
    out.push_str("#include \"fmi3Functions.h\"\n");
    writeln!(out, "#include \"{TOP_HEADER}\"\n").unwrap();
    writeln!(out, "static const char* const INSTANTIATION_TOKEN = \"{}\";\n", md.instantiation_token).unwrap();
    if uses_binary {
        out.push_str(BV_HELPERS);
    }

    out.push_str("struct WRAPPER_STRUCT {\n");
    out.push_str("    Top* top;\n");
    out.push_str("    sc_core::sc_time current_time;\n");
    for v in &md.variables {
        match v.fmi_type.binary_size_bytes() {
            Some(n) => writeln!(out, "    fmi3Byte {}[{n}];", v.name).unwrap(),
            None => writeln!(out, "    {} {};", v.fmi_type.c_type(), v.name).unwrap(),
        }
    }
    out.push_str("};\n\n");

    out.push_str("extern \"C\" {\n\n");
    out.push_str("const char* fmi3GetVersion(void) {\n    return fmi3Version;\n}\n\n");

    out.push_str(
        "fmi3Instance fmi3InstantiateCoSimulation(fmi3String instanceName, fmi3String instantiationToken,\n\
         \x20                                        fmi3String resourcePath, fmi3Boolean visible, fmi3Boolean loggingOn,\n\
         \x20                                        fmi3Boolean eventModeUsed, fmi3Boolean earlyReturnAllowed,\n\
         \x20                                        const fmi3ValueReference requiredIntermediateVariables[],\n\
         \x20                                        size_t nRequiredIntermediateVariables,\n\
         \x20                                        fmi3InstanceEnvironment instanceEnvironment,\n\
         \x20                                        fmi3LogMessageCallback logMessage,\n\
         \x20                                        fmi3IntermediateUpdateCallback intermediateUpdate) {\n",
    );
    out.push_str(
        "    (void)instanceName; (void)resourcePath; (void)visible; (void)loggingOn; (void)eventModeUsed;\n\
         \x20   (void)earlyReturnAllowed; (void)requiredIntermediateVariables; (void)nRequiredIntermediateVariables;\n\
         \x20   (void)instanceEnvironment; (void)logMessage; (void)intermediateUpdate;\n",
    );
    out.push_str("    if (instantiationToken == nullptr || std::strcmp(instantiationToken, INSTANTIATION_TOKEN) != 0) {\n");
    out.push_str("        return nullptr;\n    }\n");
    out.push_str("    WRAPPER_STRUCT* fmu = new (std::nothrow) WRAPPER_STRUCT();\n");
    out.push_str("    if (fmu == nullptr) {\n        return nullptr;\n    }\n");
    out.push_str("    fmu->top = new Top(\"top\");\n");
    out.push_str("    fmu->current_time = sc_core::SC_ZERO_TIME;\n");
    for v in md.inputs() {
        for stmt in start_statements(v) {
            writeln!(out, "    {stmt}").unwrap();
        }
    }
    out.push_str("    sc_core::sc_start(sc_core::SC_ZERO_TIME);\n");
    out.push_str("    return fmu;\n}\n\n");

    out.push_str(
        "fmi3Status fmi3EnterInitializationMode(fmi3Instance instance, fmi3Boolean toleranceDefined,\n\
         \x20                                      fmi3Float64 tolerance, fmi3Float64 startTime,\n\
         \x20                                      fmi3Boolean stopTimeDefined, fmi3Float64 stopTime) {\n\
         \x20   (void)toleranceDefined; (void)tolerance; (void)stopTimeDefined; (void)stopTime;\n\
         \x20   WRAPPER_STRUCT* fmu = static_cast<WRAPPER_STRUCT*>(instance);\n\
         \x20   fmu->current_time = sc_core::sc_time(startTime, sc_core::SC_SEC);\n\
         \x20   return fmi3OK;\n}\n\n",
    );
    out.push_str("fmi3Status fmi3ExitInitializationMode(fmi3Instance instance) {\n    (void)instance;\n    return fmi3OK;\n}\n\n");

    for tag in md.types_used() {
        accessor(&mut out, plan, tag, false);
        accessor(&mut out, plan, tag, true);
    }

    out.push_str(
        "fmi3Status fmi3DoStep(fmi3Instance instance, fmi3Float64 currentCommunicationPoint,\n\
         \x20                     fmi3Float64 communicationStepSize, fmi3Boolean noSetFMUStatePriorToCurrentPoint,\n\
         \x20                     fmi3Boolean* eventHandlingNeeded, fmi3Boolean* terminateSimulation,\n\
         \x20                     fmi3Boolean* earlyReturn, fmi3Float64* lastSuccessfulTime) {\n",
    );
    out.push_str("    (void)currentCommunicationPoint;\n    (void)noSetFMUStatePriorToCurrentPoint;\n");
    out.push_str("    WRAPPER_STRUCT* fmu = static_cast<WRAPPER_STRUCT*>(instance);\n");
    out.push_str("    sc_core::sc_time step_size(communicationStepSize, sc_core::SC_SEC);\n");
    out.push_str("    const sc_core::sc_time step_end = fmu->current_time + step_size;\n\n");
    let args: Vec<String> = plan.inputs().map(|f| to_source(f, plan.fmi_type_of(f))).collect();
    writeln!(out, "    fmu->top->set_and_send({});", args.join(", ")).unwrap();
    out.push_str("    sc_core::sc_start(step_size);\n\n");
    for f in plan.outputs() {
        writeln!(out, "    {} {};", source_type_name(&f.source_type), f.name).unwrap();
    }
    let outs: Vec<&str> = plan.outputs().map(|f| f.name.as_str()).collect();
    writeln!(out, "    fmu->top->retrieve_result({});", outs.join(", ")).unwrap();
    for f in plan.outputs() {
        writeln!(out, "    {}", from_source(f, plan.fmi_type_of(f))).unwrap();
    }
    out.push('\n');
    out.push_str("    *eventHandlingNeeded = fmi3False;\n    *terminateSimulation = fmi3False;\n");
    out.push_str("    *earlyReturn = (sc_core::sc_time_stamp() < step_end) ? fmi3True : fmi3False;\n");
    out.push_str("    if (*earlyReturn) {\n");
    out.push_str("        *lastSuccessfulTime = (sc_core::sc_time_stamp() - fmu->current_time).to_seconds();\n");
    out.push_str("    }\n\n");
    out.push_str("    sc_core::sc_time next_time;\n");
    out.push_str("    if (!(*earlyReturn)) {\n");
    out.push_str("        next_time = fmu->current_time + step_size;\n");
    out.push_str("    } else {\n");
    out.push_str("        next_time = fmu->current_time + sc_core::sc_time(*lastSuccessfulTime, sc_core::SC_SEC);\n");
    out.push_str("    }\n");
    out.push_str("    fmu->current_time = next_time;\n");
    out.push_str("    return fmi3OK;\n}\n\n");

    out.push_str("fmi3Status fmi3Terminate(fmi3Instance instance) {\n    (void)instance;\n    return fmi3OK;\n}\n\n");
    out.push_str("void fmi3FreeInstance(fmi3Instance instance) {\n");
    out.push_str("    WRAPPER_STRUCT* fmu = static_cast<WRAPPER_STRUCT*>(instance);\n");
    out.push_str("    if (fmu == nullptr) {\n        return;\n    }\n");
    out.push_str("    delete fmu->top;\n    delete fmu;\n}\n\n");
    out.push_str("} // extern \"C\"\n");
    out
}

#[cfg(test)]
mod tests {
    use super::super::test_support::*;
    use super::*;

    fn section<'a>(text: &'a str, start: &str) -> &'a str {
        let from = text.find(start).unwrap();
        let end = text[from..].find("\n}\n").unwrap();
        &text[from..from + end]
    }

    #[test]
    fn do_step_order_and_single_kernel_advance() {
        let text = render_wrapper(&echo_plan());
        let body = section(&text, "fmi3Status fmi3DoStep(");
        let send = body.find("fmu->top->set_and_send(static_cast<int32_t>(fmu->fmi_data_in));").unwrap();
        let start = body.find("sc_core::sc_start(step_size);").unwrap();
        let retrieve = body.find("fmu->top->retrieve_result(data_out);").unwrap();
        let update = body.find("fmu->current_time = next_time;").unwrap();
        assert!(send < start && start < retrieve && retrieve < update);
        assert_eq!(body.matches("sc_start(").count(), 1);
        assert!(body.contains("next_time = fmu->current_time + sc_core::sc_time(*lastSuccessfulTime, sc_core::SC_SEC);"));
    }

    #[test]
    fn instantiate_starts_kernel_at_zero_time() {
        let text = render_wrapper(&echo_plan());
        let body = section(&text, "fmi3Instance fmi3InstantiateCoSimulation(");
        assert!(body.contains("fmu->top = new Top(\"top\");"));
        assert!(body.contains("fmu->fmi_data_in = 0;"));
        assert!(body.contains("sc_core::sc_start(sc_core::SC_ZERO_TIME);"));
    }

    #[test]
    fn accessors_only_for_used_types() {
        let text = render_wrapper(&echo_plan());
        assert!(text.contains("fmi3Status fmi3GetInt32("));
        assert!(text.contains("fmi3Status fmi3SetInt32("));
        assert!(!text.contains("fmi3GetFloat64"));
        assert!(!text.contains("bytes_to_bv"));
        let setter = section(&text, "fmi3Status fmi3SetInt32(");
        assert!(setter.contains("case 1: fmu->fmi_data_in = values[i];"));
        assert!(!setter.contains("fmi_data_out"));
    }
}
