use std::fmt::Write;

use super::{source_type_name, WrapperPlan, INITIATOR_HEADER};

/// Renders `top.h`: owns the initiator and the unmodified target, binds their
/// sockets, and exposes `set_and_send` / `retrieve_result` to the wrapper.
pub fn render_top(plan: &WrapperPlan) -> String {
    let target = &plan.target_module_name;
    let mut out = String::new();
    writeln!(out, "// Generated by tlm2fmu for model '{}'. Do not edit.", plan.model_name).unwrap();
    out.push_str("#ifndef TLM2FMU_TOP_H\n#define TLM2FMU_TOP_H\n\n");
    out.push_str("#include <systemc>\n\n");
    writeln!(out, "#include \"{INITIATOR_HEADER}\"").unwrap();
    if plan.target_include != plan.payload_include {
        writeln!(out, "#include \"{}\"", WrapperPlan::include_name(&plan.target_include)).unwrap();
    }
    out.push('\n');

    out.push_str("class Top : public sc_core::sc_module {\npublic:\n");
    out.push_str("    Initiator* init;\n");
    writeln!(out, "    {target}* root_;\n").unwrap();
    out.push_str("    explicit Top(sc_core::sc_module_name name) : sc_core::sc_module(name) {\n");
    out.push_str("        init = new Initiator(\"initiator\");\n");
    writeln!(out, "        root_ = new {target}(\"target\");").unwrap();
    writeln!(out, "        init->initiator_socket.bind(root_->{});", plan.socket_name).unwrap();
    out.push_str("    }\n\n");

    let params: Vec<String> =
        plan.inputs().map(|f| format!("{} {}", source_type_name(&f.source_type), f.name)).collect();
    writeln!(out, "    void set_and_send({}) {{", params.join(", ")).unwrap();
    for f in plan.inputs() {
        writeln!(out, "        init->{0}_to_send = {0};", f.name).unwrap();
    }
    out.push_str("        init->send_data();\n    }\n\n");

    let params: Vec<String> =
        plan.outputs().map(|f| format!("{}& {}", source_type_name(&f.source_type), f.name)).collect();
    writeln!(out, "    void retrieve_result({}) {{", params.join(", ")).unwrap();
    for f in plan.outputs() {
        writeln!(out, "        {0} = init->{0}_received;", f.name).unwrap();
    }
    out.push_str("    }\n};\n\n");
    out.push_str("#endif // TLM2FMU_TOP_H\n");
    out
}

#[cfg(test)]
mod tests {
    use super::super::test_support::*;
    use super::*;

    #[test]
    fn echo_top() {
        let text = render_top(&echo_plan());
        assert!(text.contains("void set_and_send(sc_dt::sc_int<32> data_in) {"));
        assert!(text.contains("void retrieve_result(sc_dt::sc_int<32>& data_out) {"));
        assert!(text.contains("init->initiator_socket.bind(root_->target_socket);"));
        assert!(text.contains("root_ = new EchoTarget(\"target\");"));
        assert!(!text.contains("#include \"echo.h\""));
    }
}
