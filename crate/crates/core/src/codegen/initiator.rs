use std::fmt::Write;

use super::{source_type_name, Transport, WrapperPlan};

/// Renders `initiator.h`: an initiator module that stages input values,
/// sends one transaction per `send_data()` and keeps the returned outputs.
pub fn render_initiator(plan: &WrapperPlan) -> String {
    let record = &plan.spec.record_name;
    let mut out = String::new();
    writeln!(out, "// Generated by tlm2fmu for model '{}'. Do not edit.", plan.model_name).unwrap();
    out.push_str("#ifndef TLM2FMU_INITIATOR_H\n#define TLM2FMU_INITIATOR_H\n\n");
    out.push_str("#include <systemc>\n#include <tlm>\n\n");
    writeln!(out, "#include \"{}\"\n", WrapperPlan::include_name(&plan.payload_include)).unwrap();

    out.push_str("class Initiator : public sc_core::sc_module, public tlm::tlm_bw_transport_if<> {\n");
    out.push_str("public:\n");
    out.push_str("    tlm::tlm_initiator_socket<> initiator_socket;\n\n");
    for f in plan.inputs() {
        writeln!(out, "    {} {}_to_send;", source_type_name(&f.source_type), f.name).unwrap();
    }
    for f in plan.outputs() {
        writeln!(out, "    {} {}_received;", source_type_name(&f.source_type), f.name).unwrap();
    }
    out.push('\n');
    out.push_str("    SC_HAS_PROCESS(Initiator);\n");
    out.push_str("    explicit Initiator(sc_core::sc_module_name name)\n");
    out.push_str("        : sc_core::sc_module(name), initiator_socket(\"initiator_socket\") {\n");
    out.push_str("        initiator_socket.bind(*this);\n");
    out.push_str("        SC_THREAD(sending_thread);\n");
    out.push_str("    }\n\n");
    out.push_str("    void send_data() {\n");
    out.push_str("        start_sending.notify(sc_core::SC_ZERO_TIME);\n");
    out.push_str("    }\n\n");

    out.push_str(
        "    tlm::tlm_sync_enum nb_transport_bw(tlm::tlm_generic_payload& trans, tlm::tlm_phase& phase,\n\
         \x20                                      sc_core::sc_time& delay) override {\n",
    );
    match plan.transport {
        Transport::Blocking => {
            out.push_str("        (void)trans;\n        (void)phase;\n        (void)delay;\n");
            out.push_str("        return tlm::TLM_COMPLETED;\n");
        }
        Transport::Nonblocking => {
            out.push_str("        (void)trans;\n");
            out.push_str("        if (phase == tlm::BEGIN_RESP) {\n");
            out.push_str("            response_done.notify(delay);\n");
            out.push_str("            phase = tlm::END_RESP;\n");
            out.push_str("            return tlm::TLM_COMPLETED;\n");
            out.push_str("        }\n");
            out.push_str("        return tlm::TLM_ACCEPTED;\n");
        }
    }
    out.push_str("    }\n\n");
    out.push_str("    void invalidate_direct_mem_ptr(sc_dt::uint64, sc_dt::uint64) override {}\n\n");

    out.push_str("private:\n");
    out.push_str("    sc_core::sc_event start_sending;\n");
    if plan.transport == Transport::Nonblocking {
        out.push_str("    sc_core::sc_event response_done;\n");
    }
    writeln!(out, "    {record} data;\n").unwrap();

    out.push_str("    void sending_thread() {\n");
    out.push_str("        tlm::tlm_generic_payload trans;\n");
    out.push_str("        for (;;) {\n");
    out.push_str("            wait(start_sending);\n");
    for f in plan.inputs() {
        writeln!(out, "            data.{0} = {0}_to_send;", f.name).unwrap();
    }
    out.push_str("            trans.set_command(tlm::TLM_WRITE_COMMAND);\n");
    out.push_str("            trans.set_address(0);\n");
    out.push_str("            trans.set_data_ptr(reinterpret_cast<unsigned char*>(&data));\n");
    out.push_str("            trans.set_data_length(sizeof(data));\n");
    out.push_str("            trans.set_streaming_width(sizeof(data));\n");
    out.push_str("            trans.set_response_status(tlm::TLM_INCOMPLETE_RESPONSE);\n");
    out.push_str("            sc_core::sc_time delay = sc_core::SC_ZERO_TIME;\n");
    match plan.transport {
        Transport::Blocking => {
            out.push_str("            initiator_socket->b_transport(trans, delay);\n");
        }
        Transport::Nonblocking => {
            out.push_str("            tlm::tlm_phase phase = tlm::BEGIN_REQ;\n");
            out.push_str("            tlm::tlm_sync_enum status = initiator_socket->nb_transport_fw(trans, phase, delay);\n");
            out.push_str("            if (status == tlm::TLM_ACCEPTED || (status == tlm::TLM_UPDATED && phase != tlm::BEGIN_RESP)) {\n");
            out.push_str("                wait(response_done);\n");
            out.push_str("            }\n");
        }
    }
    out.push_str("            wait(delay);\n");
    for f in plan.outputs() {
        writeln!(out, "            {0}_received = data.{0};", f.name).unwrap();
    }
    out.push_str("        }\n");
    out.push_str("    }\n");
    out.push_str("};\n\n");
    out.push_str("#endif // TLM2FMU_INITIATOR_H\n");
    out
}

#[cfg(test)]
mod tests {
    use super::super::test_support::*;
    use super::super::BuildFlavor;
    use super::*;

    #[test]
    fn blocking_initiator() {
        let text = render_initiator(&echo_plan());
        assert!(text.contains("tlm::tlm_initiator_socket<> initiator_socket;"));
        assert!(text.contains("start_sending.notify(sc_core::SC_ZERO_TIME);"));
        assert!(text.contains("initiator_socket->b_transport(trans, delay);"));
        assert!(text.contains("sc_dt::sc_int<32> data_in_to_send;"));
        assert!(text.contains("sc_dt::sc_int<32> data_out_received;"));
        assert!(text.contains("#include \"echo.h\""));
        assert!(text.contains("payload data;"));
        assert!(!text.contains("nb_transport_fw"));
    }

    #[test]
    fn nonblocking_initiator() {
        let src = "struct s { bool a; bool b; };\nSC_MODULE(T) {\n tlm_utils::simple_target_socket<T> sock;\n\
                   tlm::tlm_sync_enum nb_transport_fw(tlm::tlm_generic_payload& t, tlm::tlm_phase& ph, sc_core::sc_time& d) {\n\
                   s* p = (s*) t.get_data_ptr(); p->b = p->a; return tlm::TLM_COMPLETED; }\n};\n";
        let plan = plan_for(&[("t.cpp", src)], BuildFlavor::Cmake);
        let text = render_initiator(&plan);
        assert!(text.contains("initiator_socket->nb_transport_fw(trans, phase, delay)"));
        assert!(text.contains("wait(response_done);"));
        assert!(!text.contains("->b_transport("));
    }
}
