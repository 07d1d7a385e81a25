#include "echo_target.h"

EchoTarget::EchoTarget(sc_core::sc_module_name name)
    : sc_core::sc_module(name), target_socket("target_socket") {
    target_socket.register_b_transport(this, &EchoTarget::b_transport);
}

void EchoTarget::b_transport(tlm::tlm_generic_payload& trans, sc_core::sc_time& delay) {
    payload* p = reinterpret_cast<payload*>(trans.get_data_ptr());
    // Echo semantics: the result is the value received.
    p->data_out = p->data_in;
    delay += sc_core::sc_time(10, sc_core::SC_NS);
    trans.set_response_status(tlm::TLM_OK_RESPONSE);
}
