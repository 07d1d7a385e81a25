// Minimal TLM target that copies data_in into data_out.
#ifndef ECHO_TARGET_H
#define ECHO_TARGET_H

#include <systemc>
#include <tlm>
#include <tlm_utils/simple_target_socket.h>

struct payload {
    sc_dt::sc_int<32> data_in;
    sc_dt::sc_int<32> data_out;
};

class EchoTarget : public sc_core::sc_module {
public:
    tlm_utils::simple_target_socket<EchoTarget> target_socket;

    SC_HAS_PROCESS(EchoTarget);
    explicit EchoTarget(sc_core::sc_module_name name);

private:
    void b_transport(tlm::tlm_generic_payload& trans, sc_core::sc_time& delay);
};

#endif // ECHO_TARGET_H
