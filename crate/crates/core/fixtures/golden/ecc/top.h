// Generated by tlm2fmu for model 'ecc'. Do not edit.
#ifndef TLM2FMU_TOP_H
#define TLM2FMU_TOP_H

#include <systemc>

#include "initiator.h"

class Top : public sc_core::sc_module {
public:
    Initiator* init;
    EccUnit* root_;

    explicit Top(sc_core::sc_module_name name) : sc_core::sc_module(name) {
        init = new Initiator("initiator");
        root_ = new EccUnit("target");
        init->initiator_socket.bind(root_->target_socket);
    }

    void set_and_send(sc_dt::sc_logic enable, sc_dt::sc_logic word_mode, sc_dt::sc_logic parity_in, sc_dt::sc_logic clear, sc_dt::sc_bv<16> data_in) {
        init->enable_to_send = enable;
        init->word_mode_to_send = word_mode;
        init->parity_in_to_send = parity_in;
        init->clear_to_send = clear;
        init->data_in_to_send = data_in;
        init->send_data();
    }

    void retrieve_result(sc_dt::sc_logic& parity_out, sc_dt::sc_logic& error, sc_dt::sc_logic& error_latched, sc_dt::sc_bv<16>& data_out, sc_dt::sc_bv<8>& status) {
        parity_out = init->parity_out_received;
        error = init->error_received;
        error_latched = init->error_latched_received;
        data_out = init->data_out_received;
        status = init->status_received;
    }
};

#endif // TLM2FMU_TOP_H
