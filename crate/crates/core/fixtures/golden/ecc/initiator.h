// Generated by tlm2fmu for model 'ecc'. Do not edit.
#ifndef TLM2FMU_INITIATOR_H
#define TLM2FMU_INITIATOR_H

#include <systemc>
#include <tlm>

#include "ecc_unit.h"

class Initiator : public sc_core::sc_module, public tlm::tlm_bw_transport_if<> {
public:
    tlm::tlm_initiator_socket<> initiator_socket;

    sc_dt::sc_logic enable_to_send;
    sc_dt::sc_logic word_mode_to_send;
    sc_dt::sc_logic parity_in_to_send;
    sc_dt::sc_logic clear_to_send;
    sc_dt::sc_bv<16> data_in_to_send;
    sc_dt::sc_logic parity_out_received;
    sc_dt::sc_logic error_received;
    sc_dt::sc_logic error_latched_received;
    sc_dt::sc_bv<16> data_out_received;
    sc_dt::sc_bv<8> status_received;

    SC_HAS_PROCESS(Initiator);
    explicit Initiator(sc_core::sc_module_name name)
        : sc_core::sc_module(name), initiator_socket("initiator_socket") {
        initiator_socket.bind(*this);
        SC_THREAD(sending_thread);
    }

    void send_data() {
        start_sending.notify(sc_core::SC_ZERO_TIME);
    }

    tlm::tlm_sync_enum nb_transport_bw(tlm::tlm_generic_payload& trans, tlm::tlm_phase& phase,
                                       sc_core::sc_time& delay) override {
        (void)trans;
        if (phase == tlm::BEGIN_RESP) {
            response_done.notify(delay);
            phase = tlm::END_RESP;
            return tlm::TLM_COMPLETED;
        }
        return tlm::TLM_ACCEPTED;
    }

    void invalidate_direct_mem_ptr(sc_dt::uint64, sc_dt::uint64) override {}

private:
    sc_core::sc_event start_sending;
    sc_core::sc_event response_done;
    ecc_payload data;

    void sending_thread() {
        tlm::tlm_generic_payload trans;
        for (;;) {
            wait(start_sending);
            data.enable = enable_to_send;
            data.word_mode = word_mode_to_send;
            data.parity_in = parity_in_to_send;
            data.clear = clear_to_send;
            data.data_in = data_in_to_send;
            trans.set_command(tlm::TLM_WRITE_COMMAND);
            trans.set_address(0);
            trans.set_data_ptr(reinterpret_cast<unsigned char*>(&data));
            trans.set_data_length(sizeof(data));
            trans.set_streaming_width(sizeof(data));
            trans.set_response_status(tlm::TLM_INCOMPLETE_RESPONSE);
            sc_core::sc_time delay = sc_core::SC_ZERO_TIME;
            tlm::tlm_phase phase = tlm::BEGIN_REQ;
            tlm::tlm_sync_enum status = initiator_socket->nb_transport_fw(trans, phase, delay);
            if (status == tlm::TLM_ACCEPTED || (status == tlm::TLM_UPDATED && phase != tlm::BEGIN_RESP)) {
                wait(response_done);
            }
            wait(delay);
            parity_out_received = data.parity_out;
            error_received = data.error;
            error_latched_received = data.error_latched;
            data_out_received = data.data_out;
            status_received = data.status;
        }
    }
};

#endif // TLM2FMU_INITIATOR_H
