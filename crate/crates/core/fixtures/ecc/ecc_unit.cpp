#include "ecc_unit.h"

EccUnit::EccUnit(sc_core::sc_module_name name)
    : sc_core::sc_module(name), target_socket("target_socket"), sticky_error_(false), error_count_(0) {
    target_socket.register_nb_transport_fw(this, &EccUnit::nb_transport_fw);
}

bool EccUnit::xor_reduce(const sc_dt::sc_bv<16>& bits, int width) {
    bool parity = false;
    for (int i = 0; i < width; ++i) {
        parity ^= (bits[i] == sc_dt::SC_LOGIC_1);
    }
    return parity;
}

tlm::tlm_sync_enum EccUnit::nb_transport_fw(tlm::tlm_generic_payload& trans, tlm::tlm_phase& phase,
                                            sc_core::sc_time& delay) {
    if (phase != tlm::BEGIN_REQ) {
        return tlm::TLM_ACCEPTED;
    }
    ecc_payload* p = reinterpret_cast<ecc_payload*>(trans.get_data_ptr());

    if (p->clear == sc_dt::SC_LOGIC_1) {
        sticky_error_ = false;
        error_count_ = 0;
    }

    if (p->enable != sc_dt::SC_LOGIC_1) {
        // Disabled: outputs float.
        p->parity_out = sc_dt::SC_LOGIC_Z;
        p->error = sc_dt::SC_LOGIC_0;
    } else {
        const int width = (p->word_mode == sc_dt::SC_LOGIC_1) ? 16 : 8;
        sc_dt::sc_bv<16> masked = p->data_in;
        for (int i = width; i < 16; ++i) {
            masked[i] = sc_dt::SC_LOGIC_0;
        }
        const bool parity = xor_reduce(masked, width);
        const bool mismatch = parity != (p->parity_in == sc_dt::SC_LOGIC_1);
        if (mismatch) {
            sticky_error_ = true;
            error_count_ = (error_count_ + 1) & 0x3f;
        }
        p->data_out = masked;
        p->parity_out = parity ? sc_dt::SC_LOGIC_1 : sc_dt::SC_LOGIC_0;
        p->error = mismatch ? sc_dt::SC_LOGIC_1 : sc_dt::SC_LOGIC_0;
    }

    p->error_latched = sticky_error_ ? sc_dt::SC_LOGIC_1 : sc_dt::SC_LOGIC_0;
    sc_dt::sc_bv<8> st = 0;
    st[0] = p->error.to_bool();
    st[1] = (p->word_mode == sc_dt::SC_LOGIC_1);
    st.range(7, 2) = error_count_;
    p->status = st;

    trans.set_response_status(tlm::TLM_OK_RESPONSE);
    phase = tlm::BEGIN_RESP;
    delay += sc_core::sc_time(40, sc_core::SC_NS);
    return tlm::TLM_UPDATED;
}
