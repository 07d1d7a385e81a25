// XOR-parity ECC unit with byte (8-bit) and word (16-bit) modes.
#ifndef ECC_UNIT_H
#define ECC_UNIT_H

#include <systemc>
#include <tlm>
#include <tlm_utils/simple_target_socket.h>

struct ecc_payload {
    sc_dt::sc_logic enable;
    sc_dt::sc_logic word_mode;     // '0': byte mode, '1': word mode
    sc_dt::sc_logic parity_in;     // expected parity of data_in
    sc_dt::sc_logic clear;         // clears the sticky error flag
    sc_dt::sc_bv<16> data_in;
    sc_dt::sc_logic parity_out;
    sc_dt::sc_logic error;
    sc_dt::sc_logic error_latched;
    sc_dt::sc_bv<16> data_out;
    sc_dt::sc_bv<8> status;        // bit 0 error, bit 1 word mode, bits 7..2 error count
};

class EccUnit : public sc_core::sc_module {
public:
    tlm_utils::simple_target_socket<EccUnit> target_socket;

    SC_HAS_PROCESS(EccUnit);
    explicit EccUnit(sc_core::sc_module_name name);

private:
    tlm::tlm_sync_enum nb_transport_fw(tlm::tlm_generic_payload& trans, tlm::tlm_phase& phase,
                                       sc_core::sc_time& delay);
    static bool xor_reduce(const sc_dt::sc_bv<16>& bits, int width);

    bool sticky_error_;
    unsigned error_count_;
};

#endif // ECC_UNIT_H
