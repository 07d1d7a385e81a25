// Payload record 'ecc_payload' extracted from ecc_unit.h.
#ifndef ECC_PAYLOAD_H
#define ECC_PAYLOAD_H

#include <systemc>

struct ecc_payload {
    sc_dt::sc_logic enable;
    sc_dt::sc_logic word_mode;
    sc_dt::sc_logic parity_in;
    sc_dt::sc_logic clear;
    sc_dt::sc_bv<16> data_in;
    sc_dt::sc_logic parity_out;
    sc_dt::sc_logic error;
    sc_dt::sc_logic error_latched;
    sc_dt::sc_bv<16> data_out;
    sc_dt::sc_bv<8> status;
};

#endif // ECC_PAYLOAD_H
