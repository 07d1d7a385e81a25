// I2C bus target: a master controller in front of two slaves (an ALU
// accumulator and a register-file cell). One protocol phase per transaction.
#ifndef I2C_BUS_H
#define I2C_BUS_H

#include <systemc>
#include <tlm>
#include <tlm_utils/simple_target_socket.h>

enum class SlaveAddress : int {
    NONE = 0x00,
    ALU = 0x21,
    REGFILE = 0x42
};

enum BusState {
    BUS_IDLE = 0,
    BUS_ADDRESSING = 1,
    BUS_ACK = 2,
    BUS_TRANSFER = 3
};

struct i2c_payload {
    bool start;                 // begin a transaction when the bus is idle
    bool rw;                    // true: read, false: write
    SlaveAddress slave;         // 7-bit slave address
    sc_dt::sc_uint<8> wdata;    // byte to write
    bool ack;                   // slave acknowledged the address phase
    sc_dt::sc_uint<8> rdata;    // byte read back
    BusState state;             // protocol state after this phase
};

// Internal slave storage; never travels through the socket.
struct slave_regs {
    sc_dt::sc_uint<8> alu_acc;
    sc_dt::sc_uint<8> regfile_cell;
};

class I2cBus : public sc_core::sc_module {
public:
    tlm_utils::simple_target_socket<I2cBus> target_socket;

    SC_HAS_PROCESS(I2cBus);
    explicit I2cBus(sc_core::sc_module_name name);

private:
    void b_transport(tlm::tlm_generic_payload& trans, sc_core::sc_time& delay);
    bool address_valid(SlaveAddress addr) const;

    BusState state_;
    bool latched_rw_;
    SlaveAddress latched_slave_;
    slave_regs regs_;
};

#endif // I2C_BUS_H
