#include "i2c_bus.h"

I2cBus::I2cBus(sc_core::sc_module_name name)
    : sc_core::sc_module(name),
      target_socket("target_socket"),
      state_(BUS_IDLE),
      latched_rw_(false),
      latched_slave_(SlaveAddress::NONE) {
    regs_.alu_acc = 0;
    regs_.regfile_cell = 0;
    target_socket.register_b_transport(this, &I2cBus::b_transport);
}

bool I2cBus::address_valid(SlaveAddress addr) const {
    return addr == SlaveAddress::ALU || addr == SlaveAddress::REGFILE;
}

void I2cBus::b_transport(tlm::tlm_generic_payload& trans, sc_core::sc_time& delay) {
    i2c_payload* p = reinterpret_cast<i2c_payload*>(trans.get_data_ptr());

    switch (state_) {
    case BUS_IDLE:
        p->ack = false;
        if (p->start) {
            latched_rw_ = p->rw;
            latched_slave_ = p->slave;
            state_ = BUS_ADDRESSING;
        }
        break;
    case BUS_ADDRESSING:
        if (address_valid(latched_slave_)) {
            p->ack = true;
            state_ = BUS_ACK;
        } else {
            p->ack = false;      // NACK: nobody answers this address
            state_ = BUS_IDLE;
        }
        break;
    case BUS_ACK:
        p->ack = true;
        if (latched_rw_) {
            p->rdata = (latched_slave_ == SlaveAddress::ALU) ? regs_.alu_acc : regs_.regfile_cell;
        } else if (latched_slave_ == SlaveAddress::ALU) {
            regs_.alu_acc = p->wdata;
        } else {
            regs_.regfile_cell = p->wdata;
        }
        state_ = BUS_TRANSFER;
        break;
    case BUS_TRANSFER:
        p->ack = false;
        state_ = BUS_IDLE;
        break;
    }

    p->state = state_;
    delay += sc_core::sc_time(2500, sc_core::SC_NS);
    trans.set_response_status(tlm::TLM_OK_RESPONSE);
}
