// Two flat records; only one is carried by the generic payload.
#include <systemc>
#include <tlm>
#include <tlm_utils/simple_target_socket.h>

struct dma_request {
    sc_dt::sc_uint<32> src;
    sc_dt::sc_uint<16> length;
    sc_dt::sc_uint<16> transferred;
};

struct dma_stats {
    sc_dt::sc_uint<32> requests;
    sc_dt::sc_uint<32> bytes;
};

SC_MODULE(DmaTarget) {
    tlm_utils::simple_target_socket<DmaTarget> socket;
    dma_stats stats;

    SC_CTOR(DmaTarget) : socket("socket") {
        socket.register_b_transport(this, &DmaTarget::b_transport);
        stats.requests = 0;
        stats.bytes = 0;
    }

    void b_transport(tlm::tlm_generic_payload& trans, sc_core::sc_time& delay) {
        dma_request* req = reinterpret_cast<dma_request*>(trans.get_data_ptr());
        stats.requests = stats.requests + 1;
        stats.bytes = stats.bytes + req->length;
        req->transferred = req->length;
        delay += sc_core::sc_time(req->length.to_uint() * 10, sc_core::SC_NS);
        (void)req->src;
        trans.set_response_status(tlm::TLM_OK_RESPONSE);
    }
};
