//! Writes and reads back both I2C slaves through the FMI variable interface,
//! then addresses a slave that does not exist.

use std::error::Error;
use std::fmt::Write;

use tlm2fmu::behavioral::{self, ALU_ADDRESS, REGFILE_ADDRESS};
use tlm2fmu::cosim::FmuInstance;
use tlm2fmu::fmi_map::Value;
use tlm2fmu::time::RationalTime;

/// One bus transaction: a start phase followed by address, ack and transfer.
fn transaction(bus: &mut FmuInstance, slave: i32, read: bool, data: u8) -> Result<(bool, u8), Box<dyn Error>> {
    let step = RationalTime::new(1, 10)?;
    bus.set_input("fmi_start", Value::Bool(true))?;
    bus.set_input("fmi_rw", Value::Bool(read))?;
    bus.set_input("fmi_slave", Value::Int32(slave))?;
    bus.set_input("fmi_wdata", Value::UInt8(data))?;
    bus.do_step(step)?;
    bus.set_input("fmi_start", Value::Bool(false))?;
    let mut acked = false;
    for _ in 0..3 {
        bus.do_step(step)?;
        acked |= bus.get_output("fmi_ack")? == Value::Bool(true);
        if bus.get_output("fmi_state")? == Value::Int32(0) {
            break;
        }
    }
    let rdata = match bus.get_output("fmi_rdata")? {
        Value::UInt8(b) => b,
        other => return Err(format!("unexpected {other:?}").into()),
    };
    Ok((acked, rdata))
}

pub fn run_example() -> Result<String, Box<dyn Error>> {
    let mut bus = FmuInstance::new("bus", behavioral::backend("i2c").ok_or("no i2c model")?)?;
    bus.enter_initialization(RationalTime::ZERO)?;
    bus.exit_initialization()?;

    let mut out = String::new();
    for (slave, byte) in [(ALU_ADDRESS, 0x2a), (REGFILE_ADDRESS, 0xc3), (0x10, 0x55)] {
        let (write_ack, _) = transaction(&mut bus, slave, false, byte)?;
        let (read_ack, back) = transaction(&mut bus, slave, true, 0)?;
        writeln!(out, "slave {slave:#04x}: wrote {byte:#04x} ack={write_ack}, read {back:#04x} ack={read_ack}")?;
    }
    writeln!(out, "bus time {}", bus.time())?;
    Ok(out)
}

fn main() {
    match run_example() {
        Ok(text) => print!("{text}"),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(1);
        }
    }
}
