//! Runs a few transactions through the behavioral ECC unit, including a
//! parity mismatch, the sticky error flag and a clear.

use std::error::Error;
use std::fmt::Write;

use tlm2fmu::behavioral::{parity, Ecc, EccInputs};

pub fn run_example() -> Result<String, Box<dyn Error>> {
    let mut ecc = Ecc::default();
    let requests = [
        ("byte, parity ok", EccInputs { enable: true, data_in: 0x0f, parity_in: parity(0x0f, 8), ..Default::default() }),
        ("byte, bad parity", EccInputs { enable: true, data_in: 0x01, parity_in: false, ..Default::default() }),
        ("word, parity ok", EccInputs { enable: true, word_mode: true, data_in: 0x8001, parity_in: false, ..Default::default() }),
        ("disabled", EccInputs { data_in: 0xffff, ..Default::default() }),
        ("clear", EccInputs { enable: true, clear: true, data_in: 0x03, ..Default::default() }),
    ];
    let mut out = String::new();
    writeln!(out, "{:<17} data_out parity error latched status", "request")?;
    for (label, inputs) in requests {
        let o = ecc.transact(inputs);
        writeln!(
            out,
            "{label:<17} {:#06x}   {:<6} {:<5} {:<7} {:#010b}",
            o.data_out, o.parity_out, o.error, o.error_latched, o.status
        )?;
    }
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
