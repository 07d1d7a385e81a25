//! Prints how SystemC and C++ field types map onto FMI 3.0 variable types,
//! including tokens that are rejected.

use std::error::Error;
use std::fmt::Write;

use tlm2fmu::fmi_map::map_type;
use tlm2fmu::tlm_scan::SourceType;

const TOKENS: &[&str] = &[
    "sc_int<5>",
    "sc_int<16>",
    "sc_int<24>",
    "sc_int<64>",
    "sc_uint<1>",
    "sc_uint<12>",
    "sc_uint<32>",
    "sc_uint<48>",
    "sc_logic",
    "bool",
    "sc_bv<4>",
    "sc_bv<16>",
    "sc_bv<100>",
    "float",
    "double",
    "sc_bigint<128>",
    "int",
];

pub fn run_example() -> Result<String, Box<dyn Error>> {
    let mut out = String::new();
    for token in TOKENS {
        let mapped = match map_type(&SourceType::classify(token, &[])) {
            Ok(t) => t.to_string(),
            Err(e) => format!("rejected: {e}"),
        };
        writeln!(out, "{token:<16} -> {mapped}")?;
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
