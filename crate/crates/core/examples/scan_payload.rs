//! Scans the I2C bus target and prints the payload record with the direction
//! inferred for each field.
//!
//! ```text
//! cargo run --example scan_payload
//! ```

use std::error::Error;
use std::fmt::Write;
use std::path::Path;

use tlm2fmu::tlm_scan::{analyze, SourceUnit};

pub fn run_example() -> Result<String, Box<dyn Error>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/i2c");
    let units = [SourceUnit::load(dir.join("i2c_bus.h"))?, SourceUnit::load(dir.join("i2c_bus.cpp"))?];
    let analysis = analyze(&units, None)?;

    let mut out = String::new();
    writeln!(out, "module {:?}, record {}", analysis.surface.module_name, analysis.spec.record_name)?;
    for field in &analysis.spec.fields {
        let dir = field.direction.map_or_else(|| "-".to_string(), |d| d.to_string());
        writeln!(out, "  #{} {:<8} {:<6} {}", field.declaration_index, field.name, dir, field.source_type)?;
    }
    for d in &analysis.diagnostics {
        writeln!(out, "{d}")?;
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
