//! Times 250, 1000 and 10000 scheduled steps of the I2C model and reports
//! wall time per step and peak resident memory.
//!
//! ```text
//! cargo run --release --example bench_scaling -- ecc
//! ```

use std::error::Error;
use std::fmt::Write;

use tlm2fmu::bench;
use tlm2fmu::config::BenchConfig;

pub fn run_example(model: Option<&str>) -> Result<String, Box<dyn Error>> {
    let mut config = BenchConfig::default();
    if let Some(model) = model {
        config.model = model.to_string();
    }
    let report = bench::run(&config)?;
    let mut out = report.to_string();
    for row in &report.rows {
        let per_step = row.wall.as_secs_f64() * 1e6 / row.steps as f64;
        writeln!(out, "{:>6} steps: {per_step:.2} us/step", row.steps)?;
    }
    Ok(out)
}

fn main() {
    match run_example(std::env::args().nth(1).as_deref()) {
        Ok(text) => print!("{text}"),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(1);
        }
    }
}
