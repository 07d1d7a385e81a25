//! Drives the single-pedal vehicle plant (1 s step) from a torque controller
//! (0.1 s step) for 35 s and prints the trace at whole seconds.
//!
//! Pass a path to also write the full trace as CSV.

use std::error::Error;
use std::fmt::Write;

use tlm2fmu::behavioral;
use tlm2fmu::cosim::{instantiate, CoSimSchedule};
use tlm2fmu::time::RationalTime;

pub fn run_example(csv_path: Option<&str>) -> Result<String, Box<dyn Error>> {
    let schedule = CoSimSchedule::new(RationalTime::from_secs(35))
        .instance("ecu", behavioral::backend("ecu").ok_or("no ecu")?, RationalTime::new(1, 10)?)
        .instance("vehicle", behavioral::backend("vehicle").ok_or("no vehicle")?, RationalTime::from_secs(1))
        .connect("ecu.fmi_torque_request", "vehicle.Torque_Request")
        .record("ecu.fmi_torque_request")
        .record("vehicle.Vehicle_Speed");
    let mut network = instantiate(schedule)?;
    let (trace, stats) = network.run()?;

    let mut out = String::new();
    writeln!(out, "micro-step {} s, {} rows", stats.micro_step, stats.rows)?;
    for (id, n) in &stats.steps {
        writeln!(out, "  {id}: {n} steps")?;
    }
    let torque = trace.series("ecu.fmi_torque_request").ok_or("no torque column")?;
    let speed = trace.series("vehicle.Vehicle_Speed").ok_or("no speed column")?;
    writeln!(out, "   t  torque_Nm  speed_kmh")?;
    for k in (0..trace.rows.len()).step_by(10) {
        writeln!(out, "{:>4}  {:>9.1}  {:>9.2}", trace.rows[k].time, torque[k], speed[k])?;
    }
    if let Some(path) = csv_path {
        trace.write_csv(std::fs::File::create(path)?)?;
        writeln!(out, "trace written to {path}")?;
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
