//! Shows how the master completes a step that a model cut short: the first
//! call advances only 60% of the interval and the remainder is re-requested.

use std::error::Error;
use std::fmt::Write;

use tlm2fmu::behavioral::{Echo, Scripted};
use tlm2fmu::cosim::{instantiate, CoSimSchedule, InProcess};
use tlm2fmu::time::RationalTime;

pub fn run_example() -> Result<String, Box<dyn Error>> {
    let step = RationalTime::new(1, 10)?;
    let model = Scripted::new(Echo::default(), [(0, RationalTime::new(3, 5)?), (3, RationalTime::new(1, 4)?)]);
    let log = model.log();
    let schedule = CoSimSchedule::new(RationalTime::new(1, 2)?).instance("echo", Box::new(InProcess::new(model)), step);
    let mut network = instantiate(schedule)?;
    let stats = network.run()?.1;

    let mut out = String::new();
    writeln!(out, "call  from    requested  advanced  early")?;
    for (k, call) in log.lock().map_err(|_| "log poisoned")?.iter().enumerate() {
        writeln!(
            out,
            "{k:>4}  {:<6}  {:<9}  {:<8}  {}",
            call.current.to_string(),
            call.step.to_string(),
            call.advanced.to_string(),
            call.early_return
        )?;
    }
    let echo = network.instance("echo").ok_or("no instance")?;
    writeln!(out, "final time {} after {} steps and {} early returns", echo.time(), stats.steps["echo"], stats.early_returns["echo"])?;
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
