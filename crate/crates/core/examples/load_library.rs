//! Compiles a small C implementation of the echo FMU with the system C
//! compiler, packages it next to the generated model description and runs it
//! through the native loader.

use std::collections::BTreeMap;
use std::error::Error;
use std::fmt::Write;
use std::path::Path;
use std::process::Command;

use tlm2fmu::codegen::{generate, BuildFlavor, PlanOptions, WrapperPlan};
use tlm2fmu::cosim::{FmuInstance, LibraryBackend};
use tlm2fmu::fmi_map::Value;
use tlm2fmu::package::{FmuArchive, PlatformTuple};
use tlm2fmu::time::RationalTime;
use tlm2fmu::tlm_scan::{analyze, SourceUnit};

pub fn run_example() -> Result<String, Box<dyn Error>> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR"));
    let Some(platform) = PlatformTuple::host().filter(|p| *p != PlatformTuple::X86_64Windows) else {
        return Ok("native loading needs a Unix-like host\n".into());
    };
    let dir = tempfile::tempdir()?;
    let lib = dir.path().join("echo.so");
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let compiled = Command::new(&cc)
        .args(["-shared", "-fPIC", "-O1", "-o"])
        .arg(&lib)
        .arg(root.join("fixtures/c/echo_fmu.c"))
        .status();
    match compiled {
        Ok(status) if status.success() => {}
        Ok(status) => return Err(format!("{cc} failed: {status}").into()),
        Err(_) => return Ok(format!("no C compiler ('{cc}') available\n")),
    }

    let fixture = root.join("fixtures/echo");
    let sources = vec![fixture.join("echo_target.h"), fixture.join("echo_target.cpp")];
    let units = sources.iter().map(SourceUnit::load).collect::<Result<Vec<_>, _>>()?;
    let options = PlanOptions {
        model_name: "echo".into(),
        step_size: RationalTime::new(1, 10)?,
        start_overrides: BTreeMap::new(),
        output_dir: dir.path().join("echo"),
        build_flavor: BuildFlavor::Cmake,
        sources,
    };
    let tree = generate(&WrapperPlan::from_analysis(&analyze(&units, None)?, &options)?)?;
    let archive = FmuArchive::from_tree(&tree, BTreeMap::from([(platform, std::fs::read(&lib)?)]))?;

    let native = LibraryBackend::from_archive(&archive, platform)?;
    let mut out = String::new();
    writeln!(out, "loaded {} for {platform}, FMI version {}", lib.display(), native.version()?)?;

    let step = RationalTime::new(1, 10)?;
    let mut echo = FmuInstance::new("native", Box::new(native))?;
    echo.enter_initialization(RationalTime::ZERO)?;
    echo.exit_initialization()?;
    for value in [3, -7, 42, 1 << 20] {
        echo.set_input("fmi_data_in", Value::Int32(value))?;
        echo.do_step(step)?;
        writeln!(out, "t={:<4} in {value:>8} out {:?}", echo.time().to_string(), echo.get_output("fmi_data_out")?)?;
    }
    echo.terminate()?;
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
