//! Validates `.fmu` archives: one passed as the first argument, or else a
//! freshly packaged I2C model with and without binaries.

use std::collections::BTreeMap;
use std::error::Error;
use std::fmt::Write;
use std::path::{Path, PathBuf};

use tlm2fmu::codegen::{generate, BuildFlavor, PlanOptions, WrapperPlan};
use tlm2fmu::package::{pack, validate, PlatformTuple};
use tlm2fmu::time::RationalTime;
use tlm2fmu::tlm_scan::{analyze, SourceUnit};

fn packaged(dir: &Path, with_binary: bool) -> Result<PathBuf, Box<dyn Error>> {
    let fixture = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/i2c");
    let sources = vec![fixture.join("i2c_bus.h"), fixture.join("i2c_bus.cpp")];
    let units = sources.iter().map(SourceUnit::load).collect::<Result<Vec<_>, _>>()?;
    let options = PlanOptions {
        model_name: "i2c".into(),
        step_size: RationalTime::new(1, 10)?,
        start_overrides: BTreeMap::new(),
        output_dir: dir.join("i2c"),
        build_flavor: BuildFlavor::Cmake,
        sources,
    };
    let tree = generate(&WrapperPlan::from_analysis(&analyze(&units, None)?, &options)?)?;
    let binaries = if with_binary {
        BTreeMap::from([(PlatformTuple::X86_64Linux, b"\x7fELF".to_vec())])
    } else {
        BTreeMap::new()
    };
    let path = dir.join(if with_binary { "i2c.fmu" } else { "i2c-description-only.fmu" });
    pack(&tree, binaries, &path)?;
    Ok(path)
}

pub fn run_example(archive: Option<&str>) -> Result<String, Box<dyn Error>> {
    let dir = tempfile::tempdir()?;
    let paths = match archive {
        Some(arg) => vec![PathBuf::from(arg)],
        None => vec![packaged(dir.path(), true)?, packaged(dir.path(), false)?],
    };
    let mut out = String::new();
    for path in paths {
        let report = validate(&path)?;
        writeln!(out, "{} (exit code {})", path.file_name().unwrap_or_default().to_string_lossy(), report.exit_code())?;
        writeln!(out, "{report}")?;
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
