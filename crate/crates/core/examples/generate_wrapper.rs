//! Generates the FMU wrapper sources for the echo target into a temporary
//! directory and shows the model description plus the exported entry points.

use std::collections::BTreeMap;
use std::error::Error;
use std::fmt::Write;
use std::path::Path;

use tlm2fmu::codegen::{generate, BuildFlavor, PlanOptions, WrapperPlan};
use tlm2fmu::time::RationalTime;
use tlm2fmu::tlm_scan::{analyze, SourceUnit};

pub fn run_example() -> Result<String, Box<dyn Error>> {
    let fixture = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/echo");
    let sources = vec![fixture.join("echo_target.h"), fixture.join("echo_target.cpp")];
    let units = sources.iter().map(SourceUnit::load).collect::<Result<Vec<_>, _>>()?;
    let analysis = analyze(&units, None)?;

    let out_dir = tempfile::tempdir()?;
    let options = PlanOptions {
        model_name: "echo".into(),
        step_size: RationalTime::new(1, 10)?,
        start_overrides: BTreeMap::from([("data_in".to_string(), "7".to_string())]),
        output_dir: out_dir.path().to_path_buf(),
        build_flavor: BuildFlavor::Cmake,
        sources,
    };
    let plan = WrapperPlan::from_analysis(&analysis, &options)?;
    let tree = generate(&plan)?;
    tree.write()?;

    let mut out = String::new();
    for path in tree.files.keys() {
        writeln!(out, "wrote {}", path.strip_prefix(out_dir.path())?.display())?;
    }
    writeln!(out, "exports: {}", tree.entry_points.join(" "))?;
    out.push_str(tree.file("modelDescription.xml").ok_or("no model description")?);
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
