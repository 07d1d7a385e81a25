#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use tlm2fmu::codegen::{BuildFlavor, PlanOptions, WrapperPlan};
use tlm2fmu::time::RationalTime;
use tlm2fmu::tlm_scan::{analyze, Analysis, SourceUnit};

pub fn manifest_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

pub fn fixture_dir(name: &str) -> PathBuf {
    manifest_dir().join("fixtures").join(name)
}

pub fn fixture_units(name: &str) -> Vec<SourceUnit> {
    let mut paths: Vec<PathBuf> =
        std::fs::read_dir(fixture_dir(name)).unwrap().map(|e| e.unwrap().path()).collect();
    paths.sort();
    paths.iter().map(|p| SourceUnit::load(p).unwrap()).collect()
}

pub fn fixture_analysis(name: &str) -> Analysis {
    analyze(&fixture_units(name), None).unwrap()
}

pub fn fixture_plan(name: &str, output_dir: &Path, flavor: BuildFlavor) -> WrapperPlan {
    let units = fixture_units(name);
    let analysis = analyze(&units, None).unwrap();
    let options = PlanOptions {
        model_name: name.to_string(),
        step_size: RationalTime::new(1, 10).unwrap(),
        start_overrides: BTreeMap::new(),
        output_dir: output_dir.to_path_buf(),
        build_flavor: flavor,
        sources: units.iter().map(|u| u.path().to_path_buf()).collect(),
    };
    WrapperPlan::from_analysis(&analysis, &options).unwrap()
}

/// Compiles the C echo FMU with extra `-D` flags; `None` when no C compiler is available.
pub fn compile_echo_fmu(out_dir: &Path, defines: &[&str]) -> Option<Vec<u8>> {
    let lib = out_dir.join(format!("echo-{}.so", defines.join("_").replace(['=', '-'], "")));
    let mut cmd = std::process::Command::new(std::env::var("CC").unwrap_or_else(|_| "cc".into()));
    cmd.args(["-shared", "-fPIC", "-O1", "-o"]).arg(&lib).arg(manifest_dir().join("fixtures/c/echo_fmu.c"));
    for d in defines {
        cmd.arg(format!("-D{d}"));
    }
    match cmd.status() {
        Ok(status) if status.success() => Some(std::fs::read(lib).unwrap()),
        Ok(status) => panic!("compiling the echo FMU failed: {status}"),
        Err(_) => {
            eprintln!("skipping: no C compiler");
            None
        }
    }
}
