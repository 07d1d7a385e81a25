//! Packs the generated ECC wrapper with per-platform binaries into a `.fmu`
//! and shows that packing twice gives the same bytes.

use std::collections::BTreeMap;
use std::error::Error;
use std::fmt::Write;
use std::path::Path;

use sha2::{Digest, Sha256};
use tlm2fmu::codegen::{generate, BuildFlavor, PlanOptions, WrapperPlan};
use tlm2fmu::package::{pack, PlatformTuple};
use tlm2fmu::time::RationalTime;
use tlm2fmu::tlm_scan::{analyze, SourceUnit};

pub fn run_example() -> Result<String, Box<dyn Error>> {
    let fixture = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/ecc");
    let sources = vec![fixture.join("ecc_unit.h"), fixture.join("ecc_unit.cpp")];
    let units = sources.iter().map(SourceUnit::load).collect::<Result<Vec<_>, _>>()?;
    let dir = tempfile::tempdir()?;
    let options = PlanOptions {
        model_name: "ecc".into(),
        step_size: RationalTime::new(1, 10)?,
        start_overrides: BTreeMap::new(),
        output_dir: dir.path().join("ecc"),
        build_flavor: BuildFlavor::ShellScript,
        sources,
    };
    let tree = generate(&WrapperPlan::from_analysis(&analyze(&units, None)?, &options)?)?;

    // Stand-ins for libraries built on each platform.
    let binaries = || {
        BTreeMap::from([
            (PlatformTuple::X86_64Linux, b"\x7fELF".to_vec()),
            (PlatformTuple::X86_64Windows, b"MZ".to_vec()),
            (PlatformTuple::Aarch64Darwin, vec![0xcf, 0xfa, 0xed, 0xfe]),
        ])
    };
    let mut out = String::new();
    let mut digests = Vec::new();
    for name in ["first.fmu", "second.fmu"] {
        let path = dir.path().join(name);
        let archive = pack(&tree, binaries(), &path)?;
        let digest = Sha256::digest(std::fs::read(&path)?);
        writeln!(out, "{name}: sha256 {}", hex::encode(digest))?;
        if digests.is_empty() {
            for entry in archive.entries()? {
                writeln!(out, "  {entry}")?;
            }
        }
        digests.push(digest);
    }
    writeln!(out, "identical: {}", digests[0] == digests[1])?;
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
