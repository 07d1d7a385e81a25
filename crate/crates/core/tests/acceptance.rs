//! Acceptance criteria, one line each. Exits non-zero if any criterion fails.

mod common;

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use common::{fixture_plan, fixture_units};
use tlm2fmu::behavioral::{self, Echo, Scripted};
use tlm2fmu::codegen::{generate, BuildFlavor, PlanOptions, WrapperPlan};
use tlm2fmu::config::BenchConfig;
use tlm2fmu::cosim::{instantiate, CoSimSchedule, FmuInstance, InProcess};
use tlm2fmu::fmi_map::{map_type, FmiType, Value};
use tlm2fmu::package::{pack, validate, PlatformTuple};
use tlm2fmu::time::RationalTime;
use tlm2fmu::tlm_scan::{analyze, SourceType};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let holds: bool = $cond;
        if !holds {
            return Err(format!($($msg)+));
        }
    };
}

fn tenth() -> RationalTime {
    RationalTime::new(1, 10).unwrap()
}

type Element = (String, BTreeMap<String, String>);

/// Element name and attributes of every element under the first `tag`.
fn subtree(xml: &str, tag: &str) -> Result<Vec<Element>, String> {
    let doc = roxmltree::Document::parse(xml).map_err(|e| e.to_string())?;
    let node = doc.descendants().find(|n| n.has_tag_name(tag)).ok_or(format!("no <{tag}>"))?;
    Ok(node
        .descendants()
        .filter(|n| n.is_element())
        .map(|n| {
            let attrs = n.attributes().map(|a| (a.name().to_string(), a.value().to_string())).collect();
            (n.tag_name().name().to_string(), attrs)
        })
        .collect())
}

const EXPECTED_INTERFACE: &str = r#"<fmiModelDescription fmiVersion="3.0" modelName="tlm">
  <ModelVariables>
    <Int32 name="fmi_data_in" valueReference="1" causality="input" start="0"/>
    <Int32 name="fmi_data_out" valueReference="2" causality="output"/>
  </ModelVariables>
</fmiModelDescription>"#;

fn echo_description() -> Outcome {
    let started = Instant::now();
    let units = fixture_units("echo");
    let analysis = analyze(&units, None).map_err(|e| e.to_string())?;
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let options = PlanOptions {
        model_name: "tlm".into(),
        step_size: tenth(),
        start_overrides: BTreeMap::new(),
        output_dir: dir.path().to_path_buf(),
        build_flavor: BuildFlavor::Cmake,
        sources: units.iter().map(|u| u.path().to_path_buf()).collect(),
    };
    let plan = WrapperPlan::from_analysis(&analysis, &options).map_err(|e| e.to_string())?;
    let tree = generate(&plan).map_err(|e| e.to_string())?;
    let xml = tree.file("modelDescription.xml").ok_or("no modelDescription.xml")?;

    let doc = roxmltree::Document::parse(xml).map_err(|e| e.to_string())?;
    let root = doc.root_element();
    ensure!(root.attribute("fmiVersion") == Some("3.0"), "fmiVersion {:?}", root.attribute("fmiVersion"));
    ensure!(root.attribute("modelName") == Some("tlm"), "modelName {:?}", root.attribute("modelName"));
    let got = subtree(xml, "ModelVariables")?;
    let want = subtree(EXPECTED_INTERFACE, "ModelVariables")?;
    ensure!(got == want, "ModelVariables differ:\n  got  {got:?}\n  want {want:?}");
    let elapsed = started.elapsed();
    ensure!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    Ok(format!("2 variables match, {elapsed:.2?}"))
}

fn type_table() -> Outcome {
    let started = Instant::now();
    let buckets = [
        (1, FmiType::Int8, FmiType::UInt8),
        (8, FmiType::Int8, FmiType::UInt8),
        (9, FmiType::Int16, FmiType::UInt16),
        (16, FmiType::Int16, FmiType::UInt16),
        (17, FmiType::Int32, FmiType::UInt32),
        (32, FmiType::Int32, FmiType::UInt32),
        (33, FmiType::Int64, FmiType::UInt64),
        (64, FmiType::Int64, FmiType::UInt64),
    ];
    let mut rows = 0;
    let mut check = |token: String, want: Option<FmiType>| -> Result<(), String> {
        let got = map_type(&SourceType::classify(&token, &[])).ok();
        rows += 1;
        if got == want {
            Ok(())
        } else {
            Err(format!("{token}: got {got:?}, want {want:?}"))
        }
    };
    for (w, signed, unsigned) in buckets {
        check(format!("sc_int<{w}>"), Some(signed))?;
        check(format!("sc_uint<{w}>"), Some(unsigned))?;
    }
    check("sc_logic".into(), Some(FmiType::Bool))?;
    for (bits, bytes) in [(1, 1), (8, 1), (9, 2), (16, 2), (64, 8), (100, 13)] {
        check(format!("sc_bv<{bits}>"), Some(FmiType::Binary { size_bytes: bytes }))?;
    }
    for (token, t) in [("float", FmiType::Float32), ("sc_float", FmiType::Float32), ("double", FmiType::Float64), ("sc_double", FmiType::Float64)] {
        check(token.into(), Some(t))?;
    }
    for rejected in ["sc_bigint<128>", "sc_biguint<64>", "sc_int<0>", "sc_int<65>", "sc_uint<65>", "sc_lv<8>", "long double"] {
        check(rejected.into(), None)?;
    }
    let elapsed = started.elapsed();
    ensure!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    Ok(format!("{rows} rows, {elapsed:.2?}"))
}

fn drive_cycle() -> Outcome {
    let started = Instant::now();
    let schedule = CoSimSchedule::new(RationalTime::from_secs(35))
        .instance("ecu", behavioral::backend("ecu").unwrap(), tenth())
        .instance("vehicle", behavioral::backend("vehicle").unwrap(), RationalTime::from_secs(1))
        .connect("ecu.fmi_torque_request", "vehicle.Torque_Request")
        .record("ecu.fmi_torque_request")
        .record("vehicle.Vehicle_Speed");
    let (trace, stats) = instantiate(schedule).and_then(|mut n| n.run()).map_err(|e| e.to_string())?;
    let elapsed = started.elapsed();

    ensure!(stats.do_step_calls["ecu"] == 350, "ecu doStep calls {}", stats.do_step_calls["ecu"]);
    ensure!(stats.do_step_calls["vehicle"] == 35, "vehicle doStep calls {}", stats.do_step_calls["vehicle"]);
    ensure!(trace.rows.len() == 351, "{} rows", trace.rows.len());
    let speed = trace.series("vehicle.Vehicle_Speed").unwrap();
    let torque = trace.series("ecu.fmi_torque_request").unwrap();
    for j in 0..35 {
        let window = &speed[10 * j + 1..=10 * j + 10];
        ensure!(window.iter().all(|v| *v == window[0]), "speed not held within second {j}: {window:?}");
    }
    let max = torque.iter().copied().fold(f64::MIN, f64::max);
    let min = torque.iter().copied().fold(f64::MAX, f64::min);
    ensure!(max == 120.0 && min == -80.0, "torque range [{min}, {max}]");

    // Speed at whole seconds. The plant step from t takes the torque the
    // controller produced over [t, t + 0.1], so regen acts from the step at 18 s.
    let at = |s: usize| speed[10 * s];
    let drive_phase: Vec<f64> = (0..=18).map(at).collect();
    ensure!(drive_phase.windows(2).all(|w| w[1] >= w[0]), "speed falls while driving: {drive_phase:?}");
    ensure!(at(18) > 0.0, "vehicle never moved");
    let regen: Vec<f64> = (18..=26).map(at).collect();
    ensure!(regen.windows(2).all(|w| w[1] < w[0]), "speed not decreasing under regen: {regen:?}");
    ensure!(elapsed < Duration::from_secs(5), "took {elapsed:?}");
    Ok(format!("350/35 doStep calls, hold 10, torque [{min}, {max}], peak {:.1} km/h, {elapsed:.2?}", at(18)))
}

fn time_accounting() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut cases: Vec<(RationalTime, u64)> = vec![(tenth(), 10_000), (RationalTime::new(1, 3).unwrap(), 10_000)];
    for _ in 0..30 {
        let h = RationalTime::new(rng.random_range(1..=1000), rng.random_range(1..=1000)).unwrap();
        cases.push((h, rng.random_range(1..=10_000)));
    }
    for &(h, n) in &cases {
        let stop = h.checked_mul_int(n).ok_or("stop time overflow")?;
        let mut network = instantiate(CoSimSchedule::new(stop).instance("e", Box::new(InProcess::new(Echo::default())), h))
            .map_err(|e| e.to_string())?;
        let stats = network.run_with(|_| {}).map_err(|e| e.to_string())?;
        let time = network.instance("e").unwrap().time();
        ensure!(time == stop && stats.steps["e"] == n, "h={h} N={n}: time {time}, {} steps", stats.steps["e"]);
    }

    // A model that stops at 60% of a 0.1 s interval is stepped again for the rest.
    let model = Scripted::new(Echo::default(), [(0, RationalTime::new(3, 5).unwrap())]);
    let log = model.log();
    let mut network = instantiate(CoSimSchedule::new(RationalTime::new(3, 10).unwrap()).instance("e", Box::new(InProcess::new(model)), tenth()))
        .map_err(|e| e.to_string())?;
    let stats = network.run().map_err(|e| e.to_string())?.1;
    ensure!(network.instance("e").unwrap().time() == RationalTime::new(3, 10).unwrap(), "early-return run ended early");
    ensure!(stats.early_returns["e"] == 1 && stats.steps["e"] == 3, "stats {stats:?}");
    let calls = log.lock().unwrap();
    let mut t = RationalTime::ZERO;
    for c in calls.iter() {
        ensure!(c.current == t, "gap before call at {}: expected {t}", c.current);
        t = t + c.advanced;
    }
    ensure!(calls[0].advanced == RationalTime::new(6, 100).unwrap() && calls[1].step == RationalTime::new(4, 100).unwrap(), "calls {:?}", &calls[..2]);
    ensure!(t == RationalTime::new(3, 10).unwrap(), "ended at {t}");
    Ok(format!("{} (h, N) cases exact; 60% early return completed by a 0.04 s re-step", cases.len()))
}

fn ecc_oracle() -> Outcome {
    fn xor_fold(data: u16, width: u32) -> bool {
        (0..width).fold(false, |acc, bit| acc ^ ((data >> bit) & 1 == 1))
    }
    let mut ecc = FmuInstance::new("ecc", behavioral::backend("ecc").unwrap()).map_err(|e| e.to_string())?;
    ecc.enter_initialization(RationalTime::ZERO).map_err(|e| e.to_string())?;
    ecc.exit_initialization().map_err(|e| e.to_string())?;
    let mut transact = |data: u16, word: bool| -> Result<bool, String> {
        ecc.set_input("fmi_enable", Value::Bool(true)).map_err(|e| e.to_string())?;
        ecc.set_input("fmi_word_mode", Value::Bool(word)).map_err(|e| e.to_string())?;
        ecc.set_input("fmi_data_in", Value::Binary(data.to_le_bytes().to_vec())).map_err(|e| e.to_string())?;
        ecc.do_step(tenth()).map_err(|e| e.to_string())?;
        match ecc.get_output("fmi_parity_out").map_err(|e| e.to_string())? {
            Value::Bool(b) => Ok(b),
            other => Err(format!("parity output {other:?}")),
        }
    };
    for byte in 0..=255u16 {
        let p = transact(byte, false)?;
        ensure!(p == xor_fold(byte, 8), "byte {byte:#04x}: parity {p}");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0xecc);
    for _ in 0..4096 {
        let word: u16 = rng.random();
        let p = transact(word, true)?;
        ensure!(p == xor_fold(word, 16), "word {word:#06x}: parity {p}");
    }
    Ok("256 bytes and 4096 sampled words agree".into())
}

fn scaling() -> Outcome {
    let config = BenchConfig { steps: vec![250, 1000, 10_000], ..BenchConfig::default() };
    let report = tlm2fmu::bench::run(&config).map_err(|e| e.to_string())?;
    let base = &report.rows[0];
    let counts: Vec<u64> = report.rows.iter().map(|r| r.steps).collect();
    ensure!(counts == config.steps, "step counts {counts:?}");
    for row in &report.rows {
        let bound = base.wall.as_secs_f64() * 1.5 * row.steps as f64 / base.steps as f64;
        ensure!(row.wall.as_secs_f64() <= bound, "{} steps took {:?}, bound {bound:.6} s", row.steps, row.wall);
    }
    let last = report.rows.last().unwrap();
    let memory = match (base.peak_rss_kib, last.peak_rss_kib) {
        (Some(a), Some(b)) => {
            let growth = (b as f64 - a as f64) / a as f64;
            ensure!(growth <= 0.10, "peak memory grew {:.1}% ({a} -> {b} KiB)", growth * 100.0);
            format!("memory {a} -> {b} KiB ({:+.1}%)", growth * 100.0)
        }
        _ => return Err("peak memory not available on this platform".into()),
    };
    let ms: Vec<String> = report.rows.iter().map(|r| format!("{}:{:.1}ms", r.steps, r.wall.as_secs_f64() * 1e3)).collect();
    Ok(format!("{}, {memory}", ms.join(" ")))
}

fn packaging() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut hashes = Vec::new();
    for name in ["echo", "i2c", "ecc"] {
        let tree = generate(&fixture_plan(name, &dir.path().join(name), BuildFlavor::Cmake)).map_err(|e| e.to_string())?;
        let binaries = || BTreeMap::from([(PlatformTuple::X86_64Linux, format!("{name}.so").into_bytes())]);
        let mut digests = Vec::new();
        for attempt in ["a", "b"] {
            let path = dir.path().join(format!("{name}-{attempt}.fmu"));
            pack(&tree, binaries(), &path).map_err(|e| e.to_string())?;
            let report = validate(&path).map_err(|e| e.to_string())?;
            ensure!(report.exit_code() == 0, "{name}: validation failed\n{report}");
            digests.push(Sha256::digest(std::fs::read(&path).map_err(|e| e.to_string())?));
        }
        ensure!(digests[0] == digests[1], "{name}: repacked archive differs");
        hashes.push(format!("{name}:{}", &hex::encode(digests[0])[..12]));
    }
    Ok(hashes.join(" "))
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("echo model description", echo_description),
        ("type mapping table", type_table),
        ("multi-rate drive cycle", drive_cycle),
        ("time accounting", time_accounting),
        ("ecc parity oracle", ecc_oracle),
        ("step-count scaling", scaling),
        ("packaging round trip", packaging),
    ];
    let mut failed = 0;
    for (name, criterion) in criteria {
        match criterion() {
            Ok(detail) => println!("PASS  {name:<24} {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name:<24} {why}");
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
