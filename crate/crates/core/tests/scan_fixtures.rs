use std::path::{Path, PathBuf};

use tlm2fmu::tlm_scan::{analyze, extract_header, Direction, ScanError, SourceType, SourceUnit};

fn fixture(dir: &str) -> Vec<SourceUnit> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(dir);
    let mut paths: Vec<PathBuf> = std::fs::read_dir(&root).unwrap().map(|e| e.unwrap().path()).collect();
    paths.sort();
    paths.iter().map(|p| SourceUnit::load(p).unwrap()).collect()
}

fn split(units: &[SourceUnit]) -> (Vec<String>, Vec<String>) {
    let a = analyze(units, None).unwrap();
    let names = |d| a.spec.fields.iter().filter(|f| f.direction == Some(d)).map(|f| f.name.clone()).collect();
    (names(Direction::Input), names(Direction::Output))
}

#[test]
fn echo_target() {
    let units = fixture("echo");
    let a = analyze(&units, None).unwrap();
    assert_eq!(a.spec.record_name, "payload");
    assert!(a.surface.has_blocking && !a.surface.has_nonblocking);
    assert_eq!(a.surface.module_name.as_deref(), Some("EchoTarget"));
    assert_eq!(a.surface.socket_name.as_deref(), Some("target_socket"));
    assert_eq!(split(&units), (vec!["data_in".into()], vec!["data_out".into()]));
    assert!(a.diagnostics.is_empty(), "{:?}", a.diagnostics);
}

#[test]
fn i2c_bus() {
    let units = fixture("i2c");
    let a = analyze(&units, None).unwrap();
    assert_eq!(a.spec.record_name, "i2c_payload");
    assert_eq!(
        split(&units),
        (
            ["start", "rw", "slave", "wdata"].map(String::from).to_vec(),
            ["ack", "rdata", "state"].map(String::from).to_vec()
        )
    );
    let slave = &a.spec.fields[2];
    assert_eq!(slave.source_type, SourceType::Enum("SlaveAddress".into()));
    assert_eq!(a.spec.enums.len(), 2);
}

#[test]
fn ecc_unit() {
    let units = fixture("ecc");
    let a = analyze(&units, None).unwrap();
    assert!(a.surface.has_nonblocking && !a.surface.has_blocking);
    assert_eq!(
        split(&units),
        (
            ["enable", "word_mode", "parity_in", "clear", "data_in"].map(String::from).to_vec(),
            ["parity_out", "error", "error_latched", "data_out", "status"].map(String::from).to_vec()
        )
    );
    assert_eq!(a.diagnostics.len(), 1, "{:?}", a.diagnostics);
    assert!(a.diagnostics[0].message.contains("parity_out"));
    let header = extract_header(&a.spec);
    assert!(header.contains("sc_dt::sc_bv<16> data_in;"));
}

#[test]
fn two_records_picks_the_cast_record() {
    let units = fixture("two_records");
    let a = analyze(&units, None).unwrap();
    assert_eq!(a.spec.record_name, "dma_request");
    assert_eq!(split(&units).1, vec!["transferred".to_string()]);
    let err = analyze(&units, Some("missing")).unwrap_err();
    assert!(matches!(err, ScanError::RecordHintNotFound(_)));
}

#[test]
fn third_party_vehicle_description() {
    use tlm2fmu::fmi_map::{parse_xml_with_warnings, Causality};
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/vehicle/modelDescription.xml");
    let (md, warnings) = parse_xml_with_warnings(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(md.variables.len(), 19);
    assert_eq!(md.with_causality(Causality::Independent).count(), 1);
    assert_eq!(md.inputs().map(|v| v.name.as_str()).collect::<Vec<_>>(), ["Torque_Request"]);
    assert_eq!(md.outputs().map(|v| v.name.as_str()).collect::<Vec<_>>(), ["Vehicle_Speed"]);
    assert_eq!(md.with_causality(Causality::Parameter).count(), 16);
    md.validate().unwrap();
    assert!(!warnings.is_empty());
}
