mod common;

use common::{fixture_dir, fixture_plan};
use tlm2fmu::behavioral::{self, Ecc, Echo, I2cBus, Vehicle};
use tlm2fmu::codegen::BuildFlavor;
use tlm2fmu::fmi_map::{parse_xml, Causality, FmiType, ModelDescription};

fn same_interface(model: &ModelDescription, generated: &ModelDescription) {
    assert_eq!(model.variables, generated.variables, "{}", model.model_name);
    assert_eq!(model.instantiation_token, generated.instantiation_token);
}

#[test]
fn models_share_the_generated_interfaces() {
    let dir = tempfile::tempdir().unwrap();
    same_interface(&Echo::description(), &fixture_plan("echo", dir.path(), BuildFlavor::Cmake).md);
    same_interface(&I2cBus::description(), &fixture_plan("i2c", dir.path(), BuildFlavor::Cmake).md);
    same_interface(&Ecc::description(), &fixture_plan("ecc", dir.path(), BuildFlavor::Cmake).md);
}

#[test]
fn vehicle_matches_the_plant_description() {
    let text = std::fs::read_to_string(fixture_dir("vehicle").join("modelDescription.xml")).unwrap();
    let plant = parse_xml(&text).unwrap();
    let model = Vehicle::description();
    assert_eq!(model.variables, plant.variables);
    assert_eq!(model.model_identifier, plant.model_identifier);
    assert_eq!(model.instantiation_token, plant.instantiation_token);
    assert_eq!(model.with_causality(Causality::Parameter).count(), 16);
}

#[test]
fn described_variable_counts() {
    let echo = Echo::description();
    assert_eq!(echo.inputs().count(), 1);
    assert_eq!(echo.outputs().count(), 1);
    assert!(echo.variables.iter().all(|v| v.fmi_type == FmiType::Int32));

    let i2c = I2cBus::description();
    assert_eq!(i2c.variables.len(), 7);
    let count = |t: FmiType| i2c.variables.iter().filter(|v| v.fmi_type == t).count();
    assert_eq!((count(FmiType::Bool), count(FmiType::UInt8), count(FmiType::Int32)), (3, 2, 2));

    for name in behavioral::MODELS {
        assert!(behavioral::backend(name).is_some());
    }
}

mod oracle {
    use rand::{RngExt, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use tlm2fmu::cosim::FmuInstance;
    use tlm2fmu::fmi_map::Value;
    use tlm2fmu::time::RationalTime;

    fn xor_fold(data: u16, width: u32) -> bool {
        let mut p = false;
        for bit in 0..width {
            p ^= (data >> bit) & 1 == 1;
        }
        p
    }

    fn ecc() -> FmuInstance {
        let mut ecc = FmuInstance::new("ecc", tlm2fmu::behavioral::backend("ecc").unwrap()).unwrap();
        ecc.enter_initialization(RationalTime::ZERO).unwrap();
        ecc.exit_initialization().unwrap();
        ecc.set_input("fmi_enable", Value::Bool(true)).unwrap();
        ecc
    }

    fn check(ecc: &mut FmuInstance, data: u16, word: bool) {
        ecc.set_input("fmi_word_mode", Value::Bool(word)).unwrap();
        ecc.set_input("fmi_data_in", Value::Binary(data.to_le_bytes().to_vec())).unwrap();
        ecc.do_step(RationalTime::new(1, 10).unwrap()).unwrap();
        let expected = xor_fold(data, if word { 16 } else { 8 });
        assert_eq!(ecc.get_output("fmi_parity_out").unwrap(), Value::Bool(expected), "data {data:#06x}");
        assert_eq!(ecc.get_output("fmi_error").unwrap(), Value::Bool(expected), "data {data:#06x}");
    }

    #[test]
    fn every_byte() {
        let mut ecc = ecc();
        for byte in 0..=255u16 {
            check(&mut ecc, byte, false);
        }
    }

    #[test]
    fn sampled_words() {
        let mut ecc = ecc();
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        for _ in 0..4096 {
            check(&mut ecc, rng.random(), true);
        }
    }
}

#[test]
fn ecu_cycle_extremes() {
    let ecu = tlm2fmu::behavioral::Ecu::default();
    let samples: Vec<f64> = (0..=3500).map(|k| ecu.torque_at(k as f64 / 100.0)).collect();
    let max = samples.iter().copied().fold(f64::MIN, f64::max);
    let min = samples.iter().copied().fold(f64::MAX, f64::min);
    assert_eq!((max, min), (120.0, -80.0));
    assert_eq!(ecu.torque_at(0.0), 0.0);
}
