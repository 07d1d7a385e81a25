//! In-process models used as co-simulation partners and as test doubles.
//!
//! The I2C and ECC models follow the fixture SystemC targets transaction for
//! transaction, so one `doStep` corresponds to one TLM transaction. The ECU
//! and vehicle models form the single-pedal drive scenario.

mod ecc;
mod echo;
mod ecu;
mod i2c;
mod scripted;
mod vehicle;

use crate::cosim::{Backend, InProcess};
use crate::fmi_map::{instantiation_token, Causality, FmiType, FmiVariable, ModelDescription};
use crate::time::RationalTime;

pub use ecc::{parity, Ecc, EccInputs, EccOutputs};
pub use echo::Echo;
pub use ecu::{Ecu, TorquePhase, DRIVE_CYCLE};
pub use i2c::{BusState, I2cBus, ALU_ADDRESS, REGFILE_ADDRESS};
pub use scripted::{CallLog, StepCall, Scripted};
pub use vehicle::{Vehicle, VehicleParams};

/// Names accepted by [`backend`].
pub const MODELS: [&str; 5] = ["echo", "i2c", "ecc", "ecu", "vehicle"];

/// A fresh in-process backend for a model name from [`MODELS`].
pub fn backend(name: &str) -> Option<Box<dyn Backend>> {
    Some(match name {
        "echo" => Box::new(InProcess::new(Echo::default())),
        "i2c" => Box::new(InProcess::new(I2cBus::default())),
        "ecc" => Box::new(InProcess::new(Ecc::default())),
        "ecu" => Box::new(InProcess::new(Ecu::default())),
        "vehicle" => Box::new(InProcess::new(Vehicle::default())),
        _ => return None,
    })
}

pub(crate) fn var(name: &str, vr: u32, fmi_type: FmiType, causality: Causality, start: Option<&str>) -> FmiVariable {
    FmiVariable { name: name.into(), value_reference: vr, fmi_type, causality, start: start.map(String::from) }
}

pub(crate) fn model(name: &str, variables: Vec<FmiVariable>, step: Option<RationalTime>) -> ModelDescription {
    ModelDescription {
        fmi_version: "3.0".into(),
        model_name: name.into(),
        model_identifier: name.into(),
        instantiation_token: instantiation_token(&variables),
        variables,
        default_step_size: step,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_model_is_valid() {
        for name in MODELS {
            let b = backend(name).unwrap();
            b.model_description().validate().unwrap_or_else(|e| panic!("{name}: {e}"));
        }
        assert!(backend("nope").is_none());
    }
}
