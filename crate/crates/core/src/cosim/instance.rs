use std::collections::BTreeMap;

use super::{Backend, CosimError, StepResult};
use crate::fmi_map::{Causality, FmiVariable, ModelDescription, Value};
use crate::time::RationalTime;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InstanceState {
    Instantiated,
    Initialization,
    StepMode,
    Terminated,
}

/// A backend plus the life-cycle and causality checks the master relies on.
///
/// Inputs may only be set and outputs only read; every value written or read
/// is kept so traces can report inputs without asking the backend.
pub struct FmuInstance {
    id: String,
    md: ModelDescription,
    backend: Box<dyn Backend>,
    state: InstanceState,
    time: RationalTime,
    last: BTreeMap<u32, Value>,
}

impl FmuInstance {
    pub fn new(id: impl Into<String>, mut backend: Box<dyn Backend>) -> Result<Self, CosimError> {
        let id = id.into();
        let md = backend.model_description().clone();
        backend
            .instantiate(&id)
            .map_err(|e| CosimError::BackendInitFailure { instance: id.clone(), reason: e.0 })?;
        Ok(Self { id, md, backend, state: InstanceState::Instantiated, time: RationalTime::ZERO, last: BTreeMap::new() })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn model_description(&self) -> &ModelDescription {
        &self.md
    }

    pub fn state(&self) -> InstanceState {
        self.state
    }

    /// End of the last completed step.
    pub fn time(&self) -> RationalTime {
        self.time
    }

    pub fn variable(&self, name: &str) -> Result<&FmiVariable, CosimError> {
        self.md
            .variable(name)
            .ok_or_else(|| CosimError::UnknownVariable { instance: self.id.clone(), variable: name.to_string() })
    }

    fn expect_state(&self, operation: &'static str, allowed: &[InstanceState]) -> Result<(), CosimError> {
        if allowed.contains(&self.state) {
            Ok(())
        } else {
            Err(CosimError::InvalidState { instance: self.id.clone(), operation, state: self.state })
        }
    }

    fn init_failure(&self, e: super::BackendError) -> CosimError {
        CosimError::BackendInitFailure { instance: self.id.clone(), reason: e.0 }
    }

    /// Enters initialization mode and applies the inputs' start values.
    pub fn enter_initialization(&mut self, start_time: RationalTime) -> Result<(), CosimError> {
        self.expect_state("enter initialization", &[InstanceState::Instantiated])?;
        self.backend.enter_initialization_mode(start_time).map_err(|e| self.init_failure(e))?;
        self.state = InstanceState::Initialization;
        self.time = start_time;
        let starts: Vec<(String, Value)> =
            self.md.inputs().filter_map(|v| Some((v.name.clone(), v.start_value()?))).collect();
        for (name, value) in starts {
            self.set_input(&name, value)?;
        }
        Ok(())
    }

    pub fn exit_initialization(&mut self) -> Result<(), CosimError> {
        self.expect_state("exit initialization", &[InstanceState::Initialization])?;
        self.backend.exit_initialization_mode().map_err(|e| self.init_failure(e))?;
        self.state = InstanceState::StepMode;
        Ok(())
    }

    /// Sets a parameter; only allowed during initialization.
    pub fn set_parameter(&mut self, name: &str, value: Value) -> Result<(), CosimError> {
        self.expect_state("set parameters", &[InstanceState::Initialization])?;
        let var = self.variable(name)?.clone();
        if var.causality != Causality::Parameter {
            return Err(CosimError::CausalityViolation {
                variable: name.to_string(),
                causality: var.causality,
                operation: "parameter assignment",
            });
        }
        self.write(&var, value)
    }

    pub fn set_input(&mut self, name: &str, value: Value) -> Result<(), CosimError> {
        self.expect_state("set inputs", &[InstanceState::Initialization, InstanceState::StepMode])?;
        let var = self.variable(name)?.clone();
        if var.causality != Causality::Input {
            return Err(CosimError::CausalityViolation {
                variable: name.to_string(),
                causality: var.causality,
                operation: "input assignment",
            });
        }
        self.write(&var, value)
    }

    fn write(&mut self, var: &FmiVariable, value: Value) -> Result<(), CosimError> {
        if !value.fits(var.fmi_type) {
            return Err(CosimError::TypeMismatch {
                context: format!("{}.{}", self.id, var.name),
                expected: var.fmi_type,
                found: value.fmi_type(),
            });
        }
        let time = self.time;
        self.backend
            .set(var.value_reference, &value)
            .map_err(|e| CosimError::BackendStepFailure { instance: self.id.clone(), time, reason: e.0 })?;
        self.last.insert(var.value_reference, value);
        Ok(())
    }

    pub fn get_output(&mut self, name: &str) -> Result<Value, CosimError> {
        self.expect_state("get outputs", &[InstanceState::Initialization, InstanceState::StepMode])?;
        let var = self.variable(name)?.clone();
        if var.causality != Causality::Output {
            return Err(CosimError::CausalityViolation {
                variable: name.to_string(),
                causality: var.causality,
                operation: "output read",
            });
        }
        let time = self.time;
        let value = self
            .backend
            .get(var.value_reference)
            .map_err(|e| CosimError::BackendStepFailure { instance: self.id.clone(), time, reason: e.0 })?;
        if !value.fits(var.fmi_type) {
            return Err(CosimError::TypeMismatch {
                context: format!("{}.{}", self.id, var.name),
                expected: var.fmi_type,
                found: value.fmi_type(),
            });
        }
        self.last.insert(var.value_reference, value.clone());
        Ok(value)
    }

    /// Most recent value written to or read from `name`.
    pub fn last_value(&self, name: &str) -> Option<&Value> {
        let vr = self.md.variable(name)?.value_reference;
        self.last.get(&vr)
    }

    /// One raw `doStep` call from the instance's current time.
    pub fn do_step(&mut self, step: RationalTime) -> Result<StepResult, CosimError> {
        self.expect_state("step", &[InstanceState::StepMode])?;
        let time = self.time;
        let fail = |reason: String| CosimError::BackendStepFailure { instance: self.id.clone(), time, reason };
        let result = self.backend.do_step(time, step).map_err(|e| fail(e.0))?;
        match result.status {
            super::StepStatus::Ok | super::StepStatus::Warning => {}
            other => return Err(fail(format!("doStep returned {other:?}"))),
        }
        if result.last_successful_time > step {
            return Err(fail(format!("advanced {} beyond the requested step {step}", result.last_successful_time)));
        }
        if !result.early_return && result.last_successful_time != step {
            return Err(fail("completed step reports a partial advance".into()));
        }
        self.time = time
            .checked_add(result.last_successful_time)
            .ok_or_else(|| fail(format!("time {time} + {} is not representable", result.last_successful_time)))?;
        Ok(result)
    }

    pub fn terminate(&mut self) -> Result<(), CosimError> {
        if self.state == InstanceState::Terminated {
            return Ok(());
        }
        let time = self.time;
        self.backend
            .terminate()
            .map_err(|e| CosimError::BackendStepFailure { instance: self.id.clone(), time, reason: e.0 })?;
        self.state = InstanceState::Terminated;
        Ok(())
    }
}

impl std::fmt::Debug for FmuInstance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FmuInstance")
            .field("id", &self.id)
            .field("model", &self.md.model_name)
            .field("state", &self.state)
            .field("time", &self.time)
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::behavioral;

    fn echo() -> FmuInstance {
        FmuInstance::new("e", behavioral::backend("echo").unwrap()).unwrap()
    }

    #[test]
    fn life_cycle_is_enforced() {
        let mut e = echo();
        assert!(matches!(e.set_input("fmi_data_in", Value::Int32(1)), Err(CosimError::InvalidState { .. })));
        e.enter_initialization(RationalTime::ZERO).unwrap();
        assert!(matches!(e.do_step(RationalTime::from_secs(1)), Err(CosimError::InvalidState { .. })));
        e.exit_initialization().unwrap();
        e.set_input("fmi_data_in", Value::Int32(5)).unwrap();
        e.do_step(RationalTime::from_secs(1)).unwrap();
        assert_eq!(e.get_output("fmi_data_out").unwrap(), Value::Int32(5));
        assert_eq!(e.time(), RationalTime::from_secs(1));
        e.terminate().unwrap();
        assert_eq!(e.state(), InstanceState::Terminated);
    }

    #[test]
    fn causality_and_types() {
        let mut e = echo();
        e.enter_initialization(RationalTime::ZERO).unwrap();
        e.exit_initialization().unwrap();
        assert!(matches!(e.set_input("fmi_data_out", Value::Int32(1)), Err(CosimError::CausalityViolation { .. })));
        assert!(matches!(e.get_output("fmi_data_in"), Err(CosimError::CausalityViolation { .. })));
        assert!(matches!(e.set_input("fmi_data_in", Value::Float64(1.0)), Err(CosimError::TypeMismatch { .. })));
        assert!(matches!(e.set_input("fmi_result", Value::Int32(1)), Err(CosimError::UnknownVariable { .. })));
    }
}
