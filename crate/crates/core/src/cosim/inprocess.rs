use std::collections::BTreeMap;

use super::{Backend, BackendError, StepResult};
use crate::fmi_map::{Causality, ModelDescription, Value};
use crate::time::RationalTime;

/// Variable storage of an in-process model, keyed by value reference.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Variables {
    values: BTreeMap<u32, Value>,
}

impl Variables {
    /// Start values from the description; outputs without one get the type default.
    pub fn from_description(md: &ModelDescription) -> Self {
        let values = md
            .variables
            .iter()
            .map(|v| {
                let start = v.start_value().or_else(|| Value::parse_literal(v.fmi_type, &v.fmi_type.default_start()));
                (v.value_reference, start.expect("type default always parses"))
            })
            .collect();
        Self { values }
    }

    pub fn get(&self, vr: u32) -> Option<&Value> {
        self.values.get(&vr)
    }

    pub fn set(&mut self, vr: u32, value: Value) {
        self.values.insert(vr, value);
    }

    pub fn bool(&self, vr: u32) -> bool {
        matches!(self.values.get(&vr), Some(Value::Bool(true)))
    }

    pub fn f64(&self, vr: u32) -> f64 {
        self.values.get(&vr).and_then(Value::as_f64).unwrap_or(0.0)
    }

    pub fn i64(&self, vr: u32) -> i64 {
        self.f64(vr) as i64
    }

    pub fn bytes(&self, vr: u32) -> &[u8] {
        match self.values.get(&vr) {
            Some(Value::Binary(b)) => b,
            _ => &[],
        }
    }
}

/// Model logic driven by [`InProcess`].
pub trait Behavior: Send {
    fn model_description(&self) -> ModelDescription;

    /// Called when initialization mode is left; outputs should be made consistent with inputs.
    fn initialize(&mut self, vars: &mut Variables) {
        let _ = vars;
    }

    fn step(&mut self, vars: &mut Variables, current: RationalTime, step: RationalTime) -> StepResult;
}

/// Runs a [`Behavior`] inside the master process.
pub struct InProcess<B> {
    md: ModelDescription,
    vars: Variables,
    time: RationalTime,
    behavior: B,
}

impl<B: Behavior> InProcess<B> {
    pub fn new(behavior: B) -> Self {
        let md = behavior.model_description();
        let vars = Variables::from_description(&md);
        Self { md, vars, time: RationalTime::ZERO, behavior }
    }

    pub fn behavior(&self) -> &B {
        &self.behavior
    }

    pub fn variables(&self) -> &Variables {
        &self.vars
    }

    fn time_vr(&self) -> Option<u32> {
        self.md.with_causality(Causality::Independent).map(|v| v.value_reference).next()
    }
}

impl<B: Behavior> Backend for InProcess<B> {
    fn model_description(&self) -> &ModelDescription {
        &self.md
    }

    fn instantiate(&mut self, _instance_name: &str) -> Result<(), BackendError> {
        self.vars = Variables::from_description(&self.md);
        Ok(())
    }

    fn enter_initialization_mode(&mut self, start_time: RationalTime) -> Result<(), BackendError> {
        self.time = start_time;
        Ok(())
    }

    fn exit_initialization_mode(&mut self) -> Result<(), BackendError> {
        self.behavior.initialize(&mut self.vars);
        Ok(())
    }

    fn set(&mut self, vr: u32, value: &Value) -> Result<(), BackendError> {
        let var = self.md.by_value_reference(vr).ok_or_else(|| BackendError::new(format!("no value reference {vr}")))?;
        if !value.fits(var.fmi_type) {
            return Err(BackendError::new(format!("{} does not accept {}", var.name, value.fmi_type())));
        }
        self.vars.set(vr, value.clone());
        Ok(())
    }

    fn get(&mut self, vr: u32) -> Result<Value, BackendError> {
        if Some(vr) == self.time_vr() {
            return Ok(Value::Float64(self.time.to_f64()));
        }
        self.vars.get(vr).cloned().ok_or_else(|| BackendError::new(format!("no value reference {vr}")))
    }

    fn do_step(&mut self, current: RationalTime, step: RationalTime) -> Result<StepResult, BackendError> {
        let result = self.behavior.step(&mut self.vars, current, step);
        self.time = current + result.last_successful_time;
        Ok(result)
    }

    fn terminate(&mut self) -> Result<(), BackendError> {
        Ok(())
    }
}
