use super::{model, var};
use crate::cosim::{Behavior, StepResult, Variables};
use crate::fmi_map::{Causality, FmiType, ModelDescription, Value};
use crate::time::RationalTime;

const DERATE: u32 = 1;
const TORQUE: u32 = 2;

/// Linear torque segment over `(start, end]`, in seconds and N·m.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorquePhase {
    pub start: f64,
    pub end: f64,
    pub from: f64,
    pub to: f64,
}

/// Accelerate, hold, regenerate, cruise.
pub const DRIVE_CYCLE: [TorquePhase; 4] = [
    TorquePhase { start: 0.0, end: 10.0, from: 0.0, to: 120.0 },
    TorquePhase { start: 10.0, end: 18.0, from: 120.0, to: 120.0 },
    TorquePhase { start: 18.0, end: 26.0, from: -80.0, to: -80.0 },
    TorquePhase { start: 26.0, end: 35.0, from: 30.0, to: 30.0 },
];

/// Single-pedal ECU: emits the torque request of a phase table, scaled by
/// the `fmi_derate` input clamped to `[0, 1]`.
#[derive(Debug, Clone)]
pub struct Ecu {
    pub phases: Vec<TorquePhase>,
}

impl Default for Ecu {
    fn default() -> Self {
        Self { phases: DRIVE_CYCLE.to_vec() }
    }
}

impl Ecu {
    pub fn description() -> ModelDescription {
        model(
            "ecu",
            vec![
                var("fmi_derate", DERATE, FmiType::Float64, Causality::Input, Some("1")),
                var("fmi_torque_request", TORQUE, FmiType::Float64, Causality::Output, None),
            ],
            Some(RationalTime::new(1, 10).expect("nonzero")),
        )
    }

    /// Requested torque at `t` before derating.
    pub fn torque_at(&self, t: f64) -> f64 {
        let Some(first) = self.phases.first() else { return 0.0 };
        if t <= first.start {
            return first.from;
        }
        for p in &self.phases {
            if t > p.start && t <= p.end {
                return p.from + (p.to - p.from) * (t - p.start) / (p.end - p.start);
            }
        }
        self.phases.last().map_or(0.0, |p| p.to)
    }

    fn publish(&self, vars: &mut Variables, t: f64) {
        let derate = vars.f64(DERATE).clamp(0.0, 1.0);
        vars.set(TORQUE, Value::Float64(self.torque_at(t) * derate));
    }
}

impl Behavior for Ecu {
    fn model_description(&self) -> ModelDescription {
        Self::description()
    }

    fn initialize(&mut self, vars: &mut Variables) {
        self.publish(vars, 0.0);
    }

    fn step(&mut self, vars: &mut Variables, current: RationalTime, step: RationalTime) -> StepResult {
        self.publish(vars, (current + step).to_f64());
        StepResult::completed(step)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phase_table() {
        let ecu = Ecu::default();
        assert_eq!(ecu.torque_at(0.0), 0.0);
        assert!((ecu.torque_at(5.0) - 60.0).abs() < 1e-12);
        assert_eq!(ecu.torque_at(10.0), 120.0);
        assert_eq!(ecu.torque_at(18.0), 120.0);
        assert_eq!(ecu.torque_at(18.1), -80.0);
        assert_eq!(ecu.torque_at(26.0), -80.0);
        assert_eq!(ecu.torque_at(30.0), 30.0);
        assert_eq!(ecu.torque_at(40.0), 30.0);
    }

    #[test]
    fn derate_scales_and_clamps() {
        let ecu = Ecu::default();
        let mut vars = Variables::from_description(&Ecu::description());
        vars.set(DERATE, Value::Float64(0.5));
        ecu.publish(&mut vars, 10.0);
        assert_eq!(vars.f64(TORQUE), 60.0);
        vars.set(DERATE, Value::Float64(3.0));
        ecu.publish(&mut vars, 10.0);
        assert_eq!(vars.f64(TORQUE), 120.0);
    }
}
