use std::collections::VecDeque;

use super::{model, var};
use crate::cosim::{Behavior, StepResult, Variables};
use crate::fmi_map::{Causality, FmiType, ModelDescription, Value};
use crate::time::RationalTime;

const DATA_IN: u32 = 1;
const DATA_OUT: u32 = 2;

/// Copies `fmi_data_in` to `fmi_data_out`, optionally `latency_steps` steps late.
#[derive(Debug, Clone, Default)]
pub struct Echo {
    pub latency_steps: usize,
    pipeline: VecDeque<Value>,
}

impl Echo {
    pub fn with_latency(latency_steps: usize) -> Self {
        Self { latency_steps, pipeline: VecDeque::new() }
    }

    pub fn description() -> ModelDescription {
        model(
            "echo",
            vec![
                var("fmi_data_in", DATA_IN, FmiType::Int32, Causality::Input, Some("0")),
                var("fmi_data_out", DATA_OUT, FmiType::Int32, Causality::Output, None),
            ],
            None,
        )
    }
}

impl Behavior for Echo {
    fn model_description(&self) -> ModelDescription {
        Self::description()
    }

    fn initialize(&mut self, _vars: &mut Variables) {
        self.pipeline.clear();
    }

    fn step(&mut self, vars: &mut Variables, _current: RationalTime, step: RationalTime) -> StepResult {
        self.pipeline.push_back(vars.get(DATA_IN).cloned().unwrap_or(Value::Int32(0)));
        if self.pipeline.len() > self.latency_steps {
            let out = self.pipeline.pop_front().expect("non-empty");
            vars.set(DATA_OUT, out);
        }
        StepResult::completed(step)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cosim::{Backend, InProcess};

    fn run(latency: usize, inputs: &[i32]) -> Vec<Value> {
        let mut b = InProcess::new(Echo::with_latency(latency));
        b.instantiate("e").unwrap();
        b.enter_initialization_mode(RationalTime::ZERO).unwrap();
        b.exit_initialization_mode().unwrap();
        let h: RationalTime = "0.1".parse().unwrap();
        let mut t = RationalTime::ZERO;
        let mut out = Vec::new();
        for &x in inputs {
            b.set(DATA_IN, &Value::Int32(x)).unwrap();
            b.do_step(t, h).unwrap();
            t = t + h;
            out.push(b.get(DATA_OUT).unwrap());
        }
        out
    }

    #[test]
    fn echoes() {
        assert_eq!(run(0, &[5, -7]), [Value::Int32(5), Value::Int32(-7)]);
    }

    #[test]
    fn latency_delays_output() {
        assert_eq!(run(2, &[1, 2, 3, 4]), [0, 0, 1, 2].map(Value::Int32));
    }
}
