use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};

use crate::cosim::{Behavior, StepResult, Variables};
use crate::fmi_map::ModelDescription;
use crate::time::RationalTime;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepCall {
    pub current: RationalTime,
    pub step: RationalTime,
    pub advanced: RationalTime,
    pub early_return: bool,
}

/// Shared record of every `doStep` a [`Scripted`] model received.
pub type CallLog = Arc<Mutex<Vec<StepCall>>>;

/// Wraps a model and returns early on chosen `doStep` calls.
///
/// `early[k] = f` makes the `k`-th call (0-based) advance only `f` times the
/// requested step before reporting an early return.
pub struct Scripted<B> {
    inner: B,
    early: BTreeMap<u64, RationalTime>,
    calls: u64,
    log: CallLog,
}

impl<B: Behavior> Scripted<B> {
    pub fn new(inner: B, early: impl IntoIterator<Item = (u64, RationalTime)>) -> Self {
        Self { inner, early: early.into_iter().collect(), calls: 0, log: CallLog::default() }
    }

    pub fn log(&self) -> CallLog {
        Arc::clone(&self.log)
    }
}

impl<B: Behavior> Behavior for Scripted<B> {
    fn model_description(&self) -> ModelDescription {
        self.inner.model_description()
    }

    fn initialize(&mut self, vars: &mut Variables) {
        self.inner.initialize(vars);
    }

    fn step(&mut self, vars: &mut Variables, current: RationalTime, step: RationalTime) -> StepResult {
        let call = self.calls;
        self.calls += 1;
        let result = match self.early.get(&call) {
            Some(&fraction) => {
                let advanced = step * fraction;
                self.inner.step(vars, current, advanced);
                StepResult::early(advanced)
            }
            None => self.inner.step(vars, current, step),
        };
        self.log.lock().expect("log lock").push(StepCall {
            current,
            step,
            advanced: result.last_successful_time,
            early_return: result.early_return,
        });
        result
    }
}
