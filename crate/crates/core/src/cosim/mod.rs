//! Multi-rate co-simulation of FMU networks.
//!
//! A [`CoSimSchedule`] names instances, their step sizes and the connections
//! between them. [`instantiate`] checks the network and initializes every
//! instance; [`Network::run`] then advances all instances on the exact GCD
//! of their step sizes, holding outputs constant between producer steps.

mod inprocess;
mod instance;
mod library;
mod master;
mod trace;

use thiserror::Error;

use crate::fmi_map::{Causality, FmiType, ModelDescription, Value};
use crate::package::{PackageError, PlatformTuple};
use crate::time::RationalTime;

pub use inprocess::{Behavior, InProcess, Variables};
pub use instance::{FmuInstance, InstanceState};
pub use library::LibraryBackend;
pub use master::{instantiate, CoSimSchedule, Connection, Network, PortRef, RunStats, MAX_EARLY_RETURNS};
pub use trace::{Trace, TraceRow};

#[derive(Debug, Error)]
pub enum CosimError {
    #[error("schedule has no instances")]
    EmptySchedule,
    #[error("instance '{0}' is declared twice")]
    DuplicateInstance(String),
    #[error("unknown instance '{0}'")]
    UnknownInstance(String),
    #[error("instance '{instance}' has no variable '{variable}'")]
    UnknownVariable { instance: String, variable: String },
    #[error("'{variable}' has causality {causality} and cannot be used for {operation}")]
    CausalityViolation { variable: String, causality: Causality, operation: &'static str },
    #[error("{context}: expected {expected}, found {found}")]
    TypeMismatch { context: String, expected: FmiType, found: FmiType },
    #[error("input {0} is driven by more than one connection")]
    DuplicateSink(String),
    #[error("step size of '{0}' must be positive")]
    InvalidStepSize(String),
    #[error("stop time must be positive")]
    InvalidStopTime,
    #[error("'{instance}' cannot {operation} while {state:?}")]
    InvalidState { instance: String, operation: &'static str, state: InstanceState },
    #[error("'{instance}' failed to initialize: {reason}")]
    BackendInitFailure { instance: String, reason: String },
    #[error("'{instance}' failed at t={time}: {reason}")]
    BackendStepFailure { instance: String, time: RationalTime, reason: String },
    #[error("'{instance}' returned early {count} times in a row at t={time}")]
    EarlyReturnLivelock { instance: String, time: RationalTime, count: u32 },
    #[error("'{instance}' is at t={actual}, expected t={expected}")]
    DivergedClock { instance: String, expected: RationalTime, actual: RationalTime },
    #[error("archive has no binary for {0}")]
    MissingBinary(PlatformTuple),
    #[error("library is missing {}", names.join(", "))]
    MissingSymbol { names: Vec<String> },
    #[error("cannot load library: {0}")]
    Library(String),
    #[error(transparent)]
    Package(#[from] PackageError),
}

/// Outcome status of a single `doStep` call.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepStatus {
    Ok,
    Warning,
    Discard,
    Error,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepResult {
    pub status: StepStatus,
    pub early_return: bool,
    /// Time actually advanced, measured from the communication point.
    pub last_successful_time: RationalTime,
}

impl StepResult {
    pub fn completed(step: RationalTime) -> Self {
        Self { status: StepStatus::Ok, early_return: false, last_successful_time: step }
    }

    pub fn early(advanced: RationalTime) -> Self {
        Self { status: StepStatus::Ok, early_return: true, last_successful_time: advanced }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{0}")]
pub struct BackendError(pub String);

impl BackendError {
    pub fn new(message: impl Into<String>) -> Self {
        Self(message.into())
    }
}

/// One FMU implementation, native or in-process.
///
/// Calls follow the FMI 3.0 co-simulation life cycle; [`FmuInstance`] checks
/// the order so implementations do not have to.
pub trait Backend: Send {
    fn model_description(&self) -> &ModelDescription;
    fn instantiate(&mut self, instance_name: &str) -> Result<(), BackendError>;
    fn enter_initialization_mode(&mut self, start_time: RationalTime) -> Result<(), BackendError>;
    fn exit_initialization_mode(&mut self) -> Result<(), BackendError>;
    fn set(&mut self, value_reference: u32, value: &Value) -> Result<(), BackendError>;
    fn get(&mut self, value_reference: u32) -> Result<Value, BackendError>;
    fn do_step(&mut self, current: RationalTime, step: RationalTime) -> Result<StepResult, BackendError>;
    fn terminate(&mut self) -> Result<(), BackendError>;
}
