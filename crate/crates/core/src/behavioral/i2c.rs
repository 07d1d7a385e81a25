use super::{model, var};
use crate::cosim::{Behavior, StepResult, Variables};
use crate::fmi_map::{Causality, FmiType, ModelDescription, Value};
use crate::time::RationalTime;

pub const ALU_ADDRESS: i32 = 0x21;
pub const REGFILE_ADDRESS: i32 = 0x42;

const START: u32 = 1;
const RW: u32 = 2;
const SLAVE: u32 = 3;
const WDATA: u32 = 4;
const ACK: u32 = 5;
const RDATA: u32 = 6;
const STATE: u32 = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BusState {
    #[default]
    Idle = 0,
    Addressing = 1,
    Ack = 2,
    Transfer = 3,
}

/// Bus controller with an ALU accumulator at 0x21 and a register-file cell
/// at 0x42. Each step is one protocol phase: idle, addressing, ack, transfer.
#[derive(Debug, Clone, Default)]
pub struct I2cBus {
    state: BusState,
    latched_rw: bool,
    latched_slave: i32,
    alu_acc: u8,
    regfile_cell: u8,
}

impl I2cBus {
    pub fn description() -> ModelDescription {
        model(
            "i2c",
            vec![
                var("fmi_start", START, FmiType::Bool, Causality::Input, Some("false")),
                var("fmi_rw", RW, FmiType::Bool, Causality::Input, Some("false")),
                var("fmi_slave", SLAVE, FmiType::Int32, Causality::Input, Some("0")),
                var("fmi_wdata", WDATA, FmiType::UInt8, Causality::Input, Some("0")),
                var("fmi_ack", ACK, FmiType::Bool, Causality::Output, None),
                var("fmi_rdata", RDATA, FmiType::UInt8, Causality::Output, None),
                var("fmi_state", STATE, FmiType::Int32, Causality::Output, None),
            ],
            None,
        )
    }

    pub fn state(&self) -> BusState {
        self.state
    }

    /// Register contents as `(alu, regfile)`.
    pub fn registers(&self) -> (u8, u8) {
        (self.alu_acc, self.regfile_cell)
    }

    fn address_valid(addr: i32) -> bool {
        addr == ALU_ADDRESS || addr == REGFILE_ADDRESS
    }
}

impl Behavior for I2cBus {
    fn model_description(&self) -> ModelDescription {
        Self::description()
    }

    fn initialize(&mut self, _vars: &mut Variables) {
        *self = Self::default();
    }

    fn step(&mut self, vars: &mut Variables, _current: RationalTime, step: RationalTime) -> StepResult {
        match self.state {
            BusState::Idle => {
                vars.set(ACK, Value::Bool(false));
                if vars.bool(START) {
                    self.latched_rw = vars.bool(RW);
                    self.latched_slave = vars.i64(SLAVE) as i32;
                    self.state = BusState::Addressing;
                }
            }
            BusState::Addressing => {
                if Self::address_valid(self.latched_slave) {
                    vars.set(ACK, Value::Bool(true));
                    self.state = BusState::Ack;
                } else {
                    vars.set(ACK, Value::Bool(false));
                    self.state = BusState::Idle;
                }
            }
            BusState::Ack => {
                vars.set(ACK, Value::Bool(true));
                let alu = self.latched_slave == ALU_ADDRESS;
                if self.latched_rw {
                    vars.set(RDATA, Value::UInt8(if alu { self.alu_acc } else { self.regfile_cell }));
                } else if alu {
                    self.alu_acc = vars.i64(WDATA) as u8;
                } else {
                    self.regfile_cell = vars.i64(WDATA) as u8;
                }
                self.state = BusState::Transfer;
            }
            BusState::Transfer => {
                vars.set(ACK, Value::Bool(false));
                self.state = BusState::Idle;
            }
        }
        vars.set(STATE, Value::Int32(self.state as i32));
        StepResult::completed(step)
    }
}
