use super::{model, var};
use crate::cosim::{Behavior, StepResult, Variables};
use crate::fmi_map::{Causality, FmiType, ModelDescription, Value};
use crate::time::RationalTime;

const ENABLE: u32 = 1;
const WORD_MODE: u32 = 2;
const PARITY_IN: u32 = 3;
const CLEAR: u32 = 4;
const DATA_IN: u32 = 5;
const PARITY_OUT: u32 = 6;
const ERROR: u32 = 7;
const ERROR_LATCHED: u32 = 8;
const DATA_OUT: u32 = 9;
const STATUS: u32 = 10;

/// Even parity (XOR reduction) over the low `width` bits.
pub fn parity(data: u16, width: u32) -> bool {
    let mask = if width >= 16 { u16::MAX } else { (1u16 << width) - 1 };
    (data & mask).count_ones() % 2 == 1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EccInputs {
    pub enable: bool,
    pub word_mode: bool,
    pub parity_in: bool,
    pub clear: bool,
    pub data_in: u16,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EccOutputs {
    /// A disabled unit drives `Z`, which reads back as `false`.
    pub parity_out: bool,
    pub error: bool,
    pub error_latched: bool,
    pub data_out: u16,
    /// Bit 0 error, bit 1 word mode, bits 2..7 error count.
    pub status: u8,
}

/// Byte or word parity checker with a sticky error flag and a 6-bit error counter.
#[derive(Debug, Clone, Default)]
pub struct Ecc {
    sticky: bool,
    count: u8,
    last: EccOutputs,
}

impl Ecc {
    pub fn description() -> ModelDescription {
        let bin2 = FmiType::Binary { size_bytes: 2 };
        model(
            "ecc",
            vec![
                var("fmi_enable", ENABLE, FmiType::Bool, Causality::Input, Some("false")),
                var("fmi_word_mode", WORD_MODE, FmiType::Bool, Causality::Input, Some("false")),
                var("fmi_parity_in", PARITY_IN, FmiType::Bool, Causality::Input, Some("false")),
                var("fmi_clear", CLEAR, FmiType::Bool, Causality::Input, Some("false")),
                var("fmi_data_in", DATA_IN, bin2, Causality::Input, Some("0000")),
                var("fmi_parity_out", PARITY_OUT, FmiType::Bool, Causality::Output, None),
                var("fmi_error", ERROR, FmiType::Bool, Causality::Output, None),
                var("fmi_error_latched", ERROR_LATCHED, FmiType::Bool, Causality::Output, None),
                var("fmi_data_out", DATA_OUT, bin2, Causality::Output, None),
                var("fmi_status", STATUS, FmiType::Binary { size_bytes: 1 }, Causality::Output, None),
            ],
            None,
        )
    }

    /// One transaction.
    pub fn transact(&mut self, i: EccInputs) -> EccOutputs {
        if i.clear {
            self.sticky = false;
            self.count = 0;
        }
        let mut out = self.last;
        if !i.enable {
            out.parity_out = false;
            out.error = false;
        } else {
            let width = if i.word_mode { 16 } else { 8 };
            let masked = if i.word_mode { i.data_in } else { i.data_in & 0xff };
            let p = parity(masked, width);
            let mismatch = p != i.parity_in;
            if mismatch {
                self.sticky = true;
                self.count = (self.count + 1) & 0x3f;
            }
            out.data_out = masked;
            out.parity_out = p;
            out.error = mismatch;
        }
        out.error_latched = self.sticky;
        out.status = u8::from(out.error) | (u8::from(i.word_mode) << 1) | (self.count << 2);
        self.last = out;
        out
    }
}

fn le_u16(bytes: &[u8]) -> u16 {
    let lo = bytes.first().copied().unwrap_or(0);
    let hi = bytes.get(1).copied().unwrap_or(0);
    u16::from_le_bytes([lo, hi])
}

impl Behavior for Ecc {
    fn model_description(&self) -> ModelDescription {
        Self::description()
    }

    fn initialize(&mut self, vars: &mut Variables) {
        *self = Self::default();
        vars.set(DATA_OUT, Value::Binary(vec![0, 0]));
        vars.set(STATUS, Value::Binary(vec![0]));
    }

    fn step(&mut self, vars: &mut Variables, _current: RationalTime, step: RationalTime) -> StepResult {
        let inputs = EccInputs {
            enable: vars.bool(ENABLE),
            word_mode: vars.bool(WORD_MODE),
            parity_in: vars.bool(PARITY_IN),
            clear: vars.bool(CLEAR),
            data_in: le_u16(vars.bytes(DATA_IN)),
        };
        let out = self.transact(inputs);
        vars.set(PARITY_OUT, Value::Bool(out.parity_out));
        vars.set(ERROR, Value::Bool(out.error));
        vars.set(ERROR_LATCHED, Value::Bool(out.error_latched));
        vars.set(DATA_OUT, Value::Binary(out.data_out.to_le_bytes().to_vec()));
        vars.set(STATUS, Value::Binary(vec![out.status]));
        StepResult::completed(step)
    }
}
