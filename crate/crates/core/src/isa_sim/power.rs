use serde::{Deserialize, Serialize};

use super::{IsaError, Opcode};

/// Per-opcode base energy in pJ per cycle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaseCosts {
    pub mov: f64,
    pub add: f64,
    pub sub: f64,
    pub mul: f64,
    pub lsl: f64,
    pub eor: f64,
    pub and: f64,
    pub or: f64,
    pub nop: f64,
}

impl BaseCosts {
    pub fn get(&self, op: Opcode) -> f64 {
        match op {
            Opcode::Mov => self.mov,
            Opcode::Add => self.add,
            Opcode::Sub => self.sub,
            Opcode::Mul => self.mul,
            Opcode::Lsl => self.lsl,
            Opcode::Eor => self.eor,
            Opcode::And => self.and,
            Opcode::Or => self.or,
            Opcode::Nop => self.nop,
        }
    }

    pub fn uniform(value: f64) -> Self {
        BaseCosts {
            mov: value,
            add: value,
            sub: value,
            mul: value,
            lsl: value,
            eor: value,
            and: value,
            or: value,
            nop: value,
        }
    }

    fn values(&self) -> [f64; 9] {
        Opcode::ALL.map(|op| self.get(op))
    }
}

/// Coefficients of the data-dependent energy model.
///
/// One cycle of instruction `op` costs
/// `base[op] + alpha*(HW(src) + HW(dest)) + beta*HD(bus, result)`, plus
/// `gamma` per active partial-product bit when `op` is `mul`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PowerModelParams {
    pub base: BaseCosts,
    /// pJ per set operand bit.
    pub alpha: f64,
    /// pJ per toggled bit on the result bus.
    pub beta: f64,
    /// pJ per active multiplier partial-product bit.
    pub gamma: f64,
    /// Standard deviation of the per-run measurement noise, pJ.
    pub noise_sigma: f64,
    /// Clock period, ns.
    pub cycle_time: f64,
    /// Whole-chip reference power the mul map range is quoted against, mW.
    pub soc_power: f64,
}

impl Default for PowerModelParams {
    /// Calibrated for an 8 MHz part drawing about 20 mW.
    fn default() -> Self {
        PowerModelParams {
            base: BaseCosts {
                mov: 1850.0,
                add: 1870.0,
                sub: 1870.0,
                mul: 1900.0,
                lsl: 1850.0,
                eor: 1860.0,
                and: 1850.0,
                or: 1860.0,
                nop: 1750.0,
            },
            alpha: 20.0,
            beta: 100.0,
            gamma: 0.859375,
            noise_sigma: 10.0,
            cycle_time: 125.0,
            soc_power: 20.0,
        }
    }
}

impl PowerModelParams {
    pub fn validate(&self) -> Result<(), IsaError> {
        let coeffs = [self.alpha, self.beta, self.gamma, self.noise_sigma];
        if self
            .base
            .values()
            .iter()
            .chain(coeffs.iter())
            .any(|v| !v.is_finite() || *v < 0.0)
        {
            return Err(IsaError::InvalidParams(
                "energy coefficients and noise must be finite and non-negative".into(),
            ));
        }
        if !(self.cycle_time.is_finite() && self.cycle_time > 0.0) {
            return Err(IsaError::InvalidParams("cycle_time must be positive".into()));
        }
        if !(self.soc_power.is_finite() && self.soc_power > 0.0) {
            return Err(IsaError::InvalidParams("soc_power must be positive".into()));
        }
        Ok(())
    }

    /// Copy with measurement noise disabled.
    pub fn noiseless(&self) -> Self {
        PowerModelParams {
            noise_sigma: 0.0,
            ..*self
        }
    }

    /// Converts a per-cycle energy in pJ into power in mW.
    pub fn cycle_power(&self, energy_pj: f64) -> f64 {
        energy_pj / self.cycle_time
    }
}
