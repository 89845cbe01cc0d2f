//! Physical parameters and the Fock-space truncation.
//!
//! Everything internal runs in natural units with `hbar = M = c = 1`. The
//! cyclotron frequency is kept explicit so that the length scale
//! `sqrt(hbar / (M omega_B))` and the period `2 pi / omega_B` remain visible.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const HBAR: f64 = 1.0;
pub const MASS: f64 = 1.0;
pub const C_LIGHT: f64 = 1.0;

/// Sign of the particle charge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "i32", into = "i32")]
pub enum ChargeSign {
    Positive,
    Negative,
}

impl ChargeSign {
    pub fn value(self) -> f64 {
        match self {
            ChargeSign::Positive => 1.0,
            ChargeSign::Negative => -1.0,
        }
    }
}

impl TryFrom<i32> for ChargeSign {
    type Error = String;

    fn try_from(v: i32) -> std::result::Result<Self, Self::Error> {
        match v {
            1 => Ok(ChargeSign::Positive),
            -1 => Ok(ChargeSign::Negative),
            other => Err(format!("epsilon must be +1 or -1, got {other}")),
        }
    }
}

impl From<ChargeSign> for i32 {
    fn from(s: ChargeSign) -> i32 {
        match s {
            ChargeSign::Positive => 1,
            ChargeSign::Negative => -1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    pub epsilon: ChargeSign,
    pub omega_b: f64,
    /// `hbar c / |q|` expressed in the unit system used for reported fluxes.
    #[serde(default = "default_flux_unit")]
    pub flux_unit: f64,
}

fn default_flux_unit() -> f64 {
    1.0
}

impl Default for PhysicalParams {
    fn default() -> Self {
        PhysicalParams {
            epsilon: ChargeSign::Positive,
            omega_b: 1.0,
            flux_unit: 1.0,
        }
    }
}

impl PhysicalParams {
    pub fn new(epsilon: ChargeSign, omega_b: f64) -> Result<Self> {
        let p = PhysicalParams {
            epsilon,
            omega_b,
            flux_unit: 1.0,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_flux_unit(mut self, flux_unit: f64) -> Result<Self> {
        self.flux_unit = flux_unit;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega_b.is_finite() && self.omega_b > 0.0) {
            return Err(Error::InvalidParams(format!(
                "omega_B must be positive, got {}",
                self.omega_b
            )));
        }
        if !(self.flux_unit.is_finite() && self.flux_unit > 0.0) {
            return Err(Error::InvalidParams(format!(
                "flux_unit must be positive, got {}",
                self.flux_unit
            )));
        }
        Ok(())
    }

    pub fn eps(&self) -> f64 {
        self.epsilon.value()
    }

    /// Cyclotron period `T = 2 pi / omega_B`.
    pub fn period(&self) -> f64 {
        std::f64::consts::TAU / self.omega_b
    }

    /// Magnetic length `sqrt(hbar / (M omega_B))`.
    pub fn magnetic_length(&self) -> f64 {
        (HBAR / (MASS * self.omega_b)).sqrt()
    }

    /// Orbit scale `sqrt(2 hbar / (M omega_B))` relating `<a>` to the orbit radius.
    pub fn orbit_scale(&self) -> f64 {
        (2.0 * HBAR / (MASS * self.omega_b)).sqrt()
    }
}

/// Highest retained quantum number for each mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FockTruncation {
    pub n_max_a: usize,
    pub n_max_b: usize,
}

impl FockTruncation {
    pub fn new(n_max_a: usize, n_max_b: usize) -> Result<Self> {
        let t = FockTruncation { n_max_a, n_max_b };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_max_a < 1 {
            return Err(Error::InvalidParams("n_max_a must be at least 1".into()));
        }
        Ok(())
    }

    pub fn levels_a(&self) -> usize {
        self.n_max_a + 1
    }

    pub fn levels_b(&self) -> usize {
        self.n_max_b + 1
    }

    pub fn dim(&self) -> usize {
        self.levels_a() * self.levels_b()
    }

    /// Flat index of `|n n'>`; mode a is the slow index.
    #[inline]
    pub fn index(&self, n: usize, n_prime: usize) -> usize {
        n * self.levels_b() + n_prime
    }

    #[inline]
    pub fn levels_of(&self, idx: usize) -> (usize, usize) {
        (idx / self.levels_b(), idx % self.levels_b())
    }
}
