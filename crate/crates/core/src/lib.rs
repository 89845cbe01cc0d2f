//! Charged-particle wave packets in a uniform magnetic field.
//!
//! The engine works on a truncated two-mode Fock space (`|n n'>`, Landau level
//! and guiding-center index), evolves states exactly, and reports the total,
//! dynamic and geometric phases of one cyclotron period together with the
//! enclosed magnetic flux. A real-space module synthesizes the corresponding
//! wavefunctions on a grid and an independent split-step propagator for the
//! symmetric-gauge Hamiltonian cross-checks the analytic results.

pub mod angle;
pub mod dynamics;
pub mod error;
pub mod expm;
pub mod fft;
pub mod fock;
pub mod grid;
pub mod oracle;
pub mod params;
pub mod realspace;
pub mod state;
pub mod states;
pub mod trajectory;

pub use error::{Error, Result};
pub use params::{ChargeSign, FockTruncation, PhysicalParams};
pub use state::TwoModeState;
