//! Two-qubit Heisenberg XYZ models with a Dzialoshinskii-Moriya (DM) coupling.
//!
//! The crate covers the whole chain from Hamiltonian to observable:
//!
//! * [`linalg`]: a small dense complex kernel for 2×2 and 4×4 matrices
//!   (Kronecker products, Hermitian eigensolver, spectral functions).
//! * [`hamiltonian`]: model parameters, presets and the analytic spectrum.
//! * [`thermal`]: Gibbs states, both closed form and by exponentiation.
//! * [`entanglement`]: Wootters concurrence and the per-model closed forms.
//! * [`dynamics`]: time evolution, SWAP equivalence, Bell-state generation.
//! * [`critical`]: critical temperatures and couplings, onset solver, T=0 steps.
//! * [`sweep`] / [`figures`]: parameter grids and CSV/JSON output.
//!
//! Every closed form has an independent numerical counterpart so the two can
//! be checked against each other.

pub mod config;
pub mod critical;
pub mod dynamics;
pub mod entanglement;
pub mod error;
pub mod figures;
pub mod hamiltonian;
pub mod linalg;
pub mod special;
pub mod sweep;
pub mod thermal;

pub use error::{Error, Result};
pub use hamiltonian::{ModelParams, ModelPreset};
pub use linalg::{Mat2, Mat4, C64};
