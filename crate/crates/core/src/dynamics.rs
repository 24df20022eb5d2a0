//! Unitary evolution under the two-qubit Hamiltonian.

use std::f64::consts::PI;

use serde::Serialize;

use crate::entanglement::pure_state_concurrence;
use crate::error::{Error, Result};
use crate::hamiltonian::{build_hamiltonian, ModelParams};
use crate::linalg::{spectral_fn_complex, Mat4, Vec4, C64, ONE, ZERO};
use crate::special::sinc;

/// Tolerance for accepting a gate as SWAP up to diagonal phases.
pub const GATE_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Unitary4(Mat4);

impl Unitary4 {
    pub fn matrix(&self) -> &Mat4 {
        &self.0
    }

    pub fn unitarity_defect(&self) -> f64 {
        (self.0.dagger() * self.0 - Mat4::identity()).max_abs()
    }

    pub fn apply(&self, psi: &Vec4) -> Vec4 {
        self.0.apply(psi)
    }

    pub fn compose(&self, other: &Unitary4) -> Unitary4 {
        Unitary4(self.0 * other.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BasisState {
    S00,
    S01,
    S10,
    S11,
}

impl BasisState {
    pub const ALL: [BasisState; 4] = [BasisState::S00, BasisState::S01, BasisState::S10, BasisState::S11];

    pub fn index(&self) -> usize {
        *self as usize
    }

    pub fn vector(&self) -> Vec4 {
        let mut v = [ZERO; 4];
        v[self.index()] = ONE;
        v
    }
}

impl std::str::FromStr for BasisState {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().trim_start_matches('|').trim_end_matches('>').trim_end_matches('⟩') {
            "00" => Ok(BasisState::S00),
            "01" => Ok(BasisState::S01),
            "10" => Ok(BasisState::S10),
            "11" => Ok(BasisState::S11),
            other => Err(Error::Usage(format!("unknown basis state `{other}`"))),
        }
    }
}

/// U(t) = V·diag(e^{−iE t/ħ})·V†.
pub fn evolution_operator(p: &ModelParams, t: f64) -> Result<Unitary4> {
    let h = build_hamiltonian(p);
    let scale = t / p.hbar;
    let u = spectral_fn_complex(&h, |e| C64::from_polar(1.0, -e * scale))?;
    Ok(Unitary4(u))
}

/// Image of a basis state from the two decoupled 2×2 blocks. Requires B = b = 0.
pub fn evolve_basis_closed_form(p: &ModelParams, t: f64, s: BasisState) -> Result<Vec4> {
    if p.b_homog != 0.0 || p.b_inhomog != 0.0 {
        return Err(Error::FieldsNonzero);
    }
    let tau = t / p.hbar;
    let mut out = [ZERO; 4];
    match s {
        BasisState::S00 | BasisState::S11 => {
            let ph = C64::from_polar(1.0, -0.5 * p.jz * tau);
            let a = p.j_minus() * tau;
            let (same, other) = if s == BasisState::S00 { (0, 3) } else { (3, 0) };
            out[same] = ph * a.cos();
            out[other] = ph * C64::new(0.0, -a.sin());
        }
        BasisState::S01 | BasisState::S10 => {
            let ph = C64::from_polar(1.0, 0.5 * p.jz * tau);
            let nu = p.flip_coupling();
            // sin(ντ)/ν = τ·sinc(ντ)
            let sin_over = tau * sinc(nu * tau);
            let (same, other, c) = if s == BasisState::S01 {
                (1, 2, C64::new(p.j_plus(), -p.d))
            } else {
                (2, 1, C64::new(p.j_plus(), p.d))
            };
            out[same] = ph * (nu * tau).cos();
            out[other] = ph * C64::new(0.0, -1.0) * c * sin_over;
        }
    }
    Ok(out)
}

/// Index that SWAP maps basis index k onto.
pub fn swap_index(k: usize) -> usize {
    [0, 2, 1, 3][k]
}

pub fn swap_matrix() -> Mat4 {
    let mut m = Mat4::zeros();
    for k in 0..4 {
        m[(swap_index(k), k)] = ONE;
    }
    m
}

#[derive(Clone, Copy, Debug, Serialize)]
pub enum GateTarget {
    Swap,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct GateCheck {
    pub target: GateTarget,
    pub verdict: bool,
    /// φ_k with U|k⟩ ≈ e^{iφ_k}|swap(k)⟩, each in (−π, π].
    pub phase_profile: [f64; 4],
    /// Induced ∞-norm of U − Σ e^{iφ_k}|swap(k)⟩⟨k|.
    pub max_deviation: f64,
}

fn normalize_phase(phi: f64) -> f64 {
    let mut x = phi.rem_euclid(2.0 * PI);
    if x > PI {
        x -= 2.0 * PI;
    }
    // rem_euclid maps −π to π already; guard the rounding edge
    if x <= -PI {
        x += 2.0 * PI;
    }
    x
}

pub fn check_swap_equivalence(p: &ModelParams, t: f64) -> Result<GateCheck> {
    let u = evolution_operator(p, t)?;
    let m = u.matrix();
    let mut phases = [0.0; 4];
    let mut fit = Mat4::zeros();
    for k in 0..4 {
        let z = m[(swap_index(k), k)];
        phases[k] = if z.norm() > 0.0 { normalize_phase(z.arg()) } else { 0.0 };
        fit[(swap_index(k), k)] = C64::from_polar(1.0, phases[k]);
    }
    let dev = (*m - fit).norm_inf();
    Ok(GateCheck { target: GateTarget::Swap, verdict: dev <= GATE_TOL, phase_profile: phases, max_deviation: dev })
}

/// True when the gate is SWAP-equivalent and its phases equal `target`
/// modulo 2π (no global phase freedom).
pub fn matches_phase_profile(check: &GateCheck, target: &[f64; 4], tol: f64) -> bool {
    check.verdict
        && check.phase_profile.iter().zip(target).all(|(a, b)| {
            let d = normalize_phase(a - b);
            d.abs() <= tol
        })
}

/// Pure-state concurrence of U(t)|s⟩ along a time grid.
pub fn entangling_power_profile(p: &ModelParams, s: BasisState, t_grid: &[f64]) -> Result<Vec<(f64, f64)>> {
    t_grid
        .iter()
        .map(|&t| Ok((t, pure_state_concurrence(&evolve_basis_closed_form(p, t, s)?))))
        .collect()
}
