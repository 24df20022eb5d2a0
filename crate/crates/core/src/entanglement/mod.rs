//! Wootters concurrence.
//!
//! The numeric route never forms ρρ̃ directly. With A = √ρ·(σ^y⊗σ^y)·√ρ*,
//! A·A† = √ρ ρ̃ √ρ, so the λ's are the singular values of A. They are read
//! off the 8×8 Hermitian dilation [[0, A], [A†, 0]], whose eigenvalues are
//! ±σ_i with absolute accuracy, so small λ's are not lost to a square root.

mod registry;

use serde::Serialize;

pub use registry::{
    concurrence_model, register_models, select_formula, xy_ferro_swapped_variant, FormulaId,
    ModelFormulaEntry,
};

use crate::error::{Error, Result};
use crate::hamiltonian::ModelParams;
use crate::linalg::{herm_eigvals, pauli2, spectral_fn, Mat, Mat4, Pauli};
use crate::thermal::{BlockWeights, DensityMatrix};

/// λ's within this of zero are treated as zero before the square root.
pub const LAMBDA_CLAMP: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ConcurrenceSource {
    Numeric,
    GeneralClosedForm,
    ModelFormula(FormulaId),
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ConcurrenceReport {
    /// Descending.
    pub lambdas: [f64; 4],
    pub value: f64,
    pub source: ConcurrenceSource,
}

/// max(λ1 − λ2 − λ3 − λ4, 0) on descending λ's.
pub fn concurrence_from_lambdas(sorted_desc: &[f64; 4]) -> f64 {
    let [l1, l2, l3, l4] = *sorted_desc;
    (l1 - l2 - l3 - l4).max(0.0)
}

pub fn sort_desc(mut l: [f64; 4]) -> [f64; 4] {
    l.sort_by(|a, b| b.total_cmp(a));
    l
}

/// σ^y ⊗ σ^y.
pub fn spin_flip() -> Mat4 {
    pauli2(Pauli::Y, Pauli::Y)
}

/// ρ̃ = (σ^y⊗σ^y) ρ* (σ^y⊗σ^y).
pub fn spin_flipped(rho: &Mat4) -> Mat4 {
    let y = spin_flip();
    y * rho.conj() * y
}

pub fn concurrence_numeric(rho: &DensityMatrix) -> Result<ConcurrenceReport> {
    let m = rho.matrix();
    // DensityMatrix is validated on construction; re-check cheaply in case a
    // caller built one and then drifted.
    if m.hermitian_defect() > 1e-12 || (m.trace().re - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidState("not a density matrix".into()));
    }
    let sqrt_rho = spectral_fn(m, |x| x.max(0.0).sqrt())?;
    let a = sqrt_rho * spin_flip() * sqrt_rho.conj();

    let mut dil = Mat::<8>::zeros();
    let ad = a.dagger();
    for i in 0..4 {
        for j in 0..4 {
            dil.0[i][4 + j] = a.0[i][j];
            dil.0[4 + i][j] = ad.0[i][j];
        }
    }
    let ev = herm_eigvals(&dil)?;
    // ascending; the top four are +σ_i
    let mut lambdas = [ev[7], ev[6], ev[5], ev[4]];
    for l in lambdas.iter_mut() {
        if *l < LAMBDA_CLAMP {
            *l = l.max(0.0);
        }
    }
    let lambdas = sort_desc(lambdas);
    Ok(ConcurrenceReport { lambdas, value: concurrence_from_lambdas(&lambdas), source: ConcurrenceSource::Numeric })
}

/// Closed-form λ's of the Gibbs state, in the eigenstate labelling
/// (λ1, λ2, λ3, λ4); not sorted.
pub fn lambdas_general(p: &ModelParams, kt: f64) -> Result<[f64; 4]> {
    if !(kt > 0.0) {
        return Err(Error::ZeroTemperature);
    }
    let w = BlockWeights::new(p, kt);
    // e^{−J_z/2kT}·(J_−/μ)·sinh(μ/kT) and the e^{−J_z/2kT} prefactor, shifted
    let pair = |f: f64, s: f64| -> (f64, f64) {
        let r = f.hypot(s);
        // |r ∓ s| without cancellation
        let small = if r + s.abs() > 0.0 { f * f / (r + s.abs()) } else { 0.0 };
        let large = r + s.abs();
        if s >= 0.0 {
            (small / w.z, large / w.z)
        } else {
            (large / w.z, small / w.z)
        }
    };
    let (l1, l2) = pair(w.f_mu, p.j_minus() * w.s_mu);
    let (l3, l4) = pair(w.f_nu, p.flip_coupling() * w.s_nu);
    Ok([l1, l2, l3, l4])
}

pub fn concurrence_general(p: &ModelParams, kt: f64) -> Result<ConcurrenceReport> {
    let lambdas = sort_desc(lambdas_general(p, kt)?);
    Ok(ConcurrenceReport {
        lambdas,
        value: concurrence_from_lambdas(&lambdas),
        source: ConcurrenceSource::GeneralClosedForm,
    })
}

/// 2|ψ₀₀ψ₁₁ − ψ₀₁ψ₁₀| for a normalised pure state.
pub fn pure_state_concurrence(psi: &[crate::linalg::C64; 4]) -> f64 {
    let n2: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
    2.0 * (psi[0] * psi[3] - psi[1] * psi[2]).norm() / n2
}
