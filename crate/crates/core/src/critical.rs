//! Critical temperatures and couplings, onset bisection, and T = 0 steps.

use std::f64::consts::SQRT_2;

use serde::Serialize;

use crate::entanglement::concurrence_numeric;
use crate::error::{Error, Result};
use crate::hamiltonian::{check_preset, ModelParams, ModelPreset, Param};
use crate::special::{asinh_exp, asinh_sinhc, ln_sinh};
use crate::thermal::{density_matrix_numeric, ground_state_mixture, DensityMatrix, Temperature};

/// Concurrence above this counts as entangled.
pub const ONSET_EPS: f64 = 1e-12;
pub const SOLVE_TOL: f64 = 1e-8;
pub const SOLVE_MAX_ITER: usize = 60;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CriticalCase {
    /// T_c of the pure DM model.
    PureDMTemperature,
    /// T_c of the XX model with or without DM.
    XXDMTemperature,
    /// T_c of the antiferromagnetic XXX model.
    XXXTemperature,
    IsingDMAntiferroCoupling,
    IsingDMFerroCoupling,
    XXXDMCoupling,
    /// Ground-state crossing; T independent.
    XXZDMCoupling,
    /// Switch between the two λ orderings of the transverse model.
    TransverseIsingCoupling,
    NuclearSpinCoupling,
    /// Ground-state crossing of the ferromagnetic XYZ model.
    XYZFerroDMCoupling,
    /// Field above which the T = 0 state is a product state.
    XXZDMBField,
    /// D at which the T = 0 state becomes entangled, at fixed B.
    XXZDMBCoupling,
}

impl CriticalCase {
    pub const ALL: [CriticalCase; 12] = [
        CriticalCase::PureDMTemperature,
        CriticalCase::XXDMTemperature,
        CriticalCase::XXXTemperature,
        CriticalCase::IsingDMAntiferroCoupling,
        CriticalCase::IsingDMFerroCoupling,
        CriticalCase::XXXDMCoupling,
        CriticalCase::XXZDMCoupling,
        CriticalCase::TransverseIsingCoupling,
        CriticalCase::NuclearSpinCoupling,
        CriticalCase::XYZFerroDMCoupling,
        CriticalCase::XXZDMBField,
        CriticalCase::XXZDMBCoupling,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            CriticalCase::PureDMTemperature => "pure-dm-tc",
            CriticalCase::XXDMTemperature => "xx-dm-tc",
            CriticalCase::XXXTemperature => "xxx-tc",
            CriticalCase::IsingDMAntiferroCoupling => "ising-dm-af-dc",
            CriticalCase::IsingDMFerroCoupling => "ising-dm-f-dc",
            CriticalCase::XXXDMCoupling => "xxx-dm-dc",
            CriticalCase::XXZDMCoupling => "xxz-dm-dc",
            CriticalCase::TransverseIsingCoupling => "transverse-ising-dm-dc",
            CriticalCase::NuclearSpinCoupling => "nuclear-spin-dc",
            CriticalCase::XYZFerroDMCoupling => "xyz-f-dm-dc",
            CriticalCase::XXZDMBField => "xxz-dm-b-bc",
            CriticalCase::XXZDMBCoupling => "xxz-dm-b-dc",
        }
    }

    pub fn preset(&self) -> ModelPreset {
        match self {
            CriticalCase::PureDMTemperature => ModelPreset::PureDM,
            CriticalCase::XXDMTemperature => ModelPreset::XXDM,
            CriticalCase::XXXTemperature => ModelPreset::XXX,
            CriticalCase::IsingDMAntiferroCoupling | CriticalCase::IsingDMFerroCoupling => ModelPreset::IsingDM,
            CriticalCase::XXXDMCoupling => ModelPreset::XXXDM,
            CriticalCase::XXZDMCoupling => ModelPreset::XXZDM,
            CriticalCase::TransverseIsingCoupling => ModelPreset::TransverseIsingDM,
            CriticalCase::NuclearSpinCoupling => ModelPreset::NuclearSpinIsingDM,
            CriticalCase::XYZFerroDMCoupling => ModelPreset::XYZDM,
            CriticalCase::XXZDMBField | CriticalCase::XXZDMBCoupling => ModelPreset::XXZDMB,
        }
    }

    /// The parameter this case solves for.
    pub fn free(&self) -> Param {
        match self {
            CriticalCase::PureDMTemperature | CriticalCase::XXDMTemperature | CriticalCase::XXXTemperature => {
                Param::KT
            }
            CriticalCase::XXZDMBField => Param::B,
            _ => Param::D,
        }
    }

    /// Whether the closed form depends on kT.
    pub fn needs_temperature(&self) -> bool {
        matches!(
            self,
            CriticalCase::IsingDMAntiferroCoupling
                | CriticalCase::IsingDMFerroCoupling
                | CriticalCase::XXXDMCoupling
                | CriticalCase::TransverseIsingCoupling
                | CriticalCase::NuclearSpinCoupling
        )
    }
}

impl std::fmt::Display for CriticalCase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for CriticalCase {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        CriticalCase::ALL
            .iter()
            .copied()
            .find(|c| c.name() == s.trim())
            .ok_or_else(|| Error::Usage(format!("unknown critical case `{s}`")))
    }
}

fn sqrt_nonneg(x: f64, what: &str) -> Result<f64> {
    if x >= 0.0 {
        Ok(x.sqrt())
    } else {
        Err(Error::NoRoot(format!("{what}: no real critical value (radicand {x:.6e})")))
    }
}

fn require_kt(kt: Option<f64>) -> Result<f64> {
    match kt {
        Some(t) if t > 0.0 && t.is_finite() => Ok(t),
        Some(t) if t == 0.0 => Err(Error::ZeroTemperature),
        Some(t) => Err(Error::InvalidTemperature(t)),
        None => Err(Error::Usage("this critical value needs kT".into())),
    }
}

/// Closed-form critical value. Temperatures are returned as T (not kT);
/// couplings and fields as energies.
pub fn critical_closed(case: CriticalCase, p: &ModelParams, kt: Option<f64>) -> Result<f64> {
    if !check_preset(p, case.preset()) {
        return Err(Error::PresetMismatch(case.preset().name().into()));
    }
    let k = p.k_boltz;
    let j = p.jx;
    let v = match case {
        CriticalCase::PureDMTemperature => p.d.abs() / (k * (1.0 + SQRT_2).ln()),
        CriticalCase::XXDMTemperature => j.hypot(p.d) / (k * 1f64.asinh()),
        CriticalCase::XXXTemperature => {
            if j <= 0.0 {
                return Err(Error::NoClosedForm("XXX T_c for J <= 0".into()));
            }
            2.0 * j / (k * 3f64.ln())
        }
        CriticalCase::IsingDMAntiferroCoupling => {
            if p.jz <= 0.0 {
                return Err(Error::NoClosedForm("antiferromagnetic branch needs Jz > 0".into()));
            }
            let t = require_kt(kt)?;
            t * asinh_exp(-p.jz / t)
        }
        CriticalCase::IsingDMFerroCoupling => {
            if p.jz >= 0.0 {
                return Err(Error::NoClosedForm("ferromagnetic branch needs Jz < 0".into()));
            }
            let t = require_kt(kt)?;
            t * asinh_exp(p.jz.abs() / t)
        }
        CriticalCase::XXXDMCoupling => {
            let t = require_kt(kt)?;
            let a = t * asinh_exp(-j / t);
            sqrt_nonneg(a * a - j * j, "XXX+DM")?
        }
        CriticalCase::XXZDMCoupling => {
            if !(p.jz < 0.0 && p.jz.abs() > j.abs()) {
                return Err(Error::NoClosedForm("needs Jz < 0 and |Jz| > |J|".into()));
            }
            (p.jz * p.jz - j * j).sqrt()
        }
        CriticalCase::TransverseIsingCoupling => transverse_dc(p, require_kt(kt)?)?,
        CriticalCase::NuclearSpinCoupling => nuclear_spin_dc(p, require_kt(kt)?)?,
        CriticalCase::XYZFerroDMCoupling => {
            if !(p.jz < p.jy && p.jy < p.jx && p.jx < 0.0) {
                return Err(Error::NoClosedForm("needs Jz < Jy < Jx < 0".into()));
            }
            let r = p.jz.abs() + p.j_minus().abs();
            sqrt_nonneg(r * r - p.j_plus().powi(2), "XYZ+DM")?
        }
        CriticalCase::XXZDMBField => j.hypot(p.d) + p.jz,
        CriticalCase::XXZDMBCoupling => {
            let r = p.b_homog - p.jz;
            sqrt_nonneg(r * r - j * j, "XXZ+DM+B")?
        }
    };
    Ok(v)
}

/// An alternative ferromagnetic Ising+DM expression, |Jz| + (kT/2)·ln(1 + e^{−2|Jz|/kT}).
/// It differs from the onset of the closed-form concurrence by about kT·ln 2
/// and is kept only so that the discrepancy stays documented by a test.
pub fn ising_dm_ferro_variant_dc(jz: f64, kt: f64) -> f64 {
    jz.abs() + 0.5 * kt * (-2.0 * jz.abs() / kt).exp().ln_1p()
}

/// D at which the two candidate λ orderings of the transverse model swap:
/// √(−J² + (kT·asinh((J/μ)·sinh(μ/kT)))²) with J = J₊.
pub fn transverse_dc(p: &ModelParams, kt: f64) -> Result<f64> {
    let j = p.j_plus().abs();
    let a = kt * asinh_sinhc(j / kt, p.mu() / kt);
    sqrt_nonneg(a * a - j * j, "transverse Ising")
}

/// Solves (D/ν)·sinh(ν/kT) = e^{−Jz/kT} with ν = √(D² + b²) for D ≥ 0.
pub fn nuclear_spin_dc(p: &ModelParams, kt: f64) -> Result<f64> {
    let b = p.b_inhomog.abs();
    let target = -p.jz / kt;
    // ln of the left side; increasing in D
    let g = |d: f64| -> f64 {
        if d == 0.0 {
            return f64::NEG_INFINITY;
        }
        let nu = d.hypot(b);
        d.ln() - nu.ln() + ln_sinh(nu / kt)
    };
    let mut hi = kt.max(b).max(p.jz.abs()).max(1.0);
    let mut grow = 0;
    while g(hi) < target {
        hi *= 2.0;
        grow += 1;
        if grow > 200 || !hi.is_finite() {
            return Err(Error::NoRoot("nuclear-spin implicit equation".into()));
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Concurrence of the ground-state mixture.
pub fn zero_t_concurrence(p: &ModelParams) -> Result<f64> {
    Ok(concurrence_numeric(&ground_state_mixture(p))?.value)
}

/// Concurrence through the numeric path, switching to the ground mixture at kT = 0.
pub fn concurrence_at(p: &ModelParams, kt: f64) -> Result<f64> {
    if kt == 0.0 {
        return zero_t_concurrence(p);
    }
    let t = Temperature::from_thermal_energy(kt, p.k_boltz)?;
    Ok(concurrence_numeric(&density_matrix_numeric(p, t)?)?.value)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct CriticalQuery {
    pub preset: ModelPreset,
    /// One of KT, D or B.
    pub free: Param,
    pub params: ModelParams,
    /// Thermal energy used when the free parameter is not KT; 0 means the ground state.
    pub kt: f64,
    pub bracket: (f64, f64),
}

impl CriticalQuery {
    fn point(&self, x: f64) -> (ModelParams, f64) {
        match self.free {
            Param::KT => (self.params, x),
            other => (self.params.with(other, x), self.kt),
        }
    }

    fn entangled(&self, x: f64) -> Result<bool> {
        let (p, kt) = self.point(x);
        Ok(concurrence_at(&p, kt)? > ONSET_EPS)
    }
}

/// Bisection on the entangled/separable status along the free parameter.
pub fn critical_solve(q: &CriticalQuery) -> Result<f64> {
    let (lo, hi) = q.bracket;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::Usage(format!("bracket [{lo}, {hi}] must be finite with lo < hi")));
    }
    if !matches!(q.free, Param::KT | Param::D | Param::B) {
        return Err(Error::Usage(format!("free parameter must be kT, D or B, not {}", q.free)));
    }
    for x in [lo, hi] {
        if !check_preset(&q.point(x).0, q.preset) {
            return Err(Error::PresetMismatch(q.preset.name().into()));
        }
    }
    let (mut a, mut b) = (lo, hi);
    let sa = q.entangled(a)?;
    if sa == q.entangled(b)? {
        return Err(Error::BracketInvalid { lo, hi });
    }
    for _ in 0..SOLVE_MAX_ITER {
        if b - a <= SOLVE_TOL {
            break;
        }
        let m = 0.5 * (a + b);
        if q.entangled(m)? == sa {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Breakpoint {
    pub location: f64,
    /// C just below the breakpoint.
    pub left: f64,
    /// C of the degenerate ground mixture at the breakpoint.
    pub boundary: f64,
    /// C just above the breakpoint.
    pub right: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct StepProfile {
    pub free: Param,
    pub breakpoints: Vec<Breakpoint>,
}

/// Adjacent-point ground-state overlap below which a level crossing is assumed.
pub const FIDELITY_THRESHOLD: f64 = 0.5;
/// Adjacent-point concurrence jump that also flags a breakpoint.
pub const JUMP_THRESHOLD: f64 = 0.1;
/// Offset used to sample the one-sided values around a breakpoint.
pub const SIDE_OFFSET: f64 = 1e-6;

fn overlap(a: &DensityMatrix, b: &DensityMatrix) -> f64 {
    let tr = |x: &DensityMatrix, y: &DensityMatrix| (*x.matrix() * *y.matrix()).trace().re;
    tr(a, b) / (tr(a, a) * tr(b, b)).sqrt()
}

/// Locates level crossings of the T = 0 state along `grid` and refines each
/// to floating-point resolution.
pub fn qpt_scan(p: &ModelParams, free: Param, grid: &[f64]) -> Result<StepProfile> {
    if grid.len() < 3 || grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Usage("grid must be strictly increasing with at least 3 points".into()));
    }
    let at = |x: f64| p.with(free, x);
    let states: Vec<DensityMatrix> = grid.iter().map(|&x| ground_state_mixture(&at(x))).collect();
    let conc: Vec<f64> = states.iter().map(|s| Ok(concurrence_numeric(s)?.value)).collect::<Result<_>>()?;

    let mut breakpoints = Vec::new();
    for i in 0..grid.len() - 1 {
        let fid = overlap(&states[i], &states[i + 1]);
        if fid >= FIDELITY_THRESHOLD && (conc[i + 1] - conc[i]).abs() <= JUMP_THRESHOLD {
            continue;
        }
        let (left_state, right_state) = (states[i], states[i + 1]);
        let (mut a, mut b) = (grid[i], grid[i + 1]);
        loop {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            let s = ground_state_mixture(&at(m));
            if overlap(&s, &left_state) > overlap(&s, &right_state) {
                a = m;
            } else {
                b = m;
            }
        }
        // a and b are adjacent floats; pick the one whose ground mixture is the widest
        let rank = |x: f64| {
            let m = *ground_state_mixture(&at(x)).matrix();
            (m * m).trace().re
        };
        let loc = if rank(a) <= rank(b) { a } else { b };
        let off = SIDE_OFFSET * loc.abs().max(1.0);
        let left = zero_t_concurrence(&at((loc - off).max(grid[i])))?;
        let right = zero_t_concurrence(&at((loc + off).min(grid[i + 1])))?;
        let boundary = zero_t_concurrence(&at(loc))?;
        breakpoints.push(Breakpoint { location: loc, left, boundary, right });
    }
    Ok(StepProfile { free, breakpoints })
}
