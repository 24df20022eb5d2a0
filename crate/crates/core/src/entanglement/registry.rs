//! Closed-form concurrence for the special models.
//!
//! Each entry pairs a formula with the preset it belongs to and a validity
//! predicate describing the regime in which the formula is exact. All
//! formulas are ratios of exponential sums and are evaluated with a common
//! scale factor so that they stay finite at any kT > 0.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::{concurrence_general, ConcurrenceReport, ConcurrenceSource};
use crate::error::{Error, Result};
use crate::hamiltonian::{check_preset, ModelParams, ModelPreset};
use crate::special::{asinh_sinhc, Scaled};

macro_rules! formula_ids {
    ($($variant:ident => $name:literal),* $(,)?) => {
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
        pub enum FormulaId { $($variant),* }

        impl FormulaId {
            pub const ALL: &'static [FormulaId] = &[$(FormulaId::$variant),*];

            pub fn name(&self) -> &'static str {
                match self { $(FormulaId::$variant => $name),* }
            }
        }
    };
}

formula_ids! {
    PureDM => "pure-dm",
    IsingDMAntiferro => "ising-dm-af",
    IsingDMFerro => "ising-dm-f",
    NuclearSpinAntiferro => "nuclear-spin-af",
    NuclearSpinFerro => "nuclear-spin-f",
    XYAntiferro => "xy-af",
    XYFerro => "xy-f",
    XYDM => "xy-dm",
    XXDM => "xx-dm",
    TransverseIsingUnder => "transverse-ising-dm-under",
    TransverseIsingOver => "transverse-ising-dm-over",
    XXXDMAntiferro => "xxx-dm-af",
    XXXDMFerro => "xxx-dm-f",
    XXZPositiveJ => "xxz-j-pos",
    XXZNegativeJ => "xxz-j-neg",
    XXZDM => "xxz-dm",
    XXZDMB => "xxz-dm-b",
    XYZAntiferro => "xyz-af",
    XYZAntiferroDM => "xyz-af-dm",
    XYZFerro => "xyz-f",
    XYZFerroDMUnder => "xyz-f-dm-under",
    XYZFerroDMOver => "xyz-f-dm-over",
}

impl fmt::Display for FormulaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FormulaId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_lowercase();
        FormulaId::ALL
            .iter()
            .copied()
            .find(|id| id.name() == s)
            .ok_or_else(|| Error::Usage(format!("unknown formula `{s}`")))
    }
}

type Formula = fn(&ModelParams, f64) -> f64;
type Validity = fn(&ModelParams, f64) -> bool;

pub struct ModelFormulaEntry {
    pub id: FormulaId,
    pub preset: ModelPreset,
    /// Human-readable statement of the validity predicate.
    pub regime: &'static str,
    formula: Formula,
    validity: Validity,
}

impl ModelFormulaEntry {
    /// Raw formula value before clamping at zero.
    pub fn raw(&self, p: &ModelParams, kt: f64) -> f64 {
        (self.formula)(p, kt)
    }

    pub fn evaluate(&self, p: &ModelParams, kt: f64) -> f64 {
        self.raw(p, kt).max(0.0)
    }

    pub fn is_valid(&self, p: &ModelParams, kt: f64) -> bool {
        (self.validity)(p, kt)
    }
}

impl fmt::Debug for ModelFormulaEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ModelFormulaEntry")
            .field("id", &self.id)
            .field("preset", &self.preset)
            .field("regime", &self.regime)
            .finish()
    }
}

// (sinh a − e^{v}·cosh w) / (cosh a + e^{v}·cosh w)
fn ratio(a: f64, v: f64, w: f64) -> f64 {
    let s = Scaled::new(a.abs().max(v + w.abs()));
    (s.sinh(a) - s.cosh_exp(w, v)) / (s.cosh(a) + s.cosh_exp(w, v))
}

// (sinh a − e^{v}·cosh w) / (cosh x + e^{v}·cosh y): used where the
// numerator and denominator hyperbolic arguments differ.
fn ratio4(a: f64, v: f64, w: f64, x: f64, y: f64) -> f64 {
    let s = Scaled::new(a.abs().max(x.abs()).max(v + w.abs()).max(v + y.abs()));
    (s.sinh(a) - s.cosh_exp(w, v)) / (s.cosh(x) + s.cosh_exp(y, v))
}

fn pure_dm(p: &ModelParams, kt: f64) -> f64 {
    ratio(p.d / kt, 0.0, 0.0)
}

fn ising_dm(p: &ModelParams, kt: f64) -> f64 {
    ratio(p.d.abs() / kt, -p.jz / kt, 0.0)
}

// ((D/ν)·sinh(ν/kT) − e^{−Jz/kT}) / (cosh(ν/kT) + cosh(B/kT)·e^{−Jz/kT})
fn nuclear_spin(p: &ModelParams, kt: f64) -> f64 {
    let nu = p.nu();
    let (u, v, w) = (nu / kt, -p.jz / kt, p.b_homog / kt);
    let s = Scaled::new(u.max(v + w.abs()));
    let coef_sinh = if nu > 0.0 { p.d / nu * s.sinh(u) } else { 0.0 };
    (coef_sinh - s.exp(v)) / (s.cosh(u) + s.cosh_exp(w, v))
}

fn xy_af(p: &ModelParams, kt: f64) -> f64 {
    ratio4(p.j_plus() / kt, 0.0, p.j_minus() / kt, p.j_plus() / kt, p.j_minus() / kt)
}

fn xy_f(p: &ModelParams, kt: f64) -> f64 {
    let (a, b) = (p.j_plus().abs() / kt, p.j_minus() / kt);
    ratio4(a, 0.0, b, a, b)
}

/// The ferromagnetic XY variant whose condition swaps J₊ and J₋. It does not
/// reproduce the Gibbs-state concurrence and is kept only for comparison.
pub fn xy_ferro_swapped_variant(p: &ModelParams, kt: f64) -> f64 {
    let (a, b) = (p.j_minus().abs() / kt, p.j_plus() / kt);
    ratio4(a, 0.0, b, a, b).max(0.0)
}

fn xy_dm(p: &ModelParams, kt: f64) -> f64 {
    let (a, b) = (p.flip_coupling() / kt, p.j_minus() / kt);
    ratio4(a, 0.0, b, a, b)
}

fn xx_dm(p: &ModelParams, kt: f64) -> f64 {
    ratio(p.flip_coupling() / kt, 0.0, 0.0)
}

// J = J₊ = J_x/2 in the transverse model.
fn transverse_parts(p: &ModelParams, kt: f64) -> (f64, f64, f64) {
    let j = p.j_plus().abs();
    let (mu, nu) = (p.mu(), p.nu());
    (j, mu / kt, nu / kt)
}

fn transverse_under(p: &ModelParams, kt: f64) -> f64 {
    let (j, y, u) = transverse_parts(p, kt);
    let s = Scaled::new(y.max(u));
    // (J/μ)·sinh(μ/kT) = (J/kT)·sinh(y)/y, scaled by e^{−m}
    let coef = if y > 0.0 { j / (y * kt) * s.sinh(y) } else { j / kt * s.exp(0.0) };
    (coef - s.cosh(u)) / (s.cosh(y) + s.cosh(u))
}

fn transverse_over(p: &ModelParams, kt: f64) -> f64 {
    let (j, y, u) = transverse_parts(p, kt);
    let s = Scaled::new(y.max(u));
    let coef = if y > 0.0 { j / (y * kt) * s.sinh(y) } else { j / kt * s.exp(0.0) };
    let root = (s.exp(0.0).powi(2) + coef * coef).sqrt();
    (s.sinh(u) - root) / (s.cosh(y) + s.cosh(u))
}

// ν/kT ≤ asinh((J/μ)·sinh(μ/kT)), i.e. λ2 ≥ λ4.
fn transverse_is_under(p: &ModelParams, kt: f64) -> bool {
    let (j, y, u) = transverse_parts(p, kt);
    u <= asinh_sinhc(j / kt, y)
}

fn xxx_dm(p: &ModelParams, kt: f64) -> f64 {
    ratio(p.flip_coupling() / kt, -p.jx / kt, 0.0)
}

fn xxz(p: &ModelParams, kt: f64) -> f64 {
    ratio(p.jx.abs() / kt, -p.jz / kt, 0.0)
}

fn xxz_dm(p: &ModelParams, kt: f64) -> f64 {
    ratio(p.flip_coupling() / kt, p.jz.abs() / kt, 0.0)
}

// the field only enters the denominator: √(ρ11ρ44) does not depend on B
fn xxz_dm_b(p: &ModelParams, kt: f64) -> f64 {
    let a = p.flip_coupling() / kt;
    ratio4(a, -p.jz / kt, 0.0, a, p.b_homog / kt)
}

fn xyz_af(p: &ModelParams, kt: f64) -> f64 {
    ratio4(p.j_plus() / kt, -p.jz / kt, p.j_minus() / kt, p.j_plus() / kt, p.j_minus() / kt)
}

fn xyz_af_dm(p: &ModelParams, kt: f64) -> f64 {
    let a = p.flip_coupling() / kt;
    ratio4(a, -p.jz / kt, p.j_minus() / kt, a, p.j_minus() / kt)
}

fn xyz_f(p: &ModelParams, kt: f64) -> f64 {
    let (a, c) = (p.j_minus().abs() / kt, p.j_plus().abs() / kt);
    ratio4(a, -p.jz.abs() / kt, c, a, c)
}

fn xyz_f_dm_under(p: &ModelParams, kt: f64) -> f64 {
    let (a, c) = (p.j_minus().abs() / kt, p.flip_coupling() / kt);
    ratio4(a, -p.jz.abs() / kt, c, a, c)
}

fn xyz_f_dm_over(p: &ModelParams, kt: f64) -> f64 {
    let (a, c) = (p.flip_coupling() / kt, p.j_minus().abs() / kt);
    ratio4(a, p.jz.abs() / kt, c, a, c)
}

fn xyz_af_regime(p: &ModelParams) -> bool {
    p.jz > p.jy && p.jy > p.jx && p.jx > 0.0
}

fn xyz_f_regime(p: &ModelParams) -> bool {
    p.jz < p.jy && p.jy < p.jx && p.jx < 0.0
}

fn xyz_f_dm_margin(p: &ModelParams) -> f64 {
    p.flip_coupling() - (p.jz.abs() + p.j_minus().abs())
}

fn xxz_dm_threshold(p: &ModelParams) -> bool {
    p.jz < 0.0 && p.jz.abs() > p.jx.abs() && p.d >= (p.jz * p.jz - p.jx * p.jx).sqrt()
}

static REGISTRY: [ModelFormulaEntry; 22] = [
    ModelFormulaEntry {
        id: FormulaId::PureDM,
        preset: ModelPreset::PureDM,
        regime: "D >= 0",
        formula: pure_dm,
        validity: |p, _| p.d >= 0.0,
    },
    ModelFormulaEntry {
        id: FormulaId::IsingDMAntiferro,
        preset: ModelPreset::IsingDM,
        regime: "Jz > 0",
        formula: ising_dm,
        validity: |p, _| p.jz > 0.0,
    },
    ModelFormulaEntry {
        id: FormulaId::IsingDMFerro,
        preset: ModelPreset::IsingDM,
        regime: "Jz < 0",
        formula: ising_dm,
        validity: |p, _| p.jz < 0.0,
    },
    ModelFormulaEntry {
        id: FormulaId::NuclearSpinAntiferro,
        preset: ModelPreset::NuclearSpinIsingDM,
        regime: "Jz > 0, D >= 0",
        formula: nuclear_spin,
        validity: |p, _| p.jz > 0.0 && p.d >= 0.0,
    },
    ModelFormulaEntry {
        id: FormulaId::NuclearSpinFerro,
        preset: ModelPreset::NuclearSpinIsingDM,
        regime: "Jz < 0, D >= 0",
        formula: nuclear_spin,
        validity: |p, _| p.jz < 0.0 && p.d >= 0.0,
    },
    ModelFormulaEntry {
        id: FormulaId::XYAntiferro,
        preset: ModelPreset::XY,
        regime: "Jx > 0, Jy > 0",
        formula: xy_af,
        validity: |p, _| p.jx > 0.0 && p.jy > 0.0,
    },
    ModelFormulaEntry {
        id: FormulaId::XYFerro,
        preset: ModelPreset::XY,
        regime: "Jx < 0, Jy < 0",
        formula: xy_f,
        validity: |p, _| p.jx < 0.0 && p.jy < 0.0,
    },
    ModelFormulaEntry {
        id: FormulaId::XYDM,
        preset: ModelPreset::XYDM,
        regime: "Jx > 0, Jy > 0",
        formula: xy_dm,
        validity: |p, _| p.jx > 0.0 && p.jy > 0.0,
    },
    ModelFormulaEntry {
        id: FormulaId::XXDM,
        preset: ModelPreset::XXDM,
        regime: "any",
        formula: xx_dm,
        validity: |_, _| true,
    },
    ModelFormulaEntry {
        id: FormulaId::TransverseIsingUnder,
        preset: ModelPreset::TransverseIsingDM,
        regime: "D <= Dc(B, T)",
        formula: transverse_under,
        validity: transverse_is_under,
    },
    ModelFormulaEntry {
        id: FormulaId::TransverseIsingOver,
        preset: ModelPreset::TransverseIsingDM,
        regime: "D >= Dc(B, T)",
        formula: transverse_over,
        validity: |p, kt| !transverse_is_under(p, kt),
    },
    ModelFormulaEntry {
        id: FormulaId::XXXDMAntiferro,
        preset: ModelPreset::XXXDM,
        regime: "J > 0",
        formula: xxx_dm,
        validity: |p, _| p.jx > 0.0,
    },
    ModelFormulaEntry {
        id: FormulaId::XXXDMFerro,
        preset: ModelPreset::XXXDM,
        regime: "J < 0",
        formula: xxx_dm,
        validity: |p, _| p.jx < 0.0,
    },
    ModelFormulaEntry {
        id: FormulaId::XXZPositiveJ,
        preset: ModelPreset::XXZ,
        regime: "J > 0, Jz > -J",
        formula: xxz,
        validity: |p, _| p.jx > 0.0 && p.jz > -p.jx,
    },
    ModelFormulaEntry {
        id: FormulaId::XXZNegativeJ,
        preset: ModelPreset::XXZ,
        regime: "J < 0, Jz > -|J|",
        formula: xxz,
        validity: |p, _| p.jx < 0.0 && p.jz > p.jx,
    },
    ModelFormulaEntry {
        id: FormulaId::XXZDM,
        preset: ModelPreset::XXZDM,
        regime: "Jz < 0, |Jz| > |J|, D >= sqrt(Jz^2 - J^2)",
        formula: xxz_dm,
        validity: |p, _| xxz_dm_threshold(p),
    },
    ModelFormulaEntry {
        id: FormulaId::XXZDMB,
        preset: ModelPreset::XXZDMB,
        regime: "any",
        formula: xxz_dm_b,
        validity: |_, _| true,
    },
    ModelFormulaEntry {
        id: FormulaId::XYZAntiferro,
        preset: ModelPreset::XYZ,
        regime: "Jz > Jy > Jx > 0",
        formula: xyz_af,
        validity: |p, _| xyz_af_regime(p),
    },
    ModelFormulaEntry {
        id: FormulaId::XYZAntiferroDM,
        preset: ModelPreset::XYZDM,
        regime: "Jz > Jy > Jx > 0",
        formula: xyz_af_dm,
        validity: |p, _| xyz_af_regime(p),
    },
    ModelFormulaEntry {
        id: FormulaId::XYZFerro,
        preset: ModelPreset::XYZ,
        regime: "Jz < Jy < Jx < 0",
        formula: xyz_f,
        validity: |p, _| xyz_f_regime(p),
    },
    ModelFormulaEntry {
        id: FormulaId::XYZFerroDMUnder,
        preset: ModelPreset::XYZDM,
        regime: "Jz < Jy < Jx < 0, sqrt(J+^2 + D^2) <= |Jz| + |J-|",
        formula: xyz_f_dm_under,
        validity: |p, _| xyz_f_regime(p) && xyz_f_dm_margin(p) <= 0.0,
    },
    ModelFormulaEntry {
        id: FormulaId::XYZFerroDMOver,
        preset: ModelPreset::XYZDM,
        regime: "Jz < Jy < Jx < 0, sqrt(J+^2 + D^2) >= |Jz| + |J-|",
        formula: xyz_f_dm_over,
        validity: |p, _| xyz_f_regime(p) && xyz_f_dm_margin(p) >= 0.0,
    },
];

/// All closed-form entries.
pub fn register_models() -> &'static [ModelFormulaEntry] {
    &REGISTRY
}

fn entry(id: FormulaId) -> &'static ModelFormulaEntry {
    REGISTRY.iter().find(|e| e.id == id).expect("every id is registered")
}

/// Evaluates one named formula after checking its preset and regime.
pub fn concurrence_model(id: FormulaId, p: &ModelParams, kt: f64) -> Result<ConcurrenceReport> {
    if !(kt > 0.0) {
        return Err(Error::ZeroTemperature);
    }
    let e = entry(id);
    if !check_preset(p, e.preset) {
        return Err(Error::PresetMismatch(e.preset.name().into()));
    }
    if !e.is_valid(p, kt) {
        return Err(Error::BranchInvalid { formula: id.name().into(), reason: format!("requires {}", e.regime) });
    }
    let value = e.evaluate(p, kt);
    if !value.is_finite() {
        return Err(Error::NonFiniteResult);
    }
    let lambdas = concurrence_general(p, kt)?.lambdas;
    Ok(ConcurrenceReport { lambdas, value, source: ConcurrenceSource::ModelFormula(id) })
}

/// First entry whose preset and regime both hold, if any.
pub fn select_formula(p: &ModelParams, kt: f64) -> Option<&'static ModelFormulaEntry> {
    REGISTRY.iter().find(|e| check_preset(p, e.preset) && e.is_valid(p, kt))
}
