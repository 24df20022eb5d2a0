//! The XYZ + DM + field Hamiltonian, its analytic spectrum and model presets.
//!
//! H = ½[J_x σ^x σ^x + J_y σ^y σ^y + J_z σ^z σ^z + B_+ σ^z_1 + B_− σ^z_2
//!       + D(σ^x_1 σ^y_2 − σ^y_1 σ^x_2)],   B_± = B ± b.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{inner, pauli, pauli2, vec_norm, Mat4, Pauli, Vec4, C64, ONE, ZERO};

/// Energies closer than this are treated as one level.
pub const DEGENERACY_TOL: f64 = 1e-12;
const PRESET_TOL: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub jx: f64,
    pub jy: f64,
    pub jz: f64,
    /// Homogeneous field B.
    pub b_homog: f64,
    /// Inhomogeneous field b.
    pub b_inhomog: f64,
    /// DM coupling along z.
    pub d: f64,
    pub k_boltz: f64,
    pub hbar: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            jx: 0.0,
            jy: 0.0,
            jz: 0.0,
            b_homog: 0.0,
            b_inhomog: 0.0,
            d: 0.0,
            k_boltz: 1.0,
            hbar: 1.0,
        }
    }
}

impl ModelParams {
    pub fn new(jx: f64, jy: f64, jz: f64, b_homog: f64, b_inhomog: f64, d: f64) -> Self {
        ModelParams { jx, jy, jz, b_homog, b_inhomog, d, ..Default::default() }
    }

    pub fn pure_dm(d: f64) -> Self {
        ModelParams { d, ..Default::default() }
    }

    pub fn ising_dm(jz: f64, d: f64) -> Self {
        ModelParams { jz, d, ..Default::default() }
    }

    /// J_x = J_y = J.
    pub fn xxz(j: f64, jz: f64, d: f64, b_homog: f64) -> Self {
        ModelParams { jx: j, jy: j, jz, d, b_homog, ..Default::default() }
    }

    pub fn xxx(j: f64, d: f64) -> Self {
        Self::xxz(j, j, d, 0.0)
    }

    /// Transverse Ising model with DM coupling. `j` is the amplitude of the
    /// |00⟩↔|11⟩ and |01⟩↔|10⟩ mixing, i.e. J_± = j, so J_x = 2j.
    pub fn transverse_ising(j: f64, b_homog: f64, d: f64) -> Self {
        ModelParams { jx: 2.0 * j, b_homog, d, ..Default::default() }
    }

    pub fn j_plus(&self) -> f64 {
        0.5 * (self.jx + self.jy)
    }

    pub fn j_minus(&self) -> f64 {
        0.5 * (self.jx - self.jy)
    }

    pub fn b_plus(&self) -> f64 {
        self.b_homog + self.b_inhomog
    }

    pub fn b_minus(&self) -> f64 {
        self.b_homog - self.b_inhomog
    }

    /// μ = √(B² + J_−²).
    pub fn mu(&self) -> f64 {
        self.b_homog.hypot(self.j_minus())
    }

    /// ν = √(b² + J_+² + D²).
    pub fn nu(&self) -> f64 {
        self.b_inhomog.hypot(self.j_plus()).hypot(self.d)
    }

    /// √(J_+² + D²), the |01⟩↔|10⟩ coupling magnitude.
    pub fn flip_coupling(&self) -> f64 {
        self.j_plus().hypot(self.d)
    }

    /// Δ = J_z / J, defined for J_x = J_y = J ≠ 0.
    pub fn delta(&self) -> Option<f64> {
        (self.jx == self.jy && self.jx != 0.0).then(|| self.jz / self.jx)
    }

    pub fn is_finite(&self) -> bool {
        [self.jx, self.jy, self.jz, self.b_homog, self.b_inhomog, self.d, self.k_boltz, self.hbar]
            .iter()
            .all(|v| v.is_finite())
    }

    pub fn get(&self, p: Param) -> f64 {
        match p {
            Param::Jx | Param::J => self.jx,
            Param::Jy => self.jy,
            Param::Jz => self.jz,
            Param::B => self.b_homog,
            Param::SmallB => self.b_inhomog,
            Param::D => self.d,
            Param::K => self.k_boltz,
            Param::Hbar => self.hbar,
            Param::KT => f64::NAN,
        }
    }

    /// Sets a parameter; `KT` is not part of the model and is ignored.
    pub fn set(&mut self, p: Param, v: f64) {
        match p {
            Param::Jx => self.jx = v,
            Param::Jy => self.jy = v,
            Param::J => {
                self.jx = v;
                self.jy = v;
            }
            Param::Jz => self.jz = v,
            Param::B => self.b_homog = v,
            Param::SmallB => self.b_inhomog = v,
            Param::D => self.d = v,
            Param::K => self.k_boltz = v,
            Param::Hbar => self.hbar = v,
            Param::KT => {}
        }
    }

    pub fn with(mut self, p: Param, v: f64) -> Self {
        self.set(p, v);
        self
    }
}

/// Named scalar inputs; used by sweeps, critical queries and the CLI.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Param {
    Jx,
    Jy,
    Jz,
    /// J_x = J_y = J.
    J,
    B,
    SmallB,
    D,
    /// Thermal energy kT.
    KT,
    K,
    Hbar,
}

impl Param {
    pub fn name(&self) -> &'static str {
        match self {
            Param::Jx => "jx",
            Param::Jy => "jy",
            Param::Jz => "jz",
            Param::J => "J",
            Param::B => "B",
            Param::SmallB => "b",
            Param::D => "D",
            Param::KT => "kT",
            Param::K => "k",
            Param::Hbar => "hbar",
        }
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Param {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "jx" | "Jx" => Param::Jx,
            "jy" | "Jy" => Param::Jy,
            "jz" | "Jz" => Param::Jz,
            "J" | "j" => Param::J,
            "B" => Param::B,
            "b" => Param::SmallB,
            "D" | "d" => Param::D,
            "kT" | "kt" | "T" => Param::KT,
            "k" => Param::K,
            "hbar" => Param::Hbar,
            other => return Err(Error::Usage(format!("unknown parameter `{other}`"))),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelPreset {
    PureDM,
    Ising,
    IsingDM,
    NuclearSpinIsingDM,
    XY,
    XYDM,
    XX,
    XXDM,
    TransverseIsingDM,
    XXX,
    XXXDM,
    XXZ,
    XXZDM,
    XXZDMB,
    XYZ,
    XYZDM,
}

/// A single machine-checkable preset constraint.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Constraint {
    Zero(Param),
    Equal(Param, Param),
}

impl Constraint {
    pub fn holds(&self, p: &ModelParams) -> bool {
        match *self {
            Constraint::Zero(a) => p.get(a).abs() <= PRESET_TOL,
            Constraint::Equal(a, b) => (p.get(a) - p.get(b)).abs() <= PRESET_TOL,
        }
    }
}

impl ModelPreset {
    pub const ALL: [ModelPreset; 16] = [
        ModelPreset::PureDM,
        ModelPreset::Ising,
        ModelPreset::IsingDM,
        ModelPreset::NuclearSpinIsingDM,
        ModelPreset::XY,
        ModelPreset::XYDM,
        ModelPreset::XX,
        ModelPreset::XXDM,
        ModelPreset::TransverseIsingDM,
        ModelPreset::XXX,
        ModelPreset::XXXDM,
        ModelPreset::XXZ,
        ModelPreset::XXZDM,
        ModelPreset::XXZDMB,
        ModelPreset::XYZ,
        ModelPreset::XYZDM,
    ];

    pub fn constraints(&self) -> Vec<Constraint> {
        use Constraint::*;
        use Param::*;
        let no_fields = [Zero(B), Zero(SmallB)];
        let mut c = Vec::new();
        match self {
            ModelPreset::PureDM => c.extend([Zero(Jx), Zero(Jy), Zero(Jz)]),
            ModelPreset::Ising => c.extend([Zero(Jx), Zero(Jy), Zero(D)]),
            ModelPreset::IsingDM => c.extend([Zero(Jx), Zero(Jy)]),
            ModelPreset::NuclearSpinIsingDM => return vec![Zero(Jx), Zero(Jy)],
            ModelPreset::XY => c.extend([Zero(Jz), Zero(D)]),
            ModelPreset::XYDM => c.push(Zero(Jz)),
            ModelPreset::XX => c.extend([Equal(Jx, Jy), Zero(Jz), Zero(D)]),
            ModelPreset::XXDM => c.extend([Equal(Jx, Jy), Zero(Jz)]),
            ModelPreset::TransverseIsingDM => return vec![Zero(Jy), Zero(Jz), Zero(SmallB)],
            ModelPreset::XXX => c.extend([Equal(Jx, Jy), Equal(Jy, Jz), Zero(D)]),
            ModelPreset::XXXDM => c.extend([Equal(Jx, Jy), Equal(Jy, Jz)]),
            ModelPreset::XXZ => c.extend([Equal(Jx, Jy), Zero(D)]),
            ModelPreset::XXZDM => c.push(Equal(Jx, Jy)),
            ModelPreset::XXZDMB => return vec![Equal(Jx, Jy), Zero(SmallB)],
            ModelPreset::XYZ => c.push(Zero(D)),
            ModelPreset::XYZDM => {}
        }
        c.extend(no_fields);
        c
    }

    pub fn name(&self) -> &'static str {
        match self {
            ModelPreset::PureDM => "pure-dm",
            ModelPreset::Ising => "ising",
            ModelPreset::IsingDM => "ising-dm",
            ModelPreset::NuclearSpinIsingDM => "nuclear-spin-ising-dm",
            ModelPreset::XY => "xy",
            ModelPreset::XYDM => "xy-dm",
            ModelPreset::XX => "xx",
            ModelPreset::XXDM => "xx-dm",
            ModelPreset::TransverseIsingDM => "transverse-ising-dm",
            ModelPreset::XXX => "xxx",
            ModelPreset::XXXDM => "xxx-dm",
            ModelPreset::XXZ => "xxz",
            ModelPreset::XXZDM => "xxz-dm",
            ModelPreset::XXZDMB => "xxz-dm-b",
            ModelPreset::XYZ => "xyz",
            ModelPreset::XYZDM => "xyz-dm",
        }
    }
}

impl fmt::Display for ModelPreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelPreset {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let norm: String = s.chars().filter(|c| c.is_alphanumeric()).collect::<String>().to_lowercase();
        ModelPreset::ALL
            .iter()
            .copied()
            .find(|p| {
                let n: String = p.name().chars().filter(|c| c.is_alphanumeric()).collect();
                n == norm || format!("{p:?}").to_lowercase() == norm
            })
            .ok_or_else(|| Error::Usage(format!("unknown model `{s}`")))
    }
}

impl ModelPreset {
    /// Forces the preset's constraints onto `p`: zero constraints set the
    /// parameter to 0, equalities copy the first parameter into the second.
    pub fn project(&self, p: &ModelParams) -> ModelParams {
        let mut q = *p;
        for c in self.constraints() {
            match c {
                Constraint::Zero(a) => q.set(a, 0.0),
                Constraint::Equal(a, b) => {
                    let v = q.get(a);
                    q.set(b, v);
                }
            }
        }
        q
    }
}

pub fn check_preset(p: &ModelParams, tag: ModelPreset) -> bool {
    tag.constraints().iter().all(|c| c.holds(p))
}

pub fn build_hamiltonian(p: &ModelParams) -> Mat4 {
    use Pauli::*;
    let xx = pauli2(X, X);
    let yy = pauli2(Y, Y);
    let zz = pauli2(Z, Z);
    let z1 = crate::linalg::kron(&pauli(Z), &pauli(I));
    let z2 = crate::linalg::kron(&pauli(I), &pauli(Z));
    let dm = pauli2(X, Y) - pauli2(Y, X);
    let h = xx * p.jx + yy * p.jy + zz * p.jz + z1 * p.b_plus() + z2 * p.b_minus() + dm * p.d;
    h * 0.5
}

#[derive(Clone, Copy, Debug)]
pub struct Level {
    pub energy: f64,
    pub state: Vec4,
}

/// Levels E1..E4 in the labelling E_{1,2} = J_z/2 ∓ μ, E_{3,4} = −J_z/2 ∓ ν.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub levels: [Level; 4],
    /// Groups of 1-based labels with equal energy, ordered by energy.
    pub degeneracy: Vec<Vec<usize>>,
}

impl Spectrum {
    pub fn energies(&self) -> [f64; 4] {
        self.levels.map(|l| l.energy)
    }

    pub fn sorted_energies(&self) -> [f64; 4] {
        let mut e = self.energies();
        e.sort_by(f64::total_cmp);
        e
    }

    pub fn ground_energy(&self) -> f64 {
        self.sorted_energies()[0]
    }
}

/// Closed-form eigenpairs.
///
/// For each 2×2 block two algebraically equivalent eigenvector forms exist;
/// the one with the larger norm is used, which covers the μ = ∓B and ν = ±b
/// cases. If both vanish (μ = 0 or ν = 0) the block is diagonal and the basis
/// states are returned.
pub fn analytic_spectrum(p: &ModelParams) -> Spectrum {
    let (jz, b, sb) = (p.jz, p.b_homog, p.b_inhomog);
    let (mu, nu) = (p.mu(), p.nu());
    let jm = C64::new(p.j_minus(), 0.0);
    let c = C64::new(p.j_plus(), p.d); // H[01,10]

    let mut levels = [Level { energy: 0.0, state: [ZERO; 4] }; 4];
    for (idx, lam) in [(0usize, -mu), (1, mu)] {
        // block [[B, J−], [J−, −B]] on (|00⟩, |11⟩)
        let a = [jm, C64::new(lam - b, 0.0)];
        let bb = [C64::new(b + lam, 0.0), jm];
        let v = pick_block_vector(a, bb, if idx == 0 { [ONE, ZERO] } else { [ZERO, ONE] });
        levels[idx] = Level { energy: 0.5 * jz + lam, state: [v[0], ZERO, ZERO, v[1]] };
    }
    for (idx, lam) in [(2usize, -nu), (3, nu)] {
        // block [[b, c], [c*, −b]] on (|01⟩, |10⟩)
        let a = [C64::new(sb + lam, 0.0), c.conj()];
        let bb = [c, C64::new(lam - sb, 0.0)];
        let v = pick_block_vector(a, bb, if idx == 2 { [ONE, ZERO] } else { [ZERO, ONE] });
        levels[idx] = Level { energy: -0.5 * jz + lam, state: [ZERO, v[0], v[1], ZERO] };
    }

    let mut order: Vec<usize> = (0..4).collect();
    order.sort_by(|&i, &j| levels[i].energy.total_cmp(&levels[j].energy));
    let mut degeneracy: Vec<Vec<usize>> = Vec::new();
    for &i in &order {
        match degeneracy.last_mut() {
            Some(group)
                if levels[i].energy - levels[*group.last().unwrap() - 1].energy <= DEGENERACY_TOL =>
            {
                group.push(i + 1)
            }
            _ => degeneracy.push(vec![i + 1]),
        }
    }
    for g in degeneracy.iter_mut() {
        g.sort_unstable();
    }
    Spectrum { levels, degeneracy }
}

fn pick_block_vector(a: [C64; 2], b: [C64; 2], fallback: [C64; 2]) -> [C64; 2] {
    let na = vec_norm(&a);
    let nb = vec_norm(&b);
    let (v, n) = if na >= nb { (a, na) } else { (b, nb) };
    if n <= 1e-14 {
        return fallback;
    }
    [v[0] / n, v[1] / n]
}

/// max_i ‖H ψ_i − E_i ψ_i‖_∞ for a spectrum against a Hamiltonian.
pub fn spectrum_residual(h: &Mat4, s: &Spectrum) -> f64 {
    s.levels
        .iter()
        .map(|l| {
            let hv = h.apply(&l.state);
            hv.iter()
                .zip(&l.state)
                .map(|(x, y)| (x - y * l.energy).norm())
                .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}

/// Largest |⟨ψ_i|ψ_j⟩ − δ_ij| over the spectrum's states.
pub fn orthonormality_defect(s: &Spectrum) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            let d = inner(&s.levels[i].state, &s.levels[j].state);
            let target = if i == j { ONE } else { ZERO };
            worst = worst.max((d - target).norm());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::herm_eig;

    #[test]
    fn projection_satisfies_every_preset() {
        let p = ModelParams::new(0.3, -1.2, 0.7, 0.4, -0.9, 1.1);
        for tag in ModelPreset::ALL {
            assert!(check_preset(&tag.project(&p), tag), "{tag}");
        }
    }

    #[test]
    fn zero_params_give_zero_matrix() {
        assert_eq!(build_hamiltonian(&ModelParams::default()), Mat4::zeros());
    }

    #[test]
    fn pure_dm_off_diagonal() {
        let h = build_hamiltonian(&ModelParams::pure_dm(1.0));
        let mut expected = Mat4::zeros();
        expected[(1, 2)] = C64::new(0.0, 1.0);
        expected[(2, 1)] = C64::new(0.0, -1.0);
        assert_eq!(h, expected);
    }

    #[test]
    fn block_entries_match_explicit_form() {
        let p = ModelParams::new(0.7, -0.3, 1.1, 0.4, -0.9, 1.3);
        let h = build_hamiltonian(&p);
        let re = |x: f64| C64::new(x, 0.0);
        assert!((h[(0, 0)] - re(p.jz / 2.0 + p.b_homog)).norm() < 1e-15);
        assert!((h[(0, 3)] - re(p.j_minus())).norm() < 1e-15);
        assert!((h[(1, 1)] - re(-p.jz / 2.0 + p.b_inhomog)).norm() < 1e-15);
        assert!((h[(2, 2)] - re(-p.jz / 2.0 - p.b_inhomog)).norm() < 1e-15);
        assert!((h[(3, 3)] - re(p.jz / 2.0 - p.b_homog)).norm() < 1e-15);
        assert!((h[(1, 2)] - C64::new(p.j_plus(), p.d)).norm() < 1e-15);
    }

    #[test]
    fn xxx_spectrum_triplet_singlet() {
        let e = herm_eig(&build_hamiltonian(&ModelParams::xxx(1.0, 0.0))).unwrap();
        let expected = [-1.5, 0.5, 0.5, 0.5];
        for (a, b) in e.values.iter().zip(expected) {
            assert!((a - b).abs() < 1e-14);
        }
        let s = analytic_spectrum(&ModelParams::xxx(1.0, 0.0));
        assert_eq!(s.degeneracy, vec![vec![3], vec![1, 2, 4]]);
    }

    #[test]
    fn pure_dm_analytic_levels() {
        let s = analytic_spectrum(&ModelParams::pure_dm(1.0));
        assert_eq!(s.energies(), [0.0, 0.0, -1.0, 1.0]);
        let e = herm_eig(&build_hamiltonian(&ModelParams::pure_dm(1.0))).unwrap();
        assert_eq!(e.values.map(|x| (x * 1e12).round() / 1e12), [-1.0, 0.0, 0.0, 1.0]);
        // E3 = −D ground state ∝ |01⟩ + i|10⟩, i.e. |10⟩ − i|01⟩ up to phase
        let g = s.levels[2].state;
        assert!((g[2] / g[1] - C64::new(0.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn bell_states_without_fields_or_dm() {
        let p = ModelParams::new(0.3, 1.2, -0.4, 0.0, 0.0, 0.0);
        let s = analytic_spectrum(&p);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        for l in &s.levels {
            let mags: Vec<f64> = l.state.iter().map(|z| z.norm()).collect();
            let nonzero: Vec<f64> = mags.into_iter().filter(|m| *m > 1e-14).collect();
            assert_eq!(nonzero.len(), 2);
            assert!(nonzero.iter().all(|m| (m - h).abs() < 1e-14));
        }
    }

    #[test]
    fn singular_normalisations_fall_back() {
        // μ = 0 and ν = 0
        let s = analytic_spectrum(&ModelParams::new(0.0, 0.0, 1.0, 0.0, 0.0, 0.0));
        assert_eq!(s.levels[0].state, [ONE, ZERO, ZERO, ZERO]);
        assert_eq!(s.levels[1].state, [ZERO, ZERO, ZERO, ONE]);
        assert_eq!(s.levels[2].state, [ZERO, ONE, ZERO, ZERO]);
        assert_eq!(s.levels[3].state, [ZERO, ZERO, ONE, ZERO]);
        // μ = −B: the first form is 0/0, the other branch is used
        let p = ModelParams::new(0.0, 0.0, 0.5, -2.0, 1.0, 0.0);
        let h = build_hamiltonian(&p);
        assert!(spectrum_residual(&h, &analytic_spectrum(&p)) < 1e-14);
    }

    #[test]
    fn preset_checks() {
        assert!(check_preset(&ModelParams::pure_dm(1.0), ModelPreset::PureDM));
        assert!(!check_preset(&ModelParams { jx: 1.0, ..ModelParams::pure_dm(1.0) }, ModelPreset::PureDM));
        assert!(check_preset(&ModelParams::xxz(1.0, 0.5, 2.0, 2.0), ModelPreset::XXZDMB));
        assert!(!check_preset(&ModelParams::xxz(1.0, 0.5, 2.0, 2.0), ModelPreset::XXZDM));
        assert!(check_preset(&ModelParams::transverse_ising(1.0, 1.0, 0.5), ModelPreset::TransverseIsingDM));
    }

    #[test]
    fn preset_names_round_trip() {
        for p in ModelPreset::ALL {
            assert_eq!(p.name().parse::<ModelPreset>().unwrap(), p);
        }
        assert_eq!("XXZDMB".parse::<ModelPreset>().unwrap(), ModelPreset::XXZDMB);
    }
}
