//! Property tests tying each closed form to an independent numeric path.

use std::f64::consts::PI;

use proptest::prelude::*;

use dmqubit::critical::{
    concurrence_at, critical_closed, critical_solve, transverse_dc, zero_t_concurrence, CriticalCase, CriticalQuery,
};
use dmqubit::dynamics::{evolution_operator, evolve_basis_closed_form, BasisState};
use dmqubit::entanglement::{
    concurrence_general, concurrence_numeric, lambdas_general, pure_state_concurrence, select_formula, sort_desc,
    spin_flipped,
};
use dmqubit::hamiltonian::{
    analytic_spectrum, build_hamiltonian, orthonormality_defect, spectrum_residual, ModelParams, ModelPreset, Param,
};
use dmqubit::linalg::{herm_eig, herm_eigvals, kron, spectral_fn, Mat, Mat2, Mat4, C64};
use dmqubit::thermal::{density_matrix_analytic, density_matrix_numeric, partition_function, DensityMatrix, Temperature};

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

fn params() -> impl Strategy<Value = ModelParams> {
    prop::array::uniform6(-5.0..5.0f64).prop_map(|a| ModelParams::new(a[0], a[1], a[2], a[3], a[4], a[5]))
}

fn kt() -> impl Strategy<Value = f64> {
    0.05..10.0f64
}

fn complex(r: f64) -> impl Strategy<Value = C64> {
    (-r..r, -r..r).prop_map(|(a, b)| C64::new(a, b))
}

fn mat2() -> impl Strategy<Value = Mat2> {
    prop::array::uniform4(complex(3.0)).prop_map(|z| Mat([[z[0], z[1]], [z[2], z[3]]]))
}

fn hermitian(r: f64) -> impl Strategy<Value = Mat4> {
    (prop::array::uniform4(-r..r), prop::array::uniform6(complex(r))).prop_map(|(d, off)| {
        let mut m = Mat4::from_real_diag(&d);
        let mut k = 0;
        for i in 0..4 {
            for j in i + 1..4 {
                m[(i, j)] = off[k];
                m[(j, i)] = off[k].conj();
                k += 1;
            }
        }
        m
    })
}

fn state() -> impl Strategy<Value = [C64; 4]> {
    prop::array::uniform4(complex(1.0)).prop_filter("nonzero", |v| v.iter().map(|z| z.norm_sqr()).sum::<f64>() > 1e-3)
}

fn numeric(p: &ModelParams, kt: f64) -> DensityMatrix {
    density_matrix_numeric(p, Temperature::new(kt).unwrap()).unwrap()
}

fn c_numeric(p: &ModelParams, kt: f64) -> f64 {
    concurrence_numeric(&numeric(p, kt)).unwrap().value
}

proptest! {
    #![proptest_config(config(1000))]

    #[test]
    fn kron_is_bilinear(a in mat2(), b in mat2(), c in mat2(), s in complex(2.0)) {
        let lhs = kron(&(a * s + c), &b);
        let rhs = kron(&a, &b) * s + kron(&c, &b);
        prop_assert!((lhs - rhs).max_abs() <= 1e-12);
        let lhs = kron(&a, &(b * s + c));
        let rhs = kron(&a, &b) * s + kron(&a, &c);
        prop_assert!((lhs - rhs).max_abs() <= 1e-12);
    }

    #[test]
    fn herm_eig_reconstructs(m in hermitian(10.0)) {
        let e = herm_eig(&m).unwrap();
        let scale = m.norm_inf().max(1.0);
        prop_assert!((e.reconstruct() - m).max_abs() <= 1e-12 * scale);
        prop_assert!((e.vectors.dagger() * e.vectors - Mat4::identity()).max_abs() <= 1e-12);
        prop_assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn spectral_exp_inverts(m in hermitian(1.0)) {
        let a = spectral_fn(&m, f64::exp).unwrap();
        let b = spectral_fn(&m, |x| (-x).exp()).unwrap();
        prop_assert!((a * b - Mat4::identity()).max_abs() <= 1e-10);
    }

    #[test]
    fn analytic_spectrum_matches_numeric(p in params()) {
        let h = build_hamiltonian(&p);
        let s = analytic_spectrum(&p);
        let numeric = herm_eig(&h).unwrap().values;
        let analytic = s.sorted_energies();
        for (a, n) in analytic.iter().zip(&numeric) {
            prop_assert!((a - n).abs() <= 1e-10, "{analytic:?} vs {numeric:?}");
        }
        prop_assert!(spectrum_residual(&h, &s) <= 1e-10);
        prop_assert!(orthonormality_defect(&s) <= 1e-10);
    }

    #[test]
    fn spectrum_symmetries(p in params()) {
        let e = analytic_spectrum(&p).sorted_energies();
        let mut q = p;
        q.d = -p.d;
        let flipped = analytic_spectrum(&q).sorted_energies();
        q = p;
        std::mem::swap(&mut q.jx, &mut q.jy);
        let swapped = analytic_spectrum(&q).sorted_energies();
        for i in 0..4 {
            prop_assert!((e[i] - flipped[i]).abs() <= 1e-12);
            prop_assert!((e[i] - swapped[i]).abs() <= 1e-12);
        }
    }

    #[test]
    fn thermal_states_agree(p in params(), kt in kt()) {
        let t = Temperature::new(kt).unwrap();
        let a = density_matrix_analytic(&p, t).unwrap();
        let n = density_matrix_numeric(&p, t).unwrap();
        prop_assert!((*a.matrix() - *n.matrix()).norm_inf() <= 1e-10);
        prop_assert!((a.matrix().trace().re - 1.0).abs() <= 1e-12);
        let h = build_hamiltonian(&p);
        prop_assert!(a.matrix().commutator(&h).max_abs() <= 1e-10 * h.norm_inf().max(1.0));
        prop_assert!(herm_eigvals(a.matrix()).unwrap()[0] >= -1e-12);
    }

    #[test]
    fn partition_function_matches_trace(p in params(), kt in kt()) {
        let z = partition_function(&p, Temperature::new(kt).unwrap()).unwrap();
        let h = build_hamiltonian(&p);
        let e0 = herm_eig(&h).unwrap().values[0];
        let tr = spectral_fn(&h, |x| (-(x - e0) / kt).exp()).unwrap().trace().re;
        let ln_numeric = tr.ln() - e0 / kt;
        prop_assert!((z.ln() - ln_numeric).abs() <= 1e-10 * ln_numeric.abs().max(1.0));
    }

    #[test]
    fn general_lambdas_match_numeric(p in params(), kt in kt()) {
        let general = sort_desc(lambdas_general(&p, kt).unwrap());
        let report = concurrence_numeric(&numeric(&p, kt)).unwrap();
        for (g, n) in general.iter().zip(&report.lambdas) {
            prop_assert!((g - n).abs() <= 1e-9, "{general:?} vs {:?}", report.lambdas);
        }
        prop_assert!((concurrence_general(&p, kt).unwrap().value - report.value).abs() <= 1e-9);
        prop_assert!((0.0..=1.0).contains(&report.value));
    }

    #[test]
    fn concurrence_symmetries(p in params(), kt in kt()) {
        let c = c_numeric(&p, kt);
        let mut q = p;
        q.d = -p.d;
        prop_assert!((c - c_numeric(&q, kt)).abs() <= 1e-9);
        q = p;
        std::mem::swap(&mut q.jx, &mut q.jy);
        prop_assert!((c - c_numeric(&q, kt)).abs() <= 1e-9);
    }

    #[test]
    fn selected_formula_matches_numeric(p in params(), kt in kt()) {
        if let Some(entry) = select_formula(&p, kt) {
            prop_assert!((entry.evaluate(&p, kt) - c_numeric(&p, kt)).abs() <= 1e-9, "{:?}", entry.id);
        }
    }

    #[test]
    fn evolution_is_unitary(p in params(), t in -10.0..10.0f64, s in -10.0..10.0f64) {
        let u = evolution_operator(&p, t).unwrap();
        prop_assert!(u.unitarity_defect() <= 1e-11);
        let v = evolution_operator(&p, s).unwrap();
        let w = evolution_operator(&p, t + s).unwrap();
        prop_assert!((*u.compose(&v).matrix() - *w.matrix()).max_abs() <= 1e-10);
    }

    #[test]
    fn pure_state_formula_matches_numeric(psi in state()) {
        let rho = DensityMatrix::pure(&psi).unwrap();
        let c = concurrence_numeric(&rho).unwrap().value;
        prop_assert!((pure_state_concurrence(&psi) - c).abs() <= 1e-9);
        // ρ·ρ̃ has rank one for pure states
        let lambdas = concurrence_numeric(&rho).unwrap().lambdas;
        prop_assert!(lambdas[1] <= 1e-6);
        prop_assert!(spin_flipped(rho.matrix()).hermitian_defect() <= 1e-12);
    }
}

proptest! {
    #![proptest_config(config(200))]

    #[test]
    fn high_temperature_is_separable(p in params()) {
        prop_assert!(c_numeric(&p, 100.0) == 0.0);
    }

    #[test]
    fn dm_rotation_identity(j in -3.0..3.0f64, d in -3.0..3.0f64, jz in -3.0..3.0f64, kt in kt()) {
        let a = c_numeric(&ModelParams::xxz(j, jz, d, 0.0), kt);
        let b = c_numeric(&ModelParams::xxz(j.hypot(d), jz, 0.0, 0.0), kt);
        prop_assert!((a - b).abs() <= 1e-10);
    }

    #[test]
    fn zero_temperature_limit(j in 0.2..2.0f64, b in 0.2..2.0f64, d in 0.0..3.0f64) {
        prop_assume!((d - b).abs() >= 0.05);
        let p = ModelParams::transverse_ising(j, b, d);
        let c0 = zero_t_concurrence(&p).unwrap();
        prop_assert!((c0 - concurrence_at(&p, 1e-4).unwrap()).abs() <= 1e-6);
    }

    #[test]
    fn onset_is_monotone_in_d(jz in -2.0..2.0f64, kt in 0.1..2.0f64) {
        let p = ModelParams::ising_dm(jz, 0.0);
        let dc = critical_closed(
            if jz > 0.0 { CriticalCase::IsingDMAntiferroCoupling } else { CriticalCase::IsingDMFerroCoupling },
            &p,
            Some(kt),
        );
        prop_assume!(dc.is_ok());
        let dc = dc.unwrap();
        let mut last = 0.0;
        for i in 0..=40 {
            let d = dc * 3.0 * i as f64 / 40.0;
            let c = c_numeric(&p.with(Param::D, d), kt);
            prop_assert!(c >= last - 1e-12);
            if d < dc * (1.0 - 1e-6) {
                prop_assert!(c == 0.0);
            }
            last = c;
        }
    }
}

proptest! {
    #![proptest_config(config(100))]

    #[test]
    fn closed_form_columns_match_operator(
        jx in -3.0..3.0f64, jy in -3.0..3.0f64, jz in -3.0..3.0f64, d in -3.0..3.0f64, t in -5.0..5.0f64,
    ) {
        let p = ModelParams::new(jx, jy, jz, 0.0, 0.0, d);
        let u = evolution_operator(&p, t).unwrap();
        for s in BasisState::ALL {
            let col = u.matrix().column(s.index());
            let closed = evolve_basis_closed_form(&p, t, s).unwrap();
            for (a, b) in col.iter().zip(&closed) {
                prop_assert!((a - b).norm() <= 1e-10);
            }
        }
    }

    #[test]
    fn bell_time_is_maximally_entangling(d in 0.1..5.0f64) {
        let p = ModelParams::pure_dm(d);
        let psi = evolve_basis_closed_form(&p, PI / (4.0 * d), BasisState::S01).unwrap();
        prop_assert!((pure_state_concurrence(&psi) - 1.0).abs() <= 1e-10);
    }
}

fn solve(preset: ModelPreset, free: Param, params: ModelParams, kt: f64, bracket: (f64, f64)) -> f64 {
    critical_solve(&CriticalQuery { preset, free, params, kt, bracket }).unwrap()
}

proptest! {
    #![proptest_config(config(50))]

    #[test]
    fn pure_dm_tc_matches_bisection(d in 0.2..3.0f64) {
        let p = ModelParams::pure_dm(d);
        let c = critical_closed(CriticalCase::PureDMTemperature, &p, None).unwrap();
        prop_assert!((c - solve(ModelPreset::PureDM, Param::KT, p, 0.0, (0.01 * d, 10.0 * d))).abs() <= 1e-5);
    }

    #[test]
    fn xx_tc_matches_bisection(j in -3.0..3.0f64, d in -3.0..3.0f64) {
        let s = j.hypot(d);
        prop_assume!(s > 0.1);
        let p = ModelParams::xxz(j, 0.0, d, 0.0);
        let c = critical_closed(CriticalCase::XXDMTemperature, &p, None).unwrap();
        prop_assert!((c - solve(ModelPreset::XXDM, Param::KT, p, 0.0, (0.01 * s, 10.0 * s))).abs() <= 1e-5);
    }

    #[test]
    fn xxx_tc_matches_bisection(j in 0.2..3.0f64) {
        let p = ModelParams::xxx(j, 0.0);
        let c = critical_closed(CriticalCase::XXXTemperature, &p, None).unwrap();
        prop_assert!((c - solve(ModelPreset::XXX, Param::KT, p, 0.0, (0.01 * j, 10.0 * j))).abs() <= 1e-5);
    }

    #[test]
    fn ising_dc_matches_bisection(jz in -3.0..3.0f64, kt in 0.1..2.0f64) {
        prop_assume!(jz.abs() > 0.1);
        let p = ModelParams::ising_dm(jz, 0.0);
        let case = if jz > 0.0 { CriticalCase::IsingDMAntiferroCoupling } else { CriticalCase::IsingDMFerroCoupling };
        let c = critical_closed(case, &p, Some(kt)).unwrap();
        let found = solve(ModelPreset::IsingDM, Param::D, p, kt, (0.0, 1.0 + jz.abs() + 10.0 * kt));
        prop_assert!((c - found).abs() <= 1e-5);
    }

    #[test]
    fn xxx_dm_dc_matches_bisection(j in -2.0..2.0f64, kt in 0.1..2.0f64) {
        let p = ModelParams::xxx(j, 0.0);
        let c = critical_closed(CriticalCase::XXXDMCoupling, &p, Some(kt));
        prop_assume!(c.is_ok());
        let found = solve(ModelPreset::XXXDM, Param::D, p, kt, (0.0, 5.0 + j.abs() + 20.0 * kt));
        prop_assert!((c.unwrap() - found).abs() <= 1e-5);
    }

    #[test]
    fn xxz_dm_dc_matches_bisection(jz in -3.0..-0.5f64, r in -0.9..0.9f64) {
        let p = ModelParams::xxz(r * jz.abs(), jz, 0.0, 0.0);
        let c = critical_closed(CriticalCase::XXZDMCoupling, &p, None).unwrap();
        let found = solve(ModelPreset::XXZDM, Param::D, p, 0.0, (0.0, 1.0 + 2.0 * jz.abs()));
        prop_assert!((c - found).abs() <= 1e-5);
    }

    #[test]
    fn nuclear_dc_matches_bisection(
        jz in -2.0..2.0f64, b in -2.0..2.0f64, small_b in -2.0..2.0f64, kt in 0.1..2.0f64,
    ) {
        // ρ11/ρ44 = e^{−2B/kT}; past ~1e−9 the numeric state cannot resolve
        // √(ρ11·ρ44) and the bisection loses its reference
        prop_assume!(b.abs() / kt <= 10.0);
        let p = ModelParams::new(0.0, 0.0, jz, b, small_b, 0.0);
        let c = critical_closed(CriticalCase::NuclearSpinCoupling, &p, Some(kt)).unwrap();
        let hi = 5.0 + jz.abs() + small_b.abs() + 20.0 * kt;
        let found = solve(ModelPreset::NuclearSpinIsingDM, Param::D, p, kt, (0.0, hi));
        prop_assert!((c - found).abs() <= 1e-5);
    }

    #[test]
    fn xxz_dm_b_thresholds_match_bisection(j in 0.2..2.0f64, jz in -0.5..2.0f64, d in 0.0..2.0f64) {
        let p = ModelParams::xxz(j, jz, d, 0.0);
        let bc = critical_closed(CriticalCase::XXZDMBField, &p, None).unwrap();
        prop_assume!(bc > 0.05);
        let found = solve(ModelPreset::XXZDMB, Param::B, p, 0.0, (0.0, 2.0 * bc + 2.0));
        prop_assert!((bc - found).abs() <= 1e-5);

        // D_c at a field above the D = 0 threshold
        let field = j + jz + 0.5;
        let q = ModelParams::xxz(j, jz, 0.0, field);
        let dc = critical_closed(CriticalCase::XXZDMBCoupling, &q, None).unwrap();
        let found = solve(ModelPreset::XXZDMB, Param::D, q, 0.0, (0.0, 2.0 * dc + 2.0));
        prop_assert!((dc - found).abs() <= 1e-5);
    }

    #[test]
    fn transverse_switch_has_zero_concurrence(j in 0.2..2.0f64, b in 0.0..2.0f64, kt in 0.02..2.0f64) {
        let p = ModelParams::transverse_ising(j, b, 0.0);
        let dc = transverse_dc(&p, kt).unwrap();
        let q = p.with(Param::D, dc);
        prop_assert!(c_numeric(&q, kt) <= 1e-9);
        // the two λ orderings coincide there
        let l = lambdas_general(&q, kt).unwrap();
        prop_assert!((l[1] - l[3]).abs() <= 1e-9 * l[1].abs().max(1e-300) + 1e-15);
    }
}
