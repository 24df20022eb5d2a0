//! Dense complex kernel for the two-qubit problem.
//!
//! Matrices are fixed-size and stack allocated. Basis order for 4×4 objects is
//! |00⟩, |01⟩, |10⟩, |11⟩ with qubit 1 the left Kronecker factor, so basis
//! index = 2·q1 + q2.

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Relative Hermiticity tolerance, paired with an absolute floor.
pub const HERMITIAN_RTOL: f64 = 1e-12;
pub const TOL_FLOOR: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat<const N: usize>(pub [[C64; N]; N]);

pub type Mat2 = Mat<2>;
pub type Mat4 = Mat<4>;
pub type Vec4 = [C64; 4];

impl<const N: usize> Default for Mat<N> {
    fn default() -> Self {
        Self::zeros()
    }
}

impl<const N: usize> Mat<N> {
    pub fn zeros() -> Self {
        Mat([[ZERO; N]; N])
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.0[i][i] = ONE;
        }
        m
    }

    pub fn from_real_diag(d: &[f64; N]) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.0[i][i] = C64::new(d[i], 0.0);
        }
        m
    }

    pub fn from_real(rows: [[f64; N]; N]) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] = C64::new(rows[i][j], 0.0);
            }
        }
        m
    }

    /// Outer product |u⟩⟨v|.
    pub fn outer(u: &[C64; N], v: &[C64; N]) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] = u[i] * v[j].conj();
            }
        }
        m
    }

    pub fn dagger(&self) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] = self.0[j][i].conj();
            }
        }
        m
    }

    pub fn conj(&self) -> Self {
        let mut m = *self;
        for row in m.0.iter_mut() {
            for z in row.iter_mut() {
                *z = z.conj();
            }
        }
        m
    }

    pub fn trace(&self) -> C64 {
        (0..N).map(|i| self.0[i][i]).sum()
    }

    /// Induced ∞-norm: maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        self.0
            .iter()
            .map(|row| row.iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flat_map(|row| row.iter())
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.0
            .iter()
            .flat_map(|row| row.iter())
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// ‖A − A†‖_∞.
    pub fn hermitian_defect(&self) -> f64 {
        (*self - self.dagger()).norm_inf()
    }

    /// ½(A + A†), exactly Hermitian.
    pub fn hermitian_part(&self) -> Self {
        let mut m = (*self + self.dagger()) * 0.5;
        for i in 0..N {
            m.0[i][i].im = 0.0;
        }
        m
    }

    pub fn apply(&self, v: &[C64; N]) -> [C64; N] {
        let mut out = [ZERO; N];
        for (i, o) in out.iter_mut().enumerate() {
            *o = (0..N).map(|j| self.0[i][j] * v[j]).sum();
        }
        out
    }

    pub fn column(&self, j: usize) -> [C64; N] {
        let mut out = [ZERO; N];
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.0[i][j];
        }
        out
    }

    pub fn set_column(&mut self, j: usize, v: &[C64; N]) {
        for i in 0..N {
            self.0[i][j] = v[i];
        }
    }

    pub fn commutator(&self, other: &Self) -> Self {
        *self * *other - *other * *self
    }

    fn check_hermitian(&self) -> Result<()> {
        if !self.is_finite() {
            return Err(Error::NonFiniteInput);
        }
        let tol = (HERMITIAN_RTOL * self.norm_inf()).max(TOL_FLOOR);
        let defect = self.hermitian_defect();
        if defect > tol {
            return Err(Error::NotHermitian { defect, tol });
        }
        Ok(())
    }
}

impl<const N: usize> Index<(usize, usize)> for Mat<N> {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.0[i][j]
    }
}

impl<const N: usize> IndexMut<(usize, usize)> for Mat<N> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.0[i][j]
    }
}

impl<const N: usize> Add for Mat<N> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for i in 0..N {
            for j in 0..N {
                self.0[i][j] += rhs.0[i][j];
            }
        }
        self
    }
}

impl<const N: usize> Sub for Mat<N> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        for i in 0..N {
            for j in 0..N {
                self.0[i][j] -= rhs.0[i][j];
            }
        }
        self
    }
}

impl<const N: usize> Neg for Mat<N> {
    type Output = Self;
    fn neg(self) -> Self {
        self * -1.0
    }
}

impl<const N: usize> Mul for Mat<N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for k in 0..N {
                let a = self.0[i][k];
                if a == ZERO {
                    continue;
                }
                for j in 0..N {
                    m.0[i][j] += a * rhs.0[k][j];
                }
            }
        }
        m
    }
}

impl<const N: usize> Mul<C64> for Mat<N> {
    type Output = Self;
    fn mul(mut self, s: C64) -> Self {
        for row in self.0.iter_mut() {
            for z in row.iter_mut() {
                *z *= s;
            }
        }
        self
    }
}

impl<const N: usize> Mul<f64> for Mat<N> {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        self * C64::new(s, 0.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

pub fn pauli(p: Pauli) -> Mat2 {
    match p {
        Pauli::I => Mat2::identity(),
        Pauli::X => Mat([[ZERO, ONE], [ONE, ZERO]]),
        Pauli::Y => Mat([[ZERO, -I], [I, ZERO]]),
        Pauli::Z => Mat([[ONE, ZERO], [ZERO, -ONE]]),
    }
}

/// Kronecker product a ⊗ b; `a` acts on qubit 1.
pub fn kron(a: &Mat2, b: &Mat2) -> Mat4 {
    let mut m = Mat4::zeros();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    m.0[2 * i + k][2 * j + l] = a.0[i][j] * b.0[k][l];
                }
            }
        }
    }
    m
}

/// σ^α ⊗ σ^β.
pub fn pauli2(a: Pauli, b: Pauli) -> Mat4 {
    kron(&pauli(a), &pauli(b))
}

pub fn vec_norm<const N: usize>(v: &[C64; N]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// ⟨u|v⟩.
pub fn inner<const N: usize>(u: &[C64; N], v: &[C64; N]) -> C64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

/// Eigen-decomposition of a Hermitian 4×4 matrix.
#[derive(Clone, Copy, Debug)]
pub struct HermEig4 {
    /// Ascending.
    pub values: [f64; 4],
    /// Orthonormal eigenvectors as columns, matching `values`.
    pub vectors: Mat4,
}

impl HermEig4 {
    pub fn vector(&self, i: usize) -> Vec4 {
        self.vectors.column(i)
    }

    /// V · diag(values) · V†.
    pub fn reconstruct(&self) -> Mat4 {
        self.map_values(|e| e)
    }

    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> Mat4 {
        let mut d = [0.0; 4];
        for (o, &e) in d.iter_mut().zip(&self.values) {
            *o = f(e);
        }
        self.vectors * Mat4::from_real_diag(&d) * self.vectors.dagger()
    }
}

/// Hermitian eigendecomposition (nalgebra's symmetric QR), sorted ascending.
///
/// Vectors inside a degenerate cluster (spread ≤ 1e−12·max(1, ‖A‖_∞)) are
/// canonicalised by projecting the standard basis vectors onto the cluster
/// and orthonormalising, so the output does not depend on rotation history.
pub fn herm_eig(a: &Mat4) -> Result<HermEig4> {
    a.check_hermitian()?;
    let (values, vectors) = eigh(&a.hermitian_part());
    let scale = a.norm_inf().max(1.0);
    let vectors = canonicalize_clusters(&values, vectors, 1e-12 * scale);
    Ok(HermEig4 { values, vectors })
}

/// Eigenvalues only, for any fixed size. Used for the 8×8 Hermitian dilation
/// in the concurrence computation.
pub fn herm_eigvals<const N: usize>(a: &Mat<N>) -> Result<[f64; N]> {
    a.check_hermitian()?;
    Ok(eigh(&a.hermitian_part()).0)
}

/// V · diag(f(e_i)) · V†, Hermitian by construction.
pub fn spectral_fn(a: &Mat4, f: impl Fn(f64) -> f64) -> Result<Mat4> {
    let eig = herm_eig(a)?;
    let out = eig.map_values(|e| f(e));
    if !out.is_finite() {
        return Err(Error::NonFiniteResult);
    }
    Ok(out.hermitian_part())
}

/// V · diag(f(e_i)) · V† for a complex-valued f (e.g. e^{−iEt}).
pub fn spectral_fn_complex(a: &Mat4, f: impl Fn(f64) -> C64) -> Result<Mat4> {
    let eig = herm_eig(a)?;
    let mut d = Mat4::zeros();
    for i in 0..4 {
        d.0[i][i] = f(eig.values[i]);
    }
    let out = eig.vectors * d * eig.vectors.dagger();
    if !out.is_finite() {
        return Err(Error::NonFiniteResult);
    }
    Ok(out)
}

fn eigh<const N: usize>(a: &Mat<N>) -> ([f64; N], Mat<N>) {
    let m = DMatrix::<C64>::from_fn(N, N, |i, j| a.0[i][j]);
    let e = SymmetricEigen::new(m);
    let mut order: [usize; N] = std::array::from_fn(|i| i);
    order.sort_by(|&i, &j| e.eigenvalues[i].total_cmp(&e.eigenvalues[j]));
    let mut values = [0.0; N];
    let mut vectors = Mat::<N>::zeros();
    for (k, &i) in order.iter().enumerate() {
        values[k] = e.eigenvalues[i];
        for r in 0..N {
            vectors.0[r][k] = e.eigenvectors[(r, i)];
        }
    }
    (values, vectors)
}

fn canonicalize_clusters<const N: usize>(values: &[f64; N], vectors: Mat<N>, tol: f64) -> Mat<N> {
    let mut out = vectors;
    let mut start = 0;
    while start < N {
        let mut end = start + 1;
        while end < N && values[end] - values[end - 1] <= tol {
            end += 1;
        }
        let span: Vec<[C64; N]> = (start..end).map(|i| vectors.column(i)).collect();
        let canon = canonical_basis(&span);
        for (k, col) in canon.iter().enumerate() {
            out.set_column(start + k, col);
        }
        start = end;
    }
    out
}

/// Orthonormal basis of span(`span`) built from projected unit vectors e_k,
/// preferring low k. Single vectors come out with their first dominant
/// component real and positive.
fn canonical_basis<const N: usize>(span: &[[C64; N]]) -> Vec<[C64; N]> {
    let g = span.len();
    let project = |k: usize| -> [C64; N] {
        let mut w = [ZERO; N];
        for u in span {
            let coef = u[k].conj();
            for i in 0..N {
                w[i] += u[i] * coef;
            }
        }
        w
    };
    let mut accepted: Vec<[C64; N]> = Vec::with_capacity(g);
    let mut used = [false; N];
    while accepted.len() < g {
        let residuals: Vec<Option<[C64; N]>> = (0..N)
            .map(|k| {
                if used[k] {
                    return None;
                }
                let mut w = project(k);
                for _ in 0..2 {
                    for u in &accepted {
                        let c = inner(u, &w);
                        for i in 0..N {
                            w[i] -= u[i] * c;
                        }
                    }
                }
                Some(w)
            })
            .collect();
        let best = residuals
            .iter()
            .flatten()
            .map(|w| vec_norm(w))
            .fold(0.0, f64::max);
        let k = (0..N)
            .find(|&k| {
                residuals[k]
                    .as_ref()
                    .is_some_and(|w| vec_norm(w) >= 0.5 * best)
            })
            .expect("cluster span has positive dimension");
        used[k] = true;
        let mut w = residuals[k].unwrap();
        // One more pass of re-orthogonalisation after normalisation.
        for u in &accepted {
            let c = inner(u, &w);
            for i in 0..N {
                w[i] -= u[i] * c;
            }
        }
        let n = vec_norm(&w);
        for z in w.iter_mut() {
            *z /= n;
        }
        accepted.push(w);
    }
    accepted
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &Mat4, b: &Mat4, tol: f64) -> bool {
        (*a - *b).norm_inf() <= tol
    }

    #[test]
    fn kron_zz_is_diag() {
        let zz = pauli2(Pauli::Z, Pauli::Z);
        assert_eq!(zz, Mat4::from_real_diag(&[1.0, -1.0, -1.0, 1.0]));
        assert_eq!(pauli2(Pauli::I, Pauli::I), Mat4::identity());
    }

    #[test]
    fn kron_xy_minus_yx() {
        let m = pauli2(Pauli::X, Pauli::Y) - pauli2(Pauli::Y, Pauli::X);
        let mut expected = Mat4::zeros();
        expected[(1, 2)] = C64::new(0.0, 2.0);
        expected[(2, 1)] = C64::new(0.0, -2.0);
        assert_eq!(m, expected);
    }

    #[test]
    fn eig_of_diagonal_is_permuted_basis() {
        let a = Mat4::from_real_diag(&[3.0, 1.0, 2.0, 0.0]);
        let eig = herm_eig(&a).unwrap();
        assert_eq!(eig.values, [0.0, 1.0, 2.0, 3.0]);
        let perm = [3, 1, 2, 0];
        for (col, &row) in perm.iter().enumerate() {
            let v = eig.vector(col);
            assert!((v[row] - ONE).norm() < 1e-15);
        }
    }

    #[test]
    fn degenerate_cluster_is_canonical() {
        // Rotate a degenerate pair and check the canonical basis is recovered.
        let mut a = Mat4::from_real_diag(&[1.0, 1.0, 2.0, 5.0]);
        a[(0, 1)] = ZERO;
        let eig = herm_eig(&a).unwrap();
        assert!((eig.vector(0)[0] - ONE).norm() < 1e-14);
        assert!((eig.vector(1)[1] - ONE).norm() < 1e-14);
    }

    #[test]
    fn not_hermitian_is_rejected() {
        let mut a = Mat4::zeros();
        a[(0, 1)] = ONE;
        assert!(matches!(herm_eig(&a), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn spectral_fn_basic_cases() {
        let a = pauli2(Pauli::X, Pauli::X) + pauli2(Pauli::Z, Pauli::I) * 0.3;
        assert!(close(&spectral_fn(&a, |x| x).unwrap(), &a, 1e-14));
        assert!(close(&spectral_fn(&Mat4::zeros(), f64::exp).unwrap(), &Mat4::identity(), 0.0));
        let d = Mat4::from_real_diag(&[2f64.ln(), 0.0, 0.0, 0.0]);
        let e = spectral_fn(&d, f64::exp).unwrap();
        assert!(close(&e, &Mat4::from_real_diag(&[2.0, 1.0, 1.0, 1.0]), 1e-15));
    }

    #[test]
    fn spectral_fn_overflow_is_reported() {
        let d = Mat4::from_real_diag(&[1000.0, 0.0, 0.0, 0.0]);
        assert!(matches!(spectral_fn(&d, f64::exp), Err(Error::NonFiniteResult)));
    }
}
