//! Small dense complex linear algebra.
//!
//! Only what the closed forms and their oracles need: fixed-size 2x2 and 4x4
//! matrices, Kronecker products, a cyclic Jacobi eigensolver for Hermitian
//! matrices, PSD square roots, the partial transpose on the second qubit and
//! the Wootters product spectrum. Everything is a pure function on `Copy`
//! values.

#![allow(clippy::needless_range_loop)]

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CScalar = Complex64;

pub const ZERO: CScalar = Complex64::new(0.0, 0.0);
pub const ONE: CScalar = Complex64::new(1.0, 0.0);
pub const I: CScalar = Complex64::new(0.0, 1.0);

/// Input tolerance on `‖m − m†‖_max` for the eigensolver.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Eigenvalues below `-NOT_PSD_TOL` are reported as `NotPsd`; anything
/// between that and the roundoff floor is clamped to zero.
pub const NOT_PSD_TOL: f64 = 1e-9;
/// Nonnegative eigenvalues below `EIG_ROUNDOFF_FLOOR * λ_max` are
/// indistinguishable from roundoff and are zeroed before square roots.
pub const EIG_ROUNDOFF_FLOOR: f64 = 1e-14;

const JACOBI_TOL: f64 = 1e-13;
const JACOBI_MAX_SWEEPS: usize = 100;

pub(crate) fn check_finite(v: f64, what: &'static str) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite(what))
    }
}

/// A vector in ℂ³.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CVec3(pub [CScalar; 3]);

impl CVec3 {
    pub const ZERO: CVec3 = CVec3([ZERO; 3]);

    pub fn new(c1: CScalar, c2: CScalar, c3: CScalar) -> Self {
        CVec3([c1, c2, c3])
    }

    pub fn try_new(c: [CScalar; 3]) -> Result<Self> {
        for z in &c {
            check_finite(z.re, "complex vector")?;
            check_finite(z.im, "complex vector")?;
        }
        Ok(CVec3(c))
    }

    pub fn from_real(v: [f64; 3]) -> Self {
        CVec3(v.map(|x| Complex64::new(x, 0.0)))
    }

    pub fn conj(&self) -> Self {
        CVec3(self.0.map(|z| z.conj()))
    }

    /// Bilinear product `a·b` (no conjugation).
    pub fn dot(&self, other: &CVec3) -> CScalar {
        self.0[0] * other.0[0] + self.0[1] * other.0[1] + self.0[2] * other.0[2]
    }

    /// `a²` in the bilinear sense.
    pub fn square(&self) -> CScalar {
        self.dot(self)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn cross(&self, other: &CVec3) -> CVec3 {
        let (a, b) = (&self.0, &other.0);
        CVec3([
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ])
    }

    pub fn scale(&self, s: CScalar) -> CVec3 {
        CVec3(self.0.map(|z| z * s))
    }

    pub fn scale_re(&self, s: f64) -> CVec3 {
        CVec3(self.0.map(|z| z * s))
    }

    /// `a·σ = a₁σ₁ + a₂σ₂ + a₃σ₃`.
    pub fn dot_sigma(&self) -> CMat2 {
        let [a1, a2, a3] = self.0;
        CMat2::from_rows([[a3, a1 - I * a2], [a1 + I * a2, -a3]])
    }
}

impl Add for CVec3 {
    type Output = CVec3;
    fn add(self, rhs: CVec3) -> CVec3 {
        CVec3([self.0[0] + rhs.0[0], self.0[1] + rhs.0[1], self.0[2] + rhs.0[2]])
    }
}

impl Sub for CVec3 {
    type Output = CVec3;
    fn sub(self, rhs: CVec3) -> CVec3 {
        CVec3([self.0[0] - rhs.0[0], self.0[1] - rhs.0[1], self.0[2] - rhs.0[2]])
    }
}

impl Neg for CVec3 {
    type Output = CVec3;
    fn neg(self) -> CVec3 {
        CVec3(self.0.map(|z| -z))
    }
}

impl Index<usize> for CVec3 {
    type Output = CScalar;
    fn index(&self, i: usize) -> &CScalar {
        &self.0[i]
    }
}

/// Real 3-vector helpers.
pub fn real_norm(v: &[f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

/// Row-major N×N complex matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CMat<const N: usize>(pub [[CScalar; N]; N]);

pub type CMat2 = CMat<2>;
pub type CMat4 = CMat<4>;

impl<const N: usize> Default for CMat<N> {
    fn default() -> Self {
        Self::zeros()
    }
}

impl<const N: usize> CMat<N> {
    pub fn zeros() -> Self {
        CMat([[ZERO; N]; N])
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.0[i][i] = ONE;
        }
        m
    }

    pub fn from_rows(rows: [[CScalar; N]; N]) -> Self {
        CMat(rows)
    }

    pub fn from_diag(d: [f64; N]) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.0[i][i] = Complex64::new(d[i], 0.0);
        }
        m
    }

    pub fn try_from_rows(rows: [[CScalar; N]; N]) -> Result<Self> {
        for row in &rows {
            for z in row {
                check_finite(z.re, "matrix")?;
                check_finite(z.im, "matrix")?;
            }
        }
        Ok(CMat(rows))
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] = self.0[j][i].conj();
            }
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] = self.0[j][i];
            }
        }
        m
    }

    pub fn conj(&self) -> Self {
        CMat(self.0.map(|row| row.map(|z| z.conj())))
    }

    pub fn scale(&self, s: CScalar) -> Self {
        CMat(self.0.map(|row| row.map(|z| z * s)))
    }

    pub fn scale_re(&self, s: f64) -> Self {
        CMat(self.0.map(|row| row.map(|z| z * s)))
    }

    pub fn trace(&self) -> CScalar {
        (0..N).map(|i| self.0[i][i]).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flat_map(|row| row.iter())
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.0
            .iter()
            .flat_map(|row| row.iter())
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// `‖self − other‖_max`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (*self - *other).max_abs()
    }

    /// `‖m − m†‖_max`.
    pub fn hermiticity_defect(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    /// `(m + m†)/2`.
    pub fn hermitian_part(&self) -> Self {
        (*self + self.adjoint()).scale_re(0.5)
    }

    pub fn is_finite(&self) -> bool {
        self.0
            .iter()
            .flat_map(|row| row.iter())
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl<const N: usize> Index<(usize, usize)> for CMat<N> {
    type Output = CScalar;
    fn index(&self, (i, j): (usize, usize)) -> &CScalar {
        &self.0[i][j]
    }
}

impl<const N: usize> IndexMut<(usize, usize)> for CMat<N> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut CScalar {
        &mut self.0[i][j]
    }
}

impl<const N: usize> Add for CMat<N> {
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

impl<const N: usize> Sub for CMat<N> {
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

impl<const N: usize> Neg for CMat<N> {
    type Output = Self;
    fn neg(self) -> Self {
        CMat(self.0.map(|row| row.map(|z| -z)))
    }
}

impl<const N: usize> Mul for CMat<N> {
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

impl<const N: usize> Mul<[CScalar; N]> for CMat<N> {
    type Output = [CScalar; N];
    fn mul(self, v: [CScalar; N]) -> [CScalar; N] {
        let mut out = [ZERO; N];
        for (i, o) in out.iter_mut().enumerate() {
            for (j, vj) in v.iter().enumerate() {
                *o += self.0[i][j] * vj;
            }
        }
        out
    }
}

pub mod pauli {
    use super::*;

    pub fn sigma1() -> CMat2 {
        CMat2::from_rows([[ZERO, ONE], [ONE, ZERO]])
    }

    pub fn sigma2() -> CMat2 {
        CMat2::from_rows([[ZERO, -I], [I, ZERO]])
    }

    pub fn sigma3() -> CMat2 {
        CMat2::from_rows([[ONE, ZERO], [ZERO, -ONE]])
    }

    /// `[σ₁, σ₂, σ₃]`.
    pub fn sigmas() -> [CMat2; 3] {
        [sigma1(), sigma2(), sigma3()]
    }

    /// `ε = iσ₂`.
    pub fn epsilon() -> CMat2 {
        CMat2::from_rows([[ZERO, ONE], [-ONE, ZERO]])
    }

    /// Components `aᵢ = ½ Tr(σᵢ m)` of a traceless 2x2 matrix `m = a·σ`.
    pub fn components(m: &CMat2) -> CVec3 {
        let s = sigmas();
        CVec3([0, 1, 2].map(|i| (s[i] * *m).trace() * 0.5))
    }
}

/// Kronecker product: entry `(2i+k, 2j+l)` is `a(i,j)·b(k,l)`.
pub fn kron(a: &CMat2, b: &CMat2) -> CMat4 {
    let mut m = CMat4::zeros();
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

/// Partial transpose on the second qubit: `out(2i+k, 2j+l) = m(2i+l, 2j+k)`.
pub fn partial_transpose_2(m: &CMat4) -> CMat4 {
    let mut out = CMat4::zeros();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    out.0[2 * i + k][2 * j + l] = m.0[2 * i + l][2 * j + k];
                }
            }
        }
    }
    out
}

/// Wootters spin flip `(σ₂⊗σ₂) m̄ (σ₂⊗σ₂)`.
pub fn spin_flip(m: &CMat4) -> CMat4 {
    let yy = kron(&pauli::sigma2(), &pauli::sigma2());
    yy * m.conj() * yy
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn det<const N: usize>(m: &CMat<N>) -> CScalar {
    let mut a = m.0;
    let mut det = ONE;
    for col in 0..N {
        let pivot = (col..N)
            .max_by(|&x, &y| a[x][col].norm().total_cmp(&a[y][col].norm()))
            .unwrap_or(col);
        if a[pivot][col] == ZERO {
            return ZERO;
        }
        if pivot != col {
            a.swap(pivot, col);
            det = -det;
        }
        let p = a[col][col];
        det *= p;
        for row in col + 1..N {
            let f = a[row][col] / p;
            if f == ZERO {
                continue;
            }
            for k in col..N {
                let v = a[col][k];
                a[row][k] -= f * v;
            }
        }
    }
    det
}

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HermEig<const N: usize> {
    /// Ascending; ties keep the order of the diagonal they came from.
    pub eigenvalues: [f64; N],
    /// Column `i` is the unit eigenvector for `eigenvalues[i]`.
    pub eigenvectors: CMat<N>,
    pub sweeps: usize,
}

pub type HermEigResult = HermEig<4>;

impl<const N: usize> HermEig<N> {
    pub fn eigenvector(&self, i: usize) -> [CScalar; N] {
        std::array::from_fn(|r| self.eigenvectors.0[r][i])
    }

    /// `V·diag(f(λ))·V†`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> CMat<N> {
        let v = &self.eigenvectors;
        let d: [f64; N] = self.eigenvalues.map(f);
        let mut m = CMat::<N>::zeros();
        for i in 0..N {
            for j in 0..N {
                let mut acc = ZERO;
                for k in 0..N {
                    acc += v.0[i][k] * d[k] * v.0[j][k].conj();
                }
                m.0[i][j] = acc;
            }
        }
        m
    }

    pub fn reconstruct(&self) -> CMat<N> {
        self.reconstruct_with(|x| x)
    }
}

fn off_diagonal_norm<const N: usize>(a: &[[CScalar; N]; N]) -> f64 {
    let mut s = 0.0;
    for (i, row) in a.iter().enumerate() {
        for (j, z) in row.iter().enumerate() {
            if i != j {
                s += z.norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Cyclic complex Jacobi for any small Hermitian matrix.
pub fn herm_eig_n<const N: usize>(m: &CMat<N>) -> Result<HermEig<N>> {
    if !m.is_finite() {
        return Err(Error::NonFinite("matrix"));
    }
    let deviation = m.hermiticity_defect();
    if deviation > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    let mut a = m.hermitian_part().0;
    for (i, row) in a.iter_mut().enumerate() {
        row[i] = Complex64::new(row[i].re, 0.0);
    }
    let mut v = CMat::<N>::identity().0;
    let tol = JACOBI_TOL * m.frobenius().max(1.0);

    let mut sweeps = 0;
    loop {
        let off = off_diagonal_norm(&a);
        if off <= tol {
            break;
        }
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps, off });
        }
        sweeps += 1;
        for p in 0..N {
            for q in p + 1..N {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: [usize; N] = std::array::from_fn(|i| i);
    // stable: equal eigenvalues keep diagonal order
    order.sort_by(|&x, &y| a[x][x].re.total_cmp(&a[y][y].re));
    let eigenvalues = order.map(|k| a[k][k].re);
    let mut vecs = CMat::<N>::zeros();
    for (col, &k) in order.iter().enumerate() {
        for r in 0..N {
            vecs.0[r][col] = v[r][k];
        }
    }
    Ok(HermEig {
        eigenvalues,
        eigenvectors: vecs,
        sweeps,
    })
}

/// One complex Jacobi rotation annihilating `a[p][q]`.
///
/// `J = Φ·P` where `Φ = diag(.., 1@p, .., e^{-iφ}@q, ..)` makes the pivot real
/// and `P` is the classical real rotation; `a ← J†aJ`, `v ← vJ`.
fn rotate<const N: usize>(a: &mut [[CScalar; N]; N], v: &mut [[CScalar; N]; N], p: usize, q: usize) {
    let apq = a[p][q];
    let mag = apq.norm();
    if mag <= f64::MIN_POSITIVE {
        return;
    }
    let app = a[p][p].re;
    let aqq = a[q][q].re;
    let theta = (aqq - app) / (2.0 * mag);
    let t = if theta.is_finite() {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    } else {
        0.0
    };
    if t == 0.0 {
        return;
    }
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let phase_conj = (apq / mag).conj();

    let j_pp = Complex64::new(c, 0.0);
    let j_pq = Complex64::new(s, 0.0);
    let j_qp = phase_conj * (-s);
    let j_qq = phase_conj * c;

    for row in a.iter_mut() {
        let (xp, xq) = (row[p], row[q]);
        row[p] = xp * j_pp + xq * j_qp;
        row[q] = xp * j_pq + xq * j_qq;
    }
    for k in 0..N {
        let (xp, xq) = (a[p][k], a[q][k]);
        a[p][k] = j_pp.conj() * xp + j_qp.conj() * xq;
        a[q][k] = j_pq.conj() * xp + j_qq.conj() * xq;
    }
    a[p][q] = ZERO;
    a[q][p] = ZERO;
    a[p][p] = Complex64::new(a[p][p].re, 0.0);
    a[q][q] = Complex64::new(a[q][q].re, 0.0);

    for row in v.iter_mut() {
        let (xp, xq) = (row[p], row[q]);
        row[p] = xp * j_pp + xq * j_qp;
        row[q] = xp * j_pq + xq * j_qq;
    }
}

/// Eigen-decomposition of a 4x4 Hermitian matrix.
pub fn herm_eig(m: &CMat4) -> Result<HermEigResult> {
    herm_eig_n(m)
}

/// Nonnegative eigenvalues with negative roundoff and sub-floor values zeroed.
fn clamped_eigenvalues<const N: usize>(eig: &HermEig<N>) -> Result<[f64; N]> {
    let lo = eig.eigenvalues[0];
    if lo < -NOT_PSD_TOL {
        return Err(Error::NotPsd { eigenvalue: lo });
    }
    let top = eig.eigenvalues[N - 1].max(0.0);
    let floor = EIG_ROUNDOFF_FLOOR * top;
    Ok(eig
        .eigenvalues
        .map(|x| if x <= floor { 0.0 } else { x }))
}

/// Hermitian PSD square root `S` with `S·S = m`.
pub fn psd_sqrt(m: &CMat4) -> Result<CMat4> {
    let eig = herm_eig(m)?;
    let lambdas = clamped_eigenvalues(&eig)?;
    let clamped = HermEig {
        eigenvalues: lambdas,
        ..eig
    };
    Ok(clamped.reconstruct_with(f64::sqrt))
}

/// Square roots of the eigenvalues of `ρ·ρ̃`, descending.
///
/// Computed as the spectrum of the Hermitian `S·ρ̃·S` with `S = √ρ`, which is
/// similar to `ρ·ρ̃`.
pub fn product_spectrum(rho: &CMat4, rho_tilde: &CMat4) -> Result<[f64; 4]> {
    let deviation = rho_tilde.hermiticity_defect();
    if deviation > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    let s = psd_sqrt(rho)?;
    let product = (s * *rho_tilde * s).hermitian_part();
    let eig = herm_eig(&product)?;
    let mut lambdas = clamped_eigenvalues(&eig)?.map(f64::sqrt);
    lambdas.reverse();
    Ok(lambdas)
}

#[cfg(test)]
mod tests {
    use super::pauli::*;
    use super::*;

    fn c(re: f64, im: f64) -> CScalar {
        Complex64::new(re, im)
    }

    fn lcg_matrix(seed: &mut u64) -> CMat4 {
        let mut next = || {
            *seed = seed
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((*seed >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        let mut m = CMat4::zeros();
        for i in 0..4 {
            for j in 0..4 {
                m.0[i][j] = c(next(), next());
            }
        }
        m
    }

    #[test]
    fn kron_examples() {
        assert_eq!(kron(&CMat2::identity(), &CMat2::identity()), CMat4::identity());
        assert_eq!(
            kron(&sigma3(), &CMat2::identity()),
            CMat4::from_diag([1.0, 1.0, -1.0, -1.0])
        );
        // σ₁⊗σ₂ by hand: blocks [[0, σ₂], [σ₂, 0]]
        let expected = CMat4::from_rows([
            [ZERO, ZERO, ZERO, -I],
            [ZERO, ZERO, I, ZERO],
            [ZERO, -I, ZERO, ZERO],
            [I, ZERO, ZERO, ZERO],
        ]);
        assert_eq!(kron(&sigma1(), &sigma2()), expected);
    }

    #[test]
    fn kron_mixed_product() {
        let mut seed = 3;
        for _ in 0..50 {
            let big = lcg_matrix(&mut seed);
            let pick = |m: &CMat4, r: usize| CMat2::from_rows([[m.0[r][0], m.0[r][1]], [m.0[r][2], m.0[r][3]]]);
            let (a, b, cc, d) = (pick(&big, 0), pick(&big, 1), pick(&big, 2), pick(&big, 3));
            let lhs = kron(&a, &b) * kron(&cc, &d);
            let rhs = kron(&(a * cc), &(b * d));
            assert!(lhs.max_abs_diff(&rhs) < 1e-12);
        }
    }

    #[test]
    fn eig_diagonal() {
        let m = CMat4::from_diag([0.49, 0.49, 0.01, 0.01]);
        let e = herm_eig(&m).unwrap();
        assert_eq!(e.eigenvalues, [0.01, 0.01, 0.49, 0.49]);
        assert_eq!(e.sweeps, 0);
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let mut m = CMat4::identity();
        m.0[0][1] = c(1e-6, 0.0);
        assert!(matches!(herm_eig(&m), Err(Error::NotHermitian { .. })));
        m.0[0][1] = c(f64::NAN, 0.0);
        assert!(matches!(herm_eig(&m), Err(Error::NonFinite(_))));
    }

    #[test]
    fn eig_reconstruction_and_orthonormality() {
        let mut seed = 11;
        for _ in 0..500 {
            let a = lcg_matrix(&mut seed);
            let h = (a + a.adjoint()).scale_re(0.5);
            let e = herm_eig(&h).unwrap();
            assert!(e.reconstruct().max_abs_diff(&h) < 1e-11);
            for w in e.eigenvalues.windows(2) {
                assert!(w[0] <= w[1]);
            }
            let vv = e.eigenvectors.adjoint() * e.eigenvectors;
            assert!(vv.max_abs_diff(&CMat4::identity()) < 1e-13);
            for i in 0..4 {
                let v = e.eigenvector(i);
                let hv = h * v;
                for r in 0..4 {
                    assert!((hv[r] - v[r] * e.eigenvalues[i]).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn sqrt_examples() {
        let quarter = CMat4::identity().scale_re(0.25);
        assert!(psd_sqrt(&quarter).unwrap().max_abs_diff(&CMat4::identity().scale_re(0.5)) < 1e-15);
        let mut seed = 5;
        for _ in 0..100 {
            let a = lcg_matrix(&mut seed);
            let p = a * a.adjoint();
            let s = psd_sqrt(&p).unwrap();
            assert!((s * s).max_abs_diff(&p) < 1e-11);
            assert!(s.hermiticity_defect() < 1e-12);
        }
        let neg = CMat4::from_diag([0.5, 0.5, 0.1, -1e-6]);
        assert!(matches!(psd_sqrt(&neg), Err(Error::NotPsd { .. })));
        // tiny negative roundoff is clamped
        let almost = CMat4::from_diag([0.5, 0.5, 0.0, -1e-13]);
        assert!(psd_sqrt(&almost).is_ok());
    }

    #[test]
    fn partial_transpose_examples() {
        assert_eq!(partial_transpose_2(&CMat4::identity()), CMat4::identity());
        let m = kron(&sigma1(), &sigma2());
        assert_eq!(partial_transpose_2(&m), -m);
        let mut seed = 9;
        for _ in 0..100 {
            let a = lcg_matrix(&mut seed);
            let h = (a + a.adjoint()).scale_re(0.5);
            let pt = partial_transpose_2(&h);
            assert_eq!(partial_transpose_2(&pt), h);
            assert!(pt.hermiticity_defect() < 1e-15);
            assert!((pt.trace() - h.trace()).norm() < 1e-15);
        }
    }

    #[test]
    fn product_spectrum_maximally_mixed() {
        let q = CMat4::identity().scale_re(0.25);
        let l = product_spectrum(&q, &q).unwrap();
        for x in l {
            assert!((x - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn determinant() {
        assert!((det(&CMat4::from_diag([1.0, 2.0, 3.0, 4.0])) - c(24.0, 0.0)).norm() < 1e-14);
        // det(σ₁⊗σ₂) = det(σ₁)² det(σ₂)² = 1
        assert!((det(&kron(&sigma1(), &sigma2())) - ONE).norm() < 1e-14);
        assert_eq!(det(&CMat4::zeros()), ZERO);
    }

    #[test]
    fn dot_sigma_matches_paulis() {
        let v = CVec3::new(c(0.3, 0.1), c(-0.2, 0.5), c(0.7, -0.4));
        let s = sigmas();
        let expected = s[0].scale(v[0]) + s[1].scale(v[1]) + s[2].scale(v[2]);
        assert!(v.dot_sigma().max_abs_diff(&expected) < 1e-15);
        let back = components(&v.dot_sigma());
        assert!((back - v).norm_sqr() < 1e-30);
    }
}
