//! Reduced density matrices and the local-unitary canonical form.

use num_complex::Complex64;

use crate::cxmat::{self, kron, pauli, CMat2, CMat4, CScalar, CVec3, I, ONE, ZERO};
use crate::error::{Error, Result};
use crate::state::{spin_vector, AmplitudeVector, FamilyParams};

/// Hermiticity and trace tolerance for validated density matrices.
pub const DENSITY_TOL: f64 = 1e-12;
/// Smallest admissible eigenvalue of a validated density matrix.
pub const DENSITY_EIG_TOL: f64 = 1e-10;
/// Spin vectors shorter than this get no alignment rotation.
pub const ZERO_VECTOR_TOL: f64 = 1e-12;
/// `x₃ ≤ −r(1 − ANTIPODAL_TOL)` counts as pointing along −z.
pub const ANTIPODAL_TOL: f64 = 1e-12;

/// Validated 4x4 (two-qubit) density matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix {
    m: CMat4,
}

/// Validated 2x2 (single-qubit) density matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitDensity {
    m: CMat2,
}

fn validate<const N: usize>(m: &CMat<N>) -> Result<()> {
    if !m.is_finite() {
        return Err(Error::NonFinite("density matrix"));
    }
    let deviation = m.hermiticity_defect();
    if deviation > DENSITY_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    let tr = m.trace();
    if (tr - ONE).norm() > DENSITY_TOL {
        return Err(Error::Domain(format!("trace is {tr}, expected 1")));
    }
    let eig = cxmat::herm_eig_n(m)?;
    if eig.eigenvalues[0] < -DENSITY_EIG_TOL {
        return Err(Error::NotPsd {
            eigenvalue: eig.eigenvalues[0],
        });
    }
    Ok(())
}

use crate::cxmat::CMat;

impl DensityMatrix {
    pub fn new(m: CMat4) -> Result<Self> {
        validate(&m)?;
        Ok(DensityMatrix { m })
    }

    /// For matrices that are density matrices by construction.
    pub(crate) fn from_trusted(m: CMat4) -> Self {
        DensityMatrix { m }
    }

    pub fn matrix(&self) -> &CMat4 {
        &self.m
    }

    /// Eigenvalues, ascending.
    pub fn spectrum(&self) -> Result<[f64; 4]> {
        Ok(cxmat::herm_eig(&self.m)?.eigenvalues)
    }

    /// `Tr ρ²` by direct multiplication.
    pub fn purity(&self) -> f64 {
        (self.m * self.m).trace().re
    }
}

impl QubitDensity {
    pub fn new(m: CMat2) -> Result<Self> {
        validate(&m)?;
        Ok(QubitDensity { m })
    }

    pub fn matrix(&self) -> &CMat2 {
        &self.m
    }

    pub fn det(&self) -> f64 {
        cxmat::det(&self.m).re
    }

    /// Bloch vector `(Tr ρσ₁, Tr ρσ₂, Tr ρσ₃)`.
    pub fn bloch(&self) -> [f64; 3] {
        pauli::sigmas().map(|s| (self.m * s).trace().re)
    }
}

/// `Λ = x·σ⊗𝟙 + 𝟙⊗y·σ + w·σ⊗z̄·σ + w̄·σ⊗z·σ`.
pub fn lambda_matrix(p: &FamilyParams) -> CMat4 {
    let (w, z) = (p.w(), p.z());
    let id = CMat2::identity();
    let x = CVec3::from_real(spin_vector(w));
    let y = CVec3::from_real(spin_vector(z));
    kron(&x.dot_sigma(), &id)
        + kron(&id, &y.dot_sigma())
        + kron(&w.dot_sigma(), &z.conj().dot_sigma())
        + kron(&w.conj().dot_sigma(), &z.dot_sigma())
}

/// `Σᵢ xᵢ σᵢ⊗𝟙 + Σⱼ yⱼ 𝟙⊗σⱼ + Σᵢⱼ fᵢⱼ σᵢ⊗σⱼ` for real coefficients.
pub fn lambda_from_components(x: &[f64; 3], y: &[f64; 3], f: &[[f64; 3]; 3]) -> CMat4 {
    let s = pauli::sigmas();
    let id = CMat2::identity();
    let mut m = CMat4::zeros();
    for i in 0..3 {
        m = m + kron(&s[i], &id).scale_re(x[i]) + kron(&id, &s[i]).scale_re(y[i]);
        for j in 0..3 {
            m = m + kron(&s[i], &s[j]).scale_re(f[i][j]);
        }
    }
    m
}

/// `ρ = ¼(𝟙 + Λ)`.
pub fn rho_from_params(p: &FamilyParams) -> DensityMatrix {
    DensityMatrix::from_trusted((CMat4::identity() + lambda_matrix(p)).scale_re(0.25))
}

/// A reduced density matrix on one or two qubits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Reduced {
    Qubit(QubitDensity),
    Pair(DensityMatrix),
}

impl Reduced {
    pub fn into_pair(self) -> Option<DensityMatrix> {
        match self {
            Reduced::Pair(d) => Some(d),
            Reduced::Qubit(_) => None,
        }
    }

    pub fn into_qubit(self) -> Option<QubitDensity> {
        match self {
            Reduced::Qubit(d) => Some(d),
            Reduced::Pair(_) => None,
        }
    }
}

fn check_subset(keep: &[usize]) -> Result<()> {
    let ok = matches!(keep.len(), 1 | 2)
        && keep.iter().all(|&q| (1..=4).contains(&q))
        && (keep.len() == 1 || keep[0] != keep[1]);
    if ok {
        Ok(())
    } else {
        Err(Error::BadSubset(keep.to_vec()))
    }
}

/// Reduces `|Ψ⟩⟨Ψ|` onto the qubits in `keep` (labels 1..=4).
///
/// The kept qubits are ordered ascending, so `keep = [4, 2]` yields the
/// matrix with row index `2·q₂ + q₄`.
pub fn partial_trace(a: &AmplitudeVector, keep: &[usize]) -> Result<Reduced> {
    check_subset(keep)?;
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    // qubit q sits at bit 4 - q of the amplitude index
    let kept_bits: Vec<u32> = kept.iter().map(|&q| 4 - q as u32).collect();
    let disc_bits: Vec<u32> = (1..=4usize)
        .filter(|q| !kept.contains(q))
        .map(|q| 4 - q as u32)
        .collect();
    let compose = |k: usize, d: usize| -> usize {
        let mut idx = 0usize;
        for (pos, &bit) in kept_bits.iter().enumerate() {
            let b = (k >> (kept_bits.len() - 1 - pos)) & 1;
            idx |= b << bit;
        }
        for (pos, &bit) in disc_bits.iter().enumerate() {
            let b = (d >> (disc_bits.len() - 1 - pos)) & 1;
            idx |= b << bit;
        }
        idx
    };
    let dk = 1usize << kept.len();
    let dd = 1usize << disc_bits.len();
    let entry = |r: usize, c: usize| -> CScalar {
        (0..dd)
            .map(|d| a.0[compose(r, d)] * a.0[compose(c, d)].conj())
            .sum()
    };
    Ok(if dk == 2 {
        let mut m = CMat2::zeros();
        for r in 0..2 {
            for c in 0..2 {
                m.0[r][c] = entry(r, c);
            }
        }
        Reduced::Qubit(QubitDensity { m })
    } else {
        let mut m = CMat4::zeros();
        for r in 0..4 {
            for c in 0..4 {
                m.0[r][c] = entry(r, c);
            }
        }
        Reduced::Pair(DensityMatrix { m })
    })
}

/// Two-qubit reduction; `i` and `j` are distinct labels in 1..=4.
pub fn reduce_pair(a: &AmplitudeVector, i: usize, j: usize) -> Result<DensityMatrix> {
    partial_trace(a, &[i, j]).map(|r| r.into_pair().expect("two labels give a pair"))
}

/// Single-qubit reduction.
pub fn reduce_qubit(a: &AmplitudeVector, q: usize) -> Result<QubitDensity> {
    partial_trace(a, &[q]).map(|r| r.into_qubit().expect("one label gives a qubit"))
}

/// `r + x₃` without cancellation when `x₃ < 0`.
fn r_plus_x3(x: &[f64; 3], r: f64) -> f64 {
    if x[2] >= 0.0 {
        r + x[2]
    } else {
        (x[0] * x[0] + x[1] * x[1]) / (r - x[2])
    }
}

/// `U_x = (r𝟙 + (x·σ)σ₃)/√(2r(r+x₃))`, so that `U†(x·σ)U = rσ₃`.
pub fn rotation_to_z(x: &[f64; 3]) -> Result<CMat2> {
    let r = cxmat::real_norm(x);
    if r <= ZERO_VECTOR_TOL {
        return Err(Error::ZeroVector);
    }
    if x[2] <= -r * (1.0 - ANTIPODAL_TOL) {
        return Err(Error::AntipodalDegenerate);
    }
    let rp = r_plus_x3(x, r);
    let norm = 1.0 / (2.0 * r * rp).sqrt();
    let d = Complex64::new(rp, 0.0);
    let off = Complex64::new(x[0], x[1]);
    Ok(CMat2::from_rows([[d, -off.conj()], [off, d]]).scale_re(norm))
}

/// `e^{i(π/2)σ₁} = iσ₁`, which maps `x·σ` to `(x₁, −x₂, −x₃)·σ`.
pub fn half_turn_about_axis1() -> CMat2 {
    pauli::sigma1().scale(I)
}

/// How a spin vector was brought onto +z.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RotationPath {
    /// `U_x` applied directly.
    Direct,
    /// Spin pointed along −z: half turn about axis 1 first, then `U_x`.
    Antipodal,
    /// Spin vanished and the companion vector already had no third component.
    Identity,
    /// Spin vanished; rotated a real axis orthogonal to the companion to +z.
    Perpendicular,
}

/// Local rotation on one side together with the transformed companion vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SideRotation {
    pub unitary: CMat2,
    /// Components of `U†(v·σ)U`; the third one vanishes.
    pub rotated: CVec3,
    pub path: RotationPath,
}

/// Third component rotated to zero with the direct `U_x` (component form).
fn rotate_companion(v: &CVec3, x: &[f64; 3]) -> CVec3 {
    let r = cxmat::real_norm(x);
    let rp = r_plus_x3(x, r);
    let v3 = v[2];
    CVec3::new(v[0] - v3 * (x[0] / rp), v[1] - v3 * (x[1] / rp), ZERO)
}

/// Aligns `spin` (the spin vector of `v`) with +z and rotates `v` alongside.
pub fn align_side(spin: &[f64; 3], v: &CVec3) -> Result<SideRotation> {
    match rotation_to_z(spin) {
        Ok(u) => Ok(SideRotation {
            unitary: u,
            rotated: rotate_companion(v, spin),
            path: RotationPath::Direct,
        }),
        Err(Error::AntipodalDegenerate) => {
            let flipped = [spin[0], -spin[1], -spin[2]];
            let v_flipped = CVec3::new(v[0], -v[1], -v[2]);
            let u = rotation_to_z(&flipped)?;
            Ok(SideRotation {
                unitary: half_turn_about_axis1() * u,
                rotated: rotate_companion(&v_flipped, &flipped),
                path: RotationPath::Antipodal,
            })
        }
        Err(Error::ZeroVector) => Ok(align_real_companion(v)),
        Err(e) => Err(e),
    }
}

/// With a vanishing spin vector, `v = e^{iθ}a` with `a` real; rotate an axis
/// orthogonal to `a` onto +z so that the third component of `v` vanishes.
fn align_real_companion(v: &CVec3) -> SideRotation {
    let identity = SideRotation {
        unitary: CMat2::identity(),
        rotated: *v,
        path: RotationPath::Identity,
    };
    let v_sq = v.square();
    if v[2].norm() <= ZERO_VECTOR_TOL || v_sq.norm() <= ZERO_VECTOR_TOL * ZERO_VECTOR_TOL {
        return identity;
    }
    let phase = Complex64::from_polar(1.0, -0.5 * v_sq.arg());
    let a = v.scale(phase).0.map(|c| c.re);
    let norm = cxmat::real_norm(&a);
    let a = a.map(|c| c / norm);
    let k = (0..3)
        .min_by(|&i, &j| a[i].abs().total_cmp(&a[j].abs()))
        .unwrap_or(0);
    let mut e = [0.0; 3];
    e[k] = 1.0;
    let mut perp = [
        a[1] * e[2] - a[2] * e[1],
        a[2] * e[0] - a[0] * e[2],
        a[0] * e[1] - a[1] * e[0],
    ];
    let pn = cxmat::real_norm(&perp);
    perp = perp.map(|c| c / pn);
    if perp[2] < 0.0 {
        perp = perp.map(|c| -c);
    }
    let Ok(u) = rotation_to_z(&perp) else {
        return identity;
    };
    let mut rotated = pauli::components(&(u.adjoint() * v.dot_sigma() * u));
    rotated.0[2] = ZERO;
    SideRotation {
        unitary: u,
        rotated,
        path: RotationPath::Perpendicular,
    }
}

/// `ρ′ = (U⊗V)† ρ (U⊗V)` and the parameters of its X shape.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CanonicalForm {
    pub rho: CMat4,
    pub rho_prime: DensityMatrix,
    pub alpha: [f64; 3],
    pub beta: [f64; 3],
    pub xi: [f64; 2],
    pub zeta: [f64; 2],
    pub w_prime: CVec3,
    pub z_prime: CVec3,
    pub u: CMat2,
    pub v: CMat2,
    pub u_path: RotationPath,
    pub v_path: RotationPath,
    pub r: f64,
    pub s: f64,
    pub eta: f64,
}

/// Positions that vanish in an X-shaped 4x4 matrix.
pub const X_SHAPE_ZEROS: [(usize, usize); 8] = [
    (0, 1),
    (0, 2),
    (1, 0),
    (1, 3),
    (2, 0),
    (2, 3),
    (3, 1),
    (3, 2),
];

/// Largest modulus among the eight entries an X-shaped matrix must not have.
pub fn x_shape_residual(m: &CMat4) -> f64 {
    X_SHAPE_ZEROS
        .iter()
        .map(|&(i, j)| m.0[i][j].norm())
        .fold(0.0, f64::max)
}

/// `ρ′` assembled from `α`, `β`: `¼(𝟙 + Λ′)` with the X-shaped `Λ′`.
pub fn x_state_from(alpha: &[f64; 3], beta: &[f64; 3]) -> CMat4 {
    let c = Complex64::new;
    let lam = CMat4::from_rows([
        [c(alpha[2], 0.0), ZERO, ZERO, c(alpha[0], -alpha[1])],
        [ZERO, c(beta[2], 0.0), c(beta[0], -beta[1]), ZERO],
        [ZERO, c(beta[0], beta[1]), c(-beta[2], 0.0), ZERO],
        [c(alpha[0], alpha[1]), ZERO, ZERO, c(-alpha[2], 0.0)],
    ]);
    (CMat4::identity() + lam).scale_re(0.25)
}

impl CanonicalForm {
    pub fn x_shape_residual(&self) -> f64 {
        x_shape_residual(self.rho_prime.matrix())
    }

    /// `‖ρ′ − X(α, β)‖_max`.
    pub fn assembly_residual(&self) -> f64 {
        self.rho_prime
            .matrix()
            .max_abs_diff(&x_state_from(&self.alpha, &self.beta))
    }

    /// Residuals of the four quadratic identities expressing `α₁²+α₂²`,
    /// `β₁²+β₂²`, `1−α₃²`, `1−β₃²` through `w′`, `z′`, `r`, `s`.
    pub fn quadratic_identity_residuals(&self) -> [f64; 4] {
        let (w, z) = (&self.w_prime, &self.z_prime);
        let (w2, z2) = (w.square(), z.square());
        let base = 2.0 * w.norm_sqr() * z.norm_sqr();
        let mixed = (w2 * z2.conj() + w2.conj() * z2).re;
        let pure = w2.norm_sqr() + z2.norm_sqr();
        let rs2 = 2.0 * self.r * self.s;
        let (a, b) = (&self.alpha, &self.beta);
        [
            (a[0] * a[0] + a[1] * a[1] - (base + mixed - rs2)).abs(),
            (b[0] * b[0] + b[1] * b[1] - (base + mixed + rs2)).abs(),
            (1.0 - a[2] * a[2] - (base + pure - rs2)).abs(),
            (1.0 - b[2] * b[2] - (base + pure + rs2)).abs(),
        ]
    }

    /// Residuals of `α₁²+α₂² = 1−α₃²−η²` and `β₁²+β₂² = 1−β₃²−η²`.
    pub fn eta_identity_residuals(&self) -> [f64; 2] {
        let e2 = self.eta * self.eta;
        let (a, b) = (&self.alpha, &self.beta);
        [
            (a[0] * a[0] + a[1] * a[1] - (1.0 - a[2] * a[2] - e2)).abs(),
            (b[0] * b[0] + b[1] * b[1] - (1.0 - b[2] * b[2] - e2)).abs(),
        ]
    }
}

pub fn canonicalize(p: &FamilyParams) -> Result<CanonicalForm> {
    let (w, z) = (p.w(), p.z());
    let x = spin_vector(w);
    let y = spin_vector(z);
    let r = cxmat::real_norm(&x);
    let s = cxmat::real_norm(&y);
    let left = align_side(&x, w)?;
    let right = align_side(&y, z)?;
    let rho = rho_from_params(p);
    let uv = kron(&left.unitary, &right.unitary);
    let rho_prime = (uv.adjoint() * *rho.matrix() * uv).hermitian_part();

    let (wp, zp) = (&left.rotated, &right.rotated);
    let pair = |a: CScalar, b: CScalar| (a * b.conj() + a.conj() * b).re;
    let xi = [pair(wp[0], zp[0]), pair(wp[1], zp[1])];
    let zeta = [pair(wp[1], zp[0]), pair(wp[0], zp[1])];
    let alpha = [xi[0] - xi[1], zeta[0] + zeta[1], r + s];
    let beta = [xi[0] + xi[1], zeta[0] - zeta[1], r - s];

    Ok(CanonicalForm {
        rho: *rho.matrix(),
        rho_prime: DensityMatrix::from_trusted(rho_prime),
        alpha,
        beta,
        xi,
        zeta,
        w_prime: *wp,
        z_prime: *zp,
        u: left.unitary,
        v: right.unitary,
        u_path: left.path,
        v_path: right.path,
        r,
        s,
        eta: (w.square() - z.square()).norm(),
    })
}

/// Canonical form of `ρ₂₄` under `V†⊗V†` with `V` the z-side rotation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rho24Canonical {
    /// `κ₀ = ‖z′‖²`, `−κ₁ = |z′₁|²−|z′₂|²`, `−κ₂ = 2Re(z′₁z̄′₂)`, `−κ₃ = 2Im(z′₁z̄′₂)`.
    pub kappa: [f64; 4],
    pub wnorm2: f64,
    pub v: CMat2,
    pub z_prime: CVec3,
}

impl Rho24Canonical {
    pub fn matrix(&self) -> CMat4 {
        let [k0, k1, k2, k3] = self.kappa;
        let c = Complex64::new;
        let w = self.wnorm2;
        CMat4::from_rows([
            [c(k0 + k3, 0.0), ZERO, ZERO, c(k1, -k2)],
            [ZERO, c(w, 0.0), c(-w, 0.0), ZERO],
            [ZERO, c(-w, 0.0), c(w, 0.0), ZERO],
            [c(k1, k2), ZERO, ZERO, c(k0 - k3, 0.0)],
        ])
        .scale_re(0.5)
    }

    /// `|κ₀² − κ₁² − κ₂² − κ₃²|`.
    pub fn light_cone_residual(&self) -> f64 {
        let [k0, k1, k2, k3] = self.kappa;
        (k0 * k0 - k1 * k1 - k2 * k2 - k3 * k3).abs()
    }

    /// `(V†⊗V†) ρ (V⊗V)` for an arbitrary 4x4 `ρ`.
    pub fn transform(&self, rho: &CMat4) -> CMat4 {
        let vv = kron(&self.v, &self.v);
        vv.adjoint() * *rho * vv
    }
}

pub fn rho24_canonical(p: &FamilyParams) -> Result<Rho24Canonical> {
    let z = p.z();
    let side = align_side(&spin_vector(z), z)?;
    let zp = side.rotated;
    let cross = zp[0] * zp[1].conj();
    Ok(Rho24Canonical {
        kappa: [
            zp.norm_sqr(),
            -(zp[0].norm_sqr() - zp[1].norm_sqr()),
            -2.0 * cross.re,
            -2.0 * cross.im,
        ],
        wnorm2: p.w().norm_sqr(),
        v: side.unitary,
        z_prime: zp,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{amplitudes, random_state, TestVector};

    fn unitary_defect(u: &CMat2) -> f64 {
        (u.adjoint() * *u).max_abs_diff(&CMat2::identity())
    }

    #[test]
    fn rho_of_e1_is_maximally_mixed() {
        let rho = rho_from_params(&TestVector::E1.params());
        assert!(rho.matrix().max_abs_diff(&CMat4::identity().scale_re(0.25)) < 1e-16);
    }

    #[test]
    fn rho_of_e3_spectrum() {
        let rho = rho_from_params(&TestVector::E3.params());
        let sp = rho.spectrum().unwrap();
        let expected = [0.0, 0.0, 0.5, 0.5];
        for k in 0..4 {
            assert!((sp[k] - expected[k]).abs() < 1e-14, "{sp:?}");
        }
        let e5 = rho_from_params(&TestVector::E5.params()).spectrum().unwrap();
        let expected = [0.01, 0.01, 0.49, 0.49];
        for k in 0..4 {
            assert!((e5[k] - expected[k]).abs() < 1e-14, "{e5:?}");
        }
    }

    #[test]
    fn closed_form_matches_partial_trace() {
        for seed in 0..300 {
            let p = random_state(seed);
            let a = amplitudes(&p);
            let oracle = reduce_pair(&a, 1, 2).unwrap();
            let closed = rho_from_params(&p);
            assert!(oracle.matrix().max_abs_diff(closed.matrix()) < 1e-12);
            let r34 = reduce_pair(&a, 3, 4).unwrap();
            assert!(oracle.matrix().max_abs_diff(r34.matrix()) < 1e-12);
            assert!(DensityMatrix::new(*closed.matrix()).is_ok());
        }
    }

    #[test]
    fn other_pairs_are_sign_and_role_changes() {
        for seed in 0..300 {
            let p = random_state(seed);
            let a = amplitudes(&p);
            let (w, z) = (*p.w(), *p.z());
            let r14 = reduce_pair(&a, 1, 4).unwrap();
            let flipped = crate::state::make_params(-w, z, false).unwrap();
            assert!(r14.matrix().max_abs_diff(rho_from_params(&flipped).matrix()) < 1e-12);
            // "exchange w and z" holds up to the sign of the new w
            let r23 = reduce_pair(&a, 2, 3).unwrap();
            let swapped = crate::state::make_params(-z, w, false).unwrap();
            assert!(r23.matrix().max_abs_diff(rho_from_params(&swapped).matrix()) < 1e-12);
            let plain = crate::state::make_params(z, w, false).unwrap();
            assert!(r23.matrix().max_abs_diff(rho_from_params(&plain).matrix()) > 1e-6);
            for (q, partner) in [(1, 3), (2, 4)] {
                let a_q = reduce_qubit(&a, q).unwrap();
                let b_q = reduce_qubit(&a, partner).unwrap();
                assert!(a_q.matrix().max_abs_diff(b_q.matrix()) < 1e-12);
            }
        }
    }

    #[test]
    fn lambda_squares_to_scalar() {
        for seed in 0..300 {
            let p = random_state(seed);
            let lam = lambda_matrix(&p);
            let eta2 = (p.w().square() - p.z().square()).norm_sqr();
            assert!((lam * lam).max_abs_diff(&CMat4::identity().scale_re(1.0 - eta2)) < 1e-12);
        }
    }

    #[test]
    fn single_qubit_reduction_of_e3() {
        let a = amplitudes(&TestVector::E3.params());
        let r1 = reduce_qubit(&a, 1).unwrap();
        let expected = (CMat2::identity() + CVec3::from_real([0.0, 0.0, 0.5]).dot_sigma()).scale_re(0.5);
        assert!(r1.matrix().max_abs_diff(&expected) < 1e-15);
        assert_eq!(r1.bloch(), [0.0, 0.0, 0.5]);
    }

    #[test]
    fn rho24_of_e1_spectrum() {
        let a = amplitudes(&TestVector::E1.params());
        let sp = reduce_pair(&a, 2, 4).unwrap().spectrum().unwrap();
        let expected = [0.0, 0.0, 0.0, 1.0];
        for k in 0..4 {
            assert!((sp[k] - expected[k]).abs() < 1e-14);
        }
    }

    #[test]
    fn bad_subsets() {
        let a = amplitudes(&TestVector::E1.params());
        for keep in [&[][..], &[1, 2, 3], &[0], &[5], &[2, 2]] {
            assert!(matches!(partial_trace(&a, keep), Err(Error::BadSubset(_))), "{keep:?}");
        }
        // unsorted labels are fine
        let a24 = reduce_pair(&a, 4, 2).unwrap();
        let b24 = reduce_pair(&a, 2, 4).unwrap();
        assert_eq!(a24, b24);
    }

    #[test]
    fn rotation_examples() {
        assert_eq!(rotation_to_z(&[0.0, 0.0, 0.5]).unwrap(), CMat2::identity());

        let u = rotation_to_z(&[0.5, 0.0, 0.0]).unwrap();
        let lhs = u.adjoint() * pauli::sigma1().scale_re(0.5) * u;
        assert!(lhs.max_abs_diff(&pauli::sigma3().scale_re(0.5)) < 1e-15);
        assert!(unitary_defect(&u) < 1e-15);

        assert_eq!(rotation_to_z(&[0.0, 0.0, 0.0]), Err(Error::ZeroVector));
        assert_eq!(rotation_to_z(&[0.0, 0.0, -0.3]), Err(Error::AntipodalDegenerate));

        let x = [0.0, 0.0, -0.3];
        let side = align_side(&x, &CVec3::ZERO).unwrap();
        assert_eq!(side.path, RotationPath::Antipodal);
        let u = side.unitary;
        let lhs = u.adjoint() * CVec3::from_real(x).dot_sigma() * u;
        assert!(lhs.max_abs_diff(&pauli::sigma3().scale_re(0.3)) < 1e-15);
        assert!(unitary_defect(&u) < 1e-15);
    }

    #[test]
    fn rotation_near_antipode_stays_unitary() {
        for eps in [1e-3, 1e-6, 1e-9, 1e-11] {
            let x = [eps, -0.5 * eps, -0.7];
            let side = align_side(&x, &CVec3::ZERO).unwrap();
            // at eps = 1e-11 the norm rounds to |x₃| and the fallback takes over
            assert!(matches!(side.path, RotationPath::Direct | RotationPath::Antipodal));
            let u = side.unitary;
            let r = cxmat::real_norm(&x);
            let lhs = u.adjoint() * CVec3::from_real(x).dot_sigma() * u;
            assert!(lhs.max_abs_diff(&pauli::sigma3().scale_re(r)) < 1e-13, "eps {eps}");
            assert!(unitary_defect(&u) < 1e-14);
        }
    }

    #[test]
    fn companion_rotation_matches_conjugation() {
        for seed in 0..200 {
            let p = random_state(seed);
            for v in [p.w(), p.z()] {
                let side = align_side(&spin_vector(v), v).unwrap();
                let u = side.unitary;
                let direct = pauli::components(&(u.adjoint() * v.dot_sigma() * u));
                assert!((direct - side.rotated).norm_sqr().sqrt() < 1e-12);
                assert!(direct[2].norm() < 1e-12);
            }
        }
    }

    #[test]
    fn canonical_e3_is_already_aligned() {
        let cf = canonicalize(&TestVector::E3.params()).unwrap();
        assert_eq!(cf.u, CMat2::identity());
        assert_eq!(cf.v, CMat2::identity());
        let (w, _) = TestVector::E3.vectors();
        assert_eq!(cf.w_prime, w);
        assert_eq!(cf.z_prime, w);
        // ¼(𝟙 + Λ′) with α = (0, 0, 1), β = (1, 0, 0)
        let c = |x: f64| Complex64::new(x, 0.0);
        let expected = CMat4::from_rows([
            [c(2.0), ZERO, ZERO, ZERO],
            [ZERO, c(1.0), c(1.0), ZERO],
            [ZERO, c(1.0), c(1.0), ZERO],
            [ZERO, ZERO, ZERO, ZERO],
        ])
        .scale_re(0.25);
        assert!(cf.rho_prime.matrix().max_abs_diff(&expected) < 1e-15);
        assert_eq!(cf.alpha, [0.0, 0.0, 1.0]);
        assert_eq!(cf.beta, [1.0, 0.0, 0.0]);
    }

    #[test]
    fn canonical_e5() {
        let cf = canonicalize(&TestVector::E5.params()).unwrap();
        assert_eq!(cf.u_path, RotationPath::Identity);
        assert_eq!(cf.v_path, RotationPath::Identity);
        assert_eq!(cf.alpha, [0.0, 0.96, 0.0]);
        assert_eq!(cf.beta, [0.0, -0.96, 0.0]);
        assert!(cf.x_shape_residual() < 1e-15);
        assert!(cf.assembly_residual() < 1e-15);
    }

    #[test]
    fn canonical_random_states() {
        for seed in 0..500 {
            let cf = canonicalize(&random_state(seed)).unwrap();
            assert!(cf.x_shape_residual() < 1e-12);
            assert!(cf.assembly_residual() < 1e-12);
            for res in cf.quadratic_identity_residuals() {
                assert!(res < 1e-11);
            }
            for res in cf.eta_identity_residuals() {
                assert!(res < 1e-11);
            }
            assert!(unitary_defect(&cf.u) < 1e-13 && unitary_defect(&cf.v) < 1e-13);
        }
    }

    #[test]
    fn canonical_with_real_companion_needs_perpendicular_rotation() {
        // w real with nonzero third component: x = 0 but w₃ ≠ 0
        let w = CVec3::from_real([0.3, 0.2, 0.5]);
        let z = CVec3::new(Complex64::new(0.1, 0.4), Complex64::new(0.0, -0.3), Complex64::new(0.2, 0.1));
        let p = crate::state::make_params(w, z, true).unwrap();
        let cf = canonicalize(&p).unwrap();
        assert_eq!(cf.u_path, RotationPath::Perpendicular);
        assert!(cf.w_prime[2].norm() < 1e-12);
        assert!(cf.x_shape_residual() < 1e-12);
        assert!(cf.assembly_residual() < 1e-12);
    }

    #[test]
    fn rho24_canonical_examples() {
        for t in [TestVector::E1, TestVector::E4] {
            let p = t.params();
            let c24 = rho24_canonical(&p).unwrap();
            let oracle = reduce_pair(&amplitudes(&p), 2, 4).unwrap();
            assert!(c24.transform(oracle.matrix()).max_abs_diff(&c24.matrix()) < 1e-12, "{t:?}");
            let sp = cxmat::herm_eig(&c24.matrix()).unwrap().eigenvalues;
            let mut expected = [0.0, 0.0, p.w().norm_sqr(), p.z().norm_sqr()];
            expected.sort_by(f64::total_cmp);
            for k in 0..4 {
                assert!((sp[k] - expected[k]).abs() < 1e-12, "{t:?} {sp:?}");
            }
        }
        assert_eq!(rho24_canonical(&TestVector::E1.params()).unwrap().kappa[0], 0.0);
        let e4 = rho24_canonical(&TestVector::E4.params()).unwrap();
        assert!(e4.light_cone_residual() < 1e-15);
    }
}
