//! Bures metric on the family: the `dk²/(1−k²)` form, the trace form and the
//! textbook eigenbasis form as a diagnostic.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::cxmat::{self, CMat4, CScalar, CVec3};
use crate::density::{lambda_from_components, lambda_matrix, rho_from_params};
use crate::error::{Error, Result};
use crate::state::{spin_vector, FamilyParams};

/// Below this `η` the density matrix counts as singular.
pub const ETA_SINGULAR: f64 = 1e-6;
/// Eigenbasis-based diagnostics need a better-conditioned spectrum.
pub const ETA_DIAGNOSTIC: f64 = 0.05;
/// Normalization-preservation tolerance for tangents.
pub const TANGENT_TOL: f64 = 1e-12;
/// Bound on `|Tr(dΛ Λ dΛ)|`.
pub const VANISHING_TRACE_TOL: f64 = 1e-10;
/// Tolerance of the `η² = 1 − k²` identity.
pub const K_IDENTITY_TOL: f64 = 1e-11;
/// Central-difference step.
pub const FD_STEP: f64 = 1e-6;

/// Tangent `(dw, dz)` at a state, preserving `‖w‖² + ‖z‖²` to first order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentParams {
    dw: CVec3,
    dz: CVec3,
}

/// `Re(w̄·dw + z̄·dz)`, the first-order change of the norm (halved).
fn norm_drift(p: &FamilyParams, dw: &CVec3, dz: &CVec3) -> f64 {
    (p.w().conj().dot(dw) + p.z().conj().dot(dz)).re
}

impl TangentParams {
    /// Validates the tangent at `p`; tangents are never silently projected.
    pub fn new(p: &FamilyParams, dw: CVec3, dz: CVec3) -> Result<Self> {
        if !(dw.0.iter().chain(dz.0.iter())).all(|c| c.is_finite()) {
            return Err(Error::NonFinite("tangent"));
        }
        let drift = norm_drift(p, &dw, &dz);
        if drift.abs() > TANGENT_TOL {
            return Err(Error::InvalidTangent(drift));
        }
        Ok(TangentParams { dw, dz })
    }

    pub fn zero() -> Self {
        TangentParams {
            dw: CVec3::ZERO,
            dz: CVec3::ZERO,
        }
    }

    /// The global-phase direction `i(w, z)`.
    pub fn phase_direction(p: &FamilyParams) -> Self {
        let i = CScalar::new(0.0, 1.0);
        TangentParams {
            dw: p.w().scale(i),
            dz: p.z().scale(i),
        }
    }

    pub fn dw(&self) -> &CVec3 {
        &self.dw
    }

    pub fn dz(&self) -> &CVec3 {
        &self.dz
    }

    pub fn scale(&self, c: f64) -> Self {
        TangentParams {
            dw: self.dw.scale_re(c),
            dz: self.dz.scale_re(c),
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.dw.norm_sqr() + self.dz.norm_sqr()
    }
}

/// Random unit tangent at `p`: Gaussian direction with the norm-changing
/// component removed.
pub fn random_tangent<R: Rng + ?Sized>(p: &FamilyParams, rng: &mut R) -> TangentParams {
    let mut draw = || {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        CScalar::new(re, im)
    };
    let mut dw = CVec3::new(draw(), draw(), draw());
    let mut dz = CVec3::new(draw(), draw(), draw());
    let drift = norm_drift(p, &dw, &dz);
    dw = dw - p.w().scale_re(drift);
    dz = dz - p.z().scale_re(drift);
    let n = (dw.norm_sqr() + dz.norm_sqr()).sqrt();
    TangentParams {
        dw: dw.scale_re(1.0 / n),
        dz: dz.scale_re(1.0 / n),
    }
}

/// `k = (x, y, f)` with `fᵢⱼ = wᵢz̄ⱼ + w̄ᵢzⱼ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KVector {
    pub x: [f64; 3],
    pub y: [f64; 3],
    pub f: [[f64; 3]; 3],
}

impl KVector {
    /// Components in the order `x₁..x₃, y₁..y₃, f₁₁, f₁₂, …, f₃₃`.
    pub fn to_array(&self) -> [f64; 15] {
        let mut out = [0.0; 15];
        out[..3].copy_from_slice(&self.x);
        out[3..6].copy_from_slice(&self.y);
        for i in 0..3 {
            out[6 + 3 * i..9 + 3 * i].copy_from_slice(&self.f[i]);
        }
        out
    }

    pub fn from_array(a: &[f64; 15]) -> Self {
        let mut f = [[0.0; 3]; 3];
        for i in 0..3 {
            f[i].copy_from_slice(&a[6 + 3 * i..9 + 3 * i]);
        }
        KVector {
            x: [a[0], a[1], a[2]],
            y: [a[3], a[4], a[5]],
            f,
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.to_array().iter().map(|v| v * v).sum()
    }

    /// `Λ` assembled from the components.
    pub fn lambda(&self) -> CMat4 {
        lambda_from_components(&self.x, &self.y, &self.f)
    }
}

/// `k` for arbitrary (not necessarily normalized) `w`, `z`.
pub fn k_components(w: &CVec3, z: &CVec3) -> KVector {
    let mut f = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            f[i][j] = 2.0 * (w[i] * z[j].conj()).re;
        }
    }
    KVector {
        x: spin_vector(w),
        y: spin_vector(z),
        f,
    }
}

fn eta(p: &FamilyParams) -> f64 {
    (p.w().square() - p.z().square()).norm()
}

/// `|η² − (1 − k²)|`.
pub fn k_identity_residual(p: &FamilyParams) -> f64 {
    let e = eta(p);
    (e * e - (1.0 - k_components(p.w(), p.z()).norm_sqr())).abs()
}

/// `k` at a normalized state, with `η² = 1 − k²` enforced.
pub fn k_vector(p: &FamilyParams) -> Result<KVector> {
    let residual = k_identity_residual(p);
    if residual > K_IDENTITY_TOL {
        return Err(Error::IdentityViolation {
            identity: "eta^2 = 1 - k^2",
            residual,
        });
    }
    Ok(k_components(p.w(), p.z()))
}

/// Analytic differential of `k` along `t`.
pub fn dk(p: &FamilyParams, t: &TangentParams) -> [f64; 15] {
    let (w, z) = (p.w(), p.z());
    let i = CScalar::new(0.0, 1.0);
    let spin_d = |a: &CVec3, da: &CVec3| -> [f64; 3] {
        let v = (da.cross(&a.conj()) + a.cross(&da.conj())).scale(i);
        v.0.map(|c| c.re)
    };
    let dx = spin_d(w, &t.dw);
    let dy = spin_d(z, &t.dz);
    let mut out = [0.0; 15];
    out[..3].copy_from_slice(&dx);
    out[3..6].copy_from_slice(&dy);
    for a in 0..3 {
        for b in 0..3 {
            out[6 + 3 * a + b] = 2.0 * (t.dw[a] * z[b].conj() + w[a] * t.dz[b].conj()).re;
        }
    }
    out
}

/// Central difference of `k` along `t` with step `h`.
pub fn dk_finite_difference(p: &FamilyParams, t: &TangentParams, h: f64) -> [f64; 15] {
    let plus = k_components(&(*p.w() + t.dw.scale_re(h)), &(*p.z() + t.dz.scale_re(h))).to_array();
    let minus = k_components(&(*p.w() - t.dw.scale_re(h)), &(*p.z() - t.dz.scale_re(h))).to_array();
    std::array::from_fn(|k| (plus[k] - minus[k]) / (2.0 * h))
}

/// Central difference of `ρ` along `t` with step `h`.
pub fn drho_finite_difference(p: &FamilyParams, t: &TangentParams, h: f64) -> CMat4 {
    let shifted = |s: f64| {
        let q = FamilyParams::new_unchecked(*p.w() + t.dw.scale_re(s), *p.z() + t.dz.scale_re(s));
        *rho_from_params(&q).matrix()
    };
    (shifted(h) - shifted(-h)).scale_re(1.0 / (2.0 * h))
}

/// `dΛ` assembled from `dk`.
pub fn d_lambda(p: &FamilyParams, t: &TangentParams) -> CMat4 {
    KVector::from_array(&dk(p, t)).lambda()
}

fn require_regular(p: &FamilyParams, min: f64) -> Result<f64> {
    let e = eta(p);
    if e < min || e.is_nan() {
        return Err(Error::SingularState { eta: e, min });
    }
    Ok(e)
}

/// `ds² = dk²/(1−k²)`.
///
/// The denominator is evaluated as `η² = |w²−z²|²`, which equals `1−k²` but
/// avoids the cancellation in `1−k²` near the singular boundary.
pub fn bures_closed(p: &FamilyParams, t: &TangentParams) -> Result<f64> {
    let e = require_regular(p, ETA_SINGULAR)?;
    let dk2: f64 = dk(p, t).iter().map(|v| v * v).sum();
    Ok(dk2 / (e * e))
}

/// Pieces of the trace-form evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceForm {
    /// `Tr(dΛdΛ)/(4η²)`.
    pub ds2: f64,
    /// `Tr(dΛ Λ dΛ)`, zero analytically.
    pub vanishing_trace: f64,
    /// `‖ρ·(4/η²)(𝟙−Λ) − 𝟙‖_max`.
    pub inverse_residual: f64,
}

pub fn bures_trace_form(p: &FamilyParams, t: &TangentParams) -> Result<TraceForm> {
    let e = require_regular(p, ETA_SINGULAR)?;
    let lam = lambda_matrix(p);
    let rho = rho_from_params(p);
    let inv = (CMat4::identity() - lam).scale_re(4.0 / (e * e));
    let inverse_residual = (*rho.matrix() * inv).max_abs_diff(&CMat4::identity());
    let dl = d_lambda(p, t);
    let vanishing_trace = (dl * lam * dl).trace().re;
    let ds2 = (dl * dl).trace().re / (4.0 * e * e);
    Ok(TraceForm {
        ds2,
        vanishing_trace,
        inverse_residual,
    })
}

/// `Tr(dΛdΛ)/(4η²)`, rejecting states where `Tr(dΛ Λ dΛ)` fails to vanish.
pub fn bures_trace_oracle(p: &FamilyParams, t: &TangentParams) -> Result<f64> {
    let tf = bures_trace_form(p, t)?;
    if tf.vanishing_trace.abs() > VANISHING_TRACE_TOL {
        return Err(Error::VanishingTraceViolation {
            value: tf.vanishing_trace,
        });
    }
    Ok(tf.ds2)
}

/// Textbook form `½ Σᵢⱼ |⟨i|dρ|j⟩|²/(λᵢ+λⱼ)` and its ratio to
/// [`bures_closed`]. The ratio is informational; a zero tangent reports 1.
pub fn bures_uhlmann_diagnostic(p: &FamilyParams, t: &TangentParams) -> Result<(f64, f64)> {
    require_regular(p, ETA_DIAGNOSTIC)?;
    let rho = rho_from_params(p);
    let eig = cxmat::herm_eig(rho.matrix())?;
    let u = CMat4::from_rows(eig.eigenvectors.0);
    let drho = d_lambda(p, t).scale_re(0.25);
    let in_basis = u.adjoint() * drho * u;
    let mut ds2 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            let denom = eig.eigenvalues[i] + eig.eigenvalues[j];
            if denom > 0.0 {
                ds2 += 0.5 * in_basis.0[i][j].norm_sqr() / denom;
            }
        }
    }
    let closed = bures_closed(p, t)?;
    let ratio = if closed > 0.0 { ds2 / closed } else { 1.0 };
    Ok((ds2, ratio))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{random_state, rng_for, TestVector};

    fn c(re: f64, im: f64) -> CScalar {
        CScalar::new(re, im)
    }

    /// Unit tangent at E5 moving weight from w₁ to z₂.
    fn e5_tangent() -> (FamilyParams, TangentParams) {
        let p = TestVector::E5.params();
        // w = (0.6, 0, 0), z = (0, 0.8, 0)
        let dw = CVec3::new(c(0.8, 0.0), c(0.0, 0.3), ZERO);
        let dz = CVec3::new(c(0.1, 0.0), c(-0.6, 0.0), c(0.0, 0.2));
        let t = TangentParams::new(&p, dw, dz).unwrap();
        (p, t)
    }

    use crate::cxmat::ZERO;

    #[test]
    fn k_vector_examples() {
        let k1 = k_vector(&TestVector::E1.params()).unwrap();
        assert_eq!(k1.to_array(), [0.0; 15]);

        let k5 = k_vector(&TestVector::E5.params()).unwrap().to_array();
        for (idx, v) in k5.iter().enumerate() {
            let expected = if idx == 7 { 0.96 } else { 0.0 };
            assert!((v - expected).abs() < 1e-15, "{idx}: {v}");
        }
        let k3 = k_vector(&TestVector::E3.params()).unwrap();
        assert!((k3.norm_sqr() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn k_identity_random() {
        for seed in 0..1000 {
            assert!(k_identity_residual(&random_state(seed)) < 1e-11);
        }
    }

    #[test]
    fn lambda_from_k_matches_lambda() {
        for seed in 0..50 {
            let p = random_state(seed);
            let k = k_vector(&p).unwrap();
            assert!(k.lambda().max_abs_diff(&lambda_matrix(&p)) < 1e-14);
            assert_eq!(KVector::from_array(&k.to_array()), k);
        }
    }

    #[test]
    fn tangent_validation() {
        let p = TestVector::E5.params();
        let bad = TangentParams::new(&p, p.w().scale_re(1.0), CVec3::ZERO);
        assert!(matches!(bad, Err(Error::InvalidTangent(_))));
        let nan = CVec3::new(c(f64::NAN, 0.0), ZERO, ZERO);
        assert!(matches!(TangentParams::new(&p, nan, CVec3::ZERO), Err(Error::NonFinite(_))));
    }

    #[test]
    fn dk_examples() {
        let p = random_state(3);
        assert_eq!(dk(&p, &TangentParams::zero()), [0.0; 15]);
        let phase = dk(&p, &TangentParams::phase_direction(&p));
        assert!(phase.iter().all(|v| v.abs() < 1e-15), "{phase:?}");

        let (p, t) = e5_tangent();
        let a = dk(&p, &t);
        let fd = dk_finite_difference(&p, &t, FD_STEP);
        for k in 0..15 {
            assert!((a[k] - fd[k]).abs() < 1e-8);
        }
    }

    #[test]
    fn dk_matches_finite_differences_random() {
        let mut rng = rng_for(11, 0);
        for seed in 0..300 {
            let p = random_state(seed);
            let t = random_tangent(&p, &mut rng);
            assert!(norm_drift(&p, &t.dw, &t.dz).abs() < 1e-14);
            let a = dk(&p, &t);
            let fd = dk_finite_difference(&p, &t, FD_STEP);
            for k in 0..15 {
                assert!((a[k] - fd[k]).abs() < 1e-8);
            }
            let drho = drho_finite_difference(&p, &t, FD_STEP);
            assert!(drho.max_abs_diff(&d_lambda(&p, &t).scale_re(0.25)) < 1e-8);
        }
    }

    #[test]
    fn closed_examples() {
        let (p, t) = e5_tangent();
        assert_eq!(bures_closed(&p, &TangentParams::zero()).unwrap(), 0.0);
        assert_eq!(bures_trace_oracle(&p, &TangentParams::zero()).unwrap(), 0.0);
        let closed = bures_closed(&p, &t).unwrap();
        let trace = bures_trace_oracle(&p, &t).unwrap();
        assert!(closed > 0.0);
        assert!((closed - trace).abs() < 1e-10);
        assert!(matches!(
            bures_closed(&TestVector::E3.params(), &TangentParams::zero()),
            Err(Error::SingularState { .. })
        ));
    }

    #[test]
    fn closed_matches_trace_random() {
        let mut rng = rng_for(5, 0);
        let mut checked = 0;
        for seed in 0..2000 {
            let p = random_state(seed);
            if eta(&p) < ETA_DIAGNOSTIC {
                continue;
            }
            checked += 1;
            let t = random_tangent(&p, &mut rng);
            let tf = bures_trace_form(&p, &t).unwrap();
            assert!(tf.inverse_residual < 1e-10);
            assert!(tf.vanishing_trace.abs() < 1e-10);
            let closed = bures_closed(&p, &t).unwrap();
            assert!((closed - tf.ds2).abs() < 1e-10, "{closed} vs {}", tf.ds2);
            let doubled = bures_closed(&p, &t.scale(2.0)).unwrap();
            assert!((doubled - 4.0 * closed).abs() < 1e-12 * closed.max(1.0));
        }
        assert!(checked > 1000);
    }

    /// Bures distance `2(1 − √F)` between `ρ` and `ρ + h·dρ`, from the fidelity.
    fn bures_distance_sq(a: &CMat4, b: &CMat4) -> f64 {
        let sa = cxmat::psd_sqrt(a).unwrap();
        let inner = (sa * *b * sa).hermitian_part();
        let root_fidelity = cxmat::psd_sqrt(&inner).unwrap().trace().re;
        2.0 * (1.0 - root_fidelity)
    }

    #[test]
    fn uhlmann_diagnostic_matches_fidelity() {
        let mut rng = rng_for(8, 0);
        for seed in 0..40 {
            let p = random_state(seed);
            if eta(&p) < 0.2 {
                continue;
            }
            let t = random_tangent(&p, &mut rng);
            let (ds2, _) = bures_uhlmann_diagnostic(&p, &t).unwrap();
            let rho = *rho_from_params(&p).matrix();
            let h = 1e-4;
            let moved = rho + d_lambda(&p, &t).scale_re(0.25 * h);
            let d2 = bures_distance_sq(&rho, &moved) / (h * h);
            assert!((d2 - ds2).abs() < 1e-3 * ds2.max(1.0), "{d2} vs {ds2}");
        }
    }

    #[test]
    fn uhlmann_diagnostic() {
        let (p, t) = e5_tangent();
        assert_eq!(bures_uhlmann_diagnostic(&p, &TangentParams::zero()).unwrap(), (0.0, 1.0));
        let (ds2, ratio) = bures_uhlmann_diagnostic(&p, &t).unwrap();
        assert!(ds2.is_finite() && ds2 > 0.0 && ratio.is_finite() && ratio > 0.0);
        let (ds2b, ratio_b) = bures_uhlmann_diagnostic(&p, &t.scale(2.0)).unwrap();
        assert!((ds2b - 4.0 * ds2).abs() < 1e-12 * ds2b);
        assert!((ratio_b - ratio).abs() < 1e-12);
    }
}
