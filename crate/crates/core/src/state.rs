//! The `(w, z)` parametrization of antisymmetric four-qubit states.
//!
//! A pair `w, z ∈ ℂ³` with `‖w‖² + ‖z‖² = 1` fixes the amplitudes
//! `Ψ_ijkl = ½(ε_ik A_jl + B_ik ε_jl)` with `A = ε(z·σ̄)`, `B = ε(w·σ̄)`,
//! which are antisymmetric under exchange of the pairs `(ij) ↔ (kl)`.
//! Every invariant of the reduced two-qubit state is a function of `w` and
//! `z` alone, so `FamilyParams` is the whole state space.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::cxmat::{self, CMat2, CMat4, CScalar, CVec3, I, ZERO};
use crate::error::{Error, Result};

/// Tolerance on `‖w‖² + ‖z‖² = 1`.
pub const NORM_TOL: f64 = 1e-12;
/// Tolerance for the H and L dual computations.
pub const DUAL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyParams {
    w: CVec3,
    z: CVec3,
}

impl FamilyParams {
    pub fn w(&self) -> &CVec3 {
        &self.w
    }

    pub fn z(&self) -> &CVec3 {
        &self.z
    }

    /// Skips validation; callers promise `‖w‖² + ‖z‖² = 1`.
    pub(crate) fn new_unchecked(w: CVec3, z: CVec3) -> Self {
        FamilyParams { w, z }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.w.norm_sqr() + self.z.norm_sqr()
    }

    /// Same state with both vectors multiplied by a global phase.
    pub fn with_phase(&self, phase: f64) -> Self {
        let p = Complex64::from_polar(1.0, phase);
        FamilyParams {
            w: self.w.scale(p),
            z: self.z.scale(p),
        }
    }
}

/// Validates (and optionally rescales) a `(w, z)` pair.
pub fn make_params(w: CVec3, z: CVec3, normalize: bool) -> Result<FamilyParams> {
    let w = CVec3::try_new(w.0)?;
    let z = CVec3::try_new(z.0)?;
    let n2 = w.norm_sqr() + z.norm_sqr();
    if normalize {
        if n2 == 0.0 {
            return Err(Error::ZeroState);
        }
        let k = 1.0 / n2.sqrt();
        return Ok(FamilyParams {
            w: w.scale_re(k),
            z: z.scale_re(k),
        });
    }
    if (n2 - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized { norm_sqr: n2 });
    }
    Ok(FamilyParams { w, z })
}

/// Fixed states used throughout the test suites and the documentation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestVector {
    /// `w = (1,0,0)`, `z = 0`: maximally mixed.
    E1,
    /// `w = (1,i,0)/√2`, `z = 0`: rank two, separable.
    E2,
    /// `w = z = ½(1,i,0)`: maximally entangled.
    E3,
    /// `w = √0.1(1,i,0)`, `z = √0.4(1,−i,0)`: entangled, monogamy saturated.
    E4,
    /// `w = (0.6,0,0)`, `z = (0,0.8,0)`: separable with `η = 0.28`.
    E5,
}

impl TestVector {
    pub const ALL: [TestVector; 5] = [
        TestVector::E1,
        TestVector::E2,
        TestVector::E3,
        TestVector::E4,
        TestVector::E5,
    ];

    pub fn vectors(self) -> (CVec3, CVec3) {
        let c = Complex64::new;
        match self {
            TestVector::E1 => (CVec3::from_real([1.0, 0.0, 0.0]), CVec3::ZERO),
            TestVector::E2 => {
                let h = std::f64::consts::FRAC_1_SQRT_2;
                (CVec3::new(c(h, 0.0), c(0.0, h), ZERO), CVec3::ZERO)
            }
            TestVector::E3 => {
                let v = CVec3::new(c(0.5, 0.0), c(0.0, 0.5), ZERO);
                (v, v)
            }
            TestVector::E4 => {
                let a = 0.1f64.sqrt();
                let b = 0.4f64.sqrt();
                (
                    CVec3::new(c(a, 0.0), c(0.0, a), ZERO),
                    CVec3::new(c(b, 0.0), c(0.0, -b), ZERO),
                )
            }
            TestVector::E5 => (
                CVec3::from_real([0.6, 0.0, 0.0]),
                CVec3::from_real([0.0, 0.8, 0.0]),
            ),
        }
    }

    pub fn params(self) -> FamilyParams {
        let (w, z) = self.vectors();
        make_params(w, z, false).expect("test vectors are normalized")
    }
}

/// The sixteen amplitudes `Ψ_ijkl`, stored at index `8i + 4j + 2k + l`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeVector(pub [CScalar; 16]);

impl AmplitudeVector {
    pub fn index(i: usize, j: usize, k: usize, l: usize) -> usize {
        8 * i + 4 * j + 2 * k + l
    }

    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> CScalar {
        self.0[Self::index(i, j, k, l)]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `Ψ` as a 4x4 matrix with rows `(ij)` and columns `(kl)`; antisymmetric.
    pub fn as_matrix(&self) -> CMat4 {
        let mut m = CMat4::zeros();
        for r in 0..4 {
            for c in 0..4 {
                m.0[r][c] = self.0[4 * r + c];
            }
        }
        m
    }

    /// Quadratic invariant `H` in the decimal labelling.
    pub fn h_invariant(&self) -> CScalar {
        let p = &self.0;
        p[0] * p[15] - p[1] * p[14] - p[2] * p[13] + p[3] * p[12] - p[4] * p[11]
            + p[5] * p[10]
            + p[6] * p[9]
            - p[7] * p[8]
    }

    /// Quartic invariant `L = det Ψ`.
    pub fn l_invariant(&self) -> CScalar {
        cxmat::det(&self.as_matrix())
    }

    /// Largest `|Ψ_ijkl + Ψ_klij|`.
    pub fn antisymmetry_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for a in 0..16 {
            let (ij, kl) = (a >> 2, a & 3);
            let b = (kl << 2) | ij;
            worst = worst.max((self.0[a] + self.0[b]).norm());
        }
        worst
    }
}

/// `ε(a·σ̄) = [[a₁ − ia₂, −a₃], [−a₃, −a₁ − ia₂]]`.
pub fn epsilon_sigma_bar(a: &CVec3) -> CMat2 {
    let [a1, a2, a3] = a.0;
    CMat2::from_rows([[a1 - I * a2, -a3], [-a3, -a1 - I * a2]])
}

pub fn amplitudes(p: &FamilyParams) -> AmplitudeVector {
    let a = epsilon_sigma_bar(&p.z);
    let b = epsilon_sigma_bar(&p.w);
    let eps = cxmat::pauli::epsilon();
    let mut psi = [ZERO; 16];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    psi[AmplitudeVector::index(i, j, k, l)] =
                        (eps.0[i][k] * a.0[j][l] + b.0[i][k] * eps.0[j][l]) * 0.5;
                }
            }
        }
    }
    AmplitudeVector(psi)
}

/// Scalar invariants of a state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InvariantSet {
    /// `x = i w×w̄`
    pub x: [f64; 3],
    /// `y = i z×z̄`
    pub y: [f64; 3],
    pub r: f64,
    pub s: f64,
    /// `|w² − z²|`
    pub eta: f64,
    /// `|w² + z²|`
    pub sigma: f64,
    pub gamma_plus: f64,
    pub gamma_minus: f64,
    #[serde(serialize_with = "ser_complex")]
    pub h: CScalar,
    #[serde(serialize_with = "ser_complex")]
    pub l: CScalar,
    pub w_norm2: f64,
    pub z_norm2: f64,
    #[serde(serialize_with = "ser_complex")]
    pub w_sq: CScalar,
    #[serde(serialize_with = "ser_complex")]
    pub z_sq: CScalar,
}

pub(crate) fn ser_complex<S: serde::Serializer>(z: &CScalar, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeTuple;
    let mut t = s.serialize_tuple(2)?;
    t.serialize_element(&z.re)?;
    t.serialize_element(&z.im)?;
    t.end()
}

/// `i a×ā`, which is real for every `a`.
pub fn spin_vector(a: &CVec3) -> [f64; 3] {
    let c = a.cross(&a.conj()).scale(I);
    debug_assert!(c.0.iter().all(|v| v.im.abs() <= 1e-13));
    c.0.map(|v| v.re)
}

pub fn invariants(p: &FamilyParams) -> Result<InvariantSet> {
    let (w, z) = (&p.w, &p.z);
    let x = spin_vector(w);
    let y = spin_vector(z);
    let r = cxmat::real_norm(&x);
    let s = cxmat::real_norm(&y);
    let w_sq = w.square();
    let z_sq = z.square();
    let eta = (w_sq - z_sq).norm();
    let sigma = (w_sq + z_sq).norm();

    let psi = amplitudes(p);
    let h = psi.h_invariant();
    let h_closed = -(z_sq + w_sq) * 0.5;
    let dev = (h - h_closed).norm();
    if dev > DUAL_TOL {
        return Err(Error::DualComputationMismatch {
            quantity: "H",
            deviation: dev,
        });
    }
    let l = psi.l_invariant();
    let d = z_sq - w_sq;
    let l_closed = d * d / 16.0;
    let dev = (l - l_closed).norm();
    if dev > DUAL_TOL {
        return Err(Error::DualComputationMismatch {
            quantity: "L",
            deviation: dev,
        });
    }

    Ok(InvariantSet {
        x,
        y,
        r,
        s,
        eta,
        sigma,
        gamma_plus: r + s,
        gamma_minus: r - s,
        h,
        l,
        w_norm2: w.norm_sqr(),
        z_norm2: z.norm_sqr(),
        w_sq,
        z_sq,
    })
}

/// Generator for sample `stream` of a run seeded with `seed`.
///
/// ChaCha8 keyed by `seed_from_u64(seed)` with the word stream set to
/// `stream`; this mapping is part of the public contract and stays fixed so
/// that sampled data is reproducible.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform point on the unit sphere of ℂ⁶, drawn from `rng`.
///
/// Twelve standard normals are consumed in the order
/// `Re w₁, Im w₁, Re w₂, Im w₂, Re w₃, Im w₃, Re z₁, …, Im z₃`.
pub fn sample_params<R: rand::Rng + ?Sized>(rng: &mut R) -> FamilyParams {
    loop {
        let mut g = [0.0f64; 12];
        for v in g.iter_mut() {
            *v = StandardNormal.sample(rng);
        }
        let c = |k: usize| Complex64::new(g[2 * k], g[2 * k + 1]);
        let w = CVec3::new(c(0), c(1), c(2));
        let z = CVec3::new(c(3), c(4), c(5));
        if let Ok(p) = make_params(w, z, true) {
            return p;
        }
    }
}

/// Deterministic random state for `seed` (stream 0).
pub fn random_state(seed: u64) -> FamilyParams {
    random_state_indexed(seed, 0)
}

/// Deterministic random state number `index` of a run seeded with `seed`.
pub fn random_state_indexed(seed: u64, index: u64) -> FamilyParams {
    sample_params(&mut rng_for(seed, index))
}

/// Parses one complex literal: `a`, `bi`, `a+bi`, `a-bi`, `i`, `-i`, ...
pub fn parse_complex(token: &str) -> Result<CScalar> {
    let err = |reason: &str| Error::Parse {
        input: token.to_string(),
        reason: reason.to_string(),
    };
    let t: String = token.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err(err("empty component"));
    }
    let num = |s: &str| -> Result<f64> {
        let v: f64 = s.parse().map_err(|_| err("not a number"))?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(err("not finite"))
        }
    };
    let Some(body) = t.strip_suffix('i').or_else(|| t.strip_suffix('j')) else {
        return Ok(Complex64::new(num(&t)?, 0.0));
    };
    // split at the last sign that is not an exponent sign
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (num(&body[..k])?, &body[k..]),
        None => (0.0, body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        s => num(s)?,
    };
    Ok(Complex64::new(re, im))
}

/// Parses `"c1,c2,c3"` into a vector.
pub fn parse_cvec3(text: &str) -> Result<CVec3> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 3 {
        return Err(Error::Parse {
            input: text.to_string(),
            reason: format!("expected 3 comma-separated components, found {}", parts.len()),
        });
    }
    let mut c = [ZERO; 3];
    for (slot, part) in c.iter_mut().zip(parts) {
        *slot = parse_complex(part)?;
    }
    CVec3::try_new(c)
}

/// Inverse of [`parse_complex`] at full precision.
pub fn format_complex(z: CScalar) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{}{}{}i", z.re, sign, z.im.abs())
}

pub fn format_cvec3(v: &CVec3) -> String {
    v.0.iter().map(|z| format_complex(*z)).collect::<Vec<_>>().join(",")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> CScalar {
        Complex64::new(re, im)
    }

    #[test]
    fn make_params_examples() {
        let p = make_params(CVec3::from_real([2.0, 0.0, 0.0]), CVec3::ZERO, true).unwrap();
        assert_eq!(p, TestVector::E1.params());
        let (w, z) = TestVector::E3.vectors();
        assert!(make_params(w, z, false).is_ok());
        let one = CVec3::from_real([1.0, 0.0, 0.0]);
        assert!(matches!(
            make_params(one, one, false),
            Err(Error::NotNormalized { .. })
        ));
        assert_eq!(make_params(CVec3::ZERO, CVec3::ZERO, true), Err(Error::ZeroState));
        let nan = CVec3::new(c(f64::NAN, 0.0), ZERO, ZERO);
        assert!(matches!(make_params(nan, CVec3::ZERO, true), Err(Error::NonFinite(_))));
    }

    #[test]
    fn test_vectors_are_normalized() {
        for t in TestVector::ALL {
            let (w, z) = t.vectors();
            assert!((w.norm_sqr() + z.norm_sqr() - 1.0).abs() < 1e-15, "{t:?}");
        }
    }

    #[test]
    fn amplitudes_of_e1_by_hand() {
        // z = 0 so Ψ_ijkl = ½ B_ik ε_jl with B = diag(1, −1) for w = (1,0,0).
        let psi = amplitudes(&TestVector::E1.params());
        let half = c(0.5, 0.0);
        let mut expected = [ZERO; 16];
        expected[AmplitudeVector::index(0, 0, 0, 1)] = half;
        expected[AmplitudeVector::index(0, 1, 0, 0)] = -half;
        expected[AmplitudeVector::index(1, 0, 1, 1)] = -half;
        expected[AmplitudeVector::index(1, 1, 1, 0)] = half;
        assert_eq!(psi.0, expected);
        assert_eq!(psi.antisymmetry_defect(), 0.0);
    }

    #[test]
    fn amplitudes_are_antisymmetric_and_normalized() {
        for seed in 0..200 {
            let psi = amplitudes(&random_state(seed));
            assert_eq!(psi.antisymmetry_defect(), 0.0);
            assert!((psi.norm_sqr() - 1.0).abs() < 1e-12);
        }
        let e3 = amplitudes(&TestVector::E3.params());
        assert!((e3.norm_sqr() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn invariants_of_fixtures() {
        let e1 = invariants(&TestVector::E1.params()).unwrap();
        assert_eq!((e1.eta, e1.sigma, e1.r, e1.s), (1.0, 1.0, 0.0, 0.0));
        assert!((e1.h - c(-0.5, 0.0)).norm() < 1e-15);
        assert!((e1.l - c(1.0 / 16.0, 0.0)).norm() < 1e-15);

        let e3 = invariants(&TestVector::E3.params()).unwrap();
        assert!(e3.eta < 1e-15 && e3.sigma < 1e-15);
        assert_eq!(e3.x, [0.0, 0.0, 0.5]);
        assert_eq!(e3.y, [0.0, 0.0, 0.5]);
        assert!((e3.gamma_plus - 1.0).abs() < 1e-15 && e3.gamma_minus.abs() < 1e-15);

        let e5 = invariants(&TestVector::E5.params()).unwrap();
        assert!((e5.eta - 0.28).abs() < 1e-15);
        assert!((e5.sigma - 1.0).abs() < 1e-15);
        assert_eq!((e5.r, e5.s), (0.0, 0.0));

        let e4 = invariants(&TestVector::E4.params()).unwrap();
        assert!((e4.r - 0.2).abs() < 1e-15 && (e4.s - 0.8).abs() < 1e-15);
        assert!((e4.y[2] + 0.8).abs() < 1e-15);
    }

    #[test]
    fn invariants_are_phase_insensitive() {
        for seed in 0..50 {
            let p = random_state(seed);
            let a = invariants(&p).unwrap();
            let b = invariants(&p.with_phase(0.7 + seed as f64)).unwrap();
            for k in 0..3 {
                assert!((a.x[k] - b.x[k]).abs() < 1e-14);
                assert!((a.y[k] - b.y[k]).abs() < 1e-14);
            }
            assert!((a.eta - b.eta).abs() < 1e-14);
            assert!((a.sigma - b.sigma).abs() < 1e-14);
        }
    }

    #[test]
    fn sampler_is_deterministic() {
        assert_eq!(random_state(42), random_state(42));
        assert_ne!(random_state(42), random_state(43));
        assert_ne!(random_state_indexed(42, 0), random_state_indexed(42, 1));
        for seed in 0..100 {
            assert!((random_state(seed).norm_sqr() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sampler_mean_w_weight() {
        let n = 100_000u64;
        let mean = (0..n)
            .map(|i| random_state_indexed(2024, i).w().norm_sqr())
            .sum::<f64>()
            / n as f64;
        assert!((mean - 0.5).abs() < 0.01, "mean {mean}");
    }

    #[test]
    fn parse_literals() {
        assert_eq!(parse_complex("0.5+0i").unwrap(), c(0.5, 0.0));
        assert_eq!(parse_complex("0+0.5i").unwrap(), c(0.0, 0.5));
        assert_eq!(parse_complex("0").unwrap(), c(0.0, 0.0));
        assert_eq!(parse_complex("-i").unwrap(), c(0.0, -1.0));
        assert_eq!(parse_complex("i").unwrap(), c(0.0, 1.0));
        assert_eq!(parse_complex("2.5i").unwrap(), c(0.0, 2.5));
        assert_eq!(parse_complex("1-i").unwrap(), c(1.0, -1.0));
        assert_eq!(parse_complex(" -1e-3+2E+2i ").unwrap(), c(-1e-3, 200.0));
        assert_eq!(parse_complex("1e-3").unwrap(), c(1e-3, 0.0));
        assert_eq!(parse_complex("-2e-1i").unwrap(), c(0.0, -0.2));
        assert!(parse_complex("abc").is_err());
        assert!(parse_complex("").is_err());
        assert!(parse_complex("inf").is_err());
        let v = parse_cvec3("0.5+0i,0+0.5i,0").unwrap();
        assert_eq!(v, CVec3::new(c(0.5, 0.0), c(0.0, 0.5), ZERO));
        assert!(parse_cvec3("1,2").is_err());
    }

    #[test]
    fn format_round_trips() {
        for seed in 0..20 {
            let p = random_state(seed);
            assert_eq!(parse_cvec3(&format_cvec3(p.w())).unwrap(), *p.w());
        }
    }
}
