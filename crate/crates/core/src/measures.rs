//! Entanglement measures: closed forms, eigensolver oracles and monogamy.

use serde::Serialize;

use crate::cxmat::{self, partial_transpose_2, spin_flip};
use crate::density::{reduce_pair, reduce_qubit, DensityMatrix};
use crate::error::{Error, Result};
use crate::state::{amplitudes, FamilyParams, InvariantSet};

/// Radicands in `[−RADICAND_CLAMP, 0)` are analytic zeros under roundoff.
pub const RADICAND_CLAMP: f64 = 1e-12;
/// Radicands below `−RADICAND_FATAL` mean the invariants are inconsistent.
pub const RADICAND_FATAL: f64 = 1e-9;
/// Half-width of the band around `4rs = η²` treated as the separability boundary.
pub const BRANCH_BAND: f64 = 1e-12;
/// Closed form vs oracle tolerance inside the dual-checked functions.
pub const ORACLE_TOL: f64 = 1e-9;
/// Tolerance for `1 − r² = 4 det ρ₁` and friends.
pub const SINGLE_TANGLE_TOL: f64 = 1e-11;
/// Monogamy identity residual beyond which a computation is considered broken.
pub const IDENTITY_FATAL: f64 = 1e-8;
/// Residual tangles below this count as saturating monogamy.
pub const SATURATION_TOL: f64 = 1e-12;

/// `√x`, mapping roundoff-negative radicands to zero.
///
/// Anything in `[−RADICAND_FATAL, 0)` is clamped; only values below that are
/// reported, as they cannot come from valid invariants.
pub fn sqrt_clamped(x: f64, quantity: &'static str) -> Result<f64> {
    if x.is_nan() {
        return Err(Error::NonFinite(quantity));
    }
    if x < -RADICAND_FATAL {
        return Err(Error::NegativeRadicand { quantity, value: x });
    }
    Ok(x.max(0.0).sqrt())
}

fn sort_desc(mut v: [f64; 4]) -> [f64; 4] {
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

/// `C = max{0, ½(√(1−γ₋²−η²) − √(1−γ₊²))}`.
pub fn concurrence_closed(inv: &InvariantSet) -> Result<f64> {
    let e2 = inv.eta * inv.eta;
    let a = sqrt_clamped(1.0 - inv.gamma_minus * inv.gamma_minus - e2, "concurrence")?;
    let b = sqrt_clamped(1.0 - inv.gamma_plus * inv.gamma_plus, "concurrence")?;
    Ok((0.5 * (a - b)).max(0.0))
}

/// `N = max{0, ½(√(1−η²+4rs) − 1)}`.
pub fn negativity_closed(inv: &InvariantSet) -> Result<f64> {
    let a = sqrt_clamped(1.0 - inv.eta * inv.eta + 4.0 * inv.r * inv.s, "negativity")?;
    Ok((0.5 * (a - 1.0)).max(0.0))
}

/// `(Tr ρ², 1/Tr ρ²) = (¼(2−η²), 4/(2−η²))`.
pub fn purity(inv: &InvariantSet) -> Result<(f64, f64)> {
    let tr = 0.25 * (2.0 - inv.eta * inv.eta);
    if !(0.25 - 1e-12..=0.5 + 1e-12).contains(&tr) {
        return Err(Error::Domain(format!("purity {tr} outside [1/4, 1/2]")));
    }
    Ok((tr, 1.0 / tr))
}

/// Eigenvalues of `ρ`, `¼(1 ± √(1−η²))` each twice, ascending.
pub fn rho_spectrum_closed(inv: &InvariantSet) -> Result<[f64; 4]> {
    let d = sqrt_clamped(1.0 - inv.eta * inv.eta, "rho spectrum")?;
    let lo = 0.25 * (1.0 - d);
    let hi = 0.25 * (1.0 + d);
    Ok([lo, lo, hi, hi])
}

/// `¼(√(1−γ²) ± √(1−γ²−η²))` for `γ = γ₊, γ₋`, descending.
pub fn spinflip_spectrum_closed(inv: &InvariantSet) -> Result<[f64; 4]> {
    let e2 = inv.eta * inv.eta;
    let mut out = [0.0; 4];
    for (k, g) in [inv.gamma_plus, inv.gamma_minus].into_iter().enumerate() {
        let a = sqrt_clamped(1.0 - g * g, "spin-flip spectrum")?;
        let b = sqrt_clamped(1.0 - g * g - e2, "spin-flip spectrum")?;
        out[2 * k] = 0.25 * (a + b);
        out[2 * k + 1] = 0.25 * (a - b);
    }
    Ok(sort_desc(out))
}

/// Eigenvalues of `ρ^{T₂}`: `¼(1 ± √(1−η²+4rs))`, `¼(1 ± √(1−η²−4rs))`, descending.
pub fn pt_spectrum_closed(inv: &InvariantSet) -> Result<[f64; 4]> {
    let base = 1.0 - inv.eta * inv.eta;
    let rs4 = 4.0 * inv.r * inv.s;
    let a = sqrt_clamped(base + rs4, "partial-transpose spectrum")?;
    let b = sqrt_clamped(base - rs4, "partial-transpose spectrum")?;
    Ok(sort_desc([
        0.25 * (1.0 + a),
        0.25 * (1.0 - a),
        0.25 * (1.0 + b),
        0.25 * (1.0 - b),
    ]))
}

/// Square roots of the spectrum of `ρρ̃`, descending.
pub fn spinflip_spectrum_oracle(rho: &DensityMatrix) -> Result<[f64; 4]> {
    let m = rho.matrix();
    cxmat::product_spectrum(m, &spin_flip(m))
}

/// Wootters concurrence `max{0, λ₁−λ₂−λ₃−λ₄}` from the eigensolver.
pub fn wootters_oracle(rho: &DensityMatrix) -> Result<f64> {
    let l = spinflip_spectrum_oracle(rho)?;
    Ok((l[0] - l[1] - l[2] - l[3]).max(0.0))
}

/// Eigenvalues of the partial transpose, ascending.
pub fn pt_spectrum_oracle(rho: &DensityMatrix) -> Result<[f64; 4]> {
    Ok(cxmat::herm_eig(&partial_transpose_2(rho.matrix()))?.eigenvalues)
}

/// `max{0, −2μ_min}` with `μ_min` the smallest eigenvalue of `ρ^{T₂}`.
pub fn negativity_oracle(rho: &DensityMatrix) -> Result<f64> {
    Ok((-2.0 * pt_spectrum_oracle(rho)?[0]).max(0.0))
}

fn dual(quantity: &'static str, a: f64, b: f64, tol: f64) -> Result<()> {
    let deviation = (a - b).abs();
    if deviation > tol || deviation.is_nan() {
        Err(Error::DualComputationMismatch {
            quantity,
            deviation,
        })
    } else {
        Ok(())
    }
}

/// `(C²₁₍₂₃₄₎, C²₂₍₁₃₄₎) = (1−r², 1−s²)`, checked against `4 det ρ_q` for all
/// four single-qubit reductions.
pub fn single_tangles(inv: &InvariantSet, p: &FamilyParams) -> Result<(f64, f64)> {
    let t1 = 1.0 - inv.r * inv.r;
    let t2 = 1.0 - inv.s * inv.s;
    let psi = amplitudes(p);
    for (q, expected) in [(1, t1), (2, t2), (3, t1), (4, t2)] {
        let det4 = 4.0 * reduce_qubit(&psi, q)?.det();
        dual("single-qubit tangle", det4, expected, SINGLE_TANGLE_TOL)?;
    }
    Ok((t1, t2))
}

/// `(C²₁₃, C²₂₄) = ((‖z‖²−|w²|)², (‖w‖²−|z²|)²)`.
pub fn cross_concurrences_closed(inv: &InvariantSet) -> (f64, f64) {
    let c13 = inv.z_norm2 - inv.w_sq.norm();
    let c24 = inv.w_norm2 - inv.z_sq.norm();
    (c13 * c13, c24 * c24)
}

/// Closed-form cross concurrences, checked against the Wootters oracle on
/// `ρ₁₃` and `ρ₂₄` and against the expansion through `s, η, σ` (and `r`).
pub fn cross_concurrences(inv: &InvariantSet, p: &FamilyParams) -> Result<(f64, f64)> {
    let (c2_13, c2_24) = cross_concurrences_closed(inv);
    let psi = amplitudes(p);
    let c13 = wootters_oracle(&reduce_pair(&psi, 1, 3)?)?;
    dual("C13", c13, (inv.z_norm2 - inv.w_sq.norm()).abs(), ORACLE_TOL)?;
    let c24 = wootters_oracle(&reduce_pair(&psi, 2, 4)?)?;
    dual("C24", c24, (inv.w_norm2 - inv.z_sq.norm()).abs(), ORACLE_TOL)?;

    let half = 0.5 * (inv.eta * inv.eta + inv.sigma * inv.sigma);
    let e13 = inv.s * inv.s + half - 2.0 * inv.z_norm2 * inv.w_sq.norm();
    dual("C13 squared expansion", e13, c2_13, 1e-11)?;
    let e24 = inv.r * inv.r + half - 2.0 * inv.w_norm2 * inv.z_sq.norm();
    dual("C24 squared expansion", e24, c2_24, 1e-11)?;
    Ok((c2_13, c2_24))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Entangled,
    Separable,
}

/// Distributed-entanglement bookkeeping for qubits 1 and 2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TangleReport {
    pub c2_1_234: f64,
    pub c2_2_134: f64,
    /// `C²₁₂ = C²₁₄ = C²₂₃ = C²₃₄`.
    pub c2_12: f64,
    pub c2_13: f64,
    pub c2_24: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    pub p_plus: f64,
    pub p_minus: f64,
    pub branch: Branch,
    /// `|4rs − η²| ≤ BRANCH_BAND`; both branches were evaluated.
    pub boundary: bool,
    /// Residual tangles from the other branch, for boundary points.
    pub alternate: Option<[f64; 2]>,
    /// Both residual tangles vanish: monogamy is saturated.
    pub saturated: bool,
    /// `|C²₁₂+C²₁₃+C²₁₄+Σ₁ − C²₁₍₂₃₄₎|` and its qubit-2 mirror.
    pub identity_residuals: [f64; 2],
}

impl TangleReport {
    /// `C²₁₍₂₃₄₎ − (C²₁₂+C²₁₃+C²₁₄)` and the qubit-2 mirror; the monogamy
    /// inequalities state both are nonnegative.
    pub fn monogamy_slack(&self) -> [f64; 2] {
        [
            self.c2_1_234 - (2.0 * self.c2_12 + self.c2_13),
            self.c2_2_134 - (2.0 * self.c2_12 + self.c2_24),
        ]
    }
}

struct BranchValues {
    c2_12: f64,
    sigma: [f64; 2],
}

fn entangled_branch(inv: &InvariantSet, p_plus: f64, p_minus: f64) -> Result<BranchValues> {
    let e2 = inv.eta * inv.eta;
    let ab = sqrt_clamped(
        (1.0 - e2 - inv.gamma_minus * inv.gamma_minus) * (1.0 - inv.gamma_plus * inv.gamma_plus),
        "C12 squared",
    )?;
    let pair_sum = 1.0 - inv.r * inv.r - inv.s * inv.s - 0.5 * e2 - ab;
    let c2_12 = (0.5 * pair_sum).max(0.0);
    let hs = 0.5 * inv.sigma * inv.sigma;
    let root = sqrt_clamped((hs + p_plus) * (hs + p_minus), "residual tangle")?;
    Ok(BranchValues {
        c2_12,
        sigma: [
            2.0 * inv.z_norm2 * inv.w_sq.norm() + root - hs,
            2.0 * inv.w_norm2 * inv.z_sq.norm() + root - hs,
        ],
    })
}

fn separable_branch(inv: &InvariantSet) -> BranchValues {
    BranchValues {
        c2_12: 0.0,
        sigma: [
            2.0 * inv.z_norm2 * (inv.w_sq.norm() + inv.w_norm2),
            2.0 * inv.w_norm2 * (inv.z_sq.norm() + inv.z_norm2),
        ],
    }
}

/// Residual tangles `Σ₁`, `Σ₂` with the identities
/// `C²₁₂+C²₁₃+C²₁₄+Σ₁ = C²₁₍₂₃₄₎` (and mirror) enforced.
pub fn residual_tangles(inv: &InvariantSet, p: &FamilyParams) -> Result<TangleReport> {
    let (c2_1_234, c2_2_134) = single_tangles(inv, p)?;
    let (c2_13, c2_24) = cross_concurrences(inv, p)?;
    let gap = 4.0 * inv.r * inv.s - inv.eta * inv.eta;
    let base = 2.0 * inv.z_norm2 * inv.w_norm2;
    let p_plus = base + 0.5 * gap;
    let p_minus = base - 0.5 * gap;

    let (branch, chosen, alternate) = if gap > BRANCH_BAND {
        (Branch::Entangled, entangled_branch(inv, p_plus, p_minus)?, None)
    } else if gap < -BRANCH_BAND {
        (Branch::Separable, separable_branch(inv), None)
    } else {
        let alt = entangled_branch(inv, p_plus, p_minus)?;
        (Branch::Separable, separable_branch(inv), Some(alt.sigma))
    };

    let [sigma1, sigma2] = chosen.sigma;
    let identity_residuals = [
        (2.0 * chosen.c2_12 + c2_13 + sigma1 - c2_1_234).abs(),
        (2.0 * chosen.c2_12 + c2_24 + sigma2 - c2_2_134).abs(),
    ];
    for residual in identity_residuals {
        if residual > IDENTITY_FATAL || residual.is_nan() {
            return Err(Error::IdentityViolation {
                identity: "monogamy identity",
                residual,
            });
        }
    }
    Ok(TangleReport {
        c2_1_234,
        c2_2_134,
        c2_12: chosen.c2_12,
        c2_13,
        c2_24,
        sigma1,
        sigma2,
        p_plus,
        p_minus,
        branch,
        boundary: alternate.is_some(),
        alternate,
        saturated: sigma1.abs() <= SATURATION_TOL && sigma2.abs() <= SATURATION_TOL,
        identity_residuals,
    })
}

/// Lower and upper bounds on the negativity for concurrence `c`:
/// `√((1−c)²+c²) − (1−c) ≤ N ≤ ½(√(2−(1−2c)²) − 1)`.
pub fn cn_bounds(c: f64) -> Result<(f64, f64)> {
    if !(0.0..=0.5).contains(&c) {
        return Err(Error::Domain(format!("concurrence {c} outside [0, 1/2]")));
    }
    let lower = ((1.0 - c).powi(2) + c * c).sqrt() - (1.0 - c);
    let upper = 0.5 * ((2.0 - (1.0 - 2.0 * c).powi(2)).sqrt() - 1.0);
    if lower > upper + 1e-14 || upper > c + 1e-14 {
        return Err(Error::IdentityViolation {
            identity: "lower <= upper <= c",
            residual: (lower - upper).max(upper - c),
        });
    }
    Ok((lower, upper))
}

/// `(C, N)` on the upper boundary curve, attained by `w = z` states with
/// `r = s`: `C = ½(1−√(1−4r²))`, `N = ½(√(1+4r²)−1)`.
pub fn boundary_family(r: f64) -> Result<(f64, f64)> {
    if !(r > 0.0 && r <= 0.5) {
        return Err(Error::Domain(format!("r = {r} outside (0, 1/2]")));
    }
    let r2 = 4.0 * r * r;
    let c = 0.5 * (1.0 - (1.0 - r2).max(0.0).sqrt());
    let n = 0.5 * ((1.0 + r2).sqrt() - 1.0);
    let (_, upper) = cn_bounds(c)?;
    if (upper - n).abs() > 1e-12 {
        return Err(Error::IdentityViolation {
            identity: "boundary family saturates the upper bound",
            residual: (upper - n).abs(),
        });
    }
    Ok((c, n))
}

/// Single-state summary of the two-qubit measures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeasureReport {
    pub concurrence: f64,
    pub negativity: f64,
    pub purity: f64,
    pub participation: f64,
    /// Ascending.
    pub rho_spectrum: [f64; 4],
    /// Descending.
    pub spinflip_spectrum: [f64; 4],
    /// Descending.
    pub pt_spectrum: [f64; 4],
    pub entangled: bool,
}

pub fn measure_report(inv: &InvariantSet) -> Result<MeasureReport> {
    let concurrence = concurrence_closed(inv)?;
    let (purity, participation) = purity(inv)?;
    Ok(MeasureReport {
        concurrence,
        negativity: negativity_closed(inv)?,
        purity,
        participation,
        rho_spectrum: rho_spectrum_closed(inv)?,
        spinflip_spectrum: spinflip_spectrum_closed(inv)?,
        pt_spectrum: pt_spectrum_closed(inv)?,
        entangled: concurrence > 0.0,
    })
}
