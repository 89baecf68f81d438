//! Command implementations behind the `ftangle` binary.
//!
//! Each command returns a serializable report; the binary prints it as JSON
//! and maps [`CliError`] onto the exit-code contract.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::ops::Range;
use std::path::Path;

use serde::Serialize;

use crate::bures::{
    bures_closed, bures_trace_form, bures_uhlmann_diagnostic, d_lambda, dk, dk_finite_difference,
    drho_finite_difference, k_identity_residual, random_tangent, FD_STEP,
};
use crate::cxmat::{CMat, CScalar, CVec3};
use crate::density::{canonicalize, rho_from_params, RotationPath};
use crate::error::Error;
use crate::measures::{
    cn_bounds, concurrence_closed, measure_report, negativity_closed, negativity_oracle, pt_spectrum_closed,
    pt_spectrum_oracle, purity, residual_tangles, spinflip_spectrum_closed, spinflip_spectrum_oracle,
    wootters_oracle, MeasureReport, TangleReport,
};
use crate::state::{
    format_cvec3, invariants, make_params, parse_cvec3, random_state_indexed, rng_for, sample_params,
    FamilyParams, InvariantSet,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PROPERTY: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "FTANGLE_THREADS";

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Property(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Property(_) => EXIT_PROPERTY,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

fn usage(e: Error) -> CliError {
    CliError::Usage(e.to_string())
}

fn property(e: Error) -> CliError {
    CliError::Property(e.to_string())
}

/// Worker count: available parallelism, capped by `FTANGLE_THREADS`.
pub fn worker_count() -> usize {
    let available = std::thread::available_parallelism().map_or(1, |n| n.get());
    match std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()) {
        Some(cap) if cap >= 1 => available.min(cap),
        _ => available,
    }
}

/// Evaluates `f` on every index of `range`, split into contiguous chunks
/// across `workers` scoped threads; results come back in index order.
pub fn par_map<T, F>(range: Range<u64>, workers: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync,
{
    let len = range.end.saturating_sub(range.start);
    let workers = (workers.max(1) as u64).min(len.max(1));
    if workers <= 1 {
        return range.map(f).collect();
    }
    let chunk = len.div_ceil(workers);
    let f = &f;
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let lo = range.start + w * chunk;
                let hi = (lo + chunk).min(range.end);
                scope.spawn(move || (lo..hi).map(f).collect::<Vec<T>>())
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("worker panicked"))
            .collect()
    })
}

/// First `n` accepted results of `f` over indices 0, 1, 2, … in index order.
/// Returns them with the number of indices consumed.
fn collect_accepted<T, F>(n: usize, workers: usize, f: F) -> (Vec<T>, u64)
where
    T: Send,
    F: Fn(u64) -> Option<T> + Sync,
{
    let mut out = Vec::with_capacity(n);
    let mut next = 0u64;
    while out.len() < n {
        let want = (n - out.len()) as u64;
        let batch = want + want / 4 + 64;
        for (offset, item) in par_map(next..next + batch, workers, &f).into_iter().enumerate() {
            if let Some(v) = item {
                out.push(v);
                if out.len() == n {
                    return (out, next + offset as u64 + 1);
                }
            }
        }
        next += batch;
    }
    (out, next)
}

fn parse_state(w: &str, z: &str, normalize: bool) -> CliResult<FamilyParams> {
    let w = parse_cvec3(w).map_err(usage)?;
    let z = parse_cvec3(z).map_err(usage)?;
    make_params(w, z, normalize).map_err(usage)
}

#[derive(Debug, Clone, Serialize)]
pub struct StateEcho {
    pub w: String,
    pub z: String,
}

impl StateEcho {
    fn of(p: &FamilyParams) -> Self {
        StateEcho {
            w: format_cvec3(p.w()),
            z: format_cvec3(p.z()),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MeasuresDocument {
    pub state: StateEcho,
    pub measures: MeasureReport,
    pub tangles: TangleReport,
    pub invariants: InvariantSet,
}

pub fn cmd_measures(w: &str, z: &str, normalize: bool) -> CliResult<MeasuresDocument> {
    let p = parse_state(w, z, normalize)?;
    let inv = invariants(&p).map_err(property)?;
    Ok(MeasuresDocument {
        state: StateEcho::of(&p),
        measures: measure_report(&inv).map_err(property)?,
        tangles: residual_tangles(&inv, &p).map_err(property)?,
        invariants: inv,
    })
}

/// One row of the concurrence/negativity scatter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SampleRecord {
    pub concurrence: f64,
    pub negativity: f64,
    pub eta: f64,
    pub r: f64,
    pub s: f64,
    pub entangled: bool,
}

pub const SAMPLE_HEADER: &str = "concurrence,negativity,eta,r,s,entangled";
/// Bound violations beyond this count as failures.
pub const BOUND_TOL: f64 = 1e-10;

impl SampleRecord {
    pub fn of(p: &FamilyParams) -> crate::error::Result<Self> {
        let inv = invariants(p)?;
        let concurrence = concurrence_closed(&inv)?;
        Ok(SampleRecord {
            concurrence,
            negativity: negativity_closed(&inv)?,
            eta: inv.eta,
            r: inv.r,
            s: inv.s,
            entangled: concurrence > 0.0,
        })
    }

    /// 17 significant digits; `entangled` as 0/1.
    pub fn csv_line(&self) -> String {
        format!(
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}",
            self.concurrence,
            self.negativity,
            self.eta,
            self.r,
            self.s,
            u8::from(self.entangled)
        )
    }

    /// How far the negativity falls outside `[lower(C), upper(C)]`; zero when
    /// inside or when the record is separable.
    pub fn bound_violation(&self) -> f64 {
        if !self.entangled {
            return 0.0;
        }
        match cn_bounds(self.concurrence.min(0.5)) {
            Ok((lo, hi)) => (lo - self.negativity).max(self.negativity - hi).max(0.0),
            Err(_) => f64::INFINITY,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SampleSummary {
    pub rows: usize,
    pub drawn: u64,
    pub entangled: usize,
    pub max_concurrence: f64,
    pub max_negativity: f64,
    pub max_bound_violation: f64,
    pub bound_violations: usize,
    pub out: String,
}

pub fn sample_records(n: usize, seed: u64, entangled_only: bool, workers: usize) -> CliResult<(Vec<SampleRecord>, u64)> {
    let (results, drawn) = collect_accepted(n, workers, |i| {
        let rec = SampleRecord::of(&random_state_indexed(seed, i));
        match rec {
            Ok(r) if entangled_only && !r.entangled => None,
            other => Some(other),
        }
    });
    let records = results
        .into_iter()
        .collect::<crate::error::Result<Vec<_>>>()
        .map_err(property)?;
    Ok((records, drawn))
}

/// Writes `n` rows of the concurrence/negativity scatter to `out`.
pub fn cmd_sample(n: usize, seed: u64, out: &Path, entangled_only: bool) -> CliResult<SampleSummary> {
    if n == 0 {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    let file = File::create(out).map_err(|e| CliError::Io(format!("{}: {e}", out.display())))?;
    let (records, drawn) = sample_records(n, seed, entangled_only, worker_count())?;
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", out.display()));
    let mut writer = BufWriter::new(file);
    writeln!(writer, "{SAMPLE_HEADER}").map_err(io)?;
    for r in &records {
        writeln!(writer, "{}", r.csv_line()).map_err(io)?;
    }
    writer.flush().map_err(io)?;

    let violations: Vec<f64> = records.iter().map(SampleRecord::bound_violation).collect();
    let summary = SampleSummary {
        rows: records.len(),
        drawn,
        entangled: records.iter().filter(|r| r.entangled).count(),
        max_concurrence: records.iter().map(|r| r.concurrence).fold(0.0, f64::max),
        max_negativity: records.iter().map(|r| r.negativity).fold(0.0, f64::max),
        max_bound_violation: violations.iter().copied().fold(0.0, f64::max),
        bound_violations: violations.iter().filter(|&&v| v > BOUND_TOL).count(),
        out: out.display().to_string(),
    };
    if summary.bound_violations > 0 {
        return Err(CliError::Property(format!(
            "{} entangled rows violate the negativity bounds (worst {:.3e})",
            summary.bound_violations, summary.max_bound_violation
        )));
    }
    Ok(summary)
}

/// Deliberate corruption of the closed forms, for negative-control tests.
#[doc(hidden)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Corruption {
    pub concurrence_offset: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub n: usize,
    pub seed: u64,
    pub tol: f64,
    pub max_dev_concurrence: f64,
    pub max_dev_negativity: f64,
    pub max_dev_purity: f64,
    pub max_dev_spinflip_spectrum: f64,
    pub max_dev_pt_spectrum: f64,
    pub max_monogamy_violation: f64,
    pub failures: usize,
    /// First few failure descriptions.
    pub examples: Vec<String>,
}

#[derive(Default)]
struct StateCheck {
    concurrence: f64,
    negativity: f64,
    purity: f64,
    spinflip: f64,
    pt: f64,
    monogamy: f64,
    error: Option<String>,
}

fn max_abs_dev(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn verify_state(p: &FamilyParams, corruption: Corruption) -> crate::error::Result<StateCheck> {
    let inv = invariants(p)?;
    let rho = rho_from_params(p);
    let c = concurrence_closed(&inv)? + corruption.concurrence_offset;
    let (tr, _) = purity(&inv)?;
    let mut pt = pt_spectrum_oracle(&rho)?;
    pt.reverse();
    // cross concurrences and the single-qubit tangles are dual-checked inside
    let tangles = residual_tangles(&inv, p)?;
    let monogamy = tangles
        .identity_residuals
        .into_iter()
        .chain(tangles.monogamy_slack().map(|s| -s))
        .fold(0.0, f64::max);
    Ok(StateCheck {
        concurrence: (c - wootters_oracle(&rho)?).abs(),
        negativity: (negativity_closed(&inv)? - negativity_oracle(&rho)?).abs(),
        purity: (tr - rho.purity()).abs(),
        spinflip: max_abs_dev(&spinflip_spectrum_closed(&inv)?, &spinflip_spectrum_oracle(&rho)?),
        pt: max_abs_dev(&pt_spectrum_closed(&inv)?, &pt),
        monogamy,
        error: None,
    })
}

/// Closed forms against eigensolver oracles on `n` random states.
pub fn run_verify(n: usize, seed: u64, tol: f64, corruption: Corruption, workers: usize) -> CliResult<VerifyReport> {
    if n == 0 {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(CliError::Usage("--tol must be positive".into()));
    }
    let checks = par_map(0..n as u64, workers, |i| {
        verify_state(&random_state_indexed(seed, i), corruption).unwrap_or_else(|e| StateCheck {
            error: Some(format!("state {i}: {e}")),
            ..StateCheck::default()
        })
    });
    let mut report = VerifyReport {
        n,
        seed,
        tol,
        max_dev_concurrence: 0.0,
        max_dev_negativity: 0.0,
        max_dev_purity: 0.0,
        max_dev_spinflip_spectrum: 0.0,
        max_dev_pt_spectrum: 0.0,
        max_monogamy_violation: 0.0,
        failures: 0,
        examples: Vec::new(),
    };
    for (i, c) in checks.iter().enumerate() {
        report.max_dev_concurrence = report.max_dev_concurrence.max(c.concurrence);
        report.max_dev_negativity = report.max_dev_negativity.max(c.negativity);
        report.max_dev_purity = report.max_dev_purity.max(c.purity);
        report.max_dev_spinflip_spectrum = report.max_dev_spinflip_spectrum.max(c.spinflip);
        report.max_dev_pt_spectrum = report.max_dev_pt_spectrum.max(c.pt);
        report.max_monogamy_violation = report.max_monogamy_violation.max(c.monogamy);
        let worst = [c.concurrence, c.negativity, c.purity, c.spinflip, c.pt, c.monogamy]
            .into_iter()
            .fold(0.0, f64::max);
        let failure = match &c.error {
            Some(e) => Some(e.clone()),
            None if worst > tol || worst.is_nan() => Some(format!("state {i}: deviation {worst:.3e}")),
            None => None,
        };
        if let Some(msg) = failure {
            report.failures += 1;
            if report.examples.len() < 5 {
                report.examples.push(msg);
            }
        }
    }
    Ok(report)
}

pub fn cmd_verify(n: usize, seed: u64, tol: f64, corruption: Corruption) -> CliResult<VerifyReport> {
    run_verify(n, seed, tol, corruption, worker_count())
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct RatioStats {
    pub min: f64,
    pub max: f64,
    pub mean: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BuresReport {
    pub n: usize,
    pub seed: u64,
    pub eta_min: f64,
    pub drawn: u64,
    pub rejected: u64,
    pub max_dev_closed_trace: f64,
    pub max_k_identity_residual: f64,
    pub max_vanishing_trace: f64,
    pub max_inverse_residual: f64,
    pub max_dev_dk_finite_difference: f64,
    pub max_dev_drho_finite_difference: f64,
    pub max_dev_quadratic_scaling: f64,
    pub min_ds2: f64,
    /// Textbook eigenbasis form divided by the closed form; informational.
    pub uhlmann_ratio: RatioStats,
    pub failures: usize,
    pub examples: Vec<String>,
}

/// Tolerances applied by the Bures check.
pub const BURES_TOL: f64 = 1e-10;
pub const K_RESIDUAL_TOL: f64 = 1e-11;
pub const FD_TOL: f64 = 1e-8;
pub const SCALING_TOL: f64 = 1e-12;

#[derive(Default)]
struct BuresCheck {
    closed_trace: f64,
    k_residual: f64,
    vanishing: f64,
    inverse: f64,
    fd_dk: f64,
    fd_drho: f64,
    scaling: f64,
    ds2: f64,
    ratio: f64,
    error: Option<String>,
}

/// State `i` is `random_state_indexed(seed, i)`; its tangent is drawn from
/// the same stream right after the twelve state normals.
fn bures_state(seed: u64, i: u64, eta_min: f64) -> Option<BuresCheck> {
    let mut rng = rng_for(seed, i);
    let p = sample_params(&mut rng);
    let eta = (p.w().square() - p.z().square()).norm();
    if eta < eta_min {
        return None;
    }
    let t = random_tangent(&p, &mut rng);
    let run = || -> crate::error::Result<BuresCheck> {
        let closed = bures_closed(&p, &t)?;
        let tf = bures_trace_form(&p, &t)?;
        let analytic = dk(&p, &t);
        let fd = dk_finite_difference(&p, &t, FD_STEP);
        let fd_dk = analytic.iter().zip(&fd).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let fd_drho = drho_finite_difference(&p, &t, FD_STEP).max_abs_diff(&d_lambda(&p, &t).scale_re(0.25));
        let scaling = (bures_closed(&p, &t.scale(2.0))? - 4.0 * closed).abs();
        let (_, ratio) = bures_uhlmann_diagnostic(&p, &t)?;
        Ok(BuresCheck {
            closed_trace: (closed - tf.ds2).abs(),
            k_residual: k_identity_residual(&p),
            vanishing: tf.vanishing_trace.abs(),
            inverse: tf.inverse_residual,
            fd_dk,
            fd_drho,
            scaling,
            ds2: closed,
            ratio,
            error: None,
        })
    };
    Some(run().unwrap_or_else(|e| BuresCheck {
        error: Some(format!("state {i}: {e}")),
        ..BuresCheck::default()
    }))
}

pub fn run_bures_check(n: usize, seed: u64, eta_min: f64, workers: usize) -> CliResult<BuresReport> {
    if n == 0 {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    if !(eta_min > 0.0 && eta_min < 1.0) {
        return Err(CliError::Usage(format!(
            "--eta-min must lie in (0, 1); got {eta_min} (the metric degenerates at eta = 0)"
        )));
    }
    let (checks, drawn) = collect_accepted(n, workers, |i| bures_state(seed, i, eta_min));
    let mut r = BuresReport {
        n,
        seed,
        eta_min,
        drawn,
        rejected: drawn - n as u64,
        max_dev_closed_trace: 0.0,
        max_k_identity_residual: 0.0,
        max_vanishing_trace: 0.0,
        max_inverse_residual: 0.0,
        max_dev_dk_finite_difference: 0.0,
        max_dev_drho_finite_difference: 0.0,
        max_dev_quadratic_scaling: 0.0,
        min_ds2: f64::INFINITY,
        uhlmann_ratio: RatioStats {
            min: f64::INFINITY,
            max: f64::NEG_INFINITY,
            mean: 0.0,
        },
        failures: 0,
        examples: Vec::new(),
    };
    let mut ratio_sum = 0.0;
    let mut ratio_count = 0usize;
    for c in &checks {
        if let Some(e) = &c.error {
            r.failures += 1;
            if r.examples.len() < 5 {
                r.examples.push(e.clone());
            }
            continue;
        }
        r.max_dev_closed_trace = r.max_dev_closed_trace.max(c.closed_trace);
        r.max_k_identity_residual = r.max_k_identity_residual.max(c.k_residual);
        r.max_vanishing_trace = r.max_vanishing_trace.max(c.vanishing);
        r.max_inverse_residual = r.max_inverse_residual.max(c.inverse);
        r.max_dev_dk_finite_difference = r.max_dev_dk_finite_difference.max(c.fd_dk);
        r.max_dev_drho_finite_difference = r.max_dev_drho_finite_difference.max(c.fd_drho);
        r.max_dev_quadratic_scaling = r.max_dev_quadratic_scaling.max(c.scaling);
        r.min_ds2 = r.min_ds2.min(c.ds2);
        r.uhlmann_ratio.min = r.uhlmann_ratio.min.min(c.ratio);
        r.uhlmann_ratio.max = r.uhlmann_ratio.max.max(c.ratio);
        ratio_sum += c.ratio;
        ratio_count += 1;
        let bad = c.closed_trace > BURES_TOL
            || c.vanishing > BURES_TOL
            || c.inverse > BURES_TOL
            || c.k_residual > K_RESIDUAL_TOL
            || c.fd_dk > FD_TOL
            || c.fd_drho > FD_TOL
            || c.scaling > SCALING_TOL
            || c.ds2 < -1e-12;
        if bad {
            r.failures += 1;
            if r.examples.len() < 5 {
                r.examples.push(format!("tolerance exceeded (ds2 {:.6e})", c.ds2));
            }
        }
    }
    if ratio_count > 0 {
        r.uhlmann_ratio.mean = ratio_sum / ratio_count as f64;
    }
    Ok(r)
}

pub fn cmd_bures_check(n: usize, seed: u64, eta_min: f64) -> CliResult<BuresReport> {
    run_bures_check(n, seed, eta_min, worker_count())
}

/// Matrix as rows of `[re, im]` pairs.
pub fn matrix_rows<const N: usize>(m: &CMat<N>) -> Vec<Vec<[f64; 2]>> {
    m.0.iter().map(|row| row.iter().map(|c: &CScalar| [c.re, c.im]).collect()).collect()
}

fn vec_pairs(v: &CVec3) -> Vec<[f64; 2]> {
    v.0.iter().map(|c| [c.re, c.im]).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct CanonicalDocument {
    pub state: StateEcho,
    pub rho: Vec<Vec<[f64; 2]>>,
    #[serde(rename = "U")]
    pub u: Vec<Vec<[f64; 2]>>,
    #[serde(rename = "V")]
    pub v: Vec<Vec<[f64; 2]>>,
    pub u_path: RotationPath,
    pub v_path: RotationPath,
    pub rho_prime: Vec<Vec<[f64; 2]>>,
    pub alpha: [f64; 3],
    pub beta: [f64; 3],
    pub xi: [f64; 2],
    pub zeta: [f64; 2],
    pub w_prime: Vec<[f64; 2]>,
    pub z_prime: Vec<[f64; 2]>,
    pub x_shape_residual: f64,
    pub assembly_residual: f64,
    pub quadratic_identity_residuals: [f64; 4],
    pub eta_identity_residuals: [f64; 2],
}

pub fn cmd_canonical(w: &str, z: &str, normalize: bool) -> CliResult<CanonicalDocument> {
    let p = parse_state(w, z, normalize)?;
    let cf = canonicalize(&p).map_err(property)?;
    Ok(CanonicalDocument {
        state: StateEcho::of(&p),
        rho: matrix_rows(&cf.rho),
        u: matrix_rows(&cf.u),
        v: matrix_rows(&cf.v),
        u_path: cf.u_path,
        v_path: cf.v_path,
        rho_prime: matrix_rows(cf.rho_prime.matrix()),
        alpha: cf.alpha,
        beta: cf.beta,
        xi: cf.xi,
        zeta: cf.zeta,
        w_prime: vec_pairs(&cf.w_prime),
        z_prime: vec_pairs(&cf.z_prime),
        x_shape_residual: cf.x_shape_residual(),
        assembly_residual: cf.assembly_residual(),
        quadratic_identity_residuals: cf.quadratic_identity_residuals(),
        eta_identity_residuals: cf.eta_identity_residuals(),
    })
}
