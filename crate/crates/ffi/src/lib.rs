//! C ABI for `ftangle`.
//!
//! States live behind an opaque [`FtState`] handle. Every fallible function
//! returns an [`FtStatus`]; on failure a description is available from
//! [`ft_last_error_message`] on the same thread. Panics never cross the
//! boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use ftangle::bures::{bures_closed, TangentParams};
use ftangle::measures::{self, Branch};
use ftangle::state::{self, FamilyParams};
use ftangle::{CMat4, CScalar, CVec3, DensityMatrix, Error};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FtStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NotNormalized = 3,
    /// Numerical consistency check failed (eigensolver, dual computation, identity).
    Numerical = 4,
    /// Density matrix is singular where the operation needs it regular.
    Singular = 5,
    /// Internal panic caught at the boundary.
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FtComplex {
    pub re: f64,
    pub im: f64,
}

/// Opaque handle to a validated `(w, z)` pair.
pub struct FtState {
    params: FamilyParams,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FtInvariants {
    pub x: [f64; 3],
    pub y: [f64; 3],
    pub r: f64,
    pub s: f64,
    pub eta: f64,
    pub sigma: f64,
    pub gamma_plus: f64,
    pub gamma_minus: f64,
    pub h: FtComplex,
    pub l: FtComplex,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FtMeasures {
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

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FtTangles {
    pub c2_1_234: f64,
    pub c2_2_134: f64,
    pub c2_12: f64,
    pub c2_13: f64,
    pub c2_24: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    pub p_plus: f64,
    pub p_minus: f64,
    /// True for the entangled branch of the residual-tangle formulas.
    pub entangled_branch: bool,
    pub boundary: bool,
    pub saturated: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Failure(FtStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::NotNormalized { .. } => FtStatus::NotNormalized,
            Error::SingularState { .. } => FtStatus::Singular,
            Error::NonFinite(_)
            | Error::NotHermitian { .. }
            | Error::NotPsd { .. }
            | Error::ZeroState
            | Error::BadSubset(_)
            | Error::ZeroVector
            | Error::AntipodalDegenerate
            | Error::InvalidTangent(_)
            | Error::Domain(_)
            | Error::Parse { .. } => FtStatus::InvalidArgument,
            _ => FtStatus::Numerical,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(FtStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> FtStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            FtStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            FtStatus::Panic
        }
    }
}

fn cx(c: FtComplex) -> CScalar {
    CScalar::new(c.re, c.im)
}

fn ft(c: CScalar) -> FtComplex {
    FtComplex { re: c.re, im: c.im }
}

unsafe fn read_vec3(p: *const FtComplex, what: &str) -> Result<CVec3, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    let s = std::slice::from_raw_parts(p, 3);
    Ok(CVec3::try_new([cx(s[0]), cx(s[1]), cx(s[2])])?)
}

unsafe fn read_mat4(p: *const FtComplex) -> Result<DensityMatrix, Failure> {
    if p.is_null() {
        return Err(null("matrix"));
    }
    let s = std::slice::from_raw_parts(p, 16);
    let rows = std::array::from_fn(|i| std::array::from_fn(|j| cx(s[4 * i + j])));
    Ok(DensityMatrix::new(CMat4::try_from_rows(rows)?)?)
}

unsafe fn state_ref<'a>(s: *const FtState) -> Result<&'a FamilyParams, Failure> {
    s.as_ref().map(|s| &s.params).ok_or_else(|| null("state"))
}

unsafe fn write<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

fn boxed(params: FamilyParams) -> *mut FtState {
    Box::into_raw(Box::new(FtState { params }))
}

/// Creates a state from `w[3]` and `z[3]`. With `normalize` the pair is
/// rescaled to unit norm; otherwise it must already be normalized.
///
/// # Safety
/// `w` and `z` must point to 3 readable `FtComplex`; `out` must be writable.
/// The returned handle is released with [`ft_state_free`].
#[no_mangle]
pub unsafe extern "C" fn ft_state_new(
    w: *const FtComplex,
    z: *const FtComplex,
    normalize: bool,
    out: *mut *mut FtState,
) -> FtStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let w = read_vec3(w, "w")?;
        let z = read_vec3(z, "z")?;
        let p = state::make_params(w, z, normalize)?;
        out.write(boxed(p));
        Ok(())
    })
}

/// Random state number `index` of the run seeded with `seed`; identical to
/// the states the command-line sampler draws.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ft_state_random(seed: u64, index: u64, out: *mut *mut FtState) -> FtStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        out.write(boxed(state::random_state_indexed(seed, index)));
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `s` must come from [`ft_state_new`] or [`ft_state_random`] and not have
/// been freed.
#[no_mangle]
pub unsafe extern "C" fn ft_state_free(s: *mut FtState) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Copies the (normalized) vectors out of a handle.
///
/// # Safety
/// `w_out` and `z_out` must point to 3 writable `FtComplex` each.
#[no_mangle]
pub unsafe extern "C" fn ft_state_vectors(
    s: *const FtState,
    w_out: *mut FtComplex,
    z_out: *mut FtComplex,
) -> FtStatus {
    guard(|| {
        let p = state_ref(s)?;
        if w_out.is_null() || z_out.is_null() {
            return Err(null("output vector"));
        }
        for k in 0..3 {
            w_out.add(k).write(ft(p.w()[k]));
            z_out.add(k).write(ft(p.z()[k]));
        }
        Ok(())
    })
}

/// # Safety
/// `s` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ft_invariants(s: *const FtState, out: *mut FtInvariants) -> FtStatus {
    guard(|| {
        let inv = state::invariants(state_ref(s)?)?;
        let value = FtInvariants {
            x: inv.x,
            y: inv.y,
            r: inv.r,
            s: inv.s,
            eta: inv.eta,
            sigma: inv.sigma,
            gamma_plus: inv.gamma_plus,
            gamma_minus: inv.gamma_minus,
            h: ft(inv.h),
            l: ft(inv.l),
        };
        write(out, value, "out")
    })
}

/// Closed-form concurrence, negativity, purity and spectra.
///
/// # Safety
/// `s` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ft_measures(s: *const FtState, out: *mut FtMeasures) -> FtStatus {
    guard(|| {
        let inv = state::invariants(state_ref(s)?)?;
        let m = measures::measure_report(&inv)?;
        let value = FtMeasures {
            concurrence: m.concurrence,
            negativity: m.negativity,
            purity: m.purity,
            participation: m.participation,
            rho_spectrum: m.rho_spectrum,
            spinflip_spectrum: m.spinflip_spectrum,
            pt_spectrum: m.pt_spectrum,
            entangled: m.entangled,
        };
        write(out, value, "out")
    })
}

/// Single, pairwise and residual tangles of qubits 1 and 2.
///
/// # Safety
/// `s` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ft_tangles(s: *const FtState, out: *mut FtTangles) -> FtStatus {
    guard(|| {
        let p = state_ref(s)?;
        let inv = state::invariants(p)?;
        let t = measures::residual_tangles(&inv, p)?;
        let value = FtTangles {
            c2_1_234: t.c2_1_234,
            c2_2_134: t.c2_2_134,
            c2_12: t.c2_12,
            c2_13: t.c2_13,
            c2_24: t.c2_24,
            sigma1: t.sigma1,
            sigma2: t.sigma2,
            p_plus: t.p_plus,
            p_minus: t.p_minus,
            entangled_branch: t.branch == Branch::Entangled,
            boundary: t.boundary,
            saturated: t.saturated,
        };
        write(out, value, "out")
    })
}

/// The two-qubit density matrix, row-major into `out[16]`.
///
/// # Safety
/// `s` must be a live handle; `out` must point to 16 writable `FtComplex`.
#[no_mangle]
pub unsafe extern "C" fn ft_rho(s: *const FtState, out: *mut FtComplex) -> FtStatus {
    guard(|| {
        let rho = ftangle::rho_from_params(state_ref(s)?);
        if out.is_null() {
            return Err(null("out"));
        }
        for i in 0..4 {
            for j in 0..4 {
                out.add(4 * i + j).write(ft(rho.matrix().0[i][j]));
            }
        }
        Ok(())
    })
}

/// Wootters concurrence of an arbitrary two-qubit density matrix given
/// row-major in `m[16]`.
///
/// # Safety
/// `m` must point to 16 readable `FtComplex`; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ft_wootters_concurrence(m: *const FtComplex, out: *mut f64) -> FtStatus {
    guard(|| {
        let rho = read_mat4(m)?;
        write(out, measures::wootters_oracle(&rho)?, "out")
    })
}

/// Negativity `max{0, −2μ_min}` of an arbitrary two-qubit density matrix.
///
/// # Safety
/// `m` must point to 16 readable `FtComplex`; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ft_negativity(m: *const FtComplex, out: *mut f64) -> FtStatus {
    guard(|| {
        let rho = read_mat4(m)?;
        write(out, measures::negativity_oracle(&rho)?, "out")
    })
}

/// Bounds on the negativity of an entangled state with concurrence `c`.
///
/// # Safety
/// `lower` and `upper` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ft_cn_bounds(c: f64, lower: *mut f64, upper: *mut f64) -> FtStatus {
    guard(|| {
        let (lo, hi) = measures::cn_bounds(c)?;
        write(lower, lo, "lower")?;
        write(upper, hi, "upper")
    })
}

/// Bures line element `ds²` along the tangent `(dw[3], dz[3])`, which must
/// preserve the norm to first order.
///
/// # Safety
/// `s` must be a live handle; `dw`, `dz` must point to 3 readable
/// `FtComplex`; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ft_bures(
    s: *const FtState,
    dw: *const FtComplex,
    dz: *const FtComplex,
    out: *mut f64,
) -> FtStatus {
    guard(|| {
        let p = state_ref(s)?;
        let t = TangentParams::new(p, read_vec3(dw, "dw")?, read_vec3(dz, "dz")?)?;
        write(out, bures_closed(p, &t)?, "out")
    })
}

/// Description of the last failure on this thread; empty after a success.
/// The pointer stays valid until the next call into this library on the
/// same thread.
#[no_mangle]
pub extern "C" fn ft_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version, static storage.
#[no_mangle]
pub extern "C" fn ft_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}
