use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal norm {off:.3e})")]
    NoConvergence { sweeps: usize, off: f64 },

    #[error("matrix is not positive semidefinite (eigenvalue {eigenvalue:.3e})")]
    NotPsd { eigenvalue: f64 },

    #[error("w and z are both zero")]
    ZeroState,

    #[error("state is not normalized: |w|^2 + |z|^2 = {norm_sqr}")]
    NotNormalized { norm_sqr: f64 },

    #[error("{quantity}: closed form and direct evaluation differ by {deviation:.3e}")]
    DualComputationMismatch {
        quantity: &'static str,
        deviation: f64,
    },

    #[error("invalid qubit subset {0:?}: expected 1 or 2 distinct labels in 1..=4")]
    BadSubset(Vec<usize>),

    #[error("vector too short to define a rotation axis")]
    ZeroVector,

    #[error("vector points along -z; the direct rotation is undefined")]
    AntipodalDegenerate,

    #[error("negative radicand {value:.3e} in {quantity}")]
    NegativeRadicand { quantity: &'static str, value: f64 },

    #[error("{identity} violated by {residual:.3e}")]
    IdentityViolation {
        identity: &'static str,
        residual: f64,
    },

    #[error("{0}")]
    Domain(String),

    #[error("density matrix is singular (eta = {eta:.3e} below {min:.1e})")]
    SingularState { eta: f64, min: f64 },

    #[error("Tr(dL L dL) = {value:.3e} should vanish")]
    VanishingTraceViolation { value: f64 },

    #[error("tangent does not preserve normalization: Re(w.dw* + z.dz*) = {0:.3e}")]
    InvalidTangent(f64),

    #[error("cannot parse {input:?}: {reason}")]
    Parse { input: String, reason: String },
}
