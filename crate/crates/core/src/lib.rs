//! Entanglement of two-qubit density matrices that arise as reductions of
//! fermionic four-qubit states.
//!
//! A state is a pair `(w, z)` of complex 3-vectors with
//! `‖w‖² + ‖z‖² = 1`. From it the crate builds the antisymmetric four-qubit
//! amplitudes, every two- and one-qubit reduction, and closed forms for
//! concurrence, negativity, purity, residual tangles and the Bures metric.
//! Each closed form has an independent eigensolver-based oracle next to it.
//!
//! ```
//! use ftangle::{invariants, concurrence_closed, negativity_closed, TestVector};
//!
//! let p = TestVector::E3.params();
//! let inv = invariants(&p).unwrap();
//! assert!((concurrence_closed(&inv).unwrap() - 0.5).abs() < 1e-12);
//! assert!((negativity_closed(&inv).unwrap() - (2f64.sqrt() - 1.0) / 2.0).abs() < 1e-12);
//! ```

pub mod bures;
pub mod cli;
pub mod cxmat;
pub mod density;
pub mod error;
pub mod measures;
pub mod state;

pub use bures::{bures_closed, bures_trace_oracle, bures_uhlmann_diagnostic, dk, k_vector, KVector, TangentParams};
pub use cxmat::{CMat2, CMat4, CScalar, CVec3};
pub use density::{
    canonicalize, partial_trace, rho24_canonical, rho_from_params, rotation_to_z, CanonicalForm, DensityMatrix,
    Rho24Canonical,
};
pub use error::{Error, Result};
pub use measures::{
    boundary_family, cn_bounds, concurrence_closed, measure_report, negativity_closed, negativity_oracle,
    residual_tangles, wootters_oracle, MeasureReport, TangleReport,
};
pub use state::{amplitudes, invariants, make_params, random_state, FamilyParams, InvariantSet, TestVector};
