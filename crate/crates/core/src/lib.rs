//! Exact continued-fraction dynamics of real quadratic irrationals.
//!
//! The crate computes continued-fraction periods of quadratic irrationals
//! exactly and studies how they evolve when the irrational is moved by
//! rational matrices of growing height:
//!
//! * [`surd`]: canonical `(p + sqrt d)/q` with the integer-only Gauss step.
//! * [`cfe`]: period detection, pattern frequencies, cylinders, Gauss-Kuzmin.
//! * [`field`]: fundamental units, stabilizer matrices, geodesic lengths.
//! * [`padic`]: 2x2 matrices mod `p^m` and the order function `k_{p^n}`.
//! * [`hecke`]: Hecke spheres, Smith-type decompositions, branches.
//! * [`natext`]: the invertible extension of the Gauss map and `c0`.
//! * [`harness`]: sweeps, cross-checks and CSV/JSON output.
//!
//! Batch work goes through [`par`], which uses rayon when the `parallel`
//! feature is enabled and a sequential loop otherwise.

pub mod arith;
pub mod cfe;
pub mod error;
pub mod field;
pub mod harness;
pub mod hecke;
pub mod hp;
pub mod mat;
pub mod natext;
pub mod padic;
pub mod par;
pub mod quad;
pub mod surd;

pub use cfe::{cylinder, expand, Cylinder, PeriodicCF};
pub use error::{Error, Result};
pub use mat::RationalMat;
pub use par::Execution;
pub use surd::Surd;
