//! Exact arithmetic for cyclotomic integers, character sums over finite
//! fields, and the periodicity structure of the algebraic degrees that
//! those sums produce.
//!
//! The crate is organized bottom-up:
//!
//! * [`field`] and [`poly`] provide the exact-field abstraction and dense
//!   polynomial arithmetic that everything else is built on.
//! * [`cyclotomic`] implements `Q(zeta_m)` in the power basis, the Galois
//!   action, subfield degrees, and minimal polynomials.
//! * [`finitefield`] implements `F_{p^k}` with deterministic moduli.
//! * [`expsum`] evaluates additive character sums (including Kloosterman
//!   sums) by exact enumeration, with parallel tally kernels.
//! * [`lrs`] covers linear recurrences: Berlekamp–Massey, generating
//!   functions, L-functions from sum prefixes, and zero-set certification.
//! * [`periodicity`] detects and certifies virtual periodicity of integer
//!   sequences and drives the degree-sequence reports.
//! * [`dynamics`] iterates polynomial maps over cyclotomic fields and
//!   analyzes the degrees along an orbit.
//!
//! All arithmetic is exact (big rationals over a power basis) unless a
//! function explicitly says otherwise; floating point only ever appears in
//! diagnostics such as archimedean size estimates.

pub mod cyclotomic;
pub mod dynamics;
pub mod expsum;
pub mod field;
pub mod finitefield;
pub mod json;
pub mod lrs;
pub mod periodicity;
pub mod poly;

pub use cyclotomic::{CycElem, CycError, GaloisAuto, SubfieldSpec};
pub use dynamics::{CycPoly, DynError, OrbitRecord};
pub use expsum::{ExpSumError, MultiPoly};
pub use field::Field;
pub use finitefield::{FqConfig, FqElem, FqError};
pub use lrs::{ClosedForm, LrsError, RationalFn, Recurrence, ZeroSetDescription};
pub use periodicity::{FixednessProfile, MinPolyRecord, PeriodCertificate, PeriodicityError};
pub use poly::Poly;
