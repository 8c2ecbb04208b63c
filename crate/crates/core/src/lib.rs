//! Exact computations with pointed monoids: finitely generated quotients of
//! affine monoids by monoid ideals, the sets they act on, and the schemes,
//! nerves, and resolutions built from them.
//!
//! Everything is integer arithmetic on lattice points; no floating point is
//! involved anywhere, and every verdict (freeness, flatness, smoothness,
//! cancellativity) is backed by a finite certified search.  Searches that
//! could in principle run away are budgeted and report an explicit
//! "capped" outcome instead of guessing.
//!
//! Inputs are desk-scale: a handful of generators in rank at most a dozen.
//! With the default `parallel` feature the degreewise flatness scans fan out
//! over a thread pool; disabling it produces the same answers sequentially.

pub mod aset;
pub mod corpus;
pub mod cyclic;
pub mod dilation;
pub mod json;
pub mod lattice;
pub mod monoid;
pub mod realize;
pub mod scheme;

mod exec;

pub use aset::{ASet, ASetError, FiniteASet, Flatness, FlatnessReport, Freeness, FreenessWitness};
pub use dilation::{dilate_aset, dilate_ideal, dilate_monoid};
pub use json::JsonError;
pub use cyclic::{
    Coefficients, CyclicError, CyclicSetTruncation, DilationSequence, HomologyDegree,
    OmegaTilde, ProbeOptions, ProbeReport,
};
pub use lattice::{Cone, LatticeError, LatticeVector};
pub use monoid::{MonoidElement, MonoidError, MonoidIdeal, PointedMonoid};
pub use realize::{AlgebraPresentation, Crosscheck, RealizeError};
pub use scheme::{
    EquivariantCenter, Fan, Gluing, MonoidScheme, Prime, ResolutionTrace, ResolveOptions,
    SchemeError,
};
