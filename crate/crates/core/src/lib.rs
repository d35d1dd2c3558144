//! Core engine for Clifford-algebra intertwiner construction.
//!
//! The crate has four layers:
//!
//! * dense multivector arithmetic over Cl(p,q) for real and complex
//!   coefficients ([`multivector`], [`blade`], [`signature`]);
//! * the algebraic intertwiner search connecting two constant generator
//!   sets by a similarity transformation ([`generators`], [`pauli`]);
//! * frame fields on regular grids, their spin connections, curvature and
//!   gauge transforms ([`grid`], [`fields`], [`connection`]);
//! * transport solvers for `d_mu S = C_mu S` behind a common strategy trait,
//!   selected by name ([`transport`]).
//!
//! Serialization of every exchange format lives in [`io`].

pub mod blade;
pub mod connection;
pub mod error;
pub mod fields;
pub mod generators;
pub mod grid;
pub mod io;
pub mod linalg;
pub mod multivector;
pub mod pauli;
pub mod scalar;
pub mod signature;
pub mod transport;

pub use error::{AlgebraError, FieldError, PauliError, TransportError};
pub use multivector::Multivector;
pub use scalar::{ClScalar, ScalarField};
pub use signature::{Signature, N_MAX};
