//! Multi-mode boson Gaussian states at finite Fock truncation.
//!
//! Two representations of the same physics live side by side:
//!
//! * the abstract parameterization by a complex mean vector `w` and a real
//!   symmetric covariance matrix `S` ([`gaussian::GaussianParams`]), and
//! * dense matrices on a truncated n-mode Fock space ([`fock`]): ladder,
//!   quadrature, field and Weyl operators, plus density-matrix state builders.
//!
//! The [`extract`] module pulls `(w, S)` back out of a density matrix through
//! trace formulas and compares against the analytic side; [`integrability`]
//! computes traces of (possibly sign-indefinite) observables through resolvent
//! approximations of their positive parts, the way the same quantities are
//! defined when the operators are unbounded.
//!
//! Everything is dense and double precision. Mode count `n` and per-mode
//! cutoff `d` are fixed at construction; the total dimension is `d^n`.

#![forbid(unsafe_code)]

pub mod coords;
pub mod extract;
pub mod fock;
pub mod gaussian;
pub mod integrability;
pub mod linalg;
pub mod report;
pub mod sample;
pub mod stateio;
pub mod stencil;
pub mod verify;

mod error;

pub use error::{Error, Result};
