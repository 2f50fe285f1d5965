//! Sampling series from self-adjoint extensions of symmetric operators.
//!
//! Two concrete models are provided: a Jacobi (orthogonal polynomial) model
//! whose extension family is realized by boundary-angle truncations, and the
//! interval operator `i d/dt` whose transform lands in a Paley-Wiener space.
//! On top of the shared [`model::SamplingModel`] contract sit the kernel and
//! Lagrange sampling series ([`reconstruct`]) and the de Branges structure
//! checks ([`debranges`]).

pub mod debranges;
pub mod error;
pub mod jacobi;
pub mod model;
pub mod pw;
pub mod reconstruct;
pub mod rng;
pub mod tridiag;
pub mod verify;

pub use error::{Error, Result};
pub use model::{
    kernel, parseval_inner, transform, BasisTag, DiscreteSpectralMeasure, ExtensionParameter,
    KernelVectorSpec, SamplingModel, SamplingSet, StateVector, C64,
};
