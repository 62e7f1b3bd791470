//! Spectral and normal-form analysis of a delayed neural field on `[-1, 1]`.
//!
//! The model is a single-population neural field whose connectivity kernel is
//! a finite sum of exponentials and whose transmission delay grows linearly
//! with distance. For that class the point spectrum of the linearization, the
//! resolvent and the critical Hopf / double-Hopf normal form coefficients all
//! reduce to small dense linear algebra, which this crate implements together
//! with an independent validation path: a trapezoid discretization of the
//! field integrated as a classical delay differential equation.
//!
//! Modules follow the pipeline:
//!
//! * [`model`] — parameters, connectivity, activation and spatial grid
//! * [`charpoly`] — the even characteristic polynomial and its roots
//! * [`spectrum`] — point spectrum via Newton on `det S(lambda)`, eigenfunctions
//! * [`resolvent`] — explicit variation-of-constants resolvent
//! * [`normalform`] — contour-integral dual pairings, Hopf and double-Hopf data
//! * [`discretize`] — the DDE discretization, RK4 method of steps, diagnostics
//! * [`report`] — CSV/JSON serialization with fixed float formatting

pub mod charpoly;
pub mod discretize;
pub mod error;
pub mod model;
pub mod normalform;
pub mod report;
pub mod resolvent;
pub mod spectrum;

pub use error::{Error, Result};
pub use model::{KernelTerm, ModelParams, SpatialGrid};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
