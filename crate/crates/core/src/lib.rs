//! Spectral toolkit for the twisted Laplacian on `R^{2n}`.
//!
//! The operator acts diagonally on the special Hermite functions `phi_{mu nu}`
//! with eigenvalue (Landau level) `2|nu| + n`. This crate builds that
//! eigenbasis on a tensor grid, runs the operator calculus (projections,
//! semigroup, powers, Schrodinger propagator) on coefficient fields, evaluates
//! the Sobolev, Triebel-Lizorkin and mixed space-time norms, and provides the
//! sweep harness that checks the projection and Strichartz exponents.
//!
//! All numerics are generic over [`Real`] (`f32` or `f64`); the `*64` aliases
//! below are the concrete types the harness and CLI use.

// Negated comparisons are used on purpose so that NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod io;
pub mod scalar;
pub mod special_functions;
pub mod special_hermite;
pub mod spectral_ops;
pub mod verification;

pub use error::{Error, Result};
pub use num_complex::Complex;
pub use scalar::Real;
pub use special_functions::{enumerate_level, gauss_hermite_rule, hermite_function_values, GaussHermiteRule, MultiIndex};
pub use special_hermite::{
    analyze, build_basis, eval_special_hermite, synthesize, BasisTable, QuadratureGrid, SpectralField, Truncation,
};
pub use spectral_ops::{NormOrder, NormParams, TimeSeriesField, TimeSeriesSamples};

pub type C64 = Complex<f64>;
pub type C32 = Complex<f32>;

pub type GaussHermiteRule64 = GaussHermiteRule<f64>;
pub type GaussHermiteRule32 = GaussHermiteRule<f32>;
pub type QuadratureGrid64 = QuadratureGrid<f64>;
pub type QuadratureGrid32 = QuadratureGrid<f32>;
pub type BasisTable64 = BasisTable<f64>;
pub type BasisTable32 = BasisTable<f32>;
pub type SpectralField64 = SpectralField<f64>;
pub type SpectralField32 = SpectralField<f32>;
pub type TimeSeriesField64 = TimeSeriesField<f64>;
pub type TimeSeriesSamples64 = TimeSeriesSamples<f64>;
pub type NormParams64 = NormParams<f64>;
pub type SweepRecord64 = verification::SweepRecord<f64>;
pub type ExponentFit64 = verification::ExponentFit<f64>;
