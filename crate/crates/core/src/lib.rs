//! Exact homological algebra for the dispersionless KdV Poisson pencil.
//!
//! The crate is `no_std` (with `alloc`). Modules build on one another:
//! [`algebra`] (differential polynomials), [`varcalc`] (variational calculus
//! and the operators `D_P`), [`linwin`] (windowed slices and exact linear
//! algebra), [`specseq`] (spectral sequences of filtered complexes),
//! [`kdvpencil`] (the pencil and its page-level formulas) and [`cohomeng`]
//! (the cohomology groups).

#![no_std]

extern crate alloc;

pub mod algebra;
pub mod cohomeng;
pub mod kdvpencil;
pub mod linwin;
pub mod specseq;
pub mod varcalc;

mod error;

pub use error::{Error, ParseError, Result};
