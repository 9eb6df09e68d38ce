//! Desk-scale quantisation of Lie-Poisson manifolds.
//!
//! The crate is organised bottom-up:
//!
//! * [`numkit`]: periodic grids, discrete Fourier analysis, fourth-order
//!   finite differences and a fixed-step RK4 integrator.
//! * [`liepoisson`]: the Lie-Poisson bracket on the dual of a Lie algebroid
//!   written in a local chart, with Jacobi-identity validation and the
//!   classes of symbols that can be quantised.
//! * [`nctorus`]: the tangent groupoid of the torus with a constant Poisson
//!   structure, the closed-form quantised characters, and the deformed
//!   product `g_r * g_s = exp(i hbar/2 <r, eta s>) g_{r+s}`.
//! * [`weylrn`]: quantisation of fiber-polynomial symbols on `T*R^n` as
//!   differential operators, realised spectrally on a periodic box.
//! * [`poismap`]: the Poisson structure on a tangent bundle induced by a
//!   connection, sphere geometry (exponential map, its differentials,
//!   parallel transport, Jacobi fields) and explicit Poisson maps
//!   `TP -> P` for the flat torus and the round sphere.
//! * [`experiment`]: config parsing, experiment dispatch and report files
//!   behind the `qlab` executable.

// `!(x <= tol)` is the NaN-rejecting form used throughout
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
mod kvtext;
pub mod experiment;
pub mod liepoisson;
pub mod nctorus;
pub mod numkit;
pub mod poismap;
pub mod weylrn;

pub use error::{Error, Result};
pub use num_complex::Complex64;
