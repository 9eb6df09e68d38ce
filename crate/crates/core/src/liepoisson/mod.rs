//! Lie-Poisson brackets on the dual of a Lie algebroid, in local charts.

mod bracket;
mod chart;
mod classify;
mod polynomial;

pub use bracket::{
    assemble_bracket, gradient, jacobi_residual, lie_poisson_bracket, symbolic_bracket,
    BracketRing, Gradient, Observable, PhasePoint,
};
pub use chart::{AlgebroidChart, StructureTensor};
pub use classify::{classify_quantisable, Classification, QuantisableTag, SymbolFn, SymbolRepr};
pub use polynomial::{BasePoly, Coefficient, FiberPolynomial};
