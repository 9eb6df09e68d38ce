//! Poisson maps from a tangent bundle to its Poisson base: the bracket on
//! `TP` induced by a connection, sphere geometry in closed form, and the
//! radial profiles that make `Exp` Poisson on the flat torus and the round
//! sphere.

mod geometry;
mod profile;
mod sphere;

pub use geometry::{
    poisson_map_residual, residual_battery, test_functions, tp_bracket, vertical_derivative_eta,
    PoissonGeometry, TangentVec, ScalarFn, TestFunction, TpFunction,
};
pub use profile::{
    pi_sphere, pi_torus, solve_profile_ode, ProfileSolution, ProfileTable, RadialProfile,
};
pub use sphere::{
    cos_minus_sinc_over_sq, d1_exp, d2_exp, exp_differential, exp_sphere, geodesic_variation_fd,
    jacobi_dexp, numerical_rank, parallel_transport_sphere, sinc, sinc_prime, SpherePoint,
};
