//! The Lie-Poisson bracket of a chart: so(3) and its Jacobi identity, and a
//! perturbed structure tensor that breaks it.
//!
//! `cargo run --example lie_poisson`

use qlab::liepoisson::{
    jacobi_residual, lie_poisson_bracket, symbolic_bracket, AlgebroidChart, FiberPolynomial, Observable, PhasePoint,
    StructureTensor,
};
use qlab::numkit::Tolerances;

fn so3(b1_12: f64) -> qlab::Result<AlgebroidChart> {
    let b = StructureTensor::zeros(3)
        .with(2, 0, 1, 1.0)
        .with(0, 1, 2, 1.0)
        .with(1, 2, 0, 1.0)
        .with(0, 0, 1, b1_12);
    AlgebroidChart::lie_algebra(b)
}

fn main() -> qlab::Result<()> {
    let z: Vec<FiberPolynomial> = (0..3).map(|j| FiberPolynomial::fiber_coordinate(0, 3, j)).collect();
    let chart = so3(0.0)?;
    let tol = Tolerances::default();
    let point = PhasePoint::new(vec![], vec![1.0, 2.0, 3.0]);

    let b12 = symbolic_bracket(&z[0], &z[1], &chart)?;
    println!("{{Z1, Z2}} at Z = (1, 2, 3): {}", b12.eval(&[], &point.z));

    let f = Observable::func(|_, z| z[0].sin() * z[2]);
    let g = Observable::Poly(z[1].mul(&z[1]));
    println!("{{sin Z1 * Z3, Z2^2}} = {:.10}", lie_poisson_bracket(&f, &g, &point, &chart, &tol)?);

    let ones = PhasePoint::new(vec![], vec![1.0, 1.0, 1.0]);
    for eps in [0.0, 1e-3, 1e-1] {
        let r = jacobi_residual(&so3(eps)?, &z[0], &z[1], &z[2], &ones, &tol)?;
        println!("B^1_12 = {eps:<6} Jacobi residual = {r:.3e}");
    }
    Ok(())
}
