//! Differentials of the sphere exponential as Jacobi fields, checked against
//! geodesic variations.
//!
//! `cargo run --example jacobi_fields`

use nalgebra::Vector3;
use qlab::poismap::{
    d1_exp, d2_exp, exp_differential, exp_sphere, geodesic_variation_fd, jacobi_dexp, numerical_rank,
    parallel_transport_sphere, SpherePoint,
};

fn main() -> qlab::Result<()> {
    let p = SpherePoint::new([0.0, 0.0, 1.0])?;
    let u = Vector3::new(1.2, 0.4, 0.0);
    let (h, v) = (Vector3::new(0.0, 1.0, 0.0), Vector3::new(1.0, -1.0, 0.0));

    println!("Exp_p(u) = {:?}", exp_sphere(&p, &u).to_array());
    println!("d1 Exp(h) = {:?}", d1_exp(&p, &u, &h)?.as_slice());
    println!("d2 Exp(h) = {:?}", d2_exp(&p, &u, &h)?.as_slice());

    let closed = jacobi_dexp(&p, &u, &h, &v)?;
    let fd = geodesic_variation_fd(&p, &u, &h, &v, 1e-3)?;
    println!("J(1) closed form vs variation: {:.3e}", (closed - fd).amax());

    let e = Vector3::new(1.0, 0.0, 0.0);
    let moved = parallel_transport_sphere(&p, &e, std::f64::consts::FRAC_PI_2, &Vector3::new(1.0, 1.0, 0.0))?;
    println!("transport of (1,1,0) a quarter turn along x: {:?}", moved.as_slice());
    println!("rank of dExp: {}", numerical_rank(&exp_differential(&p, &u)?, 1e-10));
    Ok(())
}
