//! The map `TS^2 -> S^2` with profile `mu(t) = arcsin(t/2)/t` is Poisson; the
//! constant profile `1/2` is not.
//!
//! `cargo run --example sphere_poisson_map`

use nalgebra::Vector3;
use qlab::numkit::Tolerances;
use qlab::poismap::{pi_sphere, residual_battery, PoissonGeometry, RadialProfile, SpherePoint};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> qlab::Result<()> {
    let geom = PoissonGeometry::RoundSphere;
    let tol = Tolerances::default();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for profile in [RadialProfile::Arcsin, RadialProfile::Half] {
        let map = |x: &[f64], u: &[f64]| {
            let p = SpherePoint::normalized([x[0], x[1], x[2]])?;
            Ok(pi_sphere(&p, &Vector3::from_column_slice(u), &profile)?.to_array().to_vec())
        };
        let mut worst: f64 = 0.0;
        for i in 0..20 {
            let v = geom.sample_tangent(&mut rng, 0.05 + 0.07 * i as f64);
            worst = worst.max(residual_battery(&map, &v, &geom, &tol)?);
        }
        println!("{profile:?}: max residual over 20 samples = {worst:.3e}");
    }
    Ok(())
}
