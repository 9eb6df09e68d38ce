//! The commutator `(1/i hbar)(a * b - b * a)` approaches the Poisson bracket
//! at rate `hbar^2`.
//!
//! `cargo run --example semiclassical_limit`

use qlab::nctorus::{random_trig_poly, semiclassical_bound, semiclassical_error, SkewForm};
use qlab::numkit::loglog_slope;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> qlab::Result<()> {
    let eta = SkewForm::standard_symplectic();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let a = random_trig_poly(&mut rng, 2, 4, 2);
    let b = random_trig_poly(&mut rng, 2, 4, 2);
    println!("a = {a}\nb = {b}");

    let hbars = [0.1, 0.05, 0.025, 0.0125];
    let mut errors = Vec::new();
    println!("{:>8} {:>12} {:>12}", "hbar", "error", "bound");
    for &hbar in &hbars {
        let e = semiclassical_error(&a, &b, &eta, hbar)?;
        println!("{hbar:>8} {e:>12.4e} {:>12.4e}", semiclassical_bound(&a, &b, &eta, hbar)?);
        errors.push(e);
    }
    if let Some(slope) = loglog_slope(&hbars, &errors) {
        println!("log-log slope: {slope:.4}");
    }
    Ok(())
}
