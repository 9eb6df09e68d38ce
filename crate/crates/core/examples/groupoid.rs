//! Tangent groupoid of the torus: composing quantised characters through the
//! groupoid reproduces the star-product phase.
//!
//! `cargo run --example groupoid`

use qlab::nctorus::{compose_quantised, evaluate_quantised, GroupoidPoint, SkewForm, UnscaledArrow};
use qlab::Complex64;

fn main() -> qlab::Result<()> {
    let eta = SkewForm::standard_symplectic();

    let x = GroupoidPoint::new(0.5, vec![1.0, 0.0], &[0.5, 0.5])?;
    let y = GroupoidPoint::new(0.5, vec![0.0, 2.0], &[0.5, -0.5])?;
    println!("source(x) = {:?}, target(y) = {:?}", x.source(), y.target());
    println!("x . y = {:?}", x.product(&y)?);

    let a = UnscaledArrow::new(vec![1.0, 2.0], &[0.0, 0.0])?;
    println!("unscaled arrow target = {:?}", a.target(&eta));

    let h = |hbar: f64, u: &[f64], q: &[f64]| Complex64::new(1.0 + u[0] * u[1], hbar * q[0].cos());
    let (r, s, hbar, q) = ([1, 2], [-1, 1], 0.3, [0.7, 1.1]);
    let composed = compose_quantised(&r, &s, &h, hbar, &q, &eta)?;
    let pairing = eta.pairing(&r, &s);
    let direct = Complex64::from_polar(1.0, 0.5 * hbar * pairing) * evaluate_quantised(&[0, 3], &h, hbar, &q, &eta)?;
    println!("Q(f_r) * Q(f_s) = {composed:.12}");
    println!("phase * Q(f_r+s) = {direct:.12}");
    Ok(())
}
