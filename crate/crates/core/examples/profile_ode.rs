//! The radial profile ODE `t alpha' + alpha = t` against `a/t + t/2`, and the
//! profile `mu = arcsin(alpha)/t` it produces.
//!
//! `cargo run --example profile_ode`

use qlab::poismap::solve_profile_ode;

fn main() -> qlab::Result<()> {
    for a in [0.0, 0.01] {
        let sol = solve_profile_ode(a, 0.1, a / 0.1 + 0.05, 1.9, 1e-3)?;
        println!("a = {a}: max deviation from a/t + t/2 = {:.3e}", sol.compare_closed_form());
    }
    let sol = solve_profile_ode(0.0, 0.1, 0.05, 1.9, 1e-3)?;
    for (t, mu) in sol.mu()?.into_iter().step_by(300) {
        println!("t = {t:.2}  mu = {mu:.12}  arcsin(t/2)/t = {:.12}", (t / 2.0).asin() / t);
    }
    Ok(())
}
