//! Quantised fiber-polynomial symbols on a periodic box and the
//! commutator check against the bracket.
//!
//! `cargo run --example weyl_operators`

use qlab::liepoisson::AlgebroidChart;
use qlab::numkit::PeriodicGrid;
use qlab::weylrn::{band_limited_test_function, commutator_check, parse_symbol, quantise};
use qlab::Complex64;
use std::f64::consts::TAU;

fn main() -> qlab::Result<()> {
    let grid = PeriodicGrid::standard(1, 64)?;
    let x = parse_symbol("X", 1, TAU)?;

    // Q(X) = -i hbar d/dp has e^{imp} as eigenfunction with eigenvalue hbar m
    let wave = grid.sample(|p| Complex64::from_polar(1.0, 3.0 * p[0]));
    let out = quantise(&x, 0.5, &grid)?.apply(&wave)?;
    println!("Q(X) e^(3ip) / e^(3ip) = {:.6}", out[5] / wave[5]);

    let h = band_limited_test_function(&grid);
    let chart = AlgebroidChart::tangent(1)?;
    for (f, g) in [("X", "e(p)"), ("X^2", "sin(p)")] {
        let (sf, sg) = (parse_symbol(f, 1, TAU)?, parse_symbol(g, 1, TAU)?);
        println!("f = {f}, g = {g}");
        for hbar in [0.1, 0.05, 0.025] {
            println!("  hbar = {hbar:<6} deviation = {:.3e}", commutator_check(&sf, &sg, hbar, &h, &grid, &chart)?);
        }
    }
    Ok(())
}
