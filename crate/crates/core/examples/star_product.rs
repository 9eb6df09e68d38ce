//! Star product on the noncommutative torus.
//!
//! `cargo run --example star_product`

use qlab::nctorus::{involution, poisson_bracket_const, star, SkewForm, TrigPoly};
use qlab::Complex64;

fn main() -> qlab::Result<()> {
    let eta = SkewForm::standard_symplectic();
    let g10 = TrigPoly::character(vec![1, 0]);
    let g01 = TrigPoly::character(vec![0, 1]);

    for hbar in [0.0, 0.5, 1.0] {
        let ab = star(&g10, &g01, &eta, hbar)?;
        let ba = star(&g01, &g10, &eta, hbar)?;
        println!("hbar = {hbar}");
        println!("  g(1,0) * g(0,1) = {}", ab.to_mode_list());
        println!("  g(0,1) * g(1,0) = {}", ba.to_mode_list());
    }

    let a = TrigPoly::parse_mode_list("(1,0):1,0;(0,1):0,-0.5;(2,-1):0.25,0.25", 2)?;
    let unit = TrigPoly::one(2);
    println!("a * 1 == a: {}", star(&a, &unit, &eta, 0.3)? == a);

    let b = TrigPoly::monomial(vec![-1, 1], Complex64::new(0.5, 0.0));
    let lhs = involution(&star(&a, &b, &eta, 0.3)?);
    let rhs = star(&involution(&b), &involution(&a), &eta, 0.3)?;
    println!("(a * b)^* - b^* * a^* = {:.2e}", lhs.max_abs_diff(&rhs)?);

    println!("{{g(1,0), g(0,1)}} = {}", poisson_bracket_const(&g10, &g01, &eta)?.to_mode_list());
    Ok(())
}
