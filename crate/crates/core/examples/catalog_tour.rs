//! Evaluate each closed-form polynomial at a sample point and show the
//! structure constants of its family.

use isoparam::catalog::catalog;
use isoparam::geometry::{dot, norm};
use isoparam::sampling::ball_point;

fn main() -> isoparam::Result<()> {
    for fam in catalog() {
        let x = ball_point(fam.d, 2.0, 1, 0);
        let grad = fam.eval_grad(&x)?;
        println!(
            "{:<5} g={} (m1, m2)=({}, {}) in R^{}  F(x)={:+.6}  |grad F|^2={:.6} vs g^2|x|^(2g-2)={:.6}  Lap F={:.3}",
            fam.id.to_string(),
            fam.g,
            fam.m1,
            fam.m2,
            fam.d,
            fam.eval_f(&x)?,
            dot(&grad, &grad),
            fam.gradient_norm_law(norm(&x)),
            fam.eval_laplacian(&x)?,
        );
    }
    // Larger quadrics are available by identifier.
    let q = isoparam::Family::parse("g2:3")?;
    println!("{}: R^{}, m1 = {}", q.label(), q.d, q.m1);
    Ok(())
}
