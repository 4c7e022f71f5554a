//! Solve the radial Ginzburg-Landau profile for a few `(N, k)` pairs and
//! print the amplitude, residual and far-field error.

use std::time::Instant;

use isoparam::profile::{eval_profile, far_field, solve_profile, ProfileOptions};

fn main() -> isoparam::Result<()> {
    for (n, k) in [(3, 1), (6, 3), (8, 5)] {
        let start = Instant::now();
        let prof = solve_profile(n, k, &ProfileOptions::default())?;
        let meta = prof.meta()?;
        println!(
            "N={n} k={k}: a={:.12e} (bisection {:.12e}), residual={:.2e}, far-field error={:.2e}, reach={:.1}, {:.2?}",
            meta.a,
            meta.a_bisection,
            meta.residual_sup,
            meta.far_field_error,
            meta.shooting_reach,
            start.elapsed()
        );
        for r in [0.5, 1.0, 2.0, 5.0, 10.0, 25.0, 50.0] {
            println!("  h({r:>4}) = {:.10}   far field {:.10}", eval_profile(&prof, r)?, far_field(n, k, r));
        }
    }
    Ok(())
}
