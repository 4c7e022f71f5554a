//! The gradient map sends the level `f = cos(g tau)` to `f = cos(g(1-g) tau)`
//! and fixes (or reverses) the focal sets.

use isoparam::catalog::catalog;
use isoparam::geometry::{add, distance, norm};
use isoparam::gradient_map::{flow_to_bottom_focal, flow_to_top_focal, level_map_residual, level_of, phi};
use isoparam::sampling::sphere_point;

fn main() -> isoparam::Result<()> {
    for fam in catalog() {
        let mut worst: f64 = 0.0;
        for i in 0..1000 {
            worst = worst.max(level_map_residual(&fam, &sphere_point(fam.d, 42, i))?);
        }
        let p = sphere_point(fam.d, 42, 5000);
        let top = flow_to_top_focal(&fam, &p)?;
        let bottom = flow_to_bottom_focal(&fam, &p)?;
        let image = phi(&fam, &bottom)?;
        let bottom_note = if fam.g % 2 == 0 {
            format!("|Phi(q) + q| = {:.1e}", norm(&add(&image, &bottom)))
        } else {
            format!("f(Phi(q)) = {:.12}", level_of(&fam, &image)?.s)
        };
        println!(
            "{:<5} max level-law residual {:.1e}; on f=1 |Phi(p) - p| = {:.1e}; on f=-1 {bottom_note}",
            fam.id.to_string(),
            worst,
            distance(&phi(&fam, &top)?, &top),
        );
    }
    Ok(())
}
