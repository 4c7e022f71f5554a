//! Sampled check of the Cartan-Münzner identities and of harmonicity of the
//! gradient map, including the perturbed quartic as a negative control.

use isoparam::cartan_munzner::verify_family;
use isoparam::catalog::catalog;
use isoparam::Family;

fn main() -> isoparam::Result<()> {
    let mut families = catalog();
    families.push(Family::perturbed_quartic(2.1));
    for fam in families {
        let rep = verify_family(&fam, 1000, 42, 1e-9)?;
        let r = rep.residuals;
        println!(
            "{:<10} euler {:.1e}  |grad F|^2 {:.1e}  Lap F {:.1e}  harmonicity {:.1e}  energy spread {:.1e}  -> {}",
            rep.family,
            r.euler,
            r.eq11,
            r.eq12,
            r.harmonicity,
            r.energy,
            if rep.pass { "pass" } else { "FAIL" }
        );
    }
    Ok(())
}
