//! Energy density of the restricted gradient map against the eigenvalue
//! `k(k + d - 2)` of degree-`k` spherical harmonics, `k = g - 1`.

use isoparam::cartan_munzner::{component_laplacian, eigenmap_energy, energy_density};
use isoparam::catalog::catalog;
use isoparam::sampling::sphere_point;
use isoparam::Family;

fn main() -> isoparam::Result<()> {
    let mut families = catalog();
    families.insert(1, Family::parse("g2:2")?);
    for fam in families {
        let (mut lo, mut hi, mut lap) = (f64::INFINITY, f64::NEG_INFINITY, 0.0f64);
        for i in 0..100 {
            let p = sphere_point(fam.d, 42, i);
            let e = energy_density(&fam, &p)?;
            lo = lo.min(e);
            hi = hi.max(e);
            lap = lap.max(component_laplacian(&fam, &p)?);
        }
        println!(
            "{:<5} energy in [{lo:.8}, {hi:.8}]  expected {}  max |Lap Phi_i| {lap:.1e}",
            fam.label(),
            eigenmap_energy(fam.g - 1, fam.d)
        );
    }
    Ok(())
}
