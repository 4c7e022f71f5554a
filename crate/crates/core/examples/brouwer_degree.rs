//! Brouwer degree of the gradient map by signed preimage counting, next to
//! the closed form.

use isoparam::catalog::catalog;
use isoparam::degree::{degree_numeric, harmonic_table};
use isoparam::gradient_map::{preimages, sample_regular_value};
use isoparam::Family;

fn main() -> isoparam::Result<()> {
    let mut families = catalog();
    families.insert(1, Family::parse("g2:2")?);
    for fam in &families {
        let rep = degree_numeric(fam, 42, 20)?;
        let signs: Vec<i32> = rep.trials[0].preimages.iter().map(|q| q.sign_numeric).collect();
        println!(
            "{:<5} preimage signs by band {:?}  numeric degree {:+}  closed form {:+}",
            rep.family, signs, rep.degree_numeric, rep.degree_closed_form
        );
    }

    // One regular value of the sextic in detail.
    let fam = isoparam::make_family(isoparam::FamilyId::G6M1);
    let (p, _) = sample_regular_value(&fam, 7, 0, 1000)?;
    for q in preimages(&fam, &p)? {
        println!(
            "band {}  tau {:.6}  seed residual {:.1e}  polished {:.1e} in {} Newton steps",
            q.level.band, q.level.tau, q.seed_residual, q.residual, q.newton_iterations
        );
    }

    println!("\n g  m  degree");
    for row in harmonic_table() {
        println!("{:>2} {:>2} {:>7}  {}", row.g, row.m, row.degree, row.family.unwrap_or_default());
    }
    Ok(())
}
