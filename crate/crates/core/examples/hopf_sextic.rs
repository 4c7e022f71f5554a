//! The degree-six polynomial on R^8 is the Cartan cubic composed with the
//! quaternionic Hopf map.

use isoparam::catalog::cartan_cubic;
use isoparam::geometry::norm;
use isoparam::quaternion::{hopf_pi, Quaternion};
use isoparam::sampling::ball_point;
use isoparam::{make_family, FamilyId};

fn main() -> isoparam::Result<()> {
    let fam = make_family(FamilyId::G6M1);
    let i = Quaternion::new(0.0, 1.0, 0.0, 0.0);
    let j = Quaternion::new(0.0, 0.0, 1.0, 0.0);
    println!("i j = {:?}, j i = {:?}", (i * j).to_array(), (j * i).to_array());
    for s in 0..5 {
        let x = ball_point(8, 1.5, 3, s);
        let image = hopf_pi(Quaternion::from_slice(&x[..4]), Quaternion::from_slice(&x[4..]));
        println!(
            "|pi(x)| = {:.12}  |x|^2 = {:.12}  F(x) - C(pi(x)) = {:+.1e}",
            norm(&image),
            norm(&x).powi(2),
            fam.eval_f(&x)? - cartan_cubic(&image)
        );
    }
    Ok(())
}
