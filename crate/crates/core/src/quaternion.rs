//! Real quaternions with the Hamilton product (`ij = k`), stored as `(w, i, j, k)`.

use std::ops::{Add, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Quaternion {
    pub w: f64,
    pub i: f64,
    pub j: f64,
    pub k: f64,
}

impl Quaternion {
    pub const fn new(w: f64, i: f64, j: f64, k: f64) -> Self {
        Self { w, i, j, k }
    }

    pub fn from_slice(c: &[f64]) -> Self {
        Self::new(c[0], c[1], c[2], c[3])
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.w, self.i, self.j, self.k]
    }

    pub fn conj(self) -> Self {
        Self::new(self.w, -self.i, -self.j, -self.k)
    }

    pub fn norm_sqr(self) -> f64 {
        self.w * self.w + self.i * self.i + self.j * self.j + self.k * self.k
    }

    pub fn norm(self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(self, s: f64) -> Self {
        Self::new(s * self.w, s * self.i, s * self.j, s * self.k)
    }
}

impl Mul for Quaternion {
    type Output = Quaternion;

    fn mul(self, r: Quaternion) -> Quaternion {
        let l = self;
        Quaternion::new(
            l.w * r.w - l.i * r.i - l.j * r.j - l.k * r.k,
            l.w * r.i + l.i * r.w + l.j * r.k - l.k * r.j,
            l.w * r.j - l.i * r.k + l.j * r.w + l.k * r.i,
            l.w * r.k + l.i * r.j - l.j * r.i + l.k * r.w,
        )
    }
}

impl Add for Quaternion {
    type Output = Quaternion;

    fn add(self, r: Quaternion) -> Quaternion {
        Quaternion::new(self.w + r.w, self.i + r.i, self.j + r.j, self.k + r.k)
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;

    fn sub(self, r: Quaternion) -> Quaternion {
        Quaternion::new(self.w - r.w, self.i - r.i, self.j - r.j, self.k - r.k)
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;

    fn neg(self) -> Quaternion {
        self.scale(-1.0)
    }
}

/// Quadratic Hopf map `R^8 -> R^5`, `(u, v) -> (|u|^2 - |v|^2, 2 u conj(v))`.
///
/// The last four components are `2 u conj(v)` in `(w, i, j, k)` order.
pub fn hopf_pi(u: Quaternion, v: Quaternion) -> [f64; 5] {
    let q = (u * v.conj()).scale(2.0);
    [u.norm_sqr() - v.norm_sqr(), q.w, q.i, q.j, q.k]
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const I: Quaternion = Quaternion::new(0.0, 1.0, 0.0, 0.0);
    const J: Quaternion = Quaternion::new(0.0, 0.0, 1.0, 0.0);
    const K: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 1.0);
    const ONE: Quaternion = Quaternion::new(1.0, 0.0, 0.0, 0.0);

    #[test]
    fn hamilton_units() {
        assert_eq!(I * J, K);
        assert_eq!(J * K, I);
        assert_eq!(K * I, J);
        assert_eq!(J * I, -K);
        assert_eq!(I * I, -ONE);
    }

    #[test]
    fn hopf_examples() {
        let zero = Quaternion::default();
        assert_eq!(hopf_pi(ONE, zero), [1.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(hopf_pi(ONE, ONE), [0.0, 2.0, 0.0, 0.0, 0.0]);
    }

    fn quat() -> impl Strategy<Value = Quaternion> {
        prop::array::uniform4(-2.0f64..2.0).prop_map(|c| Quaternion::from_slice(&c))
    }

    proptest! {
        #[test]
        fn product_is_multiplicative_in_norm(a in quat(), b in quat()) {
            prop_assert!(((a * b).norm() - a.norm() * b.norm()).abs() <= 1e-12 * (1.0 + a.norm() * b.norm()));
        }

        #[test]
        fn conjugate_gives_norm(a in quat()) {
            let p = a * a.conj();
            prop_assert!((p.w - a.norm_sqr()).abs() <= 1e-12 * (1.0 + a.norm_sqr()));
            prop_assert!(p.i.abs() <= 1e-12 && p.j.abs() <= 1e-12 && p.k.abs() <= 1e-12);
        }

        #[test]
        fn hopf_preserves_squared_norm(u in quat(), v in quat()) {
            let p = hopf_pi(u, v);
            let n = p.iter().map(|c| c * c).sum::<f64>().sqrt();
            prop_assert!((n - (u.norm_sqr() + v.norm_sqr())).abs() <= 1e-12 * (1.0 + n));
        }
    }
}
