//! Closed-form isoparametric polynomials with hand-derived gradients and
//! Laplacians.
//!
//! Coordinates are packed as follows:
//! - `g2:m`: `(x, y)` in `R^{m+1} x R^{m+1}`, `F = |x|^2 - |y|^2`.
//! - `g3m1`: `(x, y, X, Y, Z)`, the Cartan cubic on `R^5`.
//! - `g4m1`: `(x, y)` in `R^3 x R^3`, `F = (|x|^2+|y|^2)^2 - 2((|x|^2-|y|^2)^2 + 4<x,y>^2)`.
//! - `g6m1`: `(u, v)` in `H x H`, `F = C o pi` with `C` the Cartan cubic and
//!   `pi` the quadratic Hopf map of [`crate::quaternion::hopf_pi`].

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::dot;
use crate::quaternion::{hopf_pi, Quaternion};

const SQRT3: f64 = 1.732_050_807_568_877_2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FamilyId {
    /// Quadric `|x|^2 - |y|^2` with multiplicity `m`.
    G2(usize),
    G3M1,
    G4M1,
    G6M1,
}

impl fmt::Display for FamilyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyId::G2(m) => write!(f, "g2:{m}"),
            FamilyId::G3M1 => f.write_str("g3m1"),
            FamilyId::G4M1 => f.write_str("g4m1"),
            FamilyId::G6M1 => f.write_str("g6m1"),
        }
    }
}

impl FromStr for FamilyId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "g2" => Ok(FamilyId::G2(1)),
            "g3m1" => Ok(FamilyId::G3M1),
            "g4m1" => Ok(FamilyId::G4M1),
            "g6m1" => Ok(FamilyId::G6M1),
            _ => {
                let m = s
                    .strip_prefix("g2:")
                    .and_then(|m| m.parse::<usize>().ok())
                    .filter(|&m| m >= 1)
                    .ok_or_else(|| Error::Config(format!("unknown family '{s}'")))?;
                Ok(FamilyId::G2(m))
            }
        }
    }
}

impl Serialize for FamilyId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Polynomial {
    Quadric { m: usize },
    Cartan,
    /// `weight` is the coefficient in front of the braces; 2 is isoparametric.
    Quartic { weight: f64 },
    HopfSextic,
}

/// An isoparametric polynomial together with its structural data.
#[derive(Debug, Clone, PartialEq)]
pub struct Family {
    pub id: FamilyId,
    pub g: usize,
    pub m1: usize,
    pub m2: usize,
    pub d: usize,
    polynomial: Polynomial,
}

/// Families with closed forms, in catalog order.
pub fn catalog() -> Vec<Family> {
    [FamilyId::G2(1), FamilyId::G3M1, FamilyId::G4M1, FamilyId::G6M1]
        .into_iter()
        .map(make_family)
        .collect()
}

pub fn make_family(id: FamilyId) -> Family {
    match id {
        FamilyId::G2(m) => Family {
            id,
            g: 2,
            m1: m,
            m2: m,
            d: 2 * m + 2,
            polynomial: Polynomial::Quadric { m },
        },
        FamilyId::G3M1 => Family {
            id,
            g: 3,
            m1: 1,
            m2: 1,
            d: 5,
            polynomial: Polynomial::Cartan,
        },
        FamilyId::G4M1 => Family {
            id,
            g: 4,
            m1: 1,
            m2: 1,
            d: 6,
            polynomial: Polynomial::Quartic { weight: 2.0 },
        },
        FamilyId::G6M1 => Family {
            id,
            g: 6,
            m1: 1,
            m2: 1,
            d: 8,
            polynomial: Polynomial::HopfSextic,
        },
    }
}

impl Family {
    /// Parse a CLI identifier and build the family.
    pub fn parse(s: &str) -> Result<Family> {
        s.parse().map(make_family)
    }

    /// The `g4m1` quartic with the weight 2 replaced by `weight`. Not
    /// isoparametric unless `weight == 2`; used as a negative control.
    pub fn perturbed_quartic(weight: f64) -> Family {
        Family {
            polynomial: Polynomial::Quartic { weight },
            ..make_family(FamilyId::G4M1)
        }
    }

    pub fn is_perturbed(&self) -> bool {
        matches!(self.polynomial, Polynomial::Quartic { weight } if weight != 2.0)
    }

    /// Identifier plus perturbation, if any.
    pub fn label(&self) -> String {
        match self.polynomial {
            Polynomial::Quartic { weight } if weight != 2.0 => format!("{}~{weight}", self.id),
            _ => self.id.to_string(),
        }
    }

    /// Sphere dimension `n + 1 = d - 1`.
    pub fn sphere_dim(&self) -> usize {
        self.d - 1
    }

    fn check(&self, x: &[f64]) -> Result<()> {
        if x.len() == self.d {
            Ok(())
        } else {
            Err(Error::Shape {
                expected: self.d,
                got: x.len(),
            })
        }
    }

    pub fn eval_f(&self, x: &[f64]) -> Result<f64> {
        self.check(x)?;
        Ok(match self.polynomial {
            Polynomial::Quadric { m } => {
                let (a, b) = x.split_at(m + 1);
                dot(a, a) - dot(b, b)
            }
            Polynomial::Cartan => cartan_cubic(x),
            Polynomial::Quartic { weight } => {
                let (a, b) = x.split_at(3);
                let (aa, bb, ab) = (dot(a, a), dot(b, b), dot(a, b));
                (aa + bb).powi(2) - weight * ((aa - bb).powi(2) + 4.0 * ab * ab)
            }
            Polynomial::HopfSextic => {
                let (u, v) = split_quaternions(x);
                cartan_cubic(&hopf_pi(u, v))
            }
        })
    }

    pub fn eval_grad(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check(x)?;
        Ok(match self.polynomial {
            Polynomial::Quadric { m } => x
                .iter()
                .enumerate()
                .map(|(i, c)| if i <= m { 2.0 * c } else { -2.0 * c })
                .collect(),
            Polynomial::Cartan => cartan_cubic_grad(x).to_vec(),
            Polynomial::Quartic { weight } => {
                let (a, b) = x.split_at(3);
                let (aa, bb, ab) = (dot(a, a), dot(b, b), dot(a, b));
                let s = 4.0 * (aa + bb);
                let t = 4.0 * weight * (aa - bb);
                let c = 8.0 * weight * ab;
                let mut g = Vec::with_capacity(6);
                g.extend((0..3).map(|i| (s - t) * a[i] - c * b[i]));
                g.extend((0..3).map(|i| (s + t) * b[i] - c * a[i]));
                g
            }
            Polynomial::HopfSextic => {
                // grad (C o pi) = Dpi^T grad C(pi):
                //   d/du = 2 w0 u + 2 w' v,   d/dv = -2 w0 v + 2 conj(w') u
                let (u, v) = split_quaternions(x);
                let w = cartan_cubic_grad(&hopf_pi(u, v));
                let wq = Quaternion::from_slice(&w[1..]);
                let du = u.scale(2.0 * w[0]) + (wq * v).scale(2.0);
                let dv = v.scale(-2.0 * w[0]) + (wq.conj() * u).scale(2.0);
                du.to_array().into_iter().chain(dv.to_array()).collect()
            }
        })
    }

    pub fn eval_laplacian(&self, x: &[f64]) -> Result<f64> {
        self.check(x)?;
        Ok(match self.polynomial {
            // 2(m+1) - 2(m+1)
            Polynomial::Quadric { .. } => 0.0,
            // 6x - 6x + (3x + 3 sqrt3 y) + (3x - 3 sqrt3 y) - 6x
            Polynomial::Cartan => 0.0,
            Polynomial::Quartic { weight } => {
                let (a, b) = x.split_at(3);
                (32.0 - 16.0 * weight) * (dot(a, a) + dot(b, b))
            }
            // Dpi Dpi^T = 4|x|^2 I and every component of pi is harmonic, so
            // Lap(C o pi) = 4|x|^2 (Lap C)(pi) = 0.
            Polynomial::HopfSextic => 0.0,
        })
    }

    /// Right-hand side of `|grad F|^2 = g^2 |x|^{2g-2}`.
    pub fn gradient_norm_law(&self, r: f64) -> f64 {
        let g = self.g as f64;
        g * g * r.powi(2 * self.g as i32 - 2)
    }

    /// Right-hand side of `Lap F = (g^2/2)(m2 - m1)|x|^{g-2}`.
    pub fn laplacian_law(&self, r: f64) -> f64 {
        let g = self.g as f64;
        0.5 * g * g * (self.m2 as f64 - self.m1 as f64) * r.powi(self.g as i32 - 2)
    }
}

fn split_quaternions(x: &[f64]) -> (Quaternion, Quaternion) {
    (Quaternion::from_slice(&x[..4]), Quaternion::from_slice(&x[4..8]))
}

/// Cartan's isoparametric cubic on `R^5`, variables `(x, y, X, Y, Z)`.
pub fn cartan_cubic(p: &[f64]) -> f64 {
    let [x, y, xx, yy, zz] = [p[0], p[1], p[2], p[3], p[4]];
    x * x * x - 3.0 * x * y * y
        + 1.5 * x * (xx * xx + yy * yy - 2.0 * zz * zz)
        + 1.5 * SQRT3 * y * (xx * xx - yy * yy)
        + 3.0 * SQRT3 * xx * yy * zz
}

pub fn cartan_cubic_grad(p: &[f64]) -> [f64; 5] {
    let [x, y, xx, yy, zz] = [p[0], p[1], p[2], p[3], p[4]];
    [
        3.0 * x * x - 3.0 * y * y + 1.5 * (xx * xx + yy * yy - 2.0 * zz * zz),
        -6.0 * x * y + 1.5 * SQRT3 * (xx * xx - yy * yy),
        3.0 * x * xx + 3.0 * SQRT3 * (y * xx + yy * zz),
        3.0 * x * yy + 3.0 * SQRT3 * (xx * zz - y * yy),
        -6.0 * x * zz + 3.0 * SQRT3 * xx * yy,
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{fd_gradient, fd_laplacian, norm, scale};
    use crate::sampling::ball_point;

    #[test]
    fn structural_data() {
        let f = make_family(FamilyId::G4M1);
        assert_eq!((f.g, f.m1, f.m2, f.d), (4, 1, 1, 6));
        let f = make_family(FamilyId::G6M1);
        assert_eq!((f.g, f.m1, f.m2, f.d), (6, 1, 1, 8));
        let f = make_family(FamilyId::G2(1));
        assert_eq!((f.g, f.m1, f.m2, f.d), (2, 1, 1, 4));
        let f = make_family(FamilyId::G3M1);
        assert_eq!((f.g, f.m1, f.m2, f.d), (3, 1, 1, 5));
        for f in catalog().into_iter().filter(|f| f.g > 2) {
            assert_eq!(f.d, f.g * f.m1 + 2);
        }
    }

    #[test]
    fn identifiers_round_trip() {
        for s in ["g2:1", "g2:3", "g3m1", "g4m1", "g6m1"] {
            assert_eq!(Family::parse(s).unwrap().id.to_string(), s);
        }
        assert_eq!("g2".parse::<FamilyId>().unwrap(), FamilyId::G2(1));
        for bad in ["g9m1", "g2:0", "g2:x", ""] {
            assert!(matches!(Family::parse(bad), Err(Error::Config(_))), "{bad}");
        }
    }

    #[test]
    fn hand_evaluations() {
        let q = make_family(FamilyId::G4M1);
        assert_eq!(q.eval_f(&[1.0, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap(), -1.0);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((q.eval_f(&[h, 0.0, 0.0, 0.0, h, 0.0]).unwrap() - 1.0).abs() < 1e-15);
        let c = make_family(FamilyId::G3M1);
        assert_eq!(c.eval_f(&[1.0, 0.0, 0.0, 0.0, 0.0]).unwrap(), 1.0);
        assert_eq!(
            q.eval_grad(&[1.0, 0.0, 0.0, 0.0, 0.0, 0.0]).unwrap(),
            vec![-4.0, 0.0, 0.0, 0.0, 0.0, 0.0]
        );
        let quad = make_family(FamilyId::G2(2));
        let x = [1.0, 2.0, 3.0, -1.0, 0.5, 4.0];
        assert_eq!(quad.eval_grad(&x).unwrap(), vec![2.0, 4.0, 6.0, 2.0, -1.0, -8.0]);
        assert_eq!(quad.eval_laplacian(&x).unwrap(), 0.0);
    }

    #[test]
    fn dimension_mismatch_is_a_shape_error() {
        let q = make_family(FamilyId::G4M1);
        assert_eq!(
            q.eval_f(&[1.0; 5]).unwrap_err(),
            Error::Shape { expected: 6, got: 5 }
        );
        assert!(q.eval_grad(&[1.0; 7]).is_err());
        assert!(q.eval_laplacian(&[]).is_err());
    }

    #[test]
    fn analytic_gradients_match_finite_differences() {
        let mut fams = catalog();
        fams.push(make_family(FamilyId::G2(3)));
        fams.push(Family::perturbed_quartic(2.1));
        for fam in fams {
            for i in 0..100 {
                let x = ball_point(fam.d, 2.0, 11, i);
                let fd = fd_gradient(|y| fam.eval_f(y).unwrap(), &x, 1e-5).unwrap();
                let an = fam.eval_grad(&x).unwrap();
                let err = norm(&crate::geometry::sub(&fd, &an));
                let bound = 1e-6 * norm(&x).powi(fam.g as i32 - 1).max(1.0);
                assert!(err <= bound, "{} err {err:e} at {x:?}", fam.label());
            }
        }
    }

    #[test]
    fn analytic_laplacians_match_finite_differences() {
        let mut fams = catalog();
        fams.push(Family::perturbed_quartic(2.1));
        for fam in fams {
            for i in 0..50 {
                let x = ball_point(fam.d, 2.0, 12, i);
                let fd = fd_laplacian(|y| fam.eval_f(y).unwrap(), &x, 1e-4).unwrap();
                let an = fam.eval_laplacian(&x).unwrap();
                assert!((fd - an).abs() < 1e-5 * norm(&x).powi(fam.g as i32 - 2).max(1.0),
                    "{}: fd {fd} analytic {an}", fam.label());
            }
        }
    }

    #[test]
    fn homogeneity_and_euler_identity() {
        for fam in catalog() {
            for i in 0..200 {
                let x = ball_point(fam.d, 2.0, 13, i);
                let fx = fam.eval_f(&x).unwrap();
                for lam in [0.5f64, 2.0, -1.0] {
                    let want = lam.powi(fam.g as i32) * fx;
                    let got = fam.eval_f(&scale(&x, lam)).unwrap();
                    assert!((got - want).abs() <= 1e-10 * want.abs().max(1.0));
                }
                let euler = dot(&x, &fam.eval_grad(&x).unwrap()) - fam.g as f64 * fx;
                assert!(euler.abs() <= 1e-9 * norm(&x).powi(fam.g as i32).max(1.0));
            }
        }
    }

    #[test]
    fn sextic_is_the_cartan_cubic_through_the_hopf_map() {
        let fam = make_family(FamilyId::G6M1);
        for i in 0..100 {
            let x = ball_point(8, 2.0, 14, i);
            let (u, v) = split_quaternions(&x);
            let direct = cartan_cubic(&hopf_pi(u, v));
            assert!((fam.eval_f(&x).unwrap() - direct).abs() <= 1e-12);
        }
    }
}
