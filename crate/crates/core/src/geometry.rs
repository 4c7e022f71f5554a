//! Dimension-generic vector and sphere primitives, plus the central
//! finite-difference operators used as independent oracles for the
//! hand-derived gradients and Laplacians.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Tolerance on `| |p| - 1 |` for a point to count as spherical.
pub const SPHERE_TOL: f64 = 1e-12;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

/// `a + s * b`
pub fn axpy(a: &[f64], s: f64, b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + s * y).collect()
}

pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    norm(&sub(a, b))
}

pub fn normalize(a: &[f64]) -> Vec<f64> {
    scale(a, 1.0 / norm(a))
}

pub fn unit_vector(d: usize, i: usize) -> Vec<f64> {
    let mut e = vec![0.0; d];
    e[i] = 1.0;
    e
}

/// Component of `v` orthogonal to the unit vector `p`.
pub fn project_tangent(p: &[f64], v: &[f64]) -> Vec<f64> {
    axpy(v, -dot(p, v), p)
}

pub fn is_spherical(p: &[f64]) -> bool {
    (norm(p) - 1.0).abs() <= SPHERE_TOL
}

fn check_spherical(p: &[f64]) -> Result<()> {
    if p.len() < 2 {
        return Err(Error::Domain(format!("dimension {} < 2", p.len())));
    }
    if !is_spherical(p) {
        return Err(Error::Domain(format!("|p| = {} is not 1", norm(p))));
    }
    Ok(())
}

/// Default gradient step, `1e-5 * max(1, |x|)`.
pub fn gradient_step(x: &[f64]) -> f64 {
    1e-5 * norm(x).max(1.0)
}

/// Default Laplacian step, `1e-4 * max(1, |x|)`.
pub fn laplacian_step(x: &[f64]) -> f64 {
    1e-4 * norm(x).max(1.0)
}

fn eval_checked<F: Fn(&[f64]) -> f64>(f: &F, x: &[f64]) -> Result<f64> {
    let v = f(x);
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Evaluation { point: x.to_vec() })
    }
}

fn check_step(step: f64) -> Result<()> {
    if step > 0.0 && step.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("finite-difference step {step} must be positive")))
    }
}

/// Central-difference gradient of a scalar field.
pub fn fd_gradient<F: Fn(&[f64]) -> f64>(f: F, x: &[f64], step: f64) -> Result<Vec<f64>> {
    check_step(step)?;
    let mut xp = x.to_vec();
    let mut out = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        xp[i] = x[i] + step;
        let fp = eval_checked(&f, &xp)?;
        xp[i] = x[i] - step;
        let fm = eval_checked(&f, &xp)?;
        xp[i] = x[i];
        out.push((fp - fm) / (2.0 * step));
    }
    Ok(out)
}

/// Central-difference Laplacian (sum of second differences along the axes).
pub fn fd_laplacian<F: Fn(&[f64]) -> f64>(f: F, x: &[f64], step: f64) -> Result<f64> {
    check_step(step)?;
    let f0 = eval_checked(&f, x)?;
    let mut xp = x.to_vec();
    let mut total = 0.0;
    for i in 0..x.len() {
        xp[i] = x[i] + step;
        let fp = eval_checked(&f, &xp)?;
        xp[i] = x[i] - step;
        let fm = eval_checked(&f, &xp)?;
        xp[i] = x[i];
        total += (fp - 2.0 * f0 + fm) / (step * step);
    }
    Ok(total)
}

/// One Richardson level on top of [`fd_gradient`]: `(4 D(step/2) - D(step)) / 3`.
pub fn fd_gradient_richardson<F: Fn(&[f64]) -> f64>(
    f: F,
    x: &[f64],
    step: f64,
) -> Result<Vec<f64>> {
    let coarse = fd_gradient(&f, x, step)?;
    let fine = fd_gradient(&f, x, step / 2.0)?;
    Ok(fine
        .iter()
        .zip(&coarse)
        .map(|(a, b)| (4.0 * a - b) / 3.0)
        .collect())
}

/// One Richardson level on top of [`fd_laplacian`].
pub fn fd_laplacian_richardson<F: Fn(&[f64]) -> f64>(f: F, x: &[f64], step: f64) -> Result<f64> {
    let coarse = fd_laplacian(&f, x, step)?;
    let fine = fd_laplacian(&f, x, step / 2.0)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

/// Central-difference Jacobian of a vector field; column `j` is `dG/dx_j`.
pub fn fd_jacobian<G: Fn(&[f64]) -> Vec<f64>>(g: G, x: &[f64], step: f64) -> Result<DMatrix<f64>> {
    check_step(step)?;
    let d = x.len();
    let mut xp = x.to_vec();
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(d);
    for j in 0..d {
        xp[j] = x[j] + step;
        let gp = g(&xp);
        xp[j] = x[j] - step;
        let gm = g(&xp);
        xp[j] = x[j];
        if gp.iter().chain(&gm).any(|v| !v.is_finite()) {
            return Err(Error::Evaluation { point: x.to_vec() });
        }
        cols.push(gp.iter().zip(&gm).map(|(a, b)| (a - b) / (2.0 * step)).collect());
    }
    let rows = cols.first().map_or(0, Vec::len);
    Ok(DMatrix::from_fn(rows, d, |i, j| cols[j][i]))
}

/// Orthonormal basis of the tangent space `T_p S^{d-1}`, oriented so that
/// `det[vectors..., base] = +1`.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentFrame {
    pub base: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

impl TangentFrame {
    pub fn dim(&self) -> usize {
        self.base.len()
    }

    /// `d x (d-1)` matrix whose columns are the frame vectors.
    pub fn matrix(&self) -> DMatrix<f64> {
        let d = self.dim();
        DMatrix::from_fn(d, d - 1, |i, j| self.vectors[j][i])
    }

    /// `det[vectors..., base]`.
    pub fn orientation(&self) -> f64 {
        let d = self.dim();
        DMatrix::from_fn(d, d, |i, j| {
            if j + 1 < d {
                self.vectors[j][i]
            } else {
                self.base[i]
            }
        })
        .determinant()
    }

    /// Coordinates of a tangent vector in this frame.
    pub fn coordinates(&self, v: &[f64]) -> Vec<f64> {
        self.vectors.iter().map(|e| dot(e, v)).collect()
    }

    /// Largest violation of the frame invariants, or `None` if all hold.
    pub fn invariant_violation(&self) -> Option<String> {
        let tol = 1e-12;
        if self.vectors.len() + 1 != self.dim() {
            return Some(format!("{} vectors for dimension {}", self.vectors.len(), self.dim()));
        }
        for (i, v) in self.vectors.iter().enumerate() {
            if (norm(v) - 1.0).abs() > tol {
                return Some(format!("vector {i} has norm {}", norm(v)));
            }
            if dot(v, &self.base).abs() > tol {
                return Some(format!("vector {i} not orthogonal to base"));
            }
            for (j, w) in self.vectors.iter().enumerate().skip(i + 1) {
                if dot(v, w).abs() > tol {
                    return Some(format!("vectors {i} and {j} not orthogonal"));
                }
            }
        }
        let det = self.orientation();
        if (det - 1.0).abs() > 1e-9 {
            return Some(format!("orientation determinant {det}"));
        }
        None
    }
}

/// Deterministic oriented tangent frame at a spherical point.
///
/// Gram-Schmidt (two passes) over the standard basis with the basis vector
/// most parallel to `p` skipped; the last vector is flipped if needed so the
/// frame followed by the outward radial is positively oriented.
pub fn tangent_frame(p: &[f64]) -> Result<TangentFrame> {
    check_spherical(p)?;
    let d = p.len();
    let skip = (0..d)
        .max_by(|&a, &b| p[a].abs().total_cmp(&p[b].abs()))
        .unwrap_or(0);
    let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(d - 1);
    for i in (0..d).filter(|&i| i != skip) {
        let mut v = unit_vector(d, i);
        for _ in 0..2 {
            v = project_tangent(p, &v);
            for e in &vectors {
                v = axpy(&v, -dot(e, &v), e);
            }
        }
        vectors.push(normalize(&v));
    }
    let mut frame = TangentFrame {
        base: p.to_vec(),
        vectors,
    };
    if frame.orientation() < 0.0 {
        let last = frame.vectors.last_mut().expect("d >= 2");
        last.iter_mut().for_each(|c| *c = -*c);
    }
    Ok(frame)
}

/// Point at angle `s` along the great circle through `p` with unit tangent `v`.
pub fn circle_point(p: &[f64], v: &[f64], s: f64) -> Vec<f64> {
    let (sn, cs) = s.sin_cos();
    p.iter().zip(v).map(|(a, b)| cs * a + sn * b).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::sphere_point;
    use std::f64::consts::PI;

    fn sq(x: &[f64]) -> f64 {
        dot(x, x)
    }

    #[test]
    fn gradient_of_quadratic_is_exact() {
        let g = fd_gradient(sq, &[1.0, 2.0], 1e-5).unwrap();
        assert!((g[0] - 2.0).abs() < 1e-8 && (g[1] - 4.0).abs() < 1e-8);
    }

    #[test]
    fn gradient_of_constant_is_zero() {
        let g = fd_gradient(|_| 3.5, &[0.3, -1.0, 2.0], 1e-5).unwrap();
        assert!(g.iter().all(|&c| c == 0.0));
    }

    #[test]
    fn laplacian_of_quadratic_and_linear() {
        for d in 2..7 {
            let x: Vec<f64> = (0..d).map(|i| 0.1 * i as f64 - 0.2).collect();
            assert!((fd_laplacian(sq, &x, 1e-4).unwrap() - 2.0 * d as f64).abs() < 1e-6);
            let lin = |y: &[f64]| 3.0 * y[0] - 2.0 * y[d - 1];
            assert!(fd_laplacian(lin, &x, 1e-4).unwrap().abs() < 1e-6);
        }
    }

    #[test]
    fn richardson_improves_cubic() {
        let f = |x: &[f64]| x[0].powi(5);
        let exact = 5.0 * 1.3f64.powi(4);
        let plain = fd_gradient(f, &[1.3], 1e-2).unwrap()[0];
        let rich = fd_gradient_richardson(f, &[1.3], 1e-2).unwrap()[0];
        assert!((rich - exact).abs() < (plain - exact).abs() / 100.0);
        let lap = fd_laplacian_richardson(f, &[1.3], 1e-2).unwrap();
        assert!((lap - 20.0 * 1.3f64.powi(3)).abs() < 1e-6);
    }

    #[test]
    fn non_finite_values_are_reported_with_the_point() {
        let err = fd_laplacian(|x: &[f64]| (x[0] - 1.0).ln(), &[1.0, 0.0], 1e-4).unwrap_err();
        assert_eq!(err, Error::Evaluation { point: vec![1.0, 0.0] });
        assert!(fd_gradient(sq, &[1.0], 0.0).is_err());
    }

    #[test]
    fn jacobian_of_linear_map() {
        let g = |x: &[f64]| vec![2.0 * x[0] + x[1], -x[1]];
        let j = fd_jacobian(g, &[0.4, 0.9], 1e-5).unwrap();
        let want = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 0.0, -1.0]);
        assert!((j - want).norm() < 1e-9);
    }

    #[test]
    fn frame_at_first_axis() {
        let f = tangent_frame(&[1.0, 0.0, 0.0]).unwrap();
        assert!(f.invariant_violation().is_none());
        for v in &f.vectors {
            assert!(v[0].abs() < 1e-15);
        }
    }

    #[test]
    fn frames_at_antipodes_are_oriented() {
        for i in 0..50 {
            let p = sphere_point(5, 9, i);
            let q = scale(&p, -1.0);
            for x in [p, q] {
                let f = tangent_frame(&x).unwrap();
                assert!(f.invariant_violation().is_none(), "{:?}", f.invariant_violation());
            }
        }
    }

    #[test]
    fn frame_rejects_off_sphere_points() {
        assert!(tangent_frame(&[1.0, 1.0]).is_err());
        assert!(tangent_frame(&[1.0]).is_err());
    }

    #[test]
    fn circle_point_cases() {
        let e1 = [1.0, 0.0, 0.0];
        let e2 = [0.0, 1.0, 0.0];
        let q = circle_point(&e1, &e2, PI / 2.0);
        assert!(distance(&q, &e2) < 1e-15);
        assert_eq!(circle_point(&e1, &e2, 0.0), e1.to_vec());
        assert!(distance(&circle_point(&e1, &e2, PI), &[-1.0, 0.0, 0.0]) < 1e-15);
    }
}
