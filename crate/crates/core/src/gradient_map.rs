//! The gradient map `Phi = grad F / g` restricted to the sphere.
//!
//! On the great circle `c(t)` leaving `p` along the unit normal `xi`, with the
//! circle parameter anchored so that the unfolded collar angle is
//! `pi/(2g) - t`, the map acts as `t -> pi/2 - (g-1) t`. Preimages of a
//! regular value are read off that affine circle map and then polished by a
//! projected Newton iteration.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::catalog::Family;
use crate::error::{Error, Result};
use crate::geometry::{
    circle_point, distance, dot, fd_jacobian, is_spherical, norm, normalize, project_tangent,
    scale, sub, tangent_frame,
};
use crate::sampling::sphere_point;

/// Tolerance on `tau` for the band boundaries (multiples of `pi/(g(g-1))`).
pub const BAND_EDGE_TOL: f64 = 1e-9;
/// Minimum distance in `tau` from any band boundary for a generic regular value.
pub const REGULAR_MARGIN: f64 = 1e-3;
/// Step of the central-difference Jacobian of `Phi`.
pub const JACOBIAN_STEP: f64 = 1e-5;
/// Target `|Phi(q) - p|` after Newton polish.
pub const PREIMAGE_TOL: f64 = 1e-10;

const NEWTON_MAX_ITER: usize = 50;

pub fn phi(fam: &Family, x: &[f64]) -> Result<Vec<f64>> {
    let g = fam.g as f64;
    Ok(scale(&fam.eval_grad(x)?, 1.0 / g))
}

fn phi_unchecked(fam: &Family, x: &[f64]) -> Vec<f64> {
    phi(fam, x).unwrap_or_else(|_| vec![f64::NAN; x.len()])
}

/// Width `pi/(g(g-1))` of a band in the collar angle.
pub fn band_width(g: usize) -> f64 {
    PI / (g * (g - 1)) as f64
}

/// Position of a point in the foliation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LevelCoordinate {
    /// `f(p)` in `[-1, 1]`.
    pub s: f64,
    /// Collar angle `arccos(s) / g` in `[0, pi/g]`.
    pub tau: f64,
    /// `k` with `tau` in `((k-1)w, kw)`, `w = pi/(g(g-1))`, or 0 on a boundary.
    pub band: usize,
}

impl LevelCoordinate {
    pub fn from_level(g: usize, s: f64) -> Self {
        let s = s.clamp(-1.0, 1.0);
        let tau = s.acos() / g as f64;
        let w = band_width(g);
        let q = tau / w;
        let band = if (q - q.round()).abs() * w <= BAND_EDGE_TOL {
            0
        } else {
            q.ceil() as usize
        };
        Self { s, tau, band }
    }

    /// Distance in `tau` to the nearest band boundary.
    pub fn boundary_distance(&self, g: usize) -> f64 {
        let w = band_width(g);
        let q = self.tau / w;
        (q - q.round()).abs() * w
    }
}

fn check_sphere(p: &[f64]) -> Result<()> {
    if is_spherical(p) {
        Ok(())
    } else {
        Err(Error::Domain(format!("|p| = {} is not 1", norm(p))))
    }
}

pub fn level_of(fam: &Family, p: &[f64]) -> Result<LevelCoordinate> {
    check_sphere(p)?;
    let s = fam.eval_f(p)?;
    if !(-1.0 - 1e-9..=1.0 + 1e-9).contains(&s) {
        return Err(Error::CorruptedFamily { s });
    }
    Ok(LevelCoordinate::from_level(fam.g, s))
}

/// Unit normal `xi = grad_S f / (g sin(g tau))` of the level through `p`.
pub fn normal_field(fam: &Family, p: &[f64]) -> Result<Vec<f64>> {
    let level = level_of(fam, p)?;
    let sin_g_tau = (fam.g as f64 * level.tau).sin();
    if sin_g_tau <= 1e-6 {
        return Err(Error::SingularPoint { sin_g_tau });
    }
    let grad_s = project_tangent(p, &fam.eval_grad(p)?);
    // |grad_S f| = g sin(g tau) on the sphere.
    Ok(normalize(&grad_s))
}

/// `|f(Phi(p)) - cos(g(1-g) tau(p))|`.
pub fn level_map_residual(fam: &Family, p: &[f64]) -> Result<f64> {
    let level = level_of(fam, p)?;
    let g = fam.g as f64;
    let image = fam.eval_f(&phi(fam, p)?)?;
    Ok((image - (g * (1.0 - g) * level.tau).cos()).abs())
}

/// Point on the focal set `f = 1` reached by following the normal circle of `p`.
pub fn flow_to_top_focal(fam: &Family, p: &[f64]) -> Result<Vec<f64>> {
    let level = level_of(fam, p)?;
    let xi = normal_field(fam, p)?;
    Ok(circle_point(p, &xi, level.tau))
}

/// Point on the focal set `f = -1` reached by following the normal circle of `p`.
pub fn flow_to_bottom_focal(fam: &Family, p: &[f64]) -> Result<Vec<f64>> {
    let level = level_of(fam, p)?;
    let xi = normal_field(fam, p)?;
    Ok(circle_point(p, &xi, -(PI / fam.g as f64 - level.tau)))
}

/// Tangential differential of `Phi` at `q` in the oriented frames at `q` and
/// `Phi(q)`, plus the image point.
pub fn tangential_jacobian(fam: &Family, q: &[f64]) -> Result<(DMatrix<f64>, Vec<f64>)> {
    check_sphere(q)?;
    let image = phi(fam, q)?;
    let jac = fd_jacobian(|x| phi_unchecked(fam, x), q, JACOBIAN_STEP)?;
    let src = tangent_frame(q)?.matrix();
    let dst = tangent_frame(&normalize(&image))?.matrix();
    Ok((dst.transpose() * jac * src, image))
}

/// Orientation sign of `dPhi` at a regular point.
pub fn jacobian_sign(fam: &Family, q: &[f64]) -> Result<i32> {
    let (m, _) = tangential_jacobian(fam, q)?;
    let det = m.determinant();
    if det.abs() < 1e-8 || !det.is_finite() {
        return Err(Error::NearSingular { det });
    }
    Ok(if det > 0.0 { 1 } else { -1 })
}

/// One polished preimage of a regular value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Preimage {
    pub point: Vec<f64>,
    pub level: LevelCoordinate,
    /// Circle parameter `t_j` of the seed point.
    pub t: f64,
    /// `|Phi(q) - p|` before polishing.
    pub seed_residual: f64,
    /// `|Phi(q) - p|` after polishing.
    pub residual: f64,
    pub newton_iterations: usize,
}

/// Check that `p` is a regular value away from every band boundary.
pub fn check_regular_value(fam: &Family, p: &[f64]) -> Result<LevelCoordinate> {
    let level = level_of(fam, p)?;
    let dist = level.boundary_distance(fam.g);
    if level.band == 0 || dist < REGULAR_MARGIN {
        return Err(Error::RegularValue(format!(
            "tau = {} is {dist:e} from a band boundary",
            level.tau
        )));
    }
    Ok(level)
}

/// Draw spherical points from `(seed, first_index..)` until one is a generic
/// regular value; gives up after `max_draws`.
pub fn sample_regular_value(
    fam: &Family,
    seed: u64,
    first_index: u64,
    max_draws: u64,
) -> Result<(Vec<f64>, u64)> {
    for i in first_index..first_index + max_draws {
        let p = sphere_point(fam.d, seed, i);
        if check_regular_value(fam, &p).is_ok() {
            return Ok((p, i));
        }
    }
    Err(Error::Sampling(format!(
        "no generic regular value of {} in {max_draws} draws",
        fam.label()
    )))
}

/// The `g - 1` preimages of a generic regular value, one per band.
pub fn preimages(fam: &Family, p: &[f64]) -> Result<Vec<Preimage>> {
    let level = check_regular_value(fam, p)?;
    let g = fam.g as f64;
    let xi = normal_field(fam, p)?;
    let t_p = PI / (2.0 * g) - level.tau;
    let mut out = Vec::with_capacity(fam.g - 1);
    for j in 0..fam.g - 1 {
        let t = (PI / 2.0 - t_p + 2.0 * PI * j as f64) / (g - 1.0);
        let seed_point = circle_point(p, &xi, t - t_p);
        let seed_residual = distance(&phi(fam, &seed_point)?, p);
        let (point, residual, newton_iterations) = newton_polish(fam, &seed_point, p)?;
        out.push(Preimage {
            level: level_of(fam, &point)?,
            point,
            t,
            seed_residual,
            residual,
            newton_iterations,
        });
    }
    let mut bands: Vec<usize> = out.iter().map(|q| q.level.band).collect();
    bands.sort_unstable();
    if bands != (1..fam.g).collect::<Vec<_>>() {
        return Err(Error::Numerical(format!("preimage bands {bands:?} are not 1..{}", fam.g - 1)));
    }
    Ok(out)
}

/// Projected Newton iteration for `Phi(q) = target` on the sphere, with step
/// halving on residual increase. Returns `(q, |Phi(q) - target|, iterations)`.
pub fn newton_polish(fam: &Family, start: &[f64], target: &[f64]) -> Result<(Vec<f64>, f64, usize)> {
    let mut q = normalize(start);
    let mut res = distance(&phi(fam, &q)?, target);
    let mut iterations = 0;
    while iterations < NEWTON_MAX_ITER && res > 1e-14 {
        iterations += 1;
        let frame = tangent_frame(&q)?;
        let (m, image) = tangential_jacobian(fam, &q)?;
        let dst = tangent_frame(&normalize(&image))?;
        let rhs = DVector::from_vec(dst.coordinates(&sub(target, &image)));
        let Some(step) = m.lu().solve(&rhs) else {
            return Err(Error::Numerical(format!(
                "singular Newton system at iteration {iterations}, residual {res:e}"
            )));
        };
        let direction = frame
            .vectors
            .iter()
            .zip(step.iter())
            .fold(vec![0.0; q.len()], |acc, (e, c)| crate::geometry::axpy(&acc, *c, e));
        let mut damping = 1.0;
        let mut improved = false;
        for _ in 0..30 {
            let trial = normalize(&crate::geometry::axpy(&q, damping, &direction));
            let trial_res = distance(&phi(fam, &trial)?, target);
            if trial_res < res {
                q = trial;
                res = trial_res;
                improved = true;
                break;
            }
            damping *= 0.5;
        }
        if !improved {
            break;
        }
    }
    if res > PREIMAGE_TOL || !res.is_finite() {
        return Err(Error::Numerical(format!(
            "Newton polish stalled at residual {res:e} after {iterations} iterations"
        )));
    }
    Ok((q, res, iterations))
}

/// Cosine of the angle between `Phi(p)` and `p`; used by the report module.
pub fn alignment(fam: &Family, p: &[f64]) -> Result<f64> {
    Ok(dot(&phi(fam, p)?, p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{catalog, make_family, FamilyId};
    use std::f64::consts::FRAC_1_SQRT_2;

    fn e1(d: usize) -> Vec<f64> {
        crate::geometry::unit_vector(d, 0)
    }

    #[test]
    fn phi_of_quadric_flips_second_block() {
        let fam = make_family(FamilyId::G2(2));
        let x = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
        assert_eq!(phi(&fam, &x).unwrap(), vec![1.0, 2.0, 3.0, -4.0, -5.0, -6.0]);
    }

    #[test]
    fn phi_of_quartic_at_focal_points() {
        let fam = make_family(FamilyId::G4M1);
        let p = e1(6);
        assert_eq!(phi(&fam, &p).unwrap(), scale(&p, -1.0));
        let q = [FRAC_1_SQRT_2, 0.0, 0.0, 0.0, FRAC_1_SQRT_2, 0.0];
        assert!(distance(&phi(&fam, &q).unwrap(), &q) < 1e-15);
    }

    #[test]
    fn levels_of_focal_points() {
        let l = level_of(&make_family(FamilyId::G4M1), &e1(6)).unwrap();
        assert_eq!(l.s, -1.0);
        assert!((l.tau - PI / 4.0).abs() < 1e-15);
        assert_eq!(l.band, 0);
        let l = level_of(&make_family(FamilyId::G3M1), &e1(5)).unwrap();
        assert_eq!((l.s, l.tau, l.band), (1.0, 0.0, 0));
    }

    #[test]
    fn zero_level_of_quartic_is_in_band_two() {
        let l = LevelCoordinate::from_level(4, 0.0);
        assert!((l.tau - PI / 8.0).abs() < 1e-15);
        assert_eq!(l.band, 2);
        assert!((l.s - (4.0 * l.tau).cos()).abs() < 1e-12);
    }

    #[test]
    fn off_sphere_and_corrupted_inputs() {
        let fam = make_family(FamilyId::G4M1);
        assert!(matches!(level_of(&fam, &[1.0; 6]), Err(Error::Domain(_))));
        let bad = Family::perturbed_quartic(-1.0);
        let p = normalize(&[1.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
        assert!(matches!(level_of(&bad, &p), Err(Error::CorruptedFamily { .. })));
        assert!(matches!(normal_field(&fam, &e1(6)), Err(Error::SingularPoint { .. })));
    }

    #[test]
    fn normal_field_is_unit_tangent_and_descends_tau() {
        for fam in catalog() {
            for i in 0..50 {
                let p = sphere_point(fam.d, 3, i);
                let Ok(xi) = normal_field(&fam, &p) else { continue };
                assert!((norm(&xi) - 1.0).abs() < 1e-9);
                assert!(dot(&xi, &p).abs() < 1e-12);
                let h = 1e-5;
                let tp = level_of(&fam, &circle_point(&p, &xi, h)).unwrap().tau;
                let tm = level_of(&fam, &circle_point(&p, &xi, -h)).unwrap().tau;
                let rate = (tp - tm) / (2.0 * h);
                if level_of(&fam, &p).unwrap().boundary_distance(fam.g) > 1e-3 {
                    assert!((rate + 1.0).abs() < 1e-4, "{}: {rate}", fam.label());
                }
            }
        }
    }

    #[test]
    fn self_mapped_and_focal_mapped_levels() {
        let quartic = make_family(FamilyId::G4M1);
        let cubic = make_family(FamilyId::G3M1);
        for (fam, want) in [(&quartic, 0.0), (&cubic, -1.0)] {
            let mut found = 0;
            for i in 0..20 {
                let p = sphere_point(fam.d, 5, i);
                let Ok(xi) = normal_field(fam, &p) else { continue };
                let tau = level_of(fam, &p).unwrap().tau;
                // step along the normal circle to the zero level
                let on_zero = circle_point(&p, &xi, tau - PI / (2.0 * fam.g as f64));
                let s = fam.eval_f(&on_zero).unwrap();
                assert!(s.abs() < 1e-12);
                let image = fam.eval_f(&phi(fam, &on_zero).unwrap()).unwrap();
                assert!((image - want).abs() < 1e-9, "{}: {image}", fam.label());
                found += 1;
            }
            assert!(found > 10);
        }
    }

    #[test]
    fn quadric_preimage_is_its_image() {
        let fam = make_family(FamilyId::G2(1));
        let (p, _) = sample_regular_value(&fam, 1, 0, 1000).unwrap();
        let pre = preimages(&fam, &p).unwrap();
        assert_eq!(pre.len(), 1);
        assert!(distance(&pre[0].point, &phi(&fam, &p).unwrap()) < 1e-10);
        assert_eq!(jacobian_sign(&fam, &pre[0].point).unwrap(), 1);
    }

    #[test]
    fn quartic_preimages_at_zero_level() {
        let fam = make_family(FamilyId::G4M1);
        let (p0, _) = sample_regular_value(&fam, 2, 0, 1000).unwrap();
        let xi = normal_field(&fam, &p0).unwrap();
        let tau0 = level_of(&fam, &p0).unwrap().tau;
        // slide along the normal circle to the level tau = pi/16, where t_p = pi/16
        let p = circle_point(&p0, &xi, tau0 - PI / 16.0);
        let level = level_of(&fam, &p).unwrap();
        assert!((level.tau - PI / 16.0).abs() < 1e-12);
        let pre = preimages(&fam, &p).unwrap();
        assert_eq!(pre.len(), 3);
        let signs: Vec<i32> = pre.iter().map(|q| jacobian_sign(&fam, &q.point).unwrap()).collect();
        let bands: Vec<usize> = pre.iter().map(|q| q.level.band).collect();
        for (b, s) in bands.iter().zip(&signs) {
            assert_eq!(*s, if *b == 2 { -1 } else { 1 });
        }
        for q in &pre {
            assert!(q.residual <= PREIMAGE_TOL);
            assert!(q.seed_residual < 1e-8);
        }
    }

    #[test]
    fn sextic_has_five_preimages_one_per_band() {
        let fam = make_family(FamilyId::G6M1);
        let (p, _) = sample_regular_value(&fam, 4, 0, 1000).unwrap();
        let pre = preimages(&fam, &p).unwrap();
        let mut bands: Vec<usize> = pre.iter().map(|q| q.level.band).collect();
        bands.sort_unstable();
        assert_eq!(bands, vec![1, 2, 3, 4, 5]);
    }

    #[test]
    fn non_generic_values_are_rejected() {
        let fam = make_family(FamilyId::G4M1);
        assert!(matches!(preimages(&fam, &e1(6)), Err(Error::RegularValue(_))));
        let q = normalize(&[1.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
        assert!(matches!(preimages(&fam, &q), Err(Error::RegularValue(_))));
    }

    #[test]
    fn focal_flows_land_on_focal_sets() {
        for fam in catalog() {
            let (p, _) = sample_regular_value(&fam, 6, 0, 1000).unwrap();
            let top = flow_to_top_focal(&fam, &p).unwrap();
            let bottom = flow_to_bottom_focal(&fam, &p).unwrap();
            assert!((fam.eval_f(&top).unwrap() - 1.0).abs() < 1e-12);
            assert!((fam.eval_f(&bottom).unwrap() + 1.0).abs() < 1e-12);
            assert!(distance(&phi(&fam, &top).unwrap(), &top) < 1e-9);
            assert!((alignment(&fam, &top).unwrap() - 1.0).abs() < 1e-12);
        }
    }
}
