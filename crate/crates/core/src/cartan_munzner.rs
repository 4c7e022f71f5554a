//! Sampled verification of the identities every isoparametric polynomial
//! satisfies: the two Cartan-Münzner equations, Euler's identity for a
//! degree-`g` form, and the eigenmap surrogates for harmonicity of
//! `Phi|_S` (harmonic components and constant energy density).

use rayon::prelude::*;
use serde::Serialize;

use crate::catalog::Family;
use crate::error::Result;
use crate::geometry::{dot, fd_jacobian, fd_laplacian, norm, project_tangent, tangent_frame};
use crate::gradient_map::{phi, JACOBIAN_STEP};
use crate::sampling::{ball_point, sphere_point};

/// Tolerance for the component-harmonicity surrogate.
pub const HARMONICITY_TOL: f64 = 1e-6;
/// Tolerance on `max - min` of the energy density.
pub const ENERGY_TOL: f64 = 1e-5;
/// Number of spherical points used by the finite-difference checks.
pub const FD_SAMPLES: usize = 100;
/// Radius of the ball the algebraic checks sample from.
pub const SAMPLE_RADIUS: f64 = 2.0;

const LAPLACIAN_STEP: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Residuals {
    pub euler: f64,
    pub eq11: f64,
    pub eq12: f64,
    pub harmonicity: f64,
    pub energy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FdTolerances {
    pub harmonicity: f64,
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub family: String,
    pub seed: u64,
    pub samples: usize,
    pub residuals: Residuals,
    pub tol: f64,
    pub fd_tol: FdTolerances,
    /// Mean energy density over the finite-difference samples.
    pub energy_density: f64,
    pub pass: bool,
}

impl ResidualReport {
    pub fn algebraic_pass(&self) -> bool {
        let r = &self.residuals;
        r.euler <= self.tol && r.eq11 <= self.tol && r.eq12 <= self.tol
    }
}

/// `|grad F|^2 - g^2|x|^{2g-2}`, `Lap F - (g^2/2)(m2-m1)|x|^{g-2}` and
/// `<x, grad F> - g F` at one point, in absolute value.
pub fn algebraic_residuals(fam: &Family, x: &[f64]) -> Result<[f64; 3]> {
    let r = norm(x);
    let grad = fam.eval_grad(x)?;
    let f = fam.eval_f(x)?;
    let eq11 = (dot(&grad, &grad) - fam.gradient_norm_law(r)).abs();
    let eq12 = (fam.eval_laplacian(x)? - fam.laplacian_law(r)).abs();
    let euler = (dot(x, &grad) - fam.g as f64 * f).abs();
    Ok([euler, eq11, eq12])
}

/// Energy density `sum_i |dPhi_S(e_i)|^2` of `Phi|_S` at a spherical point.
pub fn energy_density(fam: &Family, p: &[f64]) -> Result<f64> {
    let frame = tangent_frame(p)?;
    let image = phi(fam, p)?;
    let jac = fd_jacobian(
        |x| phi(fam, x).unwrap_or_else(|_| vec![f64::NAN; x.len()]),
        p,
        JACOBIAN_STEP,
    )?;
    let unit_image = crate::geometry::normalize(&image);
    let mut total = 0.0;
    for e in &frame.vectors {
        let col: Vec<f64> = (0..fam.d)
            .map(|i| (0..fam.d).map(|j| jac[(i, j)] * e[j]).sum())
            .collect();
        let t = project_tangent(&unit_image, &col);
        total += dot(&t, &t);
    }
    Ok(total)
}

/// Largest `|Lap Phi_i(p)|` over the components of `Phi`.
pub fn component_laplacian(fam: &Family, p: &[f64]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for i in 0..fam.d {
        let lap = fd_laplacian(
            |x| phi(fam, x).map_or(f64::NAN, |v| v[i]),
            p,
            LAPLACIAN_STEP,
        )?;
        worst = worst.max(lap.abs());
    }
    Ok(worst)
}

/// Sampled residual report for one family.
///
/// The algebraic checks use `samples` points of the ball of radius 2; the
/// finite-difference checks use `min(samples, 100)` points of the sphere.
pub fn verify_family(fam: &Family, samples: usize, seed: u64, tol: f64) -> Result<ResidualReport> {
    let samples = samples.max(1);
    let algebraic: Vec<[f64; 3]> = (0..samples as u64)
        .into_par_iter()
        .map(|i| algebraic_residuals(fam, &ball_point(fam.d, SAMPLE_RADIUS, seed, i)))
        .collect::<Result<_>>()?;
    let mut max = [0.0f64; 3];
    for r in &algebraic {
        for k in 0..3 {
            max[k] = max[k].max(r[k]);
        }
    }

    let fd_count = samples.min(FD_SAMPLES) as u64;
    // Offset the stream indices so the sphere samples are independent of the ball samples.
    let offset = 1u64 << 32;
    let fd: Vec<(f64, f64)> = (0..fd_count)
        .into_par_iter()
        .map(|i| {
            let p = sphere_point(fam.d, seed, offset + i);
            Ok((component_laplacian(fam, &p)?, energy_density(fam, &p)?))
        })
        .collect::<Result<_>>()?;
    let harmonicity = fd.iter().map(|r| r.0).fold(0.0, f64::max);
    let e_max = fd.iter().map(|r| r.1).fold(f64::NEG_INFINITY, f64::max);
    let e_min = fd.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    let energy_density = fd.iter().map(|r| r.1).sum::<f64>() / fd.len() as f64;

    let residuals = Residuals {
        euler: max[0],
        eq11: max[1],
        eq12: max[2],
        harmonicity,
        energy: e_max - e_min,
    };
    let fd_tol = FdTolerances {
        harmonicity: HARMONICITY_TOL,
        energy: ENERGY_TOL,
    };
    let mut report = ResidualReport {
        family: fam.label(),
        seed,
        samples,
        residuals,
        tol,
        fd_tol,
        energy_density,
        pass: false,
    };
    report.pass = report.algebraic_pass()
        && harmonicity <= HARMONICITY_TOL
        && residuals.energy <= ENERGY_TOL;
    Ok(report)
}

/// Eigenvalue `k(k + d - 2)` of a degree-`k` spherical harmonic on `S^{d-1}`.
pub fn eigenmap_energy(k: usize, d: usize) -> f64 {
    (k * (k + d - 2)) as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{catalog, make_family, FamilyId};

    #[test]
    fn catalog_families_pass() {
        for fam in catalog() {
            let rep = verify_family(&fam, 300, 42, 1e-9).unwrap();
            assert!(rep.pass, "{rep:?}");
        }
    }

    #[test]
    fn perturbed_quartic_fails_the_gradient_law() {
        let rep = verify_family(&Family::perturbed_quartic(2.1), 1000, 42, 1e-9).unwrap();
        assert!(rep.residuals.eq11 > 1e-2);
        assert!(!rep.pass);
    }

    #[test]
    fn energy_densities_match_eigenvalues() {
        let cases = [
            (FamilyId::G2(1), 3.0, 1e-8),
            (FamilyId::G2(2), 5.0, 1e-8),
            (FamilyId::G3M1, 10.0, 1e-5),
            (FamilyId::G4M1, 21.0, 1e-5),
            (FamilyId::G6M1, 55.0, 1e-5),
        ];
        for (id, want, tol) in cases {
            let fam = make_family(id);
            assert_eq!(eigenmap_energy(fam.g - 1, fam.d), want);
            for i in 0..10 {
                let p = sphere_point(fam.d, 8, i);
                let e = energy_density(&fam, &p).unwrap();
                assert!((e - want).abs() <= tol, "{id}: {e}");
            }
        }
    }

    #[test]
    fn single_sample_report() {
        let rep = verify_family(&make_family(FamilyId::G3M1), 1, 1, 1e-9).unwrap();
        assert_eq!(rep.samples, 1);
        assert!(rep.pass);
    }
}
