//! Radial Ginzburg-Landau solutions `u(x) = Phi(x/|x|) h(|x|)` and their
//! numerical verification.

use rayon::prelude::*;
use serde::Serialize;

use crate::catalog::Family;
use crate::degree::{degree_closed_form, degree_numeric};
use crate::error::{Error, Result};
use crate::geometry::{add, distance, norm, scale, sub};
use crate::gradient_map::{flow_to_bottom_focal, flow_to_top_focal, phi};
use crate::profile::{eval_profile, eigenvalue, Profile, ProfileMeta};
use crate::sampling::{shell_point, sphere_point};

/// Finite-difference step for the sampled PDE residual.
pub const PDE_STEP: f64 = 1e-3;
/// Acceptance bound on the sampled PDE residual.
pub const PDE_TOL: f64 = 1e-3;
/// Sample shell `SHELL.0 <= |x| <= SHELL.1`.
pub const SHELL: (f64, f64) = (0.5, 5.0);
/// Bound on `|Phi(p) -+ p|` for the witness pair.
pub const WITNESS_TOL: f64 = 1e-9;
/// Step sizes of the convergence-order check.
pub const SCALING_STEPS: [f64; 3] = [0.2, 0.1, 0.05];

const WITNESS_DRAWS: u64 = 1000;
const DEGREE_TRIALS: usize = 3;
const RAY_COUNT: u64 = 16;
const RATE_WINDOW: (f64, f64) = (20.0, 50.0);

#[derive(Debug, Clone)]
pub struct RadialSolution {
    pub family: Family,
    pub profile: Profile,
    pub degree_at_infinity: i32,
}

impl RadialSolution {
    /// Pair a family with a profile, checking that `u` is a candidate solution:
    /// degree `+-1`, equal multiplicities, `N = d` and `k = g - 1`.
    pub fn new(family: Family, profile: Profile) -> Result<Self> {
        let degree = degree_closed_form(family.g, family.m1, family.m2)?;
        if degree.abs() != 1 {
            return Err(Error::Config(format!("{} has degree {degree}, need +-1", family.label())));
        }
        if family.m1 != family.m2 {
            return Err(Error::Config(format!(
                "{} has m1 = {} and m2 = {}, need equal multiplicities",
                family.label(),
                family.m1,
                family.m2
            )));
        }
        if profile.n != family.d || profile.k + 1 != family.g {
            return Err(Error::Config(format!(
                "{} needs the profile (N, k) = ({}, {}), got ({}, {})",
                family.label(),
                family.d,
                family.g - 1,
                profile.n,
                profile.k
            )));
        }
        Self::unchecked(family, profile)
    }

    /// Pair without the compatibility checks. Used for negative controls.
    pub fn unchecked(family: Family, profile: Profile) -> Result<Self> {
        if !profile.converged {
            return Err(Error::State("profile has not converged".into()));
        }
        let degree_at_infinity = degree_closed_form(family.g, family.m1, family.m2)?;
        Ok(Self {
            family,
            profile,
            degree_at_infinity,
        })
    }

    pub fn assemble_u(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.family.d {
            return Err(Error::Shape {
                expected: self.family.d,
                got: x.len(),
            });
        }
        let r = norm(x);
        if r == 0.0 {
            return Ok(vec![0.0; x.len()]);
        }
        let dir = scale(x, 1.0 / r);
        Ok(scale(&phi(&self.family, &dir)?, eval_profile(&self.profile, r)?))
    }

    pub fn pde_residual(&self, x: &[f64], step: f64) -> Result<f64> {
        pde_residual(|y| self.assemble_u(y), x, step)
    }
}

/// `max_i |Lap u_i - u_i(|u|^2 - 1)|` with a central-difference Laplacian.
pub fn pde_residual<U>(u: U, x: &[f64], step: f64) -> Result<f64>
where
    U: Fn(&[f64]) -> Result<Vec<f64>>,
{
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(step > 0.0) || norm(x) <= 2.0 * step {
        return Err(Error::Domain(format!(
            "need |x| > 2 step, got |x| = {} and step = {step}",
            norm(x)
        )));
    }
    let centre = u(x)?;
    let mut lap = vec![0.0; centre.len()];
    let mut y = x.to_vec();
    for j in 0..x.len() {
        y[j] = x[j] + step;
        let plus = u(&y)?;
        y[j] = x[j] - step;
        let minus = u(&y)?;
        y[j] = x[j];
        for i in 0..lap.len() {
            lap[i] += (plus[i] - 2.0 * centre[i] + minus[i]) / (step * step);
        }
    }
    let modulus2: f64 = centre.iter().map(|c| c * c).sum();
    Ok(lap
        .iter()
        .zip(&centre)
        .map(|(l, c)| (l - c * (modulus2 - 1.0)).abs())
        .fold(0.0, f64::max))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    /// Point with `Phi(p) = p`.
    pub p_fixed: Option<Vec<f64>>,
    /// Point with `Phi(p) = -p`.
    pub p_antipodal: Option<Vec<f64>>,
    pub fixed_error: Option<f64>,
    pub antipodal_error: Option<f64>,
}

impl Witness {
    pub fn found(&self) -> bool {
        self.p_fixed.is_some() && self.p_antipodal.is_some()
    }
}

/// A fixed point from the focal set `f = 1` and, for even `g`, an
/// antipodal point from `f = -1`.
pub fn witness_pair(fam: &Family, seed: u64) -> Result<Witness> {
    let mut w = Witness {
        p_fixed: None,
        p_antipodal: None,
        fixed_error: None,
        antipodal_error: None,
    };
    for i in 0..WITNESS_DRAWS {
        let p = sphere_point(fam.d, seed, i);
        if w.p_fixed.is_none() {
            if let Ok(q) = flow_to_top_focal(fam, &p) {
                let err = distance(&phi(fam, &q)?, &q);
                if err <= WITNESS_TOL {
                    w.fixed_error = Some(err);
                    w.p_fixed = Some(q);
                }
            }
        }
        if w.p_antipodal.is_none() && fam.g.is_multiple_of(2) {
            if let Ok(q) = flow_to_bottom_focal(fam, &p) {
                let err = norm(&add(&phi(fam, &q)?, &q));
                if err <= WITNESS_TOL {
                    w.antipodal_error = Some(err);
                    w.p_antipodal = Some(q);
                }
            }
        }
        if w.p_fixed.is_some() && (w.p_antipodal.is_some() || fam.g % 2 == 1) {
            break;
        }
    }
    Ok(w)
}

/// Whether `Phi` is linear on sampled pairs, i.e. `u` is an isometric image
/// of the trivial radial solution.
pub fn is_linear(fam: &Family, seed: u64) -> Result<bool> {
    for i in 0..8 {
        let a = sphere_point(fam.d, seed, 2 * i);
        let b = sphere_point(fam.d, seed, 2 * i + 1);
        let lhs = fam.eval_grad(&add(&a, &b))?;
        let rhs = add(&fam.eval_grad(&a)?, &fam.eval_grad(&b)?);
        if norm(&sub(&lhs, &rhs)) > 1e-12 * (1.0 + norm(&rhs)) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepScaling {
    pub point: Vec<f64>,
    pub steps: Vec<f64>,
    pub residuals: Vec<f64>,
    /// `residual(step) / residual(step / 2)`; close to 4 for a second-order stencil.
    pub ratios: Vec<f64>,
    pub second_order: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FarFieldRate {
    /// Least-squares `c` in `1 - |u| ~ c / r^2`.
    pub c: f64,
    /// `k(k + N - 2) / 2`.
    pub c_expected: f64,
    /// Slope of `log(1 - |u|)` against `log r`.
    pub exponent: f64,
    pub window: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolutionReport {
    pub family: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub k: usize,
    pub degree: i32,
    pub degree_numeric: Option<i32>,
    pub degree_closed_form: i32,
    pub seed: u64,
    pub samples: usize,
    pub fd_step: f64,
    pub shell: (f64, f64),
    pub tol: f64,
    pub max_pde_residual: f64,
    pub max_modulus_error: f64,
    pub step_scaling: StepScaling,
    pub monotone_modulus: bool,
    pub witness: Witness,
    pub isometric_to_trivial: bool,
    pub counterexample: bool,
    pub far_field: FarFieldRate,
    pub profile_meta: ProfileMeta,
    pub pass: bool,
}

fn step_scaling(sol: &RadialSolution, seed: u64) -> Result<StepScaling> {
    let point = scale(&sphere_point(sol.family.d, seed, 1 << 40), 1.5);
    let residuals: Vec<f64> = SCALING_STEPS
        .iter()
        .map(|&s| sol.pde_residual(&point, s))
        .collect::<Result<_>>()?;
    let ratios: Vec<f64> = residuals.windows(2).map(|w| w[0] / w[1]).collect();
    let second_order = ratios.iter().all(|&q| (3.0..=5.0).contains(&q));
    Ok(StepScaling {
        point,
        steps: SCALING_STEPS.to_vec(),
        residuals,
        ratios,
        second_order,
    })
}

fn monotone_modulus(sol: &RadialSolution, seed: u64) -> Result<bool> {
    let r_max = sol.profile.r_max();
    for ray in 0..RAY_COUNT {
        let dir = sphere_point(sol.family.d, seed, (1 << 41) + ray);
        let mut last = 0.0;
        for i in 1..=500 {
            let r = r_max * i as f64 / 500.0;
            let m = norm(&sol.assemble_u(&scale(&dir, r))?);
            if m <= last {
                return Ok(false);
            }
            last = m;
        }
    }
    Ok(true)
}

fn far_field_rate(sol: &RadialSolution) -> Result<FarFieldRate> {
    let (lo, hi) = RATE_WINDOW;
    let hi = hi.min(sol.profile.r_max());
    let radii: Vec<f64> = (0..=60).map(|i| lo + (hi - lo) * i as f64 / 60.0).collect();
    let defect: Vec<f64> = radii
        .iter()
        .map(|&r| eval_profile(&sol.profile, r).map(|h| 1.0 - h))
        .collect::<Result<_>>()?;
    // Fit defect = c / r^2.
    let (mut num, mut den) = (0.0, 0.0);
    for (r, d) in radii.iter().zip(&defect) {
        let basis = 1.0 / (r * r);
        num += basis * d;
        den += basis * basis;
    }
    let xs: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
    let ys: Vec<f64> = defect.iter().map(|d| d.ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(FarFieldRate {
        c: num / den,
        c_expected: eigenvalue(sol.profile.n, sol.profile.k) / 2.0,
        exponent: sxy / sxx,
        window: (lo, hi),
    })
}

/// Sampled verification of `u`: PDE residual, modulus, degree and the
/// fixed/antipodal witness.
pub fn solution_report(sol: &RadialSolution, seed: u64, samples: usize) -> Result<SolutionReport> {
    let samples = samples.max(1);
    let fam = &sol.family;
    let rows: Vec<(f64, f64)> = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let x = shell_point(fam.d, SHELL.0, SHELL.1, seed, i);
            let res = sol.pde_residual(&x, PDE_STEP)?;
            let modulus = norm(&sol.assemble_u(&x)?);
            let h = eval_profile(&sol.profile, norm(&x))?;
            Ok((res, (modulus - h).abs()))
        })
        .collect::<Result<_>>()?;
    let max_pde_residual = rows.iter().map(|r| r.0).fold(0.0, f64::max);
    let max_modulus_error = rows.iter().map(|r| r.1).fold(0.0, f64::max);

    let degree_numeric = match degree_numeric(fam, seed, DEGREE_TRIALS) {
        Ok(rep) => Some(rep.degree_numeric),
        Err(e) if e.is_numerical() => None,
        Err(e) => return Err(e),
    };
    let witness = witness_pair(fam, seed)?;
    let isometric_to_trivial = is_linear(fam, seed)?;
    let counterexample = witness.found() && !isometric_to_trivial;
    let step_scaling = step_scaling(sol, seed)?;
    let monotone_modulus = monotone_modulus(sol, seed)?;
    let degree = degree_numeric.unwrap_or(sol.degree_at_infinity);
    let pass = max_pde_residual <= PDE_TOL
        && max_modulus_error <= 1e-10
        && step_scaling.second_order
        && monotone_modulus
        && degree_numeric == Some(sol.degree_at_infinity)
        && degree.abs() == 1
        && witness.found();
    Ok(SolutionReport {
        family: fam.label(),
        n: sol.profile.n,
        k: sol.profile.k,
        degree,
        degree_numeric,
        degree_closed_form: sol.degree_at_infinity,
        seed,
        samples,
        fd_step: PDE_STEP,
        shell: SHELL,
        tol: PDE_TOL,
        max_pde_residual,
        max_modulus_error,
        step_scaling,
        monotone_modulus,
        witness,
        isometric_to_trivial,
        counterexample,
        far_field: far_field_rate(sol)?,
        profile_meta: sol.profile.meta()?,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{make_family, FamilyId};
    use crate::profile::{solve_profile, ProfileOptions};
    use std::sync::OnceLock;

    fn quartic_solution() -> &'static RadialSolution {
        static SOL: OnceLock<RadialSolution> = OnceLock::new();
        SOL.get_or_init(|| {
            let prof = solve_profile(6, 3, &ProfileOptions::default()).unwrap();
            RadialSolution::new(make_family(FamilyId::G4M1), prof).unwrap()
        })
    }

    #[test]
    fn zero_field_has_zero_residual() {
        let x = [0.3, -0.2, 0.9, 0.1];
        assert_eq!(pde_residual(|y| Ok(vec![0.0; y.len()]), &x, 1e-3).unwrap(), 0.0);
        assert!(matches!(
            pde_residual(|y| Ok(vec![0.0; y.len()]), &[1e-3, 0.0], 1e-3),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn compatibility_is_enforced() {
        let prof = solve_profile(3, 1, &ProfileOptions { nodes: 500, ..Default::default() }).unwrap();
        assert!(RadialSolution::new(make_family(FamilyId::G3M1), prof.clone()).is_err());
        assert!(RadialSolution::new(make_family(FamilyId::G4M1), prof.clone()).is_err());
        assert!(RadialSolution::new(make_family(FamilyId::G2(2)), prof.clone()).is_err());
        assert!(RadialSolution::unchecked(make_family(FamilyId::G4M1), prof).is_ok());
    }

    #[test]
    fn assembled_field() {
        let sol = quartic_solution();
        assert_eq!(sol.assemble_u(&[0.0; 6]).unwrap(), vec![0.0; 6]);
        assert!(matches!(sol.assemble_u(&[1.0; 5]), Err(Error::Shape { .. })));
        for i in 0..20 {
            let x = shell_point(6, 0.1, 60.0, 3, i);
            let m = norm(&sol.assemble_u(&x).unwrap());
            assert!((m - eval_profile(&sol.profile, norm(&x)).unwrap()).abs() <= 1e-10);
        }
        let far = scale(&sphere_point(6, 3, 99), 100.0);
        assert!(norm(&sol.assemble_u(&far).unwrap()) >= 0.998);
    }

    #[test]
    fn quartic_solution_report() {
        let rep = solution_report(quartic_solution(), 42, 100).unwrap();
        assert!(rep.pass, "{rep:#?}");
        assert_eq!(rep.degree, 1);
        assert!(rep.counterexample && !rep.isometric_to_trivial);
        assert!((rep.far_field.c - 10.5).abs() < 0.5, "{:?}", rep.far_field);
        assert!((rep.far_field.exponent + 2.0).abs() < 0.1, "{:?}", rep.far_field);
    }

    #[test]
    fn mismatched_profile_is_not_a_solution() {
        let prof = solve_profile(6, 1, &ProfileOptions::default()).unwrap();
        let sol = RadialSolution::unchecked(make_family(FamilyId::G4M1), prof).unwrap();
        let worst = (0..100)
            .map(|i| sol.pde_residual(&shell_point(6, 0.5, 5.0, 42, i), PDE_STEP).unwrap())
            .fold(0.0, f64::max);
        assert!(worst >= 0.1, "{worst}");
    }

    #[test]
    fn reflection_is_flagged_trivial() {
        let prof = solve_profile(4, 1, &ProfileOptions::default()).unwrap();
        let sol = RadialSolution::new(make_family(FamilyId::G2(1)), prof).unwrap();
        let rep = solution_report(&sol, 7, 20).unwrap();
        assert!(rep.isometric_to_trivial);
        assert!(!rep.counterexample);
        assert_eq!(rep.degree, 1);
    }
}
