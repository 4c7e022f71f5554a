//! Radial Ginzburg-Landau profile
//!
//! `-h'' - (N-1) h'/r + k(k+N-2) h/r^2 = h(1 - h^2)`, `h(0) = 0`, `h(inf) = 1`.
//!
//! Integration starts off the regular singular point with the Frobenius
//! leading term `h = a r^k`. The amplitude `a` is bracketed by doubling and
//! then bisected using the corridor classification of [`shoot`]. Because the
//! linearisation about `h = 1` has the modes `exp(+-sqrt(2) r)`, a single
//! shot in double precision only tracks the solution out to `r ~ 25`; the
//! bisected amplitude therefore seeds a multiple-shooting Newton solve over
//! the whole grid with a decaying-mode condition at `R_max`.

use std::f64::consts::SQRT_2;
use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::format::g17;

/// `k(k + N - 2)`.
pub fn eigenvalue(n: usize, k: usize) -> f64 {
    (k * (k + n - 2)) as f64
}

/// `h''` from the profile equation.
pub fn ode_rhs(n: usize, k: usize, r: f64, h: f64, dh: f64) -> Result<f64> {
    if r <= 0.0 || r.is_nan() {
        return Err(Error::Domain(format!("radius {r} must be positive")));
    }
    Ok(rhs(n as f64 - 1.0, eigenvalue(n, k), r, h, dh))
}

fn rhs(n_minus_1: f64, lambda: f64, r: f64, h: f64, dh: f64) -> f64 {
    -n_minus_1 * dh / r + lambda * h / (r * r) - h * (1.0 - h * h)
}

/// Two-term far field `1 - k(k+N-2) / (2 r^2)`.
pub fn far_field(n: usize, k: usize, r: f64) -> f64 {
    1.0 - eigenvalue(n, k) / (2.0 * r * r)
}

/// Three-term far field and its derivative, `1 - alpha/r^2 - beta/r^4`.
fn asymptote(n: usize, k: usize, r: f64) -> (f64, f64) {
    let lambda = eigenvalue(n, k);
    let alpha = lambda / 2.0;
    let beta = ((4.0 - n as f64) * lambda + lambda * lambda / 4.0) / 2.0;
    let r2 = r * r;
    (
        1.0 - alpha / r2 - beta / (r2 * r2),
        2.0 * alpha / (r2 * r) + 4.0 * beta / (r2 * r2 * r),
    )
}

/// Radii equally spaced in `r + ln r`: logarithmic near the origin, uniform
/// in the far field. Endpoints are exact.
pub fn radial_grid(r_min: f64, r_max: f64, nodes: usize) -> Vec<f64> {
    let sigma = |r: f64| r + r.ln();
    let (s0, s1) = (sigma(r_min), sigma(r_max));
    let mut out = Vec::with_capacity(nodes);
    let mut r = r_min;
    for i in 0..nodes {
        let target = s0 + (s1 - s0) * i as f64 / (nodes - 1) as f64;
        for _ in 0..100 {
            let step = (sigma(r) - target) / (1.0 + 1.0 / r);
            let next = (r - step).max(r / 10.0);
            if (next - r).abs() <= 1e-15 * r {
                r = next;
                break;
            }
            r = next;
        }
        out.push(r);
    }
    out[0] = r_min;
    out[nodes - 1] = r_max;
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfileOptions {
    pub r_min: f64,
    pub r_max: f64,
    /// Corridor tolerance of the shooting classification.
    pub tol: f64,
    /// Number of grid nodes.
    pub nodes: usize,
    pub rtol: f64,
    pub atol: f64,
}

impl Default for ProfileOptions {
    fn default() -> Self {
        Self {
            r_min: 1e-6,
            r_max: 50.0,
            tol: 1e-10,
            nodes: 10_000,
            rtol: 1e-10,
            atol: 1e-12,
        }
    }
}

impl ProfileOptions {
    fn validate(&self) -> Result<()> {
        if !(self.r_min > 0.0 && self.r_min < self.r_max && self.r_max.is_finite()) {
            return Err(Error::Domain(format!(
                "need 0 < r_min < R_max, got {} and {}",
                self.r_min, self.r_max
            )));
        }
        if self.nodes < 16 {
            return Err(Error::Config(format!("{} grid nodes is too few", self.nodes)));
        }
        if !(self.tol > 0.0 && self.rtol > 0.0 && self.atol > 0.0) {
            return Err(Error::Config("tolerances must be positive".into()));
        }
        Ok(())
    }
}

// Dormand-Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Adaptive integrator for `(h, h')` plus tangent vectors of the
/// variational equation. Only `(h, h')` enter the error control; the
/// absolute tolerance is scaled by the running peak of each component so the
/// `a r^k` start is resolved in relative terms.
struct Integrator {
    n_minus_1: f64,
    lambda: f64,
    rtol: f64,
    atol: f64,
}

struct State {
    y: Vec<f64>,
    peak: [f64; 2],
    step: f64,
}

impl Integrator {
    fn new(n: usize, k: usize, opts: &ProfileOptions) -> Self {
        Self {
            n_minus_1: n as f64 - 1.0,
            lambda: eigenvalue(n, k),
            rtol: opts.rtol,
            atol: opts.atol,
        }
    }

    fn deriv(&self, r: f64, y: &[f64], out: &mut [f64]) {
        let (h, dh) = (y[0], y[1]);
        out[0] = dh;
        out[1] = rhs(self.n_minus_1, self.lambda, r, h, dh);
        let dfdh = self.lambda / (r * r) - 1.0 + 3.0 * h * h;
        let dfdp = -self.n_minus_1 / r;
        for t in (2..y.len()).step_by(2) {
            out[t] = y[t + 1];
            out[t + 1] = dfdh * y[t] + dfdp * y[t + 1];
        }
    }

    fn trial(&self, r: f64, y: &[f64], h: f64, k: &mut [Vec<f64>; 7], tmp: &mut [f64]) -> (Vec<f64>, f64, f64) {
        let m = y.len();
        for s in 0..7 {
            for i in 0..m {
                tmp[i] = y[i] + h * (0..s).map(|j| A[s][j] * k[j][i]).sum::<f64>();
            }
            let (ks, _) = k.split_at_mut(s + 1);
            self.deriv(r + C[s] * h, tmp, &mut ks[s]);
        }
        let y_new: Vec<f64> = (0..m)
            .map(|i| y[i] + h * (0..7).map(|s| B5[s] * k[s][i]).sum::<f64>())
            .collect();
        let errs: Vec<f64> = (0..2)
            .map(|i| h * (0..7).map(|s| (B5[s] - B4[s]) * k[s][i]).sum::<f64>())
            .collect();
        (y_new, errs[0], errs[1])
    }

    /// Advance `state` from `r0` to exactly `r1`.
    fn advance(&self, r0: f64, r1: f64, state: &mut State) -> Result<()> {
        let m = state.y.len();
        let mut k: [Vec<f64>; 7] = std::array::from_fn(|_| vec![0.0; m]);
        let mut tmp = vec![0.0; m];
        let mut r = r0;
        while r < r1 {
            let mut h = state.step.min(r1 - r);
            let last = h >= r1 - r;
            let (y_new, e0, e1) = self.trial(r, &state.y, h, &mut k, &mut tmp);
            let mut err: f64 = 0.0;
            for (i, e) in [e0, e1].into_iter().enumerate() {
                let mag = state.y[i].abs().max(y_new[i].abs());
                let sc = self.atol * state.peak[i].max(mag) + self.rtol * mag;
                err = err.max(if sc > 0.0 { e.abs() / sc } else { 0.0 });
            }
            if !y_new.iter().all(|v| v.is_finite()) {
                err = f64::INFINITY;
            }
            if err <= 1.0 {
                r = if last { r1 } else { r + h };
                state.y = y_new;
                for i in 0..2 {
                    state.peak[i] = state.peak[i].max(state.y[i].abs());
                }
                let grow = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                if !last || grow < 1.0 {
                    state.step = h * grow;
                }
            } else {
                let shrink = if err.is_finite() { (0.9 * err.powf(-0.2)).clamp(0.1, 0.9) } else { 0.1 };
                h *= shrink;
                state.step = h;
                if h < 1e-14 * r.max(1e-300) {
                    return Err(Error::Stiffness { r });
                }
            }
        }
        Ok(())
    }
}

/// Classification of one shot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Overshoot,
    Undershoot,
    Converged,
}

/// Nodes visited by one shot, up to the point where it was classified.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub a: f64,
    pub r: Vec<f64>,
    pub h: Vec<f64>,
    pub dh: Vec<f64>,
    pub outcome: Outcome,
}

impl Trajectory {
    /// Radius at which the shot was classified.
    pub fn end_radius(&self) -> f64 {
        *self.r.last().expect("non-empty trajectory")
    }
}

fn frobenius_start(a: f64, k: usize, r: f64) -> [f64; 2] {
    [a * r.powi(k as i32), a * k as f64 * r.powi(k as i32 - 1)]
}

fn shoot_on_grid(integ: &Integrator, k: usize, grid: &[f64], a: f64, tol: f64) -> Result<Trajectory> {
    let start = frobenius_start(a, k, grid[0]);
    let mut state = State {
        y: start.to_vec(),
        peak: [start[0].abs(), start[1].abs()],
        step: grid[0] * 1e-2,
    };
    let mut traj = Trajectory {
        a,
        r: vec![grid[0]],
        h: vec![start[0]],
        dh: vec![start[1]],
        outcome: Outcome::Converged,
    };
    let classify = |h: f64, dh: f64| {
        if h > 1.0 + tol {
            Some(Outcome::Overshoot)
        } else if dh <= 0.0 && h < 1.0 - tol {
            Some(Outcome::Undershoot)
        } else {
            None
        }
    };
    if let Some(o) = classify(start[0], start[1]) {
        traj.outcome = o;
        return Ok(traj);
    }
    for w in grid.windows(2) {
        integ.advance(w[0], w[1], &mut state)?;
        traj.r.push(w[1]);
        traj.h.push(state.y[0]);
        traj.dh.push(state.y[1]);
        if let Some(o) = classify(state.y[0], state.y[1]) {
            traj.outcome = o;
            return Ok(traj);
        }
    }
    Ok(traj)
}

/// Integrate from the Frobenius start with amplitude `a` and classify the trajectory.
pub fn shoot(n: usize, k: usize, a: f64, r_min: f64, r_max: f64, tol: f64) -> Result<Trajectory> {
    if a < 0.0 || a.is_nan() {
        return Err(Error::Domain(format!("amplitude {a} must be nonnegative")));
    }
    let opts = ProfileOptions {
        r_min,
        r_max,
        tol,
        ..ProfileOptions::default()
    };
    opts.validate()?;
    let integ = Integrator::new(n, k, &opts);
    shoot_on_grid(&integ, k, &radial_grid(r_min, r_max, opts.nodes), a, tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BracketStep {
    pub a: f64,
    pub outcome: Outcome,
    /// Radius at which the shot was classified.
    pub radius: f64,
}

/// A solved profile on its grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Profile {
    #[serde(rename = "N")]
    pub n: usize,
    pub k: usize,
    /// Frobenius amplitude after the multiple-shooting solve.
    pub a: f64,
    /// Amplitude at the end of the bisection.
    pub a_bisection: f64,
    pub r_grid: Vec<f64>,
    pub h: Vec<f64>,
    pub dh: Vec<f64>,
    pub converged: bool,
    pub brackets: Vec<BracketStep>,
    /// Radius up to which the final bisection bracket agreed to 1e-8.
    pub shooting_reach: f64,
    pub newton_iterations: usize,
    pub options: ProfileOptions,
}

const MAX_DOUBLINGS: usize = 60;
const MAX_BISECTIONS: usize = 200;
const SEGMENT_LENGTH: f64 = 2.0;

/// Solve the boundary-value problem for the profile.
pub fn solve_profile(n: usize, k: usize, opts: &ProfileOptions) -> Result<Profile> {
    if n < 3 || k < 1 {
        return Err(Error::Config(format!("need N >= 3 and k >= 1, got N={n}, k={k}")));
    }
    opts.validate()?;
    let integ = Integrator::new(n, k, opts);
    let grid = radial_grid(opts.r_min, opts.r_max, opts.nodes);
    let mut brackets = Vec::new();
    let mut record = |t: &Trajectory| {
        brackets.push(BracketStep {
            a: t.a,
            outcome: t.outcome,
            radius: t.end_radius(),
        })
    };

    let first = shoot_on_grid(&integ, k, &grid, 1.0, opts.tol)?;
    record(&first);
    let (mut lo, mut hi) = match first.outcome {
        Outcome::Undershoot => (Some(first), None),
        Outcome::Overshoot => (None, Some(first)),
        Outcome::Converged => (Some(first.clone()), Some(first)),
    };
    let mut doublings = 0;
    while lo.is_none() || hi.is_none() {
        doublings += 1;
        if doublings > MAX_DOUBLINGS {
            return Err(Error::Solver(format!("no bracket after {MAX_DOUBLINGS} doublings")));
        }
        let a = match (&lo, &hi) {
            (Some(l), None) => l.a * 2.0,
            (None, Some(h)) => h.a / 2.0,
            _ => unreachable!(),
        };
        let t = shoot_on_grid(&integ, k, &grid, a, opts.tol)?;
        record(&t);
        match t.outcome {
            Outcome::Undershoot => lo = Some(t),
            Outcome::Overshoot => hi = Some(t),
            Outcome::Converged => {
                lo = Some(t.clone());
                hi = Some(t);
            }
        }
    }
    let (mut lo, mut hi) = (lo.expect("bracketed"), hi.expect("bracketed"));

    let mut iterations = 0;
    while lo.a != hi.a {
        let mid = 0.5 * (lo.a + hi.a);
        if mid <= lo.a || mid >= hi.a || hi.a - lo.a <= 2.0 * f64::EPSILON * hi.a {
            break;
        }
        iterations += 1;
        if iterations > MAX_BISECTIONS {
            return Err(Error::Tolerance(format!(
                "bisection bracket [{}, {}] after {MAX_BISECTIONS} iterations",
                lo.a, hi.a
            )));
        }
        let t = shoot_on_grid(&integ, k, &grid, mid, opts.tol)?;
        record(&t);
        match t.outcome {
            Outcome::Undershoot => lo = t,
            Outcome::Overshoot => hi = t,
            Outcome::Converged => {
                lo = t.clone();
                hi = t;
            }
        }
    }
    let a_bisection = 0.5 * (lo.a + hi.a);

    // Nodes on which both bracket ends still agree.
    let common = lo.h.len().min(hi.h.len());
    let reach_index = (0..common)
        .find(|&i| (lo.h[i] - hi.h[i]).abs() > 1e-8)
        .unwrap_or(common)
        .saturating_sub(1);
    let shooting_reach = grid[reach_index];

    let mut guess: Vec<[f64; 2]> = grid
        .iter()
        .map(|&r| {
            let (h, dh) = asymptote(n, k, r);
            [h, dh]
        })
        .collect();
    for (slot, (h, dh)) in guess.iter_mut().zip(lo.h.iter().zip(&lo.dh)).take(reach_index + 1) {
        *slot = [*h, *dh];
    }

    let (a, nodes_h, newton_iterations) = multiple_shooting(&integ, n, k, &grid, a_bisection, &guess)?;
    let profile = Profile {
        n,
        k,
        a,
        a_bisection,
        r_grid: grid,
        h: nodes_h.iter().map(|y| y[0]).collect(),
        dh: nodes_h.iter().map(|y| y[1]).collect(),
        converged: true,
        brackets,
        shooting_reach,
        newton_iterations,
        options: *opts,
    };
    Ok(profile)
}

/// Segment breakpoints (node indices) every `SEGMENT_LENGTH` in radius.
fn breakpoints(grid: &[f64]) -> Vec<usize> {
    let mut out = vec![0];
    let mut next = SEGMENT_LENGTH;
    for (i, &r) in grid.iter().enumerate() {
        if r >= next && i + 1 < grid.len() {
            out.push(i);
            while next <= r {
                next += SEGMENT_LENGTH;
            }
        }
    }
    out.push(grid.len() - 1);
    out
}

type State2 = [f64; 2];

/// Integrate one segment with tangent vectors; returns the node states and
/// the end tangents.
fn integrate_segment(
    integ: &Integrator,
    grid: &[f64],
    start: [f64; 2],
    tangents: &[[f64; 2]],
) -> Result<(Vec<State2>, Vec<State2>)> {
    let mut y = start.to_vec();
    for t in tangents {
        y.extend_from_slice(t);
    }
    let mut state = State {
        y,
        peak: [start[0].abs(), start[1].abs()],
        step: (grid[1] - grid[0]).max(grid[0] * 1e-2),
    };
    let mut nodes = vec![start];
    for w in grid.windows(2) {
        integ.advance(w[0], w[1], &mut state)?;
        nodes.push([state.y[0], state.y[1]]);
    }
    let ends = (0..tangents.len())
        .map(|j| [state.y[2 + 2 * j], state.y[3 + 2 * j]])
        .collect();
    Ok((nodes, ends))
}

/// Newton solve for the amplitude and the interface states of a
/// multiple-shooting discretisation. The far end imposes that `h` minus the
/// three-term asymptote is in the decaying mode
/// `w' = -(sqrt(2) + (N-1)/(2r)) w`.
fn multiple_shooting(
    integ: &Integrator,
    n: usize,
    k: usize,
    grid: &[f64],
    a0: f64,
    guess: &[[f64; 2]],
) -> Result<(f64, Vec<[f64; 2]>, usize)> {
    let bps = breakpoints(grid);
    let segments = bps.len() - 1;
    let unknowns = 2 * segments - 1;
    let mut a = a0;
    let mut iface: Vec<[f64; 2]> = bps[1..segments].iter().map(|&i| guess[i]).collect();
    let r_end = grid[grid.len() - 1];
    let decay = SQRT_2 + (n as f64 - 1.0) / (2.0 * r_end);
    let (h_as, dh_as) = asymptote(n, k, r_end);
    let r0 = grid[0];
    let da0 = [r0.powi(k as i32), k as f64 * r0.powi(k as i32 - 1)];

    for iteration in 1..=30 {
        let mut jac = DMatrix::<f64>::zeros(unknowns, unknowns);
        let mut res = DVector::<f64>::zeros(unknowns);
        let mut all_nodes: Vec<[f64; 2]> = Vec::with_capacity(grid.len());
        for s in 0..segments {
            let seg = &grid[bps[s]..=bps[s + 1]];
            let (start, tangents) = if s == 0 {
                (frobenius_start(a, k, r0), vec![da0])
            } else {
                (iface[s - 1], vec![[1.0, 0.0], [0.0, 1.0]])
            };
            let (nodes, ends) = integrate_segment(integ, seg, start, &tangents)?;
            let end = *nodes.last().expect("segment has nodes");
            if s == 0 {
                all_nodes.extend_from_slice(&nodes);
            } else {
                all_nodes.extend_from_slice(&nodes[1..]);
            }
            // columns: a -> 0, interface j (state at bps[j+1]) -> 1 + 2j
            let source_col = if s == 0 { 0 } else { 1 + 2 * (s - 1) };
            if s + 1 < segments {
                let row = 2 * s;
                let target = iface[s];
                res[row] = target[0] - end[0];
                res[row + 1] = target[1] - end[1];
                jac[(row, 1 + 2 * s)] = 1.0;
                jac[(row + 1, 2 + 2 * s)] = 1.0;
                for (c, t) in ends.iter().enumerate() {
                    jac[(row, source_col + c)] -= t[0];
                    jac[(row + 1, source_col + c)] -= t[1];
                }
            } else {
                let row = unknowns - 1;
                res[row] = (end[1] - dh_as) + decay * (end[0] - h_as);
                for (c, t) in ends.iter().enumerate() {
                    jac[(row, source_col + c)] = t[1] + decay * t[0];
                }
            }
        }
        let Some(delta) = jac.lu().solve(&(-&res)) else {
            return Err(Error::Solver("singular multiple-shooting Jacobian".into()));
        };
        a += delta[0];
        for (j, y) in iface.iter_mut().enumerate() {
            y[0] += delta[1 + 2 * j];
            y[1] += delta[2 + 2 * j];
        }
        let step = delta.amax();
        if step <= 1e-13 * (1.0 + a.abs()) && res.amax() <= 1e-11 {
            return Ok((a, all_nodes, iteration));
        }
        if !a.is_finite() || a <= 0.0 {
            return Err(Error::Solver(format!("multiple shooting diverged (a = {a})")));
        }
    }
    Err(Error::Tolerance("multiple shooting did not converge in 30 iterations".into()))
}

/// Metadata written next to the CSV export.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileMeta {
    #[serde(rename = "N")]
    pub n: usize,
    pub k: usize,
    pub a: f64,
    pub a_bisection: f64,
    pub r_min: f64,
    #[serde(rename = "R_max")]
    pub r_max: f64,
    pub nodes: usize,
    pub residual_sup: f64,
    pub far_field_error: f64,
    pub monotone: bool,
    pub in_corridor: bool,
    pub shooting_reach: f64,
    pub bisection_shots: usize,
    pub newton_iterations: usize,
    pub converged: bool,
}

impl Profile {
    pub fn eigenvalue(&self) -> f64 {
        eigenvalue(self.n, self.k)
    }

    pub fn r_min(&self) -> f64 {
        self.r_grid[0]
    }

    pub fn r_max(&self) -> f64 {
        *self.r_grid.last().expect("non-empty grid")
    }

    /// `dh > 0` at every node.
    pub fn is_monotone(&self) -> bool {
        self.dh.iter().all(|&d| d > 0.0)
    }

    /// `0 < h < 1` at every node past `r_min`.
    pub fn in_corridor(&self) -> bool {
        self.h[1..].iter().all(|&h| h > 0.0 && h < 1.0)
    }

    pub fn far_field_error(&self) -> f64 {
        let r = self.r_max();
        (self.h[self.h.len() - 1] - far_field(self.n, self.k, r)).abs()
    }

    /// Equation residual at an interior node, from interpolated values with
    /// a central difference at the local grid spacing.
    pub fn residual_at(&self, i: usize) -> Result<f64> {
        let r = self.r_grid[i];
        let delta = (r - self.r_grid[i - 1]).min(self.r_grid[i + 1] - r);
        let hp = eval_profile(self, r + delta)?;
        let hm = eval_profile(self, r - delta)?;
        let h0 = self.h[i];
        let d1 = (hp - hm) / (2.0 * delta);
        let d2 = (hp - 2.0 * h0 + hm) / (delta * delta);
        let lambda = self.eigenvalue();
        Ok((-d2 - (self.n as f64 - 1.0) * d1 / r + lambda * h0 / (r * r) - h0 * (1.0 - h0 * h0)).abs())
    }

    pub fn residual_sup(&self) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for i in 1..self.r_grid.len() - 1 {
            worst = worst.max(self.residual_at(i)?);
        }
        Ok(worst)
    }

    pub fn meta(&self) -> Result<ProfileMeta> {
        Ok(ProfileMeta {
            n: self.n,
            k: self.k,
            a: self.a,
            a_bisection: self.a_bisection,
            r_min: self.r_min(),
            r_max: self.r_max(),
            nodes: self.r_grid.len(),
            residual_sup: self.residual_sup()?,
            far_field_error: self.far_field_error(),
            monotone: self.is_monotone(),
            in_corridor: self.in_corridor(),
            shooting_reach: self.shooting_reach,
            bisection_shots: self.brackets.len(),
            newton_iterations: self.newton_iterations,
            converged: self.converged,
        })
    }

    /// CSV with header `r,h,dh`, one row per node, `%.17g` numbers, LF endings.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.r_grid.len() * 64);
        out.push_str("r,h,dh\n");
        for i in 0..self.r_grid.len() {
            let _ = writeln!(out, "{},{},{}", g17(self.r_grid[i]), g17(self.h[i]), g17(self.dh[i]));
        }
        out
    }
}

/// `h(r)`: Frobenius term below `r_min`, cubic Hermite on the grid and the
/// two-term far field beyond `R_max`.
pub fn eval_profile(prof: &Profile, r: f64) -> Result<f64> {
    if !prof.converged {
        return Err(Error::State("profile has not converged".into()));
    }
    if r < 0.0 || r.is_nan() {
        return Err(Error::Domain(format!("radius {r} must be nonnegative")));
    }
    if r == 0.0 {
        return Ok(0.0);
    }
    let grid = &prof.r_grid;
    if r <= grid[0] {
        return Ok(prof.a * r.powi(prof.k as i32));
    }
    if r > prof.r_max() {
        return Ok(far_field(prof.n, prof.k, r));
    }
    let i = grid.partition_point(|&x| x <= r).saturating_sub(1).min(grid.len() - 2);
    let (r0, r1) = (grid[i], grid[i + 1]);
    let w = r1 - r0;
    let t = (r - r0) / w;
    let t2 = t * t;
    let t3 = t2 * t;
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h10 = t3 - 2.0 * t2 + t;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = t3 - t2;
    Ok(h00 * prof.h[i] + h10 * w * prof.dh[i] + h01 * prof.h[i + 1] + h11 * w * prof.dh[i + 1])
}
