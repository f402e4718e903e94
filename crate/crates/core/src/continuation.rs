//! Limit cycles as fixed points of a return map `P(x, alpha)`: shooting Newton,
//! pseudo-arclength continuation, saddle-node and grazing points, the Hopf point
//! of the equilibrium and the `eps`-sweep of the saddle-node gap.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::{log_log_fit, LinearFit};
use crate::integrate::{integrate, Direction, IntegOptions, OrbitSegment};
use crate::maps::{
    field_for, hausdorff_distance, min_y_of_orbit, orbit_polyline, section_transit, MapOptions,
    PoincareSection, ReturnSample,
};
use crate::models::{PwsModel, SmoothField2D, Vec2};
use crate::regfn::RegFn;

/// The return section as a function of `alpha`, always crossed downward.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SectionFamily {
    /// `y = alpha`, the level of the friction equilibrium.
    AlphaLevel,
    Fixed {
        level: f64,
    },
}

impl SectionFamily {
    pub fn at(&self, alpha: f64) -> PoincareSection {
        let level = match *self {
            SectionFamily::AlphaLevel => alpha,
            SectionFamily::Fixed { level } => level,
        };
        PoincareSection::horizontal(level, Direction::Down)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NewtonOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub max_halvings: usize,
    /// Central-difference step in `alpha`.
    pub alpha_step: f64,
    /// Central-difference step in `x` for second derivatives.
    pub x_step: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 50,
            max_halvings: 6,
            alpha_step: 1e-6,
            x_step: 1e-5,
        }
    }
}

/// The return map of one regularized (or, at `eps = 0`, pure `Z+`) system.
#[derive(Debug, Clone)]
pub struct CycleProblem {
    pub model: PwsModel,
    pub regfn: RegFn,
    pub eps: f64,
    pub section: SectionFamily,
    pub map: MapOptions,
    pub newton: NewtonOptions,
}

/// Default map settings for cycle computations.
pub fn cycle_map_options() -> MapOptions {
    let mut m = MapOptions::default();
    m.integ.tol = 1e-12;
    m.t_max = 100.0;
    m
}

impl CycleProblem {
    pub fn new(model: PwsModel, regfn: RegFn, eps: f64, section: SectionFamily) -> Self {
        Self {
            model,
            regfn,
            eps,
            section,
            map: cycle_map_options(),
            newton: NewtonOptions::default(),
        }
    }

    pub fn field(&self) -> Result<Box<dyn SmoothField2D>> {
        field_for(&self.model, self.regfn, self.eps)
    }

    pub fn p(&self, x: f64, alpha: f64) -> Result<ReturnSample> {
        let f = self.field()?;
        self.p_with(&*f, x, alpha)
    }

    fn p_with(&self, f: &dyn SmoothField2D, x: f64, alpha: f64) -> Result<ReturnSample> {
        let s = self.section.at(alpha);
        section_transit(f, alpha, &s, x, &s, None, &self.map)
    }

    /// `dP/dalpha` by central differences.
    pub fn p_alpha(&self, x: f64, alpha: f64) -> Result<f64> {
        let f = self.field()?;
        let h = self.newton.alpha_step;
        let a = self.p_with(&*f, x, alpha + h)?.x_out;
        let b = self.p_with(&*f, x, alpha - h)?.x_out;
        Ok((a - b) / (2.0 * h))
    }

    /// One period of the orbit through `x` on the section, stored densely.
    pub fn cycle_orbit(&self, x: f64, alpha: f64) -> Result<OrbitSegment<2>> {
        let f = self.field()?;
        let s = self.section.at(alpha);
        let ev = [s.event::<2>(true)];
        let opts = IntegOptions {
            store: true,
            ..self.map.integ
        };
        let seg = integrate(&*f, s.point(x), alpha, self.map.t_max, &ev, &opts)?;
        if seg.terminal_hit().is_none() {
            return Err(Error::NoReturn {
                t_max: self.map.t_max,
            });
        }
        Ok(seg)
    }

    pub fn branch_point(&self, x: f64, alpha: f64) -> Result<BranchPoint> {
        let r = self.p(x, alpha)?;
        let orbit = self.cycle_orbit(x, alpha)?;
        let (y_min, _) = min_y_of_orbit(&orbit);
        Ok(BranchPoint {
            alpha,
            x_fix: x,
            multiplier: r.d1,
            y_min,
            flight_time: r.flight_time,
            residual: r.x_out - x,
            fold: false,
        })
    }

    /// Closed polyline of the cycle through `x`.
    pub fn cycle_polyline(&self, x: f64, alpha: f64, n: usize) -> Result<Vec<Vec2>> {
        Ok(orbit_polyline(&self.cycle_orbit(x, alpha)?, n))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchPoint {
    pub alpha: f64,
    pub x_fix: f64,
    /// `P'_x` at the fixed point.
    pub multiplier: f64,
    pub y_min: f64,
    pub flight_time: f64,
    pub residual: f64,
    pub fold: bool,
}

/// Damped Newton on `P(x) - x = 0` at fixed `alpha`.
pub fn cycle_newton(prob: &CycleProblem, x0: f64, alpha: f64) -> Result<BranchPoint> {
    let f = prob.field()?;
    let nt = prob.newton;
    let mut x = x0;
    let mut r = prob.p_with(&*f, x, alpha)?;
    let mut res = r.x_out - x;
    for it in 0..nt.max_iter {
        if res.abs() <= nt.tol {
            return prob.branch_point(x, alpha);
        }
        let slope = r.d1 - 1.0;
        if slope == 0.0 || !slope.is_finite() {
            return Err(Error::Divergence {
                iterations: it,
                residual: res.abs(),
            });
        }
        let full = -res / slope;
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..=nt.max_halvings {
            let xt = x + lambda * full;
            if let Ok(rt) = prob.p_with(&*f, xt, alpha) {
                let rest = rt.x_out - xt;
                if rest.abs() < res.abs() || lambda < 1.5 * 0.5f64.powi(nt.max_halvings as i32) {
                    accepted = Some((xt, rt, rest));
                    break;
                }
            }
            lambda *= 0.5;
        }
        let Some((xn, rn, resn)) = accepted else {
            return Err(Error::Divergence {
                iterations: it + 1,
                residual: res.abs(),
            });
        };
        x = xn;
        r = rn;
        res = resn;
    }
    if res.abs() <= nt.tol {
        return prob.branch_point(x, alpha);
    }
    Err(Error::Divergence {
        iterations: nt.max_iter,
        residual: res.abs(),
    })
}

/// Iterates `P` from `x0` and returns the last iterate (a seed for
/// [`cycle_newton`] on an attracting cycle).
pub fn iterate_map(prob: &CycleProblem, x0: f64, alpha: f64, n: usize) -> Result<f64> {
    let f = prob.field()?;
    let mut x = x0;
    for _ in 0..n {
        let nx = prob.p_with(&*f, x, alpha)?.x_out;
        let done = (nx - x).abs() < 1e-12;
        x = nx;
        if done {
            break;
        }
    }
    Ok(x)
}

/// Follows a cycle of `Z+` backward in time (where a repelling cycle attracts)
/// and returns its last downward crossing of the section.
pub fn backward_seed(prob: &CycleProblem, z0: Vec2, alpha: f64, t_total: f64) -> Result<f64> {
    let f = prob.field()?;
    let s = prob.section.at(alpha);
    // backward in time the section is crossed upward
    let ev = [crate::integrate::EventSpec::new(
        move |z: &[f64; 2]| s.g(z),
        Direction::Up,
        false,
    )];
    let opts = IntegOptions {
        store: false,
        backward: true,
        ..prob.map.integ
    };
    let seg = integrate(&*f, z0, alpha, t_total, &ev, &opts)?;
    let hit = seg
        .events
        .last()
        .ok_or_else(|| Error::NotFound("backward orbit never crossed the section".into()))?;
    Ok(s.coordinate(&hit.state))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BranchOptions {
    pub step_min: f64,
    pub step_max: f64,
    pub step_init: f64,
    pub max_points: usize,
    /// Stop right after the first flagged fold.
    pub stop_at_fold: bool,
    pub max_corrector: usize,
    /// Steps that change the multiplier by more than this are retried shorter.
    pub max_multiplier_jump: f64,
}

impl Default for BranchOptions {
    fn default() -> Self {
        Self {
            step_min: 1e-5,
            step_max: 1e-2,
            step_init: 1e-3,
            max_points: 2000,
            stop_at_fold: false,
            max_corrector: 8,
            max_multiplier_jump: 0.2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub points: Vec<BranchPoint>,
    /// Indices of points flagged as folds.
    pub folds: Vec<usize>,
    pub truncated: bool,
    pub message: Option<String>,
}

struct Corrected {
    x: f64,
    alpha: f64,
    iterations: usize,
}

fn gradient(prob: &CycleProblem, f: &dyn SmoothField2D, x: f64, a: f64) -> Result<(f64, f64, f64)> {
    let r = prob.p_with(f, x, a)?;
    let h = prob.newton.alpha_step;
    let pa = (prob.p_with(f, x, a + h)?.x_out - prob.p_with(f, x, a - h)?.x_out) / (2.0 * h);
    Ok((r.x_out - x, r.d1 - 1.0, pa))
}

fn correct(
    prob: &CycleProblem,
    f: &dyn SmoothField2D,
    pred: (f64, f64),
    tan: (f64, f64),
    max_it: usize,
) -> Result<Corrected> {
    let (mut x, mut a) = pred;
    for it in 0..max_it {
        let (g, gx, ga) = gradient(prob, f, x, a)?;
        let arc = tan.0 * (x - pred.0) + tan.1 * (a - pred.1);
        if g.abs() <= prob.newton.tol && arc.abs() <= 1e-12 {
            return Ok(Corrected {
                x,
                alpha: a,
                iterations: it,
            });
        }
        let det = gx * tan.1 - ga * tan.0;
        if det.abs() < 1e-300 {
            return Err(Error::DegenerateFold("singular corrector matrix".into()));
        }
        let dx = (-g * tan.1 + ga * arc) / det;
        let da = (-gx * arc + g * tan.0) / det;
        x += dx;
        a += da;
        if (dx.abs() + da.abs()) < 1e-14 && g.abs() <= 10.0 * prob.newton.tol {
            return Ok(Corrected {
                x,
                alpha: a,
                iterations: it + 1,
            });
        }
    }
    let g = prob.p_with(f, x, a)?.x_out - x;
    if g.abs() <= prob.newton.tol {
        return Ok(Corrected {
            x,
            alpha: a,
            iterations: max_it,
        });
    }
    Err(Error::Divergence {
        iterations: max_it,
        residual: g.abs(),
    })
}

/// Pseudo-arclength continuation of fixed points of `P` in `(x, alpha)`,
/// heading initially toward `alpha_end`, until `alpha` leaves the interval
/// spanned by `alpha_start` and `alpha_end`.
pub fn trace_branch(
    prob: &CycleProblem,
    alpha_start: f64,
    alpha_end: f64,
    seed: &BranchPoint,
    opts: &BranchOptions,
) -> Result<Branch> {
    let f = prob.field()?;
    let (lo, hi) = (alpha_start.min(alpha_end), alpha_start.max(alpha_end));
    let dir = if alpha_end >= alpha_start { 1.0 } else { -1.0 };
    let (_, gx, ga) = gradient(prob, &*f, seed.x_fix, seed.alpha)?;
    let mut tan = {
        let (tx, ta) = (-ga, gx);
        let n = tx.hypot(ta);
        let s = if ta * dir >= 0.0 { 1.0 } else { -1.0 };
        (s * tx / n, s * ta / n)
    };
    let mut points = vec![BranchPoint {
        fold: false,
        ..*seed
    }];
    let mut folds = Vec::new();
    let mut step = opts.step_init.clamp(opts.step_min, opts.step_max);
    let mut truncated = false;
    let mut message = None;
    while points.len() < opts.max_points {
        let last = *points.last().unwrap();
        let mut halvings = 0;
        let found = loop {
            let pred = (last.x_fix + step * tan.0, last.alpha + step * tan.1);
            let attempt = correct(prob, &*f, pred, tan, opts.max_corrector)
                .and_then(|c| prob.branch_point(c.x, c.alpha).map(|bp| (c, bp)));
            match attempt {
                Ok((c, bp)) => {
                    let jump = (bp.multiplier - last.multiplier).abs();
                    if jump > opts.max_multiplier_jump && step > opts.step_min {
                        step = (step * 0.5).max(opts.step_min);
                        continue;
                    }
                    break Some((c, bp));
                }
                Err(e) => {
                    halvings += 1;
                    step *= 0.5;
                    if halvings > 3 || step < opts.step_min {
                        message = Some(format!("corrector failed at alpha = {}: {e}", last.alpha));
                        break None;
                    }
                }
            }
        };
        let Some((c, mut bp)) = found else {
            truncated = true;
            break;
        };
        // secant tangent for the next predictor
        let (sx, sa) = (c.x - last.x_fix, c.alpha - last.alpha);
        let n = sx.hypot(sa);
        let new_tan = (sx / n, sa / n);
        let turned = new_tan.1 * tan.1 < 0.0;
        let crossed = (bp.multiplier - 1.0) * (last.multiplier - 1.0) < 0.0;
        if turned || crossed {
            bp.fold = true;
        }
        tan = new_tan;
        let out_of_range = bp.alpha < lo || bp.alpha > hi;
        let level = prob.section.at(bp.alpha).origin[1];
        let collapsed = level - bp.y_min < 1e-6;
        points.push(bp);
        if collapsed {
            truncated = true;
            message = Some(format!(
                "cycle shrank onto the equilibrium at alpha = {}",
                bp.alpha
            ));
            break;
        }
        if bp.fold {
            folds.push(points.len() - 1);
            if opts.stop_at_fold {
                break;
            }
        }
        if out_of_range {
            break;
        }
        if c.iterations <= 3 {
            step = (step * 1.5).min(opts.step_max);
        } else if c.iterations >= 6 {
            step = (step * 0.5).max(opts.step_min);
        }
    }
    Ok(Branch {
        points,
        folds,
        truncated,
        message,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldPoint {
    pub eps: f64,
    pub alpha_sn: f64,
    pub x_sn: f64,
    pub multiplier: f64,
    pub p_xx: f64,
    pub p_alpha: f64,
    pub residual: f64,
    pub y_min: f64,
    /// `Gamma_SN(eps)` as a closed polyline.
    pub orbit: Vec<Vec2>,
}

/// Floor below which `P''_xx` or `P'_alpha` count as degenerate.
pub const NONDEGENERACY_FLOOR: f64 = 1e-6;

/// Newton on `{P(x, alpha) - x = 0, P'_x(x, alpha) - 1 = 0}`.
pub fn solve_fold(prob: &CycleProblem, guess: &BranchPoint) -> Result<FoldPoint> {
    let f = prob.field()?;
    let nt = prob.newton;
    let (hx, ha) = (nt.x_step, nt.alpha_step);
    let eval = |x: f64, a: f64| prob.p_with(&*f, x, a);
    let (mut x, mut a) = (guess.x_fix, guess.alpha);
    let mut best: Option<(f64, f64, f64)> = None;
    for it in 0..nt.max_iter {
        let r = eval(x, a)?;
        let g1 = r.x_out - x;
        let g2 = r.d1 - 1.0;
        let res = g1.abs().max(g2.abs());
        if best.is_none_or(|b| res < b.2) {
            best = Some((x, a, res));
        }
        if res <= 1e-9 {
            break;
        }
        let (rpx, rmx) = (eval(x + hx, a)?, eval(x - hx, a)?);
        let (rpa, rma) = (eval(x, a + ha)?, eval(x, a - ha)?);
        let p_xx = (rpx.d1 - rmx.d1) / (2.0 * hx);
        let p_a = (rpa.x_out - rma.x_out) / (2.0 * ha);
        let p_xa = (rpa.d1 - rma.d1) / (2.0 * ha);
        let j = [[r.d1 - 1.0, p_a], [p_xx, p_xa]];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        let scale = (j[0][0].abs() + j[0][1].abs()) * (j[1][0].abs() + j[1][1].abs());
        if det.abs() <= 1e-14 * scale.max(1e-300) {
            return Err(Error::DegenerateFold(format!(
                "singular augmented Jacobian at alpha = {a} (iteration {it})"
            )));
        }
        let mut dx = (-g1 * j[1][1] + g2 * j[0][1]) / det;
        let mut da = (-j[0][0] * g2 + j[1][0] * g1) / det;
        // keep the update local to the fold neighbourhood
        let lim = 1e-2;
        let m = dx.abs().max(da.abs());
        if m > lim {
            dx *= lim / m;
            da *= lim / m;
        }
        let mut moved = false;
        for _ in 0..=nt.max_halvings {
            if eval(x + dx, a + da).is_ok() {
                x += dx;
                a += da;
                moved = true;
                break;
            }
            dx *= 0.5;
            da *= 0.5;
        }
        if !moved {
            break;
        }
    }
    let (x, a, res) = best.expect("at least one iteration");
    if res > 1e-9 {
        return Err(Error::Divergence {
            iterations: nt.max_iter,
            residual: res,
        });
    }
    let r = eval(x, a)?;
    let p_xx = (eval(x + hx, a)?.d1 - eval(x - hx, a)?.d1) / (2.0 * hx);
    let p_alpha = (eval(x, a + ha)?.x_out - eval(x, a - ha)?.x_out) / (2.0 * ha);
    if p_xx.abs() < NONDEGENERACY_FLOOR || p_alpha.abs() < NONDEGENERACY_FLOOR {
        return Err(Error::DegenerateFold(format!(
            "P_xx = {p_xx:e}, P_alpha = {p_alpha:e} at alpha = {a}"
        )));
    }
    let orbit_seg = prob.cycle_orbit(x, a)?;
    let (y_min, _) = min_y_of_orbit(&orbit_seg);
    Ok(FoldPoint {
        eps: prob.eps,
        alpha_sn: a,
        x_sn: x,
        multiplier: r.d1,
        p_xx,
        p_alpha,
        residual: res,
        y_min,
        orbit: orbit_polyline(&orbit_seg, 600),
    })
}

/// Fixed points of `P(., alpha)` found from sign changes of `P(x) - x` on an
/// `n`-point grid of `[x_lo, x_hi]`, each polished by [`cycle_newton`].
pub fn fixed_points_scan(
    prob: &CycleProblem,
    alpha: f64,
    x_lo: f64,
    x_hi: f64,
    n: usize,
) -> Result<Vec<BranchPoint>> {
    let f = prob.field()?;
    let xs: Vec<f64> = (0..n)
        .map(|i| x_lo + (x_hi - x_lo) * i as f64 / (n - 1) as f64)
        .collect();
    let g: Vec<Option<f64>> = xs
        .par_iter()
        .map(|&x| prob.p_with(&*f, x, alpha).ok().map(|r| r.x_out - x))
        .collect();
    let mut found: Vec<BranchPoint> = Vec::new();
    for i in 0..n - 1 {
        let (Some(a), Some(b)) = (g[i], g[i + 1]) else {
            continue;
        };
        if a * b <= 0.0 {
            let x0 = xs[i] + (xs[i + 1] - xs[i]) * a / (a - b);
            if let Ok(bp) = cycle_newton(prob, x0, alpha) {
                if found.iter().all(|p| (p.x_fix - bp.x_fix).abs() > 1e-7) {
                    found.push(bp);
                }
            }
        }
    }
    found.sort_by(|a, b| a.x_fix.total_cmp(&b.x_fix));
    Ok(found)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrazingPoint {
    pub alpha_star: f64,
    pub x_star: f64,
    pub y_min: f64,
    /// `d y_min / d(alpha_star - alpha)` at the grazing point; positive when the
    /// cycle lifts off `y = 0` as `alpha` moves below `alpha_star`.
    pub y_prime: f64,
    /// Second difference of `y` at the sampled minimum of the cycle.
    pub min_curvature: f64,
    pub iterations: usize,
    pub gamma_0: Vec<Vec2>,
}

/// Secant iteration on `alpha -> y_min(Gamma_alpha)` for the pure `Z+` cycle,
/// starting from the bracketing branch points `a` and `b`.
pub fn grazing_alpha(
    prob: &CycleProblem,
    a: &BranchPoint,
    b: &BranchPoint,
) -> Result<GrazingPoint> {
    if prob.eps != 0.0 {
        return Err(Error::Domain(
            "grazing is computed for the pure Z+ system (eps = 0)".into(),
        ));
    }
    let (mut p0, mut p1) = (*a, *b);
    let mut iterations = 0;
    let mut slope;
    while p1.y_min.abs() > 1e-8 {
        iterations += 1;
        if iterations > 60 {
            return Err(Error::Divergence {
                iterations,
                residual: p1.y_min.abs(),
            });
        }
        slope = (p1.y_min - p0.y_min) / (p1.alpha - p0.alpha);
        if slope == 0.0 || !slope.is_finite() {
            return Err(Error::NotFound("y_min does not vary with alpha".into()));
        }
        let a_new = p1.alpha - p1.y_min / slope;
        // x seed by linear extrapolation along the branch
        let xs = p1.x_fix + (p1.x_fix - p0.x_fix) / (p1.alpha - p0.alpha) * (a_new - p1.alpha);
        let p2 = cycle_newton(prob, xs, a_new)?;
        p0 = p1;
        p1 = p2;
    }
    if iterations > 0 && p1.alpha != p0.alpha {
        // secant slope through the last two iterates
        slope = (p1.y_min - p0.y_min) / (p1.alpha - p0.alpha);
    } else {
        let h = 1e-4;
        let q = cycle_newton(prob, p1.x_fix, p1.alpha - h)?;
        slope = (p1.y_min - q.y_min) / h;
    }
    let orbit = prob.cycle_orbit(p1.x_fix, p1.alpha)?;
    let min_curvature = min_second_difference(&orbit);
    Ok(GrazingPoint {
        alpha_star: p1.alpha,
        x_star: p1.x_fix,
        y_min: p1.y_min,
        y_prime: -slope,
        min_curvature,
        iterations,
        gamma_0: orbit_polyline(&orbit, 600),
    })
}

/// Second difference `y(t-h) - 2 y(t) + y(t+h)` around the minimum of `y`.
fn min_second_difference(orbit: &OrbitSegment<2>) -> f64 {
    let (_, t) = min_y_of_orbit(orbit);
    let h = 1e-2 * orbit.final_time();
    let at = |s: f64| {
        orbit
            .interpolate(s.clamp(0.0, orbit.final_time()))
            .map(|z| z[1])
    };
    match (at(t - h), at(t), at(t + h)) {
        (Some(a), Some(b), Some(c)) => a - 2.0 * b + c,
        _ => f64::NAN,
    }
}

/// Finds a branch point on each side of `y_min = 0` by continuing from `seed`.
pub fn bracket_grazing(
    prob: &CycleProblem,
    seed: &BranchPoint,
    alpha_end: f64,
    opts: &BranchOptions,
) -> Result<(BranchPoint, BranchPoint)> {
    let br = trace_branch(prob, seed.alpha, alpha_end, seed, opts)?;
    for w in br.points.windows(2) {
        if w[0].y_min * w[1].y_min <= 0.0 {
            return Ok((w[0], w[1]));
        }
    }
    Err(Error::NotFound(format!(
        "y_min does not cross 0 for alpha in [{}, {alpha_end}]",
        seed.alpha
    )))
}

/// Settings for [`find_grazing`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GrazingSearch {
    /// `alpha` at which the repelling cycle is seeded.
    pub alpha_seed: f64,
    /// Offset in `x` from the equilibrium of the backward orbit's start.
    pub x_offset: f64,
    pub t_back: f64,
    pub alpha_end: f64,
    pub branch: BranchOptions,
}

impl Default for GrazingSearch {
    fn default() -> Self {
        Self {
            alpha_seed: 0.234,
            x_offset: 0.02,
            t_back: 200.0,
            alpha_end: 0.3,
            branch: BranchOptions::default(),
        }
    }
}

/// Grazing cycle of the pure `Z+` system: the repelling cycle around the
/// equilibrium (near `eq_guess`) is seeded by a backward orbit, continued to
/// `y_min = 0` and polished by [`grazing_alpha`]. Also returns the seed.
pub fn find_grazing(
    prob: &CycleProblem,
    search: &GrazingSearch,
    eq_guess: Vec2,
) -> Result<(GrazingPoint, BranchPoint)> {
    let f = prob.field()?;
    let a = search.alpha_seed;
    let eq = equilibrium(&*f, a, eq_guess)?;
    let x0 = backward_seed(prob, [eq[0] + search.x_offset, eq[1]], a, search.t_back)?;
    let seed = cycle_newton(prob, x0, a)?;
    let (l, r) = bracket_grazing(prob, &seed, search.alpha_end, &search.branch)?;
    Ok((grazing_alpha(prob, &l, &r)?, seed))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HopfPoint {
    pub alpha_h: f64,
    pub x: f64,
    pub y: f64,
    /// Determinant of the Jacobian at the equilibrium; positive for a Hopf point.
    pub det: f64,
}

/// Equilibrium of the field near `guess` by 2-d Newton.
pub fn equilibrium(field: &dyn SmoothField2D, alpha: f64, guess: Vec2) -> Result<Vec2> {
    let mut z = guess;
    for it in 0..60 {
        let v = field.eval(z[0], z[1], alpha);
        if v[0].abs().max(v[1].abs()) < 1e-14 {
            return Ok(z);
        }
        let j = field.jacobian(z[0], z[1], alpha);
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det == 0.0 {
            return Err(Error::Divergence {
                iterations: it,
                residual: v[0].abs().max(v[1].abs()),
            });
        }
        z[0] -= (j[1][1] * v[0] - j[0][1] * v[1]) / det;
        z[1] -= (-j[1][0] * v[0] + j[0][0] * v[1]) / det;
    }
    let v = field.eval(z[0], z[1], alpha);
    let r = v[0].abs().max(v[1].abs());
    if r < 1e-12 {
        Ok(z)
    } else {
        Err(Error::Divergence {
            iterations: 60,
            residual: r,
        })
    }
}

/// `alpha_H`: where the trace of the Jacobian at the continued equilibrium
/// changes sign inside `window`. `guess(alpha)` seeds the equilibrium.
pub fn equilibrium_hopf(
    model: &PwsModel,
    regfn: RegFn,
    eps: f64,
    window: [f64; 2],
    guess: impl Fn(f64) -> Vec2,
) -> Result<HopfPoint> {
    let field = field_for(model, regfn, eps)?;
    let trace_at = |a: f64| -> Result<(f64, Vec2)> {
        let z = equilibrium(&*field, a, guess(a))?;
        let j = field.jacobian(z[0], z[1], a);
        Ok((j[0][0] + j[1][1], z))
    };
    let n = 40;
    let grid: Vec<f64> = (0..=n)
        .map(|i| window[0] + (window[1] - window[0]) * i as f64 / n as f64)
        .collect();
    let mut prev: Option<(f64, f64)> = None;
    for &a in &grid {
        let (tr, _) = trace_at(a)?;
        if let Some((pa, ptr)) = prev {
            if ptr * tr <= 0.0 {
                let (mut lo, mut hi, mut tlo) = (pa, a, ptr);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    let (tm, _) = trace_at(mid)?;
                    if tm * tlo <= 0.0 {
                        hi = mid;
                    } else {
                        lo = mid;
                        tlo = tm;
                    }
                }
                let ah = 0.5 * (lo + hi);
                let (_, z) = trace_at(ah)?;
                let j = field.jacobian(z[0], z[1], ah);
                return Ok(HopfPoint {
                    alpha_h: ah,
                    x: z[0],
                    y: z[1],
                    det: j[0][0] * j[1][1] - j[0][1] * j[1][0],
                });
            }
        }
        prev = Some((a, tr));
    }
    Err(Error::NotFound(format!(
        "no trace sign change for alpha in [{}, {}]",
        window[0], window[1]
    )))
}

/// Settings of the per-`eps` fold search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FoldSearch {
    /// Continuation starts at `alpha_seed` on the attracting (sliding) cycle.
    pub alpha_seed: f64,
    /// Section coordinate from which `P` is iterated onto the attracting cycle.
    pub x_seed: f64,
    pub seed_iterations: usize,
    /// Upper end of the continuation window.
    pub alpha_max: f64,
    /// Caps the arclength step at `step_scale * eps^{2k/(2k+1)}` (the width
    /// of the fold region); `None` leaves `branch.step_max` alone.
    pub step_scale: Option<f64>,
    pub branch: BranchOptions,
}

impl Default for FoldSearch {
    fn default() -> Self {
        Self {
            alpha_seed: 0.15,
            x_seed: -0.5,
            seed_iterations: 40,
            alpha_max: 0.5,
            step_scale: Some(2.0),
            branch: BranchOptions {
                stop_at_fold: true,
                ..BranchOptions::default()
            },
        }
    }
}

/// Locates the saddle-node of cycles for one `eps`: attracting cycle at
/// `alpha_seed`, continuation in increasing `alpha` to the first fold, then
/// [`solve_fold`].
pub fn fold_for_eps(prob: &CycleProblem, search: &FoldSearch) -> Result<(FoldPoint, Branch)> {
    let xs = iterate_map(
        prob,
        search.x_seed,
        search.alpha_seed,
        search.seed_iterations,
    )?;
    let seed = cycle_newton(prob, xs, search.alpha_seed)?;
    let mut bopts = search.branch;
    if let (Some(sc), Some(p)) = (search.step_scale, prob.regfn.scaling_exponent()) {
        if prob.eps > 0.0 {
            bopts.step_max = bopts
                .step_max
                .min(sc * prob.eps.powf(p))
                .max(bopts.step_min);
            bopts.step_init = bopts.step_init.min(bopts.step_max);
        }
    }
    let br = trace_branch(prob, search.alpha_seed, search.alpha_max, &seed, &bopts)?;
    let Some(&i) = br.folds.first() else {
        return Err(Error::NotFound(format!(
            "no fold for eps = {} up to alpha = {}{}",
            prob.eps,
            search.alpha_max,
            br.message
                .as_deref()
                .map(|m| format!(" ({m})"))
                .unwrap_or_default()
        )));
    };
    // of the two points around the fold, start from the one whose multiplier is nearer 1
    let g = if i > 0
        && (br.points[i - 1].multiplier - 1.0).abs() < (br.points[i].multiplier - 1.0).abs()
    {
        br.points[i - 1]
    } else {
        br.points[i]
    };
    let fp = solve_fold(prob, &g)?;
    Ok((fp, br))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingPoint {
    pub eps: f64,
    pub alpha_sn: f64,
    pub gap: f64,
    pub hausdorff: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub alpha_star: f64,
    pub points: Vec<ScalingPoint>,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub folds: Vec<FoldPoint>,
    pub failures: Vec<(f64, String)>,
}

/// Saddle-node gaps `alpha_star - alpha_SN(eps)` over `eps_list`, in parallel,
/// with a log-log fit. `gamma_0` (if given) is the grazing cycle used for the
/// Hausdorff distances.
pub fn scaling_sweep(
    base: &CycleProblem,
    eps_list: &[f64],
    alpha_star: f64,
    gamma_0: Option<&[Vec2]>,
    search: &FoldSearch,
) -> ScalingFit {
    let results: Vec<(f64, Result<FoldPoint>)> = eps_list
        .par_iter()
        .map(|&eps| {
            let prob = CycleProblem {
                eps,
                ..base.clone()
            };
            (eps, fold_for_eps(&prob, search).map(|(f, _)| f))
        })
        .collect();
    let mut points = Vec::new();
    let mut folds = Vec::new();
    let mut failures = Vec::new();
    for (eps, r) in results {
        match r {
            Ok(fp) => {
                let gap = alpha_star - fp.alpha_sn;
                if !(gap > 0.0) {
                    failures.push((eps, format!("non-positive gap {gap:e}")));
                }
                let hausdorff = gamma_0.and_then(|g| hausdorff_distance(&fp.orbit, g).ok());
                points.push(ScalingPoint {
                    eps,
                    alpha_sn: fp.alpha_sn,
                    gap,
                    hausdorff,
                });
                folds.push(fp);
            }
            Err(e) => failures.push((eps, e.to_string())),
        }
    }
    let usable: Vec<&ScalingPoint> = points.iter().filter(|p| p.gap > 0.0).collect();
    let fit = if usable.len() >= 2 {
        let xs: Vec<f64> = usable.iter().map(|p| p.eps).collect();
        let ys: Vec<f64> = usable.iter().map(|p| p.gap).collect();
        log_log_fit(&xs, &ys)
    } else {
        LinearFit {
            slope: f64::NAN,
            intercept: f64::NAN,
            r_squared: f64::NAN,
        }
    };
    ScalingFit {
        alpha_star,
        points,
        slope: fit.slope,
        intercept: fit.intercept,
        r_squared: fit.r_squared,
        folds,
        failures,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{friction_props, make_friction, FrictionParams};

    fn friction(eps: f64) -> (CycleProblem, FrictionParams) {
        let p = FrictionParams::default();
        let m = make_friction(p).unwrap();
        (
            CycleProblem::new(m, RegFn::smooth_sqrt(), eps, SectionFamily::AlphaLevel),
            p,
        )
    }

    /// Classical RK4 on `Z+` of the friction model.
    fn rk4_zplus(p: &FrictionParams, alpha: f64, z0: Vec2, t: f64, n: usize) -> Vec<Vec2> {
        let f = |z: Vec2| [z[1] - alpha, -z[0] - p.mu(z[1])];
        let h = t / n as f64;
        let mut z = z0;
        let mut out = vec![z];
        for _ in 0..n {
            let k1 = f(z);
            let k2 = f([z[0] + 0.5 * h * k1[0], z[1] + 0.5 * h * k1[1]]);
            let k3 = f([z[0] + 0.5 * h * k2[0], z[1] + 0.5 * h * k2[1]]);
            let k4 = f([z[0] + h * k3[0], z[1] + h * k3[1]]);
            for i in 0..2 {
                z[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            out.push(z);
        }
        out
    }

    #[test]
    fn newton_on_attracting_cycle() {
        let (pr, _) = friction(1e-3);
        let xs = iterate_map(&pr, -0.5, 0.2, 40).unwrap();
        let bp = cycle_newton(&pr, xs, 0.2).unwrap();
        assert!(bp.residual.abs() <= 1e-10);
        assert!(bp.multiplier < 1.0);
        assert!(bp.y_min <= 10.0 * pr.eps);
        let back = cycle_newton(&pr, bp.x_fix + 1e-3, 0.2).unwrap();
        assert!((back.x_fix - bp.x_fix).abs() < 1e-9);
    }

    #[test]
    fn grazing_of_pure_zplus() {
        let (z, p) = friction(0.0);
        let y0 = friction_props(&p).unwrap().y0;
        let (g, seed) = find_grazing(&z, &GrazingSearch::default(), [-p.mu(0.234), 0.234]).unwrap();
        assert!(seed.multiplier > 1.0);
        assert!(g.y_min.abs() <= 1e-8);
        assert!(g.y_prime > 0.0);
        assert!(g.min_curvature > 0.0);
        assert!(g.alpha_star > y0 && g.alpha_star < 0.3);
        // one RK4 period from the grazing point closes up and touches y = 0
        let orbit = rk4_zplus(&p, g.alpha_star, [g.x_star, g.alpha_star], 6.5, 65_000);
        let ymin = orbit.iter().map(|z| z[1]).fold(f64::INFINITY, f64::min);
        assert!(ymin.abs() < 1e-6, "rk4 y_min {ymin}");
        let back = orbit
            .windows(2)
            .skip(1000)
            .find(|w| w[0][1] > g.alpha_star && w[1][1] <= g.alpha_star)
            .unwrap();
        let s = (back[0][1] - g.alpha_star) / (back[0][1] - back[1][1]);
        let x = back[0][0] + s * (back[1][0] - back[0][0]);
        assert!((x - g.x_star).abs() < 1e-6);
    }

    #[test]
    fn hopf_of_equilibrium() {
        let p = FrictionParams::default();
        let m = make_friction(p).unwrap();
        let y0 = friction_props(&p).unwrap().y0;
        let guess = |a: f64| [-p.mu(a), a];
        let h0 = equilibrium_hopf(&m, RegFn::smooth_sqrt(), 0.0, [0.1, 0.3], guess).unwrap();
        assert!((h0.alpha_h - y0).abs() < 1e-10);
        assert!(h0.det > 0.0);
        let h = equilibrium_hopf(&m, RegFn::smooth_sqrt(), 1e-3, [0.1, 0.3], guess).unwrap();
        assert!((h.alpha_h - y0).abs() <= 1e-2);
        assert!(h.det > 0.0);
        // the shift is linear in eps for the algebraic tail as well
        let shift = |eps: f64| {
            let h =
                equilibrium_hopf(&m, RegFn::goldbeter_koshland(), eps, [0.1, 0.3], guess).unwrap();
            assert!(h.det > 0.0);
            h.alpha_h - y0
        };
        let r = shift(1e-4) / shift(5e-5);
        assert!((r - 2.0).abs() < 0.05, "ratio {r}");
    }

    #[test]
    fn fold_at_small_eps() {
        let (pr, p) = friction(1e-3);
        let (fp, br) = fold_for_eps(&pr, &FoldSearch::default()).unwrap();
        assert!(!br.folds.is_empty());
        assert!(fp.residual <= 1e-9);
        assert!((fp.multiplier - 1.0).abs() <= 1e-8);
        assert!(fp.p_xx.abs() >= NONDEGENERACY_FLOOR);
        assert!(fp.p_alpha.abs() >= NONDEGENERACY_FLOOR);
        // below the grazing value of the pure Z+ system
        let (z, _) = friction(0.0);
        let (g, _) = find_grazing(&z, &GrazingSearch::default(), [-p.mu(0.234), 0.234]).unwrap();
        assert!(fp.alpha_sn < g.alpha_star);
        let (lo, hi) = (fp.x_sn - 0.1, fp.x_sn + 0.1);
        let below = fixed_points_scan(&pr, fp.alpha_sn - 1e-3, lo, hi, 41).unwrap();
        let above = fixed_points_scan(&pr, fp.alpha_sn + 1e-3, lo, hi, 41).unwrap();
        assert_eq!(below.len(), 2);
        assert!(above.is_empty());
        assert!(below.iter().any(|b| b.multiplier < 1.0));
        assert!(below.iter().any(|b| b.multiplier > 1.0));
    }

    #[test]
    fn branch_is_deterministic_and_reversible() {
        let (pr, _) = friction(1e-3);
        let xs = iterate_map(&pr, -0.5, 0.2, 40).unwrap();
        let seed = cycle_newton(&pr, xs, 0.2).unwrap();
        let opts = BranchOptions {
            max_points: 8,
            ..BranchOptions::default()
        };
        let a = trace_branch(&pr, 0.2, 0.23, &seed, &opts).unwrap();
        let b = trace_branch(&pr, 0.2, 0.23, &seed, &opts).unwrap();
        assert_eq!(a, b);
        let end = *a.points.last().unwrap();
        let rev = trace_branch(&pr, end.alpha, 0.2, &end, &opts).unwrap();
        // every point of the reversed branch is on the forward branch
        for q in &rev.points {
            let w = a
                .points
                .windows(2)
                .find(|w| (w[0].alpha - q.alpha) * (w[1].alpha - q.alpha) <= 0.0);
            let Some(w) = w else { continue };
            let s = (q.alpha - w[0].alpha) / (w[1].alpha - w[0].alpha);
            let guess = w[0].x_fix + s * (w[1].x_fix - w[0].x_fix);
            let on = cycle_newton(&pr, guess, q.alpha).unwrap();
            assert!((on.x_fix - q.x_fix).abs() < 1e-8);
        }
        assert!(rev.points.last().unwrap().alpha <= 0.2 + 1e-2);
    }
}
