//! Adaptive integration with dense output, event location and transport of
//! tangent vectors.
//!
//! The driver works on autonomous systems of fixed dimension `N`. Planar
//! fields use `N = 2`; the first variational system (state plus tangent) uses
//! `N = 4`. Two methods are available: an explicit Dormand-Prince 5(4) pair
//! with a PI step controller and an L-stable SDIRK 4(3) for the thin stiff
//! layer around `y = 0` of a regularized field. [`Method::Auto`] switches
//! between them.

mod methods;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{SmoothField2D, Vec2};
use methods::{dopri5, sdirk4, Trial};

/// An autonomous ODE `y' = f(y)` with Jacobian.
pub trait OdeSystem<const N: usize> {
    fn rhs(&self, y: &[f64; N]) -> [f64; N];
    fn jac(&self, y: &[f64; N]) -> [[f64; N]; N];

    /// `(|distance to the layer|, layer width)` if the system has a stiff layer.
    fn layer(&self, _y: &[f64; N]) -> Option<(f64, f64)> {
        None
    }
}

struct Reversed<'a, S: ?Sized>(&'a S);

impl<const N: usize, S: OdeSystem<N> + ?Sized> OdeSystem<N> for Reversed<'_, S> {
    fn rhs(&self, y: &[f64; N]) -> [f64; N] {
        self.0.rhs(y).map(|v| -v)
    }

    fn jac(&self, y: &[f64; N]) -> [[f64; N]; N] {
        self.0.jac(y).map(|r| r.map(|v| -v))
    }

    fn layer(&self, y: &[f64; N]) -> Option<(f64, f64)> {
        self.0.layer(y)
    }
}

/// A planar field at a fixed parameter value.
pub struct FieldSystem<'a> {
    pub field: &'a dyn SmoothField2D,
    pub alpha: f64,
}

impl OdeSystem<2> for FieldSystem<'_> {
    fn rhs(&self, y: &[f64; 2]) -> [f64; 2] {
        self.field.eval(y[0], y[1], self.alpha)
    }

    fn jac(&self, y: &[f64; 2]) -> [[f64; 2]; 2] {
        self.field.jacobian(y[0], y[1], self.alpha)
    }

    fn layer(&self, y: &[f64; 2]) -> Option<(f64, f64)> {
        self.field.layer_width().map(|e| (y[1].abs(), e))
    }
}

/// State `(x, y)` together with a tangent `(v1, v2)` obeying `v' = J(z) v`.
pub struct VariationalSystem<'a> {
    pub field: &'a dyn SmoothField2D,
    pub alpha: f64,
}

impl OdeSystem<4> for VariationalSystem<'_> {
    fn rhs(&self, y: &[f64; 4]) -> [f64; 4] {
        let f = self.field.eval(y[0], y[1], self.alpha);
        let j = self.field.jacobian(y[0], y[1], self.alpha);
        [
            f[0],
            f[1],
            j[0][0] * y[2] + j[0][1] * y[3],
            j[1][0] * y[2] + j[1][1] * y[3],
        ]
    }

    fn jac(&self, y: &[f64; 4]) -> [[f64; 4]; 4] {
        let (x, yy, alpha) = (y[0], y[1], self.alpha);
        let j = self.field.jacobian(x, yy, alpha);
        let v = [y[2], y[3]];
        // derivative of J v along v, by central differences; only steers Newton
        let nv = v[0].abs().max(v[1].abs());
        let mut hv = [[0.0; 2]; 2];
        if nv > 0.0 {
            let d = 1e-7 * (1.0 + x.abs().max(yy.abs())) / nv;
            let jp = self.field.jacobian(x + d * v[0], yy + d * v[1], alpha);
            let jm = self.field.jacobian(x - d * v[0], yy - d * v[1], alpha);
            for r in 0..2 {
                for c in 0..2 {
                    hv[r][c] = (jp[r][c] - jm[r][c]) / (2.0 * d);
                }
            }
        }
        let mut m = [[0.0; 4]; 4];
        for r in 0..2 {
            for c in 0..2 {
                m[r][c] = j[r][c];
                m[r + 2][c + 2] = j[r][c];
                m[r + 2][c] = hv[r][c];
            }
        }
        m
    }

    fn layer(&self, y: &[f64; 4]) -> Option<(f64, f64)> {
        self.field.layer_width().map(|e| (y[1].abs(), e))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Explicit,
    Implicit,
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IntegOptions {
    pub tol: f64,
    pub event_tol: f64,
    pub max_steps: usize,
    pub method: Method,
    /// Integrate `y' = -f(y)`. Times are reported as elapsed (increasing).
    pub backward: bool,
    /// Keep every accepted step. When false only the endpoints and events are kept.
    pub store: bool,
    /// Upper bound on the step size.
    pub h_max: f64,
}

impl Default for IntegOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            event_tol: 1e-12,
            max_steps: 2_000_000,
            method: Method::Auto,
            backward: false,
            store: true,
            h_max: f64::INFINITY,
        }
    }
}

impl IntegOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }

    pub fn method(mut self, m: Method) -> Self {
        self.method = m;
        self
    }

    pub fn backward(mut self, b: bool) -> Self {
        self.backward = b;
        self
    }

    pub fn store(mut self, s: bool) -> Self {
        self.store = s;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(1e-13..=1e-6).contains(&self.tol) {
            return Err(Error::Domain(format!(
                "tol must lie in [1e-13, 1e-6], got {}",
                self.tol
            )));
        }
        if !(self.event_tol > 0.0) {
            return Err(Error::Domain("event_tol must be positive".into()));
        }
        if !(self.h_max > 0.0) {
            return Err(Error::Domain("h_max must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Up,
    Down,
    Any,
}

impl Direction {
    fn accepts(self, from: f64) -> bool {
        match self {
            Direction::Up => from < 0.0,
            Direction::Down => from > 0.0,
            Direction::Any => true,
        }
    }
}

/// A scalar event function `g` on the state.
pub struct EventSpec<'a, const N: usize> {
    pub g: Box<dyn Fn(&[f64; N]) -> f64 + 'a>,
    pub direction: Direction,
    pub terminal: bool,
    /// Magnitude of `g` used to scale the localization tolerance.
    pub scale: f64,
}

impl<'a, const N: usize> EventSpec<'a, N> {
    pub fn new(g: impl Fn(&[f64; N]) -> f64 + 'a, direction: Direction, terminal: bool) -> Self {
        Self {
            g: Box::new(g),
            direction,
            terminal,
            scale: 1.0,
        }
    }

    /// `g = y - level` (second coordinate).
    pub fn y_level(level: f64, direction: Direction, terminal: bool) -> Self {
        Self::new(move |z| z[1] - level, direction, terminal)
    }

    /// `g = x - level` (first coordinate).
    pub fn x_level(level: f64, direction: Direction, terminal: bool) -> Self {
        Self::new(move |z| z[0] - level, direction, terminal)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EventHit<const N: usize> {
    pub t: f64,
    pub state: [f64; N],
    pub event: usize,
    /// `g` and its time derivative both vanish at the hit.
    pub tangential: bool,
    pub g_dot: f64,
}

/// An integrated trajectory.
#[derive(Debug, Clone)]
pub struct OrbitSegment<const N: usize> {
    /// Elapsed times, strictly increasing from 0.
    pub times: Vec<f64>,
    pub states: Vec<[f64; N]>,
    /// Slopes `dy/dt` (in elapsed time) at the stored points; with the states
    /// they define a cubic Hermite interpolant per step.
    pub slopes: Vec<[f64; N]>,
    pub events: Vec<EventHit<N>>,
    /// Index into `events` of the terminal hit, if integration stopped on one.
    pub terminal: Option<usize>,
    pub backward: bool,
    pub n_steps: usize,
    pub n_rejected: usize,
    pub n_implicit: usize,
    /// Whether every accepted step was stored.
    pub dense: bool,
}

impl<const N: usize> OrbitSegment<N> {
    pub fn final_state(&self) -> [f64; N] {
        *self.states.last().expect("segment has at least one point")
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("segment has at least one point")
    }

    pub fn terminal_hit(&self) -> Option<&EventHit<N>> {
        self.terminal.map(|i| &self.events[i])
    }

    /// Hermite interpolation at elapsed time `t`. Requires a stored segment.
    pub fn interpolate(&self, t: f64) -> Option<[f64; N]> {
        if !self.dense || t < self.times[0] || t > self.final_time() {
            return None;
        }
        let i = match self.times.partition_point(|&s| s <= t) {
            0 => 0,
            n if n >= self.times.len() => self.times.len() - 2,
            n => n - 1,
        };
        if self.times.len() == 1 {
            return Some(self.states[0]);
        }
        let h = self.times[i + 1] - self.times[i];
        let th = (t - self.times[i]) / h;
        Some(hermite(
            &self.states[i],
            &self.slopes[i],
            &self.states[i + 1],
            &self.slopes[i + 1],
            h,
            th,
        ))
    }
}

impl OrbitSegment<4> {
    /// Tangent part of a variational trajectory.
    pub fn tangents(&self) -> Vec<Vec2> {
        self.states.iter().map(|s| [s[2], s[3]]).collect()
    }

    pub fn final_tangent(&self) -> Vec2 {
        let s = self.final_state();
        [s[2], s[3]]
    }
}

pub(crate) fn hermite<const N: usize>(
    y0: &[f64; N],
    f0: &[f64; N],
    y1: &[f64; N],
    f1: &[f64; N],
    h: f64,
    th: f64,
) -> [f64; N] {
    let t2 = th * th;
    let t3 = t2 * th;
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h10 = t3 - 2.0 * t2 + th;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = t3 - t2;
    let mut out = [0.0; N];
    for i in 0..N {
        out[i] = h00 * y0[i] + h10 * h * f0[i] + h01 * y1[i] + h11 * h * f1[i];
    }
    out
}

/// Integrates `sys` from `y0` for elapsed time up to `t_max`.
pub fn solve<const N: usize, S: OdeSystem<N> + ?Sized>(
    sys: &S,
    y0: [f64; N],
    t_max: f64,
    events: &[EventSpec<'_, N>],
    opts: &IntegOptions,
) -> Result<OrbitSegment<N>> {
    opts.validate()?;
    if !(t_max > 0.0) || !t_max.is_finite() {
        return Err(Error::Domain(format!(
            "t_max must be positive, got {t_max}"
        )));
    }
    if y0.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("initial state is not finite".into()));
    }
    if opts.backward {
        Driver::new(&Reversed(sys), t_max, events, opts).run(y0, true)
    } else {
        Driver::new(sys, t_max, events, opts).run(y0, false)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Active {
    Explicit,
    Implicit,
}

struct EventState {
    sign: f64,
    armed_after: f64,
}

struct Candidate {
    event: usize,
    lo: f64,
    hi: f64,
    t_est: f64,
}

struct Driver<'s, 'e, 'a, const N: usize, S: ?Sized> {
    sys: &'s S,
    t_max: f64,
    events: &'e [EventSpec<'a, N>],
    opts: &'e IntegOptions,
    deadband: f64,
}

impl<'s, 'e, 'a, const N: usize, S: OdeSystem<N> + ?Sized> Driver<'s, 'e, 'a, N, S> {
    fn new(sys: &'s S, t_max: f64, events: &'e [EventSpec<'a, N>], opts: &'e IntegOptions) -> Self {
        Self {
            sys,
            t_max,
            events,
            opts,
            deadband: 1e-10 * t_max.max(1.0),
        }
    }

    fn trial(&self, m: Active, y: &[f64; N], f: &[f64; N], h: f64) -> Option<Trial<N>> {
        match m {
            Active::Explicit => Some(dopri5(self.sys, y, f, h, self.opts.tol)),
            Active::Implicit => sdirk4(self.sys, y, f, h, self.opts.tol).ok(),
        }
    }

    fn initial_step(&self, y0: &[f64; N], f0: &[f64; N]) -> f64 {
        let tol = self.opts.tol;
        let norm = |v: &[f64; N]| {
            ((0..N)
                .map(|i| (v[i] / (tol + tol * y0[i].abs())).powi(2))
                .sum::<f64>()
                / N as f64)
                .sqrt()
        };
        let d0 = norm(y0);
        let d1 = norm(f0);
        let hmax = self.opts.h_max.min(self.t_max);
        let mut h = if d0 < 1e-10 || d1 < 1e-10 {
            1e-6
        } else {
            0.01 * d0 / d1
        };
        h = h.min(hmax);
        let mut y1 = *y0;
        for i in 0..N {
            y1[i] += h * f0[i];
        }
        let f1 = self.sys.rhs(&y1);
        let mut d = [0.0; N];
        for i in 0..N {
            d[i] = f1[i] - f0[i];
        }
        let d2 = norm(&d) / h;
        let der = d2.max(d1);
        let h1 = if der <= 1e-15 {
            (h * 1e-3).max(1e-6)
        } else {
            (0.01 / der).powf(0.2)
        };
        let mut h = (100.0 * h).min(h1).max(1e-6 * hmax.min(1.0)).min(hmax);
        if let Some((_, w)) = self.sys.layer(y0) {
            h = h.min(w.max(1e-12) * 10.0);
        }
        h
    }

    fn run(&self, y0: [f64; N], backward: bool) -> Result<OrbitSegment<N>> {
        let sys = self.sys;
        let opts = self.opts;
        let mut seg = OrbitSegment {
            times: vec![0.0],
            states: vec![y0],
            slopes: vec![],
            events: vec![],
            terminal: None,
            backward,
            n_steps: 0,
            n_rejected: 0,
            n_implicit: 0,
            dense: opts.store,
        };
        let mut y = y0;
        let mut f = sys.rhs(&y);
        seg.slopes.push(f);
        let mut t = 0.0;
        let mut es: Vec<EventState> = self
            .events
            .iter()
            .map(|e| {
                let g = (e.g)(&y);
                EventState {
                    sign: self.sign_of(g, e.scale, &y),
                    armed_after: self.deadband,
                }
            })
            .collect();

        let mut active = match opts.method {
            Method::Implicit => Active::Implicit,
            _ => Active::Explicit,
        };
        let mut h = self.initial_step(&y, &f);
        let mut facold: f64 = 1e-4;
        let mut last_rejected = false;
        let mut newton_fails = 0usize;

        loop {
            if seg.n_steps + seg.n_rejected >= opts.max_steps {
                return Err(Error::MaxSteps(opts.max_steps));
            }
            let remaining = self.t_max - t;
            if remaining <= 1e-15 * self.t_max.max(1.0) {
                break;
            }
            if opts.method == Method::Auto {
                if let Some((d, w)) = sys.layer(&y) {
                    match active {
                        Active::Explicit if d < 10.0 * w && h < 10.0 * w => {
                            active = Active::Implicit;
                            facold = 1e-4;
                        }
                        Active::Implicit if d > 20.0 * w => {
                            active = Active::Explicit;
                            facold = 1e-4;
                        }
                        _ => {}
                    }
                }
            }
            h = h.min(opts.h_max);
            let last = h >= remaining;
            if last {
                h = remaining;
            }
            if h < 1e-14 * self.t_max.max(t).max(1.0) {
                return Err(Error::StepUnderflow { t, h });
            }

            let Some(trial) = self.trial(active, &y, &f, h) else {
                newton_fails += 1;
                seg.n_rejected += 1;
                h *= 0.25;
                if newton_fails > 60 {
                    return Err(Error::NewtonStage { t });
                }
                continue;
            };
            let err = trial.err;
            if !(err <= 1.0) {
                seg.n_rejected += 1;
                let fac = match active {
                    Active::Explicit => {
                        if err.is_finite() {
                            (err.powf(0.2 - 0.75 * 0.04) / 0.9).min(5.0)
                        } else {
                            10.0
                        }
                    }
                    Active::Implicit => {
                        if err.is_finite() {
                            (err.powf(0.25) / 0.9).clamp(1.0, 5.0)
                        } else {
                            10.0
                        }
                    }
                };
                h /= fac.max(1.2);
                last_rejected = true;
                continue;
            }
            newton_fails = 0;

            // accepted
            seg.n_steps += 1;
            if active == Active::Implicit {
                seg.n_implicit += 1;
            }
            let t1 = if last { self.t_max } else { t + h };
            let y1 = trial.y1;
            let f1 = trial.f1;

            let stop = self.handle_events(active, t, &y, &f, t1, &y1, &f1, &mut es, &mut seg)?;
            if let Some((te, ye)) = stop {
                let fe = sys.rhs(&ye);
                if te > t {
                    seg.times.push(te);
                    seg.states.push(ye);
                    seg.slopes.push(fe);
                } else {
                    *seg.states.last_mut().expect("nonempty") = ye;
                }
                break;
            }

            if opts.store || last {
                seg.times.push(t1);
                seg.states.push(y1);
                seg.slopes.push(f1);
            }
            t = t1;
            y = y1;
            f = f1;
            if last {
                break;
            }

            // step size for the next step
            let hnew = match active {
                Active::Explicit => {
                    let fac11 = err.max(1e-16).powf(0.2 - 0.75 * 0.04);
                    let fac = (fac11 / facold.powf(0.04) / 0.9).clamp(0.1, 5.0);
                    facold = err.max(1e-4);
                    h / fac
                }
                Active::Implicit => {
                    let fac = 0.9 * err.max(1e-10).powf(-0.25);
                    h * fac.clamp(0.2, 5.0)
                }
            };
            h = if last_rejected { hnew.min(h) } else { hnew };
            last_rejected = false;
        }

        if !opts.store && seg.times.len() > 1 {
            let n = seg.times.len();
            seg.times = vec![seg.times[0], seg.times[n - 1]];
            seg.states = vec![seg.states[0], seg.states[n - 1]];
            seg.slopes = vec![seg.slopes[0], seg.slopes[n - 1]];
        }
        Ok(seg)
    }

    fn ztol(&self, scale: f64, y: &[f64; N]) -> f64 {
        let m = y.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        self.opts.event_tol * scale * (1.0 + m)
    }

    fn sign_of(&self, g: f64, scale: f64, y: &[f64; N]) -> f64 {
        if g.abs() <= self.ztol(scale, y) {
            0.0
        } else {
            g.signum()
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn handle_events(
        &self,
        active: Active,
        t0: f64,
        y0: &[f64; N],
        f0: &[f64; N],
        t1: f64,
        y1: &[f64; N],
        f1: &[f64; N],
        es: &mut [EventState],
        seg: &mut OrbitSegment<N>,
    ) -> Result<Option<(f64, [f64; N])>> {
        if self.events.is_empty() {
            return Ok(None);
        }
        const SUB: usize = 8;
        let h = t1 - t0;
        let samples: Vec<[f64; N]> = (0..=SUB)
            .map(|j| match j {
                0 => *y0,
                j if j == SUB => *y1,
                j => hermite(y0, f0, y1, f1, h, j as f64 / SUB as f64),
            })
            .collect();

        let mut cands = Vec::new();
        for (ei, ev) in self.events.iter().enumerate() {
            let gs: Vec<f64> = samples.iter().map(|s| (ev.g)(s)).collect();
            let mut sign = es[ei].sign;
            let mut last_j = 0usize;
            for j in 1..=SUB {
                let sj = self.sign_of(gs[j], ev.scale, &samples[j]);
                if sj == 0.0 {
                    continue;
                }
                if sign == 0.0 {
                    sign = sj;
                    last_j = j;
                    continue;
                }
                if sj != sign {
                    let lo = last_j as f64 / SUB as f64;
                    let hi = j as f64 / SUB as f64;
                    let th = illinois(
                        |th| (ev.g)(&hermite(y0, f0, y1, f1, h, th)),
                        lo,
                        hi,
                        gs[last_j],
                        gs[j],
                        1e-14,
                        0.0,
                    );
                    let t_est = t0 + th * h;
                    if ev.direction.accepts(sign) && t_est >= es[ei].armed_after {
                        cands.push(Candidate {
                            event: ei,
                            lo,
                            hi,
                            t_est,
                        });
                    }
                    sign = sj;
                }
                last_j = j;
            }
            es[ei].sign = sign;
        }
        if cands.is_empty() {
            return Ok(None);
        }
        cands.sort_by(|a, b| a.t_est.total_cmp(&b.t_est));

        for c in cands {
            let ev = &self.events[c.event];
            let (te, ye) = self.polish(active, t0, y0, f0, h, &c, ev)?;
            let fe = self.sys.rhs(&ye);
            let g_dot = {
                let nf = fe.iter().fold(0.0f64, |a, v| a.max(v.abs()));
                if nf == 0.0 {
                    0.0
                } else {
                    let d = 1e-7 / nf;
                    let mut yp = ye;
                    let mut ym = ye;
                    for i in 0..N {
                        yp[i] += d * fe[i];
                        ym[i] -= d * fe[i];
                    }
                    ((ev.g)(&yp) - (ev.g)(&ym)) / (2.0 * d)
                }
            };
            let tangential = g_dot.abs() <= 1e-6 * ev.scale;
            es[c.event].armed_after = te + self.deadband;
            seg.events.push(EventHit {
                t: te,
                state: ye,
                event: c.event,
                tangential,
                g_dot,
            });
            if ev.terminal {
                seg.terminal = Some(seg.events.len() - 1);
                return Ok(Some((te, ye)));
            }
        }
        Ok(None)
    }

    /// Locates the event on the actual method by re-stepping partial steps.
    fn polish(
        &self,
        active: Active,
        t0: f64,
        y0: &[f64; N],
        f0: &[f64; N],
        h: f64,
        c: &Candidate,
        ev: &EventSpec<'a, N>,
    ) -> Result<(f64, [f64; N])> {
        let step = |th: f64| -> [f64; N] {
            if th <= 0.0 {
                return *y0;
            }
            match self.trial(active, y0, f0, th * h) {
                Some(tr) => tr.y1,
                None => *y0,
            }
        };
        let g_at = |th: f64| (ev.g)(&step(th));
        let (mut a, mut b) = (c.lo, c.hi);
        let (mut ga, mut gb) = (g_at(a), g_at(b));
        if ga * gb > 0.0 || ga.is_nan() || gb.is_nan() {
            // interpolant and method disagree near a tangency; take the interpolant estimate
            let th = (c.t_est - t0) / h;
            a = th;
            b = th;
            ga = 0.0;
            gb = 0.0;
        }
        let th = if a == b {
            a
        } else {
            let ztol = self.ztol(ev.scale, y0);
            illinois(g_at, a, b, ga, gb, 4e-16, ztol)
        };
        Ok((t0 + th * h, step(th)))
    }
}

/// Illinois variant of regula falsi on a sign-changing bracket.
fn illinois(
    g: impl Fn(f64) -> f64,
    mut a: f64,
    mut b: f64,
    mut ga: f64,
    mut gb: f64,
    xtol: f64,
    ftol: f64,
) -> f64 {
    if ga == 0.0 {
        return a;
    }
    if gb == 0.0 {
        return b;
    }
    let mut best = if ga.abs() < gb.abs() { a } else { b };
    for _ in 0..100 {
        let x = if (gb - ga) != 0.0 {
            (a * gb - b * ga) / (gb - ga)
        } else {
            0.5 * (a + b)
        };
        let x = if x > a.min(b) && x < a.max(b) {
            x
        } else {
            0.5 * (a + b)
        };
        let gx = g(x);
        best = x;
        if gx.abs() <= ftol || (b - a).abs() <= xtol * (1.0 + a.abs().max(b.abs())) {
            return x;
        }
        if gx * gb < 0.0 {
            a = b;
            ga = gb;
            b = x;
            gb = gx;
        } else {
            b = x;
            gb = gx;
            ga *= 0.5;
        }
        if gx == 0.0 {
            return x;
        }
    }
    best
}

/// Integrates a planar field.
pub fn integrate(
    field: &dyn SmoothField2D,
    z0: Vec2,
    alpha: f64,
    t_max: f64,
    events: &[EventSpec<'_, 2>],
    opts: &IntegOptions,
) -> Result<OrbitSegment<2>> {
    solve(&FieldSystem { field, alpha }, z0, t_max, events, opts)
}

/// Integrates a planar field with the implicit method only.
pub fn integrate_implicit(
    field: &dyn SmoothField2D,
    z0: Vec2,
    alpha: f64,
    t_max: f64,
    events: &[EventSpec<'_, 2>],
    opts: &IntegOptions,
) -> Result<OrbitSegment<2>> {
    let o = opts.method(Method::Implicit);
    solve(&FieldSystem { field, alpha }, z0, t_max, events, &o)
}

/// Integrates a planar field together with a tangent vector `v0`.
pub fn integrate_variational(
    field: &dyn SmoothField2D,
    z0: Vec2,
    v0: Vec2,
    alpha: f64,
    t_max: f64,
    events: &[EventSpec<'_, 4>],
    opts: &IntegOptions,
) -> Result<OrbitSegment<4>> {
    solve(
        &VariationalSystem { field, alpha },
        [z0[0], z0[1], v0[0], v0[1]],
        t_max,
        events,
        opts,
    )
}

#[cfg(test)]
mod tests;
