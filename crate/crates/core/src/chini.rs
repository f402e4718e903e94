//! The Chini system `u' = 1, v' = 2u + v^{-k}` and its section map
//! `U(u0) = u0 + T(u0)` from `{v = c, v' < 0}` back to `{v = c, v' > 0}`.
//!
//! First and second variations `v1 = dv/du0`, `v2 = d^2 v/du0^2` are carried
//! along with the state:
//!
//! ```text
//! v1' = 2 - k v^{-k-1} v1,                                   v1(0) = 0
//! v2' = -k v^{-k-1} v2 + k (k+1) v^{-k-2} v1^2,              v2(0) = 0
//! ```
//!
//! `z = v' - v1` obeys `z' = -k v^{-k-1} z` and is integrated on its own, so
//! `U' = z(T) / v'(T)` carries no cancellation when `U'` is tiny. Likewise
//! `z1 = dz/du0` obeys `z1' = -k v^{-k-1} z1 + k (k+1) v^{-k-2} v1 z`, `z1(0) = 2`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrate::{solve, Direction, EventSpec, IntegOptions, OdeSystem};

/// Abort when `v` falls below this level.
pub const V_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChiniConfig {
    pub k: u32,
    pub c: f64,
    pub u0: f64,
}

impl ChiniConfig {
    /// `u` where the `v`-nullcline meets `v = c`.
    pub fn boundary(k: u32, c: f64) -> f64 {
        -0.5 * c.powi(-(k as i32))
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::Domain("k must be a positive integer".into()));
        }
        if !(self.c > 0.0) || !self.c.is_finite() {
            return Err(Error::Domain(format!("c must be positive, got {}", self.c)));
        }
        let vdot = 2.0 * self.u0 + self.c.powi(-(self.k as i32));
        if !(vdot <= 0.0) {
            return Err(Error::Domain(format!(
                "start must lie on the incoming section (2 u0 + c^-k = {vdot} > 0)"
            )));
        }
        Ok(())
    }

    fn vdot0(&self) -> f64 {
        2.0 * self.u0 + self.c.powi(-(self.k as i32))
    }
}

struct Chini {
    k: f64,
}

impl OdeSystem<6> for Chini {
    fn rhs(&self, y: &[f64; 6]) -> [f64; 6] {
        let k = self.k;
        let [u, v, v1, v2, z, z1] = *y;
        let a = v.powf(-k - 1.0);
        let b = v.powf(-k - 2.0);
        [
            1.0,
            2.0 * u + v.powf(-k),
            2.0 - k * a * v1,
            -k * a * v2 + k * (k + 1.0) * b * v1 * v1,
            -k * a * z,
            -k * a * z1 + k * (k + 1.0) * b * v1 * z,
        ]
    }

    fn jac(&self, y: &[f64; 6]) -> [[f64; 6]; 6] {
        let k = self.k;
        let [_, v, v1, v2, z, z1] = *y;
        let kk = k * (k + 1.0);
        let a = v.powf(-k - 1.0);
        let b = v.powf(-k - 2.0);
        let c3 = v.powf(-k - 3.0);
        [
            [0.0; 6],
            [2.0, -k * a, 0.0, 0.0, 0.0, 0.0],
            [0.0, kk * b * v1, -k * a, 0.0, 0.0, 0.0],
            [
                0.0,
                kk * b * v2 - kk * (k + 2.0) * c3 * v1 * v1,
                2.0 * kk * b * v1,
                -k * a,
                0.0,
                0.0,
            ],
            [0.0, kk * b * z, 0.0, 0.0, -k * a, 0.0],
            [
                0.0,
                kk * b * z1 - kk * (k + 2.0) * c3 * v1 * z,
                kk * b * z,
                0.0,
                kk * b * v1,
                -k * a,
            ],
        ]
    }
}

/// Everything measured at the return to `v = c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiniReturn {
    pub u0: f64,
    pub t: f64,
    pub u: f64,
    /// `v'` at the return.
    pub vdot: f64,
    pub v1: f64,
    pub v2: f64,
    /// `w = 2 v' - v1` at the return.
    pub w: f64,
    /// `z = v' - v1` at the return.
    pub z: f64,
    pub z1: f64,
    pub min_v: f64,
}

fn chini_run(cfg: &ChiniConfig, tol: f64) -> Result<ChiniReturn> {
    cfg.validate()?;
    if cfg.vdot0() == 0.0 {
        return Ok(ChiniReturn {
            u0: cfg.u0,
            t: 0.0,
            u: cfg.u0,
            vdot: 0.0,
            v1: 0.0,
            v2: 0.0,
            w: 0.0,
            z: 0.0,
            z1: 0.0,
            min_v: cfg.c,
        });
    }
    let c = cfg.c;
    let sys = Chini { k: cfg.k as f64 };
    let (u0, vdot0) = (cfg.u0, cfg.vdot0());
    // (v - c) / t is nonzero at t = 0, so the return is seen even when the dip is tiny
    let events = [
        EventSpec::new(
            move |y: &[f64; 6]| {
                let t = y[0] - u0;
                if t.abs() < 1e-300 {
                    vdot0
                } else {
                    (y[1] - c) / t
                }
            },
            Direction::Up,
            true,
        ),
        EventSpec::new(|y: &[f64; 6]| y[1] - V_FLOOR, Direction::Down, true),
    ];
    let t_max = 100.0 + 10.0 * (cfg.u0.abs() + c.sqrt());
    let opts = IntegOptions {
        tol,
        method: crate::integrate::Method::Explicit,
        ..IntegOptions::default()
    };
    let seg = solve(
        &sys,
        [cfg.u0, c, 0.0, 0.0, vdot0, 2.0],
        t_max,
        &events,
        &opts,
    )?;
    let hit = seg.terminal_hit().ok_or(Error::NoReturn { t_max })?;
    if hit.event == 1 {
        return Err(Error::Singularity(format!(
            "v fell below {V_FLOOR} at u = {}",
            hit.state[0]
        )));
    }
    let [u, v, v1, v2, z, z1] = hit.state;
    let vdot = 2.0 * u + v.powi(-(cfg.k as i32));
    let min_v = seg.states.iter().fold(c, |m, s| m.min(s[1]));
    Ok(ChiniReturn {
        u0: cfg.u0,
        t: hit.t,
        u,
        vdot,
        v1,
        v2,
        w: 2.0 * vdot - v1,
        z,
        z1,
        min_v,
    })
}

/// `(U, T)` for the start `(u0, c)`.
pub fn chini_transition(cfg: &ChiniConfig, tol: f64) -> Result<(f64, f64)> {
    let r = chini_run(cfg, tol)?;
    Ok((r.u, r.t))
}

/// Derivatives of the section map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiniDerivatives {
    pub u: f64,
    pub t: f64,
    pub t1: f64,
    pub t2: f64,
    pub u1: f64,
    pub u2: f64,
    pub ret: ChiniReturn,
}

/// `U'` and `U''` from the variational flows.
///
/// Differentiating `v(T(u0), u0) = c` twice gives
/// `T'' = -(v_tt T'^2 + 2 v_tu T' + v2) / v_t`, with `v_tt = 2 - k v^{-k-1} v_t`
/// and `v_tu = 2 - k v^{-k-1} v1`. `U''` itself is taken from the quotient
/// `U' = z / v_t`, which stays accurate when `U''` is exponentially small.
pub fn chini_derivatives(cfg: &ChiniConfig, tol: f64) -> Result<ChiniDerivatives> {
    let r = chini_run(cfg, tol)?;
    if r.vdot.abs() < 1e-12 {
        return Err(Error::DerivativeUndefined(format!(
            "tangential return at u0 = {}",
            cfg.u0
        )));
    }
    let k = cfg.k as f64;
    let a = cfg.c.powf(-k - 1.0);
    let t1 = -r.v1 / r.vdot;
    let v_tt = 2.0 - k * a * r.vdot;
    let v_tu = 2.0 - k * a * r.v1;
    let t2 = -(v_tt * t1 * t1 + 2.0 * v_tu * t1 + r.v2) / r.vdot;
    let dz = -k * a * r.z * t1 + r.z1;
    let dvt = v_tt * t1 + v_tu;
    let u2 = (dz * r.vdot - r.z * dvt) / (r.vdot * r.vdot);
    Ok(ChiniDerivatives {
        u: r.u,
        t: r.t,
        t1,
        t2,
        u1: r.z / r.vdot,
        u2,
        ret: r,
    })
}

/// The printed near-boundary expansion of `T'`.
pub fn t1_boundary_asymptotic(k: u32, c: f64, u0: f64) -> f64 {
    let k = k as f64;
    -2.0 - 2.0 / 3.0 * k * c.powf(-k - 1.0) * (c.powf(-k) + 2.0 * u0)
}

/// Default reach of scan grids below the boundary. Further out `U'` and `U''`
/// decay like `exp(-d^2)` and `U` is flat to double precision.
pub const SCAN_SPAN: f64 = 2.0;

/// `n` start points `u0 = u_b - d` with `d` log-spaced in `[1e-4, d_max]`,
/// outside the boundary layer `|2 u0 + c^-k| < 1e-4`.
pub fn default_grid(k: u32, c: f64, n: usize, d_max: f64) -> Vec<f64> {
    let ub = ChiniConfig::boundary(k, c);
    let (lo, hi) = (1e-4f64.ln(), d_max.ln());
    (0..n)
        .map(|i| {
            let s = if n > 1 {
                i as f64 / (n - 1) as f64
            } else {
                0.0
            };
            ub - (lo + s * (hi - lo)).exp()
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiniRow {
    pub u0: f64,
    pub t: f64,
    pub u: f64,
    pub u1: f64,
    pub u2: f64,
    pub v1: f64,
    pub v2: f64,
    pub w: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChiniReport {
    pub k: u32,
    pub c: f64,
    pub rows: Vec<ChiniRow>,
    pub all_pass: bool,
    /// `U` strictly decreasing along increasing `u0`.
    pub monotone: bool,
    /// `min over the grid of min(-U', U' + 1)`; positive iff `U' in (-1, 0)` everywhere.
    pub u1_margin: f64,
    /// `max U''`; negative iff `U'' < 0` everywhere.
    pub u2_max: f64,
    pub v1_min: f64,
    pub v2_min: f64,
    pub w_min: f64,
    pub failures: Vec<String>,
}

/// Checks `U' in (-1, 0)`, `U'' < 0`, `v1(T) > 0`, `v2(T) > 0`, `w(T) > 0` on a grid.
pub fn chini_property_scan(k: u32, c: f64, u0_grid: &[f64], tol: f64) -> Result<ChiniReport> {
    if u0_grid.len() < 2 {
        return Err(Error::Domain("grid needs at least 2 points".into()));
    }
    let results: Vec<(f64, Result<ChiniDerivatives>)> = u0_grid
        .par_iter()
        .map(|&u0| (u0, chini_derivatives(&ChiniConfig { k, c, u0 }, tol)))
        .collect();
    let mut rows = Vec::with_capacity(results.len());
    let mut failures = Vec::new();
    for (u0, r) in results {
        match r {
            Ok(d) => {
                let pass = d.u1 > -1.0
                    && d.u1 < 0.0
                    && d.u2 < 0.0
                    && d.ret.v1 > 0.0
                    && d.ret.v2 > 0.0
                    && d.ret.w > 0.0;
                if !pass {
                    failures.push(format!(
                        "u0 = {u0}: U' = {}, U'' = {}, v1 = {}, v2 = {}, w = {}",
                        d.u1, d.u2, d.ret.v1, d.ret.v2, d.ret.w
                    ));
                }
                rows.push(ChiniRow {
                    u0,
                    t: d.t,
                    u: d.u,
                    u1: d.u1,
                    u2: d.u2,
                    v1: d.ret.v1,
                    v2: d.ret.v2,
                    w: d.ret.w,
                    pass,
                });
            }
            Err(e) => failures.push(format!("u0 = {u0}: {e}")),
        }
    }
    let mut sorted = rows.clone();
    sorted.sort_by(|a, b| a.u0.total_cmp(&b.u0));
    let monotone = sorted.windows(2).all(|w| w[1].u < w[0].u);
    if !monotone {
        failures.push("U is not strictly decreasing on the grid".into());
    }
    let fold = |f: fn(&ChiniRow) -> f64, min: bool| {
        rows.iter().map(f).fold(
            if min {
                f64::INFINITY
            } else {
                f64::NEG_INFINITY
            },
            |a, b| if min { a.min(b) } else { a.max(b) },
        )
    };
    Ok(ChiniReport {
        k,
        c,
        all_pass: failures.is_empty(),
        monotone,
        u1_margin: fold(|r| (-r.u1).min(r.u1 + 1.0), true),
        u2_max: fold(|r| r.u2, false),
        v1_min: fold(|r| r.v1, true),
        v2_min: fold(|r| r.v2, true),
        w_min: fold(|r| r.w, true),
        rows,
        failures,
    })
}
