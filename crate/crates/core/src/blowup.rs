//! Directional charts of the cylindrical blowup of `{y = eps = 0}` and of the
//! spherical blowup of the fold point, plus the per-region statistics of `Q`.
//!
//! Cylinder charts (the `x` coordinate is carried unchanged):
//!
//! ```text
//! cyl_y1   (r1, eps1):  y =  r1,      eps = r1 eps1
//! cyl_eps2 (r2, y2):    y =  r2 y2,   eps = r2
//! cyl_ym3  (r3, eps3):  y = -r3,      eps = r3 eps3
//! ```
//!
//! Sphere charts live inside `cyl_y1`, with weights `(2k, k, 1)` on `(r1, x, eps1)`:
//!
//! ```text
//! sph_r1   (rho1, x1, eps1):  r1 = rho1^{2k},     x = rho1^k x1,  eps1 = rho1 eps1'
//! sph_eps2 (rho2, r2, x2):    r1 = rho2^{2k} r2,  x = rho2^k x2,  eps1 = rho2
//! ```
//!
//! so in the original variables `eps = rho1^{2k+1} eps1 = rho2^{2k+1} r2`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::{least_squares, LinearFit};
use crate::maps::{q_map, tangent_entry, visible_fold, MapOptions, SectionPair};
use crate::models::PwsModel;
use crate::regfn::RegFn;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChartId {
    CylY1,
    CylEps2,
    CylYm3,
    SphR1,
    SphEps2,
}

impl ChartId {
    pub fn is_cylinder(self) -> bool {
        matches!(self, ChartId::CylY1 | ChartId::CylEps2 | ChartId::CylYm3)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "chart", rename_all = "snake_case")]
pub enum ChartPoint {
    CylY1 {
        r1: f64,
        eps1: f64,
    },
    CylEps2 {
        r2: f64,
        y2: f64,
    },
    CylYm3 {
        r3: f64,
        eps3: f64,
    },
    SphR1 {
        k: u32,
        rho1: f64,
        x1: f64,
        eps1: f64,
    },
    SphEps2 {
        k: u32,
        rho2: f64,
        r2: f64,
        x2: f64,
    },
}

fn out(msg: impl Into<String>) -> Error {
    Error::OutOfChart(msg.into())
}

fn nonneg(name: &str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(out(format!("{name} must be finite and >= 0, got {v}")))
    }
}

fn finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(out(format!("{name} must be finite")))
    }
}

impl ChartPoint {
    pub fn chart_id(&self) -> ChartId {
        match self {
            ChartPoint::CylY1 { .. } => ChartId::CylY1,
            ChartPoint::CylEps2 { .. } => ChartId::CylEps2,
            ChartPoint::CylYm3 { .. } => ChartId::CylYm3,
            ChartPoint::SphR1 { .. } => ChartId::SphR1,
            ChartPoint::SphEps2 { .. } => ChartId::SphEps2,
        }
    }

    pub fn coords(&self) -> Vec<f64> {
        match *self {
            ChartPoint::CylY1 { r1, eps1 } => vec![r1, eps1],
            ChartPoint::CylEps2 { r2, y2 } => vec![r2, y2],
            ChartPoint::CylYm3 { r3, eps3 } => vec![r3, eps3],
            ChartPoint::SphR1 { rho1, x1, eps1, .. } => vec![rho1, x1, eps1],
            ChartPoint::SphEps2 { rho2, r2, x2, .. } => vec![rho2, r2, x2],
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ChartPoint::CylY1 { r1, eps1 } => {
                nonneg("r1", r1)?;
                nonneg("eps1", eps1)
            }
            ChartPoint::CylEps2 { r2, y2 } => {
                nonneg("r2", r2)?;
                finite("y2", y2)
            }
            ChartPoint::CylYm3 { r3, eps3 } => {
                nonneg("r3", r3)?;
                nonneg("eps3", eps3)
            }
            ChartPoint::SphR1 { k, rho1, x1, eps1 } => {
                check_k(k)?;
                nonneg("rho1", rho1)?;
                finite("x1", x1)?;
                nonneg("eps1", eps1)
            }
            ChartPoint::SphEps2 { k, rho2, r2, x2 } => {
                check_k(k)?;
                nonneg("rho2", rho2)?;
                nonneg("r2", r2)?;
                finite("x2", x2)
            }
        }
    }
}

fn check_k(k: u32) -> Result<()> {
    if k == 0 {
        Err(Error::Domain("k must be a positive integer".into()))
    } else {
        Ok(())
    }
}

/// `(y, eps)` of a cylinder chart point.
pub fn cyl_to_cartesian(p: &ChartPoint) -> Result<(f64, f64)> {
    p.validate()?;
    match *p {
        ChartPoint::CylY1 { r1, eps1 } => Ok((r1, r1 * eps1)),
        ChartPoint::CylEps2 { r2, y2 } => Ok((r2 * y2, r2)),
        ChartPoint::CylYm3 { r3, eps3 } => Ok((-r3, r3 * eps3)),
        _ => Err(out("not a cylinder chart")),
    }
}

/// Cylinder chart coordinates of `(y, eps)`.
pub fn cartesian_to_cyl(y: f64, eps: f64, chart: ChartId) -> Result<ChartPoint> {
    nonneg("eps", eps)?;
    finite("y", y)?;
    match chart {
        ChartId::CylY1 if y > 0.0 => Ok(ChartPoint::CylY1 {
            r1: y,
            eps1: eps / y,
        }),
        ChartId::CylEps2 if eps > 0.0 => Ok(ChartPoint::CylEps2 {
            r2: eps,
            y2: y / eps,
        }),
        ChartId::CylYm3 if y < 0.0 => Ok(ChartPoint::CylYm3 {
            r3: -y,
            eps3: eps / -y,
        }),
        ChartId::SphR1 | ChartId::SphEps2 => Err(out("not a cylinder chart")),
        _ => Err(out(format!(
            "(y, eps) = ({y}, {eps}) is not covered by {chart:?}"
        ))),
    }
}

/// Change of cylinder chart on the overlaps `eps1 > 0`, `y2 != 0`, `eps3 > 0`.
pub fn cyl_chart_change(p: &ChartPoint, target: ChartId) -> Result<ChartPoint> {
    p.validate()?;
    if !target.is_cylinder() || !p.chart_id().is_cylinder() {
        return Err(out("not a cylinder chart"));
    }
    if p.chart_id() == target {
        return Ok(*p);
    }
    let q = match (*p, target) {
        (ChartPoint::CylY1 { r1, eps1 }, ChartId::CylEps2) if eps1 > 0.0 => ChartPoint::CylEps2 {
            r2: r1 * eps1,
            y2: 1.0 / eps1,
        },
        (ChartPoint::CylEps2 { r2, y2 }, ChartId::CylY1) if y2 > 0.0 => ChartPoint::CylY1 {
            r1: r2 * y2,
            eps1: 1.0 / y2,
        },
        (ChartPoint::CylEps2 { r2, y2 }, ChartId::CylYm3) if y2 < 0.0 => ChartPoint::CylYm3 {
            r3: -r2 * y2,
            eps3: -1.0 / y2,
        },
        (ChartPoint::CylYm3 { r3, eps3 }, ChartId::CylEps2) if eps3 > 0.0 => ChartPoint::CylEps2 {
            r2: r3 * eps3,
            y2: -1.0 / eps3,
        },
        _ => {
            return Err(out(format!(
                "{:?} point {:?} is outside the overlap with {target:?}",
                p.chart_id(),
                p.coords()
            )))
        }
    };
    Ok(q)
}

/// `sph_r1` coordinates of `(x, y, eps)`; requires `y > 0`.
pub fn sphere_to_chart1(x: f64, y: f64, eps: f64, k: u32) -> Result<ChartPoint> {
    check_k(k)?;
    finite("x", x)?;
    nonneg("eps", eps)?;
    if !(y > 0.0) || !y.is_finite() {
        return Err(out(format!("sph_r1 needs y > 0, got {y}")));
    }
    let kf = k as f64;
    Ok(ChartPoint::SphR1 {
        k,
        rho1: y.powf(1.0 / (2.0 * kf)),
        x1: x / y.sqrt(),
        eps1: eps * y.powf(-(2.0 * kf + 1.0) / (2.0 * kf)),
    })
}

/// `sph_eps2` coordinates of `(x, y, eps)`; requires `y > 0` and `eps > 0`.
pub fn sphere_to_chart2(x: f64, y: f64, eps: f64, k: u32) -> Result<ChartPoint> {
    check_k(k)?;
    finite("x", x)?;
    if !(y > 0.0) || !(eps > 0.0) || !y.is_finite() || !eps.is_finite() {
        return Err(out(format!(
            "sph_eps2 needs y > 0 and eps > 0, got ({y}, {eps})"
        )));
    }
    let rho2 = eps / y;
    Ok(ChartPoint::SphEps2 {
        k,
        rho2,
        r2: y / rho2.powi(2 * k as i32),
        x2: x / rho2.powi(k as i32),
    })
}

/// `(x, y, eps)` of a sphere chart point; `rho = 0` maps to the fold point.
pub fn sphere_to_cartesian(p: &ChartPoint) -> Result<(f64, f64, f64)> {
    p.validate()?;
    match *p {
        ChartPoint::SphR1 { k, rho1, x1, eps1 } => {
            let k = k as i32;
            Ok((
                rho1.powi(k) * x1,
                rho1.powi(2 * k),
                rho1.powi(2 * k + 1) * eps1,
            ))
        }
        ChartPoint::SphEps2 { k, rho2, r2, x2 } => {
            let k = k as i32;
            Ok((
                rho2.powi(k) * x2,
                rho2.powi(2 * k) * r2,
                rho2.powi(2 * k + 1) * r2,
            ))
        }
        _ => Err(out("not a sphere chart")),
    }
}

/// `rho2^{2k+1} r2`, which equals `eps` and is constant along the flow in `sph_eps2`.
pub fn conservation_product(p: &ChartPoint) -> Result<f64> {
    match *p {
        ChartPoint::SphEps2 { k, rho2, r2, .. } => Ok(rho2.powi(2 * k as i32 + 1) * r2),
        _ => Err(out("conservation law is stated in sph_eps2")),
    }
}

/// Change of sphere chart on the overlaps `eps1 > 0` / `r2 > 0`.
pub fn sphere_chart_change(p: &ChartPoint, target: ChartId) -> Result<ChartPoint> {
    p.validate()?;
    if p.chart_id() == target {
        return Ok(*p);
    }
    match (*p, target) {
        (ChartPoint::SphR1 { k, rho1, x1, eps1 }, ChartId::SphEps2) => {
            if !(eps1 > 0.0) {
                return Err(out("sph_r1 -> sph_eps2 needs eps1 > 0"));
            }
            let k_ = k as i32;
            Ok(ChartPoint::SphEps2 {
                k,
                rho2: rho1 * eps1,
                r2: eps1.powi(-2 * k_),
                x2: x1 * eps1.powi(-k_),
            })
        }
        (ChartPoint::SphEps2 { k, rho2, r2, x2 }, ChartId::SphR1) => {
            if !(r2 > 0.0) {
                return Err(out("sph_eps2 -> sph_r1 needs r2 > 0"));
            }
            let s = r2.powf(1.0 / (2.0 * k as f64));
            Ok(ChartPoint::SphR1 {
                k,
                rho1: rho2 * s,
                x1: x2 / r2.sqrt(),
                eps1: 1.0 / s,
            })
        }
        _ => Err(out(format!(
            "no change from {:?} to {target:?}",
            p.chart_id()
        ))),
    }
}

/// Any chart change within a family.
pub fn chart_change(p: &ChartPoint, target: ChartId) -> Result<ChartPoint> {
    match (p.chart_id().is_cylinder(), target.is_cylinder()) {
        (true, true) => cyl_chart_change(p, target),
        (false, false) => sphere_chart_change(p, target),
        _ => Err(out("cylinder and sphere charts are different families")),
    }
}

/// Window constants for the three regions of `Q` on `I_L`.
///
/// With `s = eps^{2k/(2k+1)}`: region (i) is `[I_L.lo, gamma_L - theta]`, region
/// (ii) is `|x - gamma_L| <= chi s` and region (iii) is `[gamma_L + theta, I_L.hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RegionWindows {
    pub chi: f64,
    pub theta: f64,
    /// Fixed slope whose unique crossing is sought in region (ii).
    pub upsilon: f64,
    pub n_per_region: usize,
    /// Overrides the computed tangent entry point.
    pub gamma_l: Option<f64>,
    /// Starting guess for the fold; defaults to the box center.
    pub fold_guess: Option<f64>,
}

impl Default for RegionWindows {
    fn default() -> Self {
        Self {
            chi: 2.5,
            theta: 0.002,
            upsilon: -0.5,
            n_per_region: 30,
            gamma_l: None,
            fold_guess: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionSample {
    pub region: u8,
    pub x: f64,
    pub x_out: f64,
    pub d1: f64,
    pub d2: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionStats {
    pub eps: f64,
    pub gamma_l: f64,
    pub window: f64,
    /// Region (i): `max |d1|`.
    pub left_max_abs_d1: f64,
    /// Region (ii): every sample has `d1 < 0` and `d2 < 0`.
    pub center_signs_ok: bool,
    pub center_max_d1: f64,
    pub center_max_d2: f64,
    /// Region (ii): sign changes of `d1 - upsilon` along increasing `x`.
    pub center_crossings: usize,
    pub crossing_x: Option<f64>,
    /// Region (iii): `max | |d1| - 1 |`.
    pub right_max_dev: f64,
    pub samples: Vec<RegionSample>,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegionReport {
    pub per_eps: Vec<RegionStats>,
    /// Least-squares fit of `ln max|d1|` (region i) against `1/eps`.
    pub contraction_fit: Option<LinearFit>,
    /// Region (i) `max|d1|` decreases as `eps` decreases.
    pub left_monotone: bool,
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![0.5 * (a + b)];
    }
    (0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn region_stats(
    model: &PwsModel,
    regfn: RegFn,
    eps: f64,
    sections: &SectionPair,
    w: &RegionWindows,
    gamma_l: f64,
    alpha: f64,
    opts: &MapOptions,
) -> Result<RegionStats> {
    let p = regfn.scaling_exponent().ok_or_else(|| {
        Error::Unsupported(format!("{} has no finite decay rate", regfn.id.name()))
    })?;
    let window = w.chi * eps.powf(p);
    let [lo, hi] = sections.i_l;
    let left_hi = gamma_l - w.theta;
    let right_lo = gamma_l + w.theta;
    if !(lo < left_hi && right_lo < hi) {
        return Err(Error::Domain(format!(
            "theta = {} leaves no room in I_L = [{lo}, {hi}] around gamma_L = {gamma_l}",
            w.theta
        )));
    }
    let n = w.n_per_region.max(2);
    let mut pts: Vec<(u8, f64)> = Vec::with_capacity(3 * n);
    pts.extend(linspace(lo, left_hi, n).into_iter().map(|x| (1, x)));
    pts.extend(
        linspace(gamma_l - window, gamma_l + window, n)
            .into_iter()
            .map(|x| (2, x)),
    );
    pts.extend(linspace(right_lo, hi, n).into_iter().map(|x| (3, x)));
    let results: Vec<(u8, f64, Result<_>)> = pts
        .par_iter()
        .map(|&(r, x)| {
            (
                r,
                x,
                q_map(model, regfn, eps, sections, x, alpha, r == 2, opts),
            )
        })
        .collect();
    let mut samples = Vec::with_capacity(results.len());
    let mut failures = Vec::new();
    for (region, x, r) in results {
        match r {
            Ok(s) => samples.push(RegionSample {
                region,
                x,
                x_out: s.x_out,
                d1: s.d1,
                d2: s.d2,
            }),
            Err(e) => failures.push(format!("region {region}, x = {x}: {e}")),
        }
    }
    let of = |r: u8| samples.iter().filter(move |s| s.region == r);
    let left_max_abs_d1 = of(1).map(|s| s.d1.abs()).fold(0.0, f64::max);
    let center: Vec<&RegionSample> = of(2).collect();
    let center_signs_ok = !center.is_empty()
        && center
            .iter()
            .all(|s| s.d1 < 0.0 && s.d2.is_some_and(|d| d < 0.0));
    let center_max_d1 = center
        .iter()
        .map(|s| s.d1)
        .fold(f64::NEG_INFINITY, f64::max);
    let center_max_d2 = center
        .iter()
        .filter_map(|s| s.d2)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut center_crossings = 0;
    let mut crossing_x = None;
    for pair in center.windows(2) {
        let (a, b) = (pair[0].d1 - w.upsilon, pair[1].d1 - w.upsilon);
        if a == 0.0 || a * b < 0.0 {
            center_crossings += 1;
            crossing_x = Some(pair[0].x + (pair[1].x - pair[0].x) * a / (a - b));
        }
    }
    if center.last().is_some_and(|s| s.d1 == w.upsilon) {
        center_crossings += 1;
        crossing_x = center.last().map(|s| s.x);
    }
    if center_crossings != 1 {
        crossing_x = None;
    }
    let right_max_dev = of(3).map(|s| (s.d1.abs() - 1.0).abs()).fold(0.0, f64::max);
    Ok(RegionStats {
        eps,
        gamma_l,
        window,
        left_max_abs_d1,
        center_signs_ok,
        center_max_d1,
        center_max_d2,
        center_crossings,
        crossing_x,
        right_max_dev,
        samples,
        failures,
    })
}

/// Samples `Q'` (and `Q''` in the center) on the three regions for each `eps`.
#[allow(clippy::too_many_arguments)]
pub fn q_region_report(
    model: &PwsModel,
    regfn: RegFn,
    eps_list: &[f64],
    sections: &SectionPair,
    windows: &RegionWindows,
    alpha: f64,
    opts: &MapOptions,
) -> Result<RegionReport> {
    sections.validate()?;
    if eps_list.iter().any(|&e| !(e > 0.0)) {
        return Err(Error::Domain("eps values must be positive".into()));
    }
    let gamma_l = match windows.gamma_l {
        Some(g) => g,
        None => {
            let guess = windows.fold_guess.unwrap_or(sections.box_center[0]);
            let xf = visible_fold(model, alpha, guess)?;
            tangent_entry(model, alpha, xf, sections.delta)?
        }
    };
    let per_eps = eps_list
        .iter()
        .map(|&eps| region_stats(model, regfn, eps, sections, windows, gamma_l, alpha, opts))
        .collect::<Result<Vec<_>>>()?;
    let usable: Vec<&RegionStats> = per_eps.iter().filter(|s| s.left_max_abs_d1 > 0.0).collect();
    let contraction_fit = (usable.len() >= 2).then(|| {
        let xs: Vec<f64> = usable.iter().map(|s| 1.0 / s.eps).collect();
        let ys: Vec<f64> = usable.iter().map(|s| s.left_max_abs_d1.ln()).collect();
        least_squares(&xs, &ys)
    });
    let mut by_eps: Vec<&RegionStats> = per_eps.iter().collect();
    by_eps.sort_by(|a, b| b.eps.total_cmp(&a.eps));
    let left_monotone = by_eps
        .windows(2)
        .all(|w| w[1].left_max_abs_d1 < w[0].left_max_abs_d1);
    Ok(RegionReport {
        per_eps,
        contraction_fit,
        left_monotone,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn cylinder_formulas() {
        let p = ChartPoint::CylY1 { r1: 0.3, eps1: 0.2 };
        let (y, e) = cyl_to_cartesian(&p).unwrap();
        assert!(close(y, 0.3, 1e-15) && close(e, 0.06, 1e-15));
        let (y, e) = cyl_to_cartesian(&ChartPoint::CylEps2 { r2: 0.06, y2: 5.0 }).unwrap();
        assert!(close(y, 0.3, 1e-15) && close(e, 0.06, 1e-15));
        assert_eq!(
            cyl_to_cartesian(&ChartPoint::CylY1 { r1: 0.3, eps1: 0.0 }).unwrap(),
            (0.3, 0.0)
        );
        let (y, e) = cyl_to_cartesian(&ChartPoint::CylYm3 { r3: 0.3, eps3: 0.2 }).unwrap();
        assert!(close(y, -0.3, 1e-15) && close(e, 0.06, 1e-15));
    }

    #[test]
    fn cylinder_changes() {
        let p = ChartPoint::CylY1 { r1: 0.3, eps1: 0.2 };
        let q = cyl_chart_change(&p, ChartId::CylEps2).unwrap();
        match q {
            ChartPoint::CylEps2 { r2, y2 } => {
                assert!(close(r2, 0.06, 1e-15) && close(y2, 5.0, 1e-15))
            }
            _ => panic!(),
        }
        let back = cyl_chart_change(&q, ChartId::CylY1).unwrap();
        for (a, b) in back.coords().iter().zip(p.coords()) {
            assert!(close(*a, b, 1e-15));
        }
        let m = ChartPoint::CylEps2 { r2: 0.06, y2: -5.0 };
        let m3 = cyl_chart_change(&m, ChartId::CylYm3).unwrap();
        let m2 = cyl_chart_change(&m3, ChartId::CylEps2).unwrap();
        for (a, b) in m2.coords().iter().zip(m.coords()) {
            assert!(close(*a, b, 1e-15));
        }
        assert!(
            cyl_chart_change(&ChartPoint::CylY1 { r1: 0.3, eps1: 0.0 }, ChartId::CylEps2).is_err()
        );
        assert!(cyl_chart_change(&p, ChartId::CylYm3).is_err());
        assert!(cyl_chart_change(&p, ChartId::SphR1).is_err());
    }

    #[test]
    fn cylinder_rejects_bad_points() {
        assert!(cyl_to_cartesian(&ChartPoint::CylY1 {
            r1: -0.1,
            eps1: 0.2
        })
        .is_err());
        assert!(cyl_to_cartesian(&ChartPoint::CylYm3 {
            r3: 0.1,
            eps3: -0.2
        })
        .is_err());
        assert!(cartesian_to_cyl(-0.1, 0.01, ChartId::CylY1).is_err());
        assert!(cyl_to_cartesian(&ChartPoint::SphR1 {
            k: 2,
            rho1: 0.1,
            x1: 0.0,
            eps1: 0.1
        })
        .is_err());
    }

    #[test]
    fn sphere_chart1_example() {
        let p = sphere_to_chart1(0.02, 0.0016, 1e-5, 2).unwrap();
        let ChartPoint::SphR1 { rho1, x1, eps1, .. } = p else {
            panic!()
        };
        assert!(close(rho1, 0.2, 1e-15));
        assert!(close(x1, 0.5, 1e-15));
        assert!(close(eps1, 1e-5 / 0.2f64.powi(5), 1e-14));
        let (x, y, e) = sphere_to_cartesian(&p).unwrap();
        assert!(close(x, 0.02, 1e-15) && close(y, 0.0016, 1e-15) && (e - 1e-5).abs() < 1e-19);
    }

    #[test]
    fn sphere_conservation_after_change() {
        for k in 1..=3 {
            let (x, y, eps) = (-0.013, 0.0021, 3e-6);
            let p1 = sphere_to_chart1(x, y, eps, k).unwrap();
            let p2 = sphere_chart_change(&p1, ChartId::SphEps2).unwrap();
            let c = conservation_product(&p2).unwrap();
            assert!(((c - eps) / eps).abs() < 1e-13);
            let direct = sphere_to_chart2(x, y, eps, k).unwrap();
            for (a, b) in direct.coords().iter().zip(p2.coords()) {
                assert!(close(*a, b, 1e-13));
            }
            let back = sphere_chart_change(&p2, ChartId::SphR1).unwrap();
            for (a, b) in back.coords().iter().zip(p1.coords()) {
                assert!(close(*a, b, 1e-13));
            }
        }
    }

    #[test]
    fn sphere_boundary_cases() {
        assert!(sphere_to_chart1(0.1, 0.0, 1e-3, 2).is_err());
        let origin = ChartPoint::SphR1 {
            k: 2,
            rho1: 0.0,
            x1: 0.7,
            eps1: 0.3,
        };
        assert_eq!(sphere_to_cartesian(&origin).unwrap(), (0.0, 0.0, 0.0));
        let p = ChartPoint::SphR1 {
            k: 2,
            rho1: 0.1,
            x1: 0.7,
            eps1: 0.0,
        };
        assert!(sphere_chart_change(&p, ChartId::SphEps2).is_err());
        assert!(chart_change(&p, ChartId::CylY1).is_err());
        assert!(sphere_to_chart1(0.1, 0.1, 1e-3, 0).is_err());
    }

    #[test]
    fn serde_tags() {
        let p = ChartPoint::CylEps2 { r2: 0.06, y2: 5.0 };
        let s = format!("{:?}", p.chart_id());
        assert_eq!(s, "CylEps2");
    }
}
