//! Section-to-section maps and orbit statistics.
//!
//! The local map `Q` carries points of `Sigma_L = {y = delta, x in I_L}` past
//! the fold to the first upward crossing of `y = delta`; return maps `P` carry
//! a section back to itself. Derivatives come from the variational flow,
//! projected along the vector field onto the target section.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrate::{
    integrate, integrate_variational, solve, Direction, EventSpec, IntegOptions, OdeSystem,
    OrbitSegment,
};
use crate::models::{
    assemble_regularized, classify_sigma_point, PwsModel, SigmaTag, SmoothField2D, Vec2,
};
use crate::regfn::RegFn;

/// Entry and exit sections `y = delta` around a visible fold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectionPair {
    pub delta: f64,
    /// Half-width of the chart box `[-xi, xi]^2` around `box_center`.
    pub xi: f64,
    pub i_l: [f64; 2],
    pub i_r: [f64; 2],
    #[serde(default)]
    pub box_center: Vec2,
}

impl SectionPair {
    /// Sections for the flat normal form: `gamma_{L,R} = -+sqrt(delta)`.
    pub fn normal_form(delta: f64) -> Self {
        let g = delta.sqrt();
        Self {
            delta,
            xi: 0.5,
            i_l: [-1.5 * g, -0.5 * g],
            i_r: [0.5 * g, 1.5 * g],
            box_center: [0.0, 0.0],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta < self.xi) {
            return Err(Error::Domain(format!(
                "need 0 < delta < xi, got delta = {}, xi = {}",
                self.delta, self.xi
            )));
        }
        for (name, iv) in [("I_L", self.i_l), ("I_R", self.i_r)] {
            if !(iv[0] < iv[1]) || iv.iter().any(|v| !v.is_finite()) {
                return Err(Error::Domain(format!("{name} must be a proper interval")));
            }
        }
        Ok(())
    }

    pub fn entry(&self) -> PoincareSection {
        PoincareSection::horizontal(self.delta, Direction::Any)
    }

    pub fn exit(&self) -> PoincareSection {
        PoincareSection::horizontal(self.delta, Direction::Up)
    }

    /// Escape box.
    pub fn bbox(&self) -> BoundingBox {
        BoundingBox {
            center: self.box_center,
            half_width: self.xi,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub center: Vec2,
    pub half_width: f64,
}

/// A straight section `{origin + s dir}` crossed in a given direction of `normal . (z - origin)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoincareSection {
    pub origin: Vec2,
    /// Unit vector along the section; `s` is the coordinate along it.
    pub dir: Vec2,
    pub normal: Vec2,
    pub direction: Direction,
}

impl PoincareSection {
    /// `y = level`, parametrized by `x`.
    pub fn horizontal(level: f64, direction: Direction) -> Self {
        Self {
            origin: [0.0, level],
            dir: [1.0, 0.0],
            normal: [0.0, 1.0],
            direction,
        }
    }

    pub fn point(&self, s: f64) -> Vec2 {
        [
            self.origin[0] + s * self.dir[0],
            self.origin[1] + s * self.dir[1],
        ]
    }

    pub fn coordinate(&self, z: &[f64]) -> f64 {
        self.dir[0] * (z[0] - self.origin[0]) + self.dir[1] * (z[1] - self.origin[1])
    }

    pub fn g(&self, z: &[f64]) -> f64 {
        self.normal[0] * (z[0] - self.origin[0]) + self.normal[1] * (z[1] - self.origin[1])
    }

    /// Crossing event in the section's direction.
    pub fn event<const N: usize>(&self, terminal: bool) -> EventSpec<'static, N> {
        let s = *self;
        EventSpec::new(move |z: &[f64; N]| s.g(z), self.direction, terminal)
    }

    /// Derivative of the arrival coordinate given the variation `v` of the
    /// arrival state at fixed time and the field `f` there.
    pub fn project(&self, v: Vec2, f: Vec2) -> Result<f64> {
        let gf = self.normal[0] * f[0] + self.normal[1] * f[1];
        if gf.abs() < 1e-14 {
            return Err(Error::DerivativeUndefined(
                "flow is tangent to the section at arrival".into(),
            ));
        }
        let gv = self.normal[0] * v[0] + self.normal[1] * v[1];
        let dt = -gv / gf;
        Ok(self.dir[0] * (v[0] + f[0] * dt) + self.dir[1] * (v[1] + f[1] * dt))
    }
}

/// One evaluation of a section map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReturnSample {
    pub x_out: f64,
    pub d1: f64,
    pub d2: Option<f64>,
    pub flight_time: f64,
    pub z_out: Vec2,
}

/// Integration settings shared by the map evaluations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MapOptions {
    pub integ: IntegOptions,
    pub t_max: f64,
    /// Step of the Richardson second difference; `None` picks
    /// `max(1e-5, eps^{2k/(2k+1)} / 100)`.
    pub d2_step: Option<f64>,
}

impl Default for MapOptions {
    fn default() -> Self {
        Self {
            integ: IntegOptions {
                tol: 1e-11,
                store: false,
                ..IntegOptions::default()
            },
            t_max: 50.0,
            d2_step: None,
        }
    }
}

fn escape_events<const N: usize>(b: &BoundingBox) -> Vec<EventSpec<'static, N>> {
    let (c, w) = (b.center, b.half_width);
    vec![
        EventSpec::new(move |z: &[f64; N]| z[0] - (c[0] + w), Direction::Up, true),
        EventSpec::new(move |z: &[f64; N]| z[0] - (c[0] - w), Direction::Down, true),
        EventSpec::new(move |z: &[f64; N]| z[1] - (c[1] + w), Direction::Up, true),
        EventSpec::new(move |z: &[f64; N]| z[1] - (c[1] - w), Direction::Down, true),
    ]
}

/// Flies from `from.point(s)` to the first admissible crossing of `to`, with
/// the tangent started along `from.dir`.
#[allow(clippy::too_many_arguments)]
pub fn section_transit(
    field: &dyn SmoothField2D,
    alpha: f64,
    from: &PoincareSection,
    s: f64,
    to: &PoincareSection,
    bbox: Option<&BoundingBox>,
    opts: &MapOptions,
) -> Result<ReturnSample> {
    let z0 = from.point(s);
    let mut events = vec![to.event::<4>(true)];
    if let Some(b) = bbox {
        events.extend(escape_events::<4>(b));
    }
    let integ = IntegOptions {
        store: false,
        ..opts.integ
    };
    let seg = integrate_variational(field, z0, from.dir, alpha, opts.t_max, &events, &integ)?;
    arrival(field, alpha, to, &seg, opts.t_max)
}

fn arrival(
    field: &dyn SmoothField2D,
    alpha: f64,
    to: &PoincareSection,
    seg: &OrbitSegment<4>,
    t_max: f64,
) -> Result<ReturnSample> {
    let Some(hit) = seg.terminal_hit() else {
        return Err(Error::NoReturn { t_max });
    };
    if hit.event != 0 {
        return Err(Error::Escape {
            x: hit.state[0],
            y: hit.state[1],
        });
    }
    let z = [hit.state[0], hit.state[1]];
    let f = field.eval(z[0], z[1], alpha);
    let d1 = to.project([hit.state[2], hit.state[3]], f)?;
    Ok(ReturnSample {
        x_out: to.coordinate(&z),
        d1,
        d2: None,
        flight_time: hit.t,
        z_out: z,
    })
}

/// `(4 D(h/2) - D(h)) / 3` with `D(h)` the central difference of `d1`.
pub fn richardson_d2(d1: impl Fn(f64) -> Result<f64>, x: f64, h: f64) -> Result<f64> {
    let dh = (d1(x + h)? - d1(x - h)?) / (2.0 * h);
    let h2 = 0.5 * h;
    let dh2 = (d1(x + h2)? - d1(x - h2)?) / (2.0 * h2);
    Ok((4.0 * dh2 - dh) / 3.0)
}

fn default_d2_step(regfn: &RegFn, eps: f64) -> f64 {
    let p = regfn.scaling_exponent().unwrap_or(1.0);
    (eps.powf(p) / 100.0).max(1e-5)
}

/// The local transition map `Q: Sigma_L -> Sigma_R` past the fold.
#[allow(clippy::too_many_arguments)]
pub fn q_map(
    model: &PwsModel,
    regfn: RegFn,
    eps: f64,
    sections: &SectionPair,
    x: f64,
    alpha: f64,
    want_d2: bool,
    opts: &MapOptions,
) -> Result<ReturnSample> {
    sections.validate()?;
    if eps == 0.0 {
        let mut r = q_map_pws(model, sections, x, alpha, opts)?;
        if want_d2 {
            let h = opts.d2_step.unwrap_or(1e-5);
            r.d2 = Some(richardson_d2(
                |xx| q_map_pws(model, sections, xx, alpha, opts).map(|r| r.d1),
                x,
                h,
            )?);
        }
        return Ok(r);
    }
    let field = assemble_regularized(model, regfn, eps)?;
    let (from, to, bbox) = (sections.entry(), sections.exit(), sections.bbox());
    let mut r = section_transit(&field, alpha, &from, x, &to, Some(&bbox), opts)?;
    if want_d2 {
        let h = opts.d2_step.unwrap_or_else(|| default_d2_step(&regfn, eps));
        r.d2 = Some(richardson_d2(
            |xx| section_transit(&field, alpha, &from, xx, &to, Some(&bbox), opts).map(|r| r.d1),
            x,
            h,
        )?);
    }
    Ok(r)
}

/// Sliding along `y = 0` with the Filippov drift; state `(x, 0)`.
struct FilippovSlide<'a> {
    model: &'a PwsModel,
    alpha: f64,
}

impl FilippovSlide<'_> {
    fn drift(&self, x: f64) -> f64 {
        let zp = self.model.z_plus.eval(x, 0.0, self.alpha);
        let zm = self.model.z_minus.eval(x, 0.0, self.alpha);
        let (a, b) = (zp[1], zm[1]);
        let lambda = b / (b - a);
        lambda * zp[0] + (1.0 - lambda) * zm[0]
    }
}

impl OdeSystem<2> for FilippovSlide<'_> {
    fn rhs(&self, y: &[f64; 2]) -> [f64; 2] {
        [self.drift(y[0]), 0.0]
    }

    fn jac(&self, y: &[f64; 2]) -> [[f64; 2]; 2] {
        let h = 1e-7 * (1.0 + y[0].abs());
        let d = (self.drift(y[0] + h) - self.drift(y[0] - h)) / (2.0 * h);
        [[d, 0.0], [0.0, 0.0]]
    }
}

/// `Q` at `eps = 0`: `Z+` down to `y = 0`, Filippov slide to the fold, lift-off along `Z+`.
fn q_map_pws(
    model: &PwsModel,
    sections: &SectionPair,
    x: f64,
    alpha: f64,
    opts: &MapOptions,
) -> Result<ReturnSample> {
    let bbox = sections.bbox();
    let to = sections.exit();
    let mut events = vec![
        to.event::<4>(true),
        EventSpec::y_level(0.0, Direction::Down, true),
    ];
    events.extend(escape_events::<4>(&bbox));
    let integ = IntegOptions {
        store: false,
        ..opts.integ
    };
    let zp = &*model.z_plus;
    let seg = integrate_variational(
        zp,
        [x, sections.delta],
        [1.0, 0.0],
        alpha,
        opts.t_max,
        &events,
        &integ,
    )?;
    let hit = *seg
        .terminal_hit()
        .ok_or(Error::NoReturn { t_max: opts.t_max })?;
    if hit.event != 1 {
        return arrival(zp, alpha, &to, &seg, opts.t_max);
    }
    let x_hit = hit.state[0];
    let class = classify_sigma_point(model, x_hit, alpha);
    if class.tag != SigmaTag::Sliding {
        return Err(Error::Unsupported(format!(
            "composite flow reached y = 0 at x = {x_hit} in a {:?} region",
            class.tag
        )));
    }
    let slide = FilippovSlide { model, alpha };
    let fold = EventSpec::new(
        |z: &[f64; 2]| model.z_plus.eval(z[0], 0.0, alpha)[1],
        Direction::Up,
        true,
    );
    let remaining = opts.t_max - hit.t;
    let s = solve(&slide, [x_hit, 0.0], remaining, &[fold], &integ);
    let s = s?;
    let fh = s
        .terminal_hit()
        .ok_or(Error::NoReturn { t_max: opts.t_max })?;
    let x_fold = fh.state[0];
    let t_slide = fh.t;
    let lift_events = {
        let mut e = vec![EventSpec::y_level(sections.delta, Direction::Up, true)];
        e.extend(escape_events::<2>(&bbox));
        e
    };
    let lift = integrate(
        zp,
        [x_fold, 0.0],
        alpha,
        remaining - t_slide,
        &lift_events,
        &integ,
    )?;
    let lh = lift
        .terminal_hit()
        .ok_or(Error::NoReturn { t_max: opts.t_max })?;
    if lh.event != 0 {
        return Err(Error::Escape {
            x: lh.state[0],
            y: lh.state[1],
        });
    }
    Ok(ReturnSample {
        x_out: lh.state[0],
        d1: 0.0,
        d2: None,
        flight_time: hit.t + t_slide + lh.t,
        z_out: lh.state,
    })
}

/// The smooth field used for `eps > 0`, or `Z+` alone for `eps = 0`.
pub fn field_for(model: &PwsModel, regfn: RegFn, eps: f64) -> Result<Box<dyn SmoothField2D>> {
    if eps == 0.0 {
        Ok(Box::new(model.z_plus.clone()))
    } else {
        Ok(Box::new(assemble_regularized(model, regfn, eps)?))
    }
}

/// Full return map of `section` to itself.
#[allow(clippy::too_many_arguments)]
pub fn p_map(
    model: &PwsModel,
    regfn: RegFn,
    eps: f64,
    section: &PoincareSection,
    x: f64,
    alpha: f64,
    opts: &MapOptions,
) -> Result<ReturnSample> {
    let field = field_for(model, regfn, eps)?;
    section_transit(&*field, alpha, section, x, section, None, opts)
}

/// The friction return section `{y = alpha}`, crossed downward (to the right
/// of the equilibrium), parametrized by `x`.
pub fn friction_section(alpha: f64) -> PoincareSection {
    PoincareSection::horizontal(alpha, Direction::Down)
}

/// Global minimum of the second coordinate along a stored orbit, from the
/// step points, the event points and the minima of the cubic interpolant.
pub fn min_y_of_orbit<const N: usize>(orbit: &OrbitSegment<N>) -> (f64, f64) {
    let mut best = (f64::INFINITY, 0.0);
    let mut consider = |y: f64, t: f64| {
        if y < best.0 {
            best = (y, t);
        }
    };
    for (t, s) in orbit.times.iter().zip(&orbit.states) {
        consider(s[1], *t);
    }
    for e in &orbit.events {
        consider(e.state[1], e.t);
    }
    if orbit.dense {
        for i in 0..orbit.times.len().saturating_sub(1) {
            let h = orbit.times[i + 1] - orbit.times[i];
            let (y0, y1) = (orbit.states[i][1], orbit.states[i + 1][1]);
            let (f0, f1) = (h * orbit.slopes[i][1], h * orbit.slopes[i + 1][1]);
            let a = 6.0 * y0 + 3.0 * f0 - 6.0 * y1 + 3.0 * f1;
            let b = -6.0 * y0 - 4.0 * f0 + 6.0 * y1 - 2.0 * f1;
            let c = f0;
            for th in quadratic_roots(a, b, c) {
                if th > 0.0 && th < 1.0 && 2.0 * a * th + b > 0.0 {
                    let t2 = th * th;
                    let t3 = t2 * th;
                    let y = (2.0 * t3 - 3.0 * t2 + 1.0) * y0
                        + (t3 - 2.0 * t2 + th) * f0
                        + (-2.0 * t3 + 3.0 * t2) * y1
                        + (t3 - t2) * f1;
                    consider(y, orbit.times[i] + th * h);
                }
            }
        }
    }
    best
}

fn quadratic_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    if a.abs() <= 1e-14 * (b.abs() + c.abs()) {
        return if b != 0.0 { vec![-c / b] } else { vec![] };
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return vec![];
    }
    let q = -0.5 * (b + b.signum() * disc.sqrt());
    let mut r = vec![q / a];
    if q != 0.0 {
        r.push(c / q);
    }
    r
}

/// Event on `y' = 0` going from negative to positive, i.e. local minima of `y`.
pub fn ydot_min_event<'a>(field: &'a dyn SmoothField2D, alpha: f64) -> EventSpec<'a, 2> {
    EventSpec::new(
        move |z: &[f64; 2]| field.eval(z[0], z[1], alpha)[1],
        Direction::Up,
        false,
    )
}

fn point_segment(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let l2 = dx * dx + dy * dy;
    let t = if l2 == 0.0 {
        0.0
    } else {
        (((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / l2).clamp(0.0, 1.0)
    };
    (p[0] - a[0] - t * dx).hypot(p[1] - a[1] - t * dy)
}

fn directed_hausdorff(a: &[Vec2], b: &[Vec2]) -> f64 {
    let n = b.len();
    a.iter()
        .map(|&p| {
            (0..n)
                .map(|i| point_segment(p, b[i], b[(i + 1) % n]))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}

/// Two-sided Hausdorff distance between closed polylines, measured from the
/// vertices of each to the segments of the other.
pub fn hausdorff_distance(a: &[Vec2], b: &[Vec2]) -> Result<f64> {
    if a.len() < 3 || b.len() < 3 {
        return Err(Error::Domain("polylines need at least 3 points".into()));
    }
    Ok(directed_hausdorff(a, b).max(directed_hausdorff(b, a)))
}

/// Planar polyline of an orbit, resampled at `n` equally spaced times when
/// the orbit is dense.
pub fn orbit_polyline<const N: usize>(orbit: &OrbitSegment<N>, n: usize) -> Vec<Vec2> {
    if !orbit.dense || n < 2 {
        return orbit.states.iter().map(|s| [s[0], s[1]]).collect();
    }
    let t_end = orbit.final_time();
    (0..n)
        .map(|i| {
            let t = t_end * i as f64 / n as f64;
            let s = orbit.interpolate(t).expect("t within the orbit");
            [s[0], s[1]]
        })
        .collect()
}

/// First crossing of `Sigma_R` by the orbit started on `y = 0` at `x_start`
/// (deep in the sliding region), i.e. the exit point `m(eps)` of the
/// attracting slow manifold.
pub fn measure_slow_manifold_exit(
    model: &PwsModel,
    regfn: RegFn,
    eps: f64,
    sections: &SectionPair,
    x_start: f64,
    alpha: f64,
    opts: &MapOptions,
) -> Result<f64> {
    sections.validate()?;
    if !(eps > 0.0) {
        return Err(Error::Domain("slow manifold exit needs eps > 0".into()));
    }
    let field = assemble_regularized(model, regfn, eps)?;
    let mut events = vec![EventSpec::y_level(sections.delta, Direction::Up, true)];
    events.extend(escape_events::<2>(&sections.bbox()));
    let integ = IntegOptions {
        store: false,
        ..opts.integ
    };
    let seg = integrate(&field, [x_start, 0.0], alpha, opts.t_max, &events, &integ)?;
    let hit = seg
        .terminal_hit()
        .ok_or(Error::NoReturn { t_max: opts.t_max })?;
    if hit.event != 0 {
        return Err(Error::Escape {
            x: hit.state[0],
            y: hit.state[1],
        });
    }
    Ok(hit.state[0])
}

/// Visible fold of `Z+` on `y = 0` near `x_guess`: Newton on `Z+ h (x, 0) = 0`.
pub fn visible_fold(model: &PwsModel, alpha: f64, x_guess: f64) -> Result<f64> {
    let mut x = x_guess;
    for _ in 0..50 {
        let a = model.lie_h(x, alpha).0;
        let da = model.z_plus.jacobian(x, 0.0, alpha)[1][0];
        if da.abs() < 1e-14 {
            return Err(Error::DegenerateFold(format!(
                "d(Z+ h)/dx vanishes at x = {x}"
            )));
        }
        let dx = a / da;
        x -= dx;
        if dx.abs() <= 1e-15 * (1.0 + x.abs()) {
            break;
        }
    }
    if model.lie_h(x, alpha).0.abs() > 1e-10 {
        return Err(Error::NotFound(format!("no fold near x = {x_guess}")));
    }
    if model.lie2_plus(x, alpha) <= 0.0 {
        return Err(Error::DegenerateFold(format!(
            "fold at x = {x} is not visible"
        )));
    }
    Ok(x)
}

/// `gamma_L`: where the `Z+` orbit tangent to `y = 0` at the fold crosses
/// `y = delta` before reaching the fold.
pub fn tangent_entry(model: &PwsModel, alpha: f64, x_fold: f64, delta: f64) -> Result<f64> {
    let events = [EventSpec::y_level(delta, Direction::Any, true)];
    let opts = IntegOptions::with_tol(1e-12).backward(true).store(false);
    let seg = integrate(&*model.z_plus, [x_fold, 0.0], alpha, 50.0, &events, &opts)?;
    let hit = seg.terminal_hit().ok_or(Error::NoReturn { t_max: 50.0 })?;
    Ok(hit.state[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{make_friction, normal_form_flat, FnField, FrictionParams};

    fn nf() -> (PwsModel, SectionPair) {
        (normal_form_flat(), SectionPair::normal_form(0.04))
    }

    #[test]
    fn fold_and_tangent_entry() {
        let m = normal_form_flat();
        let xf = visible_fold(&m, 0.0, 0.3).unwrap();
        assert!(xf.abs() < 1e-14);
        let g = tangent_entry(&m, 0.0, xf, 0.04).unwrap();
        assert!((g + 0.2).abs() < 1e-10, "{g}");
        let f = make_friction(FrictionParams::default()).unwrap();
        let xf = visible_fold(&f, 0.3, -0.5).unwrap();
        assert!((xf + 1.0).abs() < 1e-12);
        // the tangent orbit arrives from the right, above the fold
        let g = tangent_entry(&f, 0.3, xf, 0.1).unwrap();
        assert!(g > xf);
    }

    #[test]
    fn pws_map_left_region_collapses() {
        let (m, s) = nf();
        let r = q_map(
            &m,
            RegFn::smooth_sqrt(),
            0.0,
            &s,
            -0.35,
            0.0,
            false,
            &MapOptions::default(),
        )
        .unwrap();
        assert!((r.x_out - 0.2).abs() < 1e-9, "{r:?}");
        assert_eq!(r.d1, 0.0);
        // Z+ to y = 0 at x = -0.35 + 0.35 - ..., slide, then the parabola from the fold
        assert!(r.flight_time > 0.2);
    }

    #[test]
    fn pws_map_right_region_reflects() {
        let (m, s) = nf();
        let r = q_map(
            &m,
            RegFn::smooth_sqrt(),
            0.0,
            &s,
            -0.1,
            0.0,
            true,
            &MapOptions::default(),
        )
        .unwrap();
        assert!((r.x_out - 0.1).abs() < 1e-10);
        assert!((r.d1 + 1.0).abs() < 1e-8);
        assert!(r.d2.unwrap().abs() < 1e-4);
    }

    #[test]
    fn regularized_center_signs() {
        let (m, s) = nf();
        let opts = MapOptions::default();
        let r = q_map(&m, RegFn::smooth_sqrt(), 1e-4, &s, -0.2, 0.0, true, &opts).unwrap();
        assert!(r.d1 > -1.0 && r.d1 < 0.0, "{r:?}");
        assert!(r.d2.unwrap() < 0.0, "{r:?}");
        assert!(r.x_out > 0.0);
    }

    #[test]
    fn q_derivative_matches_differences() {
        let (m, s) = nf();
        let opts = MapOptions::default();
        let eps = 1e-3;
        for &x in &[-0.25, -0.21, -0.2, -0.195, -0.15] {
            let r = q_map(&m, RegFn::smooth_sqrt(), eps, &s, x, 0.0, false, &opts).unwrap();
            let h = 1e-6;
            let p = q_map(&m, RegFn::smooth_sqrt(), eps, &s, x + h, 0.0, false, &opts).unwrap();
            let q = q_map(&m, RegFn::smooth_sqrt(), eps, &s, x - h, 0.0, false, &opts).unwrap();
            let fd = (p.x_out - q.x_out) / (2.0 * h);
            assert!(
                (r.d1 - fd).abs() <= 1e-6 * fd.abs().max(1e-3),
                "x={x}: {} vs {fd}",
                r.d1
            );
        }
    }

    #[test]
    fn escape_is_reported() {
        let (m, mut s) = nf();
        s.box_center = [-0.2, 0.0];
        s.xi = 0.3;
        let r = q_map(
            &m,
            RegFn::smooth_sqrt(),
            1e-3,
            &s,
            -0.3,
            0.0,
            false,
            &MapOptions::default(),
        );
        assert!(matches!(r, Err(Error::Escape { .. })), "{r:?}");
    }

    #[test]
    fn slow_manifold_fiber_contraction() {
        let (m, s) = nf();
        let opts = MapOptions::default();
        let a = measure_slow_manifold_exit(&m, RegFn::smooth_sqrt(), 1e-4, &s, -0.1, 0.0, &opts)
            .unwrap();
        let b = measure_slow_manifold_exit(&m, RegFn::smooth_sqrt(), 1e-4, &s, -0.05, 0.0, &opts)
            .unwrap();
        assert!((a - b).abs() < 1e-8, "{a} {b}");
        assert!((a - 0.2).abs() < 0.01);
    }

    #[test]
    fn friction_return_product_rule() {
        let p = FrictionParams::default();
        let m = make_friction(p).unwrap();
        let f = assemble_regularized(&m, RegFn::smooth_sqrt(), 1e-2).unwrap();
        let alpha = 0.22;
        let s1 = friction_section(alpha);
        let s2 = PoincareSection::horizontal(alpha - 0.05, Direction::Down);
        let opts = MapOptions::default();
        let x = -0.8;
        let full = section_transit(&f, alpha, &s1, x, &s1, None, &opts).unwrap();
        let q = section_transit(&f, alpha, &s1, x, &s2, None, &opts).unwrap();
        let r = section_transit(&f, alpha, &s2, q.x_out, &s1, None, &opts).unwrap();
        assert!((full.x_out - r.x_out).abs() < 1e-9);
        assert!((full.d1 - q.d1 * r.d1).abs() <= 1e-6 * full.d1.abs());
        assert!((full.flight_time - q.flight_time - r.flight_time).abs() < 1e-8);
    }

    #[test]
    fn min_y_examples() {
        let (m, _) = nf();
        let ev = [EventSpec::y_level(0.04, Direction::Up, true)];
        let seg = integrate(
            &*m.z_plus,
            [-0.2, 0.04],
            0.0,
            1.0,
            &ev,
            &IntegOptions::default(),
        )
        .unwrap();
        let (y, t) = min_y_of_orbit(&seg);
        assert!(y.abs() < 1e-10, "{y}");
        assert!((t - 0.2).abs() < 1e-4);
        let osc = FnField::linear([[0.0, 1.0], [-1.0, 0.0]]);
        let seg = integrate(&osc, [1.0, 0.0], 0.0, 7.0, &[], &IntegOptions::default()).unwrap();
        let (y, _) = min_y_of_orbit(&seg);
        assert!((y + 1.0).abs() < 1e-9, "{y}");
    }

    fn circle(r: f64, n: usize) -> Vec<Vec2> {
        (0..n)
            .map(|i| {
                let a = std::f64::consts::TAU * i as f64 / n as f64;
                [r * a.cos(), r * a.sin()]
            })
            .collect()
    }

    #[test]
    fn hausdorff_examples() {
        let a = circle(1.0, 2000);
        let b = circle(1.1, 2000);
        assert_eq!(hausdorff_distance(&a, &a).unwrap(), 0.0);
        let d = hausdorff_distance(&a, &b).unwrap();
        assert!((d - 0.1).abs() < 1e-5, "{d}");
        assert_eq!(d, hausdorff_distance(&b, &a).unwrap());
        let p = vec![[0.5, 0.5]; 3];
        let d = hausdorff_distance(&p, &[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]]).unwrap();
        assert!(d > 0.0);
        assert!(hausdorff_distance(&a[..2], &b).is_err());
    }

    #[test]
    fn project_horizontal() {
        let s = PoincareSection::horizontal(0.1, Direction::Up);
        let d = s.project([1.0, 0.5], [2.0, 1.0]).unwrap();
        assert!((d - 0.0).abs() < 1e-15);
        assert!(s.project([1.0, 0.5], [1.0, 0.0]).is_err());
    }
}
