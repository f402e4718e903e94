//! Piecewise-smooth planar models, classification of points on the switching
//! line `y = 0`, the Filippov sliding field, and the regularized smooth field.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::regfn::{RegFn, EPS_MAX};

/// Absolute tolerance for Lie-derivative sign tests on `y = 0`.
pub const TOL_SIGN: f64 = 1e-10;

pub type Vec2 = [f64; 2];
pub type Mat2 = [[f64; 2]; 2];

/// A smooth planar vector field depending on a scalar parameter `alpha`.
pub trait SmoothField2D: Send + Sync {
    fn eval(&self, x: f64, y: f64, alpha: f64) -> Vec2;

    /// `d(f1, f2) / d(x, y)`, row-major.
    fn jacobian(&self, x: f64, y: f64, alpha: f64) -> Mat2;

    fn d_alpha(&self, x: f64, y: f64, alpha: f64) -> Vec2;

    /// Width of a thin stiff layer around `y = 0`, if the field has one.
    fn layer_width(&self) -> Option<f64> {
        None
    }
}

type EvalFn = dyn Fn(f64, f64, f64) -> Vec2 + Send + Sync;
type JacFn = dyn Fn(f64, f64, f64) -> Mat2 + Send + Sync;

/// A field assembled from closures.
#[derive(Clone)]
pub struct FnField {
    eval: Arc<EvalFn>,
    jac: Arc<JacFn>,
    d_alpha: Arc<EvalFn>,
}

impl FnField {
    pub fn new(
        eval: impl Fn(f64, f64, f64) -> Vec2 + Send + Sync + 'static,
        jac: impl Fn(f64, f64, f64) -> Mat2 + Send + Sync + 'static,
    ) -> Self {
        Self {
            eval: Arc::new(eval),
            jac: Arc::new(jac),
            d_alpha: Arc::new(|_, _, _| [0.0, 0.0]),
        }
    }

    pub fn with_d_alpha(
        mut self,
        d_alpha: impl Fn(f64, f64, f64) -> Vec2 + Send + Sync + 'static,
    ) -> Self {
        self.d_alpha = Arc::new(d_alpha);
        self
    }

    pub fn constant(v: Vec2) -> Self {
        Self::new(move |_, _, _| v, |_, _, _| [[0.0; 2]; 2])
    }

    /// `z' = A z` for a constant matrix `A`.
    pub fn linear(a: Mat2) -> Self {
        Self::new(
            move |x, y, _| [a[0][0] * x + a[0][1] * y, a[1][0] * x + a[1][1] * y],
            move |_, _, _| a,
        )
    }
}

impl fmt::Debug for FnField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("FnField")
    }
}

impl SmoothField2D for FnField {
    fn eval(&self, x: f64, y: f64, alpha: f64) -> Vec2 {
        (self.eval)(x, y, alpha)
    }

    fn jacobian(&self, x: f64, y: f64, alpha: f64) -> Mat2 {
        (self.jac)(x, y, alpha)
    }

    fn d_alpha(&self, x: f64, y: f64, alpha: f64) -> Vec2 {
        (self.d_alpha)(x, y, alpha)
    }
}

impl<T: SmoothField2D + ?Sized> SmoothField2D for Arc<T> {
    fn eval(&self, x: f64, y: f64, alpha: f64) -> Vec2 {
        (**self).eval(x, y, alpha)
    }

    fn jacobian(&self, x: f64, y: f64, alpha: f64) -> Mat2 {
        (**self).jacobian(x, y, alpha)
    }

    fn d_alpha(&self, x: f64, y: f64, alpha: f64) -> Vec2 {
        (**self).d_alpha(x, y, alpha)
    }

    fn layer_width(&self) -> Option<f64> {
        (**self).layer_width()
    }
}

/// A smooth scalar function of `(x, y)` with its gradient.
#[derive(Clone)]
pub struct Smooth2 {
    value: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>,
    grad: Arc<dyn Fn(f64, f64) -> Vec2 + Send + Sync>,
}

impl Smooth2 {
    pub fn new(
        value: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        grad: impl Fn(f64, f64) -> Vec2 + Send + Sync + 'static,
    ) -> Self {
        Self {
            value: Arc::new(value),
            grad: Arc::new(grad),
        }
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn constant(c: f64) -> Self {
        Self::new(move |_, _| c, |_, _| [0.0, 0.0])
    }

    pub fn value(&self, x: f64, y: f64) -> f64 {
        (self.value)(x, y)
    }

    pub fn grad(&self, x: f64, y: f64) -> Vec2 {
        (self.grad)(x, y)
    }
}

impl fmt::Debug for Smooth2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("Smooth2")
    }
}

/// A pair of smooth fields `Z+` (used in `y > 0`) and `Z-` (in `y < 0`),
/// switching on `h(x, y) = y`.
#[derive(Clone)]
pub struct PwsModel {
    pub z_plus: Arc<dyn SmoothField2D>,
    pub z_minus: Arc<dyn SmoothField2D>,
}

impl fmt::Debug for PwsModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("PwsModel")
    }
}

impl PwsModel {
    pub fn new(
        z_plus: impl SmoothField2D + 'static,
        z_minus: impl SmoothField2D + 'static,
    ) -> Self {
        Self {
            z_plus: Arc::new(z_plus),
            z_minus: Arc::new(z_minus),
        }
    }

    /// The switching function.
    pub fn h(&self, _x: f64, y: f64) -> f64 {
        y
    }

    /// Lie derivatives `(Z+ h, Z- h)` at `(x, 0)`.
    pub fn lie_h(&self, x: f64, alpha: f64) -> (f64, f64) {
        (
            self.z_plus.eval(x, 0.0, alpha)[1],
            self.z_minus.eval(x, 0.0, alpha)[1],
        )
    }

    /// `Z+(Z+ h)` at `(x, 0)`.
    pub fn lie2_plus(&self, x: f64, alpha: f64) -> f64 {
        let z = self.z_plus.eval(x, 0.0, alpha);
        let j = self.z_plus.jacobian(x, 0.0, alpha);
        j[1][0] * z[0] + j[1][1] * z[1]
    }
}

/// Normal form of a visible fold at the origin:
/// `Z+ = (1 + f, 2x + y g)`, `Z- = (0, 1)`, with `f(0, 0) = 0`.
pub fn make_normal_form(f: Smooth2, g: Smooth2) -> Result<PwsModel> {
    let f0 = f.value(0.0, 0.0);
    if f0 != 0.0 {
        return Err(Error::InvalidModel(format!(
            "normal form requires f(0,0) = 0, got {f0}"
        )));
    }
    let (fe, ge) = (f.clone(), g.clone());
    let plus = FnField::new(
        move |x, y, _| [1.0 + fe.value(x, y), 2.0 * x + y * ge.value(x, y)],
        move |x, y, _| {
            let df = f.grad(x, y);
            let dg = g.grad(x, y);
            [[df[0], df[1]], [2.0 + y * dg[0], g.value(x, y) + y * dg[1]]]
        },
    );
    Ok(PwsModel::new(plus, FnField::constant([0.0, 1.0])))
}

/// Normal form with `f = g = 0`.
pub fn normal_form_flat() -> PwsModel {
    make_normal_form(Smooth2::zero(), Smooth2::zero()).expect("f = 0 is admissible")
}

/// Parameters of the Stribeck friction law `mu+(y) = mu_m + (mu_s - mu_m) e^{-rho y} + c y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrictionParams {
    pub mu_s: f64,
    pub mu_m: f64,
    pub rho: f64,
    pub c_fric: f64,
}

impl Default for FrictionParams {
    fn default() -> Self {
        Self {
            mu_s: 1.0,
            mu_m: 0.5,
            rho: 4.0,
            c_fric: 0.85,
        }
    }
}

impl FrictionParams {
    pub fn validate(&self) -> Result<()> {
        let Self {
            mu_s,
            mu_m,
            rho,
            c_fric,
        } = *self;
        let all_pos = [mu_s, mu_m, rho, c_fric]
            .iter()
            .all(|v| v.is_finite() && *v > 0.0);
        if !all_pos {
            return Err(Error::InvalidModel(
                "friction parameters must be positive and finite".into(),
            ));
        }
        if mu_s <= mu_m {
            return Err(Error::InvalidModel(format!(
                "need mu_s > mu_m, got mu_s = {mu_s}, mu_m = {mu_m}"
            )));
        }
        if c_fric >= rho * (mu_s - mu_m) {
            return Err(Error::InvalidModel(format!(
                "need c_fric < rho (mu_s - mu_m) = {}, got {c_fric}",
                rho * (mu_s - mu_m)
            )));
        }
        Ok(())
    }

    pub fn mu(&self, y: f64) -> f64 {
        self.mu_m + (self.mu_s - self.mu_m) * (-self.rho * y).exp() + self.c_fric * y
    }

    pub fn dmu(&self, y: f64) -> f64 {
        -self.rho * (self.mu_s - self.mu_m) * (-self.rho * y).exp() + self.c_fric
    }
}

/// Derived quantities of the friction law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrictionProps {
    pub y0: f64,
    /// Minimizer of `mu+` found by golden-section search on `[0, 2]`.
    pub y0_numeric: f64,
    pub mu_pp: f64,
    pub mu_ppp: f64,
    /// Hopf parameter of `Z+` (the `eps = 0` value).
    pub alpha_hopf: f64,
    pub subcritical: bool,
}

pub fn friction_props(p: &FrictionParams) -> Result<FrictionProps> {
    p.validate()?;
    let y0 = -(p.c_fric / (p.rho * (p.mu_s - p.mu_m))).ln() / p.rho;
    let y0_numeric = golden_section_min(|y| p.mu(y), 0.0, 2.0, 1e-10);
    let mu_ppp = -p.rho * p.rho * p.c_fric;
    Ok(FrictionProps {
        y0,
        y0_numeric,
        mu_pp: p.rho * p.c_fric,
        mu_ppp,
        alpha_hopf: y0,
        subcritical: mu_ppp < 0.0,
    })
}

/// Friction oscillator `x' = y - alpha`, `y' = -x - mu(y, p)` as a PWS pair:
/// `Z+ = (y - alpha, -x - mu+(y))`, `Z- = (y - alpha, -x + mu+(-y))`.
pub fn make_friction(p: FrictionParams) -> Result<PwsModel> {
    p.validate()?;
    let plus = FnField::new(
        move |x, y, a| [y - a, -x - p.mu(y)],
        move |_, y, _| [[0.0, 1.0], [-1.0, -p.dmu(y)]],
    )
    .with_d_alpha(|_, _, _| [-1.0, 0.0]);
    let minus = FnField::new(
        move |x, y, a| [y - a, -x + p.mu(-y)],
        move |_, y, _| [[0.0, 1.0], [-1.0, -p.dmu(-y)]],
    )
    .with_d_alpha(|_, _, _| [-1.0, 0.0]);
    Ok(PwsModel::new(plus, minus))
}

fn golden_section_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// The smooth field `phi(y/eps, eps) Z+ + (1 - phi) Z-`.
#[derive(Clone, Debug)]
pub struct RegularizedField {
    pub model: PwsModel,
    pub regfn: RegFn,
    pub eps: f64,
}

pub fn assemble_regularized(model: &PwsModel, regfn: RegFn, eps: f64) -> Result<RegularizedField> {
    if !(eps > 0.0 && eps <= EPS_MAX) {
        return Err(Error::Domain(format!(
            "regularization needs 0 < eps <= {EPS_MAX}, got {eps}"
        )));
    }
    Ok(RegularizedField {
        model: model.clone(),
        regfn,
        eps,
    })
}

impl SmoothField2D for RegularizedField {
    fn eval(&self, x: f64, y: f64, alpha: f64) -> Vec2 {
        let (p, q) = self.regfn.pair(y / self.eps, self.eps);
        let zp = self.model.z_plus.eval(x, y, alpha);
        let zm = self.model.z_minus.eval(x, y, alpha);
        [p * zp[0] + q * zm[0], p * zp[1] + q * zm[1]]
    }

    fn jacobian(&self, x: f64, y: f64, alpha: f64) -> Mat2 {
        let s = y / self.eps;
        let (p, q) = self.regfn.pair(s, self.eps);
        let dp = self.regfn.deriv_unchecked(s, self.eps) / self.eps;
        let zp = self.model.z_plus.eval(x, y, alpha);
        let zm = self.model.z_minus.eval(x, y, alpha);
        let jp = self.model.z_plus.jacobian(x, y, alpha);
        let jm = self.model.z_minus.jacobian(x, y, alpha);
        let mut j = [[0.0; 2]; 2];
        for i in 0..2 {
            for k in 0..2 {
                j[i][k] = p * jp[i][k] + q * jm[i][k];
            }
            j[i][1] += dp * (zp[i] - zm[i]);
        }
        j
    }

    fn d_alpha(&self, x: f64, y: f64, alpha: f64) -> Vec2 {
        let (p, q) = self.regfn.pair(y / self.eps, self.eps);
        let ap = self.model.z_plus.d_alpha(x, y, alpha);
        let am = self.model.z_minus.d_alpha(x, y, alpha);
        [p * ap[0] + q * am[0], p * ap[1] + q * am[1]]
    }

    fn layer_width(&self) -> Option<f64> {
        Some(self.eps)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SigmaTag {
    Crossing,
    Sliding,
    Tangency,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TangencyKind {
    VisibleFold,
    Other,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SigmaClass {
    pub tag: SigmaTag,
    pub tangency_kind: Option<TangencyKind>,
}

/// Classifies the point `(x, 0)` by the signs of `Z+ h` and `Z- h`.
pub fn classify_sigma_point(model: &PwsModel, x: f64, alpha: f64) -> SigmaClass {
    let (a, b) = model.lie_h(x, alpha);
    if a.abs() <= TOL_SIGN || b.abs() <= TOL_SIGN {
        let visible = a.abs() <= TOL_SIGN && model.lie2_plus(x, alpha) > TOL_SIGN && b > TOL_SIGN;
        return SigmaClass {
            tag: SigmaTag::Tangency,
            tangency_kind: Some(if visible {
                TangencyKind::VisibleFold
            } else {
                TangencyKind::Other
            }),
        };
    }
    SigmaClass {
        tag: if a * b > 0.0 {
            SigmaTag::Crossing
        } else {
            SigmaTag::Sliding
        },
        tangency_kind: None,
    }
}

/// Weight `lambda` of the Filippov convex combination at a sliding point.
pub fn filippov_weight(model: &PwsModel, x: f64, alpha: f64) -> Result<f64> {
    let class = classify_sigma_point(model, x, alpha);
    if class.tag != SigmaTag::Sliding {
        return Err(Error::NotSliding(format!(
            "(x, y) = ({x}, 0) is classified {:?}",
            class.tag
        )));
    }
    let (a, b) = model.lie_h(x, alpha);
    Ok(b / (b - a))
}

/// `x'` of the Filippov sliding field at `(x, 0)`.
pub fn filippov_drift(model: &PwsModel, x: f64, alpha: f64) -> Result<f64> {
    let lambda = filippov_weight(model, x, alpha)?;
    let zp = model.z_plus.eval(x, 0.0, alpha);
    let zm = model.z_minus.eval(x, 0.0, alpha);
    Ok(lambda * zp[0] + (1.0 - lambda) * zm[0])
}
