//! Regularization functions `phi(s, eps)`.
//!
//! Every family here is a smooth, strictly increasing switch with limits 0 and
//! 1 as `s -> -inf` and `s -> +inf`. The finite-decay families approach their
//! limits algebraically,
//!
//! ```text
//! 1 - phi(1/e1, r1 e1) = e1^k+ (phi+(0,0) + o(1)),   phi(-1/e3, r3 e3) = e3^k- (phi-(0,0) + o(1)),
//! ```
//!
//! and `k+` controls the scaling exponent `2k/(2k+1)` seen everywhere downstream.
//!
//! All evaluations are rearranged so that both `phi` and its complement
//! `1 - phi` are computed without cancellation, which matters for the tails
//! (`|s|` up to `1e6` and beyond).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::least_squares;

/// Largest admissible `eps` for the epsilon-dependent families.
pub const EPS_MAX: f64 = 0.5;

/// The supported regularization families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegFnId {
    /// `phi(s) = (1 + s / sqrt(s^2 + 1)) / 2`.
    SmoothSqrt,
    /// Normalized Goldbeter-Koshland switch (depends on `eps`).
    GoldbeterKoshland,
    /// `phi(s) = 1/2 + arctan(s) / pi`.
    Arctan,
    /// `phi(s) = e^s / (1 + e^s)`; exponential tails, outside the algebraic-decay class.
    Logistic,
}

impl RegFnId {
    pub const ALL: [RegFnId; 4] = [
        RegFnId::SmoothSqrt,
        RegFnId::GoldbeterKoshland,
        RegFnId::Arctan,
        RegFnId::Logistic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RegFnId::SmoothSqrt => "smooth_sqrt",
            RegFnId::GoldbeterKoshland => "goldbeter_koshland",
            RegFnId::Arctan => "arctan",
            RegFnId::Logistic => "logistic",
        }
    }
}

impl std::str::FromStr for RegFnId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        RegFnId::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| Error::Domain(format!("unknown regularization function '{s}'")))
    }
}

/// Algebraic decay rate of a regularization function towards its limits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DecayRate {
    Finite(u32),
    Infinite,
}

impl DecayRate {
    pub fn finite(self) -> Option<u32> {
        match self {
            DecayRate::Finite(k) => Some(k),
            DecayRate::Infinite => None,
        }
    }
}

/// Decay metadata of a regularization function.
///
/// `phi_plus_00` is the leading coefficient `c` in `1 - phi(s) = c s^-k + ...`
/// as `s -> +inf` (and `phi_minus_00` the analogue at `-inf`).
///
/// For `smooth_sqrt` there are two readings of the tail data. Read as
/// `eps1^k phi+(eps1, r1 eps1) = eps1^2/4 + O(eps1^4)` with `k = 2`, the coefficient is
/// `phi+(0,0) = 1/4`, which is what is stored here. Read literally as
/// `phi+(eps1, r1 eps1) = eps1^2/4 + ...`, `phi+` would vanish at the origin, which is
/// incompatible with `phi+` taking values in a positive interval. The first
/// reading is the only one consistent with `k = 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayData {
    pub k_plus: DecayRate,
    pub k_minus: DecayRate,
    pub phi_plus_00: Option<f64>,
    pub phi_minus_00: Option<f64>,
    /// Set for families with exponential tails; they do not have a finite decay rate.
    pub a2_excluded: bool,
}

/// A regularization function `phi(s, eps)` with its exact `s`-derivative.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RegFn {
    pub id: RegFnId,
}

impl RegFn {
    pub const fn new(id: RegFnId) -> Self {
        Self { id }
    }

    pub const fn smooth_sqrt() -> Self {
        Self::new(RegFnId::SmoothSqrt)
    }

    pub const fn goldbeter_koshland() -> Self {
        Self::new(RegFnId::GoldbeterKoshland)
    }

    fn check(s: f64, eps: f64) -> Result<()> {
        if !s.is_finite() {
            return Err(Error::Domain(format!("s must be finite, got {s}")));
        }
        if !eps.is_finite() || !(0.0..=EPS_MAX).contains(&eps) {
            return Err(Error::Domain(format!(
                "eps must lie in [0, {EPS_MAX}], got {eps}"
            )));
        }
        Ok(())
    }

    /// `phi(s, eps)`.
    pub fn eval(&self, s: f64, eps: f64) -> Result<f64> {
        Self::check(s, eps)?;
        Ok(self.pair(s, eps).0)
    }

    /// `1 - phi(s, eps)`, accurate in the upper tail.
    pub fn complement(&self, s: f64, eps: f64) -> Result<f64> {
        Self::check(s, eps)?;
        Ok(self.pair(s, eps).1)
    }

    /// `d phi / d s`, coded analytically.
    pub fn deriv_s(&self, s: f64, eps: f64) -> Result<f64> {
        Self::check(s, eps)?;
        Ok(self.deriv_unchecked(s, eps))
    }

    /// `(phi, 1 - phi)` without argument validation. Callers inside the crate
    /// validate `eps` once when building a regularized field.
    pub(crate) fn pair(&self, s: f64, eps: f64) -> (f64, f64) {
        match self.id {
            RegFnId::SmoothSqrt => {
                let r = (s * s + 1.0).sqrt();
                if s >= 0.0 {
                    let c = 0.5 / (r * (r + s));
                    (1.0 - c, c)
                } else {
                    let p = 0.5 / (r * (r - s));
                    (p, 1.0 - p)
                }
            }
            RegFnId::Arctan => {
                if s >= 0.0 {
                    let c = if s == 0.0 {
                        0.5
                    } else {
                        (1.0 / s).atan() / std::f64::consts::PI
                    };
                    (1.0 - c, c)
                } else {
                    let p = (-1.0 / s).atan() / std::f64::consts::PI;
                    (p, 1.0 - p)
                }
            }
            RegFnId::Logistic => {
                if s >= 0.0 {
                    let e = (-s).exp();
                    (1.0 / (1.0 + e), e / (1.0 + e))
                } else {
                    let e = s.exp();
                    (e / (1.0 + e), 1.0 / (1.0 + e))
                }
            }
            RegFnId::GoldbeterKoshland => gk_pair(s, eps),
        }
    }

    pub(crate) fn deriv_unchecked(&self, s: f64, eps: f64) -> f64 {
        match self.id {
            RegFnId::SmoothSqrt => 0.5 / (s * s + 1.0).powf(1.5),
            RegFnId::Arctan => 1.0 / (std::f64::consts::PI * (1.0 + s * s)),
            RegFnId::Logistic => {
                let (p, c) = self.pair(s, eps);
                p * c
            }
            RegFnId::GoldbeterKoshland => gk_deriv(s, eps),
        }
    }

    /// Stored (A2)-type decay metadata.
    pub fn decay_data(&self) -> DecayData {
        match self.id {
            RegFnId::SmoothSqrt => DecayData {
                k_plus: DecayRate::Finite(2),
                k_minus: DecayRate::Finite(2),
                phi_plus_00: Some(0.25),
                phi_minus_00: Some(0.25),
                a2_excluded: false,
            },
            RegFnId::GoldbeterKoshland => DecayData {
                k_plus: DecayRate::Finite(1),
                k_minus: DecayRate::Finite(1),
                phi_plus_00: Some(1.0),
                phi_minus_00: Some(1.0),
                a2_excluded: false,
            },
            RegFnId::Arctan => DecayData {
                k_plus: DecayRate::Finite(1),
                k_minus: DecayRate::Finite(1),
                phi_plus_00: Some(1.0 / std::f64::consts::PI),
                phi_minus_00: Some(1.0 / std::f64::consts::PI),
                a2_excluded: false,
            },
            RegFnId::Logistic => DecayData {
                k_plus: DecayRate::Infinite,
                k_minus: DecayRate::Infinite,
                phi_plus_00: None,
                phi_minus_00: None,
                a2_excluded: true,
            },
        }
    }

    /// `k+` if finite.
    pub fn k(&self) -> Option<u32> {
        self.decay_data().k_plus.finite()
    }

    /// The exponent `2k/(2k+1)` of the fold scaling, if `k+` is finite.
    pub fn scaling_exponent(&self) -> Option<f64> {
        self.k().map(|k| 2.0 * k as f64 / (2.0 * k as f64 + 1.0))
    }

    /// Least-squares slope of `log(1 - phi(1/e1, 0))` against `log e1` over
    /// 41 log-spaced points in `[1e-4, 1e-2]`. Recovers `k+` for the
    /// algebraic families.
    pub fn empirical_decay_rate(&self) -> f64 {
        let n = 41;
        let (xs, ys): (Vec<f64>, Vec<f64>) = (0..n)
            .map(|i| {
                let e1 = 10f64.powf(-4.0 + 2.0 * i as f64 / (n - 1) as f64);
                let c = self.pair(1.0 / e1, 0.0).1;
                (e1.ln(), c.ln())
            })
            .unzip();
        least_squares(&xs, &ys).slope
    }
}

// Goldbeter-Koshland, normalized so that phi -> 0, 1:
//
//   phi = N / ((1 + e) M),
//   N = 2 + 2e + e s (1 + e) + e sqrt(D),   M = 2 - s (1 - e) + sqrt(D),
//   D = (1 + e)^2 s^2 + 4 e s + 4,
//
// and 1 - phi = C / ((1 + e) M) with C = sqrt(D) - s (1 + e). The tails
// cancel in M and C for s > 0 and in N for s < 0; there we use
//
//   M = 2 + 4(e s^2 + e s + 1) / (sqrt(D) + s (1 - e)),
//   C = 4(e s + 1) / (sqrt(D) + s (1 + e)),
//   N = 2(1 + e) + 4 e (e s + 1) / (sqrt(D) - s (1 + e)).
//
// At e = 0 this is exactly 2 / (2 - s + sqrt(s^2 + 4)).
fn gk_pair(s: f64, e: f64) -> (f64, f64) {
    let q = 1.0 + e;
    let sd = (q * q * s * s + 4.0 * e * s + 4.0).sqrt();
    if s >= 0.0 {
        let m = 2.0 + 4.0 * (e * s * s + e * s + 1.0) / (sd + s * (1.0 - e));
        let c = 4.0 * (e * s + 1.0) / (sd + s * q);
        let comp = c / (q * m);
        (1.0 - comp, comp)
    } else {
        let m = 2.0 - s * (1.0 - e) + sd;
        let n = 2.0 * q + 4.0 * e * (e * s + 1.0) / (sd - s * q);
        let p = n / (q * m);
        (p, 1.0 - p)
    }
}

fn gk_deriv(s: f64, e: f64) -> f64 {
    let q = 1.0 + e;
    let sd = (q * q * s * s + 4.0 * e * s + 4.0).sqrt();
    // half of dD/ds
    let hd = q * q * s + 2.0 * e;
    if s >= 0.0 {
        // phi = 1 - C / (q M)
        let m = 2.0 + 4.0 * (e * s * s + e * s + 1.0) / (sd + s * (1.0 - e));
        let c = 4.0 * (e * s + 1.0) / (sd + s * q);
        let dc = -4.0 * (1.0 + 2.0 * e) / (sd * (hd + q * sd));
        let dm = (4.0 * e * q * q * s * s + 16.0 * e * e * s + 4.0 * (2.0 * e - 1.0))
            / (sd * (hd + (1.0 - e) * sd));
        -(dc * m - c * dm) / (q * m * m)
    } else {
        // phi = N / (q M)
        let m = 2.0 - s * (1.0 - e) + sd;
        let n = 2.0 * q + 4.0 * e * (e * s + 1.0) / (sd - s * q);
        let dn = 4.0 * e * (1.0 + 2.0 * e) / (sd * (q * sd - hd));
        let dm = -(1.0 - e) + hd / sd;
        (dn * m - n * dm) / (q * m * m)
    }
}
