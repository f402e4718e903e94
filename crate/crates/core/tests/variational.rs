//! Variational derivatives of the section maps against central differences.

use foldlab::continuation::{CycleProblem, SectionFamily};
use foldlab::maps::{q_map, MapOptions, SectionPair};
use foldlab::models::{make_friction, normal_form_flat, FrictionParams};
use foldlab::regfn::RegFn;
use proptest::prelude::*;

/// Relative agreement `1e-6`, with an absolute floor `1e-7` below which the
/// difference quotients at tol `1e-12` do not resolve.
fn agrees(d1: f64, fd: f64) -> bool {
    (d1 - fd).abs() <= 1e-6 * fd.abs().max(0.1)
}

/// Median of five-point central differences over several steps. Adaptive step
/// sequences make `x_out` jitter at the `1e-12` level between nearby starts, so
/// a single quotient occasionally lands far off.
fn diff5(f: impl Fn(f64) -> f64, x: f64) -> f64 {
    let mut d: Vec<f64> = [1e-4, 5e-5, 3e-5, 2e-5, 1e-5]
        .iter()
        .map(|&h| (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h))
        .collect();
    d.sort_by(f64::total_cmp);
    d[2]
}

fn tight() -> MapOptions {
    let mut o = MapOptions::default();
    o.integ.tol = 1e-12;
    o
}

fn friction(eps: f64) -> CycleProblem {
    let m = make_friction(FrictionParams::default()).unwrap();
    let mut pr = CycleProblem::new(m, RegFn::smooth_sqrt(), eps, SectionFamily::AlphaLevel);
    pr.map.integ.tol = 1e-12;
    pr
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn q_map_derivative(le in -4.0..-2.5f64, sig in -1.0..3.0f64, gk in any::<bool>()) {
        let m = normal_form_flat();
        let s = SectionPair::normal_form(0.04);
        let rf = if gk { RegFn::goldbeter_koshland() } else { RegFn::smooth_sqrt() };
        let eps = 10f64.powf(le);
        let x = (-0.2 + sig * eps.powf(rf.scaling_exponent().unwrap())).min(s.i_l[1]);
        let o = tight();
        let r = q_map(&m, rf, eps, &s, x, 0.0, false, &o).unwrap();
        let fd = diff5(|x| q_map(&m, rf, eps, &s, x, 0.0, false, &o).unwrap().x_out, x);
        prop_assert!(agrees(r.d1, fd), "eps={} x={}: {} vs {}", eps, x, r.d1, fd);
    }

    #[test]
    fn pure_return_derivative(alpha in 0.232..0.3f64, dx in 0.02..0.12f64) {
        let p = FrictionParams::default();
        // starts inside the repelling cycle of Z+
        let pr = friction(0.0);
        let x = -p.mu(alpha) + dx;
        let r = pr.p(x, alpha).unwrap();
        let fd = diff5(|x| pr.p(x, alpha).unwrap().x_out, x);
        prop_assert!(agrees(r.d1, fd), "alpha={} x={}: {} vs {}", alpha, x, r.d1, fd);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn regularized_return_derivative(le in -3.0..-2.0f64, alpha in 0.18..0.23f64, dx in 0.05..0.2f64) {
        let p = FrictionParams::default();
        let pr = friction(10f64.powf(le));
        let x = -p.mu(alpha) + dx;
        let r = pr.p(x, alpha).unwrap();
        let fd = diff5(|x| pr.p(x, alpha).unwrap().x_out, x);
        prop_assert!(agrees(r.d1, fd), "eps={} alpha={} x={}: {} vs {}", pr.eps, alpha, x, r.d1, fd);
    }

    #[test]
    fn contracting_region_is_flat(le in -4.0..-3.0f64, t in 0.0..1.0f64) {
        // far left of the fold Q' is exponentially small; the quotient only sees noise
        let m = normal_form_flat();
        let s = SectionPair::normal_form(0.04);
        let eps = 10f64.powf(le);
        let x = s.i_l[0] + t * (-0.22 - s.i_l[0]);
        let o = tight();
        let rf = RegFn::smooth_sqrt();
        let r = q_map(&m, rf, eps, &s, x, 0.0, false, &o).unwrap();
        let fd = diff5(|x| q_map(&m, rf, eps, &s, x, 0.0, false, &o).unwrap().x_out, x);
        prop_assert!(r.d1.abs() < 1e-6 && fd.abs() < 1e-5, "eps={} x={}: {} vs {}", eps, x, r.d1, fd);
    }
}
