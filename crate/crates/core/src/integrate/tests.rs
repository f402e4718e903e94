use super::*;
use crate::fit::log_log_fit;
use crate::models::{
    assemble_regularized, make_friction, normal_form_flat, FnField, FrictionParams,
};
use crate::regfn::RegFn;
use std::f64::consts::PI;

fn oscillator() -> FnField {
    FnField::linear([[0.0, 1.0], [-1.0, 0.0]])
}

#[test]
fn harmonic_oscillator_full_turn() {
    let f = oscillator();
    let seg = integrate(
        &f,
        [1.0, 0.0],
        0.0,
        2.0 * PI,
        &[],
        &IntegOptions::with_tol(1e-10),
    )
    .unwrap();
    let z = seg.final_state();
    assert!((z[0] - 1.0).abs() < 1e-9 && z[1].abs() < 1e-9, "{z:?}");
    assert!(seg.times.windows(2).all(|w| w[1] > w[0]));
    assert_eq!(seg.final_time(), 2.0 * PI);
}

#[test]
fn parabola_event() {
    let m = normal_form_flat();
    let ev = [EventSpec::y_level(0.04, Direction::Up, true)];
    let seg = integrate(
        &*m.z_plus,
        [-0.2, 0.04],
        0.0,
        5.0,
        &ev,
        &IntegOptions::default(),
    )
    .unwrap();
    let hit = seg.terminal_hit().unwrap();
    assert!((hit.state[0] - 0.2).abs() < 1e-10, "{hit:?}");
    assert!((hit.t - 0.4).abs() < 1e-10);
    assert!((hit.state[1] - 0.04).abs() <= 1e-12);
    assert!(!hit.tangential);
}

#[test]
fn event_direction_filter() {
    let f = oscillator();
    // x = cos t: crosses zero downward at pi/2 and upward at 3pi/2
    let ev = [
        EventSpec::x_level(0.0, Direction::Up, false),
        EventSpec::x_level(0.0, Direction::Down, false),
        EventSpec::x_level(0.0, Direction::Any, false),
    ];
    let seg = integrate(&f, [1.0, 0.0], 0.0, 2.0 * PI, &ev, &IntegOptions::default()).unwrap();
    let times = |id: usize| -> Vec<f64> {
        seg.events
            .iter()
            .filter(|h| h.event == id)
            .map(|h| h.t)
            .collect()
    };
    assert_eq!(times(0).len(), 1);
    assert!((times(0)[0] - 1.5 * PI).abs() < 1e-9);
    assert_eq!(times(1).len(), 1);
    assert!((times(1)[0] - 0.5 * PI).abs() < 1e-9);
    assert_eq!(times(2).len(), 2);
    assert!(seg.terminal.is_none());
}

#[test]
fn event_residual_within_tolerance() {
    let f = oscillator();
    let ev = [EventSpec::new(
        |z: &[f64; 2]| z[0] * z[0] - 0.3,
        Direction::Any,
        false,
    )];
    let opts = IntegOptions::with_tol(1e-8);
    let seg = integrate(&f, [1.0, 0.0], 0.0, 20.0, &ev, &opts).unwrap();
    assert!(seg.events.len() >= 12);
    for h in &seg.events {
        let g = h.state[0] * h.state[0] - 0.3;
        assert!(g.abs() <= 2e-12, "{g}");
    }
}

#[test]
fn tangential_crossing_flagged() {
    let f = FnField::constant([1.0, 0.0]);
    let ev = [EventSpec::new(
        |z: &[f64; 2]| z[0].powi(3),
        Direction::Up,
        true,
    )];
    let seg = integrate(&f, [-0.2, 0.0], 0.0, 1.0, &ev, &IntegOptions::default()).unwrap();
    let hit = seg.terminal_hit().unwrap();
    assert!(hit.tangential);
    assert!(hit.state[0].abs() < 1e-4);
}

#[test]
fn no_retrigger_from_event_point() {
    let m = normal_form_flat();
    let ev = [EventSpec::y_level(0.04, Direction::Up, true)];
    let opts = IntegOptions::default();
    let first = integrate(&*m.z_plus, [-0.2, 0.04], 0.0, 5.0, &ev, &opts).unwrap();
    let z = first.terminal_hit().unwrap().state;
    let again = integrate(&*m.z_plus, z, 0.0, 5.0, &ev, &opts).unwrap();
    if let Some(h) = again.terminal_hit() {
        assert!(h.t >= 1e-10);
    }
    // and from a point just below the section moving up
    let below = [z[0], z[1] - 1e-13];
    let again = integrate(&*m.z_plus, below, 0.0, 5.0, &ev, &opts).unwrap();
    if let Some(h) = again.terminal_hit() {
        assert!(h.t >= 1e-10);
    }
}

#[test]
fn backward_returns_to_start() {
    let p = FrictionParams::default();
    let m = make_friction(p).unwrap();
    for &tol in &[1e-8, 1e-10] {
        let opts = IntegOptions::with_tol(tol);
        let z0 = [-0.85, 0.3];
        let fw = integrate(&*m.z_plus, z0, 0.3, 3.0, &[], &opts).unwrap();
        let bw = integrate(
            &*m.z_plus,
            fw.final_state(),
            0.3,
            3.0,
            &[],
            &opts.backward(true),
        )
        .unwrap();
        assert!(bw.backward);
        let z = bw.final_state();
        let d = (z[0] - z0[0]).abs().max((z[1] - z0[1]).abs());
        assert!(d <= 10.0 * tol, "tol {tol}: {d}");
    }
}

#[test]
fn explicit_order_of_accuracy() {
    let f = oscillator();
    let mut steps = vec![];
    let mut errs = vec![];
    for &tol in &[1e-6, 1e-7, 1e-8, 1e-9, 1e-10, 1e-11] {
        let opts = IntegOptions::with_tol(tol).method(Method::Explicit);
        let seg = integrate(&f, [1.0, 0.0], 0.0, 20.0, &[], &opts).unwrap();
        let z = seg.final_state();
        let err = (z[0] - 20f64.cos()).hypot(z[1] + 20f64.sin());
        steps.push(seg.n_steps as f64);
        errs.push(err);
    }
    let fit = log_log_fit(&steps, &errs);
    assert!((fit.slope + 5.0).abs() <= 0.5, "slope {}", fit.slope);
}

#[test]
fn implicit_order_of_accuracy() {
    let f = oscillator();
    let mut steps = vec![];
    let mut errs = vec![];
    for &tol in &[1e-6, 1e-7, 1e-8, 1e-9, 1e-10] {
        let opts = IntegOptions::with_tol(tol).method(Method::Implicit);
        let seg = integrate(&f, [1.0, 0.0], 0.0, 20.0, &[], &opts).unwrap();
        let z = seg.final_state();
        let err = (z[0] - 20f64.cos()).hypot(z[1] + 20f64.sin());
        steps.push(seg.n_steps as f64);
        errs.push(err);
    }
    let fit = log_log_fit(&steps, &errs);
    assert!((fit.slope + 4.0).abs() <= 0.5, "slope {}", fit.slope);
}

struct StiffCos;

impl OdeSystem<2> for StiffCos {
    fn rhs(&self, y: &[f64; 2]) -> [f64; 2] {
        [1.0, -1e6 * (y[1] - y[0].cos())]
    }

    fn jac(&self, y: &[f64; 2]) -> [[f64; 2]; 2] {
        [[0.0, 0.0], [-1e6 * y[0].sin(), -1e6]]
    }
}

#[test]
fn stiff_linear_benchmark() {
    let opts = IntegOptions::with_tol(1e-8).method(Method::Implicit);
    let seg = solve(&StiffCos, [0.0, 0.0], 2.0, &[], &opts).unwrap();
    assert!(seg.n_steps <= 10_000, "{} steps", seg.n_steps);
    let t: f64 = 2.0;
    let l: f64 = 1e6;
    let exact = (l * l * t.cos() + l * t.sin()) / (l * l + 1.0);
    let y = seg.final_state()[1];
    assert!((y - exact).abs() < 1e-6, "{y} vs {exact}");
}

#[test]
fn implicit_matches_explicit_nonstiff() {
    let m = normal_form_flat();
    let z = assemble_regularized(&m, RegFn::smooth_sqrt(), 0.05).unwrap();
    let opts = IntegOptions::with_tol(1e-11);
    let a = integrate(
        &z,
        [-0.3, 0.2],
        0.0,
        1.0,
        &[],
        &opts.method(Method::Explicit),
    )
    .unwrap();
    let b = integrate_implicit(&z, [-0.3, 0.2], 0.0, 1.0, &[], &opts).unwrap();
    let (za, zb) = (a.final_state(), b.final_state());
    assert!((za[0] - zb[0]).abs() < 1e-8 && (za[1] - zb[1]).abs() < 1e-8);
}

#[test]
fn friction_layer_auto_vs_implicit() {
    let m = make_friction(FrictionParams::default()).unwrap();
    let z = assemble_regularized(&m, RegFn::smooth_sqrt(), 1e-3).unwrap();
    // starts above the belt velocity line and is carried into the sliding layer
    let z0 = [-0.5, 0.3];
    let opts = IntegOptions::with_tol(1e-8);
    let a = integrate(&z, z0, 0.3, 6.0, &[], &opts).unwrap();
    let b = integrate_implicit(&z, z0, 0.3, 6.0, &[], &IntegOptions::with_tol(1e-10)).unwrap();
    assert!(
        a.states.iter().any(|s| s[1].abs() < 0.01),
        "orbit reaches the layer"
    );
    let (za, zb) = (a.final_state(), b.final_state());
    assert!(
        (za[0] - zb[0]).abs() < 1e-6 && (za[1] - zb[1]).abs() < 1e-6,
        "{za:?} {zb:?}"
    );
}

#[test]
fn layer_at_tiny_eps() {
    let m = make_friction(FrictionParams::default()).unwrap();
    let z = assemble_regularized(&m, RegFn::smooth_sqrt(), 1e-6).unwrap();
    let opts = IntegOptions::with_tol(1e-8);
    let seg = integrate(&z, [-0.5, 0.3], 0.3, 6.0, &[], &opts).unwrap();
    assert!(seg.n_implicit > 0);
    let seg = integrate_implicit(&z, [-0.5, 0.3], 0.3, 6.0, &[], &opts).unwrap();
    assert!(seg.final_state().iter().all(|v| v.is_finite()));
}

fn expm_upper(a: f64, b: f64, d: f64, t: f64) -> [[f64; 2]; 2] {
    [
        [(a * t).exp(), b * ((a * t).exp() - (d * t).exp()) / (a - d)],
        [0.0, (d * t).exp()],
    ]
}

#[test]
fn tangent_of_linear_field() {
    let f = FnField::linear([[-1.0, 2.0], [0.0, -3.0]]);
    let v0 = [0.3, -0.7];
    let t = 1.7;
    let seg = integrate_variational(
        &f,
        [1.0, 1.0],
        v0,
        0.0,
        t,
        &[],
        &IntegOptions::with_tol(1e-11),
    )
    .unwrap();
    let e = expm_upper(-1.0, 2.0, -3.0, t);
    let v = seg.final_tangent();
    for i in 0..2 {
        let want = e[i][0] * v0[0] + e[i][1] * v0[1];
        assert!((v[i] - want).abs() < 1e-9, "{v:?}");
    }
    let r = integrate_variational(
        &oscillator(),
        [0.0, 0.0],
        [1.0, 0.0],
        0.0,
        t,
        &[],
        &IntegOptions::with_tol(1e-11),
    )
    .unwrap();
    let v = r.final_tangent();
    assert!((v[0] - t.cos()).abs() < 1e-9 && (v[1] + t.sin()).abs() < 1e-9);
}

#[test]
fn zero_tangent_stays_zero() {
    let m = make_friction(FrictionParams::default()).unwrap();
    let seg = integrate_variational(
        &*m.z_plus,
        [-0.85, 0.3],
        [0.0, 0.0],
        0.3,
        5.0,
        &[],
        &IntegOptions::default(),
    )
    .unwrap();
    assert!(seg.tangents().iter().all(|v| v[0] == 0.0 && v[1] == 0.0));
}

#[test]
fn tangent_matches_finite_differences() {
    let m = make_friction(FrictionParams::default()).unwrap();
    let z = assemble_regularized(&m, RegFn::smooth_sqrt(), 1e-2).unwrap();
    let opts = IntegOptions::with_tol(1e-12);
    let z0 = [-0.5, 0.3];
    let t = 2.0;
    for v0 in [[1.0, 0.0], [0.0, 1.0], [0.6, -0.8]] {
        let seg = integrate_variational(&z, z0, v0, 0.3, t, &[], &opts).unwrap();
        let v = seg.final_tangent();
        let h = 1e-6;
        let p = integrate(
            &z,
            [z0[0] + h * v0[0], z0[1] + h * v0[1]],
            0.3,
            t,
            &[],
            &opts,
        )
        .unwrap();
        let q = integrate(
            &z,
            [z0[0] - h * v0[0], z0[1] - h * v0[1]],
            0.3,
            t,
            &[],
            &opts,
        )
        .unwrap();
        let (p, q) = (p.final_state(), q.final_state());
        let fd = [(p[0] - q[0]) / (2.0 * h), (p[1] - q[1]) / (2.0 * h)];
        let scale = fd[0].hypot(fd[1]);
        let d = (v[0] - fd[0]).hypot(v[1] - fd[1]);
        assert!(d <= 1e-6 * scale.max(1.0), "{v:?} vs {fd:?}");
    }
}

#[test]
fn compact_storage() {
    let f = oscillator();
    let seg = integrate(
        &f,
        [1.0, 0.0],
        0.0,
        10.0,
        &[],
        &IntegOptions::default().store(false),
    )
    .unwrap();
    assert_eq!(seg.times.len(), 2);
    assert!(seg.interpolate(1.0).is_none());
    let full = integrate(&f, [1.0, 0.0], 0.0, 10.0, &[], &IntegOptions::default()).unwrap();
    assert_eq!(seg.final_state(), full.final_state());
}

#[test]
fn dense_output_accuracy() {
    let f = oscillator();
    let seg = integrate(
        &f,
        [1.0, 0.0],
        0.0,
        10.0,
        &[],
        &IntegOptions::with_tol(1e-10),
    )
    .unwrap();
    for i in 0..100 {
        let t = 0.1 * i as f64;
        let z = seg.interpolate(t).unwrap();
        assert!((z[0] - t.cos()).abs() < 1e-6, "t={t}");
    }
}

#[test]
fn rejects_bad_options() {
    let f = oscillator();
    assert!(integrate(&f, [1.0, 0.0], 0.0, 1.0, &[], &IntegOptions::with_tol(1e-3)).is_err());
    assert!(integrate(&f, [1.0, 0.0], 0.0, -1.0, &[], &IntegOptions::default()).is_err());
    assert!(integrate(&f, [f64::NAN, 0.0], 0.0, 1.0, &[], &IntegOptions::default()).is_err());
}

#[test]
fn max_steps_reported() {
    let f = oscillator();
    let opts = IntegOptions {
        max_steps: 5,
        ..IntegOptions::default()
    };
    assert!(matches!(
        integrate(&f, [1.0, 0.0], 0.0, 100.0, &[], &opts),
        Err(Error::MaxSteps(5))
    ));
}
