//! The subcommands. Each one fills a [`Report`]; numeric errors of required
//! steps abort with [`Failure::Numeric`].

use foldlab::blowup::{
    cartesian_to_cyl, chart_change, conservation_product, cyl_to_cartesian, q_region_report,
    sphere_to_cartesian, sphere_to_chart1, sphere_to_chart2, ChartId, ChartPoint,
};
use foldlab::chini::{
    chini_derivatives, chini_property_scan, default_grid, t1_boundary_asymptotic, ChiniConfig,
};
use foldlab::continuation::{
    cycle_map_options, cycle_newton, equilibrium_hopf, find_grazing, iterate_map, scaling_sweep,
    solve_fold, trace_branch, CycleProblem, SectionFamily, NONDEGENERACY_FLOOR,
};
use foldlab::integrate::{integrate, IntegOptions};
use foldlab::maps::{field_for, q_map, MapOptions};
use foldlab::models::{friction_props, FrictionParams, PwsModel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{ExperimentConfig, ModelConfig};
use crate::output::{Report, Table};
use crate::{row, Failure};

type Res<T> = std::result::Result<T, Failure>;

fn num<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure::Numeric(e.into())
}

fn map_options(cfg: &ExperimentConfig) -> MapOptions {
    let mut m = MapOptions::default();
    m.integ.tol = cfg.tolerances.integ;
    m
}

fn model(cfg: &ExperimentConfig) -> Res<PwsModel> {
    cfg.model.build().map_err(|e| Failure::Config(e.into()))
}

fn friction(cfg: &ExperimentConfig, command: &str) -> Res<(PwsModel, FrictionParams)> {
    match cfg.model.friction_params() {
        Some(p) => Ok((model(cfg)?, p)),
        None => Err(Failure::Config(anyhow::anyhow!(
            "{command} needs the friction model"
        ))),
    }
}

fn first_eps(cfg: &ExperimentConfig, explicit: Option<f64>, command: &str) -> Res<f64> {
    explicit
        .or_else(|| cfg.eps_list.first().copied())
        .ok_or_else(|| {
            Failure::Config(anyhow::anyhow!(
                "{command} needs eps or a non-empty eps_list"
            ))
        })
}

fn need_eps_list(cfg: &ExperimentConfig, command: &str, positive: bool) -> Res<()> {
    if cfg.eps_list.is_empty() {
        return Err(Failure::Config(anyhow::anyhow!(
            "{command} needs a non-empty eps_list"
        )));
    }
    if positive && cfg.eps_list.iter().any(|&e| e <= 0.0) {
        return Err(Failure::Config(anyhow::anyhow!("{command} needs eps > 0")));
    }
    Ok(())
}

fn cycle_problem(cfg: &ExperimentConfig, model: PwsModel, eps: f64) -> CycleProblem {
    let mut prob = CycleProblem::new(model, cfg.regfn(), eps, SectionFamily::AlphaLevel);
    prob.map = cycle_map_options();
    prob.map.integ.tol = cfg.tolerances.integ;
    prob.newton.tol = cfg.tolerances.newton;
    prob
}

fn friction_eq(p: FrictionParams) -> impl Fn(f64) -> [f64; 2] {
    move |a| [-p.mu(a), a]
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect()
}

pub fn simulate(cfg: &ExperimentConfig) -> Res<Report> {
    let mut rep = Report::new("simulate");
    let sim = cfg.simulate;
    let m = model(cfg)?;
    let eps = sim
        .eps
        .or_else(|| cfg.eps_list.first().copied())
        .unwrap_or(0.0);
    let field = field_for(&m, cfg.regfn(), eps).map_err(num)?;
    let opts = IntegOptions::with_tol(cfg.tolerances.integ);
    let seg = integrate(&*field, sim.z0, cfg.alpha, sim.t_max, &[], &opts).map_err(num)?;
    rep.lap("integrate");
    let t_end = seg.final_time();
    let mut table = Table::new("trajectory", &["t", "x", "y"]);
    let mut samples = Vec::with_capacity(sim.n_samples);
    for t in linspace(0.0, sim.t_max, sim.n_samples) {
        let z = seg
            .interpolate(t.min(t_end))
            .ok_or_else(|| num(anyhow::anyhow!("no dense output at t = {t}")))?;
        table.push(row![t, z[0], z[1]]);
        samples.push((t, z));
    }
    rep.tables.push(table);
    let finite = samples
        .iter()
        .all(|(_, z)| z[0].is_finite() && z[1].is_finite());
    rep.check("finite", finite, "all samples finite");
    rep.check(
        "reached_t_max",
        (t_end - sim.t_max).abs() <= 1e-9 * sim.t_max,
        format!("final time {t_end}"),
    );
    if cfg.model == ModelConfig::NormalForm && eps == 0.0 {
        let c = sim.z0[1] - sim.z0[0] * sim.z0[0];
        let dev = samples
            .iter()
            .map(|(_, z)| (z[1] - z[0] * z[0] - c).abs() / z[1].abs().max(1.0))
            .fold(0.0, f64::max);
        rep.check(
            "parabola",
            dev <= 1e-8,
            format!("max |y - x^2 - c| / max(1, |y|) = {dev:e}"),
        );
        rep.result("parabola_deviation", dev);
    }
    let tail: Vec<f64> = samples
        .iter()
        .filter(|(t, _)| *t >= 0.9 * sim.t_max)
        .map(|(_, z)| z[1])
        .collect();
    let tail_min = tail.iter().copied().fold(f64::INFINITY, f64::min);
    rep.result("eps", eps);
    rep.result("alpha", cfg.alpha);
    rep.result("final_state", seg.final_state());
    rep.result("tail_y_min", tail_min);
    rep.result("steps", seg.n_steps);
    rep.result("implicit_steps", seg.n_implicit);
    rep.lap("sample");
    Ok(rep)
}

pub fn qmap(cfg: &ExperimentConfig) -> Res<Report> {
    need_eps_list(cfg, "qmap", false)?;
    let mut rep = Report::new("qmap");
    let m = model(cfg)?;
    let s = cfg.sections();
    let opts = map_options(cfg);
    let xs = linspace(s.i_l[0], s.i_l[1], cfg.qmap.n);
    let jobs: Vec<(f64, f64)> = cfg
        .eps_list
        .iter()
        .flat_map(|&e| xs.iter().map(move |&x| (e, x)))
        .collect();
    let results: Vec<_> = jobs
        .par_iter()
        .map(|&(e, x)| {
            q_map(
                &m,
                cfg.regfn(),
                e,
                &s,
                x,
                cfg.alpha,
                cfg.qmap.want_d2,
                &opts,
            )
        })
        .collect();
    rep.lap("evaluate");
    let mut table = Table::new("qmap", &["eps", "x", "x_out", "d1", "d2", "flight_time"]);
    let mut max_d1 = f64::NEG_INFINITY;
    for (&(e, x), r) in jobs.iter().zip(results) {
        match r {
            Ok(r) => {
                max_d1 = max_d1.max(r.d1);
                table.push(row![e, x, r.x_out, r.d1, r.d2, r.flight_time]);
            }
            Err(err) => rep.failures.push(format!("eps = {e}, x = {x}: {err}")),
        }
    }
    rep.check(
        "orientation_reversing",
        max_d1 <= 1e-9,
        format!("max Q' = {max_d1:e}"),
    );
    rep.result("evaluations", table.len());
    rep.tables.push(table);
    Ok(rep)
}

/// Tolerance of `| |Q'| - 1 |` in region (iii) at the smallest `eps`.
pub const RIGHT_REGION_TOL: f64 = 0.05;

pub fn regions(cfg: &ExperimentConfig) -> Res<Report> {
    need_eps_list(cfg, "regions", true)?;
    let mut rep = Report::new("regions");
    let m = model(cfg)?;
    let s = cfg.sections();
    let report = q_region_report(
        &m,
        cfg.regfn(),
        &cfg.eps_list,
        &s,
        &cfg.regions,
        cfg.alpha,
        &map_options(cfg),
    )
    .map_err(num)?;
    rep.lap("sample");
    let mut samples = Table::new(
        "regions_samples",
        &["eps", "region", "x", "x_out", "d1", "d2"],
    );
    let mut stats = Table::new(
        "regions_stats",
        &[
            "eps",
            "gamma_l",
            "window",
            "left_max_abs_d1",
            "center_signs_ok",
            "center_max_d1",
            "center_max_d2",
            "center_crossings",
            "crossing_x",
            "right_max_dev",
        ],
    );
    for st in &report.per_eps {
        for p in &st.samples {
            samples.push(row![st.eps, p.region, p.x, p.x_out, p.d1, p.d2]);
        }
        stats.push(row![
            st.eps,
            st.gamma_l,
            st.window,
            st.left_max_abs_d1,
            st.center_signs_ok,
            st.center_max_d1,
            st.center_max_d2,
            st.center_crossings,
            st.crossing_x,
            st.right_max_dev
        ]);
        for f in &st.failures {
            rep.failures.push(format!("eps = {}: {f}", st.eps));
        }
        rep.check(
            format!("center_eps_{:e}", st.eps),
            st.center_signs_ok && st.center_crossings == 1,
            format!(
                "max Q' = {:e}, max Q'' = {:e}, crossings of {} = {}",
                st.center_max_d1, st.center_max_d2, cfg.regions.upsilon, st.center_crossings
            ),
        );
    }
    if let Some(fit) = report.contraction_fit {
        rep.check(
            "left_contraction",
            fit.slope < 0.0,
            format!("slope of ln max|Q'| vs 1/eps = {:e}", fit.slope),
        );
    }
    if let Some(st) = report.per_eps.iter().min_by(|a, b| a.eps.total_cmp(&b.eps)) {
        rep.check(
            "right_unit_slope",
            st.right_max_dev <= RIGHT_REGION_TOL,
            format!(
                "max ||Q'| - 1| = {:e} at eps = {:e}",
                st.right_max_dev, st.eps
            ),
        );
    }
    rep.result("contraction_fit", report.contraction_fit);
    rep.result("left_monotone", report.left_monotone);
    rep.tables.push(stats);
    rep.tables.push(samples);
    Ok(rep)
}

pub fn chini(cfg: &ExperimentConfig) -> Res<Report> {
    let mut rep = Report::new("chini");
    let ch = &cfg.chini;
    let tol = cfg.tolerances.chini;
    let pairs: Vec<(u32, f64)> = ch
        .k_list
        .iter()
        .flat_map(|&k| ch.c_list.iter().map(move |&c| (k, c)))
        .collect();
    let scans: Vec<_> = pairs
        .par_iter()
        .map(|&(k, c)| chini_property_scan(k, c, &default_grid(k, c, ch.n, ch.d_max), tol))
        .collect();
    rep.lap("scan");
    let mut table = Table::new(
        "chini",
        &[
            "k", "c", "u0", "t", "u", "u1", "u2", "v1", "v2", "w", "pass",
        ],
    );
    for (&(k, c), scan) in pairs.iter().zip(scans) {
        let scan = scan.map_err(num)?;
        for r in &scan.rows {
            table.push(row![
                k, c, r.u0, r.t, r.u, r.u1, r.u2, r.v1, r.v2, r.w, r.pass
            ]);
        }
        for f in &scan.failures {
            rep.failures.push(format!("k = {k}, c = {c}: {f}"));
        }
        rep.check(
            format!("scan_k{k}_c{c}"),
            scan.all_pass && scan.rows.len() == ch.n,
            format!(
                "U' margin {:e}, max U'' {:e}, min w {:e}, {} rows",
                scan.u1_margin,
                scan.u2_max,
                scan.w_min,
                scan.rows.len()
            ),
        );
        rep.check(
            format!("monotone_k{k}_c{c}"),
            scan.monotone,
            "U strictly decreasing in u0",
        );
    }
    rep.tables.push(table);
    let mut asym = Table::new(
        "chini_asymptotic",
        &["k", "c", "h", "t1", "predicted", "rel_err"],
    );
    let mut worst: f64 = 0.0;
    for &(k, c) in &pairs {
        for &h in &ch.asymptotic_h {
            let u0 = ChiniConfig::boundary(k, c) - h;
            let d = chini_derivatives(&ChiniConfig { k, c, u0 }, tol).map_err(num)?;
            let pred = t1_boundary_asymptotic(k, c, u0);
            let rel = ((d.t1 - pred) / pred).abs();
            worst = worst.max(rel);
            asym.push(row![k, c, h, d.t1, pred, rel]);
        }
    }
    rep.check(
        "boundary_asymptotic",
        worst <= ch.asymptotic_rel_tol,
        format!("max relative error of T' {worst:e}"),
    );
    rep.tables.push(asym);
    rep.lap("asymptotic");
    Ok(rep)
}

fn rel_err(a: f64, b: f64) -> f64 {
    let s = a.abs().max(b.abs());
    if s == 0.0 {
        0.0
    } else {
        (a - b).abs() / s
    }
}

fn coords_err(p: &ChartPoint, q: &ChartPoint) -> f64 {
    p.coords()
        .iter()
        .zip(q.coords())
        .map(|(a, b)| rel_err(*a, b))
        .fold(0.0, f64::max)
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..hi.ln())).exp()
}

fn cylinder_case(y: f64, eps: f64) -> foldlab::Result<f64> {
    let charts = if y > 0.0 {
        [ChartId::CylY1, ChartId::CylEps2]
    } else {
        [ChartId::CylYm3, ChartId::CylEps2]
    };
    let mut err: f64 = 0.0;
    for c in charts {
        let p = cartesian_to_cyl(y, eps, c)?;
        let (yb, eb) = cyl_to_cartesian(&p)?;
        err = err.max(rel_err(yb, y)).max(rel_err(eb, eps));
    }
    let p = cartesian_to_cyl(y, eps, charts[0])?;
    let q = chart_change(&chart_change(&p, charts[1])?, charts[0])?;
    Ok(err.max(coords_err(&p, &q)))
}

fn sphere_case(x: f64, y: f64, eps: f64, k: u32) -> foldlab::Result<f64> {
    let mut err: f64 = 0.0;
    let p1 = sphere_to_chart1(x, y, eps, k)?;
    let p2 = sphere_to_chart2(x, y, eps, k)?;
    for p in [p1, p2] {
        let (xb, yb, eb) = sphere_to_cartesian(&p)?;
        err = err
            .max(rel_err(xb, x))
            .max(rel_err(yb, y))
            .max(rel_err(eb, eps));
    }
    let q = chart_change(&chart_change(&p1, ChartId::SphEps2)?, ChartId::SphR1)?;
    err = err.max(coords_err(&p1, &q));
    err = err.max(rel_err(conservation_product(&p2)?, eps));
    Ok(err)
}

pub fn charts(cfg: &ExperimentConfig) -> Res<Report> {
    let mut rep = Report::new("charts");
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut table = Table::new("charts", &["family", "k", "x", "y", "eps", "max_rel_err"]);
    let mut worst: f64 = 0.0;
    for _ in 0..cfg.charts.n {
        let mut y: f64 = rng.gen_range(-1.0..1.0);
        if y.abs() < 1e-9 {
            y = 0.5;
        }
        let eps = log_uniform(&mut rng, 1e-8, 1.0);
        let e = cylinder_case(y, eps).map_err(num)?;
        worst = worst.max(e);
        table.push(row!["cylinder", 0u32, None::<f64>, y, eps, e]);
    }
    for _ in 0..cfg.charts.n {
        let x = rng.gen_range(-1.0..1.0);
        let y = log_uniform(&mut rng, 1e-6, 1.0);
        let eps = log_uniform(&mut rng, 1e-8, 1e-1);
        let k: u32 = rng.gen_range(1..=3);
        let e = sphere_case(x, y, eps, k).map_err(num)?;
        worst = worst.max(e);
        table.push(row!["sphere", k, Some(x), y, eps, e]);
    }
    rep.check(
        "round_trips",
        worst <= cfg.charts.tol,
        format!("max relative error {worst:e}"),
    );
    rep.result("max_rel_err", worst);
    rep.tables.push(table);
    rep.lap("charts");
    Ok(rep)
}

pub fn branch(cfg: &ExperimentConfig) -> Res<Report> {
    let mut rep = Report::new("branch");
    let (m, p) = friction(cfg, "branch")?;
    let eps = first_eps(cfg, cfg.branch.eps, "branch")?;
    let prob = cycle_problem(cfg, m.clone(), eps);
    let fs = &cfg.fold_search;
    let xs = iterate_map(&prob, fs.x_seed, fs.alpha_seed, fs.seed_iterations).map_err(num)?;
    let seed = cycle_newton(&prob, xs, fs.alpha_seed).map_err(num)?;
    let mut opts = fs.branch;
    opts.stop_at_fold = cfg.branch.stop_at_fold;
    if let (Some(sc), Some(q)) = (fs.step_scale, prob.regfn.scaling_exponent()) {
        if eps > 0.0 {
            opts.step_max = opts.step_max.min(sc * eps.powf(q)).max(opts.step_min);
            opts.step_init = opts.step_init.min(opts.step_max);
        }
    }
    let br = trace_branch(&prob, fs.alpha_seed, fs.alpha_max, &seed, &opts).map_err(num)?;
    rep.lap("continuation");
    let mut table = Table::new(
        "branch",
        &[
            "alpha",
            "x_fix",
            "multiplier",
            "y_min",
            "flight_time",
            "residual",
            "fold",
        ],
    );
    let mut worst_res: f64 = 0.0;
    for b in &br.points {
        worst_res = worst_res.max(b.residual);
        table.push(row![
            b.alpha,
            b.x_fix,
            b.multiplier,
            b.y_min,
            b.flight_time,
            b.residual,
            b.fold
        ]);
    }
    rep.tables.push(table);
    rep.check(
        "residuals",
        worst_res <= 10.0 * cfg.tolerances.newton,
        format!("max |P(x) - x| = {worst_res:e}"),
    );
    rep.result("points", br.points.len());
    rep.result("truncated", br.truncated);
    rep.result("message", &br.message);
    match br.folds.first() {
        Some(&i) => match solve_fold(&prob, &br.points[i]) {
            Ok(f) => {
                rep.check(
                    "fold_nondegenerate",
                    f.p_xx.abs() > NONDEGENERACY_FLOOR && f.p_alpha.abs() > NONDEGENERACY_FLOOR,
                    format!("P_xx = {:e}, P_alpha = {:e}", f.p_xx, f.p_alpha),
                );
                rep.result("alpha_sn", f.alpha_sn);
                rep.result("x_sn", f.x_sn);
                rep.result("p_xx", f.p_xx);
                rep.result("p_alpha", f.p_alpha);
            }
            Err(e) => rep.failures.push(format!("fold refinement: {e}")),
        },
        None => rep.check(
            "fold_found",
            false,
            br.message
                .clone()
                .unwrap_or_else(|| "no fold on the branch".into()),
        ),
    }
    rep.lap("fold");
    let y0 = friction_props(&p).map_err(num)?.y0;
    match equilibrium_hopf(&m, cfg.regfn(), eps, cfg.alpha_window, friction_eq(p)) {
        Ok(h) => {
            rep.check(
                "hopf_shift",
                (h.alpha_h - y0).abs() <= 10.0 * eps,
                format!(
                    "alpha_H - y0 = {:e}, 10 eps = {:e}",
                    h.alpha_h - y0,
                    10.0 * eps
                ),
            );
            rep.result("alpha_h", h.alpha_h);
        }
        Err(e) => rep.failures.push(format!("Hopf point: {e}")),
    }
    rep.result("y0", y0);
    rep.result("eps", eps);
    rep.lap("hopf");
    Ok(rep)
}

/// Default accepted slope interval for decay rate `k`.
pub fn default_slope_window(k: Option<u32>) -> Option<[f64; 2]> {
    match k? {
        1 => Some([0.61, 0.72]),
        k => {
            let p = 2.0 * k as f64 / (2.0 * k as f64 + 1.0);
            Some([p - 0.05, p + 0.05])
        }
    }
}

/// Shared body of `fold-sweep` (`detailed`) and `scaling`.
fn sweep(cfg: &ExperimentConfig, command: &str, detailed: bool) -> Res<Report> {
    need_eps_list(cfg, command, true)?;
    let mut rep = Report::new(command);
    let (m, p) = friction(cfg, command)?;
    let zero = cycle_problem(cfg, m.clone(), 0.0);
    let eq = friction_eq(p)(cfg.grazing.alpha_seed);
    let (gp, _) = find_grazing(&zero, &cfg.grazing, eq).map_err(num)?;
    rep.lap("grazing");
    rep.check(
        "grazing_touches",
        gp.y_min.abs() <= 1e-6,
        format!("y_min(Gamma_alpha*) = {:e}", gp.y_min),
    );
    rep.result("alpha_star", gp.alpha_star);
    rep.result("grazing_y_min", gp.y_min);
    rep.result("grazing_y_prime", gp.y_prime);
    let base = cycle_problem(cfg, m, 0.0);
    let fit = scaling_sweep(
        &base,
        &cfg.eps_list,
        gp.alpha_star,
        Some(&gp.gamma_0),
        &cfg.fold_search,
    );
    rep.lap("sweep");
    for (e, msg) in &fit.failures {
        rep.failures.push(format!("eps = {e}: {msg}"));
    }
    let mut scaling = Table::new("scaling", &["eps", "alpha_sn", "gap", "ln_eps", "ln_gap"]);
    for pt in &fit.points {
        scaling.push(row![pt.eps, pt.alpha_sn, pt.gap, pt.eps.ln(), pt.gap.ln()]);
    }
    rep.tables.push(scaling);
    let window = cfg
        .scaling
        .slope_window
        .or_else(|| default_slope_window(cfg.regfn().k()));
    if let Some([lo, hi]) = window {
        rep.check(
            "slope",
            fit.slope >= lo && fit.slope <= hi,
            format!("slope {} in [{lo}, {hi}]", fit.slope),
        );
    }
    rep.check(
        "r_squared",
        fit.r_squared >= cfg.scaling.r_squared_min,
        format!("R^2 = {} >= {}", fit.r_squared, cfg.scaling.r_squared_min),
    );
    rep.result("slope", fit.slope);
    rep.result("intercept", fit.intercept);
    rep.result("r_squared", fit.r_squared);
    rep.result("slope_window", window);
    rep.result("points", &fit.points);
    if detailed {
        let mut folds = Table::new(
            "folds",
            &[
                "eps",
                "alpha_sn",
                "x_sn",
                "multiplier",
                "p_xx",
                "p_alpha",
                "residual",
                "y_min",
                "hausdorff",
            ],
        );
        let mut orbits = Table::new("fold_orbits", &["eps", "index", "x", "y"]);
        let n_orbit = cfg.scaling.orbit_points.max(3);
        for (f, pt) in fit.folds.iter().zip(&fit.points) {
            folds.push(row![
                f.eps,
                f.alpha_sn,
                f.x_sn,
                f.multiplier,
                f.p_xx,
                f.p_alpha,
                f.residual,
                f.y_min,
                pt.hausdorff
            ]);
            let stride = (f.orbit.len() / n_orbit).max(1);
            for (i, z) in f.orbit.iter().enumerate().step_by(stride) {
                orbits.push(row![f.eps, i, z[0], z[1]]);
            }
            rep.check(
                format!("nondegenerate_eps_{:e}", f.eps),
                f.p_xx.abs() > NONDEGENERACY_FLOOR && f.p_alpha.abs() > NONDEGENERACY_FLOOR,
                format!("P_xx = {:e}, P_alpha = {:e}", f.p_xx, f.p_alpha),
            );
        }
        let mut grazing = Table::new("grazing_orbit", &["index", "x", "y"]);
        for (i, z) in gp.gamma_0.iter().enumerate() {
            grazing.push(row![i, z[0], z[1]]);
        }
        let mut by_eps: Vec<_> = fit
            .points
            .iter()
            .filter_map(|p| Some((p.eps, p.hausdorff?)))
            .collect();
        by_eps.sort_by(|a, b| b.0.total_cmp(&a.0));
        let decreasing =
            by_eps.len() == fit.points.len() && by_eps.windows(2).all(|w| w[1].1 < w[0].1);
        rep.check(
            "hausdorff_decreasing",
            decreasing,
            format!(
                "Hausdorff distances (decreasing eps): {:?}",
                by_eps.iter().map(|p| p.1).collect::<Vec<_>>()
            ),
        );
        rep.tables.push(folds);
        rep.tables.push(orbits);
        rep.tables.push(grazing);
    }
    Ok(rep)
}

pub fn fold_sweep(cfg: &ExperimentConfig) -> Res<Report> {
    sweep(cfg, "fold-sweep", true)
}

pub fn scaling(cfg: &ExperimentConfig) -> Res<Report> {
    sweep(cfg, "scaling", false)
}
