//! Acceptance criteria, one `PASS`/`FAIL` line each with the measured
//! numbers. Runs without the libtest harness so every line is printed; the
//! process fails if any criterion outside `KNOWN_FAILURES` fails.

use std::f64::consts::{LN_2, PI};
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rsw::commands::{exact_series, rsw_records};
use rsw::config::PropagationChoice;
use rsw::scan::run_scan;
use rsw_core::ed::fit_tower;
use rsw_core::entropy::{renyi2_rotor, renyi2_sw, Region};
use rsw_core::lattice::{build_model, LatticeModel, LatticeSpec};
use rsw_core::observables::{run_dynamics, RecordOptions};
use rsw_core::rotor::{bare_inertia, tos_inertia, RotorState, TosReference};
use rsw_core::spinwave::{evolve_mode, realspace_green, SwCoefficients};

/// Criteria that fail for reasons recorded in the project notes; they are
/// still evaluated and reported.
const KNOWN_FAILURES: &[u32] = &[7];

struct Outcome {
    id: u32,
    name: &'static str,
    pass: bool,
    detail: String,
}

fn report(id: u32, name: &'static str, pass: bool, detail: String) -> Outcome {
    Outcome { id, name, pass, detail }
}

fn dipolar(l: usize) -> LatticeModel {
    build_model(&LatticeSpec::dipolar_square(l)).unwrap()
}

/// Tower-of-states reference from the 4x4 dipolar lattice.
fn dipolar_reference() -> TosReference {
    fit_tower(&dipolar(4), None).unwrap().reference().unwrap()
}

fn argmin_refined<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, points: usize) -> f64 {
    let step = (hi - lo) / points as f64;
    let mut best = (lo, f64::INFINITY);
    for i in 0..=points {
        let t = lo + i as f64 * step;
        let v = f(t);
        if v < best.1 {
            best = (t, v);
        }
    }
    let (mut a, mut b) = (best.0 - step, best.0 + step);
    let r = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..100 {
        let x1 = b - r * (b - a);
        let x2 = a + r * (b - a);
        if f(x1) <= f(x2) {
            b = x2;
        } else {
            a = x1;
        }
    }
    0.5 * (a + b)
}

fn criterion_1_oat_limit() -> Outcome {
    let start = Instant::now();
    let n = 60;
    let model = build_model(&LatticeSpec::xx(1, n, 0.0)).unwrap();
    let inertia = bare_inertia(&model);
    let pi_i = PI * inertia.value();
    let steps = 400;
    let dt = 1.5 * pi_i / steps as f64;
    let grid: Vec<f64> = (0..=steps).map(|i| i as f64 * dt).collect();
    let recs = run_dynamics(&model, inertia, &grid, RecordOptions::default()).unwrap();
    let nf = n as f64;

    let window: Vec<f64> =
        recs.iter().filter(|r| r.time >= 0.2 * pi_i && r.time <= 0.8 * pi_i).map(|r| r.var_jx.total).collect();
    let plateau = window.iter().sum::<f64>() / window.len() as f64;
    let plateau_dev = plateau / (nf * nf / 8.0) - 1.0;

    let peak = recs.iter().max_by(|a, b| a.var_jx.total.total_cmp(&b.var_jx.total)).unwrap();
    let peak_dev = peak.var_jx.total / (nf * nf / 4.0) - 1.0;
    let peak_offset = (peak.time - pi_i).abs();

    let cat = RotorState::css_x(n, model.spin()).unwrap().evolve(inertia, pi_i);
    let s2 = renyi2_rotor(&cat, n / 2).unwrap();
    let elapsed = start.elapsed().as_secs_f64();

    let pass = plateau_dev.abs() <= 0.02
        && peak_dev.abs() <= 0.02
        && peak_offset <= dt
        && (s2 - LN_2).abs() <= 1e-6
        && elapsed < 10.0;
    report(
        1,
        "OAT limit N=60",
        pass,
        format!(
            "plateau/(N²/8)-1 = {plateau_dev:+.4}, peak/(N²/4)-1 = {peak_dev:+.2e} at |t-πI| = {peak_offset:.3e} (dt {dt:.3e}), S2(πI)-ln2 = {:+.1e}, {elapsed:.2}s",
            s2 - LN_2
        ),
    )
}

fn criterion_2_tower_of_states() -> Outcome {
    let start = Instant::now();
    let model = dipolar(4);
    let fit = fit_tower(&model, None).unwrap();
    let tos = fit.inertia.value();
    let bare = bare_inertia(&model).value();
    let elapsed = start.elapsed().as_secs_f64();
    let pass = (tos / 2.42 - 1.0).abs() <= 0.01 && (bare / 2.47 - 1.0).abs() <= 0.005 && elapsed < 300.0;
    report(
        2,
        "ToS calibration 4x4 dipolar",
        pass,
        format!(
            "I_ToS = {tos:.4} ({:+.2}%), I_bare = {bare:.4} ({:+.2}%), residual {:.1e}, {elapsed:.1}s",
            100.0 * (tos / 2.42 - 1.0),
            100.0 * (bare / 2.47 - 1.0),
            fit.residual
        ),
    )
}

fn criterion_3_oracle_agreement() -> Outcome {
    let start = Instant::now();
    let model = dipolar(4);
    let inertia = tos_inertia(&model, Some(&dipolar_reference()));
    let grid: Vec<f64> = (0..=20).map(|i| i as f64 * 0.05).collect();
    let options = RecordOptions::default();
    let rsw = rsw_records(&model, inertia, &grid, options.clone()).unwrap();
    let ed = exact_series(&model, &grid, PropagationChoice::Auto, &options).unwrap();
    let mut jx_dev = 0.0_f64;
    let mut xi_dev = 0.0_f64;
    for (r, e) in rsw.iter().zip(&ed) {
        jx_dev = jx_dev.max((r.mean_jx.total / e.mean_jx.total - 1.0).abs());
        xi_dev = xi_dev.max((r.squeezing / e.squeezing - 1.0).abs());
    }
    let ed_min = ed.iter().min_by(|a, b| a.squeezing.total_cmp(&b.squeezing)).unwrap();
    let covered = ed_min.time < 1.0;
    let elapsed = start.elapsed().as_secs_f64();
    let pass = jx_dev <= 0.03 && xi_dev <= 0.10 && covered && elapsed < 600.0;
    report(
        3,
        "ED vs RSW N=16 dipolar, tJ <= 1",
        pass,
        format!(
            "max |Δ<Jx>|/<Jx> = {:.2}%, max |Δξ²|/ξ² = {:.2}%, ED ξ² min {:.4} at t = {:.2}, {elapsed:.1}s",
            100.0 * jx_dev,
            100.0 * xi_dev,
            ed_min.squeezing,
            ed_min.time
        ),
    )
}

fn mode_rhs(a: f64, b: f64, n: f64, m: Complex64) -> (f64, Complex64) {
    let i = Complex64::i();
    (-2.0 * b * m.im, -2.0 * i * a * m - i * b * (2.0 * n + 1.0))
}

/// RK4 integration of the mode equations, sampled at each requested time.
fn mode_ode(a: f64, b: f64, times: &[f64], h: f64) -> Vec<f64> {
    let (mut n, mut m, mut t) = (0.0, Complex64::new(0.0, 0.0), 0.0);
    let mut out = Vec::new();
    for &target in times {
        let steps = ((target - t) / h).round() as usize;
        let hh = (target - t) / steps.max(1) as f64;
        for _ in 0..steps {
            let (k1n, k1m) = mode_rhs(a, b, n, m);
            let (k2n, k2m) = mode_rhs(a, b, n + 0.5 * hh * k1n, m + 0.5 * hh * k1m);
            let (k3n, k3m) = mode_rhs(a, b, n + 0.5 * hh * k2n, m + 0.5 * hh * k2m);
            let (k4n, k4m) = mode_rhs(a, b, n + hh * k3n, m + hh * k3m);
            n += hh / 6.0 * (k1n + 2.0 * k2n + 2.0 * k3n + k4n);
            m += hh / 6.0 * (k1m + 2.0 * k2m + 2.0 * k3m + k4m);
        }
        t = target;
        out.push(n);
    }
    out
}

fn criterion_4_modes_vs_ode() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut grid = Vec::new();
    for _ in 0..70 {
        let a: f64 = rng.gen_range(-3.0..3.0);
        grid.push((a, rng.gen_range(-1.0..1.0) * a.abs()));
    }
    for _ in 0..15 {
        let a: f64 = rng.gen_range(-2.0..2.0);
        grid.push((a, if rng.gen_bool(0.5) { a } else { -a }));
    }
    for _ in 0..15 {
        let kappa: f64 = rng.gen_range(0.02..0.3);
        let b: f64 = rng.gen_range(0.3..0.6) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let a = (b * b - kappa * kappa).sqrt() * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        grid.push((a, b));
    }
    let times: Vec<f64> = (1..=20).map(|i| 0.5 * i as f64).collect();
    let mut worst = (0.0_f64, 0.0, 0.0);
    for &(a, b) in &grid {
        let ode = mode_ode(a, b, &times, 2e-4);
        for (&t, n_ode) in times.iter().zip(ode) {
            let err = (evolve_mode(a, b, t).n - n_ode).abs();
            if err > worst.0 {
                worst = (err, a, b);
            }
        }
    }
    let pass = grid.len() == 100 && worst.0 < 1e-8;
    report(
        4,
        "spin-wave closed form vs ODE",
        pass,
        format!("{} (A,B) points, max |Δn| = {:.2e} at A = {:.3}, B = {:.3}", grid.len(), worst.0, worst.1, worst.2),
    )
}

fn criterion_5_conservation() -> Outcome {
    let cases = [
        ("2d dipolar 6x6", LatticeSpec::dipolar_square(6)),
        ("1d alpha=1.5 Δ=-1.5", LatticeSpec::xx(1, 40, 1.5).with_anisotropy(-1.5)),
    ];
    let grid: Vec<f64> = (0..=15).map(|i| 0.2 * i as f64).collect();
    let mut worst = [0.0_f64; 5];
    for (_, spec) in &cases {
        let model = build_model(spec).unwrap();
        let inertia = bare_inertia(&model);
        let n = model.num_sites() as f64;
        let options = RecordOptions { correlations: true, entropy_region: None };
        let recs = run_dynamics(&model, inertia, &grid, options).unwrap();
        let sw = SwCoefficients::new(&model);
        for r in &recs {
            worst[0] = worst[0].max((r.var_jz - n / 4.0).abs());
            worst[1] = worst[1].max(r.mean_jz.abs());
            let sum: f64 = r.correlations.iter().map(|c| c.zz.total).sum();
            worst[2] = worst[2].max((sum - 0.25).abs());
            let modes = sw.evolve(r.time);
            for q in 1..model.num_sites() {
                let nq = modes.population(q);
                let purity = (modes.anomalous(q).norm_sqr() - nq * (nq + 1.0)).abs() / (1.0 + nq * (nq + 1.0));
                worst[3] = worst[3].max(purity);
            }
            let green = realspace_green(&modes, &model);
            let g = model.geometry();
            worst[4] = worst[4].max(renyi2_sw(g, &green, &Region::full(g)).unwrap().abs());
        }
    }
    let pass = worst[0] < 1e-8 && worst[1] < 1e-8 && worst[2] < 1e-8 && worst[3] < 1e-10 && worst[4] < 1e-8;
    report(
        5,
        "conservation suite",
        pass,
        format!(
            "|Var(Jz)-N/4| {:.1e}, |<Jz>| {:.1e}, |ΣC^zz-S/2| {:.1e}, purity {:.1e}, global S2 {:.1e}",
            worst[0], worst[1], worst[2], worst[3], worst[4]
        ),
    )
}

fn criterion_6_cat_dips() -> Outcome {
    let model = dipolar(10);
    let inertia = tos_inertia(&model, Some(&dipolar_reference()));
    let i = inertia.value();
    let psi0 = RotorState::css_x(model.num_sites(), model.spin()).unwrap();
    let half = Region::half_system(model.geometry()).len();
    let s2 = |t: f64| renyi2_rotor(&psi0.evolve(inertia, t), half).unwrap();
    let mut worst = 0.0_f64;
    let mut detail = Vec::new();
    for q in [2u32, 3, 4] {
        let predicted = 2.0 * PI * i / q as f64;
        let found = argmin_refined(s2, 0.9 * predicted, 1.1 * predicted, 400);
        let dev = (found / predicted - 1.0).abs();
        worst = worst.max(dev);
        detail.push(format!("q={q}: t={found:.4} vs {predicted:.4} (S2 {:.3})", s2(found)));
    }
    let pass = worst <= 0.02;
    report(6, "cat-state dips N=100", pass, format!("{}; worst {:.3}%", detail.join(", "), 100.0 * worst))
}

fn criterion_7_transition_scan() -> Outcome {
    let start = Instant::now();
    let summary = run_scan(&LatticeSpec::xx(1, 2, 1.0), &[1.0, 1.5, 2.0, 2.5, 3.0], &[64, 128, 256, 512, 1024], 4000, -1.0 / 3.0)
        .unwrap();
    let slope = |a: f64| summary.fits.iter().find(|f| f.alpha == a).unwrap().slope;
    let cross = summary.crossover_alpha;
    let elapsed = start.elapsed().as_secs_f64();
    let crossover_ok = cross.is_some_and(|a| (1.8..=2.4).contains(&a));
    let pass = slope(1.0) <= -0.4 && slope(3.0) >= -0.1 && summary.monotone && crossover_ok && elapsed < 1800.0;
    let slopes: Vec<String> = summary.fits.iter().map(|f| format!("{}:{:.4}", f.alpha, f.slope)).collect();
    report(
        7,
        "1d alpha scan",
        pass,
        format!(
            "slopes [{}], monotone {}, crossover {:?}, {elapsed:.1}s",
            slopes.join(", "),
            summary.monotone,
            cross.map(|a| (a * 1000.0).round() / 1000.0)
        ),
    )
}

fn criterion_8_rotor_saturation() -> Outcome {
    let reference = dipolar_reference();
    let mut points = Vec::new();
    for l in [10usize, 20, 30] {
        let model = dipolar(l);
        let inertia = tos_inertia(&model, Some(&reference));
        let n = model.num_sites() as f64;
        let psi0 = RotorState::css_x(model.num_sites(), model.spin()).unwrap();
        let target = 0.95 / 8.0;
        let level = |t: f64| psi0.evolve(inertia, t).moments().second_y / (n * n) - target;
        let step = 0.01;
        let mut t = 0.0;
        while level(t + step) < 0.0 {
            t += step;
            assert!(t < 100.0);
        }
        let (mut a, mut b) = (t, t + step);
        for _ in 0..60 {
            let mid = 0.5 * (a + b);
            if level(mid) < 0.0 {
                a = mid;
            } else {
                b = mid;
            }
        }
        points.push((l as f64, 0.5 * (a + b), inertia));
    }
    let c = points.iter().map(|p| p.0 * p.1).sum::<f64>() / points.iter().map(|p| p.0 * p.0).sum::<f64>();
    let pass = (c - 0.3).abs() <= 0.06;
    let detail: Vec<String> = points
        .iter()
        .map(|(l, t, i)| format!("L={l}: t_R={t:.3} (I={:.3})", i.value()))
        .collect();
    report(8, "rotor saturation t_R = c L", pass, format!("{}; c = {c:.4}", detail.join(", ")))
}

fn main() {
    let criteria: [fn() -> Outcome; 8] = [
        criterion_1_oat_limit,
        criterion_2_tower_of_states,
        criterion_3_oracle_agreement,
        criterion_4_modes_vs_ode,
        criterion_5_conservation,
        criterion_6_cat_dips,
        criterion_7_transition_scan,
        criterion_8_rotor_saturation,
    ];
    let mut unexpected = Vec::new();
    let mut passed = 0;
    for run in criteria {
        let o = run();
        let known = KNOWN_FAILURES.contains(&o.id);
        let verdict = match (o.pass, known) {
            (true, false) => "PASS",
            (true, true) => "PASS (listed as known failure)",
            (false, true) => "FAIL (known)",
            (false, false) => "FAIL",
        };
        println!("[criterion {}] {}: {verdict} ({})", o.id, o.name, o.detail);
        if o.pass {
            passed += 1;
        } else if !known {
            unexpected.push(o.id);
        }
    }
    println!("acceptance: {passed}/8 criteria passed");
    if !unexpected.is_empty() {
        println!("acceptance: unexpected failures {unexpected:?}");
        std::process::exit(1);
    }
}
