//! End-to-end acceptance checks. Each criterion prints one PASS or FAIL
//! line; the test fails if any criterion does.

mod common;

use std::f64::consts::PI;
use std::path::Path;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;
use cyclescope::dynamics::{
    crossing_values, find_cycle, hopf_scan, integrate, integrate_field, lienard_circle_flux,
    return_map, star_shaped_cycle, CycleOptions, DynamicsError, HopfOptions, HopfVerdict, Options,
    Section,
};
use cyclescope::symbolic::sturm::SturmSequence;
use cyclescope::system::{EquationSpec, Quadruple, SpecDocument};
use cyclescope::theorems::{
    check_existence_poly, check_massera, check_nonexistence, Overall, TheoremReport,
};
use cyclescope::transforms::{level_pullback, nested_on_rays, LienardImage, DEFAULT_LEVEL_WINDOW};
use cyclescope::verdict::Verdict;

type Outcome = Result<String, String>;

fn example(name: &str) -> EquationSpec {
    let p = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("examples")
        .join(name);
    EquationSpec::load(&p).unwrap()
}

fn cycle_opts() -> CycleOptions {
    CycleOptions::default()
}

fn gap(spec: &EquationSpec, y: f64) -> Result<f64, String> {
    return_map(spec, y, &cycle_opts().integrator)
        .map(|r| r.y1 - y)
        .map_err(|e| e.to_string())
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect()
}

fn sign_changes(v: &[f64]) -> Vec<usize> {
    (1..v.len())
        .filter(|&i| (v[i - 1] > 0.0) != (v[i] > 0.0))
        .collect()
}

fn c1_theorem3() -> Outcome {
    let t0 = Instant::now();
    let spec = example("fig3.toml");
    let r = check_existence_poly(spec.quadruple().unwrap());
    if r.overall != Overall::Applies || r.conditions.iter().any(|c| c.verdict != Verdict::Holds) {
        return Err(format!("T3 verdict {:?}", r.overall));
    }
    let ys = linspace(0.25, 5.0, 20);
    let g: Vec<f64> = ys
        .iter()
        .map(|&y| gap(&spec, y))
        .collect::<Result<_, _>>()?;
    let i = *sign_changes(&g)
        .first()
        .ok_or("no sign change of R(y) - y")?;
    let c = find_cycle(&spec, (ys[i - 1], ys[i]), &cycle_opts()).map_err(|e| e.to_string())?;
    let secs = t0.elapsed().as_secs_f64();
    if c.closure_error >= 1e-6 || c.multiplier >= 1.0 || secs >= 60.0 {
        return Err(format!(
            "closure {:e}, multiplier {}, {secs:.1} s",
            c.closure_error, c.multiplier
        ));
    }
    Ok(format!(
        "y* = {:.6}, closure {:.1e}, multiplier {:.4}, {secs:.2} s",
        c.y_star, c.closure_error, c.multiplier
    ))
}

fn c2_massera() -> Outcome {
    let spec = example("fig4.toml");
    let ys = linspace(0.01, 5.0, 50);
    let g: Vec<f64> = ys
        .iter()
        .map(|&y| gap(&spec, y))
        .collect::<Result<_, _>>()?;
    let ch = sign_changes(&g);
    if ch.len() != 1 {
        return Err(format!("{} sign changes of R(y) - y", ch.len()));
    }
    let c =
        find_cycle(&spec, (ys[ch[0] - 1], ys[ch[0]]), &cycle_opts()).map_err(|e| e.to_string())?;
    if c.multiplier >= 1.0 {
        return Err(format!("multiplier {}", c.multiplier));
    }
    let star =
        star_shaped_cycle(&spec, &c, 2048, &cycle_opts().integrator).map_err(|e| e.to_string())?;
    if !star.star {
        return Err(format!("cycle not star-shaped: {:?}", star.witness));
    }
    let opts = Options {
        section: Some(Section::PositiveYAxis),
        stop_at: 10,
        record: false,
        ..cycle_opts().integrator
    };
    let tr = integrate(&spec, (0.0, 0.01), &opts).map_err(|e| e.to_string())?;
    let cr = crossing_values(&tr);
    if cr.len() < 10 || cr.windows(2).any(|w| w[1] <= w[0]) {
        return Err(format!("crossings {cr:?}"));
    }
    Ok(format!(
        "y* = {:.6}, multiplier {:.4}, crossings {:.4}..{:.4}",
        c.y_star, c.multiplier, cr[0], cr[9]
    ))
}

fn c3_classical() -> Outcome {
    let spec = example("massera.toml");
    let flux = lienard_circle_flux(&spec.coefficient(1));
    let worst = linspace(-5.0, 5.0, 10_000)
        .into_iter()
        .map(&flux)
        .fold(f64::INFINITY, f64::min);
    if worst < -1e-12 {
        return Err(format!("min -x F1(x) = {worst:e}"));
    }
    let ys = linspace(0.1, 5.0, 20);
    let g: Vec<f64> = ys
        .iter()
        .map(|&y| gap(&spec, y))
        .collect::<Result<_, _>>()?;
    if !sign_changes(&g).is_empty() {
        return Err("R(y) - y changes sign".into());
    }
    Ok(format!(
        "min -x F1 = {worst:.3e}; R(y) - y one-signed on 20 points"
    ))
}

fn c4_nonexistence() -> Outcome {
    let spec = example("fig1.toml");
    let r = check_nonexistence(&spec);
    if r.overall != Overall::Applies {
        return Err(format!("T1 verdict {:?}", r.overall));
    }
    let mut bad = Vec::new();
    for k in 1..=10 {
        let y = 0.5 * k as f64;
        match return_map(&spec, y, &cycle_opts().integrator) {
            Ok(r) if r.y1 < y - 1e-4 => {}
            Ok(r) => bad.push(format!("R({y}) = {}", r.y1)),
            Err(DynamicsError::NoReturn { termination, .. }) => {
                bad.push(format!("y0 = {y}: {}", termination.tag()))
            }
            Err(e) => bad.push(format!("y0 = {y}: {e}")),
        }
    }
    if bad.is_empty() {
        Ok("T1 applies; R(y0) < y0 - 1e-4 on all 10 seeds".into())
    } else {
        Err(bad.join(", "))
    }
}

fn c5_hopf() -> Outcome {
    let p = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/hopf.toml");
    let doc: SpecDocument = toml::from_str(&std::fs::read_to_string(p).unwrap()).unwrap();
    let mut problems = Vec::new();

    let spec0 = EquationSpec::from_document(&doc).unwrap();
    let opts = Options {
        section: Some(Section::PositiveYAxis),
        stop_at: 10,
        record: false,
        ..cycle_opts().integrator
    };
    let cr = crossing_values(&integrate(&spec0, (0.05, 0.0), &opts).map_err(|e| e.to_string())?);
    if cr.len() < 2 || cr.windows(2).any(|w| w[1] >= w[0]) {
        problems.push(format!("b = 0 crossings not decreasing: {cr:?}"));
    }

    let bs = [0.05, 0.1, 0.2];
    let rows = hopf_scan(&doc, &bs, &HopfOptions::default());
    let amps: Vec<f64> = rows.iter().filter_map(|r| r.amplitude).collect();
    for r in &rows {
        if r.verdict != HopfVerdict::Cycle {
            problems.push(format!("b = {}: {:?} ({})", r.value, r.verdict, r.note));
        }
    }
    if amps.len() != bs.len() || amps.windows(2).any(|w| w[1] <= w[0]) {
        problems.push(format!("amplitudes {amps:?}"));
    }

    let far = Options::default();
    for &b in &[0.0, 0.05, 0.1, 0.2] {
        let mut d = doc.clone();
        d.parameters
            .insert("b".into(), cyclescope::system::Scalar::Float(b));
        let spec = EquationSpec::from_document(&d).unwrap();
        for k in 0..16 {
            let th = 2.0 * PI * k as f64 / 16.0;
            let tr = integrate(&spec, (50.0 * th.cos(), 50.0 * th.sin()), &far)
                .map_err(|e| e.to_string())?;
            // Blow-up covers both the radius test and a collapsed step.
            if !tr.termination.escaped() {
                problems.push(format!(
                    "b = {b}, seed angle {k}π/8: {}",
                    tr.termination.tag()
                ));
            }
        }
    }
    if problems.is_empty() {
        Ok(format!("amplitudes {amps:?}"))
    } else {
        Err(problems.join("; "))
    }
}

fn c6_transform() -> Outcome {
    let spec = example("fig1.toml");
    let img = LienardImage::new(&spec).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for u in linspace(-3.0, 3.0, 21) {
        for v in linspace(-3.0, 3.0, 21) {
            let (x, y) = img.forward(u, v).unwrap();
            let (a, b) = img.inverse(x, y).unwrap();
            worst = worst.max((a - u).abs()).max((b - v).abs());
        }
    }
    let mut problems = Vec::new();
    if worst >= 1e-9 {
        problems.push(format!("round trip error {worst:e}"));
    }

    // One revolution of the unperturbed system in both planes.
    let free = EquationSpec::from_strs(&["x", "0", "-x^2"]).unwrap();
    let lim = LienardImage::unperturbed(&spec).unwrap();
    let opts = Options {
        section: Some(Section::PositiveYAxis),
        stop_at: 2,
        dense: true,
        ..Options::with_tol(1e-12)
    };
    let orig = integrate(&free, (1.0, 0.0), &opts).map_err(|e| e.to_string())?;
    let s0 = lim.forward(1.0, 0.0).unwrap();
    let lf = |s: &[f64; 3]| {
        let (a, b) = lim
            .lienard_field(s[0], s[1])
            .unwrap_or((f64::NAN, f64::NAN));
        [a, b, 0.0]
    };
    let lt = integrate_field(lf, [s0.0, s0.1, 0.0], &opts)?;
    let dense = |tr: &cyclescope::dynamics::Trajectory, n: usize| -> Vec<(f64, f64)> {
        let t1 = tr.end().t;
        (0..=n)
            .filter_map(|i| tr.eval_at(t1 * i as f64 / n as f64))
            .map(|s| (s[0], s[1]))
            .collect()
    };
    let a: Vec<(f64, f64)> = dense(&orig, 6000)
        .into_iter()
        .map(|(u, v)| lim.forward(u, v).unwrap())
        .collect();
    let b = dense(&lt, 6000);
    let h = hausdorff(&a, &b);
    if h >= 1e-6 {
        problems.push(format!("Hausdorff distance {h:e}"));
    }

    let levels = [0.1, 0.3, 0.5, 0.7, 0.9, 1.1];
    let curves: Vec<_> = levels
        .iter()
        .map(|&l| level_pullback(&lim, l, 720, DEFAULT_LEVEL_WINDOW))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let open: Vec<f64> = curves
        .iter()
        .filter(|c| !c.closed)
        .map(|c| c.lambda)
        .collect();
    if !open.is_empty() {
        problems.push(format!("open levels {open:?}"));
    } else {
        let polys: Vec<&[(f64, f64)]> = curves.iter().map(|c| c.pieces[0].as_slice()).collect();
        if nested_on_rays(&polys, 360) != Some(true) {
            problems.push("levels not strictly nested".into());
        }
    }
    if problems.is_empty() {
        Ok(format!(
            "round trip {worst:.1e}, Hausdorff {h:.1e}, 6 nested levels"
        ))
    } else {
        Err(problems.join("; "))
    }
}

fn c7_integrator() -> Outcome {
    let harmonic = EquationSpec::from_strs(&["x"]).unwrap();
    let opts = Options {
        tmax: 200.0 * PI,
        ..Options::with_tol(1e-10)
    };
    let tr = integrate(&harmonic, (1.0, 0.0), &opts).map_err(|e| e.to_string())?;
    let drift = tr
        .samples
        .iter()
        .map(|s| (0.5 * (s.x * s.x + s.y * s.y) - 0.5).abs())
        .fold(0.0, f64::max);
    let spec = example("fig4.toml");
    let c = find_cycle(&spec, (4.0, 4.4), &cycle_opts()).map_err(|e| e.to_string())?;
    let h = 1e-4 * c.y_star;
    let io = &cycle_opts().integrator;
    let rp = return_map(&spec, c.y_star + h, io)
        .map_err(|e| e.to_string())?
        .y1;
    let rm = return_map(&spec, c.y_star - h, io)
        .map_err(|e| e.to_string())?
        .y1;
    let slope = (rp - rm) / (2.0 * h);
    let rel = (slope / c.multiplier - 1.0).abs();
    if drift >= 1e-8 || rel >= 0.05 {
        return Err(format!(
            "drift {drift:e}, dR/dy {slope} vs multiplier {}",
            c.multiplier
        ));
    }
    Ok(format!(
        "drift {drift:.1e}; dR/dy {slope:.5} vs multiplier {:.5}",
        c.multiplier
    ))
}

fn oracle_disagreements(r: &TheoremReport, expected: &[(String, bool)]) -> Vec<String> {
    expected
        .iter()
        .filter_map(|(label, holds)| {
            let want = if *holds {
                Verdict::Holds
            } else {
                Verdict::Fails
            };
            let got = r.condition(label).map(|c| c.verdict);
            (got != Some(want))
                .then(|| format!("{:?} {label}: {got:?} vs oracle {want:?}", r.theorem))
        })
        .collect()
}

fn c8_soundness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut bad = Vec::new();
    let mut checked = 0usize;
    for _ in 0..50 {
        // T1 on x'' + f1 x' + f2 x'^2 + f3 x'^3 + g = 0.
        let cs: Vec<Vec<i64>> = vec![
            random_poly(&mut rng, 6, false),
            random_poly(&mut rng, 6, false),
            random_poly(&mut rng, 6, false),
            random_poly(&mut rng, 6, true),
        ];
        let spec = EquationSpec::from_expressions(cs.iter().map(|c| expr(c)).collect()).unwrap();
        let r = check_nonexistence(&spec);
        let mut want = vec![("A2".to_string(), true)];
        let xg = signs(&times_x(&cs[0]), |k| k != 0);
        want.push(("B".into(), !xg.neg && !xg.zero));
        for l in [1, 3] {
            let s = signs(&cs[l], everywhere);
            want.push((format!("f_{l} one-signed"), !(s.pos && s.neg)));
        }
        checked += want.len();
        bad.extend(oracle_disagreements(&r, &want));

        // T3.
        let q: Vec<Vec<i64>> = (0..4).map(|_| random_poly(&mut rng, 6, true)).collect();
        let quad = Quadruple {
            p: poly(&q[0]),
            q1: poly(&q[1]),
            q2: poly(&q[2]),
            r: poly(&q[3]),
        };
        let r = check_existence_poly(&quad);
        let ps = signs(&q[0], everywhere);
        let xr = signs(&times_x(&q[3]), |k| k != 0);
        let h1 = !ps.neg && !ps.zero && q[1][0] < 0 && !xr.neg && !xr.zero;
        let d = |c: &[i64]| degree(c).unwrap() as i64;
        let h2 = d(&q[1]) % 2 == 0 && lead(&q[1]) > 0;
        let h3 = d(&q[0]) >= d(&q[2]) + 2;
        let h4 = d(&q[2]) % 2 == 0 || lead(&q[2]) < 0;
        let h5 = d(&q[3]) <= 2 * d(&q[1]) + d(&q[2]) + 1;
        let want: Vec<(String, bool)> = [h1, h2, h3, h4, h5]
            .iter()
            .enumerate()
            .map(|(i, &v)| (format!("H{}", i + 1), v))
            .collect();
        checked += want.len();
        bad.extend(oracle_disagreements(&r, &want));

        // T4 on x'' + f1 x' + f3 x'^3 + x = 0.
        let f1 = random_poly(&mut rng, 6, true);
        let f3 = random_poly(&mut rng, 6, true);
        let spec =
            EquationSpec::from_expressions(vec![expr(&[0, 1]), expr(&f1), expr(&[]), expr(&f3)])
                .unwrap();
        let r = check_massera(&spec);
        let mut want = vec![
            ("structure".to_string(), true),
            ("L1".into(), f1[0] < 0),
            ("L2".into(), !signs(&f3, everywhere).neg),
        ];
        for (l, f) in [(1, &f1), (3, &f3)] {
            let df = derivative(f);
            let right = signs(&df, |k| k > 0);
            let left = signs(&df, |k| k < 0);
            want.push((format!("L3 f_{l}"), !right.neg && !left.pos));
        }
        checked += want.len();
        bad.extend(oracle_disagreements(&r, &want));
    }

    let mut root_bad = Vec::new();
    for i in 0..100 {
        let c = if i % 2 == 0 {
            random_poly(&mut rng, 6, true)
        } else {
            // Products of rational linear factors (some repeated) and x^2 + c.
            let mut c = vec![rng.gen_range(1..=3)];
            if rng.gen_bool(0.5) {
                c = mul(&c, &[rng.gen_range(1..=4), 0, 1]);
            }
            while c.len() < 7 && rng.gen_bool(0.8) {
                let r = rng.gen_range(-12..=12);
                let times = rng.gen_range(1..=2).min(7 - c.len());
                for _ in 0..times {
                    c = mul(&c, &[-r, 4]);
                }
            }
            c
        };
        let sturm = SturmSequence::new(&poly(&c)).count_real();
        let grid = grid_root_count(&c);
        if sturm != grid {
            root_bad.push(format!("{c:?}: Sturm {sturm}, grid {grid}"));
        }
    }
    bad.extend(root_bad);
    if bad.is_empty() {
        Ok(format!(
            "{checked} condition verdicts and 100 root counts agree"
        ))
    } else {
        Err(format!("{} disagreements: {}", bad.len(), bad.join("; ")))
    }
}

fn mul(a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("theorem-3 reproduction", c1_theorem3),
        ("generalized Massera reproduction", c2_massera),
        ("classical Massera non-existence", c3_classical),
        ("theorem-1 corroboration", c4_nonexistence),
        ("Hopf example", c5_hopf),
        ("transform validation", c6_transform),
        ("integrator quality", c7_integrator),
        ("checker soundness", c8_soundness),
    ];
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {} ({name}): PASS - {detail}", i + 1),
            Err(why) => {
                println!("criterion {} ({name}): FAIL - {why}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
