//! Acceptance gate: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

use std::f64::consts::SQRT_2;
use std::time::Instant;

use chebdesign::asympt::{convergence_check_designs, expansion_check, limiting_design};
use chebdesign::cheb::{closed_form_points, remez, RemezOptions};
use chebdesign::cli::tables::{table1, table2, TABLE_Z};
use chebdesign::design::{design_c, design_estar, estar_from};
use chebdesign::model::{Basis, Interval, ModelSpec};
use chebdesign::optimal::{
    brute_force_e, efficiencies, eig_ratio_sweep, min_eigenvalue, OracleOptions, VerifyOptions,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

const TABLE1: [[f64; 10]; 7] = [
    [0.18, 0.17, 0.17, 0.16, 0.15, 0.13, 0.11, 0.09, 0.05, 0.03],
    [1.08, 1.06, 1.03, 0.99, 0.94, 0.87, 0.77, 0.65, 0.47, 0.34],
    [7.85, 7.77, 7.65, 7.46, 7.21, 6.88, 6.45, 5.88, 5.05, 4.43],
    [0.13, 0.13, 0.13, 0.13, 0.12, 0.10, 0.08, 0.07, 0.05, 0.03],
    [0.26, 0.26, 0.27, 0.26, 0.25, 0.22, 0.20, 0.17, 0.13, 0.10],
    [0.27, 0.27, 0.28, 0.28, 0.28, 0.28, 0.28, 0.28, 0.28, 0.28],
    [0.34, 0.33, 0.33, 0.33, 0.36, 0.39, 0.44, 0.49, 0.54, 0.59],
];

const TABLE2: [[f64; 10]; 8] = [
    [1.00, 1.00, 0.99, 0.94, 0.70, 0.45, 0.50, 0.55, 0.64, 0.78],
    [0.99, 0.99, 0.98, 0.98, 0.99, 1.00, 1.00, 1.00, 1.00, 1.00],
    [1.00, 1.00, 1.00, 0.99, 0.95, 0.87, 0.76, 0.68, 0.58, 0.44],
    [1.00, 0.99, 0.98, 0.94, 0.87, 0.76, 0.62, 0.54, 0.44, 0.31],
    [1.00, 0.99, 0.98, 0.94, 0.79, 0.61, 0.39, 0.32, 0.29, 0.27],
    [0.99, 0.97, 0.94, 0.88, 0.78, 0.65, 0.49, 0.40, 0.31, 0.21],
    [1.00, 0.99, 0.98, 0.95, 0.88, 0.75, 0.54, 0.40, 0.24, 0.08],
    [1.00, 0.99, 0.98, 0.95, 0.90, 0.78, 0.57, 0.41, 0.24, 0.07],
];

/// Tabulated values carry two decimals.
const TABLE_TOL: f64 = 0.01 + 1e-9;

fn compare_table(
    got: &chebdesign::cli::tables::Table,
    expected: &[[f64; 10]],
) -> Outcome {
    let mut worst = (0.0f64, String::new());
    for (row, exp) in got.rows.iter().zip(expected) {
        for (j, (v, e)) in row.values.iter().zip(exp).enumerate() {
            let Some(v) = v else {
                return Err(format!("{} at z = {} failed: {:?}", row.name, got.z[j], got.flags[j]));
            };
            let d = (v - e).abs();
            if d > worst.0 {
                worst = (d, format!("{} at z = {}: {v:.4} vs {e}", row.name, got.z[j]));
            }
        }
    }
    if worst.0 <= TABLE_TOL {
        Ok(format!("max deviation {:.4}", worst.0))
    } else {
        Err(format!("max deviation {:.4} ({})", worst.0, worst.1))
    }
}

fn ac1() -> Outcome {
    compare_table(&table1(&TABLE_Z), &TABLE1)
}

fn ac2() -> Outcome {
    compare_table(&table2(&TABLE_Z).map_err(|e| e.to_string())?, &TABLE2)
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn half_line(b: f64) -> Result<ModelSpec, String> {
    ModelSpec::rational(0, vec![b], Interval::semi_infinite(0.0).unwrap()).map_err(|e| e.to_string())
}

fn ac3() -> Outcome {
    let e = |e: chebdesign::Error| e.to_string();
    let opts = RemezOptions::default();
    for b in [-0.5, -1.0, -2.0] {
        let model = half_line(b)?;
        let cheb = remez(&model, &opts).map_err(e)?;
        let expected = [0.0, SQRT_2 * b.abs()];
        for (p, q) in cheb.points.iter().zip(expected) {
            check((p - q).abs() <= 1e-8, || format!("b = {b}: point {p} vs {q}"))?;
        }
        let pairs = [
            ([1.0, 0.0], [(2.0 - SQRT_2) / 4.0, (2.0 + SQRT_2) / 4.0]),
            ([0.0, 1.0], [1.0 - 1.0 / SQRT_2, 1.0 / SQRT_2]),
        ];
        for (c, w) in pairs {
            let d = design_c(&model, &c, &opts).map_err(e)?;
            for (got, want) in d.weights.iter().zip(w) {
                check((got - want).abs() <= 1e-8, || {
                    format!("b = {b}, c = {c:?}: weight {got} vs {want}")
                })?;
            }
        }
    }
    let eff = |b: f64| -> Result<Vec<f64>, String> {
        let model = half_line(b)?;
        let cheb = remez(&model, &opts).map_err(e)?;
        let d = estar_from(&model, cheb.clone()).map_err(e)?;
        efficiencies(&model, &d.design, &cheb, &VerifyOptions::default()).map_err(e)
    };
    let near = eff(-1.0)?;
    let far = eff(-50.0)?;
    check((near[0] - 0.9595).abs() <= 5e-3 && (near[1] - 0.9805).abs() <= 5e-3, || {
        format!("efficiencies at b = -1: {near:?}")
    })?;
    check((far[0] - 0.9061).abs() <= 5e-3, || format!("eff_1 at b = -50: {}", far[0]))?;
    Ok(format!(
        "eff(-1) = ({:.5}, {:.5}), eff_1(-50) = {:.5}",
        near[0], near[1], far[0]
    ))
}

fn ac4() -> Outcome {
    let model = ModelSpec::rational(0, vec![-1.5, -0.5], Interval::semi_infinite(0.0).unwrap())
        .map_err(|e| e.to_string())?;
    let d = limiting_design(&model, -1.0, None).map_err(|e| e.to_string())?;
    let points = [0.0, 0.18, 1.08, 7.9];
    let masses = [0.13, 0.26, 0.27, 0.34];
    for j in 0..4 {
        let ptol = if j == 3 { 0.05 } else { 0.01 };
        let (p, w) = (d.chebyshev.points[j], d.weights[j]);
        check((p - points[j]).abs() <= ptol + 1e-9, || format!("point {j}: {p}"))?;
        check((w - masses[j]).abs() <= 0.01 + 1e-9, || format!("mass {j}: {w}"))?;
    }
    Ok(format!("points {:.4?}, masses {:.4?}", d.chebyshev.points, d.weights))
}

fn random_b(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    loop {
        let b: Vec<f64> = (0..k)
            .map(|_| {
                let mag = rng.random_range(1.05..6.0);
                if rng.random_bool(0.5) {
                    mag
                } else {
                    -mag
                }
            })
            .collect();
        if k == 1 || (b[0] - b[1]).abs() > 0.1 {
            return b;
        }
    }
}

fn ac5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    for k in [1, 2] {
        for _ in 0..20 {
            let b = random_b(&mut rng, k);
            let closed = closed_form_points(&b).map_err(|e| format!("b = {b:?}: {e}"))?;
            let model = ModelSpec::rational(1, b.clone(), Interval::new(-1.0, 1.0).unwrap())
                .map_err(|e| e.to_string())?;
            let cheb = remez(&model, &RemezOptions::default()).map_err(|e| e.to_string())?;
            for (p, q) in closed.points.iter().zip(&cheb.points) {
                worst = worst.max((p - q).abs());
            }
            if k == 1 {
                let expected = [-1.0, 1.0 / b[0], 1.0];
                for (p, q) in closed.points.iter().zip(expected) {
                    check((p - q).abs() <= 1e-10, || format!("b = {b:?}: {:?}", closed.points))?;
                }
            }
        }
    }
    check(worst <= 1e-6, || format!("max deviation {worst:e}"))?;
    Ok(format!("max deviation {worst:.2e} over 40 models"))
}

fn ac6() -> Outcome {
    let model = ModelSpec::rational(0, vec![-1.0, -0.5], Interval::semi_infinite(0.0).unwrap())
        .map_err(|e| e.to_string())?;
    let bs: Vec<Vec<f64>> = (1..=50).map(|j| vec![-1.0, -1.0 + 0.98 * j as f64 / 50.0]).collect();
    let rows = eig_ratio_sweep(&model, &bs, &RemezOptions::default());
    let mut min_ratio = f64::INFINITY;
    for row in &rows {
        let r = row
            .ratio
            .ok_or_else(|| format!("b = {:?}: {}", row.b, row.error.clone().unwrap_or_default()))?;
        min_ratio = min_ratio.min(r);
    }
    check(min_ratio >= 1.0, || format!("min ratio {min_ratio}"))?;
    Ok(format!("min ratio {min_ratio:.3} over {} points", rows.len()))
}

fn random_model(rng: &mut ChaCha8Rng) -> ModelSpec {
    loop {
        let k = rng.random_range(1..=2);
        let family = rng.random_range(0..3);
        let (basis, s, interval, lo, hi) = match family {
            0 => (Basis::Rational, rng.random_range(0..=1), Interval::new(-1.0, 1.0).unwrap(), 1.1, 5.0),
            1 => (Basis::Rational, 0, Interval::semi_infinite(0.0).unwrap(), 0.2, 4.0),
            _ => (Basis::Exponential, rng.random_range(0..=1), Interval::new(0.0, 1.0).unwrap(), -3.0, 3.0),
        };
        let b: Vec<f64> = (0..k)
            .map(|_| {
                let v = rng.random_range(lo..hi);
                match family {
                    0 if rng.random_bool(0.5) => -v,
                    1 => -v,
                    _ => v,
                }
            })
            .collect();
        if k == 2 && (b[0] - b[1]).abs() < 0.2 {
            continue;
        }
        if let Ok(model) = ModelSpec::new(basis, s, b, interval) {
            return model;
        }
    }
}

fn equioscillation(model: &ModelSpec) -> Result<(), String> {
    let cheb = remez(model, &RemezOptions::default()).map_err(|e| format!("{model:?}: {e}"))?;
    for (j, &t) in cheb.points.iter().enumerate() {
        let v = cheb.value(model, t).map_err(|e| e.to_string())?;
        let want = if j % 2 == 0 { -1.0 } else { 1.0 };
        check((v - want).abs() <= 1e-8, || format!("p(s_{j}) = {v}"))?;
    }
    for t in model.interval().grid(5000) {
        let v = cheb.value(model, t).map_err(|e| e.to_string())?;
        check(v.abs() <= 1.0 + 1e-8, || format!("|p({t})| = {}", v.abs()))?;
    }
    let d = estar_from(model, cheb.clone()).map_err(|e| format!("{model:?}: {e}"))?;
    let lhs = d.elfving_vector(model).map_err(|e| e.to_string())?;
    let n2 = cheb.norm_sq();
    let scale = cheb.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs())) / n2;
    let err = lhs
        .iter()
        .zip(&cheb.coeffs)
        .fold(0.0f64, |m, (a, c)| m.max((a - c / n2).abs()));
    check(err <= 1e-8 * scale, || format!("{model:?}: Elfving identity off by {err:e}"))?;
    Ok(())
}

fn ac7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut failures = Vec::new();
    for _ in 0..50 {
        let model = random_model(&mut rng);
        if let Err(e) = equioscillation(&model) {
            failures.push(e);
        }
    }
    check(failures.is_empty(), || {
        format!("{} of 50 models failed; first: {}", failures.len(), failures[0])
    })?;

    let half = Interval::semi_infinite(0.0).unwrap();
    let oracle_models = [
        ModelSpec::rational(0, vec![-1.0], half).unwrap(),
        ModelSpec::rational(1, vec![2.0], Interval::new(-1.0, 1.0).unwrap()).unwrap(),
        ModelSpec::rational(0, vec![-2.0, -0.7], half).unwrap(),
        ModelSpec::new(Basis::Exponential, 1, vec![-1.0, 1.5], Interval::new(0.0, 1.0).unwrap()).unwrap(),
    ];
    let mut worst_gap = 0.0f64;
    for model in &oracle_models {
        let cand = design_estar(model, &RemezOptions::default()).map_err(|e| e.to_string())?;
        let oracle = brute_force_e(model, &OracleOptions { grid_size: 400, iterations: 2000 })
            .map_err(|e| e.to_string())?;
        let (a, b) = (
            min_eigenvalue(model, &cand.design).map_err(|e| e.to_string())?,
            min_eigenvalue(model, &oracle).map_err(|e| e.to_string())?,
        );
        let gap = (a - b).abs() / a;
        worst_gap = worst_gap.max(gap);
        check(gap <= 5e-3, || format!("m = {}: lambda_min {a:e} vs oracle {b:e}", model.m()))?;
    }

    for k in [1usize, 2] {
        let b: Vec<f64> = (0..k).map(|i| -1.0 - i as f64).collect();
        let model = ModelSpec::rational(0, b, half).unwrap();
        let r: Vec<f64> = (0..k).map(|i| i as f64 - 0.5 * (k - 1) as f64).collect();
        let design = limiting_design(&model, -1.0, None).map_err(|e| e.to_string())?.design;
        let rows = expansion_check(&model, -1.0, &r, &design, &[0.2, 0.1, 0.05, 0.025])
            .map_err(|e| e.to_string())?;
        let errors: Vec<f64> = rows.iter().filter_map(|r| r.error).collect();
        check(errors.len() == rows.len(), || format!("k = {k}: flagged rows {rows:?}"))?;
        check(errors.windows(2).all(|w| w[1] < w[0]), || {
            format!("k = {k}: expansion errors {errors:?}")
        })?;
    }

    let model = ModelSpec::rational(0, vec![-1.5, -0.5], half).unwrap();
    let rows = convergence_check_designs(&model, -1.0, &[-1.0, 1.0], None, &[0.5, 0.25, 0.1, 0.05])
        .map_err(|e| e.to_string())?;
    for pair in rows.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        let ok = matches!((a.dist_estar, b.dist_estar), (Some(x), Some(y)) if y < x)
            && matches!((a.dist_c, b.dist_c), (Some(x), Some(y)) if y < x);
        check(ok, || format!("distances not decreasing: {rows:?}"))?;
    }
    Ok(format!(
        "50 models equioscillate, oracle gap {worst_gap:.1e}, expansion and convergence decrease"
    ))
}

fn main() {
    let criteria: [(&str, &str, fn() -> Outcome); 7] = [
        ("AC1", "Table 1 designs", ac1),
        ("AC2", "Table 2 efficiencies", ac2),
        ("AC3", "one-term rational closed forms", ac3),
        ("AC4", "limiting design", ac4),
        ("AC5", "closed-form Chebyshev points", ac5),
        ("AC6", "eigenvalue ratio at least 1", ac6),
        ("AC7", "property suite", ac7),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (id, name, run) in criteria {
        let t = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("{id} PASS {name}: {msg} [{secs:.1}s]"),
            Err(msg) => {
                failed += 1;
                println!("{id} FAIL {name}: {msg} [{secs:.1}s]");
            }
        }
    }
    println!(
        "acceptance: {} of 7 passed in {:.1}s",
        7 - failed,
        start.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
