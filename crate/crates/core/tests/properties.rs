use chebdesign::cheb::{remez, RemezOptions};
use chebdesign::cli::tables::table_model;
use chebdesign::design::{design_estar, Design};
use chebdesign::model::{Interval, ModelSpec, ScaledSystem};
use chebdesign::optimal::{efficiency, min_eigenvalue, VerifyOptions};
use proptest::prelude::*;

fn bounded_model() -> impl Strategy<Value = ModelSpec> {
    (0usize..=1, 1.1f64..4.0, 0.3f64..3.0, any::<bool>()).prop_map(|(s, b1, gap, neg)| {
        let sign = if neg { -1.0 } else { 1.0 };
        ModelSpec::rational(s, vec![sign * b1, sign * (b1 + gap)], Interval::new(-1.0, 1.0).unwrap())
            .unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn chebyshev_polynomial_equioscillates(model in bounded_model()) {
        let sol = remez(&model, &RemezOptions::default()).unwrap();
        for (j, &t) in sol.points.iter().enumerate() {
            let v = sol.value(&model, t).unwrap();
            let want = if j % 2 == 0 { -1.0 } else { 1.0 };
            prop_assert!((v - want).abs() < 1e-8, "p(s_{}) = {}", j, v);
        }
        for t in model.interval().grid(2000) {
            prop_assert!(sol.value(&model, t).unwrap().abs() <= 1.0 + 1e-8);
        }
    }

    #[test]
    fn points_ignore_column_scaling(model in bounded_model(), scale in prop::collection::vec(0.01f64..100.0, 6)) {
        let scale = scale[..model.m()].to_vec();
        let scaled = ScaledSystem::new(model.clone(), scale.clone()).unwrap();
        let a = remez(&model, &RemezOptions::default()).unwrap();
        let b = remez(&scaled, &RemezOptions::default()).unwrap();
        for (x, y) in a.points.iter().zip(&b.points) {
            prop_assert!((x - y).abs() < 1e-8);
        }
        for ((x, y), s) in a.coeffs.iter().zip(&b.coeffs).zip(&scale) {
            prop_assert!((x - y * s).abs() < 1e-6 * x.abs().max(1.0));
        }
    }

    #[test]
    fn e_candidate_beats_random_designs(
        z in 0.1f64..0.9,
        u in prop::collection::vec(0.0f64..0.95, 4..7),
        w in prop::collection::vec(0.05f64..1.0, 7),
    ) {
        let model = table_model(z).unwrap();
        let best = design_estar(&model, &RemezOptions::default()).unwrap();
        let t: Vec<f64> = u.iter().map(|u| u / (1.0 - u)).collect();
        let Ok(d) = Design::normalized(&t, &w[..t.len()]) else { return Ok(()) };
        let lam = min_eigenvalue(&model, &d).unwrap();
        prop_assert!(lam <= min_eigenvalue(&model, &best.design).unwrap() * (1.0 + 1e-9));
    }

    #[test]
    fn efficiencies_are_at_most_one(
        b in -3.0f64..-0.3,
        u in prop::collection::vec(0.0f64..0.95, 2..5),
        w in prop::collection::vec(0.05f64..1.0, 5),
    ) {
        let model = ModelSpec::rational(0, vec![b], Interval::semi_infinite(0.0).unwrap()).unwrap();
        let t: Vec<f64> = u.iter().map(|u| u / (1.0 - u)).collect();
        let Ok(d) = Design::normalized(&t, &w[..t.len()]) else { return Ok(()) };
        if d.len() < 2 {
            return Ok(());
        }
        for i in 0..2 {
            let e = efficiency(&model, &d, i, &VerifyOptions::default()).unwrap();
            prop_assert!(e > 0.0 && e <= 1.0 + 1e-8, "eff_{} = {}", i + 1, e);
        }
    }
}
