//! `lambda_2 / lambda_c*` of the E candidate for `b = (-1, b_2)`; values of
//! at least 1 certify E-optimality.

use chebdesign::cheb::RemezOptions;
use chebdesign::model::{Interval, ModelSpec};
use chebdesign::optimal::eig_ratio_sweep;

fn main() -> chebdesign::Result<()> {
    let model = ModelSpec::rational(0, vec![-1.0, -0.5], Interval::semi_infinite(0.0)?)?;
    let bs: Vec<Vec<f64>> = (1..=10).map(|j| vec![-1.0, -1.0 + 0.098 * j as f64]).collect();
    for row in eig_ratio_sweep(&model, &bs, &RemezOptions::default()) {
        match row.ratio {
            Some(r) => println!("b2 = {:6.3}  ratio = {r:.4}", row.b[1]),
            None => println!("b2 = {:6.3}  failed: {}", row.b[1], row.error.unwrap_or_default()),
        }
    }
    Ok(())
}
