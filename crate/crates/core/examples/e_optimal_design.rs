//! E-optimal design from the Chebyshev points, checked by the equivalence
//! theorem.

use chebdesign::cheb::RemezOptions;
use chebdesign::design::design_estar;
use chebdesign::model::{Interval, ModelSpec};
use chebdesign::optimal::{verify_e_with, VerifyOptions};

fn main() -> chebdesign::Result<()> {
    let model = ModelSpec::rational(0, vec![-1.5, -0.5], Interval::semi_infinite(0.0)?)?;
    let cand = design_estar(&model, &RemezOptions::default())?;
    for (t, w) in cand.design.iter() {
        println!("t = {t:8.4}  w = {w:.4}");
    }
    let report = verify_e_with(&model, &cand.design, &cand.chebyshev, &VerifyOptions::default())?;
    println!(
        "{:?}: lambda_min {:.6e}, lambda_2 / lambda_c* = {:.3}",
        report.verdict,
        report.lambda_min,
        report.eig_ratio().unwrap_or(f64::NAN)
    );
    Ok(())
}
