//! Chebyshev polynomial of a rational system on the half-line.

use chebdesign::cheb::{remez, RemezOptions};
use chebdesign::model::{Interval, ModelSpec};

fn main() -> chebdesign::Result<()> {
    let model = ModelSpec::rational(0, vec![-1.5, -0.5], Interval::semi_infinite(0.0)?)?;
    let cheb = remez(&model, &RemezOptions::default())?;
    println!("coefficients: {:?}", cheb.coeffs);
    for &t in &cheb.points {
        println!("  s = {t:.6}  p(s) = {:+.12}", cheb.value(&model, t)?);
    }
    println!("gap {:e} after {} iterations", cheb.residual, cheb.iterations);
    Ok(())
}
