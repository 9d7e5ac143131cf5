//! Closed forms for `beta_1/(t-b) + beta_2/(t-b)^2` on [0, inf).

use chebdesign::design::rational::{c_optimal, estar_weight, estar_weight_nonlinear, points};
use chebdesign::model::{Interval, ModelSpec};

fn main() -> chebdesign::Result<()> {
    for b in [-0.5, -1.0, -2.0] {
        let [s1, s2] = points(b)?;
        println!(
            "b = {b}: points ({s1}, {s2:.6}), E weight at 0 {:.6}, nonlinear (a = 1) {:.6}",
            estar_weight(b)?,
            estar_weight_nonlinear(1.0, b)?
        );
    }
    let model = ModelSpec::rational(0, vec![-1.0], Interval::semi_infinite(0.0)?)?;
    for c in [[1.0, 0.7], [1.0, 1.0], [1.0, 2.0]] {
        println!("c = {c:?}: {:?}", c_optimal(&model, c)?);
    }
    Ok(())
}
