//! Closed-form Chebyshev points of `1, 1/(t-b_i), 1/(t-b_i)^2` on [-1, 1]
//! compared with the exchange algorithm.

use chebdesign::cheb::{closed_form_points, remez, RemezOptions};
use chebdesign::model::{Interval, ModelSpec};

fn main() -> chebdesign::Result<()> {
    for b in [vec![-2.0], vec![3.0], vec![-1.5, 2.5]] {
        let closed = closed_form_points(&b)?;
        let model = ModelSpec::rational(1, b.clone(), Interval::new(-1.0, 1.0)?)?;
        let numeric = remez(&model, &RemezOptions::default())?;
        println!("b = {b:?} ({:?} root)", closed.root);
        for (a, n) in closed.points.iter().zip(&numeric.points) {
            println!("  {a:+.9}  {n:+.9}");
        }
    }
    Ok(())
}
