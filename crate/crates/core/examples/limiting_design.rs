//! The limiting design as `b = -1 + delta r` collapses, and the distance of
//! the E and c candidates from it.

use chebdesign::asympt::{convergence_check_designs, limiting_design};
use chebdesign::model::{Interval, ModelSpec};

fn main() -> chebdesign::Result<()> {
    let model = ModelSpec::rational(0, vec![-1.5, -0.5], Interval::semi_infinite(0.0)?)?;
    let limit = limiting_design(&model, -1.0, None)?;
    for (t, w) in limit.chebyshev.points.iter().zip(&limit.weights) {
        println!("t = {t:8.5}  w = {w:.5}");
    }
    println!("delta,dist_estar,dist_c");
    for row in convergence_check_designs(&model, -1.0, &[-1.0, 1.0], None, &[0.5, 0.25, 0.1, 0.05])? {
        println!("{},{:?},{:?}", row.delta, row.dist_estar, row.dist_c);
    }
    Ok(())
}
