//! Leading term of `M^{-1}(xi, x + delta r)` as `delta -> 0`.

use chebdesign::asympt::{expansion_check, gamma_bar, h_const, limiting_design, HermiteBasis};
use chebdesign::model::{Interval, ModelSpec};

fn main() -> chebdesign::Result<()> {
    let model = ModelSpec::rational(0, vec![-1.5, -0.5], Interval::semi_infinite(0.0)?)?;
    let r = [-1.0, 1.0];
    let design = limiting_design(&model, -1.0, None)?.design;
    println!("gamma_bar = {:?}", gamma_bar(&r, 0)?);
    println!("h = {:.6}", h_const(&model, &design, -1.0)?);
    println!("alpha at delta = 0.1: {:?}", HermiteBasis::new(&r, 0.1)?.alpha());
    for row in expansion_check(&model, -1.0, &r, &design, &[0.2, 0.1, 0.05, 0.025])? {
        println!("delta {:6.3}  error {:?}", row.delta, row.error);
    }
    Ok(())
}
