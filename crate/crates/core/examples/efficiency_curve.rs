//! Efficiencies `eff_i` of the E-optimal design of `beta_1/(t-b) +
//! beta_2/(t-b)^2` as `b` varies.

use chebdesign::cheb::{remez, RemezOptions};
use chebdesign::design::estar_from;
use chebdesign::model::{Interval, ModelSpec};
use chebdesign::optimal::{efficiencies, VerifyOptions};

fn main() -> chebdesign::Result<()> {
    println!("b,eff1,eff2");
    for j in 0..=6 {
        let b = -1.0 - 0.25 * j as f64;
        let model = ModelSpec::rational(0, vec![b], Interval::semi_infinite(0.0)?)?;
        let cheb = remez(&model, &RemezOptions::default())?;
        let d = estar_from(&model, cheb.clone())?;
        let e = efficiencies(&model, &d.design, &cheb, &VerifyOptions::default())?;
        println!("{b},{:.5},{:.5}", e[0], e[1]);
    }
    Ok(())
}
