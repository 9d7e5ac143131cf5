//! c-optimal designs: weighted Chebyshev points when they verify, the LP
//! oracle otherwise.

use chebdesign::cheb::RemezOptions;
use chebdesign::design::design_c;
use chebdesign::model::{Interval, ModelSpec};
use chebdesign::optimal::{c_reference, verify_c, VerifyOptions};

fn main() -> chebdesign::Result<()> {
    let model = ModelSpec::rational(0, vec![-1.0], Interval::semi_infinite(0.0)?)?;
    let opts = VerifyOptions::default();
    for c in [[0.0, 1.0], [1.0, 0.0], [1.0, 0.7]] {
        let cand = design_c(&model, &c, &RemezOptions::default())?;
        let report = verify_c(&model, &cand.design, &c, &opts)?;
        println!("c = {c:?}: candidate {:?} is {:?}", cand.design, report.verdict);
        let best = c_reference(&model, &c, &cand.chebyshev, &opts)?;
        println!("  optimum {:.6} from {:?}: {:?}", best.value, best.source, best.design);
    }
    Ok(())
}
