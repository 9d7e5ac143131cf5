//! Grid-based E- and c-optimal designs that ignore the Chebyshev structure.

use chebdesign::cheb::RemezOptions;
use chebdesign::design::design_estar;
use chebdesign::model::{Interval, ModelSpec};
use chebdesign::optimal::{brute_force_c, brute_force_e, min_eigenvalue, OracleOptions};

fn main() -> chebdesign::Result<()> {
    let model = ModelSpec::rational(0, vec![-2.0, -0.7], Interval::semi_infinite(0.0)?)?;
    let cheb = design_estar(&model, &RemezOptions::default())?;
    let oracle = brute_force_e(&model, &OracleOptions { grid_size: 400, iterations: 2000 })?;
    println!("Chebyshev: {:?}", cheb.design);
    println!("oracle:    {:?}", oracle);
    println!(
        "lambda_min {:.8e} vs {:.8e}",
        min_eigenvalue(&model, &cheb.design)?,
        min_eigenvalue(&model, &oracle)?
    );
    let c = brute_force_c(&model, &[0.0, 0.0, 1.0, 0.0], &OracleOptions::default())?;
    println!("e_3: value {:.6e} (dual bound {:.6e}), {:?}", c.value, c.lower, c.design);
    Ok(())
}
