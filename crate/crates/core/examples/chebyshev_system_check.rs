//! Randomized determinant check of the Chebyshev property and the
//! Cauchy-Vandermonde determinant.

use chebdesign::cheb::{cauchy_vandermonde_det, is_chebyshev_system};
use chebdesign::linalg::det;
use chebdesign::model::{FnSystem, FunctionSystem, Interval, ModelSpec, Subsystem};

fn main() -> chebdesign::Result<()> {
    let model = ModelSpec::rational(0, vec![-1.0, -0.3], Interval::semi_infinite(0.0)?)?;
    let check = is_chebyshev_system(&model, 5000, 7)?;
    println!("full system: {:?} (sign {})", check.verdict, check.sign);

    let sub = Subsystem::without(&model, 0)?;
    println!("without f_1: {:?}", is_chebyshev_system(&sub, 5000, 7)?.verdict);

    // 1 and t^2 change the sign of their determinant on [-1, 1]
    let quad = Subsystem::without(FnSystem::monomials(2, Interval::new(-1.0, 1.0)?), 1)?;
    let check = is_chebyshev_system(&quad, 5000, 7)?;
    println!("1, t^2: {:?}, witness {:?}", check.verdict, check.witness);

    let t = [0.5, 1.0, 2.0];
    let btilde = [-1.0, -2.0];
    let sys = FnSystem::new(Interval::new(0.0, 3.0)?)
        .with(|_| 1.0)
        .with(|t| 1.0 / (t + 1.0))
        .with(|t| 1.0 / (t + 2.0));
    println!(
        "closed form {:.12}, direct {:.12}",
        cauchy_vandermonde_det(&t, &btilde, 1)?,
        det(&sys.matrix_at(&t)?)
    );
    Ok(())
}
