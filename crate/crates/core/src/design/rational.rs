//! Closed forms for the two-parameter model `beta_1/(t-b) + beta_2/(t-b)^2`
//! on `[0, inf)` with `b < 0`.
//!
//! The regression vector is `f = (1/(t-b), 1/(t-b)^2)`. Some published
//! formulas for this model use `-1/(t-b)^2` as second function; the functions
//! here are stated for the `+` sign, which amounts to replacing `c_2` by
//! `-c_2`.

use std::f64::consts::SQRT_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Basis, ModelSpec};

use super::Design;

fn check_b(b: f64) -> Result<()> {
    if b < 0.0 && b.is_finite() {
        Ok(())
    } else {
        Err(Error::Parameter(format!("b = {b} must be negative")))
    }
}

fn check_model(model: &ModelSpec) -> Result<f64> {
    let ok = matches!(model.basis(), Basis::Rational)
        && model.s() == 0
        && model.k() == 1
        && !model.interval().is_bounded()
        && model.interval().lower() == 0.0;
    if !ok {
        return Err(Error::Precondition(
            "closed forms need the rational model with s = 0, k = 1 on [0, inf)".into(),
        ));
    }
    let b = model.b()[0];
    check_b(b)?;
    Ok(b)
}

/// Chebyshev points `(0, sqrt(2) |b|)`.
pub fn points(b: f64) -> Result<[f64; 2]> {
    check_b(b)?;
    Ok([0.0, SQRT_2 * b.abs()])
}

/// Chebyshev coefficients `(1 + sqrt 2) (2|b|, -(1 + sqrt 2) b^2)`, negative
/// at `t = 0`.
pub fn chebyshev_coeffs(b: f64) -> Result<[f64; 2]> {
    check_b(b)?;
    let g = 1.0 + SQRT_2;
    Ok([g * 2.0 * b.abs(), -g * g * b * b])
}

/// Mass at 0 of the E-optimal design.
pub fn estar_weight(b: f64) -> Result<f64> {
    check_b(b)?;
    let b2 = b * b;
    Ok(0.5 * (2.0 - SQRT_2) * (6.0 - 4.0 * SQRT_2 + b2) / (b2 + 12.0 - 8.0 * SQRT_2))
}

/// Mass at 0 of the E-optimal design for the nonlinear model `a/(t-b)`.
pub fn estar_weight_nonlinear(a: f64, b: f64) -> Result<f64> {
    check_b(b)?;
    if a == 0.0 || !a.is_finite() {
        return Err(Error::Parameter(format!("a = {a} must be finite and non-zero")));
    }
    let (a2, b2) = (a * a, b * b);
    Ok((2.0 * SQRT_2 * a2 + (4.0 + 3.0 * SQRT_2) * b2)
        / (2.0 * (4.0 * (1.0 + SQRT_2) * a2 + (7.0 + 5.0 * SQRT_2) * b2)))
}

/// Mass at 0 of the two-point candidate for estimating `c^T beta`.
pub fn c_weight(b: f64, c: [f64; 2]) -> Result<f64> {
    check_b(b)?;
    let p = (-SQRT_2 * c[0] - (2.0 + SQRT_2) * c[1] * b).abs();
    let q = (4.0 + 3.0 * SQRT_2) * (-c[0] - c[1] * b).abs();
    if p + q == 0.0 {
        return Err(Error::Parameter("c must be non-zero".into()));
    }
    Ok(p / (p + q))
}

/// Outcome of the one-point rule.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CRule {
    /// `c` is proportional to `f(t0)`-direction range where a single point is optimal.
    OnePoint { design: Design },
    /// The two-point design on the Chebyshev points applies.
    Chebyshev { design: Design },
}

impl CRule {
    pub fn design(&self) -> &Design {
        match self {
            CRule::OnePoint { design } | CRule::Chebyshev { design } => design,
        }
    }
}

/// The c-optimal design of the model: a single point at `t0 = b + c_1/c_2`
/// when `c_2/c_1` lies in `[1/((1 + sqrt 2)|b|), 1/|b|]`, the weighted
/// Chebyshev points otherwise.
pub fn c_optimal(model: &ModelSpec, c: [f64; 2]) -> Result<CRule> {
    let b = check_model(model)?;
    if c[0] != 0.0 && c[1] != 0.0 {
        let ratio = c[1] / c[0];
        let lo = 1.0 / ((1.0 + SQRT_2) * b.abs());
        let hi = 1.0 / b.abs();
        if (lo..=hi).contains(&ratio) {
            let t0 = (b + c[0] / c[1]).max(0.0);
            return Ok(CRule::OnePoint {
                design: Design::one_point(t0)?,
            });
        }
    }
    let w = c_weight(b, c)?;
    let pts = points(b)?;
    Ok(CRule::Chebyshev {
        design: Design::normalized(&pts, &[w, 1.0 - w])?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_vector_weights() {
        for b in [-0.5, -1.0, -3.0] {
            assert!((c_weight(b, [1.0, 0.0]).unwrap() - (2.0 - SQRT_2) / 4.0).abs() < 1e-15);
            assert!((c_weight(b, [0.0, 1.0]).unwrap() - (1.0 - 1.0 / SQRT_2)).abs() < 1e-15);
        }
    }

    #[test]
    fn estar_weight_at_minus_one() {
        assert!((estar_weight(-1.0).unwrap() - 0.233_292).abs() < 1e-6);
        // the two printed forms agree
        for b in [-0.3f64, -1.0, -4.0] {
            let b2 = b * b;
            let alt = 1.0 - 0.5 * SQRT_2 * (2.0 * SQRT_2 - 2.0 + b2) / (b2 + 12.0 - 8.0 * SQRT_2);
            assert!((estar_weight(b).unwrap() - alt).abs() < 1e-14);
        }
    }

    #[test]
    fn nonlinear_weight_forms_agree() {
        for (a, b) in [(1.0, -1.0), (2.0, -0.5), (-0.3, -4.0)] {
            let (a2, b2) = (a * a, b * b);
            let den = 2.0 * (4.0 * (1.0 + SQRT_2) * a2 + (7.0 + 5.0 * SQRT_2) * b2);
            let alt = 1.0 - (4.0 + 3.0 * SQRT_2) * (2.0 * a2 + (1.0 + SQRT_2) * b2) / den;
            assert!((estar_weight_nonlinear(a, b).unwrap() - alt).abs() < 1e-14);
        }
    }

    #[test]
    fn one_point_rule() {
        let iv = crate::model::Interval::semi_infinite(0.0).unwrap();
        let model = ModelSpec::rational(0, vec![-1.0], iv).unwrap();
        match c_optimal(&model, [1.0, 0.7]).unwrap() {
            CRule::OnePoint { design } => {
                assert!((design.support()[0] - (1.0 / 0.7 - 1.0)).abs() < 1e-15)
            }
            other => panic!("{other:?}"),
        }
        match c_optimal(&model, [1.0, 1.0]).unwrap() {
            CRule::OnePoint { design } => assert_eq!(design.support(), &[0.0]),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            c_optimal(&model, [0.0, 1.0]).unwrap(),
            CRule::Chebyshev { .. }
        ));
        assert!(matches!(
            c_optimal(&model, [1.0, 0.0]).unwrap(),
            CRule::Chebyshev { .. }
        ));
    }
}
