//! Chebyshev points of the rational model with a constant term on `[-1, 1]`
//! in closed form.
//!
//! For `f = (1, 1/(t-b_1), 1/(t-b_1)^2, ...)` with `|b_i| > 1` the interior
//! Chebyshev points are the zeros in `(-1, 1)` of
//!
//! ```text
//! sum_{i=0}^{4k} d_i U_{i-2k-1}(t)
//! ```
//!
//! where `U_n` are Chebyshev polynomials of the second kind (extended to
//! negative order by `U_{-1} = 0`, `U_{-n} = -U_{n-2}`), the `d_i` are the
//! coefficients of `prod_i (t - tau_i)^4` and `2 b_i = tau_i + 1/tau_i`.
//! The end points `-1` and `1` complete the set.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::bisect;

/// `U_n(t)` for any integer order.
pub fn cheb_u(n: i64, t: f64) -> f64 {
    match n {
        -1 => 0.0,
        n if n < -1 => -cheb_u(-n - 2, t),
        0 => 1.0,
        _ => {
            let (mut prev, mut cur) = (1.0, 2.0 * t);
            for _ in 1..n {
                let next = 2.0 * t * cur - prev;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

/// Which solution of `tau^2 - 2 b tau + 1 = 0` was used.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TauRoot {
    /// `|tau| < 1`
    Inner,
    /// `|tau| > 1`
    Outer,
}

/// Closed-form Chebyshev points together with the root choice that produced
/// them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormPoints {
    pub points: Vec<f64>,
    pub root: TauRoot,
}

/// Coefficients (ascending) of `prod (t - r)^4`.
fn quartic_product(roots: &[f64]) -> Vec<f64> {
    let mut coeffs = vec![1.0];
    for &r in roots {
        for _ in 0..4 {
            let mut next = vec![0.0; coeffs.len() + 1];
            for (i, &c) in coeffs.iter().enumerate() {
                next[i + 1] += c;
                next[i] -= r * c;
            }
            coeffs = next;
        }
    }
    coeffs
}

fn generator(d: &[f64], k: usize, t: f64) -> f64 {
    d.iter()
        .enumerate()
        .map(|(i, &di)| di * cheb_u(i as i64 - 2 * k as i64 - 1, t))
        .sum()
}

/// Sign-changing zeros of `g` in `(-1, 1)`. Zeros that land on a scan node
/// are kept.
fn interior_zeros(g: impl Fn(f64) -> f64, n: usize) -> Result<Vec<f64>> {
    let nodes: Vec<f64> = (1..n).map(|j| -1.0 + 2.0 * j as f64 / n as f64).collect();
    let vals: Vec<f64> = nodes.iter().map(|&t| g(t)).collect();
    let mut zeros = Vec::new();
    let mut j = 0;
    while j + 1 < nodes.len() {
        let (a, b) = (vals[j], vals[j + 1]);
        if a == 0.0 {
            let before = if j == 0 { g(-1.0 + 1e-3 / n as f64) } else { vals[j - 1] };
            if before * b < 0.0 {
                zeros.push(nodes[j]);
            }
            j += 1;
            continue;
        }
        if b != 0.0 && a * b < 0.0 {
            zeros.push(bisect(|t| Ok(g(t)), nodes[j], nodes[j + 1])?);
        }
        j += 1;
    }
    Ok(zeros)
}

/// Closed-form Chebyshev points for `s = 1` on `[-1, 1]`.
///
/// The root with `|tau| < 1` is tried first; if it does not give exactly
/// `2k - 1` simple interior zeros the reciprocal root is tried.
pub fn closed_form_points(b: &[f64]) -> Result<ClosedFormPoints> {
    let k = b.len();
    if k == 0 {
        return Err(Error::Parameter("need at least one nonlinear parameter".into()));
    }
    for (i, &bi) in b.iter().enumerate() {
        if !(bi.abs() > 1.0) || !bi.is_finite() {
            return Err(Error::Parameter(format!(
                "b_{} = {bi} must satisfy |b| > 1",
                i + 1
            )));
        }
        if b[..i].contains(&bi) {
            return Err(Error::Parameter("nonlinear parameters must be distinct".into()));
        }
    }
    let inner: Vec<f64> = b
        .iter()
        .map(|&bi| 1.0 / (bi + bi.signum() * (bi * bi - 1.0).sqrt()))
        .collect();
    let outer: Vec<f64> = inner.iter().map(|&t| 1.0 / t).collect();

    let mut counts = Vec::new();
    for (root, taus) in [(TauRoot::Inner, inner), (TauRoot::Outer, outer)] {
        let d = quartic_product(&taus);
        let zeros = interior_zeros(|t| generator(&d, k, t), 20_000)?;
        if zeros.len() == 2 * k - 1 {
            let mut points = Vec::with_capacity(2 * k + 1);
            points.push(-1.0);
            points.extend(zeros);
            points.push(1.0);
            return Ok(ClosedFormPoints { points, root });
        }
        counts.push(zeros.len());
    }
    Err(Error::ClosedForm(format!(
        "expected {} interior zeros, found {} (inner root) and {} (outer root)",
        2 * k - 1,
        counts[0],
        counts[1]
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn second_kind_values() {
        assert_eq!(cheb_u(0, 0.3), 1.0);
        assert_eq!(cheb_u(1, 0.3), 0.6);
        assert!((cheb_u(2, 0.3) - (4.0 * 0.09 - 1.0)).abs() < 1e-15);
        assert_eq!(cheb_u(-1, 0.3), 0.0);
        assert_eq!(cheb_u(-2, 0.3), -1.0);
        assert_eq!(cheb_u(-3, 0.3), -0.6);
        // U_n(cos x) = sin((n+1)x) / sin x
        let x = 0.7f64;
        for n in 0..10 {
            let exact = ((n + 1) as f64 * x).sin() / x.sin();
            assert!((cheb_u(n, x.cos()) - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn quartic_expansion() {
        assert_eq!(quartic_product(&[1.0]), vec![1.0, -4.0, 6.0, -4.0, 1.0]);
    }

    #[test]
    fn one_pole() {
        let p = closed_form_points(&[2.0]).unwrap();
        assert_eq!(p.points.len(), 3);
        assert_eq!(p.points[0], -1.0);
        assert_eq!(p.points[2], 1.0);
        assert!(p.points[1] > -1.0 && p.points[1] < 1.0);
    }

    #[test]
    fn zero_on_scan_node() {
        let p = closed_form_points(&[-2.0]).unwrap();
        assert!((p.points[1] + 0.5).abs() < 1e-12, "{:?}", p.points);
    }

    #[test]
    fn rejects_poles_in_interval() {
        assert!(closed_form_points(&[0.5]).is_err());
        assert!(closed_form_points(&[]).is_err());
        assert!(closed_form_points(&[2.0, 2.0]).is_err());
    }
}
