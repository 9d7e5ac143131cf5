//! Empirical checks of the Chebyshev-system property and the
//! Cauchy-Vandermonde determinant.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::det;
use crate::model::FunctionSystem;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    /// Every sampled determinant is non-zero with one common sign.
    Strict,
    /// The common sign holds but some determinants vanish numerically.
    Weak,
    /// Determinants of both signs occur.
    Violated,
}

/// Result of [`is_chebyshev_system`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChebyshevCheck {
    pub verdict: Verdict,
    /// Common sign of the determinants (0 when violated or all vanish).
    pub sign: i8,
    /// Smallest `|det| / prod ||f(t_j)||` over the samples.
    pub min_relative_det: f64,
    /// Tuples with determinants of opposite sign, when violated.
    pub witness: Option<(Vec<f64>, Vec<f64>)>,
}

/// Threshold on `|det| / prod ||f(t_j)||` below which a determinant counts as zero.
pub const ZERO_DET: f64 = 1e-13;

/// Sample `trials` ordered tuples `t_1 < ... < t_m` (uniform in the unit
/// coordinate) and classify the signs of `det (f_i(t_j))`.
pub fn is_chebyshev_system<S: FunctionSystem + ?Sized>(
    system: &S,
    trials: usize,
    seed: u64,
) -> Result<ChebyshevCheck> {
    let m = system.dim();
    let interval = system.interval();
    let umax = interval.unit_max();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut positive: Option<Vec<f64>> = None;
    let mut negative: Option<Vec<f64>> = None;
    let mut zeros = 0usize;
    let mut min_rel = f64::INFINITY;

    for _ in 0..trials {
        let mut u: Vec<f64> = (0..m).map(|_| rng.random::<f64>() * umax).collect();
        u.sort_by(f64::total_cmp);
        if u.windows(2).any(|w| w[0] == w[1]) {
            continue;
        }
        let t: Vec<f64> = u.iter().map(|&x| interval.from_unit(x)).collect();
        let mat = system.matrix_at(&t)?;
        let d = det(&mat);
        let scale: f64 = mat.column_iter().map(|c| c.norm()).product();
        let rel = if scale > 0.0 { d.abs() / scale } else { 0.0 };
        min_rel = min_rel.min(rel);
        if rel <= ZERO_DET {
            zeros += 1;
        } else if d > 0.0 {
            positive.get_or_insert(t);
        } else {
            negative.get_or_insert(t);
        }
    }

    let (verdict, sign, witness) = match (positive, negative) {
        (Some(p), Some(n)) => (Verdict::Violated, 0, Some((p, n))),
        (Some(_), None) => (if zeros > 0 { Verdict::Weak } else { Verdict::Strict }, 1, None),
        (None, Some(_)) => (if zeros > 0 { Verdict::Weak } else { Verdict::Strict }, -1, None),
        (None, None) => (Verdict::Weak, 0, None),
    };
    Ok(ChebyshevCheck {
        verdict,
        sign,
        min_relative_det: min_rel,
        witness,
    })
}

/// Determinant of the matrix whose first `s` rows are `t_j^(i-1)` and whose
/// remaining rows are `1 / (t_j - btilde_i)`:
///
/// ```text
/// (-1)^(s n) prod_{i<j} (t_j - t_i) prod_{i<j} (b_i - b_j)
///     / prod_{i,j} (t_j - b_i)
/// ```
///
/// with `n = btilde.len() = t.len() - s`.
pub fn cauchy_vandermonde_det(t: &[f64], btilde: &[f64], s: usize) -> Result<f64> {
    let m = t.len();
    let n = btilde.len();
    if n + s != m {
        return Err(Error::Parameter(format!(
            "need {} points for s = {s} and {n} poles, got {m}",
            n + s
        )));
    }
    let mut value = if (s * n) % 2 == 1 { -1.0 } else { 1.0 };
    for j in 0..m {
        for i in 0..j {
            value *= t[j] - t[i];
        }
    }
    for j in 0..n {
        for i in 0..j {
            value *= btilde[i] - btilde[j];
        }
    }
    for &tj in t {
        for &bi in btilde {
            if tj == bi {
                return Err(Error::Singular { t: tj });
            }
            value /= tj - bi;
        }
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{FnSystem, Interval};
    use nalgebra::DMatrix;

    fn direct(t: &[f64], b: &[f64], s: usize) -> f64 {
        let m = t.len();
        let mat = DMatrix::from_fn(m, m, |i, j| {
            if i < s {
                t[j].powi(i as i32)
            } else {
                1.0 / (t[j] - b[i - s])
            }
        });
        det(&mat)
    }

    #[test]
    fn cauchy_vandermonde_matches_direct_determinant() {
        let t = [0.1, 0.4, 0.9, 1.7, 2.2];
        let b = [-1.0, -0.3, 3.0, 5.5, -7.0];
        for s in 0..=5 {
            let n = 5 - s;
            let want = direct(&t, &b[..n], s);
            let got = cauchy_vandermonde_det(&t, &b[..n], s).unwrap();
            assert!((got - want).abs() <= 1e-10 * want.abs().max(1e-300), "s = {s}");
        }
    }

    #[test]
    fn monomials_are_strict() {
        let sys = FnSystem::monomials(3, Interval::new(-1.0, 1.0).unwrap());
        let check = is_chebyshev_system(&sys, 500, 7).unwrap();
        assert_eq!(check.verdict, Verdict::Strict);
        assert_eq!(check.sign, 1);
    }

    #[test]
    fn sine_and_cosine_on_long_interval_violate() {
        let sys = FnSystem::new(Interval::new(0.0, 10.0).unwrap())
            .with(f64::sin)
            .with(f64::cos);
        let check = is_chebyshev_system(&sys, 500, 7).unwrap();
        assert_eq!(check.verdict, Verdict::Violated);
        assert!(check.witness.is_some());
    }
}
