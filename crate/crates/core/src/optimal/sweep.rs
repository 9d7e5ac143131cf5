use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cheb::RemezOptions;
use crate::design::{design_estar, info_matrix};
use crate::error::Result;
use crate::linalg::dot;
use crate::model::ModelSpec;

/// One row of [`eig_ratio_sweep`]. Failed rows keep the error message.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub b: Vec<f64>,
    /// `lambda_2 / lambda_cstar`; the E candidate is optimal iff this is `>= 1`.
    pub ratio: Option<f64>,
    pub lambda_min: Option<f64>,
    pub error: Option<String>,
}

/// `(lambda_min, lambda_2 / lambda_cstar)` of the E candidate.
pub fn eig_ratio(model: &ModelSpec, opts: &RemezOptions) -> Result<(f64, f64)> {
    let cand = design_estar(model, opts)?;
    let m = info_matrix(model, &cand.design)?;
    let eig = m.eigen();
    let cs = &cand.chebyshev.coeffs;
    let lambda_cstar = m.bilinear(cs, cs) / dot(cs, cs);
    let lambda_2 = *eig.values.get(1).unwrap_or(&eig.values[0]);
    Ok((eig.values[0], lambda_2 / lambda_cstar))
}

/// [`eig_ratio`] for each nonlinear parameter vector, in parallel; rows come
/// back in input order.
pub fn eig_ratio_sweep(model: &ModelSpec, bs: &[Vec<f64>], opts: &RemezOptions) -> Vec<SweepRow> {
    bs.par_iter()
        .map(|b| match model.with_b(b.clone()).and_then(|m| eig_ratio(&m, opts)) {
            Ok((lambda_min, ratio)) => SweepRow {
                b: b.clone(),
                ratio: Some(ratio),
                lambda_min: Some(lambda_min),
                error: None,
            },
            Err(e) => SweepRow {
                b: b.clone(),
                ratio: None,
                lambda_min: None,
                error: Some(e.to_string()),
            },
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Interval;

    #[test]
    fn failed_rows_are_kept_in_order() {
        let iv = Interval::new(-1.0, 1.0).unwrap();
        let model = ModelSpec::rational(1, vec![2.0], iv).unwrap();
        let rows = eig_ratio_sweep(&model, &[vec![2.0], vec![0.5], vec![3.0]], &RemezOptions::default());
        assert_eq!(rows.len(), 3);
        assert!(rows[0].ratio.unwrap() >= 1.0);
        assert!(rows[1].error.is_some());
        assert_eq!(rows[2].b, vec![3.0]);
    }
}
