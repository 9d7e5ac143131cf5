use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::cheb::{remez, ChebyshevSolution, RemezOptions};
use crate::error::{Error, Result};
use crate::linalg::{dot, solve, SymMatrix};
use crate::model::{FunctionSystem, ModelSpec};

use super::Design;

/// Weights below this magnitude are treated as zero.
pub const WEIGHT_CLAMP: f64 = 1e-12;

/// Which information matrix of a model to form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InfoMode {
    /// `M(xi, b)` of the linearized system.
    #[default]
    Linearized,
    /// `K_a^{-1} M(xi, b) K_a^{-1}` of the nonlinear model.
    Nonlinear,
}

/// `sum_j w_j f(t_j) f(t_j)^T`
pub fn info_matrix<S: FunctionSystem + ?Sized>(system: &S, design: &Design) -> Result<SymMatrix> {
    let m = system.dim();
    let mut out = SymMatrix::zeros(m);
    let mut f = vec![0.0; m];
    for (t, w) in design.iter() {
        system.eval_into(t, &mut f)?;
        out.add_outer(w, &f);
    }
    Ok(out)
}

/// Information matrix of a model in either parameterization.
pub fn model_info_matrix(model: &ModelSpec, design: &Design, mode: InfoMode) -> Result<SymMatrix> {
    let lin = info_matrix(model, design)?;
    match mode {
        InfoMode::Linearized => Ok(lin),
        InfoMode::Nonlinear => {
            let scale: Vec<f64> = model.ka_inverse()?.diagonal().iter().copied().collect();
            Ok(lin.conjugate_diag(&scale))
        }
    }
}

/// How [`cheb_weights`] turns `F^{-1} c` into weights.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightMode {
    /// `w = J F^{-1} c / ||c||^2` for the Chebyshev coefficient vector.
    Estar,
    /// `w_i = |e_i^T J F^{-1} c| / sum_j |e_j^T J F^{-1} c|`.
    General,
}

/// Weights of the design on the Chebyshev points, `F = (f_i(s_j))`.
///
/// `J = diag(-1, 1, -1, ...)`. In [`WeightMode::Estar`] negative weights
/// larger than `1e-12` in magnitude are an error, smaller ones are set to 0.
pub fn cheb_weights(f: &DMatrix<f64>, c: &[f64], mode: WeightMode) -> Result<Vec<f64>> {
    let m = f.nrows();
    if !f.is_square() || c.len() != m {
        return Err(Error::Parameter(format!(
            "F is {}x{} but c has length {}",
            f.nrows(),
            f.ncols(),
            c.len()
        )));
    }
    let y = solve(f, c).map_err(|_| Error::ChebyshevViolation("F is singular".into()))?;
    let jy: Vec<f64> = y
        .iter()
        .enumerate()
        .map(|(i, v)| if i % 2 == 0 { -v } else { *v })
        .collect();
    match mode {
        WeightMode::Estar => {
            let norm_sq = dot(c, c);
            if norm_sq == 0.0 {
                return Err(Error::Parameter("c must be non-zero".into()));
            }
            jy.iter()
                .enumerate()
                .map(|(index, v)| {
                    let w = v / norm_sq;
                    if w < -WEIGHT_CLAMP {
                        Err(Error::NegativeWeight { index, weight: w })
                    } else {
                        Ok(w.max(0.0))
                    }
                })
                .collect()
        }
        WeightMode::General => {
            let abs: Vec<f64> = jy.iter().map(|v| v.abs()).collect();
            let total: f64 = abs.iter().sum();
            if total == 0.0 {
                return Err(Error::Parameter("c must be non-zero".into()));
            }
            Ok(abs
                .iter()
                .map(|v| {
                    let w = v / total;
                    if w < WEIGHT_CLAMP {
                        0.0
                    } else {
                        w
                    }
                })
                .collect())
        }
    }
}

/// A design on the Chebyshev points together with the Chebyshev solution and
/// the full weight vector (zeros included, in the order of the points).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChebyshevDesign {
    pub design: Design,
    pub chebyshev: ChebyshevSolution,
    pub weights: Vec<f64>,
}

impl ChebyshevDesign {
    /// `sum_j f(s_j) (-1)^j w_j`, which equals `c* / ||c*||^2` for the E
    /// candidate.
    pub fn elfving_vector<S: FunctionSystem + ?Sized>(&self, system: &S) -> Result<Vec<f64>> {
        let m = system.dim();
        let mut out = vec![0.0; m];
        for (j, (&t, &w)) in self.chebyshev.points.iter().zip(&self.weights).enumerate() {
            let f = system.eval(t)?;
            let sign = if j % 2 == 0 { -1.0 } else { 1.0 };
            for i in 0..m {
                out[i] += sign * w * f[i];
            }
        }
        Ok(out)
    }
}

fn assemble(chebyshev: ChebyshevSolution, weights: Vec<f64>) -> Result<ChebyshevDesign> {
    let design = Design::normalized(&chebyshev.points, &weights)?;
    Ok(ChebyshevDesign {
        design,
        chebyshev,
        weights,
    })
}

/// The `c*`-optimal design on the Chebyshev points, the E-optimal candidate.
pub fn design_estar<S: FunctionSystem + ?Sized>(
    system: &S,
    opts: &RemezOptions,
) -> Result<ChebyshevDesign> {
    let chebyshev = remez(system, opts)?;
    estar_from(system, chebyshev)
}

/// [`design_estar`] for a known Chebyshev solution.
pub fn estar_from<S: FunctionSystem + ?Sized>(
    system: &S,
    chebyshev: ChebyshevSolution,
) -> Result<ChebyshevDesign> {
    let f = chebyshev.point_matrix(system)?;
    let weights = cheb_weights(&f, &chebyshev.coeffs, WeightMode::Estar)?;
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-8 {
        return Err(Error::Design(format!(
            "Elfving weights sum to {total}; the Chebyshev solution is inaccurate"
        )));
    }
    assemble(chebyshev, weights)
}

/// The candidate c-optimal design on the Chebyshev points. Points with zero
/// weight are dropped from [`ChebyshevDesign::design`].
pub fn design_c<S: FunctionSystem + ?Sized>(
    system: &S,
    c: &[f64],
    opts: &RemezOptions,
) -> Result<ChebyshevDesign> {
    let chebyshev = remez(system, opts)?;
    c_from(system, chebyshev, c)
}

/// [`design_c`] for a known Chebyshev solution.
pub fn c_from<S: FunctionSystem + ?Sized>(
    system: &S,
    chebyshev: ChebyshevSolution,
    c: &[f64],
) -> Result<ChebyshevDesign> {
    if c.iter().all(|&v| v == 0.0) {
        return Err(Error::Parameter("c must be non-zero".into()));
    }
    let f = chebyshev.point_matrix(system)?;
    let weights = cheb_weights(&f, c, WeightMode::General)?;
    assemble(chebyshev, weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{FnSystem, Interval};

    fn linear() -> FnSystem {
        FnSystem::monomials(1, Interval::new(-1.0, 1.0).unwrap())
    }

    #[test]
    fn info_matrix_examples() {
        let sys = linear();
        let m = info_matrix(&sys, &Design::one_point(1.0).unwrap()).unwrap();
        assert_eq!(m.as_matrix(), &DMatrix::from_element(2, 2, 1.0));
        let m = info_matrix(&sys, &Design::uniform(&[-1.0, 1.0]).unwrap()).unwrap();
        assert_eq!(m.as_matrix(), &DMatrix::identity(2, 2));
    }

    #[test]
    fn info_matrix_outside_interval() {
        let sys = linear();
        let res = info_matrix(&sys, &Design::one_point(2.0).unwrap());
        assert!(matches!(res, Err(Error::Domain { .. })));
    }

    #[test]
    fn weights_for_linear_system() {
        let f = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, -1.0, 1.0]);
        let w = cheb_weights(&f, &[0.0, 1.0], WeightMode::Estar).unwrap();
        assert_eq!(w, vec![0.5, 0.5]);
        let w = cheb_weights(&f, &[0.0, 1.0], WeightMode::General).unwrap();
        assert_eq!(w, vec![0.5, 0.5]);
    }

    #[test]
    fn negative_estar_weight_is_an_error() {
        let f = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, -1.0, 1.0]);
        let res = cheb_weights(&f, &[1.0, 0.0], WeightMode::Estar);
        assert!(matches!(res, Err(Error::NegativeWeight { index: 0, .. })));
    }

    #[test]
    fn estar_for_linear_system() {
        let sys = linear();
        let d = design_estar(&sys, &RemezOptions::default()).unwrap();
        assert_eq!(d.design.support(), &[-1.0, 1.0]);
        assert!((d.design.weights()[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn nonlinear_mode_conjugates() {
        let iv = Interval::semi_infinite(0.0).unwrap();
        let model = ModelSpec::rational(0, vec![-1.0], iv).unwrap().with_a(vec![2.0]).unwrap();
        let d = Design::uniform(&[0.0, 1.0]).unwrap();
        let lin = model_info_matrix(&model, &d, InfoMode::Linearized).unwrap();
        let non = model_info_matrix(&model, &d, InfoMode::Nonlinear).unwrap();
        assert_eq!(non.get(0, 0), lin.get(0, 0));
        assert_eq!(non.get(0, 1), 2.0 * lin.get(0, 1));
        assert_eq!(non.get(1, 1), 4.0 * lin.get(1, 1));
    }
}
