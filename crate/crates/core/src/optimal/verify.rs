use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::cheb::{remez, ChebyshevSolution, RemezOptions};
use crate::design::{c_from, info_matrix, Design};
use crate::error::{Error, Result};
use crate::linalg::{dot, SymMatrix};
use crate::model::FunctionSystem;

use super::oracle::{brute_force_c, OracleOptions};
use super::report::{
    Criterion, Optimality, VerificationReport, VerifyOptions, ESTIMABILITY_TOL, MULTIPLICITY_TOL,
};

/// `sup_t g(f(t))` over the verification grid and the support points.
fn sup_over<S, G>(system: &S, design: &Design, grid_size: usize, g: G) -> Result<(f64, f64)>
where
    S: FunctionSystem + ?Sized,
    G: Fn(&[f64]) -> f64,
{
    let mut f = vec![0.0; system.dim()];
    let mut best = (f64::NEG_INFINITY, f64::NAN);
    let grid = system.interval().grid(grid_size);
    for t in grid.into_iter().chain(design.support().iter().copied()) {
        system.eval_into(t, &mut f)?;
        let v = g(&f);
        if v > best.0 {
            best = (v, t);
        }
    }
    Ok(best)
}

fn nonsingular(m: &SymMatrix) -> Result<(Vec<f64>, nalgebra::DMatrix<f64>)> {
    let eig = m.eigen();
    let lmax = eig.values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if eig.values[0] <= crate::linalg::PINV_CUTOFF * lmax {
        return Err(Error::RankDeficient {
            rank: m.rank(),
            order: m.order(),
        });
    }
    Ok((eig.values, eig.vectors))
}

fn multiplicity(values: &[f64]) -> usize {
    let lmin = values[0];
    values
        .iter()
        .filter(|&&v| (v - lmin).abs() <= MULTIPLICITY_TOL * lmin.abs().max(1.0))
        .count()
}

/// Check E-optimality of `design`, computing the Chebyshev polynomial first.
pub fn verify_e<S: FunctionSystem + ?Sized>(
    system: &S,
    design: &Design,
    opts: &VerifyOptions,
) -> Result<VerificationReport> {
    let cheb = remez(system, &RemezOptions::default())?;
    verify_e_with(system, design, &cheb, opts)
}

/// Check E-optimality of `design` by the equivalence theorem.
///
/// The certificate direction is `c*` when it is an eigenvector of `M` for the
/// smallest eigenvalue (this certifies optimality for any multiplicity);
/// otherwise the eigenvector of a simple smallest eigenvalue. With a multiple
/// smallest eigenvalue and no `c*` certificate the verdict is inconclusive.
pub fn verify_e_with<S: FunctionSystem + ?Sized>(
    system: &S,
    design: &Design,
    cheb: &ChebyshevSolution,
    opts: &VerifyOptions,
) -> Result<VerificationReport> {
    let m = info_matrix(system, design)?;
    let (values, vectors) = nonsingular(&m)?;
    let lambda_min = values[0];
    let lambda_2 = *values.get(1).unwrap_or(&lambda_min);
    let mult = multiplicity(&values);

    let cs = &cheb.coeffs;
    let cs_norm_sq = dot(cs, cs);
    let mc = m.mul_vec(cs);
    let lambda_cstar = dot(cs, &mc) / cs_norm_sq;
    let resid: f64 = mc
        .iter()
        .zip(cs)
        .map(|(a, c)| (a - lambda_cstar * c).powi(2))
        .sum::<f64>()
        .sqrt();
    let scale = m.as_matrix().norm() * cs_norm_sq.sqrt();
    let cstar_is_min_eigvec = resid <= 1e-8 * scale
        && lambda_cstar <= lambda_min + MULTIPLICITY_TOL * lambda_min.abs().max(1.0);

    let (z, note) = if cstar_is_min_eigvec {
        let n = cs_norm_sq.sqrt();
        (cs.iter().map(|c| c / n).collect::<Vec<_>>(), "c* certificate")
    } else if mult == 1 {
        (
            vectors.column(0).iter().copied().collect(),
            "simple smallest eigenvalue",
        )
    } else {
        return Ok(VerificationReport {
            criterion: Criterion::E,
            verdict: Optimality::Inconclusive,
            lambda_min,
            lambda_2,
            lambda_cstar: Some(lambda_cstar),
            max_violation: f64::NAN,
            argmax_point: f64::NAN,
            multiplicity: mult,
            note: "multiple smallest eigenvalue without a c* certificate".into(),
        });
    };

    let (sup, argmax) = sup_over(system, design, opts.grid_size, |f| {
        dot(&z, f).powi(2) / lambda_min
    })?;
    let max_violation = sup - 1.0;
    let ordered = lambda_cstar <= lambda_2 * (1.0 + opts.tol);
    let verdict = if max_violation <= opts.tol && ordered {
        Optimality::Optimal
    } else {
        Optimality::NotOptimal
    };
    Ok(VerificationReport {
        criterion: Criterion::E,
        verdict,
        lambda_min,
        lambda_2,
        lambda_cstar: Some(lambda_cstar),
        max_violation,
        argmax_point: argmax,
        multiplicity: mult,
        note: note.into(),
    })
}

/// `M^- c` after checking that `c` is estimable. A nonsingular `M` is
/// inverted directly; otherwise the pseudo-inverse is used and `c` must lie
/// in the range of `M`.
fn estimable_direction(m: &SymMatrix, c: &[f64]) -> Result<Vec<f64>> {
    let eig = m.eigen();
    let lmax = eig.values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if eig.values[0] > crate::linalg::PINV_CUTOFF * lmax {
        return crate::linalg::solve(m.as_matrix(), c);
    }
    let pinv = m.pinv();
    let v = (&pinv * DVector::from_column_slice(c)).as_slice().to_vec();
    let back = m.mul_vec(&v);
    let residual = back
        .iter()
        .zip(c)
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        .sqrt();
    let norm = dot(c, c).sqrt();
    if residual > ESTIMABILITY_TOL * norm {
        return Err(Error::NotEstimable {
            residual: residual / norm,
        });
    }
    Ok(v)
}

/// `c^T M^-(xi) c`, failing when `c` is not estimable.
pub fn c_criterion<S: FunctionSystem + ?Sized>(system: &S, design: &Design, c: &[f64]) -> Result<f64> {
    let m = info_matrix(system, design)?;
    let v = estimable_direction(&m, c)?;
    Ok(dot(c, &v))
}

/// Points added to the minimax problem before the first solve.
const KERNEL_SEED_POINTS: usize = 200;
const KERNEL_ROUNDS: usize = 60;

/// Among the vectors `M^- c = M^+ c + n`, `n` in the kernel of a singular `M`,
/// one minimising `sup_t |f(t)^T M^- c|`, by cutting planes over a linear
/// program in `n`.
fn kernel_adjusted<S: FunctionSystem + ?Sized>(
    system: &S,
    design: &Design,
    m: &SymMatrix,
    v: Vec<f64>,
    grid_size: usize,
) -> Result<Vec<f64>> {
    use microlp::{ComparisonOp, OptimizationDirection, Problem};

    let eig = m.eigen();
    let lmax = eig.values.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let kernel: Vec<Vec<f64>> = (0..eig.values.len())
        .filter(|&k| eig.values[k].abs() <= crate::linalg::PINV_CUTOFF * lmax)
        .map(|k| eig.vector(k))
        .collect();
    if kernel.is_empty() {
        return Ok(v);
    }
    let interval = system.interval();
    let mut rows = Vec::new();
    for t in interval.grid(KERNEL_SEED_POINTS).into_iter().chain(design.support().iter().copied()) {
        rows.push(system.eval(t)?);
    }
    let mut best = v.clone();
    for _ in 0..KERNEL_ROUNDS {
        let mut lp = Problem::new(OptimizationDirection::Minimize);
        let z: Vec<_> = kernel
            .iter()
            .map(|_| lp.add_var(0.0, (f64::NEG_INFINITY, f64::INFINITY)))
            .collect();
        let tau = lp.add_var(1.0, (0.0, f64::INFINITY));
        for f in &rows {
            let a: Vec<f64> = kernel.iter().map(|n| dot(f, n)).collect();
            let b = dot(f, &v);
            let mut upper: Vec<_> = z.iter().zip(&a).map(|(&zi, &ai)| (zi, ai)).collect();
            upper.push((tau, -1.0));
            lp.add_constraint(upper.as_slice(), ComparisonOp::Le, -b);
            let mut lower: Vec<_> = z.iter().zip(&a).map(|(&zi, &ai)| (zi, -ai)).collect();
            lower.push((tau, -1.0));
            lp.add_constraint(lower.as_slice(), ComparisonOp::Le, b);
        }
        let Some(sol) = lp.solve().ok().and_then(|o| o.solution().cloned()) else {
            return Ok(best);
        };
        let mut cand = v.clone();
        for (n, &zi) in kernel.iter().zip(&z) {
            for (c, x) in cand.iter_mut().zip(n) {
                *c += sol.var_value(zi) * x;
            }
        }
        best = cand;
        let (sup, argmax) = sup_over(system, design, grid_size, |f| dot(f, &best).abs())?;
        if sup <= sol.objective() * (1.0 + 1e-12) + 1e-300 {
            break;
        }
        rows.push(system.eval(argmax)?);
    }
    Ok(best)
}

/// Check c-optimality: `(f(t)^T M^- c)^2 <= c^T M^- c` for all `t`, with the
/// generalized inverse chosen in the kernel of a singular `M`.
pub fn verify_c<S: FunctionSystem + ?Sized>(
    system: &S,
    design: &Design,
    c: &[f64],
    opts: &VerifyOptions,
) -> Result<VerificationReport> {
    if c.len() != system.dim() || c.iter().all(|&v| v == 0.0) {
        return Err(Error::Parameter("c must be a non-zero vector of length m".into()));
    }
    let m = info_matrix(system, design)?;
    let v = estimable_direction(&m, c)?;
    let q = dot(c, &v);
    let v = kernel_adjusted(system, design, &m, v, opts.grid_size)?;
    let eig = m.eigen();
    let lambda_min = eig.values[0];
    let lambda_2 = *eig.values.get(1).unwrap_or(&lambda_min);
    let (sup, argmax) = sup_over(system, design, opts.grid_size, |f| dot(f, &v).powi(2) / q)?;
    let max_violation = sup - 1.0;
    Ok(VerificationReport {
        criterion: Criterion::C,
        verdict: if max_violation <= opts.tol {
            Optimality::Optimal
        } else {
            Optimality::NotOptimal
        },
        lambda_min,
        lambda_2,
        lambda_cstar: None,
        max_violation,
        argmax_point: argmax,
        multiplicity: multiplicity(&eig.values),
        note: String::new(),
    })
}

/// Where the optimal value of a c-criterion came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReferenceSource {
    /// The weighted Chebyshev points passed the equivalence check.
    Chebyshev,
    /// Computed by [`brute_force_c`].
    Oracle,
}

/// The c-optimal design and its criterion value `c^T M^-(xi_c) c`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CReference {
    pub value: f64,
    pub design: Design,
    pub source: ReferenceSource,
}

/// The c-optimal reference: the Chebyshev candidate if it verifies, the
/// oracle otherwise.
pub fn c_reference<S: FunctionSystem + ?Sized>(
    system: &S,
    c: &[f64],
    cheb: &ChebyshevSolution,
    opts: &VerifyOptions,
) -> Result<CReference> {
    if let Ok(cand) = c_from(system, cheb.clone(), c) {
        if let Ok(report) = verify_c(system, &cand.design, c, opts) {
            if report.is_optimal() {
                let value = c_criterion(system, &cand.design, c)?;
                return Ok(CReference {
                    value,
                    design: cand.design,
                    source: ReferenceSource::Chebyshev,
                });
            }
        }
    }
    let oracle = brute_force_c(system, c, &OracleOptions::default())?;
    Ok(CReference {
        value: oracle.value,
        design: oracle.design,
        source: ReferenceSource::Oracle,
    })
}

/// `e_i^T M^{-1}(xi_{e_i}) e_i / e_i^T M^{-1}(xi) e_i` for a zero based `i`.
pub fn efficiency<S: FunctionSystem + ?Sized>(
    system: &S,
    design: &Design,
    i: usize,
    opts: &VerifyOptions,
) -> Result<f64> {
    let cheb = remez(system, &RemezOptions::default())?;
    let reference = unit_reference(system, i, &cheb, opts)?;
    efficiency_against(system, design, i, reference.value)
}

fn unit_reference<S: FunctionSystem + ?Sized>(
    system: &S,
    i: usize,
    cheb: &ChebyshevSolution,
    opts: &VerifyOptions,
) -> Result<CReference> {
    let m = system.dim();
    if i >= m {
        return Err(Error::Parameter(format!("coordinate {i} out of range for m = {m}")));
    }
    let mut e = vec![0.0; m];
    e[i] = 1.0;
    c_reference(system, &e, cheb, opts)
}

fn efficiency_against<S: FunctionSystem + ?Sized>(
    system: &S,
    design: &Design,
    i: usize,
    reference: f64,
) -> Result<f64> {
    let mut e = vec![0.0; system.dim()];
    e[i] = 1.0;
    Ok(reference / c_criterion(system, design, &e)?)
}

/// The efficiencies for all coordinates, sharing one Chebyshev solution.
pub fn efficiencies<S: FunctionSystem + ?Sized>(
    system: &S,
    design: &Design,
    cheb: &ChebyshevSolution,
    opts: &VerifyOptions,
) -> Result<Vec<f64>> {
    (0..system.dim())
        .map(|i| {
            let r = unit_reference(system, i, cheb, opts)?;
            efficiency_against(system, design, i, r.value)
        })
        .collect()
}

/// The e_i-optimal reference designs for all coordinates.
pub fn unit_references<S: FunctionSystem + ?Sized>(
    system: &S,
    cheb: &ChebyshevSolution,
    opts: &VerifyOptions,
) -> Result<Vec<CReference>> {
    (0..system.dim())
        .map(|i| unit_reference(system, i, cheb, opts))
        .collect()
}

/// Efficiencies of `design` against precomputed references.
pub fn efficiencies_against<S: FunctionSystem + ?Sized>(
    system: &S,
    design: &Design,
    references: &[CReference],
) -> Result<Vec<f64>> {
    references
        .iter()
        .enumerate()
        .map(|(i, r)| efficiency_against(system, design, i, r.value))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{FnSystem, Interval};

    #[test]
    fn linear_system_uniform_design_is_e_optimal() {
        let sys = FnSystem::monomials(1, Interval::new(-1.0, 1.0).unwrap());
        let d = Design::uniform(&[-1.0, 1.0]).unwrap();
        let r = verify_e(&sys, &d, &VerifyOptions::default()).unwrap();
        assert_eq!(r.verdict, Optimality::Optimal);
        assert!((r.lambda_min - 1.0).abs() < 1e-14);
        assert_eq!(r.multiplicity, 2);
    }

    #[test]
    fn skewed_design_is_not_e_optimal() {
        let sys = FnSystem::monomials(1, Interval::new(-1.0, 1.0).unwrap());
        let d = Design::new(vec![-1.0, 0.5], vec![0.3, 0.7]).unwrap();
        let r = verify_e(&sys, &d, &VerifyOptions::default()).unwrap();
        assert_eq!(r.verdict, Optimality::NotOptimal);
    }

    #[test]
    fn singular_design_is_rejected() {
        let sys = FnSystem::monomials(1, Interval::new(-1.0, 1.0).unwrap());
        let d = Design::one_point(0.5).unwrap();
        assert!(matches!(
            verify_e(&sys, &d, &VerifyOptions::default()),
            Err(Error::RankDeficient { .. })
        ));
    }

    #[test]
    fn c_verification_with_singular_matrix() {
        let sys = FnSystem::monomials(1, Interval::new(-1.0, 1.0).unwrap());
        // intercept from a one-point design at 0
        let d = Design::one_point(0.0).unwrap();
        let r = verify_c(&sys, &d, &[1.0, 0.0], &VerifyOptions::default()).unwrap();
        assert!(r.is_optimal());
        assert!(matches!(
            verify_c(&sys, &d, &[0.0, 1.0], &VerifyOptions::default()),
            Err(Error::NotEstimable { .. })
        ));
    }

    #[test]
    fn self_efficiency_is_one() {
        let sys = FnSystem::monomials(2, Interval::new(-1.0, 1.0).unwrap());
        let cheb = remez(&sys, &RemezOptions::default()).unwrap();
        let opts = VerifyOptions::default();
        for i in 0..3 {
            let r = unit_reference(&sys, i, &cheb, &opts).unwrap();
            let e = efficiency_against(&sys, &r.design, i, r.value).unwrap();
            assert!((e - 1.0).abs() < 1e-12);
        }
    }
}
