//! Remez exchange for the Chebyshev polynomial of a Chebyshev system.
//!
//! The last function is approximated by the span of the others in the sup
//! norm, after orthonormalising the basis on the scan grid. On the final reference the error `f_m - sum a_i f_i` equioscillates
//! at `m` points; dividing it by its sup norm gives `c*^T f` with
//! `|c*^T f| <= 1` and `c*^T f(s_i) = (-1)^i`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, solve};
use crate::model::{FunctionSystem, Interval};
use crate::scalar::maximize;

/// Tuning knobs of [`remez`].
#[derive(Clone, Debug)]
pub struct RemezOptions {
    /// Points of the extremum scan (equispaced in the unit coordinate).
    pub grid_size: usize,
    pub max_iter: usize,
    /// Convergence tolerance on the movement of the reference (unit coordinate).
    pub tol: f64,
    /// Starting reference in `t`; Chebyshev-Lobatto nodes in the unit
    /// coordinate when absent.
    pub initial: Option<Vec<f64>>,
}

impl Default for RemezOptions {
    fn default() -> Self {
        Self {
            grid_size: 20_000,
            max_iter: 100,
            tol: 1e-12,
            initial: None,
        }
    }
}

impl RemezOptions {
    pub fn with_initial(mut self, reference: Vec<f64>) -> Self {
        self.initial = Some(reference);
        self
    }

    pub fn with_grid_size(mut self, n: usize) -> Self {
        self.grid_size = n;
        self
    }
}

/// The Chebyshev polynomial `c*^T f` and its extremal points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChebyshevSolution {
    /// Coefficient vector `c*`.
    pub coeffs: Vec<f64>,
    /// Chebyshev points `s_1 < ... < s_m`; `c*^T f(s_1) = -1`.
    pub points: Vec<f64>,
    /// Largest deviation of `|c*^T f(s_i)|` from one, or of the grid sup norm
    /// above one.
    pub residual: f64,
    pub iterations: usize,
}

impl ChebyshevSolution {
    /// `c*^T f(t)`
    pub fn value<S: FunctionSystem + ?Sized>(&self, system: &S, t: f64) -> Result<f64> {
        let f = system.eval(t)?;
        Ok(dot(&self.coeffs, &f))
    }

    /// `||c*||^2`
    pub fn norm_sq(&self) -> f64 {
        dot(&self.coeffs, &self.coeffs)
    }

    /// The matrix `F = (f_i(s_j))`.
    pub fn point_matrix<S: FunctionSystem + ?Sized>(&self, system: &S) -> Result<DMatrix<f64>> {
        system.matrix_at(&self.points)
    }
}

/// Basis `g = R^{-T} f` orthonormal on the scan grid, where `A = QR` for the
/// grid matrix `A`. `R` is triangular, so `g_1, ..., g_i` span the same space as
/// `f_1, ..., f_i`.
struct Whitening {
    r_inv: DMatrix<f64>,
}

impl Whitening {
    fn new(grid: DMatrix<f64>) -> Self {
        let m = grid.ncols();
        let r = grid.qr().r();
        let ok = (0..m).all(|i| r[(i, i)].abs() > 1e-14 * r[(0, 0)].abs());
        let r_inv = r
            .try_inverse()
            .filter(|_| ok)
            .unwrap_or_else(|| DMatrix::identity(m, m));
        Self { r_inv }
    }

    fn apply(&self, f: &[f64]) -> Vec<f64> {
        let m = f.len();
        (0..m)
            .map(|i| (0..=i).map(|k| self.r_inv[(k, i)] * f[k]).sum())
            .collect()
    }

    /// Coefficients on `f` of the combination with coefficients `d` on `g`.
    fn coeffs(&self, d: &[f64]) -> Vec<f64> {
        let m = d.len();
        (0..m)
            .map(|k| (k..m).map(|i| self.r_inv[(k, i)] * d[i]).sum())
            .collect()
    }
}

/// Whitened basis values on the scan grid, row major.
struct Scan {
    u: Vec<f64>,
    values: Vec<f64>,
    m: usize,
    whitening: Whitening,
}

impl Scan {
    fn new<S: FunctionSystem + ?Sized>(system: &S, n: usize) -> Result<Self> {
        let interval = system.interval();
        let m = system.dim();
        let u = interval.unit_grid(n);
        let mut values = vec![0.0; u.len() * m];
        for (j, &uj) in u.iter().enumerate() {
            system.eval_into(interval.from_unit(uj), &mut values[j * m..(j + 1) * m])?;
        }
        let whitening = Whitening::new(DMatrix::from_row_slice(u.len(), m, &values));
        for row in values.chunks_mut(m) {
            let g = whitening.apply(row);
            row.copy_from_slice(&g);
        }
        Ok(Self {
            u,
            values,
            m,
            whitening,
        })
    }

    fn eval<S: FunctionSystem + ?Sized>(&self, system: &S, t: f64) -> Result<Vec<f64>> {
        Ok(self.whitening.apply(&system.eval(t)?))
    }

    fn row(&self, j: usize) -> &[f64] {
        &self.values[j * self.m..(j + 1) * self.m]
    }
}

/// The error function `g_m - sum_{i<m} a_i g_i` in the unit coordinate.
struct ErrorFn<'a, S: ?Sized> {
    system: &'a S,
    scan: &'a Scan,
    interval: Interval,
    a: Vec<f64>,
}

impl<S: FunctionSystem + ?Sized> ErrorFn<'_, S> {
    fn of_row(&self, f: &[f64]) -> f64 {
        let m = f.len();
        f[m - 1] - dot(&self.a, &f[..m - 1])
    }

    fn at_unit(&self, u: f64) -> Result<f64> {
        let g = self.scan.eval(self.system, self.interval.from_unit(u))?;
        Ok(self.of_row(&g))
    }
}

#[derive(Clone, Copy, Debug)]
struct Extremum {
    u: f64,
    e: f64,
}

fn default_reference(interval: &Interval, m: usize) -> Vec<f64> {
    use std::f64::consts::PI;
    if m == 1 {
        return vec![0.0];
    }
    if interval.is_bounded() {
        (0..m)
            .map(|j| 0.5 * (1.0 - (PI * j as f64 / (m - 1) as f64).cos()))
            .collect()
    } else {
        (0..m)
            .map(|j| 0.5 * (1.0 - (PI * j as f64 / m as f64).cos()))
            .collect()
    }
}

/// Compute the Chebyshev polynomial of `system` by the Remez exchange.
///
/// When the system offers a better conditioned basis of its span, the points
/// are computed there and `c*` is recovered from `c*^T f(s_j) = (-1)^(j+1)`.
/// Each iteration solves `sum_{i<m} a_i f_i(s_j) + (-1)^j h = f_m(s_j)` on the
/// current reference, scans the error on the grid, polishes every local
/// extremum and exchanges the whole reference for `m` alternating extrema
/// that include the global one.
pub fn remez<S: FunctionSystem + ?Sized>(
    system: &S,
    opts: &RemezOptions,
) -> Result<ChebyshevSolution> {
    let Some(span) = system.span_basis() else {
        return exchange_loop(system, opts);
    };
    let sol = exchange_loop(&span, opts)?;
    let f = system.matrix_at(&sol.points)?;
    let signs: Vec<f64> = (0..sol.points.len())
        .map(|j| if j % 2 == 0 { -1.0 } else { 1.0 })
        .collect();
    let coeffs = solve(&f.transpose(), &signs)?;
    Ok(ChebyshevSolution { coeffs, ..sol })
}

fn exchange_loop<S: FunctionSystem + ?Sized>(
    system: &S,
    opts: &RemezOptions,
) -> Result<ChebyshevSolution> {
    let m = system.dim();
    if m == 0 {
        return Err(Error::Parameter("empty function system".into()));
    }
    let interval = system.interval();
    let umax = interval.unit_max();
    let scan = Scan::new(system, opts.grid_size)?;

    let mut reference = match &opts.initial {
        Some(init) => {
            if init.len() != m {
                return Err(Error::Parameter(format!(
                    "initial reference needs {m} points, got {}",
                    init.len()
                )));
            }
            let u: Vec<f64> = init.iter().map(|&t| interval.to_unit(t)).collect();
            if u.windows(2).any(|w| w[0] >= w[1]) || init.iter().any(|&t| !interval.contains(t)) {
                return Err(Error::Parameter(
                    "initial reference must be strictly increasing inside the interval".into(),
                ));
            }
            u
        }
        None => default_reference(&interval, m),
    };

    let mut last_gap = f64::INFINITY;
    // best levelled reference so far and the number of iterations since
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut since_best = 0usize;
    for iter in 1..=opts.max_iter {
        let err = level(system, &scan, &interval, &reference)?;
        let extrema = exchange(&scan, &err, &reference, umax, m)?;
        let emax = extrema.iter().fold(0.0f64, |a, x| a.max(x.e.abs()));
        let emin = extrema.iter().fold(f64::INFINITY, |a, x| a.min(x.e.abs()));
        let new_ref: Vec<f64> = extrema.iter().map(|x| x.u).collect();
        let movement = new_ref
            .iter()
            .zip(&reference)
            .fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
        let gap = (emax - emin) / emax;
        last_gap = gap;
        if best.as_ref().is_none_or(|b| gap < b.0) {
            best = Some((gap, reference.clone()));
            since_best = 0;
        } else {
            since_best += 1;
        }
        reference = new_ref;
        if movement <= opts.tol || (gap <= 1e-13 && movement <= 1e-8) {
            return finish(system, &scan, &interval, reference, umax, iter);
        }
        // nearly dependent functions put a rounding floor under the gap
        if since_best >= STALL_ITERATIONS {
            if let Some((_, r)) = best.as_ref().filter(|b| b.0 <= STALL_GAP) {
                return finish(system, &scan, &interval, r.clone(), umax, iter);
            }
        }
    }
    Err(Error::NoConvergence {
        iterations: opts.max_iter,
        residual: last_gap,
    })
}

/// Iterations without a smaller gap after which the exchange is stopped.
const STALL_ITERATIONS: usize = 5;

/// Largest relative gap accepted when the exchange stalls.
const STALL_GAP: f64 = 1e-6;

/// Solve the levelled interpolation problem on a reference (unit coordinates).
fn level<'a, S: FunctionSystem + ?Sized>(
    system: &'a S,
    scan: &'a Scan,
    interval: &Interval,
    reference: &[f64],
) -> Result<ErrorFn<'a, S>> {
    let m = reference.len();
    let mut mat = DMatrix::zeros(m, m);
    let mut rhs = vec![0.0; m];
    for (j, &u) in reference.iter().enumerate() {
        let f = scan.eval(system, interval.from_unit(u))?;
        for i in 0..m - 1 {
            mat[(j, i)] = f[i];
        }
        mat[(j, m - 1)] = if j % 2 == 0 { 1.0 } else { -1.0 };
        rhs[j] = f[m - 1];
    }
    let sol = solve(&mat, &rhs).map_err(|_| {
        Error::ChebyshevViolation("levelled interpolation system on the reference is singular".into())
    })?;
    Ok(ErrorFn {
        system,
        scan,
        interval: *interval,
        a: sol[..m - 1].to_vec(),
    })
}

/// Polished local extrema of the error, reduced to `m` alternating ones.
fn exchange<S: FunctionSystem + ?Sized>(
    scan: &Scan,
    err: &ErrorFn<'_, S>,
    reference: &[f64],
    umax: f64,
    m: usize,
) -> Result<Vec<Extremum>> {
    let n = scan.u.len();
    let e: Vec<f64> = (0..n).map(|j| err.of_row(scan.row(j))).collect();

    let mut brackets: Vec<(f64, f64, f64)> = Vec::new();
    for j in 0..n {
        let ej = e[j];
        if ej == 0.0 {
            continue;
        }
        let sigma = ej.signum();
        let left_ok = j == 0 || sigma * ej >= sigma * e[j - 1];
        let right_ok = j + 1 == n || sigma * ej >= sigma * e[j + 1];
        if left_ok && right_ok {
            let lo = if j == 0 { scan.u[0] } else { scan.u[j - 1] };
            let hi = if j + 1 == n { umax } else { scan.u[j + 1] };
            brackets.push((lo, scan.u[j], hi));
        }
    }
    // the previous reference may sit between grid nodes
    let step = scan.u[1] - scan.u[0];
    for &u in reference {
        brackets.push(((u - step).max(0.0), u, (u + step).min(umax)));
    }

    let mut candidates = Vec::with_capacity(brackets.len());
    for (lo, guess, hi) in brackets {
        let e0 = err.at_unit(guess)?;
        if e0 == 0.0 {
            continue;
        }
        let sigma = e0.signum();
        let (u, val) = maximize(|u| err.at_unit(u).map(|v| sigma * v), lo, guess, hi)?;
        candidates.push(Extremum { u, e: sigma * val });
    }
    candidates.sort_by(|a, b| a.u.total_cmp(&b.u));

    let mut alt: Vec<Extremum> = Vec::with_capacity(candidates.len());
    for c in candidates {
        match alt.last_mut() {
            Some(last) if last.e.signum() == c.e.signum() => {
                if c.e.abs() > last.e.abs() {
                    *last = c;
                }
            }
            _ => alt.push(c),
        }
    }
    if alt.len() < m {
        return Err(Error::ChebyshevViolation(format!(
            "found {} alternating extrema, need {m}",
            alt.len()
        )));
    }
    while alt.len() > m {
        if alt[0].e.abs() < alt[alt.len() - 1].e.abs() {
            alt.remove(0);
        } else {
            alt.pop();
        }
    }
    Ok(alt)
}

fn finish<S: FunctionSystem + ?Sized>(
    system: &S,
    scan: &Scan,
    interval: &Interval,
    reference: Vec<f64>,
    umax: f64,
    iterations: usize,
) -> Result<ChebyshevSolution> {
    let m = reference.len();
    let err = level(system, scan, interval, &reference)?;
    let extrema = exchange(scan, &err, &reference, umax, m)?;
    let emax = extrema.iter().fold(0.0f64, |a, x| a.max(x.e.abs()));
    let e_first = err.at_unit(reference[0])?;
    let sign = -e_first.signum();
    let mut d: Vec<f64> = err.a.iter().map(|&a| -a).collect();
    d.push(1.0);
    for c in &mut d {
        *c *= sign / emax;
    }
    let coeffs = scan.whitening.coeffs(&d);
    let points: Vec<f64> = reference.iter().map(|&u| interval.from_unit(u)).collect();

    let mut residual = 0.0f64;
    for (i, &t) in points.iter().enumerate() {
        let v = dot(&coeffs, &system.eval(t)?);
        let target = if i % 2 == 0 { -1.0 } else { 1.0 };
        residual = residual.max((v - target).abs());
    }
    for j in 0..scan.u.len() {
        let v = dot(&d, scan.row(j)).abs();
        residual = residual.max(v - 1.0);
    }
    Ok(ChebyshevSolution {
        coeffs,
        points,
        residual,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{FnSystem, ModelSpec};

    fn pm1() -> Interval {
        Interval::new(-1.0, 1.0).unwrap()
    }

    fn assert_close(a: &[f64], b: &[f64], tol: f64) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() <= tol, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn linear_polynomial() {
        let sys = FnSystem::monomials(1, pm1());
        let sol = remez(&sys, &RemezOptions::default()).unwrap();
        assert_close(&sol.points, &[-1.0, 1.0], 1e-12);
        assert_close(&sol.coeffs, &[0.0, 1.0], 1e-12);
    }

    #[test]
    fn quadratic_is_t2() {
        let sys = FnSystem::monomials(2, pm1());
        let sol = remez(&sys, &RemezOptions::default()).unwrap();
        assert_close(&sol.points, &[-1.0, 0.0, 1.0], 1e-10);
        // T_2(-1) = 1, so c* = -T_2
        assert_close(&sol.coeffs, &[1.0, 0.0, -2.0], 1e-10);
        assert!(sol.residual < 1e-10);
    }

    #[test]
    fn higher_degree_monomials_give_chebyshev_extrema() {
        use std::f64::consts::PI;
        for deg in 3..7 {
            let sys = FnSystem::monomials(deg, pm1());
            let sol = remez(&sys, &RemezOptions::default()).unwrap();
            let expected: Vec<f64> = (0..=deg)
                .map(|j| -(PI * j as f64 / deg as f64).cos())
                .collect();
            assert_close(&sol.points, &expected, 1e-9);
            let lead = if deg % 2 == 0 { -1.0 } else { 1.0 } * 2f64.powi(deg as i32 - 1);
            assert!((sol.coeffs[deg] - lead).abs() < 1e-7);
        }
    }

    #[test]
    fn single_rational_term_on_half_line() {
        for b in [-0.5, -1.0, -2.0] {
            let model = ModelSpec::rational(0, vec![b], Interval::semi_infinite(0.0).unwrap()).unwrap();
            let sol = remez(&model, &RemezOptions::default()).unwrap();
            assert_close(&sol.points, &[0.0, 2f64.sqrt() * b.abs()], 1e-9 * b.abs());
            assert!(sol.residual < 1e-10);
        }
    }

    #[test]
    fn single_function() {
        let sys = FnSystem::new(pm1()).with(|t| 1.0 + t * t);
        let sol = remez(&sys, &RemezOptions::default()).unwrap();
        assert_eq!(sol.points.len(), 1);
        assert!((sol.points[0].abs() - 1.0).abs() < 1e-12);
        assert!((sol.coeffs[0] + 0.5).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_initial_reference() {
        let sys = FnSystem::monomials(2, pm1());
        let opts = RemezOptions::default().with_initial(vec![0.5, 0.0, 1.0]);
        assert!(matches!(remez(&sys, &opts), Err(Error::Parameter(_))));
    }

    #[test]
    fn detects_non_chebyshev_system() {
        // {t, t^2} is not a Chebyshev system on [-1, 1]: both vanish at 0
        let sys = FnSystem::new(pm1()).with(|t| t).with(|t| t * t);
        let opts = RemezOptions::default().with_initial(vec![-0.5, 0.5]);
        let res = remez(&sys, &opts);
        // either the interpolation breaks down or the result does not equioscillate
        if let Ok(sol) = res {
            let v: Vec<f64> = sol
                .points
                .iter()
                .map(|&t| sol.value(&sys, t).unwrap())
                .collect();
            assert!(v[0] * v[1] < 0.0);
        }
    }
}
