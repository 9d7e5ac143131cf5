//! Regression models of the form
//!
//! ```text
//! Y = sum_i a_i h_i(t) + sum_i a_{s+i} phi(t, b_i) + noise
//! ```
//!
//! together with their linearization `f(t, b)`, the limiting system obtained
//! when all nonlinear parameters collapse onto one point, and the scaling
//! matrix that maps the linearized information matrix back to the nonlinear
//! model.
//!
//! Every numerical routine of the crate works on a [`FunctionSystem`]: a
//! finite list of real functions on an [`Interval`]. [`ModelSpec`] is the
//! linearized system, [`LimitingSystem`] the collapsed one; [`FnSystem`],
//! [`Subsystem`] and [`ScaledSystem`] cover everything else.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Right end of a design interval.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Upper {
    Finite(f64),
    Infinite,
}

/// Design interval `[lower, upper]` with a finite lower end.
///
/// Numerical scans run in a unit coordinate `u`: a finite interval is mapped
/// affinely onto `[0, 1]`, a half-line `[c, inf)` onto `[0, 1)` through
/// `u = (t - c) / (1 + t - c)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    lower: f64,
    upper: Upper,
}

impl Interval {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if !lower.is_finite() || !upper.is_finite() || lower >= upper {
            return Err(Error::Parameter(format!(
                "interval [{lower}, {upper}] must be finite with lower < upper"
            )));
        }
        Ok(Self {
            lower,
            upper: Upper::Finite(upper),
        })
    }

    pub fn semi_infinite(lower: f64) -> Result<Self> {
        if !lower.is_finite() {
            return Err(Error::Parameter(format!(
                "lower end {lower} must be finite"
            )));
        }
        Ok(Self {
            lower,
            upper: Upper::Infinite,
        })
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> Upper {
        self.upper
    }

    pub fn is_bounded(&self) -> bool {
        matches!(self.upper, Upper::Finite(_))
    }

    pub fn contains(&self, t: f64) -> bool {
        if !(t >= self.lower) {
            return false;
        }
        match self.upper {
            Upper::Finite(d) => t <= d,
            Upper::Infinite => t.is_finite(),
        }
    }

    /// Map `t` to the unit coordinate.
    pub fn to_unit(&self, t: f64) -> f64 {
        let x = t - self.lower;
        match self.upper {
            Upper::Finite(d) => x / (d - self.lower),
            Upper::Infinite => x / (1.0 + x),
        }
    }

    /// Inverse of [`Interval::to_unit`]. `u` is clamped into the valid range;
    /// for a half-line the largest admissible value is just below one.
    pub fn from_unit(&self, u: f64) -> f64 {
        match self.upper {
            Upper::Finite(d) => {
                let u = u.clamp(0.0, 1.0);
                if u == 1.0 {
                    d
                } else {
                    self.lower + u * (d - self.lower)
                }
            }
            Upper::Infinite => {
                let u = u.clamp(0.0, Self::MAX_UNIT);
                self.lower + u / (1.0 - u)
            }
        }
    }

    /// Largest unit coordinate used on a half-line.
    pub const MAX_UNIT: f64 = 1.0 - 1e-12;

    /// Upper limit of the unit coordinate (1 for bounded intervals).
    pub fn unit_max(&self) -> f64 {
        if self.is_bounded() {
            1.0
        } else {
            Self::MAX_UNIT
        }
    }

    /// `n` equispaced unit coordinates. Both ends are included for a bounded
    /// interval; on a half-line the point at infinity is left out.
    pub fn unit_grid(&self, n: usize) -> Vec<f64> {
        let n = n.max(2);
        if self.is_bounded() {
            (0..n).map(|j| j as f64 / (n - 1) as f64).collect()
        } else {
            (0..n).map(|j| j as f64 / n as f64).collect()
        }
    }

    /// `n` equispaced unit coordinates mapped back to `t`.
    pub fn grid(&self, n: usize) -> Vec<f64> {
        self.unit_grid(n)
            .into_iter()
            .map(|u| self.from_unit(u))
            .collect()
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.upper {
            Upper::Finite(d) => write!(f, "[{}, {}]", self.lower, d),
            Upper::Infinite => write!(f, "[{}, inf)", self.lower),
        }
    }
}

/// `d^j/dx^j phi(t, x)` supplied by the caller of a custom basis.
pub type DerivativeFn = dyn Fn(f64, f64, usize) -> f64 + Send + Sync;

/// A user supplied nonlinear basis function with analytic derivatives in its
/// second argument.
#[derive(Clone)]
pub struct CustomBasis {
    name: String,
    derivative: Arc<DerivativeFn>,
}

impl CustomBasis {
    pub fn new(
        name: impl Into<String>,
        derivative: impl Fn(f64, f64, usize) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            derivative: Arc::new(derivative),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }
}

impl fmt::Debug for CustomBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomBasis")
            .field("name", &self.name)
            .finish_non_exhaustive()
    }
}

/// The nonlinear function `phi(t, x)` of the model.
#[derive(Clone, Debug)]
pub enum Basis {
    /// `phi(t, x) = 1 / (t - x)`
    Rational,
    /// `phi(t, x) = exp(t x)`
    Exponential,
    /// `phi(t, x) = log(t - x)`
    Logarithmic,
    Custom(CustomBasis),
}

impl Basis {
    /// `d^j/dx^j phi(t, x)`.
    pub fn derivative(&self, t: f64, x: f64, order: usize) -> f64 {
        match self {
            Basis::Rational => factorial(order) * (t - x).powi(-(order as i32 + 1)),
            Basis::Exponential => t.powi(order as i32) * (t * x).exp(),
            Basis::Logarithmic => {
                if order == 0 {
                    (t - x).ln()
                } else {
                    -factorial(order - 1) * (t - x).powi(-(order as i32))
                }
            }
            Basis::Custom(c) => (c.derivative)(t, x, order),
        }
    }

    pub fn name(&self) -> &str {
        match self {
            Basis::Rational => "rational",
            Basis::Exponential => "exponential",
            Basis::Logarithmic => "logarithmic",
            Basis::Custom(c) => c.name(),
        }
    }

    /// Check that `x` is an admissible nonlinear parameter on `interval`.
    fn check_parameter(&self, x: f64, interval: &Interval) -> Result<()> {
        if !x.is_finite() {
            return Err(Error::Parameter(format!("nonlinear parameter {x} is not finite")));
        }
        match self {
            Basis::Rational if interval.contains(x) => Err(Error::Parameter(format!(
                "rational pole {x} lies inside the design interval {interval}"
            ))),
            Basis::Logarithmic if x >= interval.lower() => Err(Error::Parameter(format!(
                "logarithmic parameter {x} must lie below the design interval {interval}"
            ))),
            Basis::Exponential if !interval.is_bounded() && x >= 0.0 => {
                Err(Error::Parameter(format!(
                    "exponential rate {x} must be negative on the half-line {interval}"
                )))
            }
            _ => Ok(()),
        }
    }
}

/// `n!` as a float; exact for `n <= 18`.
pub fn factorial(n: usize) -> f64 {
    (1..=n as u64).product::<u64>() as f64
}

/// A finite list of real functions on an interval.
pub trait FunctionSystem: Send + Sync {
    /// Number of functions `m`.
    fn dim(&self) -> usize;

    fn interval(&self) -> Interval;

    /// Write `(f_1(t), ..., f_m(t))` into `out`.
    fn eval_into(&self, t: f64, out: &mut [f64]) -> Result<()>;

    fn eval(&self, t: f64) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.dim()];
        self.eval_into(t, &mut out)?;
        Ok(out)
    }

    /// A better conditioned basis of the same span, when one is known.
    fn span_basis(&self) -> Option<RationalSpan> {
        None
    }

    /// The matrix `(f_i(t_j))` with one column per point.
    fn matrix_at(&self, points: &[f64]) -> Result<DMatrix<f64>> {
        let m = self.dim();
        let mut mat = DMatrix::zeros(m, points.len());
        let mut buf = vec![0.0; m];
        for (j, &t) in points.iter().enumerate() {
            self.eval_into(t, &mut buf)?;
            for i in 0..m {
                mat[(i, j)] = buf[i];
            }
        }
        Ok(mat)
    }
}

impl<S: FunctionSystem + ?Sized> FunctionSystem for &S {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn interval(&self) -> Interval {
        (**self).interval()
    }
    fn eval_into(&self, t: f64, out: &mut [f64]) -> Result<()> {
        (**self).eval_into(t, out)
    }
    fn span_basis(&self) -> Option<RationalSpan> {
        (**self).span_basis()
    }
}

fn check_finite(t: f64, out: &[f64]) -> Result<()> {
    if out.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::Singular { t })
    }
}

/// The nonlinear regression model and its linearized system
/// `f(t, b) = (h_1, ..., h_s, phi(t, b_1), phi'(t, b_1), ..., phi(t, b_k), phi'(t, b_k))`.
///
/// The linear basis functions are the monomials `h_i(t) = t^(i-1)`.
#[derive(Clone, Debug)]
pub struct ModelSpec {
    basis: Basis,
    s: usize,
    b: Vec<f64>,
    a: Option<Vec<f64>>,
    interval: Interval,
}

impl ModelSpec {
    pub fn new(basis: Basis, s: usize, b: Vec<f64>, interval: Interval) -> Result<Self> {
        if s + 2 * b.len() == 0 {
            return Err(Error::Parameter(
                "model needs at least one regression function".into(),
            ));
        }
        if !interval.is_bounded() {
            if s > 0 {
                return Err(Error::Parameter(format!(
                    "polynomial terms (s = {s}) do not decay on the half-line {interval}"
                )));
            }
            if matches!(basis, Basis::Logarithmic) {
                return Err(Error::Parameter(format!(
                    "logarithmic basis does not decay on the half-line {interval}"
                )));
            }
        }
        for &x in &b {
            basis.check_parameter(x, &interval)?;
        }
        for i in 0..b.len() {
            for j in 0..i {
                if b[i] == b[j] {
                    return Err(Error::Parameter(format!(
                        "nonlinear parameters must be pairwise distinct (b_{} = b_{} = {})",
                        j + 1,
                        i + 1,
                        b[i]
                    )));
                }
            }
        }
        Ok(Self {
            basis,
            s,
            b,
            a: None,
            interval,
        })
    }

    /// Rational model `sum a_i t^(i-1) + sum a_{s+i} / (t - b_i)`.
    pub fn rational(s: usize, b: Vec<f64>, interval: Interval) -> Result<Self> {
        Self::new(Basis::Rational, s, b, interval)
    }

    /// Attach the linear parameters used by the nonlinear-model scaling.
    pub fn with_a(mut self, a: Vec<f64>) -> Result<Self> {
        if a.len() != self.k() {
            return Err(Error::Parameter(format!(
                "expected {} linear parameters, got {}",
                self.k(),
                a.len()
            )));
        }
        if a.iter().any(|&v| v == 0.0 || !v.is_finite()) {
            return Err(Error::Parameter(
                "linear parameters a_i must be finite and non-zero".into(),
            ));
        }
        self.a = Some(a);
        Ok(self)
    }

    /// Same model with different nonlinear parameters.
    pub fn with_b(&self, b: Vec<f64>) -> Result<Self> {
        let model = Self::new(self.basis.clone(), self.s, b, self.interval)?;
        match &self.a {
            Some(a) => model.with_a(a.clone()),
            None => Ok(model),
        }
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn k(&self) -> usize {
        self.b.len()
    }

    /// Number of regression functions, `s + 2k`.
    pub fn m(&self) -> usize {
        self.s + 2 * self.b.len()
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn a(&self) -> Option<&[f64]> {
        self.a.as_deref()
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    fn check_point(&self, t: f64) -> Result<()> {
        if !self.interval.contains(t) {
            return Err(Error::Domain { t });
        }
        Ok(())
    }

    fn fill_polynomial(&self, t: f64, out: &mut [f64]) {
        let mut p = 1.0;
        for v in out.iter_mut().take(self.s) {
            *v = p;
            p *= t;
        }
    }

    /// The linearized regression vector `f(t, b)`.
    pub fn eval_f(&self, t: f64) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.m()];
        self.eval_f_into(t, &mut out)?;
        Ok(out)
    }

    fn eval_f_into(&self, t: f64, out: &mut [f64]) -> Result<()> {
        self.check_point(t)?;
        if self.b.contains(&t) && !matches!(self.basis, Basis::Exponential) {
            return Err(Error::Singular { t });
        }
        self.fill_polynomial(t, out);
        for (i, &bi) in self.b.iter().enumerate() {
            out[self.s + 2 * i] = self.basis.derivative(t, bi, 0);
            out[self.s + 2 * i + 1] = self.basis.derivative(t, bi, 1);
        }
        check_finite(t, out)
    }

    /// The limiting regression vector `(h_1, ..., h_s, phi(t, x), ..., phi^(2k-1)(t, x))`.
    pub fn eval_fbar(&self, t: f64, x: f64) -> Result<Vec<f64>> {
        self.check_collapsed(x)?;
        let mut out = vec![0.0; self.m()];
        self.eval_fbar_into(t, x, &mut out)?;
        Ok(out)
    }

    fn eval_fbar_into(&self, t: f64, x: f64, out: &mut [f64]) -> Result<()> {
        self.check_point(t)?;
        if t == x && !matches!(self.basis, Basis::Exponential) {
            return Err(Error::Singular { t });
        }
        self.fill_polynomial(t, out);
        for j in 0..2 * self.k() {
            out[self.s + j] = self.basis.derivative(t, x, j);
        }
        check_finite(t, out)
    }

    /// Check that `x` is an admissible collapsed parameter.
    pub fn check_collapsed(&self, x: f64) -> Result<()> {
        self.basis.check_parameter(x, &self.interval)
    }

    /// The scaling matrix `K_a^{-1}` = diag(1, ..., 1, 1, a_1, ..., 1, a_k) whose
    /// conjugation turns the linearized information matrix into the one of the
    /// nonlinear model.
    pub fn ka_inverse(&self) -> Result<DMatrix<f64>> {
        let a = self.a.as_ref().ok_or_else(|| {
            Error::Parameter("nonlinear-model scaling needs the linear parameters a".into())
        })?;
        let mut diag = vec![1.0; self.m()];
        for (i, &ai) in a.iter().enumerate() {
            diag[self.s + 2 * i + 1] = ai;
        }
        Ok(DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag)))
    }

    /// `K_a = diag(1, ..., 1, 1, 1/a_1, ..., 1, 1/a_k)`.
    pub fn ka_matrix(&self) -> Result<DMatrix<f64>> {
        let inv = self.ka_inverse()?;
        Ok(DMatrix::from_diagonal(&inv.diagonal().map(|v| 1.0 / v)))
    }

    /// The limiting system for collapse point `x`.
    pub fn limiting(&self, x: f64) -> Result<LimitingSystem> {
        self.check_collapsed(x)?;
        Ok(LimitingSystem {
            model: self.clone(),
            x,
        })
    }

    /// The system `K_a^{-1} f(t, b)` whose information matrix is the one of
    /// the nonlinear model.
    pub fn nonlinear_system(&self) -> Result<ScaledSystem<ModelSpec>> {
        let scale = self.ka_inverse()?.diagonal().iter().copied().collect();
        ScaledSystem::new(self.clone(), scale)
    }
}

impl FunctionSystem for ModelSpec {
    fn dim(&self) -> usize {
        self.m()
    }
    fn interval(&self) -> Interval {
        self.interval
    }
    fn eval_into(&self, t: f64, out: &mut [f64]) -> Result<()> {
        self.eval_f_into(t, out)
    }
    fn span_basis(&self) -> Option<RationalSpan> {
        let poles = self.b.iter().map(|&b| (b, 2)).collect();
        matches!(self.basis, Basis::Rational).then(|| RationalSpan::new(self.interval, poles, self.m()))
    }
}

/// The collapsed system `(h_1, ..., h_s, phi(t, x), phi'(t, x), ..., phi^(2k-1)(t, x))`.
#[derive(Clone, Debug)]
pub struct LimitingSystem {
    model: ModelSpec,
    x: f64,
}

impl LimitingSystem {
    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn model(&self) -> &ModelSpec {
        &self.model
    }
}

impl FunctionSystem for LimitingSystem {
    fn dim(&self) -> usize {
        self.model.m()
    }
    fn interval(&self) -> Interval {
        self.model.interval
    }
    fn eval_into(&self, t: f64, out: &mut [f64]) -> Result<()> {
        self.model.eval_fbar_into(t, self.x, out)
    }
    fn span_basis(&self) -> Option<RationalSpan> {
        let poles = vec![(self.x, 2 * self.model.k() as i32)];
        matches!(self.model.basis, Basis::Rational)
            .then(|| RationalSpan::new(self.model.interval, poles, self.model.m()))
    }
}

/// `T_j(y(t)) w(t) / prod (t - x_i)^(e_i)` for `j < m`, where `y` maps the
/// interval onto `[-1, 1]` and `w = 1` on a bounded interval,
/// `w = (1 + t - lower)^(m-1)` on a half-line. With `sum e_i >= m - 1` this
/// spans the rational functions `p / prod (t - x_i)^(e_i)`, `deg p < m`.
#[derive(Clone, Debug)]
pub struct RationalSpan {
    interval: Interval,
    poles: Vec<(f64, i32)>,
    m: usize,
}

impl RationalSpan {
    pub fn new(interval: Interval, poles: Vec<(f64, i32)>, m: usize) -> Self {
        Self { interval, poles, m }
    }
}

impl FunctionSystem for RationalSpan {
    fn dim(&self) -> usize {
        self.m
    }
    fn interval(&self) -> Interval {
        self.interval
    }
    fn eval_into(&self, t: f64, out: &mut [f64]) -> Result<()> {
        if !self.interval.contains(t) {
            return Err(Error::Domain { t });
        }
        let lo = self.interval.lower();
        let (y, mut w) = match self.interval.upper() {
            Upper::Finite(hi) => (2.0 * (t - lo) / (hi - lo) - 1.0, 1.0),
            Upper::Infinite => {
                let v = 1.0 + t - lo;
                (2.0 * (t - lo) / v - 1.0, v.powi(self.m as i32 - 1))
            }
        };
        for &(x, e) in &self.poles {
            w /= (t - x).powi(e);
        }
        let (mut prev, mut cur) = (1.0, y);
        for (j, o) in out.iter_mut().enumerate() {
            *o = match j {
                0 => w,
                1 => y * w,
                _ => {
                    let next = 2.0 * y * cur - prev;
                    (prev, cur) = (cur, next);
                    next * w
                }
            };
        }
        check_finite(t, out)
    }
}

type ScalarFn = dyn Fn(f64) -> f64 + Send + Sync;

/// A system given by closures.
#[derive(Clone)]
pub struct FnSystem {
    interval: Interval,
    functions: Vec<Arc<ScalarFn>>,
}

impl FnSystem {
    pub fn new(interval: Interval) -> Self {
        Self {
            interval,
            functions: Vec::new(),
        }
    }

    pub fn with(mut self, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.functions.push(Arc::new(f));
        self
    }

    /// `{1, t, ..., t^degree}`.
    pub fn monomials(degree: usize, interval: Interval) -> Self {
        (0..=degree).fold(Self::new(interval), |sys, p| {
            sys.with(move |t: f64| t.powi(p as i32))
        })
    }
}

impl fmt::Debug for FnSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnSystem")
            .field("interval", &self.interval)
            .field("dim", &self.functions.len())
            .finish()
    }
}

impl FunctionSystem for FnSystem {
    fn dim(&self) -> usize {
        self.functions.len()
    }
    fn interval(&self) -> Interval {
        self.interval
    }
    fn eval_into(&self, t: f64, out: &mut [f64]) -> Result<()> {
        if !self.interval.contains(t) {
            return Err(Error::Domain { t });
        }
        for (o, f) in out.iter_mut().zip(&self.functions) {
            *o = f(t);
        }
        check_finite(t, out)
    }
}

/// The functions of `inner` whose indices are listed in `keep`.
#[derive(Clone, Debug)]
pub struct Subsystem<S> {
    inner: S,
    keep: Vec<usize>,
}

impl<S: FunctionSystem> Subsystem<S> {
    pub fn new(inner: S, keep: Vec<usize>) -> Result<Self> {
        if keep.is_empty() || keep.iter().any(|&i| i >= inner.dim()) {
            return Err(Error::Parameter(format!(
                "subsystem indices {keep:?} out of range for {} functions",
                inner.dim()
            )));
        }
        Ok(Self { inner, keep })
    }

    /// All functions except the one with (zero based) index `index`.
    pub fn without(inner: S, index: usize) -> Result<Self> {
        let keep = (0..inner.dim()).filter(|&i| i != index).collect();
        Self::new(inner, keep)
    }
}

impl<S: FunctionSystem> FunctionSystem for Subsystem<S> {
    fn dim(&self) -> usize {
        self.keep.len()
    }
    fn interval(&self) -> Interval {
        self.inner.interval()
    }
    fn eval_into(&self, t: f64, out: &mut [f64]) -> Result<()> {
        let full = self.inner.eval(t)?;
        for (o, &i) in out.iter_mut().zip(&self.keep) {
            *o = full[i];
        }
        Ok(())
    }
}

/// `diag(scale) * f(t)`.
#[derive(Clone, Debug)]
pub struct ScaledSystem<S> {
    inner: S,
    scale: Vec<f64>,
}

impl<S: FunctionSystem> ScaledSystem<S> {
    pub fn new(inner: S, scale: Vec<f64>) -> Result<Self> {
        if scale.len() != inner.dim() || scale.iter().any(|&v| v == 0.0 || !v.is_finite()) {
            return Err(Error::Parameter(
                "scale must have one finite non-zero entry per function".into(),
            ));
        }
        Ok(Self { inner, scale })
    }

    pub fn scale(&self) -> &[f64] {
        &self.scale
    }
}

impl<S: FunctionSystem> FunctionSystem for ScaledSystem<S> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn interval(&self) -> Interval {
        self.inner.interval()
    }
    fn eval_into(&self, t: f64, out: &mut [f64]) -> Result<()> {
        self.inner.eval_into(t, out)?;
        for (o, s) in out.iter_mut().zip(&self.scale) {
            *o *= s;
        }
        Ok(())
    }
    fn span_basis(&self) -> Option<RationalSpan> {
        self.inner.span_basis()
    }
}
