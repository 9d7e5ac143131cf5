use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Criterion {
    E,
    #[serde(rename = "c")]
    C,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Optimality {
    Optimal,
    NotOptimal,
    Inconclusive,
}

/// Outcome of an equivalence-theorem check together with its witnesses.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub criterion: Criterion,
    pub verdict: Optimality,
    pub lambda_min: f64,
    /// Second smallest eigenvalue (equal to `lambda_min` when `m = 1`).
    pub lambda_2: f64,
    /// Rayleigh quotient of the Chebyshev coefficient vector (E only).
    pub lambda_cstar: Option<f64>,
    /// `sup_t g(t) - 1` for the normalized directional function `g`; optimal
    /// designs have `max_violation <= tol`.
    pub max_violation: f64,
    pub argmax_point: f64,
    /// Number of eigenvalues within `1e-8 max(1, lambda_min)` of `lambda_min`.
    pub multiplicity: usize,
    pub note: String,
}

impl VerificationReport {
    pub fn is_optimal(&self) -> bool {
        self.verdict == Optimality::Optimal
    }

    /// `lambda_2 / lambda_cstar`, when defined.
    pub fn eig_ratio(&self) -> Option<f64> {
        self.lambda_cstar.map(|l| self.lambda_2 / l)
    }
}

/// Grid size and tolerance of the verification checks.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub grid_size: usize,
    /// Relative tolerance of the directional inequality.
    pub tol: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            grid_size: 10_000,
            tol: 1e-6,
        }
    }
}

/// Eigenvalues within this relative distance of `lambda_min` count as equal.
pub const MULTIPLICITY_TOL: f64 = 1e-8;

/// Relative estimability tolerance `||M M^- c - c|| <= 1e-8 ||c||`.
pub const ESTIMABILITY_TOL: f64 = 1e-8;
