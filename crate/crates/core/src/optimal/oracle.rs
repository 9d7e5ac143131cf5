//! Grid-based optimal designs that do not rely on the Chebyshev structure.
//! They serve as independent references for the candidate designs.

use serde::{Deserialize, Serialize};

use crate::design::{info_matrix, Design};
use crate::error::{Error, Result};
use crate::linalg::{dot, solve, SymMatrix};
use crate::model::FunctionSystem;
use crate::scalar::maximize;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleOptions {
    /// Candidate points (equispaced in the unit coordinate).
    pub grid_size: usize,
    /// Iterations of the weight ascent (E) or of the exchange (c).
    pub iterations: usize,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self {
            grid_size: 4000,
            iterations: 1000,
        }
    }
}

/// Optimal value `min_xi c^T M^-(xi) c` and a design attaining it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct COracle {
    pub value: f64,
    /// Lower bound from the dual; `value - lower` measures the accuracy.
    pub lower: f64,
    pub design: Design,
}

struct Grid {
    u: Vec<f64>,
    f: Vec<f64>,
    m: usize,
}

impl Grid {
    fn new<S: FunctionSystem + ?Sized>(system: &S, n: usize) -> Result<Self> {
        let interval = system.interval();
        let m = system.dim();
        let u = interval.unit_grid(n);
        let mut f = vec![0.0; u.len() * m];
        for (j, &uj) in u.iter().enumerate() {
            system.eval_into(interval.from_unit(uj), &mut f[j * m..(j + 1) * m])?;
        }
        Ok(Self { u, f, m })
    }

    fn row(&self, j: usize) -> &[f64] {
        &self.f[j * self.m..(j + 1) * self.m]
    }

    fn len(&self) -> usize {
        self.u.len()
    }

    /// `m` grid points whose regression vectors are far from collinear
    /// (greedy pivoted Gram-Schmidt).
    fn spanning_points(&self) -> Result<Vec<usize>> {
        let mut basis: Vec<Vec<f64>> = Vec::new();
        let mut chosen = Vec::new();
        for _ in 0..self.m {
            let mut best = (0.0, usize::MAX, Vec::new());
            for j in 0..self.len() {
                if chosen.contains(&j) {
                    continue;
                }
                let mut r = self.row(j).to_vec();
                for q in &basis {
                    let p = dot(&r, q);
                    for (ri, qi) in r.iter_mut().zip(q) {
                        *ri -= p * qi;
                    }
                }
                let norm = dot(&r, &r).sqrt();
                let rel = norm / dot(self.row(j), self.row(j)).sqrt().max(f64::MIN_POSITIVE);
                if rel > best.0 {
                    best = (rel, j, r.iter().map(|v| v / norm).collect());
                }
            }
            if best.1 == usize::MAX || best.0 < 1e-10 {
                return Err(Error::RankDeficient {
                    rank: chosen.len(),
                    order: self.m,
                });
            }
            chosen.push(best.1);
            basis.push(best.2);
        }
        Ok(chosen)
    }
}

/// The c-optimal design by linear programming.
///
/// By Elfving's theorem `sqrt(min c^T M^- c) = min { sum |theta_j| :
/// sum theta_j f(t_j) = c }`. The LP is solved by a simplex that exchanges one
/// point per step; entering points maximize `|f(t)^T u|` for the dual vector
/// `u`, first on the grid and then continuously, so the support is not tied
/// to the grid.
pub fn brute_force_c<S: FunctionSystem + ?Sized>(
    system: &S,
    c: &[f64],
    opts: &OracleOptions,
) -> Result<COracle> {
    let m = system.dim();
    if c.len() != m || c.iter().all(|&v| v == 0.0) {
        return Err(Error::Parameter("c must be a non-zero vector of length m".into()));
    }
    let interval = system.interval();
    let umax = interval.unit_max();
    let grid = Grid::new(system, opts.grid_size)?;
    let mut points: Vec<f64> = grid
        .spanning_points()?
        .into_iter()
        .map(|j| interval.from_unit(grid.u[j]))
        .collect();

    let mut best_lower = 0.0f64;
    let mut last = None;
    for _ in 0..opts.iterations {
        let b = system.matrix_at(&points)?;
        let theta = solve(&b, c)?;
        let sigma: Vec<f64> = theta
            .iter()
            .map(|&v| if v < 0.0 { -1.0 } else { 1.0 })
            .collect();
        let cost: f64 = theta.iter().map(|v| v.abs()).sum();
        let u = solve(&b.transpose(), &sigma)?;

        let (j, _) = (0..grid.len())
            .map(|j| (j, dot(grid.row(j), &u).abs()))
            .fold((0, f64::NEG_INFINITY), |a, x| if x.1 > a.1 { x } else { a });
        let lo = if j == 0 { 0.0 } else { grid.u[j - 1] };
        let hi = if j + 1 == grid.len() { umax } else { grid.u[j + 1] };
        let (ustar, peak) = maximize(
            |x| Ok(dot(&system.eval(interval.from_unit(x))?, &u).abs()),
            lo,
            grid.u[j],
            hi,
        )?;
        best_lower = best_lower.max(cost / peak);
        last = Some((points.clone(), theta.clone(), cost));
        if peak <= 1.0 + 1e-11 {
            break;
        }

        let tstar = interval.from_unit(ustar);
        let fstar = system.eval(tstar)?;
        let s = dot(&fstar, &u).signum();
        let dir = solve(&b, &fstar)?;
        let mut leave = None;
        let mut ratio = f64::INFINITY;
        for k in 0..m {
            let d = sigma[k] * s * dir[k];
            if d > 1e-14 {
                let r = theta[k].abs() / d;
                if r < ratio {
                    ratio = r;
                    leave = Some(k);
                }
            }
        }
        let Some(k) = leave else {
            return Err(Error::Design("c-optimal LP is unbounded".into()));
        };
        points[k] = tstar;
    }

    let (points, theta, cost) = last.expect("at least one iteration");
    if cost - best_lower > 1e-6 * cost {
        return Err(Error::NoConvergence {
            iterations: opts.iterations,
            residual: (cost - best_lower) / cost,
        });
    }
    let weights: Vec<f64> = theta.iter().map(|v| v.abs() / cost).collect();
    let design = merge_close(&interval, &points, &weights)?;
    Ok(COracle {
        value: cost * cost,
        lower: best_lower * best_lower,
        design,
    })
}

/// Support points closer than this in the unit coordinate are merged.
const MERGE_TOL: f64 = 1e-5;

/// A degenerate basis can split one optimal point into two almost equal ones.
fn merge_close(interval: &crate::model::Interval, points: &[f64], weights: &[f64]) -> Result<Design> {
    let mut pairs: Vec<(f64, f64)> = points
        .iter()
        .zip(weights)
        .filter(|p| *p.1 > 0.0)
        .map(|(&t, &w)| (interval.to_unit(t), w))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut merged: Vec<(f64, f64)> = Vec::new();
    for (u, w) in pairs {
        match merged.last_mut() {
            Some(last) if u - last.0 < MERGE_TOL => {
                let mass = last.1 + w;
                last.0 = (last.0 * last.1 + u * w) / mass;
                last.1 = mass;
            }
            _ => merged.push((u, w)),
        }
    }
    let pts: Vec<f64> = merged.iter().map(|p| interval.from_unit(p.0)).collect();
    let ws: Vec<f64> = merged.iter().map(|p| p.1).collect();
    Design::normalized(&pts, &ws)
}

fn lambda_min(m: usize, points: &[(f64, f64)], eval: &dyn Fn(f64) -> Result<Vec<f64>>) -> Result<f64> {
    let mut mat = SymMatrix::zeros(m);
    for &(t, w) in points {
        mat.add_outer(w, &eval(t)?);
    }
    Ok(mat.eigen().values[0])
}

/// Step size of the exponentiated-gradient weight update.
const STEP: f64 = 0.3;

/// The E-optimal design on a grid followed by a continuous polish.
///
/// Weights on the grid are fitted by exponentiated-gradient ascent of the
/// smoothed criterion `-log(sum_i exp(-beta lambda_i)) / beta` with `beta`
/// increasing; small weights are pruned, neighbouring points merged, and
/// points and weights refined by a pattern search on `lambda_min`.
pub fn brute_force_e<S: FunctionSystem + ?Sized>(system: &S, opts: &OracleOptions) -> Result<Design> {
    let m = system.dim();
    let interval = system.interval();
    let grid = Grid::new(system, opts.grid_size)?;
    let n = grid.len();
    let mut w = vec![1.0 / n as f64; n];

    let stages = [10.0, 100.0, 1000.0, 10_000.0];
    let per_stage = (opts.iterations / stages.len()).max(1);
    for &beta in &stages {
        for _ in 0..per_stage {
            let mut mat = SymMatrix::zeros(m);
            for (j, &wj) in w.iter().enumerate() {
                if wj > 0.0 {
                    mat.add_outer(wj, grid.row(j));
                }
            }
            let eig = mat.eigen();
            let lmax = eig.values[m - 1];
            let scale = eig.values[0].max(1e-12 * lmax).max(f64::MIN_POSITIVE);
            let pis: Vec<f64> = eig
                .values
                .iter()
                .map(|&l| (-beta * (l - eig.values[0]) / scale).exp())
                .collect();
            let z: f64 = pis.iter().sum();
            let vecs: Vec<Vec<f64>> = (0..m).map(|k| eig.vector(k)).collect();
            let g: Vec<f64> = (0..n)
                .map(|j| {
                    let f = grid.row(j);
                    vecs.iter()
                        .zip(&pis)
                        .map(|(v, p)| p / z * dot(v, f).powi(2))
                        .sum()
                })
                .collect();
            let gbar: f64 = w.iter().zip(&g).map(|(a, b)| a * b).sum();
            let mut total = 0.0;
            for (wj, gj) in w.iter_mut().zip(&g) {
                *wj *= (STEP * (gj / gbar - 1.0)).clamp(-5.0, 5.0).exp();
                total += *wj;
            }
            for wj in &mut w {
                *wj /= total;
            }
        }
    }

    // prune and merge neighbouring grid points
    let mut clusters: Vec<(f64, f64)> = Vec::new();
    let mut prev: Option<usize> = None;
    for (j, &wj) in w.iter().enumerate() {
        if wj < 1e-6 {
            continue;
        }
        match (prev, clusters.last_mut()) {
            (Some(p), Some(last)) if p + 1 == j => {
                let mass = last.1 + wj;
                last.0 = (last.0 * last.1 + grid.u[j] * wj) / mass;
                last.1 = mass;
            }
            _ => clusters.push((grid.u[j], wj)),
        }
        prev = Some(j);
    }
    let total: f64 = clusters.iter().map(|c| c.1).sum();
    for c in &mut clusters {
        c.1 /= total;
    }

    let eval = |u: f64| system.eval(interval.from_unit(u));
    let objective = |cl: &[(f64, f64)]| lambda_min(m, cl, &eval);
    let umax = interval.unit_max();
    let mut best = objective(&clusters)?;
    let mut hp = 1.0 / n as f64;
    let mut hw = 1e-2;
    let mut evals = 0usize;
    while (hp > 1e-12 || hw > 1e-12) && evals < 200_000 {
        let mut improved = false;
        for i in 0..clusters.len() {
            for dir in [-1.0, 1.0] {
                if hp > 1e-12 {
                    let mut trial = clusters.clone();
                    trial[i].0 = (trial[i].0 + dir * hp).clamp(0.0, umax);
                    let v = objective(&trial)?;
                    evals += 1;
                    if v > best {
                        best = v;
                        clusters = trial;
                        improved = true;
                    }
                }
                if hw > 1e-12 && clusters.len() > 1 {
                    let mut trial = clusters.clone();
                    let nw = (trial[i].1 + dir * hw).max(0.0);
                    let rest: f64 = 1.0 - trial[i].1;
                    let scale = (1.0 - nw) / rest;
                    for (k, c) in trial.iter_mut().enumerate() {
                        c.1 = if k == i { nw } else { c.1 * scale };
                    }
                    let v = objective(&trial)?;
                    evals += 1;
                    if v > best {
                        best = v;
                        clusters = trial;
                        improved = true;
                    }
                }
            }
        }
        if !improved {
            hp *= 0.5;
            hw *= 0.5;
        }
    }

    let points: Vec<f64> = clusters.iter().map(|c| interval.from_unit(c.0)).collect();
    let weights: Vec<f64> = clusters.iter().map(|c| if c.1 < 1e-9 { 0.0 } else { c.1 }).collect();
    let design = merge_close(&interval, &points, &weights)?;
    if min_eigenvalue(system, &design)? <= 0.0 {
        return Err(Error::Design(
            "weight ascent did not separate the support; increase iterations".into(),
        ));
    }
    Ok(design)
}

/// `lambda_min(M(xi))`
pub fn min_eigenvalue<S: FunctionSystem + ?Sized>(system: &S, design: &Design) -> Result<f64> {
    Ok(info_matrix(system, design)?.eigen().values[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{FnSystem, Interval, ModelSpec};

    #[test]
    fn c_oracle_linear_slope() {
        let sys = FnSystem::monomials(1, Interval::new(-1.0, 1.0).unwrap());
        let r = brute_force_c(&sys, &[0.0, 1.0], &OracleOptions::default()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
        assert_eq!(r.design.support(), &[-1.0, 1.0]);
    }

    #[test]
    fn c_oracle_one_point_case() {
        let model = ModelSpec::rational(0, vec![-1.0], Interval::semi_infinite(0.0).unwrap()).unwrap();
        let r = brute_force_c(&model, &[1.0, 0.7], &OracleOptions::default()).unwrap();
        assert_eq!(r.design.len(), 1);
        assert!((r.design.support()[0] - (1.0 / 0.7 - 1.0)).abs() < 1e-6);
    }

    #[test]
    fn e_oracle_linear() {
        let sys = FnSystem::monomials(1, Interval::new(-1.0, 1.0).unwrap());
        let d = brute_force_e(&sys, &OracleOptions { grid_size: 101, iterations: 2000 }).unwrap();
        assert!((min_eigenvalue(&sys, &d).unwrap() - 1.0).abs() < 1e-6);
    }
}
