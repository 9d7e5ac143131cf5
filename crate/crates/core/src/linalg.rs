//! Dense symmetric matrices and the small amount of linear algebra the design
//! routines need: a cyclic Jacobi eigensolver, inverses and a pseudo-inverse.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Dense symmetric matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix(DMatrix<f64>);

impl SymMatrix {
    pub fn zeros(order: usize) -> Self {
        Self(DMatrix::zeros(order, order))
    }

    /// Wrap a square matrix, rejecting it unless it is symmetric to `1e-12`
    /// relative to its largest entry. The stored matrix is exactly symmetric.
    pub fn from_matrix(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Parameter("matrix is not square".into()));
        }
        let scale = m.amax().max(f64::MIN_POSITIVE);
        let asym = (&m - m.transpose()).amax();
        if asym > 1e-12 * scale {
            return Err(Error::Parameter(format!(
                "matrix is not symmetric (asymmetry {asym:e})"
            )));
        }
        Ok(Self((&m + m.transpose()) * 0.5))
    }

    pub fn order(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    /// `self += weight * v v^T`
    pub fn add_outer(&mut self, weight: f64, v: &[f64]) {
        let n = self.order();
        for i in 0..n {
            let wi = weight * v[i];
            for j in 0..=i {
                let val = wi * v[j];
                self.0[(i, j)] += val;
                if i != j {
                    self.0[(j, i)] += val;
                }
            }
        }
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        Self(&self.0 * alpha)
    }

    pub fn add(&self, other: &SymMatrix) -> Self {
        Self(&self.0 + &other.0)
    }

    /// `D M D` for a diagonal `D` given by its entries.
    pub fn conjugate_diag(&self, d: &[f64]) -> Self {
        let n = self.order();
        Self(DMatrix::from_fn(n, n, |i, j| d[i] * self.0[(i, j)] * d[j]))
    }

    /// `v^T M w`
    pub fn bilinear(&self, v: &[f64], w: &[f64]) -> f64 {
        let n = self.order();
        let mut acc = 0.0;
        for i in 0..n {
            let mut row = 0.0;
            for j in 0..n {
                row += self.0[(i, j)] * w[j];
            }
            acc += v[i] * row;
        }
        acc
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (&self.0 * DVector::from_column_slice(v)).as_slice().to_vec()
    }

    pub fn eigen(&self) -> SymEigen {
        sym_eigen(self)
    }

    /// Inverse by LU with partial pivoting.
    pub fn inverse(&self) -> Result<DMatrix<f64>> {
        let n = self.order();
        let lu = self.0.clone().lu();
        let inv = lu.try_inverse().ok_or(Error::RankDeficient {
            rank: self.rank(),
            order: n,
        })?;
        if inv.iter().any(|v| !v.is_finite()) {
            return Err(Error::RankDeficient {
                rank: self.rank(),
                order: n,
            });
        }
        Ok((&inv + inv.transpose()) * 0.5)
    }

    /// Numerical rank with singular values below `1e-10 * sigma_max` treated
    /// as zero.
    pub fn rank(&self) -> usize {
        let eig = self.eigen();
        let smax = eig.values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        eig.values
            .iter()
            .filter(|v| v.abs() > PINV_CUTOFF * smax)
            .count()
    }

    /// Moore-Penrose pseudo-inverse, zeroing singular values below
    /// `1e-10 * sigma_max`.
    pub fn pinv(&self) -> DMatrix<f64> {
        let eig = self.eigen();
        let n = self.order();
        let smax = eig.values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let mut out = DMatrix::zeros(n, n);
        for (k, &lam) in eig.values.iter().enumerate() {
            if lam.abs() <= PINV_CUTOFF * smax || lam == 0.0 {
                continue;
            }
            let v = eig.vectors.column(k);
            out += (v * v.transpose()) / lam;
        }
        out
    }
}

/// Relative cutoff for the pseudo-inverse and the numerical rank.
pub const PINV_CUTOFF: f64 = 1e-10;

/// Spectral decomposition of a symmetric matrix.
#[derive(Clone, Debug)]
pub struct SymEigen {
    /// Eigenvalues in ascending order.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors, one column per eigenvalue.
    pub vectors: DMatrix<f64>,
}

impl SymEigen {
    pub fn vector(&self, k: usize) -> Vec<f64> {
        self.vectors.column(k).iter().copied().collect()
    }
}

/// Cyclic Jacobi eigenvalue algorithm.
///
/// Sweeps over all off-diagonal pairs until the off-diagonal Frobenius norm
/// drops below `1e-15` times the norm of the matrix (or 100 sweeps).
pub fn sym_eigen(m: &SymMatrix) -> SymEigen {
    let n = m.order();
    let mut a = m.0.clone();
    let mut v = DMatrix::<f64>::identity(n, n);
    let total = a.norm();

    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)] * a[(i, j)])
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * total || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = a[(p, p)];
                let aqq = a[(q, q)];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;

                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    SymEigen { values, vectors }
}

/// Euclidean inner product.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solve the square system `a x = rhs` by LU with partial pivoting.
pub fn solve(a: &DMatrix<f64>, rhs: &[f64]) -> Result<Vec<f64>> {
    let n = a.nrows();
    let lu = a.clone().lu();
    let x = lu
        .solve(&DVector::from_column_slice(rhs))
        .ok_or(Error::RankDeficient { rank: n - 1, order: n })?;
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::RankDeficient { rank: n - 1, order: n });
    }
    Ok(x.as_slice().to_vec())
}

/// Determinant by LU.
pub fn det(a: &DMatrix<f64>) -> f64 {
    a.clone().lu().determinant()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sym(rows: &[&[f64]]) -> SymMatrix {
        let n = rows.len();
        SymMatrix::from_matrix(DMatrix::from_fn(n, n, |i, j| rows[i][j])).unwrap()
    }

    #[test]
    fn identity_and_diagonal() {
        let e = sym_eigen(&SymMatrix::from_matrix(DMatrix::identity(3, 3)).unwrap());
        assert_eq!(e.values, vec![1.0, 1.0, 1.0]);

        let e = sym_eigen(&sym(&[&[2.0, 0.0], &[0.0, 1.0]]));
        assert_eq!(e.values, vec![1.0, 2.0]);
        assert_eq!(e.vector(0).iter().map(|v| v.abs()).collect::<Vec<_>>(), vec![0.0, 1.0]);
    }

    #[test]
    fn rank_one() {
        // characteristic polynomial lambda^2 - 2 lambda
        let e = sym_eigen(&sym(&[&[1.0, 1.0], &[1.0, 1.0]]));
        assert!(e.values[0].abs() < 1e-15);
        assert!((e.values[1] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_asymmetric() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.1, 1.0]);
        assert!(SymMatrix::from_matrix(m).is_err());
    }

    #[test]
    fn pinv_of_rank_one() {
        let m = sym(&[&[1.0, 1.0], &[1.0, 1.0]]);
        let p = m.pinv();
        for v in p.iter() {
            assert!((v - 0.25).abs() < 1e-14);
        }
        assert_eq!(m.rank(), 1);
        assert!(m.inverse().is_err());
    }

    fn arb_sym(n: usize) -> impl Strategy<Value = SymMatrix> {
        proptest::collection::vec(-10.0f64..10.0, n * n).prop_map(move |v| {
            let a = DMatrix::from_vec(n, n, v);
            SymMatrix::from_matrix((&a + a.transpose()) * 0.5).unwrap()
        })
    }

    proptest! {
        #[test]
        fn eigenpairs_are_accurate(m in (1usize..7).prop_flat_map(arb_sym)) {
            let e = sym_eigen(&m);
            let n = m.order();
            let norm = m.as_matrix().norm().max(1.0);
            for k in 0..n {
                let v = e.vectors.column(k);
                let r = m.as_matrix() * v - v * e.values[k];
                prop_assert!(r.norm() <= 1e-10 * norm);
            }
            let gram = e.vectors.transpose() * &e.vectors;
            prop_assert!((gram - DMatrix::identity(n, n)).amax() <= 1e-10);
            for w in e.values.windows(2) {
                prop_assert!(w[0] <= w[1]);
            }
            // independent solver
            let mut reference: Vec<f64> =
                m.as_matrix().clone().symmetric_eigen().eigenvalues.iter().copied().collect();
            reference.sort_by(f64::total_cmp);
            for (a, b) in e.values.iter().zip(&reference) {
                prop_assert!((a - b).abs() <= 1e-10 * norm);
            }
        }
    }
}
