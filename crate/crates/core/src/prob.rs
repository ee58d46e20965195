//! Edge-probability matrices.

use nalgebra::DMatrix;

use crate::error::{invalid, Result};

/// Symmetric `n x n` matrix of edge probabilities with zero diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbMatrix(DMatrix<f64>);

impl ProbMatrix {
    /// Validates symmetry (exact), range `[0, 1]` and the zero diagonal.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        let n = m.nrows();
        if m.ncols() != n {
            return Err(invalid("probability matrix must be square"));
        }
        for i in 0..n {
            if m[(i, i)] != 0.0 {
                return Err(invalid(format!("nonzero diagonal at {i}")));
            }
            for j in 0..n {
                let v = m[(i, j)];
                if !(0.0..=1.0).contains(&v) {
                    return Err(invalid(format!("entry ({i}, {j}) = {v} outside [0, 1]")));
                }
                if v != m[(j, i)] {
                    return Err(invalid(format!("asymmetric at ({i}, {j})")));
                }
            }
        }
        Ok(ProbMatrix(m))
    }

    /// Symmetrizes by averaging, clips to `[0, 1]` and zeroes the diagonal.
    /// Used at the end of estimators whose raw output is only approximately
    /// a probability matrix.
    pub fn from_raw(mut m: DMatrix<f64>) -> Result<Self> {
        let n = m.nrows();
        if m.ncols() != n {
            return Err(invalid("probability matrix must be square"));
        }
        for i in 0..n {
            m[(i, i)] = 0.0;
            for j in (i + 1)..n {
                let v = 0.5 * (m[(i, j)] + m[(j, i)]);
                let v = if v.is_nan() { 0.0 } else { v.clamp(0.0, 1.0) };
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        Ok(ProbMatrix(m))
    }

    pub fn zeros(n: usize) -> Self {
        ProbMatrix(DMatrix::zeros(n, n))
    }

    pub fn n(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }

    /// Mean over off-diagonal entries.
    pub fn off_diagonal_mean(&self) -> f64 {
        let n = self.n();
        if n < 2 {
            return 0.0;
        }
        self.0.sum() / (n * (n - 1)) as f64
    }

    /// Simultaneous row/column relabeling: entry `(i, j)` moves to
    /// `(perm[i], perm[j])`.
    pub fn permute(&self, perm: &[usize]) -> Result<Self> {
        crate::graph::check_permutation(perm, self.n())?;
        let n = self.n();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(perm[i], perm[j])] = self.0[(i, j)];
            }
        }
        Ok(ProbMatrix(m))
    }
}

/// Mean squared error over unordered off-diagonal pairs:
/// `2 / (n (n - 1)) * sum_{i<j} (a_ij - b_ij)^2`.
pub fn mse_vs_truth(p_hat: &ProbMatrix, p_true: &ProbMatrix) -> Result<f64> {
    let n = p_hat.n();
    if p_true.n() != n {
        return Err(invalid(format!("dimension mismatch: {n} vs {}", p_true.n())));
    }
    if n < 2 {
        return Ok(0.0);
    }
    let mut acc = 0.0;
    for j in 0..n {
        for i in 0..j {
            let d = p_hat.get(i, j) - p_true.get(i, j);
            acc += d * d;
        }
    }
    Ok(2.0 * acc / (n * (n - 1)) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn off_diag(n: usize, c: f64) -> ProbMatrix {
        ProbMatrix::new(DMatrix::from_fn(n, n, |i, j| if i == j { 0.0 } else { c })).unwrap()
    }

    #[test]
    fn mse_examples() {
        let a = off_diag(5, 0.3);
        assert_eq!(mse_vs_truth(&a, &a).unwrap(), 0.0);
        assert_eq!(mse_vs_truth(&off_diag(5, 0.0), &off_diag(5, 1.0)).unwrap(), 1.0);
        let m = mse_vs_truth(&off_diag(6, 0.4), &off_diag(6, 0.3)).unwrap();
        assert!((m - 0.01).abs() < 1e-15);
        assert!(mse_vs_truth(&off_diag(5, 0.0), &off_diag(4, 0.0)).is_err());
    }

    #[test]
    fn validation() {
        assert!(ProbMatrix::new(DMatrix::from_row_slice(2, 2, &[0.0, 0.5, 0.4, 0.0])).is_err());
        assert!(ProbMatrix::new(DMatrix::from_row_slice(2, 2, &[0.1, 0.5, 0.5, 0.0])).is_err());
        assert!(ProbMatrix::new(DMatrix::from_row_slice(2, 2, &[0.0, 1.5, 1.5, 0.0])).is_err());
        let p = ProbMatrix::from_raw(DMatrix::from_row_slice(2, 2, &[3.0, 1.5, 0.5, 2.0])).unwrap();
        assert_eq!(p.as_matrix().as_slice(), &[0.0, 1.0, 1.0, 0.0]);
    }
}
