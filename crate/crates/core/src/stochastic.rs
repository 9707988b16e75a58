//! Bistochastic and unistochastic matrices and their entropies.

use nalgebra::DMatrix;

use crate::functionals::eta_clipped;
use crate::matrix::UnitaryMatrix;
use crate::{tol, Error, Result};

/// Nonnegative real matrix with unit row and column sums.
#[derive(Debug, Clone, PartialEq)]
pub struct BistochasticMatrix(DMatrix<f64>);

impl BistochasticMatrix {
    /// Validates sums; entries in `[-1e-12, 0)` are clipped to zero.
    pub fn new(mut b: DMatrix<f64>) -> Result<Self> {
        if b.nrows() != b.ncols() {
            return Err(Error::NotSquare {
                rows: b.nrows(),
                cols: b.ncols(),
            });
        }
        if b.nrows() == 0 {
            return Err(Error::ZeroDimension);
        }
        for x in b.iter_mut() {
            if !x.is_finite() || *x < -tol::CLIP {
                return Err(Error::NotBistochastic(format!("entry {x}")));
            }
            if *x < 0.0 {
                *x = 0.0;
            }
        }
        for i in 0..b.nrows() {
            let row = b.row(i).sum();
            let col = b.column(i).sum();
            if (row - 1.0).abs() > tol::BISTOCHASTIC || (col - 1.0).abs() > tol::BISTOCHASTIC {
                return Err(Error::NotBistochastic(format!(
                    "row/column {i} sums to {row}/{col}"
                )));
            }
        }
        Ok(Self(b))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }
}

/// Nonnegative weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityVector(Vec<f64>);

impl ProbabilityVector {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::ZeroDimension);
        }
        if let Some(x) = p.iter().find(|x| !x.is_finite() || **x < 0.0) {
            return Err(Error::NotProbability(format!("entry {x}")));
        }
        let s: f64 = p.iter().sum();
        if (s - 1.0).abs() > tol::TRACE {
            return Err(Error::NotProbability(format!("sum {s}")));
        }
        Ok(Self(p))
    }

    pub fn uniform(n: usize) -> Result<Self> {
        Self::new(vec![1.0 / n as f64; n])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// `b(u)(i,j) = |u(i,j)|^2`.
pub fn unistochastic(u: &UnitaryMatrix) -> BistochasticMatrix {
    let n = u.dim();
    // Row and column sums of |u|^2 are 1 by unitarity; rounding can push a
    // modulus a few ulps past 1.
    BistochasticMatrix(DMatrix::from_fn(n, n, |i, j| u[(i, j)].norm_sqr().min(1.0)))
}

/// `H(b) = (1/n) sum_{i,j} eta(b(i,j))`, in `[0, ln n]`.
pub fn entropy(b: &BistochasticMatrix) -> f64 {
    b.0.iter().map(|&x| eta_clipped(x)).sum::<f64>() / b.dim() as f64
}

/// `H_lambda(b) = sum_k lambda_k sum_j eta(b(j,k))`.
pub fn weighted_entropy(b: &BistochasticMatrix, lambda: &ProbabilityVector) -> Result<f64> {
    if lambda.len() != b.dim() {
        return Err(Error::DimensionMismatch(lambda.len(), b.dim()));
    }
    Ok(lambda
        .as_slice()
        .iter()
        .enumerate()
        .map(|(k, &l)| l * b.0.column(k).iter().map(|&x| eta_clipped(x)).sum::<f64>())
        .sum())
}

/// `b*`, which for a real matrix is the transpose.
pub fn transpose(b: &BistochasticMatrix) -> BistochasticMatrix {
    BistochasticMatrix(b.0.transpose())
}
