//! Dense complex matrices and the unitaries the rest of the crate consumes.

use std::f64::consts::PI;
use std::ops::Deref;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::{tol, Error, Result, C64};

/// Square complex matrix with finite entries, `n >= 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<C64>);

impl ComplexMatrix {
    pub fn new(m: DMatrix<C64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        if m.nrows() == 0 {
            return Err(Error::ZeroDimension);
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self(m))
    }

    /// Row-major construction.
    pub fn from_row_slice(n: usize, entries: &[C64]) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch(entries.len(), n * n));
        }
        Self::new(DMatrix::from_row_slice(n, n, entries))
    }

    pub fn from_real_diagonal(d: &[f64]) -> Result<Self> {
        let n = d.len();
        Self::new(DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                C64::new(d[i], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        }))
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::new(DMatrix::identity(n, n))
    }

    /// Matrix unit `e_{ij}` (0-based indices).
    pub fn unit(n: usize, i: usize, j: usize) -> Result<Self> {
        let mut m = DMatrix::zeros(n, n);
        m[(i, j)] = C64::new(1.0, 0.0);
        Self::new(m)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<C64> {
        self.0
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    /// Real parts of the diagonal.
    pub fn real_diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.0[(i, i)].re).collect()
    }

    /// `max |x(i,j) - x(j,i)*|`.
    pub fn hermitian_deviation(&self) -> f64 {
        max_abs(&(&self.0 - self.0.adjoint()))
    }

    pub fn max_off_diagonal(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    worst = worst.max(self.0[(i, j)].norm());
                }
            }
        }
        worst
    }

    /// Trace `Tr(x)`.
    pub fn trace(&self) -> C64 {
        self.0.trace()
    }
}

impl Deref for ComplexMatrix {
    type Target = DMatrix<C64>;

    fn deref(&self) -> &DMatrix<C64> {
        &self.0
    }
}

/// Largest entry modulus.
pub fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

/// A [`ComplexMatrix`] verified unitary at [`tol::UNITARY`].
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix(ComplexMatrix);

impl UnitaryMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        let dev = unitarity_deviation(&m);
        if dev > tol::UNITARY {
            return Err(Error::NotUnitary(dev));
        }
        Ok(Self(m))
    }

    /// Wraps without checking; callers guarantee unitarity by construction.
    pub(crate) fn new_unchecked(m: DMatrix<C64>) -> Self {
        Self(ComplexMatrix(m))
    }

    pub fn identity(n: usize) -> Result<Self> {
        Ok(Self(ComplexMatrix::identity(n)?))
    }

    pub fn as_complex(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    /// Product of two unitaries.
    pub fn compose(&self, other: &UnitaryMatrix) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(self.dim(), other.dim()));
        }
        Ok(Self::new_unchecked(self.matrix() * other.matrix()))
    }
}

impl Deref for UnitaryMatrix {
    type Target = ComplexMatrix;

    fn deref(&self) -> &ComplexMatrix {
        &self.0
    }
}

fn unitarity_deviation(m: &ComplexMatrix) -> f64 {
    let n = m.dim();
    let prod = m.matrix() * m.matrix().adjoint();
    max_abs(&(prod - DMatrix::<C64>::identity(n, n)))
}

/// True iff `max |m m* - 1| <= tol`.
pub fn is_unitary(m: &ComplexMatrix, tol: f64) -> bool {
    unitarity_deviation(m) <= tol
}

/// Eigenvalues sorted non-increasing, with the matching eigenvector columns.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub eigenvalues: Vec<f64>,
    pub vectors: UnitaryMatrix,
}

/// Diagonalizes a Hermitian matrix: `h = v diag(eigenvalues) v*`.
///
/// Inputs that are already diagonal (off-diagonal at most `1e-13`) skip the
/// iterative solver and return a permutation unitary, so diagonal density
/// operators keep the standard basis even under degenerate spectra. Ties are
/// broken by a stable sort over the solver's output order.
pub fn hermitian_eigendecomposition(h: &ComplexMatrix) -> Result<HermitianEigen> {
    let dev = h.hermitian_deviation();
    if dev > tol::HERMITIAN {
        return Err(Error::NotHermitian(dev));
    }
    let n = h.dim();
    let (values, vectors): (Vec<f64>, DMatrix<C64>) = if h.max_off_diagonal() <= 1e-13 {
        (h.real_diagonal(), DMatrix::identity(n, n))
    } else {
        // Symmetrize so the solver sees an exactly Hermitian input.
        let sym = (h.matrix() + h.matrix().adjoint()).scale(0.5);
        let eig = SymmetricEigen::new(sym);
        (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    let eigenvalues = order.iter().map(|&k| values[k]).collect();
    let sorted = DMatrix::from_fn(n, n, |i, j| vectors[(i, order[j])]);
    Ok(HermitianEigen {
        eigenvalues,
        vectors: UnitaryMatrix::new_unchecked(sorted),
    })
}

/// Fourier matrix `u(j,k) = exp(2 pi i jk/n) / sqrt(n)`.
pub fn fourier_matrix(n: usize) -> Result<UnitaryMatrix> {
    if n == 0 {
        return Err(Error::ZeroDimension);
    }
    let scale = 1.0 / (n as f64).sqrt();
    let m = DMatrix::from_fn(n, n, |j, k| {
        // jk mod n keeps the phase argument small for larger n.
        let phase = 2.0 * PI * ((j * k) % n) as f64 / n as f64;
        C64::from_polar(scale, phase)
    });
    Ok(UnitaryMatrix::new_unchecked(m))
}

/// Seeded random unitary: QR of a complex Gaussian matrix with the phases of
/// `R`'s diagonal folded back into `Q`.
pub fn random_unitary(n: usize, seed: u64) -> Result<UnitaryMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_unitary_with(n, &mut rng)
}

pub fn random_unitary_with<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<UnitaryMatrix> {
    if n == 0 {
        return Err(Error::ZeroDimension);
    }
    let g = DMatrix::from_fn(n, n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re, im)
    });
    let qr = g.qr();
    let (mut q, r) = qr.unpack();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    UnitaryMatrix::new(ComplexMatrix::new(q)?)
}

/// Permutation unitary with `u(i,j) = 1` iff `i = perm[j]` (0-based).
pub fn permutation_unitary(perm: &[usize]) -> Result<UnitaryMatrix> {
    let n = perm.len();
    if n == 0 {
        return Err(Error::ZeroDimension);
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || seen[p] {
            return Err(Error::NotPermutation(format!("{perm:?}")));
        }
        seen[p] = true;
    }
    let m = DMatrix::from_fn(n, n, |i, j| {
        if i == perm[j] {
            C64::new(1.0, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    Ok(UnitaryMatrix::new_unchecked(m))
}

/// Diagonal unitary with the given phases.
pub fn phase_unitary(phases: &[f64]) -> Result<UnitaryMatrix> {
    let n = phases.len();
    if n == 0 {
        return Err(Error::ZeroDimension);
    }
    let m = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            C64::from_polar(1.0, phases[i])
        } else {
            C64::new(0.0, 0.0)
        }
    });
    Ok(UnitaryMatrix::new_unchecked(m))
}

/// Real 2x2 rotation `[[c, -s], [s, c]]` with `c = cos(theta)`.
pub fn rotation(theta: f64) -> UnitaryMatrix {
    let (s, c) = theta.sin_cos();
    let m = DMatrix::from_row_slice(
        2,
        2,
        &[
            C64::new(c, 0.0),
            C64::new(-s, 0.0),
            C64::new(s, 0.0),
            C64::new(c, 0.0),
        ],
    );
    UnitaryMatrix::new_unchecked(m)
}
