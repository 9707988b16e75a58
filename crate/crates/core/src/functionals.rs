//! Positive linear functionals on `M_n(C)` given by their density operators.
//!
//! A functional `psi` is stored as `Q_psi` with `psi(x) = Tr(Q_psi x)`. States
//! have `Tr(Q) = 1`; parts of a decomposition are allowed to be subnormalized
//! and every entropy formula is applied to them verbatim. Logarithms are
//! natural throughout.

use nalgebra::DMatrix;

use crate::masa::Masa;
use crate::matrix::{hermitian_eigendecomposition, ComplexMatrix, UnitaryMatrix};
use crate::stochastic::ProbabilityVector;
use crate::{tol, Error, Result, C64};

/// `eta(t) = -t ln t`, with `eta(0) = 0`.
pub fn eta(t: f64) -> Result<f64> {
    if t < 0.0 || t.is_nan() {
        return Err(Error::NegativeArgument(t));
    }
    Ok(eta_clipped(t))
}

/// `eta` with non-positive arguments mapped to 0. Used where the argument is
/// a computed weight that can dip a few ulps below zero.
pub(crate) fn eta_clipped(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        -t * t.ln()
    }
}

/// A positive linear functional, held as its density operator.
#[derive(Debug, Clone, PartialEq)]
pub struct StateFunctional {
    q: ComplexMatrix,
    trace: f64,
}

impl StateFunctional {
    /// Any positive functional: `q` Hermitian and positive semidefinite.
    pub fn positive(q: ComplexMatrix) -> Result<Self> {
        let eig = hermitian_eigendecomposition(&q)?;
        let min = eig.eigenvalues.last().copied().unwrap_or(0.0);
        if min < tol::PSD_FLOOR {
            return Err(Error::NotPositive(min));
        }
        let trace = q.trace().re;
        Ok(Self { q, trace })
    }

    /// A state: positive with unit trace.
    pub fn state(q: ComplexMatrix) -> Result<Self> {
        let s = Self::positive(q)?;
        if (s.trace - 1.0).abs() > tol::TRACE {
            return Err(Error::NotNormalized(s.trace));
        }
        Ok(s)
    }

    /// Diagonal functional `diag(weights)`.
    pub fn diagonal(weights: &[f64]) -> Result<Self> {
        Self::positive(ComplexMatrix::from_real_diagonal(weights)?)
    }

    /// The normalized trace `tau` on `M_n`.
    pub fn trace_state(n: usize) -> Result<Self> {
        Self::state(ComplexMatrix::from_real_diagonal(&vec![1.0 / n as f64; n])?)
    }

    /// Skips the eigenvalue check; used for operators positive by construction.
    pub(crate) fn from_parts_unchecked(q: ComplexMatrix) -> Self {
        let trace = q.trace().re;
        Self { q, trace }
    }

    pub fn density(&self) -> &ComplexMatrix {
        &self.q
    }

    pub fn trace(&self) -> f64 {
        self.trace
    }

    pub fn dim(&self) -> usize {
        self.q.dim()
    }

    pub fn is_state(&self) -> bool {
        (self.trace - 1.0).abs() <= tol::TRACE
    }

    /// `psi(x) = Tr(Q x)`.
    pub fn evaluate(&self, x: &ComplexMatrix) -> Result<C64> {
        if x.dim() != self.dim() {
            return Err(Error::DimensionMismatch(x.dim(), self.dim()));
        }
        Ok((self.q.matrix() * x.matrix()).trace())
    }

    /// Weights `psi(p_j)` on the minimal projections of `a`.
    pub fn weights_on(&self, a: &Masa) -> Result<Vec<f64>> {
        if a.dim() != self.dim() {
            return Err(Error::DimensionMismatch(a.dim(), self.dim()));
        }
        // psi(w e_j w*) = (w* Q w)(j, j)
        let w = a.diagonalizer().matrix();
        let rotated = w.adjoint() * self.q.matrix() * w;
        Ok((0..self.dim()).map(|j| rotated[(j, j)].re).collect())
    }

    /// The restriction `psi|_A`, as a functional on `M_n` whose density is
    /// `E_A(Q) = sum_j psi(p_j) p_j`.
    pub fn restrict(&self, a: &Masa) -> Result<Self> {
        let weights = self.weights_on(a)?;
        let n = self.dim();
        let w = a.diagonalizer().matrix();
        let d = DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                C64::new(weights[i].max(0.0), 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        Ok(Self::from_parts_unchecked(ComplexMatrix::new(w * d * w.adjoint())?))
    }
}

/// `S(psi) = Tr eta(Q_psi)`, summed over the spectrum with negatives clipped.
pub fn von_neumann_entropy(psi: &StateFunctional) -> f64 {
    let eig = hermitian_eigendecomposition(psi.density())
        .expect("density operators are Hermitian by construction");
    eig.eigenvalues.iter().map(|&mu| eta_clipped(mu)).sum()
}

/// `S(psi, phi) = Tr Q_psi (log Q_psi - log Q_phi)`.
///
/// Returns `+inf` when the support of `Q_psi` is not contained in the support
/// of `Q_phi`. Eigenvalues at or below [`tol::SUPPORT`] count as zero.
pub fn relative_entropy(psi: &StateFunctional, phi: &StateFunctional) -> Result<f64> {
    if psi.dim() != phi.dim() {
        return Err(Error::DimensionMismatch(psi.dim(), phi.dim()));
    }
    let ep = hermitian_eigendecomposition(psi.density())?;
    let ef = hermitian_eigendecomposition(phi.density())?;
    // overlap(a, b) = |<psi_a | phi_b>|^2
    let overlap = ep.vectors.matrix().adjoint() * ef.vectors.matrix();
    let n = psi.dim();

    let mut self_term = 0.0;
    let mut cross_term = 0.0;
    for a in 0..n {
        let mu = ep.eigenvalues[a];
        if mu <= tol::SUPPORT {
            continue;
        }
        self_term += mu * mu.ln();
        let mut outside = 0.0;
        for b in 0..n {
            let nu = ef.eigenvalues[b];
            let w = overlap[(a, b)].norm_sqr();
            if nu <= tol::SUPPORT {
                outside += w;
            } else {
                cross_term += mu * w * nu.ln();
            }
        }
        if mu * outside > tol::SUPPORT {
            return Ok(f64::INFINITY);
        }
    }
    Ok(self_term - cross_term)
}

/// `S(psi|_A) = sum_j eta(psi(p_j))`.
pub fn restricted_entropy(psi: &StateFunctional, a: &Masa) -> Result<f64> {
    Ok(psi.weights_on(a)?.into_iter().map(eta_clipped).sum())
}

/// A finite family of positive functionals summing to `whole`.
#[derive(Debug, Clone)]
pub struct Decomposition {
    parts: Vec<StateFunctional>,
    whole: StateFunctional,
}

impl Decomposition {
    pub fn new(parts: Vec<StateFunctional>, whole: StateFunctional) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::InvalidDecomposition("no parts".into()));
        }
        let n = whole.dim();
        let mut sum = DMatrix::<C64>::zeros(n, n);
        for p in &parts {
            if p.dim() != n {
                return Err(Error::DimensionMismatch(p.dim(), n));
            }
            sum += p.density().matrix();
        }
        let dev = crate::matrix::max_abs(&(sum - whole.density().matrix()));
        if dev > tol::SUM {
            return Err(Error::InvalidDecomposition(format!(
                "parts sum differs from whole by {dev:e}"
            )));
        }
        Ok(Self { parts, whole })
    }

    /// Parts with diagonal densities `weights[i]` (one row per part), summing
    /// to `diag(sum_i weights[i])`.
    pub fn diagonal(weights: &[Vec<f64>]) -> Result<Self> {
        let n = weights
            .first()
            .ok_or_else(|| Error::InvalidDecomposition("no parts".into()))?
            .len();
        let mut total = vec![0.0; n];
        let mut parts = Vec::with_capacity(weights.len());
        for row in weights {
            if row.len() != n {
                return Err(Error::DimensionMismatch(row.len(), n));
            }
            for (t, w) in total.iter_mut().zip(row) {
                *t += w;
            }
            parts.push(StateFunctional::diagonal(row)?);
        }
        Self::new(parts, StateFunctional::diagonal(&total)?)
    }

    pub fn parts(&self) -> &[StateFunctional] {
        &self.parts
    }

    pub fn whole(&self) -> &StateFunctional {
        &self.whole
    }
}

/// `-sum_i S(phi_i|_A) + S(phi|_A)`, which equals
/// `sum_i S(phi_i|_A, phi|_A)` for any decomposition of a state.
pub fn decomposition_entropy_sum(d: &Decomposition, a: &Masa) -> Result<f64> {
    if !d.whole.is_state() {
        return Err(Error::NotNormalized(d.whole.trace()));
    }
    let mut parts = 0.0;
    for p in &d.parts {
        parts += restricted_entropy(p, a)?;
    }
    Ok(restricted_entropy(&d.whole, a)? - parts)
}

/// The same quantity summed term by term as relative entropies of the
/// restrictions. Kept separate from [`decomposition_entropy_sum`] so the two
/// can be compared.
pub fn decomposition_relative_entropy_sum(d: &Decomposition, a: &Masa) -> Result<f64> {
    let whole = d.whole.restrict(a)?;
    let mut total = 0.0;
    for p in &d.parts {
        total += relative_entropy(&p.restrict(a)?, &whole)?;
    }
    Ok(total)
}

/// Spectral decomposition of a state into the parts `lambda_i e_i`.
#[derive(Debug, Clone)]
pub struct SpectralSplit {
    pub decomposition: Decomposition,
    /// MASA generated by the eigenprojections `e_i`.
    pub eigenbasis: Masa,
    /// Eigenvalues, non-increasing.
    pub lambda: ProbabilityVector,
}

pub fn spectral_split(phi: &StateFunctional) -> Result<SpectralSplit> {
    if !phi.is_state() {
        return Err(Error::NotNormalized(phi.trace()));
    }
    let eig = hermitian_eigendecomposition(phi.density())?;
    let eigenbasis = Masa::from_diagonalizer(eig.vectors.clone())?;
    let lambda: Vec<f64> = eig.eigenvalues.iter().map(|&l| l.max(0.0)).collect();
    let parts = eigenbasis
        .projections()
        .iter()
        .zip(&lambda)
        .map(|(p, &l)| {
            StateFunctional::from_parts_unchecked(
                ComplexMatrix::new(p.matrix().scale(l)).expect("finite"),
            )
        })
        .collect();
    let decomposition = Decomposition::new(parts, phi.clone())?;
    Ok(SpectralSplit {
        decomposition,
        eigenbasis,
        lambda: ProbabilityVector::new(lambda)?,
    })
}

/// Inner perturbation `phi_v(x) = phi(v x v*)`, with density `v* Q_phi v`.
pub fn inner_perturbation(phi: &StateFunctional, v: &UnitaryMatrix) -> Result<StateFunctional> {
    if v.dim() != phi.dim() {
        return Err(Error::DimensionMismatch(v.dim(), phi.dim()));
    }
    let q = v.matrix().adjoint() * phi.density().matrix() * v.matrix();
    // Re-symmetrize against rounding in the triple product.
    let q = (&q + q.adjoint()).scale(0.5);
    Ok(StateFunctional::from_parts_unchecked(ComplexMatrix::new(q)?))
}
