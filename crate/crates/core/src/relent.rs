//! Conditional relative entropy of MASAs.
//!
//! Closed forms:
//!
//! - `h_phi(D | uDu*) = H_lambda(b(u)^T) + S(phi|_D) - S(phi|_{uDu*})` for a
//!   state `phi` whose density is diagonal with weights `lambda`;
//! - `h(A | B) = H(b(u))` with `u = u(A, B)` written in the matrix units of `A`.
//!
//! Both are suprema by definition: over decompositions `phi = sum_i phi_i` with
//! densities in `D`, and over partitions of unity made of scalar multiples of
//! projections in `A`. [`h_phi_variational`] and [`h_trace_variational`]
//! evaluate those objectives on the canonical witnesses and on random
//! families, so the closed forms can be checked from both sides: the witness
//! attains them and nothing found exceeds them.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::Exp1;

use crate::functionals::{
    decomposition_entropy_sum, eta_clipped, restricted_entropy, spectral_split, Decomposition,
    StateFunctional,
};
use crate::masa::{conditional_expectation, conjugate_masa, connecting_unitary_in_basis, diagonal_masa, Masa};
use crate::matrix::{hermitian_eigendecomposition, max_abs, ComplexMatrix, UnitaryMatrix};
use crate::par::{self, Execution};
use crate::stochastic::{entropy, transpose, unistochastic, weighted_entropy, ProbabilityVector};
use crate::{tol, Error, Result, C64};

/// Finite family of positive matrices summing to the identity.
#[derive(Debug, Clone)]
pub struct PartitionOfUnity {
    parts: Vec<ComplexMatrix>,
    /// Set when every part is a scalar multiple of a projection in a MASA.
    scalar_projections: bool,
}

impl PartitionOfUnity {
    pub fn new(parts: Vec<ComplexMatrix>) -> Result<Self> {
        let n = parts
            .first()
            .ok_or_else(|| Error::InvalidPartition("no parts".into()))?
            .dim();
        let mut sum = DMatrix::<C64>::zeros(n, n);
        for (i, x) in parts.iter().enumerate() {
            if x.dim() != n {
                return Err(Error::DimensionMismatch(x.dim(), n));
            }
            let eig = hermitian_eigendecomposition(x)?;
            let min = eig.eigenvalues.last().copied().unwrap_or(0.0);
            if min < tol::PSD_FLOOR {
                return Err(Error::InvalidPartition(format!(
                    "part {i} has eigenvalue {min:e}"
                )));
            }
            sum += x.matrix();
        }
        let dev = max_abs(&(sum - DMatrix::identity(n, n)));
        if dev > tol::SUM {
            return Err(Error::InvalidPartition(format!(
                "parts sum to identity only within {dev:e}"
            )));
        }
        Ok(Self {
            parts,
            scalar_projections: false,
        })
    }

    /// `{c_t P_t}` for projections `P_t` and scalars `c_t >= 0`.
    pub fn scalar_projections(terms: Vec<(f64, ComplexMatrix)>) -> Result<Self> {
        let parts = terms
            .into_iter()
            .map(|(c, p)| ComplexMatrix::new(p.matrix().scale(c)))
            .collect::<Result<Vec<_>>>()?;
        let mut p = Self::new(parts)?;
        p.scalar_projections = true;
        Ok(p)
    }

    /// The minimal projections of `a`.
    pub fn minimal_projections(a: &Masa) -> Result<Self> {
        Self::scalar_projections(a.projections().iter().map(|p| (1.0, p.clone())).collect())
    }

    pub fn parts(&self) -> &[ComplexMatrix] {
        &self.parts
    }

    pub fn is_scalar_projection_family(&self) -> bool {
        self.scalar_projections
    }

    pub fn dim(&self) -> usize {
        self.parts[0].dim()
    }
}

/// Best family found by a variational search.
#[derive(Debug, Clone)]
pub enum Witness {
    Decomposition(Decomposition),
    Partition(PartitionOfUnity),
}

#[derive(Debug, Clone)]
pub struct VariationalReport {
    pub best_value: f64,
    pub closed_form: f64,
    /// `closed_form - best_value`.
    pub gap: f64,
    pub iterations: u64,
    pub seed: u64,
    /// Index of the winning candidate; 0 is the canonical witness.
    pub best_candidate: usize,
    pub witness: Witness,
}

/// The three summands of the `h_phi` closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HphiTerms {
    /// `H_lambda(b(u)^T)`.
    pub weighted_entropy: f64,
    /// `S(phi|_D)`.
    pub entropy_on_d: f64,
    /// `S(phi|_{uDu*})`.
    pub entropy_on_b: f64,
    pub value: f64,
}

fn require_diagonal_state(phi: &StateFunctional) -> Result<()> {
    let off = phi.density().max_off_diagonal();
    if off > tol::DIAGONAL {
        return Err(Error::NotDiagonal(off));
    }
    if !phi.is_state() {
        return Err(Error::NotNormalized(phi.trace()));
    }
    Ok(())
}

fn check_dims(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch(a, b));
    }
    Ok(())
}

/// Closed form for `h_phi(D | uDu*)` with its summands.
///
/// `phi` must be diagonal in the standard basis; its diagonal is `lambda`,
/// kept in place so that `lambda_k` weights row `k` of `u`.
pub fn h_phi_closed_terms(phi: &StateFunctional, u: &UnitaryMatrix) -> Result<HphiTerms> {
    check_dims(phi.dim(), u.dim())?;
    require_diagonal_state(phi)?;
    let n = phi.dim();
    let mut lambda: Vec<f64> = phi.density().real_diagonal().into_iter().map(|x| x.max(0.0)).collect();
    let s: f64 = lambda.iter().sum();
    lambda.iter_mut().for_each(|x| *x /= s);
    let lambda = ProbabilityVector::new(lambda)?;

    let d = diagonal_masa(n)?;
    let b = conjugate_masa(&d, u)?;
    let weighted = weighted_entropy(&transpose(&unistochastic(u)), &lambda)?;
    let on_d = restricted_entropy(phi, &d)?;
    let on_b = restricted_entropy(phi, &b)?;
    Ok(HphiTerms {
        weighted_entropy: weighted,
        entropy_on_d: on_d,
        entropy_on_b: on_b,
        value: weighted + on_d - on_b,
    })
}

pub fn h_phi_closed(phi: &StateFunctional, u: &UnitaryMatrix) -> Result<f64> {
    Ok(h_phi_closed_terms(phi, u)?.value)
}

/// Aligns an arbitrary state with the standard basis before evaluating the
/// closed form: `phi_v` with `v` the eigenbasis of `Q_phi`, so that `u` is read
/// in the eigenbasis of `phi`. Diagonal inputs are used as given.
pub fn h_phi_aligned(phi: &StateFunctional, u: &UnitaryMatrix) -> Result<(HphiTerms, StateFunctional, bool)> {
    if phi.density().max_off_diagonal() <= tol::DIAGONAL {
        return Ok((h_phi_closed_terms(phi, u)?, phi.clone(), false));
    }
    let split = spectral_split(phi)?;
    let aligned = crate::functionals::inner_perturbation(phi, split.eigenbasis.diagonalizer())?;
    Ok((h_phi_closed_terms(&aligned, u)?, aligned, true))
}

/// `h(A | B) = H(b(u))` for `u = u(A, B)` in the matrix units of `A`.
pub fn h_closed(a: &Masa, b: &Masa) -> Result<f64> {
    check_dims(a.dim(), b.dim())?;
    Ok(entropy(&unistochastic(&connecting_unitary_in_basis(a, b)?)))
}

/// The `h_phi` objective for a decomposition with densities in `D`,
/// `[S(phi|_D) - sum_i S(phi_i|_D)] - [S(phi|_B) - sum_i S(phi_i|_B)]`
/// with `B = uDu*`.
pub fn decomposition_objective(d: &Decomposition, u: &UnitaryMatrix) -> Result<f64> {
    let n = d.whole().dim();
    check_dims(n, u.dim())?;
    for part in d.parts().iter().chain(std::iter::once(d.whole())) {
        let off = part.density().max_off_diagonal();
        if off > tol::DIAGONAL {
            return Err(Error::NotDiagonal(off));
        }
    }
    let dm = diagonal_masa(n)?;
    let bm = conjugate_masa(&dm, u)?;
    Ok(decomposition_entropy_sum(d, &dm)? - decomposition_entropy_sum(d, &bm)?)
}

/// The `h` objective `sum_i [tau eta E_B(x_i) - tau eta(x_i)]` for a partition
/// of unity inside `A`. `tau eta` is evaluated through the spectrum.
pub fn partition_objective(p: &PartitionOfUnity, a: &Masa, b: &Masa) -> Result<f64> {
    check_dims(a.dim(), b.dim())?;
    check_dims(p.dim(), a.dim())?;
    let n = a.dim() as f64;
    let tau_eta = |x: &ComplexMatrix| -> Result<f64> {
        let eig = hermitian_eigendecomposition(x)?;
        Ok(eig.eigenvalues.iter().map(|&t| eta_clipped(t)).sum::<f64>() / n)
    };
    let mut total = 0.0;
    for (i, x) in p.parts().iter().enumerate() {
        if !a.contains(x, tol::COMMUTES) {
            return Err(Error::InvalidPartition(format!("part {i} is not in A")));
        }
        total += tau_eta(&conditional_expectation(b, x)?)? - tau_eta(x)?;
    }
    Ok(total)
}

/// `|h(A|B) - ln n| <= tol`.
pub fn is_entropy_maximal(a: &Masa, b: &Masa, tol: f64) -> Result<bool> {
    Ok((h_closed(a, b)? - (a.dim() as f64).ln()).abs() <= tol)
}

/// Dirichlet(1, ..., 1) sample of length `k`.
fn dirichlet_flat<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Vec<f64> {
    let mut w: Vec<f64> = (0..k).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let s: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= s);
    w
}

/// Random split of diagonal weights `lambda` into `parts` diagonal parts:
/// the weight of coordinate `k` is spread over the parts by an independent
/// Dirichlet(1, ..., 1) column. Returned as one row of weights per part.
pub fn random_diagonal_split<R: Rng + ?Sized>(lambda: &[f64], parts: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let mut w = vec![vec![0.0; lambda.len()]; parts];
    for (k, &l) in lambda.iter().enumerate() {
        let col = dirichlet_flat(parts, rng);
        for (row, c) in w.iter_mut().zip(col) {
            row[k] = l * c;
        }
    }
    w
}

/// Random family of scalar multiples of projections in `a`: a random grouping
/// of the minimal projections, each group projection split into one to three
/// scalar multiples with Dirichlet weights.
pub fn random_scalar_projection_family<R: Rng + ?Sized>(a: &Masa, rng: &mut R) -> Result<PartitionOfUnity> {
    let n = a.dim();
    let labels: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
    let mut terms = Vec::new();
    for g in 0..n {
        let members: Vec<usize> = (0..n).filter(|&j| labels[j] == g).collect();
        if members.is_empty() {
            continue;
        }
        let mut proj = DMatrix::<C64>::zeros(n, n);
        for &j in &members {
            proj += a.projections()[j].matrix();
        }
        let proj = ComplexMatrix::new(proj)?;
        let copies = rng.random_range(1..=3);
        for c in dirichlet_flat(copies, rng) {
            terms.push((c, proj.clone()));
        }
    }
    PartitionOfUnity::scalar_projections(terms)
}

/// Objective of a diagonal split up to an additive constant, with
/// `b(k, j) = |u(k, j)|^2`:
/// `sum_i [sum_j eta((W b)_ij) - sum_j eta(W_ij)]`, one term per row.
struct SplitObjective<'a> {
    b: &'a DMatrix<f64>,
}

impl SplitObjective<'_> {
    fn row(&self, w: &[f64]) -> f64 {
        let n = w.len();
        let mut t = 0.0;
        for j in 0..n {
            let mixed: f64 = (0..n).map(|k| w[k] * self.b[(k, j)]).sum();
            t += eta_clipped(mixed) - eta_clipped(w[j]);
        }
        t
    }
}

const MIN_STEP: f64 = 1e-6;
/// A candidate replaces the incumbent only if it is better by more than this,
/// so exact ties keep the canonical witness.
const TIE: f64 = 1e-12;
const MAX_SWEEPS: u64 = 5_000;

/// Greedy coordinate transfers of weight between parts with step halving.
/// Returns the number of sweeps performed.
fn improve_split(w: &mut [Vec<f64>], obj: &SplitObjective<'_>) -> u64 {
    let m = w.len();
    let n = w.first().map_or(0, Vec::len);
    let mut rows: Vec<f64> = w.iter().map(|r| obj.row(r)).collect();
    let mut step = 0.5;
    let mut sweeps = 0;
    while step >= MIN_STEP && sweeps < MAX_SWEEPS {
        sweeps += 1;
        let mut gain = 0.0;
        for k in 0..n {
            for src in 0..m {
                for dst in 0..m {
                    if src == dst || w[src][k] <= 0.0 {
                        continue;
                    }
                    let amount = step * w[src][k];
                    let (old_src, old_dst) = (w[src][k], w[dst][k]);
                    w[src][k] = old_src - amount;
                    w[dst][k] = old_dst + amount;
                    let (ns, nd) = (obj.row(&w[src]), obj.row(&w[dst]));
                    let delta = ns + nd - rows[src] - rows[dst];
                    if delta > 0.0 {
                        rows[src] = ns;
                        rows[dst] = nd;
                        gain += delta;
                    } else {
                        w[src][k] = old_src;
                        w[dst][k] = old_dst;
                    }
                }
            }
        }
        if gain < tol::LOCAL_GAIN {
            step *= 0.5;
        }
    }
    sweeps
}

/// Variational evaluation of `h_phi(D | uDu*)` over decompositions with
/// diagonal densities.
///
/// Candidate 0 is the spectral split of `phi`; candidates `1..=restarts` are
/// random Dirichlet splits into `n` parts, each refined by local search. The
/// report is identical for every [`Execution`] mode.
pub fn h_phi_variational(phi: &StateFunctional, u: &UnitaryMatrix, restarts: usize, seed: u64) -> Result<VariationalReport> {
    h_phi_variational_with(phi, u, restarts, seed, Execution::default())
}

pub fn h_phi_variational_with(
    phi: &StateFunctional,
    u: &UnitaryMatrix,
    restarts: usize,
    seed: u64,
    exec: Execution,
) -> Result<VariationalReport> {
    check_dims(phi.dim(), u.dim())?;
    require_diagonal_state(phi)?;
    // Work with the exact diagonal so every candidate lies in D.
    let lambda = phi.density().real_diagonal();
    let phi = StateFunctional::diagonal(&lambda)?;
    let closed_form = h_phi_closed(&phi, u)?;

    let canonical = spectral_split(&phi)?.decomposition;
    let canonical_value = decomposition_objective(&canonical, u)?;

    let b = unistochastic(u).entries().clone();
    let obj = SplitObjective { b: &b };
    let n = phi.dim();
    let searched = par::map_indexed(exec, restarts, |r| -> Result<(f64, u64, Decomposition)> {
        let mut rng = par::task_rng(seed, r);
        let mut w = random_diagonal_split(&lambda, n, &mut rng);
        let sweeps = improve_split(&mut w, &obj);
        let d = Decomposition::diagonal(&w)?;
        Ok((decomposition_objective(&d, u)?, sweeps, d))
    });

    let mut best_value = canonical_value;
    let mut best_candidate = 0;
    let mut witness = canonical;
    let mut iterations = 0;
    for (r, res) in searched.into_iter().enumerate() {
        let (value, sweeps, d) = res?;
        iterations += sweeps;
        if value > best_value + TIE {
            best_value = value;
            best_candidate = r + 1;
            witness = d;
        }
    }
    Ok(VariationalReport {
        best_value,
        closed_form,
        gap: closed_form - best_value,
        iterations,
        seed,
        best_candidate,
        witness: Witness::Decomposition(witness),
    })
}

/// Variational evaluation of `h(A | B)` over scalar-projection families in
/// `A`. Candidate 0 is the family of minimal projections of `A`.
pub fn h_trace_variational(a: &Masa, b: &Masa, restarts: usize, seed: u64) -> Result<VariationalReport> {
    h_trace_variational_with(a, b, restarts, seed, Execution::default())
}

pub fn h_trace_variational_with(
    a: &Masa,
    b: &Masa,
    restarts: usize,
    seed: u64,
    exec: Execution,
) -> Result<VariationalReport> {
    check_dims(a.dim(), b.dim())?;
    let closed_form = h_closed(a, b)?;
    let canonical = PartitionOfUnity::minimal_projections(a)?;
    let canonical_value = partition_objective(&canonical, a, b)?;

    let searched = par::map_indexed(exec, restarts, |r| -> Result<(f64, PartitionOfUnity)> {
        let mut rng = par::task_rng(seed, r);
        let p = random_scalar_projection_family(a, &mut rng)?;
        Ok((partition_objective(&p, a, b)?, p))
    });

    let mut best_value = canonical_value;
    let mut best_candidate = 0;
    let mut witness = canonical;
    for (r, res) in searched.into_iter().enumerate() {
        let (value, p) = res?;
        if value > best_value + TIE {
            best_value = value;
            best_candidate = r + 1;
            witness = p;
        }
    }
    Ok(VariationalReport {
        best_value,
        closed_form,
        gap: closed_form - best_value,
        iterations: restarts as u64 + 1,
        seed,
        best_candidate,
        witness: Witness::Partition(witness),
    })
}
