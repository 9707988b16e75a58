//! Maximal abelian subalgebras of `M_n(C)`.
//!
//! A MASA is held as its diagonalizing unitary `w` together with the rank-one
//! projections `p_j = w e_j w*` it generates. The diagonalizer is only
//! determined up to a diagonal phase and a permutation of columns; every
//! quantity computed from a pair of MASAs is invariant under that gauge.

use nalgebra::DMatrix;

use crate::matrix::{max_abs, ComplexMatrix, UnitaryMatrix};
use crate::{tol, Error, Result, C64};

#[derive(Debug, Clone)]
pub struct Masa {
    projections: Vec<ComplexMatrix>,
    diagonalizer: UnitaryMatrix,
}

impl Masa {
    /// The MASA `w D w*`.
    pub fn from_diagonalizer(w: UnitaryMatrix) -> Result<Self> {
        let n = w.dim();
        let projections = (0..n)
            .map(|j| {
                let col = w.column(j);
                ComplexMatrix::new(col * col.adjoint())
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            projections,
            diagonalizer: w,
        })
    }

    /// Builds a MASA from `n` mutually orthogonal rank-one projections summing
    /// to the identity.
    pub fn from_projections(projections: Vec<ComplexMatrix>) -> Result<Self> {
        let n = projections.len();
        if n == 0 {
            return Err(Error::ZeroDimension);
        }
        let mut sum = DMatrix::<C64>::zeros(n, n);
        let mut w = DMatrix::<C64>::zeros(n, n);
        for (j, p) in projections.iter().enumerate() {
            if p.dim() != n {
                return Err(Error::DimensionMismatch(p.dim(), n));
            }
            let pm = p.matrix();
            let herm = p.hermitian_deviation();
            let idem = max_abs(&(pm * pm - pm));
            let rank = (p.trace() - C64::new(1.0, 0.0)).norm();
            if herm > tol::PROJECTION || idem > tol::PROJECTION || rank > tol::PROJECTION {
                return Err(Error::InvalidPartition(format!(
                    "p_{j} is not a rank-one projection"
                )));
            }
            for (k, q) in projections.iter().enumerate().skip(j + 1) {
                if max_abs(&(pm * q.matrix())) > tol::PROJECTION {
                    return Err(Error::InvalidPartition(format!("p_{j} p_{k} != 0")));
                }
            }
            sum += pm;
            // The unit vector is the normalized column of largest norm.
            let best = (0..n)
                .max_by(|&a, &b| pm.column(a).norm().total_cmp(&pm.column(b).norm()))
                .unwrap();
            let col = pm.column(best);
            let col = col.scale(1.0 / col.norm());
            w.set_column(j, &col);
        }
        let dev = max_abs(&(sum - DMatrix::identity(n, n)));
        if dev > tol::PROJECTION {
            return Err(Error::InvalidPartition(format!(
                "projections sum to identity only within {dev:e}"
            )));
        }
        let diagonalizer = UnitaryMatrix::new(ComplexMatrix::new(w)?)?;
        Ok(Self {
            projections,
            diagonalizer,
        })
    }

    pub fn dim(&self) -> usize {
        self.diagonalizer.dim()
    }

    pub fn projections(&self) -> &[ComplexMatrix] {
        &self.projections
    }

    pub fn diagonalizer(&self) -> &UnitaryMatrix {
        &self.diagonalizer
    }

    /// True iff `x` commutes with every minimal projection, i.e. `x` lies in
    /// the algebra.
    pub fn contains(&self, x: &ComplexMatrix, tol: f64) -> bool {
        x.dim() == self.dim()
            && self.projections.iter().all(|p| {
                let (pm, xm) = (p.matrix(), x.matrix());
                max_abs(&(pm * xm - xm * pm)) <= tol
            })
    }

    /// Equality as unordered sets of projections, matched greedily by overlap.
    pub fn approx_eq(&self, other: &Masa, tol: f64) -> bool {
        if self.dim() != other.dim() {
            return false;
        }
        let mut used = vec![false; other.dim()];
        for p in &self.projections {
            let best = other
                .projections
                .iter()
                .enumerate()
                .filter(|(k, _)| !used[*k])
                .map(|(k, q)| (k, (p.matrix() * q.matrix()).trace().re))
                .max_by(|a, b| a.1.total_cmp(&b.1));
            match best {
                Some((k, _)) if max_abs(&(p.matrix() - other.projections[k].matrix())) <= tol => {
                    used[k] = true
                }
                _ => return false,
            }
        }
        true
    }
}

/// The diagonal algebra `D`.
pub fn diagonal_masa(n: usize) -> Result<Masa> {
    Masa::from_diagonalizer(UnitaryMatrix::identity(n)?)
}

/// `u A u*`.
pub fn conjugate_masa(a: &Masa, u: &UnitaryMatrix) -> Result<Masa> {
    Masa::from_diagonalizer(u.compose(a.diagonalizer())?)
}

/// Trace-preserving conditional expectation onto `a`:
/// `E_A(x) = sum_j n tau(x p_j) p_j = sum_j Tr(x p_j) p_j`.
pub fn conditional_expectation(a: &Masa, x: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.dim() != x.dim() {
        return Err(Error::DimensionMismatch(a.dim(), x.dim()));
    }
    let w = a.diagonalizer().matrix();
    let rotated = w.adjoint() * x.matrix() * w;
    let n = a.dim();
    let d = DMatrix::from_fn(n, n, |i, j| if i == j { rotated[(i, i)] } else { C64::new(0.0, 0.0) });
    ComplexMatrix::new(w * d * w.adjoint())
}

/// A unitary `u(A, B)` with `B = u A u*`, namely `w_B w_A*`.
pub fn connecting_unitary(a: &Masa, b: &Masa) -> Result<UnitaryMatrix> {
    b.diagonalizer().compose(&a.diagonalizer().adjoint())
}

/// `u(A, B)` written in the matrix units of `A`: `w_A* u w_A = w_A* w_B`.
/// Its entries are `<a_i | b_j>` for the unit vectors spanning the minimal
/// projections of `A` and `B`.
pub fn connecting_unitary_in_basis(a: &Masa, b: &Masa) -> Result<UnitaryMatrix> {
    a.diagonalizer().adjoint().compose(b.diagonalizer())
}

/// `max |u(j,k)|^2 - 1/n|` for the connecting unitary in `A`'s basis.
pub fn flatness_defect(a: &Masa, b: &Masa) -> Result<f64> {
    let u = connecting_unitary_in_basis(a, b)?;
    let inv = 1.0 / a.dim() as f64;
    Ok(u.iter().fold(0.0_f64, |m, z| m.max((z.norm_sqr() - inv).abs())))
}

/// Orthogonality in Popa's sense, tested through the flat-modulus criterion
/// `|u(j,k)| = 1/sqrt(n)`.
pub fn is_orthogonal_pair(a: &Masa, b: &Masa, tol: f64) -> Result<bool> {
    Ok(flatness_defect(a, b)? <= tol)
}

/// Largest deviation of `E_A E_B` and `E_B E_A` from `tau(.) 1` over the
/// matrix units.
pub fn commuting_square_defect(a: &Masa, b: &Masa) -> Result<f64> {
    let n = a.dim();
    if b.dim() != n {
        return Err(Error::DimensionMismatch(n, b.dim()));
    }
    let mut worst = 0.0_f64;
    for k in 0..n {
        for l in 0..n {
            let x = ComplexMatrix::unit(n, k, l)?;
            let scalar = x.trace() / n as f64;
            let target = DMatrix::<C64>::identity(n, n) * scalar;
            let ab = conditional_expectation(a, &conditional_expectation(b, &x)?)?;
            let ba = conditional_expectation(b, &conditional_expectation(a, &x)?)?;
            worst = worst
                .max(max_abs(&(ab.matrix() - &target)))
                .max(max_abs(&(ba.matrix() - &target)));
        }
    }
    Ok(worst)
}

/// `E_A E_B = E_B E_A = E_{C1}`.
pub fn is_commuting_square(a: &Masa, b: &Masa, tol: f64) -> Result<bool> {
    Ok(commuting_square_defect(a, b)? <= tol)
}

/// `max |tau(a b)|` over `a = p_1 - p_k` in `A` and `b = q_1 - q_l` in `B`.
/// These span the trace-zero parts of `A` and `B`; Popa orthogonality is the
/// vanishing of every such trace.
pub fn popa_defect(a: &Masa, b: &Masa) -> Result<f64> {
    let n = a.dim();
    if b.dim() != n {
        return Err(Error::DimensionMismatch(n, b.dim()));
    }
    let pa = a.projections();
    let pb = b.projections();
    let mut worst = 0.0_f64;
    for k in 1..n {
        let x = pa[0].matrix() - pa[k].matrix();
        for l in 1..n {
            let y = pb[0].matrix() - pb[l].matrix();
            let t = (&x * &y).trace() / n as f64;
            worst = worst.max(t.norm());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{fourier_matrix, permutation_unitary, random_unitary, rotation};

    fn random_masa(n: usize, seed: u64) -> Masa {
        conjugate_masa(&diagonal_masa(n).unwrap(), &random_unitary(n, seed).unwrap()).unwrap()
    }

    #[test]
    fn diagonal_masa_projections() {
        let d2 = diagonal_masa(2).unwrap();
        assert_eq!(d2.projections()[0].real_diagonal(), vec![1.0, 0.0]);
        assert_eq!(d2.projections()[1].real_diagonal(), vec![0.0, 1.0]);
        let d3 = diagonal_masa(3).unwrap();
        let mut sum = DMatrix::<C64>::zeros(3, 3);
        for p in d3.projections() {
            sum += p.matrix();
        }
        assert_eq!(sum, DMatrix::identity(3, 3));
    }

    #[test]
    fn expectation_onto_diagonal_zeroes_off_diagonal() {
        let x = random_unitary(4, 2).unwrap();
        let e = conditional_expectation(&diagonal_masa(4).unwrap(), &x).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i == j { x[(i, i)] } else { C64::new(0.0, 0.0) };
                assert!((e[(i, j)] - expect).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn expectation_of_identity_and_fourier_case() {
        let a = conjugate_masa(&diagonal_masa(2).unwrap(), &fourier_matrix(2).unwrap()).unwrap();
        let one = ComplexMatrix::identity(2).unwrap();
        let e1 = conditional_expectation(&a, &one).unwrap();
        assert!(max_abs(&(e1.matrix() - one.matrix())) < 1e-14);

        let e11 = ComplexMatrix::unit(2, 0, 0).unwrap();
        let e = conditional_expectation(&a, &e11).unwrap();
        let half = DMatrix::<C64>::identity(2, 2).scale(0.5);
        assert!(max_abs(&(e.matrix() - half)) < 1e-14);
    }

    #[test]
    fn conjugation_cases() {
        let d = diagonal_masa(3).unwrap();
        let same = conjugate_masa(&d, &UnitaryMatrix::identity(3).unwrap()).unwrap();
        assert!(same.approx_eq(&d, 1e-12));

        let perm = conjugate_masa(&d, &permutation_unitary(&[2, 0, 1]).unwrap()).unwrap();
        assert!(perm.approx_eq(&d, 1e-12));
        assert_ne!(perm.projections()[0], d.projections()[0]);

        let f = conjugate_masa(&d, &fourier_matrix(3).unwrap()).unwrap();
        for p in f.projections() {
            for x in p.real_diagonal() {
                assert!((x - 1.0 / 3.0).abs() < 1e-12);
            }
        }
        assert!(!f.approx_eq(&d, 1e-6));
    }

    #[test]
    fn connecting_unitary_recovers_pair() {
        let d = diagonal_masa(3).unwrap();
        let u = random_unitary(3, 8).unwrap();
        let b = conjugate_masa(&d, &u).unwrap();
        let found = connecting_unitary(&d, &b).unwrap();
        assert!(conjugate_masa(&d, &found).unwrap().approx_eq(&b, 1e-9));

        // B = A: the connecting unitary is diagonal in A's basis.
        let a = random_masa(3, 4);
        let ua = connecting_unitary_in_basis(&a, &a).unwrap();
        assert!(ua.max_off_diagonal() < 1e-12);
    }

    #[test]
    fn orthogonality_cases() {
        for n in 2..6 {
            let d = diagonal_masa(n).unwrap();
            let f = conjugate_masa(&d, &fourier_matrix(n).unwrap()).unwrap();
            assert!(is_orthogonal_pair(&d, &f, 1e-9).unwrap());
            assert!(is_commuting_square(&d, &f, 1e-9).unwrap());
            assert!(popa_defect(&d, &f).unwrap() < 1e-12);
            assert!(!is_orthogonal_pair(&d, &d, 1e-9).unwrap());
            assert!(!is_commuting_square(&d, &d, 1e-9).unwrap());
        }
        let d = diagonal_masa(2).unwrap();
        let theta = 0.9f64.sqrt().acos();
        let r = conjugate_masa(&d, &rotation(theta)).unwrap();
        assert!(!is_orthogonal_pair(&d, &r, 1e-9).unwrap());
        assert!(!is_commuting_square(&d, &r, 1e-9).unwrap());
    }

    #[test]
    fn from_projections_roundtrip() {
        let a = random_masa(3, 21);
        let rebuilt = Masa::from_projections(a.projections().to_vec()).unwrap();
        assert!(rebuilt.approx_eq(&a, 1e-10));
        let bad = vec![
            ComplexMatrix::unit(2, 0, 0).unwrap(),
            ComplexMatrix::unit(2, 0, 0).unwrap(),
        ];
        assert!(Masa::from_projections(bad).is_err());
    }

    mod props {
        use super::*;
        use crate::functionals::StateFunctional;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn expectation_properties(n in 1usize..6, s in any::<u64>()) {
                let a = random_masa(n, s);
                let x = random_unitary(n, s ^ 1).unwrap();
                let x = ComplexMatrix::new(x.matrix() + x.matrix().adjoint()).unwrap();
                let e = conditional_expectation(&a, &x).unwrap();
                let ee = conditional_expectation(&a, &e).unwrap();
                prop_assert!(max_abs(&(ee.matrix() - e.matrix())) < 1e-10);
                prop_assert!((e.trace() - x.trace()).norm() < 1e-10);
                prop_assert!(a.contains(&e, 1e-10));
                let one = ComplexMatrix::identity(n).unwrap();
                let e1 = conditional_expectation(&a, &one).unwrap();
                prop_assert!(max_abs(&(e1.matrix() - one.matrix())) < 1e-10);
                // positivity: a PSD input maps to a PSD output
                let psd = ComplexMatrix::new(x.matrix() * x.matrix()).unwrap();
                let ep = conditional_expectation(&a, &psd).unwrap();
                prop_assert!(StateFunctional::positive(ep).is_ok());
            }

            #[test]
            fn connecting_unitary_conjugates(n in 1usize..6, s in any::<u64>()) {
                let a = random_masa(n, s);
                let b = random_masa(n, s.wrapping_add(17));
                let u = connecting_unitary(&a, &b).unwrap();
                prop_assert!(conjugate_masa(&a, &u).unwrap().approx_eq(&b, 1e-9));
            }

            #[test]
            fn orthogonality_symmetric_and_equivalent(n in 2usize..6, s in any::<u64>()) {
                let a = random_masa(n, s);
                let b = random_masa(n, !s);
                let ab = is_orthogonal_pair(&a, &b, 1e-9).unwrap();
                prop_assert_eq!(ab, is_orthogonal_pair(&b, &a, 1e-9).unwrap());
                prop_assert_eq!(ab, is_commuting_square(&a, &b, 1e-9).unwrap());
            }
        }
    }
}
