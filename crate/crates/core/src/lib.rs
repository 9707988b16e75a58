//! Conditional relative entropy for maximal abelian subalgebras (MASAs) of
//! `M_n(C)`.
//!
//! The crate computes `h(A|B)` and `h_phi(D|uDu*)` through their closed forms
//! in terms of the unistochastic matrix `b(u)(i,j) = |u(i,j)|^2`, and checks
//! those closed forms against direct evaluation of the variational
//! definitions (suprema over state decompositions and partitions of unity).
//!
//! Module map:
//!
//! - [`matrix`]: dense complex matrices, Hermitian eigendecomposition, unitary generators.
//! - [`functionals`]: density operators, `eta`, von Neumann and relative entropy, MASA restrictions.
//! - [`masa`]: MASAs, conditional expectations, connecting unitaries, Popa orthogonality.
//! - [`stochastic`]: bistochastic / unistochastic matrices and their entropies.
//! - [`relent`]: closed forms and the variational verifiers.
//! - [`io`]: the shared matrix file format and report serialization.
//! - [`verify`]: named invariant suites driven by the CLI.

#![forbid(unsafe_code)]

pub mod error;
pub mod functionals;
pub mod io;
pub mod masa;
pub mod matrix;
pub mod par;
pub mod relent;
pub mod stochastic;
pub mod tol;
pub mod verify;

pub use error::{Error, Result};
pub use functionals::{Decomposition, StateFunctional};
pub use masa::Masa;
pub use matrix::{ComplexMatrix, UnitaryMatrix};
pub use par::Execution;
pub use relent::{PartitionOfUnity, VariationalReport, Witness};
pub use stochastic::{BistochasticMatrix, ProbabilityVector};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
