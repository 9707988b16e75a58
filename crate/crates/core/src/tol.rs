//! Tolerances shared across the crate.

/// `max |u u* - 1|` accepted for a unitary.
pub const UNITARY: f64 = 1e-10;

/// Hermiticity check on density operators and eigensolver input.
pub const HERMITIAN: f64 = 1e-10;

/// Smallest eigenvalue still accepted as positive semidefinite.
pub const PSD_FLOOR: f64 = -1e-12;

/// Trace of a state, and the sum of a probability vector.
pub const TRACE: f64 = 1e-10;

/// Eigenvalues at or below this are outside the support.
pub const SUPPORT: f64 = 1e-12;

/// Entrywise agreement of a decomposition or partition sum with its target.
pub const SUM: f64 = 1e-10;

/// Rank-one projection identities of a MASA.
pub const PROJECTION: f64 = 1e-10;

/// Row and column sums of a bistochastic matrix.
pub const BISTOCHASTIC: f64 = 1e-9;

/// Negative entries above this are clipped to zero before `eta`.
pub const CLIP: f64 = 1e-12;

/// Off-diagonal magnitude accepted for "diagonal in the standard basis".
pub const DIAGONAL: f64 = 1e-9;

/// Commutation of partition elements with the MASA projections.
pub const COMMUTES: f64 = 1e-9;

/// Default tolerance for orthogonality on squared moduli.
pub const ORTHOGONAL: f64 = 1e-9;

/// Equality of MASAs as unordered projection sets.
pub const MASA_EQ: f64 = 1e-9;

/// Local search stops once a sweep improves the objective by less than this.
pub const LOCAL_GAIN: f64 = 1e-12;
