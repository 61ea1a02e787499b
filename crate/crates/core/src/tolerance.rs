//! Numerical tolerances shared by every module.
//!
//! Structural checks (sheet membership, Lorentz-form preservation) use
//! [`STRUCTURAL`], metric identities use [`METRIC`] and anything that compares
//! a finite truncation against a limit object uses [`LIMIT`].

/// Sheet membership, lightlike normalization, Lorentz-form preservation.
pub const STRUCTURAL: f64 = 1e-9;

/// Identities between hyperbolic distances.
pub const METRIC: f64 = 1e-8;

/// Comparisons against limits (Busemann oracles, limit-set containment).
pub const LIMIT: f64 = 1e-6;

/// `B(p, q)` in `[1 - CLAMP, 1]` is clamped to 1 before `acosh`.
pub const CLAMP: f64 = 1e-9;

/// Relative coordinate distance below which two orbit points collide.
pub const COLLISION: f64 = 1e-7;

/// Chordal distance below which two ideal points are merged in a sample.
pub const DEDUP_CHORDAL: f64 = 1e-7;

/// Frobenius distance below which two group-element matrices are called equal.
pub const MATRIX_MATCH: f64 = 1e-6;

/// Residual allowed when extending a tree isometry to a Lorentz matrix.
pub const EXTENSION: f64 = 1e-6;

/// Pivot threshold for picking a nondegenerate frame out of a Gram matrix.
pub const PIVOT: f64 = 1e-10;

/// Relative singular-value threshold for span rank.
pub const RANK: f64 = 1e-9;

/// Relative eigenvalue threshold used by Gram factorization, scaled by size.
pub const SPECTRAL_PER_ROW: f64 = 1e-8;
