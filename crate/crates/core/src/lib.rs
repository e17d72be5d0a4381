//! Generalized orthostochastic, unistochastic and qustochastic matrices.
//!
//! A bistochastic `n × n` matrix `P` is `(F, n, d)`-bistochastic when
//! `p_i^j = ‖v_i^j‖²` for an isometry `V: F^n → F^{nd}` whose entries are
//! vectors in `F^d`, with `F` one of ℝ, ℂ, ℍ. At `d = 1` these are the
//! orthostochastic, unistochastic and qustochastic matrices.
//!
//! The crate provides the squared-norm map and isometry checks
//! ([`matrix`]), symmetry actions and field embeddings ([`actions`]),
//! dimension counts ([`dims`]), explicit constructions for `d = n − 1`
//! (odd `n`) and `d = n` ([`construct`]), a numerical search for small `d`
//! ([`search`]), batch estimates over random inputs ([`scan`]) and seeded
//! samplers ([`sample`]).

// Matrix code indexes several arrays by the same row and column.
#![allow(clippy::needless_range_loop)]

pub mod actions;
pub mod construct;
pub mod dims;
pub mod error;
pub mod matrix;
pub mod ortho;
pub mod sample;
pub mod scalars;
pub mod scan;
pub mod search;

pub use actions::{
    act_diag, act_perm, complexify_from_quaternion, lift_field, pad_dimension, realify, SquareMatrix,
};
pub use construct::{
    build_skew, check_feasibility, construct_full, construct_nminus1, dmin_upper_bound, solve_cyclic,
    solve_weighted_cyclic, ConstructionResult, FeasibilityReport, Mode, UpperBound, Verdict,
};
pub use dims::{dims, DimensionReport};
pub use error::{Error, Result};
pub use matrix::{
    is_isometry, isometry_residual, nu, BistochasticMatrix, IsometryReport, VectorEntryMatrix, DEFAULT_TOL,
};
pub use sample::{sample_birkhoff, sample_isometry, sample_sinkhorn};
pub use scalars::{FVector, Field, Scalar};
pub use scan::{scan, ScanRecord, ScanReport};
pub use search::{estimate_dmin, search_fixed_d, DminEstimate, Method, SearchConfig, SearchResult};
