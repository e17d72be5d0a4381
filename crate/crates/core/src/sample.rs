//! Seeded random inputs: bistochastic matrices and isometries.
//!
//! All randomness comes from ChaCha8 keyed by a 64-bit seed. Independent
//! draws (restarts, samples in a scan) use disjoint ChaCha streams of the
//! same seed, so results never depend on scheduling.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::actions::SquareMatrix;
use crate::error::{Error, Result};
use crate::matrix::{BistochasticMatrix, VectorEntryMatrix};
use crate::ortho::orthonormalize_columns;
use crate::scalars::{norm_sq_slice, Field, Scalar};

pub type SampleRng = ChaCha8Rng;

const SINKHORN_TOL: f64 = 1e-12;
const SINKHORN_MAX_SWEEPS: usize = 10_000;
const BALANCE_TOL: f64 = 1e-13;
const BALANCE_MAX_SWEEPS: usize = 100_000;

/// Generator for stream `stream` of `seed`.
pub fn rng_for(seed: u64, stream: u64) -> SampleRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// A scalar in `field` with i.i.d. standard normal coefficients.
pub fn normal_scalar<R: Rng + ?Sized>(field: Field, rng: &mut R) -> Scalar {
    let mut c = [0.0; 4];
    for x in c.iter_mut().take(field.real_dim()) {
        *x = StandardNormal.sample(rng);
    }
    Scalar(c)
}

pub fn unit_scalar<R: Rng + ?Sized>(field: Field, rng: &mut R) -> Scalar {
    loop {
        let s = normal_scalar(field, rng);
        let n = s.norm();
        if n > 1e-8 {
            return s.scale(1.0 / n);
        }
    }
}

/// Sinkhorn balancing of a uniform(0.1, 1.1) matrix.
pub fn sample_sinkhorn(n: usize, seed: u64) -> Result<BistochasticMatrix> {
    sinkhorn_with(n, &mut rng_for(seed, 0))
}

pub fn sinkhorn_with<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<BistochasticMatrix> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let mut m: Vec<f64> = (0..n * n).map(|_| rng.random_range(0.1..1.1)).collect();
    sinkhorn_balance(n, &mut m)?;
    BistochasticMatrix::from_flat(n, m, 1e-10)
}

/// Symmetric bistochastic matrix: Sinkhorn balancing of a symmetric
/// uniform(0.1, 1.1) matrix, symmetrized once more to remove rounding.
///
/// The balanced limit of a symmetric positive matrix is `D A D`, so the
/// final symmetrization only moves entries by the balancing tolerance.
pub fn symmetric_sinkhorn_with<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<BistochasticMatrix> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let mut m = vec![0.0; n * n];
    for r in 0..n {
        for c in r..n {
            let x = rng.random_range(0.1..1.1);
            m[r * n + c] = x;
            m[c * n + r] = x;
        }
    }
    sinkhorn_balance(n, &mut m)?;
    for r in 0..n {
        for c in r + 1..n {
            let x = 0.5 * (m[r * n + c] + m[c * n + r]);
            m[r * n + c] = x;
            m[c * n + r] = x;
        }
    }
    BistochasticMatrix::from_flat(n, m, 1e-10)
}

/// Alternating row/column normalization of a positive row-major matrix.
pub fn sinkhorn_balance(n: usize, m: &mut [f64]) -> Result<()> {
    for _ in 0..SINKHORN_MAX_SWEEPS {
        for row in m.chunks_mut(n) {
            let s: f64 = row.iter().sum();
            row.iter_mut().for_each(|x| *x /= s);
        }
        for c in 0..n {
            let s: f64 = (0..n).map(|r| m[r * n + c]).sum();
            (0..n).for_each(|r| m[r * n + c] /= s);
        }
        let worst = m.chunks(n).map(|row| (row.iter().sum::<f64>() - 1.0).abs()).fold(0.0, f64::max);
        if worst <= SINKHORN_TOL {
            return Ok(());
        }
    }
    Err(Error::NonConvergence { sweeps: SINKHORN_MAX_SWEEPS })
}

/// Convex combination of `k` uniformly random permutation matrices with
/// weights drawn uniformly from the open simplex.
pub fn sample_birkhoff(n: usize, k: usize, seed: u64) -> Result<BistochasticMatrix> {
    if n == 0 || k == 0 {
        return Err(Error::InvalidArgument(format!("n = {n} and k = {k} must be positive")));
    }
    let mut rng = rng_for(seed, 0);
    let raw: Vec<f64> = (0..k).map(|_| Exp1.sample(&mut rng)).collect::<Vec<f64>>();
    let total: f64 = raw.iter().sum();
    let mut m = vec![0.0; n * n];
    let mut perm: Vec<usize> = (0..n).collect();
    for w in raw {
        perm.shuffle(&mut rng);
        for (r, &c) in perm.iter().enumerate() {
            m[r * n + c] += w / total;
        }
    }
    BistochasticMatrix::from_flat(n, m, 1e-12)
}

/// Gaussian `len × cols` column-major array with orthonormalized columns.
pub fn random_orthonormal_columns<R: Rng + ?Sized>(
    field: Field,
    len: usize,
    cols: usize,
    rng: &mut R,
) -> Vec<Scalar> {
    assert!(cols <= len, "cannot fit {cols} orthonormal columns in dimension {len}");
    loop {
        let mut data: Vec<Scalar> = (0..len * cols).map(|_| normal_scalar(field, rng)).collect();
        if orthonormalize_columns(&mut data, len, cols) {
            return data;
        }
    }
}

/// Random `d × d` isometry of `F^d`.
pub fn random_unitary<R: Rng + ?Sized>(field: Field, d: usize, rng: &mut R) -> SquareMatrix {
    let cols = random_orthonormal_columns(field, d, d, rng);
    let mut data = vec![Scalar::ZERO; d * d];
    for c in 0..d {
        for r in 0..d {
            data[r * d + c] = cols[c * d + r];
        }
    }
    SquareMatrix::new(field, d, data).expect("shape and field are consistent")
}

/// Random element of the isometry set whose squared-norm matrix is
/// bistochastic.
///
/// Columns of a Gaussian `nd × n` array are orthonormalized. For `d = 1` that
/// is already a unitary matrix. For `d ≥ 2` the column condition alone does
/// not give unit row sums, so the array is alternately rescaled block-row-wise
/// to unit norm and re-orthonormalized until both hold to 1e−13.
pub fn sample_isometry(field: Field, n: usize, d: usize, seed: u64) -> Result<VectorEntryMatrix> {
    isometry_with(field, n, d, &mut rng_for(seed, 0))
}

pub fn isometry_with<R: Rng + ?Sized>(
    field: Field,
    n: usize,
    d: usize,
    rng: &mut R,
) -> Result<VectorEntryMatrix> {
    if n == 0 || d == 0 {
        return Err(Error::InvalidArgument(format!("n = {n} and d = {d} must be positive")));
    }
    let len = n * d;
    let mut data = random_orthonormal_columns(field, len, n, rng);
    if d > 1 {
        balance_rows(&mut data, n, d)?;
    }
    Ok(VectorEntryMatrix::from_columns(field, n, d, data))
}

/// Alternates block-row normalization and column orthonormalization.
fn balance_rows(data: &mut [Scalar], n: usize, d: usize) -> Result<()> {
    let len = n * d;
    let mut row_norms = vec![0.0; n];
    for _ in 0..BALANCE_MAX_SWEEPS {
        row_norms.iter_mut().for_each(|x| *x = 0.0);
        for col in data.chunks(len) {
            for (j, block) in col.chunks(d).enumerate() {
                row_norms[j] += norm_sq_slice(block);
            }
        }
        if row_norms.iter().all(|r| (r - 1.0).abs() <= BALANCE_TOL) {
            return Ok(());
        }
        for col in data.chunks_mut(len) {
            for (j, block) in col.chunks_mut(d).enumerate() {
                let s = 1.0 / row_norms[j].sqrt();
                block.iter_mut().for_each(|x| *x = x.scale(s));
            }
        }
        if !orthonormalize_columns(data, len, n) {
            break;
        }
    }
    Err(Error::NonConvergence { sweeps: BALANCE_MAX_SWEEPS })
}
