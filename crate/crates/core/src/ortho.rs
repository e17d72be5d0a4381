//! Gram–Schmidt over ℝ, ℂ and ℍ for column-major scalar arrays.

use crate::scalars::{inner_slices, norm_sq_slice, Scalar};

/// Orthonormalizes the `cols` columns (each of length `len`) in place using
/// modified Gram–Schmidt with one reorthogonalization pass. Projections are
/// removed with the coefficient on the right, `w_k -= w_i <w_i, w_k>`, which
/// is the correct order over ℍ.
///
/// Returns `false` if a column collapses (numerically rank deficient).
pub fn orthonormalize_columns(data: &mut [Scalar], len: usize, cols: usize) -> bool {
    debug_assert_eq!(data.len(), len * cols);
    for k in 0..cols {
        let (done, rest) = data.split_at_mut(k * len);
        let wk = &mut rest[..len];
        let before = norm_sq_slice(wk).sqrt();
        for _pass in 0..2 {
            for i in 0..k {
                let wi = &done[i * len..(i + 1) * len];
                let c = inner_slices(wi, wk);
                for (x, b) in wk.iter_mut().zip(wi) {
                    *x -= *b * c;
                }
            }
        }
        let norm = norm_sq_slice(wk).sqrt();
        if norm.is_nan() || norm <= 1e-10 * before.max(f64::MIN_POSITIVE) {
            return false;
        }
        let inv = 1.0 / norm;
        for x in wk.iter_mut() {
            *x = x.scale(inv);
        }
    }
    true
}
