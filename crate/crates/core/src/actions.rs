//! Symmetry actions on vector-entry matrices and the field/dimension
//! embeddings between the sets of generalized bistochastic matrices.

use crate::error::{Error, Result};
use crate::matrix::{check_permutation, VectorEntryMatrix};
use crate::scalars::{inner_slices, Field, Scalar};

/// A square `dim × dim` matrix over `F`, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct SquareMatrix {
    field: Field,
    dim: usize,
    data: Vec<Scalar>,
}

impl SquareMatrix {
    pub fn new(field: Field, dim: usize, data: Vec<Scalar>) -> Result<Self> {
        if dim == 0 || data.len() != dim * dim {
            return Err(Error::DimensionMismatch(format!("{} scalars for a {dim}x{dim} matrix", data.len())));
        }
        if data.iter().any(|s| !field.contains(s)) {
            return Err(Error::FieldMismatch(format!("matrix entries must lie in {field}")));
        }
        Ok(SquareMatrix { field, dim, data })
    }

    pub fn identity(field: Field, dim: usize) -> Self {
        let mut data = vec![Scalar::ZERO; dim * dim];
        for k in 0..dim {
            data[k * dim + k] = Scalar::ONE;
        }
        SquareMatrix { field, dim, data }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Scalar {
        self.data[r * self.dim + c]
    }

    /// Max entry of `|M* M − I|`.
    pub fn unitarity_residual(&self) -> f64 {
        let n = self.dim;
        let col = |c: usize| -> Vec<Scalar> { (0..n).map(|r| self.get(r, c)).collect() };
        let cols: Vec<_> = (0..n).map(col).collect();
        let mut worst = 0.0f64;
        for a in 0..n {
            for b in 0..n {
                let g = inner_slices(&cols[a], &cols[b]);
                let target = if a == b { Scalar::ONE } else { Scalar::ZERO };
                worst = worst.max(g.dist(&target));
            }
        }
        worst
    }

    /// `M v` with `v` a column of scalars.
    fn apply(&self, v: &[Scalar], out: &mut [Scalar]) {
        for (r, o) in out.iter_mut().enumerate() {
            let mut acc = Scalar::ZERO;
            for (c, x) in v.iter().enumerate() {
                acc += self.get(r, c) * *x;
            }
            *o = acc;
        }
    }
}

/// Permutes rows by `sigma` and columns by `tau`: entry `(r, c)` moves to
/// `(sigma[r], tau[c])`.
pub fn act_perm(v: &VectorEntryMatrix, sigma: &[usize], tau: &[usize]) -> Result<VectorEntryMatrix> {
    let n = v.n();
    check_permutation(sigma, n)?;
    check_permutation(tau, n)?;
    let mut out = VectorEntryMatrix::zeros(v.field(), n, v.d())?;
    for r in 0..n {
        for c in 0..n {
            out.entry_mut(sigma[r], tau[c]).copy_from_slice(v.entry(r, c));
        }
    }
    Ok(out)
}

/// The block-diagonal / diagonal action: every entry in row `j` is
/// left-multiplied by `blocks[j]`, every entry in column `i` is scaled on the
/// right by `phases[i]`. Leaves `ν` unchanged.
pub fn act_diag(
    v: &VectorEntryMatrix,
    blocks: &[SquareMatrix],
    phases: &[Scalar],
    tol: f64,
) -> Result<VectorEntryMatrix> {
    let (n, d, field) = (v.n(), v.d(), v.field());
    if blocks.len() != n || phases.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "{} blocks and {} phases for n = {n}",
            blocks.len(),
            phases.len()
        )));
    }
    for (j, b) in blocks.iter().enumerate() {
        if b.dim() != d {
            return Err(Error::DimensionMismatch(format!("block {j} is {0}x{0}, d = {d}", b.dim())));
        }
        if b.field().join(field) != field {
            return Err(Error::FieldMismatch(format!("block {j} is over {}", b.field())));
        }
        let res = b.unitarity_residual();
        if res > tol {
            return Err(Error::InvalidArgument(format!("block {j} is not an isometry (residual {res:e})")));
        }
    }
    for (i, p) in phases.iter().enumerate() {
        if !field.contains(p) {
            return Err(Error::FieldMismatch(format!("phase {i} does not lie in {field}")));
        }
        if (p.norm() - 1.0).abs() > tol {
            return Err(Error::InvalidArgument(format!("phase {i} has norm {}", p.norm())));
        }
    }
    let mut out = VectorEntryMatrix::zeros(field, n, d)?;
    for r in 0..n {
        for c in 0..n {
            let dst = out.entry_mut(r, c);
            blocks[r].apply(v.entry(r, c), dst);
            for x in dst.iter_mut() {
                *x = *x * phases[c];
            }
        }
    }
    Ok(out)
}

/// Writes `x + iy ↦ (x, y)`; ℂ^d becomes ℝ^{2d} with components interleaved.
pub fn realify(v: &VectorEntryMatrix) -> Result<VectorEntryMatrix> {
    if v.field() != Field::C {
        return Err(Error::FieldMismatch(format!("realify expects C, got {}", v.field())));
    }
    split_entries(v, Field::R, |s| [Scalar::real(s.0[0]), Scalar::real(s.0[1])])
}

/// Writes `q = z₁ + j z₂ ↦ (z₁, z₂)`; ℍ^d becomes ℂ^{2d}.
///
/// With `z₂` on the right of `j`, the map is right ℂ-linear and the complex
/// part of the quaternionic inner product is the Hermitian product on ℂ^{2d}.
/// For `q = w + xi + yj + zk`: `z₁ = w + xi`, `z₂ = y − zi`.
pub fn complexify_from_quaternion(v: &VectorEntryMatrix) -> Result<VectorEntryMatrix> {
    if v.field() != Field::H {
        return Err(Error::FieldMismatch(format!("complexify_from_quaternion expects H, got {}", v.field())));
    }
    split_entries(v, Field::C, |s| {
        let [w, x, y, z] = s.0;
        [Scalar::complex(w, x), Scalar::complex(y, -z)]
    })
}

fn split_entries(
    v: &VectorEntryMatrix,
    target: Field,
    f: impl Fn(&Scalar) -> [Scalar; 2],
) -> Result<VectorEntryMatrix> {
    let (n, d) = (v.n(), v.d());
    let mut out = VectorEntryMatrix::zeros(target, n, 2 * d)?;
    for r in 0..n {
        for c in 0..n {
            let src = v.entry(r, c);
            let dst = out.entry_mut(r, c);
            for (k, s) in src.iter().enumerate() {
                let [a, b] = f(s);
                dst[2 * k] = a;
                dst[2 * k + 1] = b;
            }
        }
    }
    Ok(out)
}

/// Extends every entry by zeros to dimension `new_d`.
pub fn pad_dimension(v: &VectorEntryMatrix, new_d: usize) -> Result<VectorEntryMatrix> {
    let (n, d) = (v.n(), v.d());
    if new_d < d {
        return Err(Error::InvalidArgument(format!("cannot pad d = {d} down to {new_d}")));
    }
    let mut out = VectorEntryMatrix::zeros(v.field(), n, new_d)?;
    for r in 0..n {
        for c in 0..n {
            out.entry_mut(r, c)[..d].copy_from_slice(v.entry(r, c));
        }
    }
    Ok(out)
}

/// Reads an ℝ (resp. ℂ) matrix as a matrix over a larger field.
pub fn lift_field(v: &VectorEntryMatrix, field: Field) -> Result<VectorEntryMatrix> {
    if v.field().join(field) != field {
        return Err(Error::FieldMismatch(format!("cannot lift {} into {field}", v.field())));
    }
    Ok(VectorEntryMatrix::from_columns(field, v.n(), v.d(), v.data().to_vec()))
}
