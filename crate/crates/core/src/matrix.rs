//! Bistochastic matrices, vector-entry matrices, the squared-norm map and
//! isometry verification.
//!
//! Indexing is always `(row, col)`. An entry `p_i^j` with upper index `j`
//! (row) and lower index `i` (column) lives at `get(j, i)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalars::{inner_slices, norm_sq_slice, FVector, Field, Scalar};

pub const DEFAULT_TOL: f64 = 1e-9;

/// An `n × n` nonnegative real matrix with unit row and column sums.
#[derive(Clone, Debug, PartialEq)]
pub struct BistochasticMatrix {
    n: usize,
    entries: Vec<f64>,
    tol: f64,
}

impl BistochasticMatrix {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        Self::with_tol(rows, DEFAULT_TOL)
    }

    pub fn with_tol(rows: Vec<Vec<f64>>, tol: f64) -> Result<Self> {
        let n = rows.len();
        if let Some((r, row)) = rows.iter().enumerate().find(|(_, row)| row.len() != n) {
            return Err(Error::DimensionMismatch(format!("row {r} has {} entries, expected {n}", row.len())));
        }
        Self::from_flat(n, rows.into_iter().flatten().collect(), tol)
    }

    /// Row-major entries.
    pub fn from_flat(n: usize, entries: Vec<f64>, tol: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("n must be at least 1".into()));
        }
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch(format!("{} entries for an {n}x{n} matrix", entries.len())));
        }
        if tol.is_nan() || tol < 0.0 {
            return Err(Error::InvalidArgument(format!("tolerance {tol} must be nonnegative")));
        }
        let m = BistochasticMatrix { n, entries, tol };
        m.validate()?;
        Ok(m)
    }

    fn validate(&self) -> Result<()> {
        let n = self.n;
        for r in 0..n {
            for c in 0..n {
                let p = self.get(r, c);
                if !p.is_finite() || p < -self.tol {
                    return Err(Error::NotBistochastic(format!("entry ({r}, {c}) = {p}")));
                }
            }
        }
        for (k, s) in self.row_sums().into_iter().enumerate() {
            if (s - 1.0).abs() > self.tol {
                return Err(Error::NotBistochastic(format!("row {k} sums to {s}")));
            }
        }
        for (k, s) in self.col_sums().into_iter().enumerate() {
            if (s - 1.0).abs() > self.tol {
                return Err(Error::NotBistochastic(format!("column {k} sums to {s}")));
            }
        }
        Ok(())
    }

    pub fn identity(n: usize) -> Self {
        let mut entries = vec![0.0; n * n];
        for k in 0..n {
            entries[k * n + k] = 1.0;
        }
        BistochasticMatrix { n, entries, tol: DEFAULT_TOL }
    }

    /// `J_n / n`, every entry `1/n`.
    pub fn uniform(n: usize) -> Self {
        BistochasticMatrix { n, entries: vec![1.0 / n as f64; n * n], tol: DEFAULT_TOL }
    }

    /// Permutation matrix with a one at `(r, perm[r])`.
    pub fn permutation(perm: &[usize]) -> Result<Self> {
        check_permutation(perm, perm.len())?;
        let n = perm.len();
        let mut entries = vec![0.0; n * n];
        for (r, &c) in perm.iter().enumerate() {
            entries[r * n + c] = 1.0;
        }
        Ok(BistochasticMatrix { n, entries, tol: DEFAULT_TOL })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.n + col]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.entries.chunks(self.n).map(<[f64]>::to_vec).collect()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|k| self.get(k, k)).collect()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        self.entries.chunks(self.n).map(|r| r.iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<f64> {
        (0..self.n).map(|c| (0..self.n).map(|r| self.get(r, c)).sum()).collect()
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        let entries = (0..n * n).map(|k| self.get(k % n, k / n)).collect();
        BistochasticMatrix { n, entries, tol: self.tol }
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (0..self.n).all(|r| (0..r).all(|c| (self.get(r, c) - self.get(c, r)).abs() <= tol))
    }

    /// Max-norm distance to a row-major `n × n` array.
    pub fn max_abs_diff(&self, other: &[f64]) -> f64 {
        assert_eq!(other.len(), self.entries.len());
        self.entries.iter().zip(other).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    /// Entry `(r, c)` moves to `(sigma[r], tau[c])`.
    pub fn permuted(&self, sigma: &[usize], tau: &[usize]) -> Result<Self> {
        check_permutation(sigma, self.n)?;
        check_permutation(tau, self.n)?;
        let n = self.n;
        let mut entries = vec![0.0; n * n];
        for r in 0..n {
            for c in 0..n {
                entries[sigma[r] * n + tau[c]] = self.get(r, c);
            }
        }
        Ok(BistochasticMatrix { n, entries, tol: self.tol })
    }
}

pub(crate) fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "permutation of length {} acting on size {n}",
            perm.len()
        )));
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || std::mem::replace(&mut seen[p], true) {
            return Err(Error::InvalidArgument(format!("{perm:?} is not a permutation")));
        }
    }
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct BistochasticRepr {
    n: usize,
    rows: Vec<Vec<f64>>,
}

impl Serialize for BistochasticMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        BistochasticRepr { n: self.n, rows: self.rows() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for BistochasticMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = BistochasticRepr::deserialize(d)?;
        if repr.rows.len() != repr.n {
            return Err(serde::de::Error::custom(format!(
                "n = {} but {} rows given",
                repr.n,
                repr.rows.len()
            )));
        }
        BistochasticMatrix::new(repr.rows).map_err(serde::de::Error::custom)
    }
}

/// An `n × n` matrix whose entries are vectors in `F^d`.
///
/// Equivalently the `nd × n` matrix of a linear map `F^n → F^{nd}`; column
/// `i` of that operator is `w_i = (v_i^1, …, v_i^n)`. Storage is column-major
/// in exactly that sense, so both entries and operator columns are
/// contiguous.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorEntryMatrix {
    field: Field,
    n: usize,
    d: usize,
    data: Vec<Scalar>,
}

impl VectorEntryMatrix {
    pub fn zeros(field: Field, n: usize, d: usize) -> Result<Self> {
        if n == 0 || d == 0 {
            return Err(Error::InvalidArgument(format!("n = {n} and d = {d} must be positive")));
        }
        Ok(VectorEntryMatrix { field, n, d, data: vec![Scalar::ZERO; n * n * d] })
    }

    /// Builds from `rows[row][col]`, each entry a vector of `d` scalars.
    pub fn from_rows(field: Field, d: usize, rows: Vec<Vec<Vec<Scalar>>>) -> Result<Self> {
        let n = rows.len();
        let mut v = Self::zeros(field, n, d)?;
        for (r, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "row {r} has {} entries, expected {n}",
                    row.len()
                )));
            }
            for (c, entry) in row.into_iter().enumerate() {
                if entry.len() != d {
                    return Err(Error::DimensionMismatch(format!(
                        "entry ({r}, {c}) has dimension {}, expected {d}",
                        entry.len()
                    )));
                }
                if entry.iter().any(|s| !field.contains(s)) {
                    return Err(Error::FieldMismatch(format!(
                        "entry ({r}, {c}) does not lie in {field}^{d}"
                    )));
                }
                v.entry_mut(r, c).copy_from_slice(&entry);
            }
        }
        Ok(v)
    }

    /// Builds an `nd × n` operator from its column-major scalar array.
    pub(crate) fn from_columns(field: Field, n: usize, d: usize, data: Vec<Scalar>) -> Self {
        debug_assert_eq!(data.len(), n * n * d);
        VectorEntryMatrix { field, n, d, data }
    }

    /// Builds from a scalar `n × n` matrix (`d = 1`), row-major.
    pub fn from_scalar_rows(field: Field, rows: Vec<Vec<Scalar>>) -> Result<Self> {
        Self::from_rows(
            field,
            1,
            rows.into_iter().map(|r| r.into_iter().map(|s| vec![s]).collect()).collect(),
        )
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    #[inline]
    fn offset(&self, row: usize, col: usize) -> usize {
        (col * self.n + row) * self.d
    }

    /// The vector `v_col^row`.
    #[inline]
    pub fn entry(&self, row: usize, col: usize) -> &[Scalar] {
        let o = self.offset(row, col);
        &self.data[o..o + self.d]
    }

    #[inline]
    pub fn entry_mut(&mut self, row: usize, col: usize) -> &mut [Scalar] {
        let o = self.offset(row, col);
        &mut self.data[o..o + self.d]
    }

    pub fn entry_vector(&self, row: usize, col: usize) -> FVector {
        FVector::new(self.field, self.entry(row, col).to_vec()).expect("entries are nonempty")
    }

    /// Column `w_col` of the operator `F^n → F^{nd}`.
    #[inline]
    pub fn column(&self, col: usize) -> &[Scalar] {
        let len = self.n * self.d;
        &self.data[col * len..(col + 1) * len]
    }

    pub(crate) fn data(&self) -> &[Scalar] {
        &self.data
    }

    /// Row-major `n × n` array of `‖v_i^j‖²`, with no isometry check.
    pub fn squared_norms(&self) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; n * n];
        for r in 0..n {
            for c in 0..n {
                out[r * n + c] = norm_sq_slice(self.entry(r, c));
            }
        }
        out
    }

    pub fn rows(&self) -> Vec<Vec<Vec<Scalar>>> {
        (0..self.n).map(|r| (0..self.n).map(|c| self.entry(r, c).to_vec()).collect()).collect()
    }

    /// Max coefficient-wise distance to another matrix of the same shape.
    pub fn max_abs_diff(&self, other: &VectorEntryMatrix) -> f64 {
        assert_eq!((self.n, self.d), (other.n, other.d));
        self.data.iter().zip(&other.data).flat_map(|(a, b)| (*a - *b).0).fold(0.0, |m, x| m.max(x.abs()))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ScalarRepr {
    Real(f64),
    Tuple(Vec<f64>),
}

fn encode_scalar(field: Field, s: &Scalar) -> ScalarRepr {
    match field {
        Field::R => ScalarRepr::Real(s.re()),
        _ => ScalarRepr::Tuple(s.coefficients(field).to_vec()),
    }
}

fn decode_scalar(field: Field, repr: ScalarRepr) -> Result<Scalar> {
    match (field, repr) {
        (Field::R, ScalarRepr::Real(x)) => Ok(Scalar::real(x)),
        (Field::R, ScalarRepr::Tuple(_)) => {
            Err(Error::Parse("real scalars are encoded as bare numbers".into()))
        }
        (_, ScalarRepr::Real(_)) => Err(Error::Parse(format!(
            "scalars over {field} are encoded as arrays of {} numbers",
            field.real_dim()
        ))),
        (_, ScalarRepr::Tuple(c)) => Scalar::from_coefficients(field, &c),
    }
}

#[derive(Serialize, Deserialize)]
struct VectorEntryRepr {
    field: Field,
    n: usize,
    d: usize,
    rows: Vec<Vec<Vec<ScalarRepr>>>,
}

impl Serialize for VectorEntryMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows = (0..self.n)
            .map(|r| {
                (0..self.n)
                    .map(|c| self.entry(r, c).iter().map(|x| encode_scalar(self.field, x)).collect())
                    .collect()
            })
            .collect();
        VectorEntryRepr { field: self.field, n: self.n, d: self.d, rows }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for VectorEntryMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let repr = VectorEntryRepr::deserialize(de)?;
        let build = || -> Result<Self> {
            if repr.rows.len() != repr.n {
                return Err(Error::DimensionMismatch(format!(
                    "n = {} but {} rows given",
                    repr.n,
                    repr.rows.len()
                )));
            }
            let field = repr.field;
            let rows = repr
                .rows
                .into_iter()
                .map(|row| {
                    row.into_iter()
                        .map(|e| e.into_iter().map(|s| decode_scalar(field, s)).collect())
                        .collect::<Result<Vec<Vec<Scalar>>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            VectorEntryMatrix::from_rows(field, repr.d, rows)
        };
        build().map_err(serde::de::Error::custom)
    }
}

/// Residuals of both isometry conditions.
///
/// `col_residuals[a][b]` is the column Gram condition `|<w_a, w_b> − δ(a,b)|`
/// on the columns `w` of the `nd × n` array (the operator is an isometry,
/// `V*V = I`). `row_residuals[j][k]` is the row condition
/// `|Σ_i Σ_s v_i^j[s] conj(v_i^k[s]) − δ(j,k)|`; the conjugate sits on the
/// right so that for `d = 1` it is exactly `VV* = I`, also over ℍ. The two
/// conditions agree for `d = 1`; for `d ≥ 2` the row condition is not
/// implied, and only its diagonal (unit row sums of `ν(V)`) matters for
/// bistochasticity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsometryReport {
    pub ok: bool,
    pub tol: f64,
    pub residual_cols: f64,
    pub residual_rows: f64,
    /// Max `|row sum of ν(V) − 1|`, the diagonal of the row condition.
    pub residual_row_norms: f64,
    pub worst_cols: (usize, usize),
    pub col_residuals: Vec<Vec<f64>>,
    pub row_residuals: Vec<Vec<f64>>,
}

fn delta_residual(g: Scalar, same: bool) -> f64 {
    if same {
        g.dist(&Scalar::ONE)
    } else {
        g.norm()
    }
}

/// Checks the column Gram condition (and reports the row condition).
/// `ok` iff the column residual is at most `tol`.
pub fn is_isometry(v: &VectorEntryMatrix, tol: f64) -> IsometryReport {
    let n = v.n;
    let mut col_res = vec![vec![0.0; n]; n];
    let mut row_res = vec![vec![0.0; n]; n];
    let mut worst = (0.0, (0, 0));
    for a in 0..n {
        for b in a..n {
            let g = inner_slices(v.column(a), v.column(b));
            let r = delta_residual(g, a == b);
            col_res[a][b] = r;
            col_res[b][a] = r;
            if r > worst.0 {
                worst = (r, (a, b));
            }
            let mut h = Scalar::ZERO;
            for c in 0..n {
                for (x, y) in v.entry(a, c).iter().zip(v.entry(b, c)) {
                    h += *x * y.conj();
                }
            }
            let r = delta_residual(h, a == b);
            row_res[a][b] = r;
            row_res[b][a] = r;
        }
    }
    let max_of = |m: &Vec<Vec<f64>>| m.iter().flatten().copied().fold(0.0, f64::max);
    let residual_cols = max_of(&col_res);
    let residual_rows = max_of(&row_res);
    let residual_row_norms = (0..n).map(|k| row_res[k][k]).fold(0.0, f64::max);
    IsometryReport {
        ok: residual_cols <= tol,
        tol,
        residual_cols,
        residual_rows,
        residual_row_norms,
        worst_cols: worst.1,
        col_residuals: col_res,
        row_residuals: row_res,
    }
}

/// Max column Gram residual only; cheaper than the full report.
pub fn isometry_residual(v: &VectorEntryMatrix) -> f64 {
    let mut worst = 0.0f64;
    for a in 0..v.n {
        for b in a..v.n {
            let g = inner_slices(v.column(a), v.column(b));
            worst = worst.max(delta_residual(g, a == b));
        }
    }
    worst
}

/// The squared-norm map `ν(V)_{row,col} = ‖v_col^row‖²`.
///
/// Refuses input whose column Gram residual exceeds `tol`, and reports
/// `NotBistochastic` if the row sums drift beyond `2 tol` (possible only
/// for `d ≥ 2`).
pub fn nu(v: &VectorEntryMatrix, tol: f64) -> Result<BistochasticMatrix> {
    let report = is_isometry(v, tol);
    if !report.ok {
        return Err(Error::IsometryViolation {
            residual: report.residual_cols,
            col_a: report.worst_cols.0,
            col_b: report.worst_cols.1,
        });
    }
    BistochasticMatrix::from_flat(v.n, v.squared_norms(), 2.0 * tol)
}
