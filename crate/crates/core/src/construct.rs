//! Explicit certificates of membership.
//!
//! For odd `n` a bistochastic `P` whose diagonal satisfies the alternating
//! cyclic inequalities is `(n−1)`-orthostochastic. The witness places the
//! off-diagonal entries of row `j` on distinct standard basis vectors of
//! `ℝ^{n−1}` and expands the diagonal entry `v_j^j` in that basis with
//! coefficients supported on the two cyclic neighbours of `j`.
//!
//! Two coefficient choices are provided:
//!
//! * [`Mode::PaperLiteral`] takes a skew-symmetric `A` whose row square-sums
//!   equal the diagonal of `P`. Column orthogonality then needs
//!   `a_j^i √p_j^i + a_i^j √p_i^j = 0`, which a skew `A` gives only when `P`
//!   is symmetric on the neighbour pairs.
//! * [`Mode::Weighted`] makes `c_i^j = a_i^j √p_i^j` skew instead, which is
//!   exactly the orthogonality condition for any `P`. The squared edge values
//!   solve a weighted cyclic system; the construction succeeds when they are
//!   nonnegative.
//!
//! Every result carries residuals recomputed from the returned matrix.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{isometry_residual, BistochasticMatrix, VectorEntryMatrix};
use crate::scalars::{Field, Scalar};

/// Tolerance for slack signs and for clamping tiny negative squares.
pub const FEASIBILITY_TOL: f64 = 1e-12;
/// Residual bound for a construction to count as a certificate.
pub const CERTIFY_TOL: f64 = 1e-9;

fn require_odd(n: usize) -> Result<()> {
    if n.is_multiple_of(2) {
        Err(Error::EvenN(n))
    } else {
        Ok(())
    }
}

/// Solves `x_i + x_{i+1} = ξ_{i+2}` (indices mod `n`, `n` odd) with the
/// closed form `2 x_i = −ξ_i + ξ_{i+1} + ξ_{i+2} − ξ_{i+3} + ξ_{i+4} − … + ξ_{i+n−1}`.
pub fn solve_cyclic(xi: &[f64]) -> Result<Vec<f64>> {
    let n = xi.len();
    if n == 0 {
        return Err(Error::InvalidArgument("empty right-hand side".into()));
    }
    require_odd(n)?;
    let sign = |k: usize| -> f64 {
        match k {
            0 => -1.0,
            1 => 1.0,
            k if k % 2 == 0 => 1.0,
            _ => -1.0,
        }
    };
    Ok((0..n).map(|i| 0.5 * (0..n).map(|k| sign(k) * xi[(i + k) % n]).sum::<f64>()).collect())
}

/// The cyclic edge `e` joins `e` and `e + 1 (mod n)`.
#[inline]
fn edge_ends(e: usize, n: usize) -> (usize, usize) {
    (e, (e + 1) % n)
}

/// Sign of a coefficient at `(row, col)`: positive above the diagonal.
#[inline]
fn upper_sign(row: usize, col: usize) -> f64 {
    if row < col {
        1.0
    } else {
        -1.0
    }
}

/// Skew-symmetric `A` supported on cyclic neighbours with
/// `Σ_i (a_i^j)² = ξ_j`. Edge `{e, e+1}` carries the square `x_{e−1}` of
/// [`solve_cyclic`]; entries above the diagonal are nonnegative.
pub fn build_skew(xi: &[f64]) -> Result<Vec<Vec<f64>>> {
    let n = xi.len();
    let x = solve_cyclic(xi)?;
    if let Some((index, &value)) = x.iter().enumerate().find(|(_, &v)| v < -FEASIBILITY_TOL) {
        return Err(Error::InfeasibleXi { index, value });
    }
    let mut a = vec![vec![0.0; n]; n];
    for e in 0..n {
        let sq = x[(e + n - 1) % n].max(0.0);
        let (r, c) = edge_ends(e, n);
        let mag = sq.sqrt();
        a[r][c] = upper_sign(r, c) * mag;
        a[c][r] = -a[r][c];
    }
    Ok(a)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    StrictInterior,
    Boundary,
    Infeasible,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityReport {
    pub n: usize,
    pub diagonal: Vec<f64>,
    /// `slack_i = RHS_i − LHS_i` of the alternating inequality at `i`.
    pub slacks: Vec<f64>,
    /// Off-diagonal `(row, col)` positions holding a zero.
    pub offdiag_zero_pairs: Vec<(usize, usize)>,
    pub verdict: Verdict,
}

/// Index offsets (from `i`) of the left- and right-hand sides of
/// `ξ_i + ξ_{i+3} + ξ_{i+5} + … + ξ_{i+n−2} ≤ ξ_{i+1} + ξ_{i+2} + ξ_{i+4} + … + ξ_{i+n−1}`.
fn inequality_offsets(n: usize) -> (Vec<usize>, Vec<usize>) {
    let lhs = std::iter::once(0).chain((3..=n.saturating_sub(2)).step_by(2)).collect();
    let rhs = std::iter::once(1).chain((2..n).step_by(2)).collect();
    (lhs, rhs)
}

/// Evaluates the sufficient diagonal condition for `(n−1)`-orthostochasticity.
///
/// For `n = 3` the slacks are the triangle inequalities of the diagonal.
/// A zero off-diagonal entry with nonnegative slacks gives `Boundary`: such
/// matrices lie in the closure of the strict region.
pub fn check_feasibility(p: &BistochasticMatrix) -> Result<FeasibilityReport> {
    let n = p.n();
    require_odd(n)?;
    let diagonal = p.diagonal();
    let (lhs, rhs) = inequality_offsets(n);
    let slacks: Vec<f64> = (0..n)
        .map(|i| {
            let side = |offs: &[usize]| offs.iter().map(|k| diagonal[(i + k) % n]).sum::<f64>();
            side(&rhs) - side(&lhs)
        })
        .collect();
    let mut offdiag_zero_pairs = Vec::new();
    for r in 0..n {
        for c in 0..n {
            if r != c && p.get(r, c) <= FEASIBILITY_TOL {
                offdiag_zero_pairs.push((r, c));
            }
        }
    }
    let min_slack = slacks.iter().copied().fold(f64::INFINITY, f64::min);
    let verdict = if min_slack < -FEASIBILITY_TOL {
        Verdict::Infeasible
    } else if min_slack > FEASIBILITY_TOL && offdiag_zero_pairs.is_empty() {
        Verdict::StrictInterior
    } else {
        Verdict::Boundary
    };
    Ok(FeasibilityReport { n, diagonal, slacks, offdiag_zero_pairs, verdict })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    PaperLiteral,
    Weighted,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" | "paper_literal" | "paper-literal" => Ok(Mode::PaperLiteral),
            "weighted" => Ok(Mode::Weighted),
            other => Err(Error::InvalidArgument(format!("unknown mode `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstructionResult {
    #[serde(rename = "V")]
    pub v: VectorEntryMatrix,
    /// Coefficients `a_i^j` of the diagonal entries, `a[row][col]`.
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    pub mode: Mode,
    pub residual_nu: f64,
    pub residual_isometry: f64,
    pub certified: bool,
}

/// Basis slot of the off-diagonal entry `(row, col)` in `ℝ^{n−1}`.
#[inline]
fn slot(row: usize, col: usize) -> usize {
    debug_assert_ne!(row, col);
    if col < row {
        col
    } else {
        col - 1
    }
}

/// Builds an `(n−1)`-orthostochastic witness for odd `n > 1`.
///
/// `PaperLiteral` fails with `InfeasibleXi` when the diagonal violates the
/// alternating inequalities and is certified in general only for symmetric
/// `P`; the returned residuals say whether it worked. `Weighted` needs every
/// cyclic-neighbour entry to be positive and fails with `WeightedInfeasible`
/// when its edge squares come out negative.
pub fn construct_nminus1(p: &BistochasticMatrix, mode: Mode) -> Result<ConstructionResult> {
    let n = p.n();
    require_odd(n)?;
    if n == 1 {
        return Err(Error::InvalidArgument("n must be greater than 1".into()));
    }
    let a = match mode {
        Mode::PaperLiteral => build_skew(&p.diagonal())?,
        Mode::Weighted => weighted_coefficients(p)?,
    };
    let d = n - 1;
    let mut v = VectorEntryMatrix::zeros(Field::R, n, d)?;
    for j in 0..n {
        for k in 0..n {
            if k == j {
                continue;
            }
            let s = slot(j, k);
            v.entry_mut(j, k)[s] = Scalar::real(p.get(j, k).max(0.0).sqrt());
            v.entry_mut(j, j)[s] = Scalar::real(a[j][k]);
        }
    }
    let residual_nu = p.max_abs_diff(&v.squared_norms());
    let residual_isometry = isometry_residual(&v);
    Ok(ConstructionResult {
        v,
        a,
        mode,
        residual_nu,
        residual_isometry,
        certified: residual_nu <= CERTIFY_TOL && residual_isometry <= CERTIFY_TOL,
    })
}

/// Squared edge values `y_e` of the skew matrix `c_i^j = a_i^j √p_i^j`.
///
/// Row `j` reads `y_{j−1} / p(j, j−1) + y_j / p(j, j+1) = p(j, j)`. The
/// system is cyclic bidiagonal with positive coefficients, so for odd `n` it
/// has determinant `Π β + Π α > 0`. It is solved by carrying the unknown
/// `y_{n−1}` around the cycle.
pub fn solve_weighted_cyclic(p: &BistochasticMatrix) -> Result<Vec<f64>> {
    let n = p.n();
    require_odd(n)?;
    let mut alpha = vec![0.0; n];
    let mut beta = vec![0.0; n];
    for j in 0..n {
        let (prev, next) = ((j + n - 1) % n, (j + 1) % n);
        for (col, slotv) in [(prev, &mut alpha[j]), (next, &mut beta[j])] {
            let w = p.get(j, col);
            if w <= FEASIBILITY_TOL {
                return Err(Error::ZeroDivisor { row: j, col });
            }
            *slotv = 1.0 / w;
        }
    }
    // y_j = u_j + t_j * y_{n-1}
    let (mut u_prev, mut t_prev) = (0.0, 1.0);
    let mut u = vec![0.0; n];
    let mut t = vec![0.0; n];
    for j in 0..n {
        u[j] = (p.get(j, j) - alpha[j] * u_prev) / beta[j];
        t[j] = -alpha[j] * t_prev / beta[j];
        u_prev = u[j];
        t_prev = t[j];
    }
    let last = u[n - 1] / (1.0 - t[n - 1]);
    Ok((0..n).map(|j| u[j] + t[j] * last).collect())
}

fn weighted_coefficients(p: &BistochasticMatrix) -> Result<Vec<Vec<f64>>> {
    let n = p.n();
    let y = solve_weighted_cyclic(p)?;
    if let Some((index, &value)) = y.iter().enumerate().find(|(_, &v)| v < -FEASIBILITY_TOL) {
        return Err(Error::WeightedInfeasible { index, value });
    }
    let mut a = vec![vec![0.0; n]; n];
    for (e, &ye) in y.iter().enumerate() {
        let (r, c) = edge_ends(e, n);
        let cval = upper_sign(r, c) * ye.max(0.0).sqrt();
        a[r][c] = cval / p.get(r, c).sqrt();
        a[c][r] = -cval / p.get(c, r).sqrt();
    }
    Ok(a)
}

/// The universal construction for `d ≥ n`: `v_i^j = √p_i^j e_i`.
pub fn construct_full(p: &BistochasticMatrix, field: Field, d: usize) -> Result<VectorEntryMatrix> {
    let n = p.n();
    if d < n {
        return Err(Error::InvalidArgument(format!("construct_full needs d >= n, got d = {d} < {n}")));
    }
    let mut v = VectorEntryMatrix::zeros(field, n, d)?;
    for r in 0..n {
        for c in 0..n {
            v.entry_mut(r, c)[c] = Scalar::real(p.get(r, c).max(0.0).sqrt());
        }
    }
    Ok(v)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UpperBound {
    pub d_upper: usize,
    pub certificate: VectorEntryMatrix,
}

/// Smallest `d` for which one of the explicit constructions produced a
/// residual-certified witness. An upper bound on the minimal `d`, not the
/// minimal `d` itself.
pub fn dmin_upper_bound(p: &BistochasticMatrix, field: Field) -> UpperBound {
    let n = p.n();
    if field == Field::R && n > 1 && n % 2 == 1 {
        if let Ok(res) = construct_nminus1(p, Mode::Weighted) {
            if res.certified {
                return UpperBound { d_upper: n - 1, certificate: res.v };
            }
        }
    }
    let certificate = construct_full(p, field, n).expect("d = n is always admissible");
    UpperBound { d_upper: n, certificate }
}
