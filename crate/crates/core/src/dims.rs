//! Real dimensions of the isometry set and of its double quotient by the
//! diagonal actions.
//!
//! These are formula evaluations. For tiny `n` the quotient can degenerate
//! and the formulas may even go negative (for instance ℍ with `n = d = 1`);
//! the values are returned as computed.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalars::Field;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionReport {
    pub field: Field,
    pub n: usize,
    pub d: usize,
    pub dim_iso: i64,
    pub dim_doc: i64,
}

pub fn dims(field: Field, n: usize, d: usize) -> Result<DimensionReport> {
    if n == 0 || d == 0 {
        return Err(Error::InvalidArgument(format!("n = {n} and d = {d} must be positive")));
    }
    let (n_, d_) = (n as i64, d as i64);
    let (dim_iso, dim_doc) = match field {
        // (d − 1/2) n² − n/2  and  (d − 1/2) n² − (d² − d + 1) n / 2
        Field::R => (n_ * ((2 * d_ - 1) * n_ - 1) / 2, n_ * ((2 * d_ - 1) * n_ - (d_ * d_ - d_ + 1)) / 2),
        Field::C => ((2 * d_ - 1) * n_ * n_, (2 * d_ - 1) * n_ * n_ - (d_ * d_ + 1) * n_ + 1),
        Field::H => ((4 * d_ - 2) * n_ * n_ + n_, (4 * d_ - 2) * n_ * n_ - (d_ * d_ + d_ + 2) * n_),
    };
    Ok(DimensionReport { field, n, d, dim_iso, dim_doc })
}
