//! Batch estimates of the minimal `d` over randomly sampled bistochastic
//! matrices: the raw data for asking how large `d` must get as `n` grows.

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::construct::{check_feasibility, Verdict};
use crate::error::{Error, Result};
use crate::matrix::BistochasticMatrix;
use crate::sample::{rng_for, sinkhorn_with};
use crate::scalars::Field;
use crate::search::{estimate_dmin, Method, SearchConfig};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRecord {
    pub index: usize,
    pub p: BistochasticMatrix,
    pub d_est: usize,
    pub method: Method,
    pub best_residual: f64,
    /// The diagonal lies strictly inside the cyclic feasibility region
    /// (always false for even `n`).
    pub strict_interior: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub field: Field,
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    /// `d_est → number of samples`.
    pub histogram: BTreeMap<usize, usize>,
    pub strict_interior_count: usize,
    /// Largest `d_est` among strictly interior samples.
    pub strict_interior_max_d: Option<usize>,
    pub records: Vec<ScanRecord>,
}

/// Runs [`estimate_dmin`] on `samples` Sinkhorn matrices of size `n`.
///
/// Sample `i` draws its matrix and then its search seed from ChaCha stream
/// `i` of `seed`, so each record is reproducible on its own and the samples
/// can be processed in any order.
pub fn scan(field: Field, n: usize, samples: usize, seed: u64) -> Result<ScanReport> {
    if n == 0 || samples == 0 {
        return Err(Error::InvalidArgument(format!("n = {n} and samples = {samples} must be positive")));
    }
    let records = (0..samples)
        .into_par_iter()
        .map(|index| scan_one(field, n, seed, index))
        .collect::<Result<Vec<_>>>()?;

    let mut histogram = BTreeMap::new();
    for r in &records {
        *histogram.entry(r.d_est).or_insert(0) += 1;
    }
    let strict: Vec<usize> = records.iter().filter(|r| r.strict_interior).map(|r| r.d_est).collect();
    Ok(ScanReport {
        field,
        n,
        samples,
        seed,
        histogram,
        strict_interior_count: strict.len(),
        strict_interior_max_d: strict.into_iter().max(),
        records,
    })
}

fn scan_one(field: Field, n: usize, seed: u64, index: usize) -> Result<ScanRecord> {
    let mut rng = rng_for(seed, index as u64);
    let p = sinkhorn_with(n, &mut rng)?;
    let cfg = SearchConfig::new(field, n, 1, rng.random());
    let strict_interior =
        n % 2 == 1 && check_feasibility(&p).is_ok_and(|rep| rep.verdict == Verdict::StrictInterior);
    let est = estimate_dmin(&p, field, &cfg)?;
    let cert = est.certificate();
    Ok(ScanRecord {
        index,
        d_est: est.d_est,
        method: cert.method,
        best_residual: cert.best_residual,
        strict_interior,
        p,
    })
}
