//! Numerical membership search: minimize `Σ (‖v_i^j‖² − p_i^j)²` over the
//! isometries `F^n → F^{nd}`.
//!
//! Riemannian-style projected gradient descent. The ambient gradient block
//! for entry `v` is `4 (‖v‖² − p) v`; it is projected onto the tangent space
//! `G − V herm(V* G)` and every trial point is pulled back onto the manifold
//! by Gram–Schmidt on the `nd × n` column matrix. Steps halve when the
//! objective goes up and double after an accepted step.
//!
//! Entries with small targets have small gradients, which makes plain
//! descent crawl. Each iteration therefore first tries the blockwise
//! rescaled direction `(‖v‖² − p) v / (‖v‖² + δ)` (a per-entry Newton step
//! on the norm) and falls back to the plain gradient only when backtracking
//! on the rescaled one finds no decrease. Restarts begin with the moduli
//! already matched, `v = √p · u` for random unit `u`, then orthonormalized.
//!
//! Only successes mean anything. A failure at some `d` is evidence, not a
//! lower bound.

use serde::{Deserialize, Serialize};

use crate::construct::{construct_full, construct_nminus1, Mode};
use crate::error::{Error, Result};
use crate::matrix::{isometry_residual, BistochasticMatrix, VectorEntryMatrix};
use crate::ortho::orthonormalize_columns;
use crate::sample::{normal_scalar, random_orthonormal_columns, rng_for, SampleRng};
use crate::scalars::{inner_slices, norm_sq_slice, Field, Scalar};

/// Isometry tolerance a returned certificate must meet.
pub const CERTIFICATE_ISOMETRY_TOL: f64 = 1e-9;
const MIN_STEP: f64 = 1e-14;
const STALL_WINDOW: usize = 100;
const STALL_RATIO: f64 = 1e-9;
const PRECONDITION_SHIFT: f64 = 1e-4;
const START_ATTEMPTS: usize = 100;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub field: Field,
    pub n: usize,
    pub d: usize,
    pub restarts: usize,
    pub max_iters: usize,
    pub step_init: f64,
    pub success_tol: f64,
    pub seed: u64,
}

impl SearchConfig {
    pub fn new(field: Field, n: usize, d: usize, seed: u64) -> Self {
        SearchConfig { field, n, d, restarts: 32, max_iters: 5000, step_init: 0.1, success_tol: 1e-6, seed }
    }

    fn validate(&self, p: &BistochasticMatrix) -> Result<()> {
        if self.n != p.n() {
            return Err(Error::DimensionMismatch(format!(
                "config is for n = {} but P is {}x{}",
                self.n,
                p.n(),
                p.n()
            )));
        }
        if self.d == 0 || self.restarts == 0 {
            return Err(Error::InvalidArgument("d and restarts must be at least 1".into()));
        }
        if !(self.step_init > 0.0 && self.success_tol > 0.0) {
            return Err(Error::InvalidArgument("step and tolerance must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Search,
    ConstructNminus1,
    ConstructFull,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub method: Method,
    pub best_v: VectorEntryMatrix,
    /// `max |ν(best_v) − P|`, recomputed from `best_v`.
    pub best_residual: f64,
    pub isometry_residual: f64,
    pub iters_used: usize,
    pub restarts_used: usize,
    pub success: bool,
    pub seed: u64,
    pub config: SearchConfig,
}

impl SearchResult {
    fn certify(
        method: Method,
        p: &BistochasticMatrix,
        v: VectorEntryMatrix,
        iters_used: usize,
        restarts_used: usize,
        config: SearchConfig,
    ) -> Self {
        let best_residual = p.max_abs_diff(&v.squared_norms());
        let iso = isometry_residual(&v);
        SearchResult {
            method,
            best_v: v,
            best_residual,
            isometry_residual: iso,
            iters_used,
            restarts_used,
            success: best_residual <= config.success_tol && iso <= CERTIFICATE_ISOMETRY_TOL,
            seed: config.seed,
            config,
        }
    }
}

/// Working state of one descent run: `n` columns of length `n d`.
struct Descent<'a> {
    p: &'a BistochasticMatrix,
    n: usize,
    d: usize,
}

impl Descent<'_> {
    fn len(&self) -> usize {
        self.n * self.d
    }

    /// Returns `(f, max residual)`; also fills `diff[row * n + col] = ‖v‖² − p`.
    fn evaluate(&self, data: &[Scalar], diff: &mut [f64]) -> (f64, f64) {
        let (n, d, len) = (self.n, self.d, self.len());
        let mut f = 0.0;
        let mut worst = 0.0f64;
        for c in 0..n {
            let col = &data[c * len..(c + 1) * len];
            for r in 0..n {
                let e = norm_sq_slice(&col[r * d..(r + 1) * d]) - self.p.get(r, c);
                diff[r * n + c] = e;
                f += e * e;
                worst = worst.max(e.abs());
            }
        }
        (f, worst)
    }

    /// Tangent-projected descent direction at `data`: the gradient, or its
    /// blockwise rescaling when `rescaled`.
    fn direction(
        &self,
        data: &[Scalar],
        diff: &[f64],
        rescaled: bool,
        grad: &mut [Scalar],
        gram: &mut [Scalar],
    ) {
        let (n, d, len) = (self.n, self.d, self.len());
        for c in 0..n {
            for r in 0..n {
                let base = c * len + r * d;
                let s = if rescaled {
                    diff[r * n + c] / (norm_sq_slice(&data[base..base + d]) + PRECONDITION_SHIFT)
                } else {
                    4.0 * diff[r * n + c]
                };
                for k in 0..d {
                    grad[base + k] = data[base + k].scale(s);
                }
            }
        }
        // gram = V* G, then hermitian part
        for a in 0..n {
            for b in 0..n {
                gram[a * n + b] = inner_slices(&data[a * len..(a + 1) * len], &grad[b * len..(b + 1) * len]);
            }
        }
        for a in 0..n {
            for b in a..n {
                let h = (gram[a * n + b] + gram[b * n + a].conj()).scale(0.5);
                gram[a * n + b] = h;
                gram[b * n + a] = h.conj();
            }
        }
        // G -= V H
        for b in 0..n {
            for a in 0..n {
                let h = gram[a * n + b];
                for t in 0..len {
                    let delta = data[a * len + t] * h;
                    grad[b * len + t] -= delta;
                }
            }
        }
    }
}

struct RunOutcome {
    data: Vec<Scalar>,
    residual: f64,
    iters: usize,
}

fn run_once(desc: &Descent<'_>, start: Vec<Scalar>, cfg: &SearchConfig) -> RunOutcome {
    let n = desc.n;
    let len = desc.len();
    let mut data = start;
    let mut diff = vec![0.0; n * n];
    let mut grad = vec![Scalar::ZERO; len * n];
    let mut gram = vec![Scalar::ZERO; n * n];
    let mut trial = vec![Scalar::ZERO; len * n];
    let mut trial_diff = vec![0.0; n * n];

    let (mut f, mut worst) = desc.evaluate(&data, &mut diff);
    let mut step = cfg.step_init;
    let mut iters = 0;
    let mut window_start_f = f;
    let mut since_window = 0;

    while iters < cfg.max_iters && worst > cfg.success_tol {
        iters += 1;
        let mut accepted = false;
        for rescaled in [true, false] {
            desc.direction(&data, &diff, rescaled, &mut grad, &mut gram);
            let mut s = step;
            while s >= MIN_STEP {
                for ((t, x), g) in trial.iter_mut().zip(&data).zip(&grad) {
                    *t = *x - g.scale(s);
                }
                if orthonormalize_columns(&mut trial, len, n) {
                    let (f_new, w_new) = desc.evaluate(&trial, &mut trial_diff);
                    if f_new < f {
                        std::mem::swap(&mut data, &mut trial);
                        std::mem::swap(&mut diff, &mut trial_diff);
                        f = f_new;
                        worst = w_new;
                        accepted = true;
                        break;
                    }
                }
                s *= 0.5;
            }
            if accepted {
                if rescaled {
                    step = s * 2.0;
                }
                break;
            }
        }
        if !accepted {
            break;
        }
        since_window += 1;
        if since_window == STALL_WINDOW {
            if window_start_f - f <= STALL_RATIO * window_start_f {
                break;
            }
            window_start_f = f;
            since_window = 0;
        }
    }
    RunOutcome { data, residual: worst, iters }
}

/// Start with `‖v_i^j‖² = p_i^j` and random directions, orthonormalized.
/// Falls back to a plain Gaussian start if the pattern keeps collapsing.
fn moduli_start(p: &BistochasticMatrix, field: Field, d: usize, rng: &mut SampleRng) -> Vec<Scalar> {
    let n = p.n();
    let len = n * d;
    for _ in 0..START_ATTEMPTS {
        let mut data = vec![Scalar::ZERO; len * n];
        for c in 0..n {
            for r in 0..n {
                let block = &mut data[c * len + r * d..c * len + (r + 1) * d];
                block.iter_mut().for_each(|x| *x = normal_scalar(field, rng));
                let s = (p.get(r, c) / norm_sq_slice(block)).sqrt();
                block.iter_mut().for_each(|x| *x = x.scale(s));
            }
        }
        if orthonormalize_columns(&mut data, len, n) {
            return data;
        }
    }
    random_orthonormal_columns(field, len, n, rng)
}

/// Multi-restart search at fixed `(field, d)`. Restart `r` draws its start
/// from ChaCha stream `r` of `cfg.seed`; the run
/// stops at the first success. The returned residuals are recomputed from
/// the returned matrix.
pub fn search_fixed_d(p: &BistochasticMatrix, cfg: &SearchConfig) -> Result<SearchResult> {
    cfg.validate(p)?;
    let (n, d, field) = (cfg.n, cfg.d, cfg.field);
    let desc = Descent { p, n, d };
    let mut best: Option<RunOutcome> = None;
    let mut total_iters = 0;
    let mut restarts_used = 0;
    for r in 0..cfg.restarts {
        let mut rng = rng_for(cfg.seed, r as u64);
        let start = moduli_start(p, field, d, &mut rng);
        let out = run_once(&desc, start, cfg);
        total_iters += out.iters;
        restarts_used += 1;
        let done = out.residual <= cfg.success_tol;
        if best.as_ref().is_none_or(|b| out.residual < b.residual) {
            best = Some(out);
        }
        if done {
            break;
        }
    }
    let best = best.expect("at least one restart");
    let v = VectorEntryMatrix::from_columns(field, n, d, best.data);
    Ok(SearchResult::certify(Method::Search, p, v, total_iters, restarts_used, cfg.clone()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DminEstimate {
    pub field: Field,
    /// Upper bound on the minimal `d`; exact only if the lower-`d` failures
    /// are genuine, which the search cannot prove.
    pub d_est: usize,
    pub per_d: Vec<SearchResult>,
}

impl DminEstimate {
    pub fn certificate(&self) -> &SearchResult {
        self.per_d.last().expect("estimate always ends with a success")
    }
}

/// Runs `search_fixed_d` for `d = 1, 2, …` until one succeeds.
///
/// Over ℝ with odd `n > 1` the `(n−1)` construction is tried first (weighted,
/// then literal; both are residual-certified) and, when certified, caps the
/// search below `n − 1`. Otherwise `d = n`
/// falls back to the universal construction, which always succeeds.
pub fn estimate_dmin(p: &BistochasticMatrix, field: Field, cfg_base: &SearchConfig) -> Result<DminEstimate> {
    let n = p.n();
    let mut cfg = cfg_base.clone();
    cfg.field = field;
    cfg.n = n;

    let mut constructed = None;
    if field == Field::R && n > 1 && n % 2 == 1 {
        constructed = [Mode::Weighted, Mode::PaperLiteral]
            .into_iter()
            .filter_map(|mode| construct_nminus1(p, mode).ok())
            .find(|res| res.certified)
            .map(|res| (n - 1, Method::ConstructNminus1, res.v));
    }
    let cap = constructed.as_ref().map_or(n, |c| c.0);

    let mut per_d = Vec::new();
    for d in 1..cap {
        cfg.d = d;
        let res = search_fixed_d(p, &cfg)?;
        let ok = res.success;
        per_d.push(res);
        if ok {
            return Ok(DminEstimate { field, d_est: d, per_d });
        }
    }
    let (d, method, v) = match constructed {
        Some(c) => c,
        None => (n, Method::ConstructFull, construct_full(p, field, n)?),
    };
    cfg.d = d;
    per_d.push(SearchResult::certify(method, p, v, 0, 0, cfg));
    Ok(DminEstimate { field, d_est: d, per_d })
}
