//! Acceptance suite: ten end-to-end criteria at fixed tolerances, seeds and
//! time limits. Prints one PASS/FAIL line per criterion and exits non-zero
//! if any fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::Rng;
use serde_json::Value;
use vecstoch::sample::{
    isometry_with, random_unitary, rng_for, sinkhorn_with, symmetric_sinkhorn_with, unit_scalar,
};
use vecstoch::*;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

/// Runs `check`, folds the wall-clock bound into the verdict, prints a line.
fn criterion(id: usize, title: &str, limit: Option<Duration>, check: impl FnOnce() -> Verdict) -> bool {
    let start = Instant::now();
    let mut v = check();
    let elapsed = start.elapsed();
    if let Some(limit) = limit {
        if elapsed > limit {
            v.pass = false;
            v.detail += &format!("; exceeded {:.0} s", limit.as_secs_f64());
        }
    }
    let tag = if v.pass { "PASS" } else { "FAIL" };
    println!("{tag}  [{id:>2}] {title} ({:.2} s): {}", elapsed.as_secs_f64(), v.detail);
    v.pass
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Dense LU solve of `x_i + x_{i+1} = ξ_{i+2}` (indices mod n).
fn dense_cyclic(xi: &[f64]) -> Vec<f64> {
    let n = xi.len();
    let mut m = DMatrix::<f64>::zeros(n, n);
    let mut b = DVector::<f64>::zeros(n);
    for i in 0..n {
        m[(i, i)] = 1.0;
        m[(i, (i + 1) % n)] = 1.0;
        b[i] = xi[(i + 2) % n];
    }
    m.lu().solve(&b).expect("odd cyclic system is nonsingular").iter().copied().collect()
}

fn cyclic_solver_matches_dense_solve() -> Verdict {
    let mut rng = rng_for(1, 0);
    let mut worst = 0.0f64;
    for n in (3..=99).step_by(2) {
        for _ in 0..100 {
            let xi: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let dense = dense_cyclic(&xi);
            let closed = match solve_cyclic(&xi) {
                Ok(x) => x,
                Err(e) => return verdict(false, format!("n = {n}: {e}")),
            };
            let scale = dense.iter().fold(f64::MIN_POSITIVE, |m, x| m.max(x.abs()));
            worst = worst.max(max_abs_diff(&closed, &dense) / scale);
        }
    }
    verdict(worst <= 1e-10, format!("4900 systems, worst relative error {worst:.1e}"))
}

fn strictly_feasible_symmetric<R: Rng>(n: usize, rng: &mut R) -> BistochasticMatrix {
    loop {
        let p = symmetric_sinkhorn_with(n, rng).expect("positive input balances");
        let positive = p.as_slice().iter().all(|&x| x > 0.0);
        let strict = check_feasibility(&p).is_ok_and(|r| r.verdict == vecstoch::Verdict::StrictInterior);
        if positive && strict {
            return p;
        }
    }
}

fn symmetric_input_certifies_in_both_modes() -> Verdict {
    let mut worst = 0.0f64;
    let mut failures = 0;
    for n in [3, 5, 7] {
        let mut rng = rng_for(2, n as u64);
        for _ in 0..1000 {
            let p = strictly_feasible_symmetric(n, &mut rng);
            for mode in [Mode::PaperLiteral, Mode::Weighted] {
                match construct_nminus1(&p, mode) {
                    Ok(res) => {
                        let r = res.residual_nu.max(res.residual_isometry);
                        worst = worst.max(r);
                        failures += (r > 1e-9) as usize;
                    }
                    Err(_) => failures += 1,
                }
            }
        }
    }
    verdict(failures == 0, format!("6000 constructions, {failures} failures, worst residual {worst:.1e}"))
}

fn weighted_successes_are_certified() -> Verdict {
    let mut pass = true;
    let mut parts = Vec::new();
    for n in [3, 5, 7] {
        let mut rng = rng_for(3, n as u64);
        let (mut successes, mut uncertified) = (0, 0);
        for _ in 0..1000 {
            let p = sinkhorn_with(n, &mut rng).expect("positive input balances");
            if let Ok(res) = construct_nminus1(&p, Mode::Weighted) {
                successes += 1;
                let round_trip = nu(&res.v, 1e-9).map(|q| q.max_abs_diff(p.as_slice()));
                if !res.certified || round_trip.map_or(true, |r| r > 1e-9) {
                    uncertified += 1;
                }
            }
        }
        pass &= uncertified == 0;
        parts.push(format!("n={n}: {:.1}% succeed, {uncertified} uncertified", successes as f64 / 10.0));
    }
    verdict(pass, parts.join(", "))
}

/// Each diagonal entry at most the sum of the other two, evaluated directly.
fn triangle_verdict(p: &BistochasticMatrix) -> vecstoch::Verdict {
    let q = p.diagonal();
    let excess = (0..3).map(|i| q[i] - q[(i + 1) % 3] - q[(i + 2) % 3]).fold(f64::NEG_INFINITY, f64::max);
    let zero_offdiag = (0..3).any(|r| (0..3).any(|c| r != c && p.get(r, c) <= 1e-12));
    if excess > 1e-12 {
        vecstoch::Verdict::Infeasible
    } else if excess < -1e-12 && !zero_offdiag {
        vecstoch::Verdict::StrictInterior
    } else {
        vecstoch::Verdict::Boundary
    }
}

fn three_by_three_feasibility_matches_triangles() -> Verdict {
    let mut rng = rng_for(4, 0);
    let mut counts = [0usize; 3];
    let mut mismatches = 0;
    for i in 0..10_000u64 {
        // half Sinkhorn (interior), half sparse mixtures of permutations
        let p = if i % 2 == 0 {
            sinkhorn_with(3, &mut rng).expect("positive input balances")
        } else {
            sample_birkhoff(3, rng.random_range(1..=3), rng.random()).expect("valid sizes")
        };
        let got = check_feasibility(&p).expect("n = 3 is odd").verdict;
        mismatches += (got != triangle_verdict(&p)) as usize;
        counts[got as usize] += 1;
    }
    verdict(
        mismatches == 0,
        format!(
            "10000 matrices ({} strict, {} boundary, {} infeasible), {mismatches} mismatches",
            counts[0], counts[1], counts[2]
        ),
    )
}

fn uniform_three_golden_values() -> Verdict {
    let p = BistochasticMatrix::uniform(3);
    let mut worst_res = 0.0f64;
    let mut worst_coef = 0.0f64;
    for mode in [Mode::PaperLiteral, Mode::Weighted] {
        let res = match construct_nminus1(&p, mode) {
            Ok(r) => r,
            Err(e) => return verdict(false, format!("{mode:?}: {e}")),
        };
        let round_trip = nu(&res.v, 1e-14).map(|q| q.max_abs_diff(p.as_slice())).unwrap_or(f64::INFINITY);
        worst_res = worst_res.max(res.residual_nu).max(res.residual_isometry).max(round_trip);
        for r in 0..3 {
            for c in 0..3 {
                if r != c {
                    worst_coef = worst_coef.max((res.a[r][c].powi(2) - 1.0 / 6.0).abs());
                }
            }
        }
    }
    verdict(
        worst_res <= 1e-14 && worst_coef <= 1e-14,
        format!("residuals {worst_res:.1e}, coefficient squares off 1/6 by {worst_coef:.1e}"),
    )
}

fn full_construction_on_random_inputs() -> Verdict {
    let mut worst = 0.0f64;
    for (k, field) in Field::ALL.into_iter().enumerate() {
        let mut rng = rng_for(6, k as u64);
        for i in 0..1000 {
            let n = 1 + i % 8;
            let p = sinkhorn_with(n, &mut rng).expect("positive input balances");
            let v = match construct_full(&p, field, n) {
                Ok(v) => v,
                Err(e) => return verdict(false, format!("{field} n = {n}: {e}")),
            };
            let round_trip = nu(&v, 1e-11).map(|q| q.max_abs_diff(p.as_slice())).unwrap_or(f64::INFINITY);
            worst = worst.max(isometry_residual(&v)).max(round_trip);
        }
    }
    verdict(worst <= 1e-11, format!("3000 constructions, worst residual {worst:.1e}"))
}

fn embeddings_and_actions_preserve_nu() -> Verdict {
    let mut worst = 0.0f64;
    let mut failed = None;
    for (k, field) in Field::ALL.into_iter().enumerate() {
        let mut rng = rng_for(7, k as u64);
        for i in 0..1000 {
            let (n, d) = (1 + i % 5, 1 + (i / 5) % 3);
            let v = isometry_with(field, n, d, &mut rng).expect("valid sizes");
            let p = v.squared_norms();
            let mut check = |label: &str, got: Result<Vec<f64>>, want: &[f64]| match got {
                Ok(q) => worst = worst.max(max_abs_diff(&q, want)),
                Err(e) => failed = Some(format!("{label} over {field}: {e}")),
            };

            check("pad", pad_dimension(&v, d + 2).map(|w| w.squared_norms()), &p);
            match field {
                Field::R => check(
                    "lift + realify",
                    lift_field(&v, Field::C).and_then(|w| realify(&w)).map(|w| w.squared_norms()),
                    &p,
                ),
                Field::C => check("realify", realify(&v).map(|w| w.squared_norms()), &p),
                Field::H => {
                    let c = complexify_from_quaternion(&v);
                    check("complexify", c.clone().map(|w| w.squared_norms()), &p);
                    check("complexify + realify", c.and_then(|w| realify(&w)).map(|w| w.squared_norms()), &p);
                }
            }

            let blocks: Vec<SquareMatrix> = (0..n).map(|_| random_unitary(field, d, &mut rng)).collect();
            let phases: Vec<Scalar> = (0..n).map(|_| unit_scalar(field, &mut rng)).collect();
            check("act_diag", act_diag(&v, &blocks, &phases, 1e-10).map(|w| w.squared_norms()), &p);

            let mut sigma: Vec<usize> = (0..n).collect();
            let mut tau = sigma.clone();
            sigma.shuffle(&mut rng);
            tau.shuffle(&mut rng);
            let permuted = nu(&v, 1e-10).and_then(|q| q.permuted(&sigma, &tau));
            match permuted {
                Ok(q) => {
                    check("act_perm", act_perm(&v, &sigma, &tau).map(|w| w.squared_norms()), q.as_slice())
                }
                Err(e) => failed = Some(format!("nu over {field}: {e}")),
            }
        }
    }
    match failed {
        Some(msg) => verdict(false, msg),
        None => verdict(worst <= 1e-12, format!("3000 isometries, worst ν deviation {worst:.1e}")),
    }
}

fn dimension_counts() -> Verdict {
    let mut bad = Vec::new();
    for k in 1..=10usize {
        let k_ = k as i64;
        let expect = [(Field::R, k_ * (k_ - 1) / 2), (Field::C, k_ * k_), (Field::H, 2 * k_ * k_ + k_)];
        for (field, want) in expect {
            let got = dims(field, k, 1).map(|r| r.dim_iso).ok();
            if got != Some(want) {
                bad.push(format!("dim_iso({field}, {k}, 1) = {got:?}, want {want}"));
            }
        }
        let got = dims(Field::C, k, 1).map(|r| r.dim_doc).ok();
        if got != Some((k_ - 1) * (k_ - 1)) {
            bad.push(format!("dim_doc(C, {k}, 1) = {got:?}"));
        }
    }
    verdict(bad.is_empty(), if bad.is_empty() { "40 exact values".to_string() } else { bad.join("; ") })
}

fn planted_instances_are_recovered() -> Verdict {
    let mut worst: Option<(f64, String)> = None;
    let mut total = (0, 0);
    let mut uncertified = 0;
    for field in Field::ALL {
        for n in 1..=5usize {
            for d in 1..=n {
                let mut ok = 0;
                for i in 0..100u64 {
                    let seed = 9_000 + 1_000 * n as u64 + 100 * d as u64 + i;
                    let planted = sample_isometry(field, n, d, seed).and_then(|v| nu(&v, 1e-10));
                    let p = match planted {
                        Ok(p) => p,
                        Err(e) => return verdict(false, format!("planting {field} ({n}, {d}): {e}")),
                    };
                    let res = search_fixed_d(&p, &SearchConfig::new(field, n, d, i)).expect("valid config");
                    if res.success {
                        ok += 1;
                        let recomputed = p.max_abs_diff(&res.best_v.squared_norms());
                        if !is_isometry(&res.best_v, 1e-9).ok || recomputed > 1e-6 {
                            uncertified += 1;
                        }
                    }
                }
                total.0 += ok;
                total.1 += 100;
                let rate = ok as f64 / 100.0;
                if worst.as_ref().is_none_or(|w| rate < w.0) {
                    worst = Some((rate, format!("{field} (n={n}, d={d})")));
                }
            }
        }
    }
    let (rate, at) = worst.expect("at least one pair");
    verdict(
        rate >= 0.95 && uncertified == 0,
        format!(
            "{}/{} recovered over 45 (field, n, d) pairs, lowest {:.0}% at {at}, {uncertified} uncertified",
            total.0,
            total.1,
            100.0 * rate
        ),
    )
}

fn strict_diagonal(p: &[Vec<f64>]) -> bool {
    let q = [p[0][0], p[1][1], p[2][2]];
    (0..3).all(|i| q[i] < q[(i + 1) % 3] + q[(i + 2) % 3])
}

fn scan_harness_smoke_test() -> Verdict {
    let out =
        Command::new(env!("CARGO_BIN_EXE_vecstoch")).args(["scan", "--n", "3", "--samples", "200"]).output();
    let out = match out {
        Ok(o) if o.status.success() => o,
        Ok(o) => return verdict(false, format!("exit {:?}", o.status.code())),
        Err(e) => return verdict(false, e.to_string()),
    };
    let report: Value = match serde_json::from_slice(&out.stdout) {
        Ok(v) => v,
        Err(e) => return verdict(false, format!("unparseable output: {e}")),
    };
    let records = report["records"].as_array().cloned().unwrap_or_default();
    let mut strict = 0;
    let mut violations = 0;
    for r in &records {
        let rows: Vec<Vec<f64>> = serde_json::from_value(r["p"]["rows"].clone()).unwrap_or_default();
        if rows.len() == 3 && strict_diagonal(&rows) {
            strict += 1;
            violations += (r["d_est"].as_u64().unwrap_or(u64::MAX) > 2) as usize;
        }
    }
    verdict(
        records.len() == 200 && violations == 0,
        format!(
            "{} samples, histogram {}, {strict} strictly triangular diagonals, {violations} with d_est > 2",
            records.len(),
            report["histogram"]
        ),
    )
}

fn main() -> ExitCode {
    let secs = Duration::from_secs;
    let results = [
        criterion(
            1,
            "cyclic closed form vs dense solve, odd n ≤ 99",
            Some(secs(5)),
            cyclic_solver_matches_dense_solve,
        ),
        criterion(
            2,
            "symmetric inputs certify in both modes",
            Some(secs(30)),
            symmetric_input_certifies_in_both_modes,
        ),
        criterion(
            3,
            "weighted successes on general inputs are certified",
            None,
            weighted_successes_are_certified,
        ),
        criterion(
            4,
            "3×3 feasibility verdicts vs triangle inequalities",
            Some(secs(2)),
            three_by_three_feasibility_matches_triangles,
        ),
        criterion(5, "uniform 3×3 golden values", None, uniform_three_golden_values),
        criterion(6, "universal d = n construction", Some(secs(20)), full_construction_on_random_inputs),
        criterion(7, "embeddings and actions preserve ν", Some(secs(20)), embeddings_and_actions_preserve_nu),
        criterion(8, "dimension counts at d = 1", None, dimension_counts),
        criterion(9, "planted-instance recovery by search", Some(secs(120)), planted_instances_are_recovered),
        criterion(10, "scan --n 3 --samples 200", Some(secs(60)), scan_harness_smoke_test),
    ];
    let passed = results.iter().filter(|&&p| p).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
