//! Acceptance gate: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p sobstencil --test acceptance --release`; pass
//! criterion numbers as arguments to run a subset (`-- 1 2 5`).
//! Tolerances are fixed below and are never loosened to make a line pass.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use rug::{Integer, Rational};
use sobstencil::analysis::{
    bl_scaling_check, compare_methods, dual_norm_squared, estimate_rates, fit_log_power, fourier_oracle_norm_squared,
    median_of_last, slopes, stencil_convergence_study, FourierOptions, HGrid, RateStudy, StencilRecipe,
};
use sobstencil::functionals::{ErrorFunctional, Functional};
use sobstencil::kernels::KernelSpec;
use sobstencil::polyspace::{qmax, NodeSet};
use sobstencil::scalar::{bessel_kv_rv, matern_series, DEFAULT_STUDY_PRECISION};
use sobstencil::stencils::{build_exact, build_polyharmonic};
use sobstencil::Real;

const STAR_PRECISION: u32 = 256;
const STAR_WEIGHT_TOL: f64 = 1e-30;
const SCALING_PRECISION: u32 = 256;
const SLOPE_TOL: f64 = 0.05;
const GAUSSIAN_SLOPE_TOL: f64 = 0.1;
const TOY_RATIO_TOL: f64 = 0.02;
const EXCESS_SLOPE_TOL: f64 = 0.1;
const EXCESS_LOG_POWER_TOL: f64 = 0.25;
const QUOTIENT_FINAL_MAX: f64 = 1.1;
const ORACLE_REL_TOL: f64 = 1e-8;
const PROPERTY_CASES: u32 = 128;

/// Seeds of the random node sets, fixed so every run sees the same points.
const SEED_18: u64 = 18;
const SEED_10: u64 = 10;
const SEED_15: u64 = 15;
const SEED_30: u64 = 30;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

type Check = fn() -> Result<Outcome, String>;

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn criterion_1() -> Result<Outcome, String> {
    let start = Instant::now();
    let star = NodeSet::five_point_star(STAR_PRECISION);
    let s = build_exact(&Functional::Laplacian, &star, 3).map_err(err)?;
    let expected = [-4.0, 1.0, 1.0, 1.0, 1.0];
    let dev = s
        .weights
        .iter()
        .zip(expected)
        .map(|(w, e)| (w - Real::from_f64(e, STAR_PRECISION)).abs().to_f64())
        .fold(0.0, f64::max);
    let q = qmax(&Functional::Laplacian, &star, None, 10).map_err(err)?;
    let secs = start.elapsed().as_secs_f64();
    Ok(outcome(
        dev < STAR_WEIGHT_TOL && q == 4 && secs < 1.0,
        format!("max weight deviation {dev:.1e}, qmax {q}, {secs:.3} s"),
    ))
}

fn criterion_2() -> Result<Outcome, String> {
    use rand::{Rng, SeedableRng};
    let start = Instant::now();
    let prec = SCALING_PRECISION;
    let configs: [(usize, Functional, f64, usize); 10] = [
        (1, Functional::PointValue, 1.75, 5),
        (1, Functional::partial(&[1]), 2.5, 6),
        (1, Functional::partial(&[2]), 3.25, 6),
        (2, Functional::PointValue, 2.0, 6),
        (2, Functional::partial(&[1, 0]), 2.75, 7),
        (2, Functional::Laplacian, 3.5, 10),
        (2, Functional::Laplacian, 4.0, 14),
        (3, Functional::PointValue, 2.5, 8),
        (3, Functional::partial(&[0, 1, 0]), 3.0, 8),
        (3, Functional::Laplacian, 4.0, 14),
    ];
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
    let bound = 2f64.powf(-f64::from(prec) / 2.0);
    let mut worst = 0.0f64;
    for (i, (d, lambda, m, count)) in configs.iter().enumerate() {
        let nodes = NodeSet::random(*count, *d, 100 + i as u64, prec).map_err(err)?;
        let s = build_polyharmonic(lambda, &nodes, *m).map_err(err)?;
        let h = Real::from_f64(rng.random_range(0.01..0.9), prec);
        let ratio = bl_scaling_check(&s, *m, &h).map_err(err)?;
        worst = worst.max((ratio - 1.0f64).abs().to_f64());
    }
    let secs = start.elapsed().as_secs_f64();
    Ok(outcome(
        worst < bound && secs < 10.0,
        format!("10 configurations, max |ratio - 1| = {worst:.1e} (bound {bound:.1e}), {secs:.2} s"),
    ))
}

fn sobolev_rate(nodes: &NodeSet, recipe: StencilRecipe, m: f64) -> Result<(f64, f64, u32), String> {
    let mut study = RateStudy::new(Functional::Laplacian, nodes.clone(), recipe, KernelSpec::matern(m, 2));
    study.grid = HGrid { h0: 0.125, ratio: 0.5, count: 20 };
    let r = estimate_rates(&study).map_err(err)?;
    Ok((r.verdict.terminal_slope, r.predicted_rate, r.precision_bits))
}

fn criterion_3() -> Result<Outcome, String> {
    let nodes = NodeSet::random(18, 2, SEED_18, DEFAULT_STUDY_PRECISION).map_err(err)?;
    let q = qmax(&Functional::Laplacian, &nodes, None, 10).map_err(err)?;
    let (a, pa, ba) = sobolev_rate(&nodes, StencilRecipe::SobolevOptimal, 3.75)?;
    let (b, pb, bb) = sobolev_rate(&nodes, StencilRecipe::SobolevOptimal, 6.25)?;
    Ok(outcome(
        (a - 0.75).abs() <= SLOPE_TOL && (b - 2.0).abs() <= SLOPE_TOL,
        format!(
            "qmax {q}; m=3.75 slope {a:.4} (target 0.75, theory {pa}); m=6.25 slope {b:.4} (target 2.0, theory {pb}); {ba}/{bb} bits"
        ),
    ))
}

fn criterion_4() -> Result<Outcome, String> {
    let nodes = NodeSet::random(18, 2, SEED_18, DEFAULT_STUDY_PRECISION).map_err(err)?;
    // q(m', 2) = 5 for the polyharmonic order m' = 5.5.
    let recipe = StencilRecipe::Polyharmonic { m: 5.5 };
    let (a, pa, _) = sobolev_rate(&nodes, recipe.clone(), 6.25)?;
    let (b, pb, _) = sobolev_rate(&nodes, recipe, 10.0)?;
    Ok(outcome(
        (a - 2.0).abs() <= SLOPE_TOL && (b - 3.0).abs() <= SLOPE_TOL,
        format!("order-5 stencil: m=6.25 slope {a:.4} (target 2.0, theory {pa}); m=10 slope {b:.4} (target 3.0, theory {pb})"),
    ))
}

fn criterion_5() -> Result<Outcome, String> {
    let prec = 256;
    let mut bad = Vec::new();
    for n in 0..=4u32 {
        let fact = |k: u32| Integer::from(Integer::factorial(k));
        let half = Real::from_f64(f64::from(n) + 0.5, prec);
        let series = matern_series(&half, 2 * n + 4, prec).map_err(err)?;
        let lead = series.leading_non_even().ok_or("no non-even term")?;
        let sign = if n % 2 == 0 { -1 } else { 1 };
        let want = Rational::from((Integer::from(sign) * (Integer::from(1) << n) * fact(n), fact(2 * n + 1)));
        if lead.exact.as_ref() != Some(&want) || lead.has_log {
            bad.push(format!("half-integer n={n}: {:?}", lead.exact));
        }
        let int = Real::from_i64(i64::from(n), prec);
        let series = matern_series(&int, 2 * n + 4, prec).map_err(err)?;
        let lead = series.leading_non_even().ok_or("no non-even term")?;
        let want = Rational::from((Integer::from(sign), (Integer::from(1) << n) * fact(n)));
        if lead.exact.as_ref() != Some(&want) || !lead.has_log {
            bad.push(format!("integer n={n}: {:?}", lead.exact));
        }
    }
    Ok(outcome(bad.is_empty(), if bad.is_empty() { "10 exact rationals match".into() } else { bad.join("; ") }))
}

fn criterion_6() -> Result<Outcome, String> {
    let prec = DEFAULT_STUDY_PRECISION;
    let space = KernelSpec::matern(2.0, 2);
    let x = NodeSet::from_f64(2, &[vec![1.0, 0.0]], prec, "unit point").map_err(err)?;
    let grid = HGrid { h0: 0.125, ratio: 0.5, count: 20 };
    let hs = grid.values(prec);
    let one = Real::one(prec);
    let mut ratios = Vec::new();
    let mut excess = Vec::new();
    for h in &hs {
        let phi = bessel_kv_rv(&one, h, prec).map_err(err)?;
        let opt = ErrorFunctional::new(Functional::PointValue, x.clone(), vec![phi], h.clone()).map_err(err)?;
        let near = ErrorFunctional::new(Functional::PointValue, x.clone(), vec![one.clone()], h.clone()).map_err(err)?;
        let no = dual_norm_squared(&opt, &space).map_err(err)?.value;
        let nn = dual_norm_squared(&near, &space).map_err(err)?.value;
        ratios.push((&no / -(h * h * h.ln())).to_f64());
        excess.push(nn - no);
    }
    // Grid index of h = 2^-20; the ratio must stay within tolerance from there on.
    let from = hs.iter().position(|h| h.to_f64() <= 2f64.powi(-20)).ok_or("grid stops above 2^-20")?;
    let worst_ratio = ratios[from..].iter().map(|r| (r - 1.0).abs()).fold(0.0, f64::max);
    let sl = slopes(&hs, &excess);
    let terminal = median_of_last(&sl, 3);
    let hf: Vec<f64> = hs.iter().map(Real::to_f64).collect();
    let ef: Vec<f64> = excess.iter().map(Real::to_f64).collect();
    let tail = 12;
    let fit = fit_log_power(&hf[hf.len() - tail..], &ef[ef.len() - tail..], None).ok_or("log fit failed")?;
    let pass = worst_ratio <= TOY_RATIO_TOL
        && (fit.k - 4.0).abs() <= EXCESS_SLOPE_TOL
        && (fit.p - 2.0).abs() <= EXCESS_LOG_POWER_TOL;
    Ok(outcome(
        pass,
        format!(
            "ratio {:.5} at h=2^-20, {:.5} at h=2^-22; excess fit k {:.4} p {:.3} (95% [{:.3}, {:.3}]), raw terminal slope {terminal:.4}",
            ratios[from],
            ratios.last().unwrap(),
            fit.k,
            fit.p,
            fit.p_interval().0,
            fit.p_interval().1
        ),
    ))
}

fn criterion_7() -> Result<Outcome, String> {
    let prec = DEFAULT_STUDY_PRECISION;
    let nodes = NodeSet::random(10, 2, SEED_10, prec).map_err(err)?;
    let r = compare_methods(
        &Functional::Laplacian,
        &nodes,
        &StencilRecipe::Polyharmonic { m: 4.0 },
        &StencilRecipe::SobolevOptimal,
        &KernelSpec::matern(4.0, 2),
        &HGrid::default(),
        prec,
        4 * prec,
    )
    .map_err(err)?;
    let min = r.ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let last = *r.ratios.last().unwrap();
    let pass = min >= 1.0 - 1e-12 && r.decreasing_tail && last < QUOTIENT_FINAL_MAX;
    Ok(outcome(
        pass,
        format!(
            "ratios {:.4} .. {last:.4}, min {min:.6}, decreasing tail {}",
            r.ratios[0], r.decreasing_tail
        ),
    ))
}

fn criterion_8() -> Result<Outcome, String> {
    let prec = DEFAULT_STUDY_PRECISION;
    let nodes = NodeSet::random(15, 2, SEED_15, prec).map_err(err)?;
    let mut pass = true;
    let mut parts = Vec::new();
    for m in [5.5, 6.0, 7.0] {
        let r = stencil_convergence_study(&Functional::Laplacian, &nodes, m, 5, &HGrid::default(), prec).map_err(err)?;
        pass &= r.observed_rate >= r.proven_rate - SLOPE_TOL;
        let doubled = if r.doubled_rate_observed { ", doubled rate" } else { "" };
        parts.push(format!("m={m}: observed {:.3} proven {}{doubled}", r.observed_rate, r.proven_rate));
    }
    Ok(outcome(pass, parts.join("; ")))
}

fn criterion_9() -> Result<Outcome, String> {
    let prec = DEFAULT_STUDY_PRECISION;
    let nodes = NodeSet::random(30, 2, SEED_30, prec).map_err(err)?;
    let q = qmax(&Functional::Laplacian, &nodes, None, 12).map_err(err)?;
    let r = compare_methods(
        &Functional::Laplacian,
        &nodes,
        &StencilRecipe::Polyharmonic { m: 7.5 },
        &StencilRecipe::SobolevOptimal,
        &KernelSpec::gaussian(2),
        &HGrid::default(),
        prec,
        4 * prec,
    )
    .map_err(err)?;
    let hs = HGrid::default().values(prec);
    let sp = median_of_last(&slopes(&hs, &r.first_norms), 3);
    let so = median_of_last(&slopes(&hs, &r.second_norms), 3);
    let tail = &r.ratios[r.ratios.len() - 5..];
    let spread = tail.iter().cloned().fold(f64::NEG_INFINITY, f64::max) / tail.iter().cloned().fold(f64::INFINITY, f64::min) - 1.0;
    let pass = (sp - 5.0).abs() <= GAUSSIAN_SLOPE_TOL && (so - 5.0).abs() <= GAUSSIAN_SLOPE_TOL && spread < 0.05;
    Ok(outcome(
        pass,
        format!(
            "qmax {q}; slopes polyharmonic {sp:.4}, optimal {so:.4}; norm ratio {:.4} (last five vary {:.2}%)",
            r.ratios.last().unwrap(),
            100.0 * spread
        ),
    ))
}

/// Dimension, functional, order, nodes, weights, scale.
type OracleCase = (usize, Functional, f64, Vec<Vec<f64>>, Vec<f64>, f64);

fn criterion_10() -> Result<Outcome, String> {
    use rand::{Rng, SeedableRng};
    use rayon::prelude::*;
    let prec = 128;
    let cases: Vec<OracleCase> = {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(10);
        (0..20)
            .map(|i| {
                let d = 1 + i % 2;
                let lambda = match i % 4 {
                    0 | 1 => Functional::PointValue,
                    2 => {
                        let mut a = vec![0; d];
                        a[0] = 1;
                        Functional::Partial { alpha: a }
                    }
                    _ => Functional::Laplacian,
                };
                let s = f64::from(lambda.scaling_order());
                let m = s + d as f64 / 2.0 + [1.25, 1.5, 2.0, 2.5][rng.random_range(0..4)];
                let count = rng.random_range(1..=6);
                let pts: Vec<Vec<f64>> = loop {
                    let p: Vec<Vec<f64>> = (0..count)
                        .map(|_| (0..d).map(|_| (rng.random_range(-1.0..1.0f64) * 64.0).round() / 64.0).collect())
                        .collect();
                    let distinct = (0..count).all(|a| (a + 1..count).all(|b| p[a] != p[b]));
                    if distinct {
                        break p;
                    }
                };
                let w: Vec<f64> = (0..count).map(|_| (rng.random_range(-2.0..2.0f64) * 256.0).round() / 256.0).collect();
                let h = [1.0, 0.5, 0.25][rng.random_range(0..3)];
                (d, lambda, m, pts, w, h)
            })
            .collect()
    };
    let results: Vec<Result<f64, String>> = cases
        .par_iter()
        .map(|(d, lambda, m, pts, w, h)| {
            let nodes = NodeSet::from_f64(*d, pts, prec, "oracle").map_err(err)?;
            let weights = w.iter().map(|v| Real::from_f64(*v, prec)).collect();
            let e = ErrorFunctional::new(lambda.clone(), nodes, weights, Real::from_f64(*h, prec)).map_err(err)?;
            let exact = dual_norm_squared(&e, &KernelSpec::matern(*m, *d)).map_err(err)?.value.to_f64();
            let oracle = fourier_oracle_norm_squared(&e, *m, &FourierOptions::default()).map_err(err)?;
            Ok(((oracle - exact) / exact).abs())
        })
        .collect();
    let mut worst = 0.0f64;
    for r in results {
        worst = worst.max(r?);
    }
    Ok(outcome(worst <= ORACLE_REL_TOL, format!("20 instances, max relative difference {worst:.2e}")))
}

fn criterion_11() -> Result<Outcome, String> {
    let failures = common::run_all_properties(PROPERTY_CASES);
    Ok(outcome(
        failures.is_empty(),
        if failures.is_empty() {
            format!("{} properties x {PROPERTY_CASES} cases", common::PROPERTY_NAMES.len())
        } else {
            failures.join("; ")
        },
    ))
}

fn main() -> ExitCode {
    let selected: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let checks: [(usize, &str, Check); 11] = [
        (1, "five-point star weights and qmax", criterion_1),
        (2, "exact Beppo-Levi scaling", criterion_2),
        (3, "Sobolev-optimal rates on 18 nodes", criterion_3),
        (4, "rate ceiling of a scalable order-5 stencil", criterion_4),
        (5, "exact leading expansion coefficients", criterion_5),
        (6, "one-point interpolation toy", criterion_6),
        (7, "polyharmonic / optimal quotient tends to 1", criterion_7),
        (8, "renormalized optimal weights converge", criterion_8),
        (9, "Gaussian native space rates", criterion_9),
        (10, "Fourier oracle equivalence", criterion_10),
        (11, "randomized property suite", criterion_11),
    ];
    let mut failed = 0;
    for (n, name, check) in checks {
        if !selected.is_empty() && !selected.contains(&n) {
            continue;
        }
        let start = Instant::now();
        let result = check().unwrap_or_else(|e| outcome(false, format!("error: {e}")));
        let tag = if result.pass { "PASS" } else { "FAIL" };
        if !result.pass {
            failed += 1;
        }
        println!("{tag} criterion {n:>2} {name}: {} [{:.1} s]", result.detail, start.elapsed().as_secs_f64());
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
