//! Randomized invariants shared by the property tests and the acceptance gate.
#![allow(dead_code)]

use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};
use sobstencil::analysis::{bl_scaling_check, dual_norm_squared};
use sobstencil::functionals::{dual_pairing, ErrorFunctional, Functional};
use sobstencil::kernels::KernelSpec;
use sobstencil::linalg::{null_space, svd, Matrix};
use sobstencil::polyspace::{dimension, qmax, MonomialBasis, NodeSet};
use sobstencil::scalar::{bessel_kv_rv, gamma, kv_rv_derivative_ladder};
use sobstencil::stencils::{build_exact, build_polyharmonic, build_sobolev_optimal, monomial_error, Stencil, StencilFile};
use sobstencil::Real;

const PREC: u32 = 192;

pub const PROPERTY_NAMES: [&str; 13] = [
    "exactness residual",
    "monomial error scaling",
    "polyharmonic optimality certificate",
    "sobolev optimality certificate",
    "svd reconstruction",
    "derivative ladder",
    "pascal recurrence",
    "beppo-levi scaling",
    "pairing symmetry",
    "gamma recurrence",
    "functional homogeneity",
    "optimal beats scalable",
    "stencil json round trip",
];

fn runner(cases: u32) -> TestRunner {
    let config = Config { cases, failure_persistence: None, ..Config::default() };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn run<S: Strategy>(cases: u32, strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Result<(), String>
where
    S::Value: std::fmt::Debug,
{
    runner(cases).run(&strategy, test).map_err(|e| e.to_string())
}

fn fail<E: std::fmt::Display>(e: E) -> TestCaseError {
    TestCaseError::fail(e.to_string())
}

fn functional_for(d: usize, pick: u8) -> Functional {
    match pick % 4 {
        0 => Functional::PointValue,
        1 => {
            let mut a = vec![0; d];
            a[d - 1] = 1;
            Functional::Partial { alpha: a }
        }
        2 if d >= 2 => {
            let mut a = vec![0; d];
            a[0] = 1;
            a[1] = 1;
            Functional::Partial { alpha: a }
        }
        _ => Functional::Laplacian,
    }
}

/// Random node set, functional and an order the nodes support.
fn exact_case() -> impl Strategy<Value = (u64, usize, u8, usize)> {
    (any::<u64>(), 1usize..=3, any::<u8>(), 3usize..=14)
}

pub fn exactness_residual(cases: u32) -> Result<(), String> {
    run(cases, exact_case(), |(seed, d, pick, count)| {
        let nodes = NodeSet::random(count, d, seed, PREC).map_err(fail)?;
        let lambda = functional_for(d, pick);
        let q = match qmax(&lambda, &nodes, None, 8) {
            Ok(q) => q,
            Err(sobstencil::Error::CapReached { .. }) => 8,
            Err(e) => return Err(fail(e)),
        };
        prop_assume!(q >= 1);
        let s = build_exact(&lambda, &nodes, q).map_err(fail)?;
        let r = s.exactness_residual(q).map_err(fail)?;
        prop_assert!(r < 1e-40, "residual {r:e} at q = {q}");
        Ok(())
    })
}

pub fn monomial_error_scaling(cases: u32) -> Result<(), String> {
    run(cases, (any::<u64>(), 1usize..=3, any::<u8>(), 1u32..=60, prop::collection::vec(0u32..4, 3)), |(seed, d, pick, hk, alpha)| {
        let nodes = NodeSet::random(8, d, seed, PREC).map_err(fail)?;
        let lambda = functional_for(d, pick);
        let q = qmax(&lambda, &nodes, None, 8).unwrap_or(1).max(1);
        let s = build_exact(&lambda, &nodes, q).map_err(fail)?;
        let alpha = &alpha[..d];
        // h = k / 64 is exact in binary.
        let h = Real::from_f64(f64::from(hk) / 64.0, PREC);
        let one = Real::one(PREC);
        let lhs = monomial_error(&s, alpha, &h);
        let k = i64::from(alpha.iter().sum::<u32>()) - i64::from(lambda.scaling_order());
        let rhs = monomial_error(&s, alpha, &one) * h.powi(k);
        let scale = rhs.abs().to_f64().max(1.0);
        prop_assert!((lhs - rhs).abs().to_f64() / scale < 1e-45);
        Ok(())
    })
}

fn polyharmonic_case() -> impl Strategy<Value = (u64, usize, u8, f64)> {
    (any::<u64>(), 1usize..=2, any::<u8>(), prop::sample::select(vec![0.75, 1.25, 1.5, 2.0, 2.25]))
}

/// `m` with `m - d/2 - s` equal to `margin`.
fn order_for(lambda: &Functional, d: usize, margin: f64) -> f64 {
    f64::from(lambda.scaling_order()) + d as f64 / 2.0 + margin
}

fn perturbations(null: &Matrix, seed: u64, count: usize) -> Vec<Vec<Real>> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let coeffs: Vec<f64> = (0..null.cols()).map(|_| rng.random_range(-1.0..1.0) * 10f64.powi(rng.random_range(-6..1))).collect();
            (0..null.rows())
                .map(|i| Real::sum_of(coeffs.iter().enumerate().map(|(k, c)| &null[(i, k)] * *c).collect::<Vec<_>>().iter(), PREC))
                .collect()
        })
        .collect()
}

fn perturbed_norm(s: &Stencil, delta: &[Real], space: &KernelSpec, h: &Real) -> Result<Real, TestCaseError> {
    let w: Vec<Real> = s.weights.iter().zip(delta).map(|(a, b)| a + b).collect();
    let e = ErrorFunctional::new(s.lambda.clone(), s.nodes.clone(), w, h.clone()).map_err(fail)?;
    Ok(dual_norm_squared(&e, space).map_err(fail)?.value)
}

pub fn polyharmonic_optimality(cases: u32) -> Result<(), String> {
    run(cases, polyharmonic_case(), |(seed, d, pick, margin)| {
        let lambda = functional_for(d, pick);
        let m = order_for(&lambda, d, margin);
        let q = (m - d as f64 / 2.0).floor() as usize + 1;
        let nodes = NodeSet::random(dimension(q, d) + 3, d, seed, PREC).map_err(fail)?;
        let s = build_polyharmonic(&lambda, &nodes, m).map_err(fail)?;
        let space = KernelSpec::polyharmonic(m, d);
        let one = Real::one(PREC);
        let base = perturbed_norm(&s, &vec![Real::zero(PREC); nodes.len()], &space, &one)?;
        let p = sobstencil::polyspace::value_matrix(&MonomialBasis::new(q, d), &nodes).map_err(fail)?;
        let null = null_space(&p, None).map_err(fail)?;
        prop_assume!(null.cols() > 0);
        for delta in perturbations(&null, seed, 20) {
            let v = perturbed_norm(&s, &delta, &space, &one)?;
            prop_assert!(v >= &base - &base.abs() * 1e-40, "perturbation lowered the norm");
        }
        Ok(())
    })
}

pub fn sobolev_optimality(cases: u32) -> Result<(), String> {
    run(cases, (any::<u64>(), 1usize..=2, any::<u8>(), 4usize..=9, 1u32..=32), |(seed, d, pick, count, hk)| {
        let lambda = functional_for(d, pick);
        let m = order_for(&lambda, d, 1.25);
        let nodes = NodeSet::random(count, d, seed, PREC).map_err(fail)?;
        let space = KernelSpec::matern(m, d);
        let h = Real::from_f64(f64::from(hk) / 32.0, PREC);
        let s = build_sobolev_optimal(&lambda, &nodes, &space, &h).map_err(fail)?;
        let base = perturbed_norm(&s, &vec![Real::zero(PREC); count], &space, &h)?;
        let free = Matrix::identity(count, PREC);
        for delta in perturbations(&free, seed, 20) {
            let v = perturbed_norm(&s, &delta, &space, &h)?;
            prop_assert!(v >= &base - &base.abs() * 1e-30, "perturbation lowered the norm");
        }
        Ok(())
    })
}

pub fn svd_reconstruction(cases: u32) -> Result<(), String> {
    let entries = prop::collection::vec(-8i32..8, 1..=36);
    run(cases, (1usize..=6, entries), |(rows, vals)| {
        let cols = vals.len().div_ceil(rows);
        let a = Matrix::from_fn(rows, cols, |i, j| {
            let v = vals.get(i * cols + j).copied().unwrap_or(0);
            Real::from_f64(f64::from(v) / 4.0, PREC)
        });
        let s = svd(&a).map_err(fail)?;
        let k = s.sigma.len();
        for w in s.sigma.windows(2) {
            prop_assert!(w[0] >= w[1]);
        }
        for i in 0..rows {
            for j in 0..cols {
                let terms: Vec<Real> = (0..k).map(|t| &s.u[(i, t)] * &s.sigma[t] * &s.v[(j, t)]).collect();
                let rec = Real::sum_of(terms.iter(), PREC);
                prop_assert!((rec - &a[(i, j)]).abs().to_f64() < 1e-45);
            }
        }
        let vtv = s.v.transpose().matmul(&s.v).map_err(fail)?;
        for i in 0..vtv.rows() {
            for j in 0..vtv.cols() {
                let want = if i == j { 1.0 } else { 0.0 };
                prop_assert!((&vtv[(i, j)] - want).abs().to_f64() < 1e-45);
            }
        }
        Ok(())
    })
}

pub fn derivative_ladder(cases: u32) -> Result<(), String> {
    run(cases, (11u32..=60, 1u32..=400), |(nu10, r20)| {
        let prec = 256;
        let nu = Real::from_f64(f64::from(nu10) / 10.0 + 0.03, prec);
        let r = Real::from_f64(f64::from(r20) / 20.0, prec);
        let lad = kv_rv_derivative_ladder(&nu, &r, 2, prec).map_err(fail)?;
        // Three-term recurrence f_{ν+1} = 2ν f_ν + r² f_{ν-1}.
        let up = bessel_kv_rv(&(&nu + 1i64), &r, prec).map_err(fail)?;
        let down = bessel_kv_rv(&(&nu - 1i64), &r, prec).map_err(fail)?;
        let rec = &nu * 2 * &lad[0] + &r * &r * &down;
        prop_assert!(((&up - &rec) / &up).abs().to_f64() < 1e-60);
        // First derivative against a central difference.
        let step = Real::from_f64(2f64.powi(-40), prec);
        let fp = bessel_kv_rv(&nu, &(&r + &step), prec).map_err(fail)?;
        let fm = bessel_kv_rv(&nu, &(&r - &step), prec).map_err(fail)?;
        let fd = (fp - fm) / (&step * 2);
        let scale = lad[1].abs().to_f64().max(lad[0].abs().to_f64() * 1e-3);
        prop_assert!((fd - &lad[1]).abs().to_f64() / scale < 1e-18);
        Ok(())
    })
}

pub fn pascal_recurrence(cases: u32) -> Result<(), String> {
    run(cases, (1usize..=12, 2usize..=5), |(q, d)| {
        prop_assert_eq!(dimension(q, d), dimension(q - 1, d) + dimension(q, d - 1));
        prop_assert_eq!(MonomialBasis::new(q, d).len(), dimension(q, d));
        Ok(())
    })
}

pub fn beppo_levi_scaling(cases: u32) -> Result<(), String> {
    run(cases, (polyharmonic_case(), 1u32..=1000), |((seed, d, pick, margin), hk)| {
        let lambda = functional_for(d, pick);
        let m = order_for(&lambda, d, margin);
        let q = (m - d as f64 / 2.0).floor() as usize + 1;
        let nodes = NodeSet::random(dimension(q, d) + 2, d, seed, PREC).map_err(fail)?;
        let s = build_polyharmonic(&lambda, &nodes, m).map_err(fail)?;
        let h = Real::from_f64(f64::from(hk) / 1000.0, PREC);
        let ratio = match bl_scaling_check(&s, m, &h) {
            Ok(r) => r,
            Err(sobstencil::Error::Invalid(_)) => return Ok(()),
            Err(e) => return Err(fail(e)),
        };
        prop_assert!((ratio - 1.0f64).abs().to_f64() < 2f64.powf(-f64::from(PREC) / 2.0));
        Ok(())
    })
}

pub fn pairing_symmetry(cases: u32) -> Result<(), String> {
    let w = prop::collection::vec(-64i32..64, 5);
    run(cases, (any::<u64>(), 1usize..=3, any::<u8>(), any::<u8>(), w.clone(), w), |(seed, d, p1, p2, w1, w2)| {
        let l1 = functional_for(d, p1);
        let l2 = functional_for(d, p2);
        let m = order_for(&l1, d, 1.5).max(order_for(&l2, d, 1.5));
        let nodes = NodeSet::random(5, d, seed, PREC).map_err(fail)?;
        let mk = |l: &Functional, w: &[i32]| {
            let ws = w.iter().map(|v| Real::from_f64(f64::from(*v) / 16.0, PREC)).collect();
            ErrorFunctional::new(l.clone(), nodes.clone(), ws, Real::from_f64(0.5, PREC))
        };
        let e1 = mk(&l1, &w1).map_err(fail)?;
        let e2 = mk(&l2, &w2).map_err(fail)?;
        let k = sobstencil::kernels::Kernel::new(&KernelSpec::matern(m, d), PREC).map_err(fail)?;
        let a = dual_pairing(&e1, &e2, &k).map_err(fail)?;
        let b = dual_pairing(&e2, &e1, &k).map_err(fail)?;
        prop_assert!((&a - &b).abs().to_f64() <= a.abs().to_f64() * 1e-45 + 1e-50);
        prop_assert!(!dual_pairing(&e1, &e1, &k).map_err(fail)?.is_negative());
        Ok(())
    })
}

pub fn gamma_recurrence(cases: u32) -> Result<(), String> {
    run(cases, -400i32..400, |k| {
        let x = Real::from_f64(f64::from(k) / 37.0 + 0.013, PREC);
        let g = gamma(&x).map_err(fail)?;
        let g1 = gamma(&(&x + 1i64)).map_err(fail)?;
        prop_assert!(((&g1 - &x * &g) / &g1).abs().to_f64() < 1e-50);
        Ok(())
    })
}

pub fn functional_homogeneity(cases: u32) -> Result<(), String> {
    run(cases, (1usize..=3, any::<u8>(), prop::collection::vec(0u32..5, 3)), |(d, pick, alpha)| {
        let lambda = functional_for(d, pick);
        let alpha = &alpha[..d];
        if lambda.apply_to_monomial(alpha) != 0 {
            prop_assert_eq!(alpha.iter().sum::<u32>(), lambda.scaling_order());
        }
        Ok(())
    })
}

pub fn optimal_beats_scalable(cases: u32) -> Result<(), String> {
    run(cases, (any::<u64>(), 1usize..=2, any::<u8>(), 1u32..=16), |(seed, d, pick, hk)| {
        let lambda = functional_for(d, pick);
        let m = order_for(&lambda, d, 1.25);
        let q = (m - d as f64 / 2.0).floor() as usize + 1;
        let nodes = NodeSet::random(dimension(q, d) + 2, d, seed, PREC).map_err(fail)?;
        let space = KernelSpec::matern(m, d);
        let h = Real::from_f64(f64::from(hk) / 16.0, PREC);
        let opt = build_sobolev_optimal(&lambda, &nodes, &space, &h).map_err(fail)?;
        let o = dual_norm_squared(&opt.native_error_functional().map_err(fail)?, &space).map_err(fail)?.value;
        for other in [build_polyharmonic(&lambda, &nodes, m), build_exact(&lambda, &nodes, q)] {
            let s = other.map_err(fail)?;
            let v = dual_norm_squared(&s.error_functional(&h).map_err(fail)?, &space).map_err(fail)?.value;
            prop_assert!(o <= &v + &v.abs() * 1e-30);
        }
        Ok(())
    })
}

pub fn stencil_round_trip(cases: u32) -> Result<(), String> {
    run(cases, exact_case(), |(seed, d, pick, count)| {
        let nodes = NodeSet::random(count, d, seed, PREC).map_err(fail)?;
        let lambda = functional_for(d, pick);
        let q = qmax(&lambda, &nodes, None, 8).unwrap_or(1).max(1);
        let s = build_exact(&lambda, &nodes, q).map_err(fail)?;
        let text = serde_json::to_string(&s.to_json()).map_err(fail)?;
        let file: StencilFile = serde_json::from_str(&text).map_err(fail)?;
        let back = Stencil::from_json(&file).map_err(fail)?;
        prop_assert_eq!(&back.weights, &s.weights);
        prop_assert_eq!(back.nodes.points(), s.nodes.points());
        Ok(())
    })
}

/// Runs every property; returns the failures as `name: message`.
pub fn run_all_properties(cases: u32) -> Vec<String> {
    use rayon::prelude::*;
    let props: [fn(u32) -> Result<(), String>; 13] = [
        exactness_residual,
        monomial_error_scaling,
        polyharmonic_optimality,
        sobolev_optimality,
        svd_reconstruction,
        derivative_ladder,
        pascal_recurrence,
        beppo_levi_scaling,
        pairing_symmetry,
        gamma_recurrence,
        functional_homogeneity,
        optimal_beats_scalable,
        stencil_round_trip,
    ];
    props
        .par_iter()
        .zip(PROPERTY_NAMES.par_iter())
        .filter_map(|(p, name)| p(cases).err().map(|e| format!("{name}: {e}")))
        .collect()
}
