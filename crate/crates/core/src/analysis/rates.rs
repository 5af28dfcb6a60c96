//! Convergence-rate studies on geometric `h` grids.

use rayon::prelude::*;
use serde::{Deserialize, Serialize, Serializer};

use super::{dual_norm_squared_with, NormSquared, TRUSTED_BITS};
use crate::error::{Error, Result};
use crate::functionals::Functional;
use crate::kernels::{Family, Kernel, KernelSpec};
use crate::linalg::{default_tolerance, null_space};
use crate::polyspace::{qmax, value_matrix, MonomialBasis, NodeSet};
use crate::scalar::{Real, DEFAULT_STUDY_PRECISION};
use crate::stencils::{build_exact, build_lagrange, build_polyharmonic, build_sobolev_optimal, Stencil};

/// Highest order probed when looking for a stencil's or node set's exactness.
const EXACTNESS_SEARCH_CAP: usize = 16;

/// Slope tolerance for rate verdicts.
pub const SLOPE_TOLERANCE: f64 = 0.05;

fn serialize_reals<S: Serializer>(values: &[Real], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(values.iter().map(|v| v.to_string_digits(30)))
}

/// `h_i = h0 · ratio^i` for `i < count`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HGrid {
    pub h0: f64,
    pub ratio: f64,
    pub count: usize,
}

impl Default for HGrid {
    fn default() -> Self {
        HGrid { h0: 0.125, ratio: 0.5, count: 20 }
    }
}

impl HGrid {
    pub fn validate(&self) -> Result<()> {
        if !(self.h0 > 0.0 && self.h0.is_finite()) {
            return Err(Error::Invalid(format!("h0 = {} must be positive", self.h0)));
        }
        if !(self.ratio > 0.0 && self.ratio < 1.0) {
            return Err(Error::Invalid(format!("grid ratio {} must lie in (0, 1)", self.ratio)));
        }
        if self.count < 3 {
            return Err(Error::Invalid(format!("grid needs at least 3 points, got {}", self.count)));
        }
        Ok(())
    }

    pub fn values(&self, prec: u32) -> Vec<Real> {
        let h0 = Real::from_f64_decimal(self.h0, prec);
        let ratio = Real::from_f64_decimal(self.ratio, prec);
        (0..self.count).map(|i| &h0 * ratio.powi(i as i64)).collect()
    }
}

/// Which stencil a study evaluates.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum StencilRecipe {
    MinNorm { q: usize },
    Lagrange { q: usize },
    Polyharmonic { m: f64 },
    /// Optimal weights in the study's space, rebuilt for every `h`.
    SobolevOptimal,
    /// A stencil built elsewhere, e.g. read back from a stencil file.
    #[serde(skip)]
    Fixed(Box<Stencil>),
}

impl StencilRecipe {
    pub fn is_scalable(&self) -> bool {
        match self {
            StencilRecipe::SobolevOptimal => false,
            StencilRecipe::Fixed(s) => s.scalable,
            _ => true,
        }
    }

    pub fn label(&self) -> String {
        match self {
            StencilRecipe::MinNorm { q } => format!("min_norm(q={q})"),
            StencilRecipe::Lagrange { q } => format!("lagrange(q={q})"),
            StencilRecipe::Polyharmonic { m } => format!("polyharmonic(m={m})"),
            StencilRecipe::SobolevOptimal => "sobolev_optimal".into(),
            StencilRecipe::Fixed(s) => format!("{}(fixed)", s.method.name()),
        }
    }

    /// Builds the stencil; `h` only matters for non-scalable recipes.
    pub fn build(&self, lambda: &Functional, nodes: &NodeSet, space: &KernelSpec, h: &Real) -> Result<Stencil> {
        match self {
            StencilRecipe::MinNorm { q } => build_exact(lambda, nodes, *q),
            StencilRecipe::Lagrange { q } => build_lagrange(lambda, nodes, *q),
            StencilRecipe::Polyharmonic { m } => build_polyharmonic(lambda, nodes, *m),
            StencilRecipe::SobolevOptimal => build_sobolev_optimal(lambda, nodes, space, h),
            StencilRecipe::Fixed(s) => {
                let prec = nodes.prec();
                Ok(Stencil {
                    nodes: s.nodes.with_prec(prec),
                    weights: s.weights.iter().map(|w| w.with_prec(prec)).collect(),
                    scale: s.scale.with_prec(prec),
                    ..(**s).clone()
                })
            }
        }
    }
}

/// Everything needed to run one rate study.
#[derive(Clone, Debug)]
pub struct RateStudy {
    pub lambda: Functional,
    pub nodes: NodeSet,
    pub recipe: StencilRecipe,
    pub space: KernelSpec,
    pub grid: HGrid,
    pub precision: u32,
    /// Upper bound for automatic precision doubling.
    pub max_precision: u32,
}

impl RateStudy {
    pub fn new(lambda: Functional, nodes: NodeSet, recipe: StencilRecipe, space: KernelSpec) -> Self {
        RateStudy {
            lambda,
            nodes,
            recipe,
            space,
            grid: HGrid::default(),
            precision: DEFAULT_STUDY_PRECISION,
            max_precision: 4 * DEFAULT_STUDY_PRECISION,
        }
    }
}

/// Summary of the terminal behaviour of a slope sequence.
#[derive(Clone, Debug, Serialize)]
pub struct RateVerdict {
    /// Median of the last three slopes.
    pub terminal_slope: f64,
    pub predicted_rate: f64,
    pub matches_prediction: bool,
    /// First slope index from which every slope stays within 0.1 of the
    /// terminal slope; earlier slopes are pre-asymptotic.
    pub asymptotic_from: Option<usize>,
}

/// Fit of `log v = c + k log h + p log|log h|`.
#[derive(Clone, Debug, Serialize)]
pub struct LogPowerFit {
    pub k: f64,
    pub p: f64,
    pub c: f64,
    pub k_stderr: f64,
    /// Zero when `p` was fixed.
    pub p_stderr: f64,
    pub points: usize,
}

impl LogPowerFit {
    /// 95% confidence interval for `p`.
    pub fn p_interval(&self) -> (f64, f64) {
        (self.p - 1.96 * self.p_stderr, self.p + 1.96 * self.p_stderr)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RateReport {
    pub functional: Functional,
    pub space: KernelSpec,
    pub method: String,
    pub node_count: usize,
    pub node_label: String,
    pub precision_bits: u32,
    pub h_values: Vec<f64>,
    #[serde(serialize_with = "serialize_reals")]
    pub norms: Vec<Real>,
    pub slopes: Vec<f64>,
    pub predicted_rate: f64,
    /// Significant bits left in each norm after cancellation.
    pub trusted_bits: Vec<f64>,
    pub verdict: RateVerdict,
    pub log_fit: Option<LogPowerFit>,
    pub warnings: Vec<String>,
}

impl RateReport {
    /// CSV with columns `h,norm,slope`; the slope on row `i` joins `h_i` and
    /// `h_{i+1}`.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Invalid(format!("csv: {e}"));
        w.write_record(["h", "norm", "slope"]).map_err(io)?;
        for (i, (h, n)) in self.h_values.iter().zip(&self.norms).enumerate() {
            let slope = self.slopes.get(i).map(|s| format!("{s:.12}")).unwrap_or_default();
            w.write_record([format!("{h:e}"), n.to_string_digits(20), slope]).map_err(io)?;
        }
        String::from_utf8(w.into_inner().map_err(|e| Error::Invalid(format!("csv: {e}")))?)
            .map_err(|e| Error::Invalid(format!("csv: {e}")))
    }
}

/// Consecutive log-log slopes `(log v_{i+1} - log v_i) / (log h_{i+1} - log h_i)`.
pub fn slopes(h: &[Real], values: &[Real]) -> Vec<f64> {
    h.windows(2)
        .zip(values.windows(2))
        .map(|(hw, vw)| {
            if !vw[0].is_positive() || !vw[1].is_positive() {
                return f64::NAN;
            }
            ((vw[1].ln() - vw[0].ln()) / (hw[1].ln() - hw[0].ln())).to_f64()
        })
        .collect()
}

/// Median of the last `n` finite entries.
pub fn median_of_last(values: &[f64], n: usize) -> f64 {
    let mut tail: Vec<f64> = values.iter().rev().take(n).copied().filter(|v| v.is_finite()).collect();
    if tail.is_empty() {
        return f64::NAN;
    }
    tail.sort_by(f64::total_cmp);
    let k = tail.len();
    if k % 2 == 1 {
        tail[k / 2]
    } else {
        0.5 * (tail[k / 2 - 1] + tail[k / 2])
    }
}

fn verdict(slopes: &[f64], predicted: f64) -> RateVerdict {
    let terminal = median_of_last(slopes, 3);
    let asymptotic_from = (0..slopes.len()).find(|&i| slopes[i..].iter().all(|s| (s - terminal).abs() <= 0.1));
    RateVerdict {
        terminal_slope: terminal,
        predicted_rate: predicted,
        matches_prediction: (terminal - predicted).abs() <= SLOPE_TOLERANCE,
        asymptotic_from,
    }
}

/// Least-squares fit of `log v = c + k log h + p log|log h|` over all
/// points with `0 < h < 1`; with `fixed_p` only `c` and `k` are fitted.
pub fn fit_log_power(h: &[f64], v: &[f64], fixed_p: Option<f64>) -> Option<LogPowerFit> {
    let pts: Vec<(f64, f64, f64)> = h
        .iter()
        .zip(v)
        .filter(|(h, v)| **h > 0.0 && **h < 1.0 && **v > 0.0 && v.is_finite())
        .map(|(h, v)| (h.ln(), h.ln().abs().ln(), v.ln()))
        .collect();
    let n = pts.len();
    let params = if fixed_p.is_some() { 2 } else { 3 };
    if n <= params {
        return None;
    }
    let p_fix = fixed_p.unwrap_or(0.0);
    // Normal equations on columns (1, log h, log|log h|).
    let cols = |x: &(f64, f64, f64)| -> Vec<f64> {
        if fixed_p.is_some() {
            vec![1.0, x.0]
        } else {
            vec![1.0, x.0, x.1]
        }
    };
    let target = |x: &(f64, f64, f64)| x.2 - p_fix * x.1;
    let mut ata = vec![vec![0.0; params]; params];
    let mut atb = vec![0.0; params];
    for x in &pts {
        let c = cols(x);
        for i in 0..params {
            atb[i] += c[i] * target(x);
            for j in 0..params {
                ata[i][j] += c[i] * c[j];
            }
        }
    }
    let inv = invert_small(&ata)?;
    let beta: Vec<f64> = (0..params).map(|i| (0..params).map(|j| inv[i][j] * atb[j]).sum()).collect();
    let rss: f64 = pts
        .iter()
        .map(|x| {
            let c = cols(x);
            let fit: f64 = c.iter().zip(&beta).map(|(a, b)| a * b).sum();
            (target(x) - fit).powi(2)
        })
        .sum();
    let sigma2 = rss / (n - params) as f64;
    Some(LogPowerFit {
        c: beta[0],
        k: beta[1],
        p: if fixed_p.is_some() { p_fix } else { beta[2] },
        k_stderr: (sigma2 * inv[1][1]).sqrt(),
        p_stderr: if fixed_p.is_some() { 0.0 } else { (sigma2 * inv[2][2]).sqrt() },
        points: n,
    })
}

/// Gauss-Jordan inverse of a tiny symmetric system.
fn invert_small(a: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| f64::from(u8::from(i == j))));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).max_by(|&x, &y| m[x][col].abs().total_cmp(&m[y][col].abs()))?;
        if m[piv][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, piv);
        let p = m[col][col];
        for v in m[col].iter_mut() {
            *v /= p;
        }
        for r in 0..n {
            if r != col {
                let f = m[r][col];
                let pivot_row = m[col].clone();
                for (v, pv) in m[r].iter_mut().zip(pivot_row) {
                    *v -= f * pv;
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Largest `q' >= q` with the stencil still exact on `P_{q'}^d`.
fn effective_order(stencil: &Stencil) -> Result<usize> {
    let tol = default_tolerance(stencil.prec());
    let mut q = stencil.exactness_order;
    while q < EXACTNESS_SEARCH_CAP && stencil.exactness_residual(q + 1)? <= tol {
        q += 1;
    }
    Ok(q)
}

/// Rate limit imposed by smoothness: `m - d/2 - s`, infinite for the Gaussian.
fn smoothness_rate(space: &KernelSpec, s: u32) -> f64 {
    match space.family {
        Family::Gaussian => f64::INFINITY,
        _ => space.m - space.d as f64 / 2.0 - f64::from(s),
    }
}

struct Evaluation {
    norms: Vec<NormSquared>,
    stencils: Vec<Stencil>,
    warnings: Vec<String>,
}

fn evaluate_grid(study: &RateStudy, prec: u32) -> Result<Evaluation> {
    let nodes = study.nodes.with_prec(prec);
    let kernel = Kernel::new(&study.space, prec)?;
    let hs = study.grid.values(prec);
    let one = Real::one(prec);
    let fixed = if study.recipe.is_scalable() {
        Some(study.recipe.build(&study.lambda, &nodes, &study.space, &one)?)
    } else {
        None
    };
    let results: Vec<(NormSquared, Stencil)> = hs
        .par_iter()
        .map(|h| {
            let stencil = match &fixed {
                Some(s) => s.clone(),
                None => study.recipe.build(&study.lambda, &nodes, &study.space, h)?,
            };
            let e = stencil.error_functional(h)?;
            Ok((dual_norm_squared_with(&e, &kernel)?, stencil))
        })
        .collect::<Result<_>>()?;
    let mut warnings = Vec::new();
    for (i, (_, s)) in results.iter().enumerate() {
        for w in &s.warnings {
            warnings.push(format!("h[{i}]: {w}"));
        }
        if fixed.is_some() {
            break;
        }
    }
    let (norms, stencils) = results.into_iter().unzip();
    Ok(Evaluation { norms, stencils, warnings })
}

/// Runs [`evaluate_grid`], doubling precision until every norm keeps at least
/// half its bits (and never fewer than 10 digits).
fn evaluate_with_autoscale(study: &RateStudy) -> Result<(Evaluation, u32)> {
    let mut prec = study.precision;
    loop {
        let eval = evaluate_grid(study, prec)?;
        let worst = eval.norms.iter().filter(|n| !n.clamped).map(|n| n.lost_bits).fold(0.0, f64::max);
        let clamped = eval.norms.iter().any(|n| n.clamped);
        let half_lost = worst > f64::from(prec) / 2.0 || clamped || !eval.warnings.is_empty();
        let untrusted = f64::from(prec) - worst < TRUSTED_BITS || clamped;
        if !half_lost {
            return Ok((eval, prec));
        }
        if prec * 2 <= study.max_precision {
            log::info!("restarting study at {} bits ({worst:.0} bits lost at {prec})", prec * 2);
            prec *= 2;
            continue;
        }
        if untrusted {
            return Err(Error::PrecisionExhausted {
                bits: prec,
                detail: format!("{worst:.0} bits lost in the dual norm; raise the precision cap"),
            });
        }
        let mut eval = eval;
        eval.warnings.push(format!(
            "more than half of {prec} bits lost to cancellation ({worst:.0}); results keep >= 10 digits"
        ));
        return Ok((eval, prec));
    }
}

/// Dual norms of the error functional along the grid and their log-log slopes.
pub fn estimate_rates(study: &RateStudy) -> Result<RateReport> {
    study.grid.validate()?;
    study.lambda.check_dim(study.nodes.dim())?;
    let (eval, prec) = evaluate_with_autoscale(study)?;
    let hs = study.grid.values(prec);
    let norms: Vec<Real> = eval.norms.iter().map(NormSquared::norm).collect();
    let sl = slopes(&hs, &norms);
    let s = study.lambda.scaling_order();
    let q = if study.recipe.is_scalable() {
        effective_order(&eval.stencils[0])?
    } else {
        match qmax(&study.lambda, &study.nodes.with_prec(prec), None, EXACTNESS_SEARCH_CAP) {
            Ok(q) => q,
            Err(Error::CapReached { .. }) => usize::MAX,
            Err(e) => return Err(e),
        }
    };
    let q_rate = if q == usize::MAX { f64::INFINITY } else { q as f64 - f64::from(s) };
    let predicted = match study.space.family {
        // Beppo-Levi errors scale exactly with m - s - d/2.
        Family::Polyharmonic => smoothness_rate(&study.space, s),
        _ => smoothness_rate(&study.space, s).min(q_rate),
    };
    let h_f64: Vec<f64> = hs.iter().map(Real::to_f64).collect();
    let norm_f64: Vec<f64> = norms.iter().map(Real::to_f64).collect();
    let tail = h_f64.len().min(8);
    let log_fit = fit_log_power(&h_f64[h_f64.len() - tail..], &norm_f64[norm_f64.len() - tail..], None);
    Ok(RateReport {
        functional: study.lambda.clone(),
        space: study.space.clone(),
        method: study.recipe.label(),
        node_count: study.nodes.len(),
        node_label: study.nodes.label.clone(),
        precision_bits: prec,
        h_values: h_f64,
        trusted_bits: eval.norms.iter().map(NormSquared::trusted_bits).collect(),
        norms,
        verdict: verdict(&sl, predicted),
        slopes: sl,
        predicted_rate: predicted,
        log_fit,
        warnings: eval.warnings,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct QuotientReport {
    pub first: String,
    pub second: String,
    pub space: KernelSpec,
    pub h_values: Vec<f64>,
    #[serde(serialize_with = "serialize_reals")]
    pub first_norms: Vec<Real>,
    #[serde(serialize_with = "serialize_reals")]
    pub second_norms: Vec<Real>,
    /// `first_norm / second_norm` per `h`.
    pub ratios: Vec<f64>,
    /// Ratios are non-increasing over the last third of the grid.
    pub decreasing_tail: bool,
    pub warnings: Vec<String>,
}

impl QuotientReport {
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Invalid(format!("csv: {e}"));
        w.write_record(["h".to_string(), format!("{}/{}", self.first, self.second)]).map_err(io)?;
        for (h, r) in self.h_values.iter().zip(&self.ratios) {
            w.write_record([format!("{h:e}"), format!("{r:.15}")]).map_err(io)?;
        }
        String::from_utf8(w.into_inner().map_err(|e| Error::Invalid(format!("csv: {e}")))?)
            .map_err(|e| Error::Invalid(format!("csv: {e}")))
    }
}

/// Ratio of the error norms of two recipes in the same space, per `h`.
#[allow(clippy::too_many_arguments)]
pub fn compare_methods(
    lambda: &Functional,
    nodes: &NodeSet,
    first: &StencilRecipe,
    second: &StencilRecipe,
    space: &KernelSpec,
    grid: &HGrid,
    precision: u32,
    max_precision: u32,
) -> Result<QuotientReport> {
    let mk = |recipe: &StencilRecipe| RateStudy {
        lambda: lambda.clone(),
        nodes: nodes.clone(),
        recipe: recipe.clone(),
        space: space.clone(),
        grid: grid.clone(),
        precision,
        max_precision,
    };
    grid.validate()?;
    let (a, b) = rayon::join(|| estimate_rates(&mk(first)), || estimate_rates(&mk(second)));
    let (a, b) = (a?, b?);
    let ratios: Vec<f64> = a.norms.iter().zip(&b.norms).map(|(x, y)| (x / y).to_f64()).collect();
    let tail_start = ratios.len() - (ratios.len() / 3).max(2);
    let decreasing_tail = ratios[tail_start..].windows(2).all(|w| w[1] <= w[0]);
    let mut warnings = a.warnings.clone();
    warnings.extend(b.warnings.iter().cloned());
    Ok(QuotientReport {
        first: first.label(),
        second: second.label(),
        space: space.clone(),
        h_values: a.h_values,
        first_norms: a.norms,
        second_norms: b.norms,
        ratios,
        decreasing_tail,
        warnings,
    })
}

/// Polyharmonic(`m`) stencil versus Sobolev-optimal weights, both measured in
/// `W_2^m(R^d)*`.
pub fn quotient_study(lambda: &Functional, nodes: &NodeSet, m: f64, grid: &HGrid, precision: u32) -> Result<QuotientReport> {
    compare_methods(
        lambda,
        nodes,
        &StencilRecipe::Polyharmonic { m },
        &StencilRecipe::SobolevOptimal,
        &KernelSpec::matern(m, nodes.dim()),
        grid,
        precision,
        4 * precision,
    )
}

#[derive(Clone, Debug, Serialize)]
pub struct StencilConvergenceReport {
    pub m: f64,
    pub q: usize,
    pub h_values: Vec<f64>,
    /// `‖a*(h) h^s - â‖_∞` per `h`.
    pub deviations: Vec<f64>,
    pub slopes: Vec<f64>,
    pub observed_rate: f64,
    pub proven_rate: f64,
    /// Observed rate within 0.1 of twice the proven rate.
    pub doubled_rate_observed: bool,
    pub precision_bits: u32,
    pub warnings: Vec<String>,
}

impl StencilConvergenceReport {
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Invalid(format!("csv: {e}"));
        w.write_record(["h", "deviation"]).map_err(io)?;
        for (h, v) in self.h_values.iter().zip(&self.deviations) {
            w.write_record([format!("{h:e}"), format!("{v:e}")]).map_err(io)?;
        }
        String::from_utf8(w.into_inner().map_err(|e| Error::Invalid(format!("csv: {e}")))?)
            .map_err(|e| Error::Invalid(format!("csv: {e}")))
    }
}

/// Convergence of renormalized Sobolev-optimal weights to the unique scalable
/// stencil exact of order `q` on `nodes`.
pub fn stencil_convergence_study(
    lambda: &Functional,
    nodes: &NodeSet,
    m: f64,
    q: usize,
    grid: &HGrid,
    precision: u32,
) -> Result<StencilConvergenceReport> {
    grid.validate()?;
    let nodes = nodes.with_prec(precision);
    let d = nodes.dim();
    let basis = MonomialBasis::new(q, d);
    let ns = null_space(&value_matrix(&basis, &nodes)?, None)?;
    if ns.cols() > 0 {
        return Err(Error::NonUniqueStencil { q, nullity: ns.cols() });
    }
    let hat = build_exact(lambda, &nodes, q)?;
    let space = KernelSpec::matern(m, d);
    let hs = grid.values(precision);
    let results: Vec<(Real, Vec<String>)> = hs
        .par_iter()
        .map(|h| {
            let s = build_sobolev_optimal(lambda, &nodes, &space, h)?;
            let dev = s
                .weights
                .iter()
                .zip(&hat.weights)
                .map(|(a, b)| (a - b).abs())
                .fold(Real::zero(precision), Real::max);
            Ok((dev, s.warnings))
        })
        .collect::<Result<_>>()?;
    let warnings: Vec<String> = results
        .iter()
        .enumerate()
        .flat_map(|(i, (_, w))| w.iter().map(move |w| format!("h[{i}]: {w}")))
        .collect();
    let devs: Vec<Real> = results.into_iter().map(|(d, _)| d).collect();
    let sl = slopes(&hs, &devs);
    let observed = median_of_last(&sl, 3);
    let nu = m - d as f64 / 2.0;
    let proven = if nu < q as f64 { m - q as f64 + 1.0 - d as f64 / 2.0 } else { 1.0 };
    Ok(StencilConvergenceReport {
        m,
        q,
        h_values: hs.iter().map(Real::to_f64).collect(),
        deviations: devs.iter().map(Real::to_f64).collect(),
        slopes: sl,
        observed_rate: observed,
        proven_rate: proven,
        doubled_rate_observed: (observed - 2.0 * proven).abs() <= 0.1,
        precision_bits: precision,
        warnings,
    })
}
