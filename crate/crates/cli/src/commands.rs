//! Subcommand implementations. Every command writes deterministic output:
//! the same config, seed and precision give byte-identical files.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sobstencil::analysis::{
    bl_scaling_check, compare_methods, estimate_rates, median_of_last, slopes, HGrid, QuotientReport, RateStudy,
    StencilRecipe,
};
use sobstencil::functionals::Functional;
use sobstencil::linalg::svd;
use sobstencil::polyspace::{qmax_search, value_matrix, MonomialBasis, NodeSet};
use sobstencil::scalar::{DEFAULT_STENCIL_PRECISION, DEFAULT_STUDY_PRECISION};
use sobstencil::stencils::{build_exact, Stencil};
use sobstencil::Real;

use crate::config::{Loaded, Overrides};
use crate::error::{CliError, CliResult};
use crate::nodes::read_nodes;

/// Singular-value tiers reported by `svd-diag`.
const SVD_LARGE: f64 = 2e-3;
const SVD_SMALL: f64 = 5e-14;

fn write_or_print(path: Option<&Path>, content: &str) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, content).map_err(|e| CliError::io(p, e)),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> CliResult<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Serialize(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn warn_all(warnings: &[String]) {
    for w in warnings {
        eprintln!("warning: {w}");
    }
}

pub fn build(config: &Path, overrides: Overrides) -> CliResult<()> {
    let cfg = Loaded::read(config, overrides)?;
    let prec = cfg.precision(DEFAULT_STENCIL_PRECISION);
    let lambda = cfg.functional()?;
    let nodes = cfg.nodes(prec)?;
    let recipe = cfg.method()?;
    let space = match (&recipe, &cfg.config.space) {
        (_, Some(s)) => s.clone(),
        (StencilRecipe::SobolevOptimal, None) => return Err(cfg.error("sobolev_optimal needs `space`")),
        // Unused by scalable recipes.
        _ => sobstencil::kernels::KernelSpec::gaussian(nodes.dim()),
    };
    let h = match (&recipe, cfg.config.h) {
        (StencilRecipe::SobolevOptimal, None) => return Err(cfg.error("sobolev_optimal needs the build scale `h`")),
        (_, h) => Real::from_f64_decimal(h.unwrap_or(1.0), prec),
    };
    let stencil = recipe.build(&lambda, &nodes, &space, &h)?;
    warn_all(&stencil.warnings);
    let json = to_json(&stencil.to_json())?;
    write_or_print(cfg.config.output.stencil.as_ref().map(|p| cfg.resolve(p)).as_deref(), &json)
}

#[derive(Serialize)]
struct QmaxOutput<'a> {
    functional: &'a Functional,
    nodes: &'a str,
    node_count: usize,
    precision_bits: u32,
    search: sobstencil::polyspace::QmaxSearch,
}

pub struct QmaxArgs {
    pub nodes: Option<PathBuf>,
    pub functional: Functional,
    pub cap: usize,
    pub random: Option<(usize, usize, f64)>,
}

pub fn qmax(args: QmaxArgs, overrides: Overrides) -> CliResult<()> {
    let prec = overrides.precision_bits.unwrap_or(DEFAULT_STENCIL_PRECISION);
    let nodes = load_nodes(args.nodes.as_deref(), args.random, overrides.seed, prec)?;
    let search = qmax_search(&args.functional, &nodes, None, args.cap)?;
    let mut out = String::new();
    if search.cap_reached {
        let _ = writeln!(out, "cap reached at {}", args.cap);
    } else {
        let _ = writeln!(out, "{}", search.qmax);
    }
    out.push_str(&to_json(&QmaxOutput {
        functional: &args.functional,
        nodes: &nodes.label,
        node_count: nodes.len(),
        precision_bits: prec,
        search,
    })?);
    write_or_print(None, &out)
}

fn load_nodes(file: Option<&Path>, random: Option<(usize, usize, f64)>, seed: Option<u64>, prec: u32) -> CliResult<NodeSet> {
    match (file, random) {
        (Some(p), None) => read_nodes(p, prec),
        (None, Some((count, dim, sep))) => Ok(NodeSet::random_with_separation(count, dim, seed.unwrap_or(0), sep, prec)?),
        (Some(_), Some(_)) => Err(CliError::Usage("give either a node file or --random, not both".into())),
        (None, None) => Err(CliError::Usage("a node file or --random COUNT is required".into())),
    }
}

#[derive(Serialize)]
struct SyntheticReport {
    synthetic_power: f64,
    h_values: Vec<f64>,
    norms: Vec<String>,
    slopes: Vec<f64>,
    terminal_slope: f64,
}

pub fn rate(config: &Path, overrides: Overrides, synthetic_power: Option<f64>) -> CliResult<()> {
    let cfg = Loaded::read(config, overrides)?;
    let prec = cfg.precision(DEFAULT_STUDY_PRECISION);
    let (json, csv) = match synthetic_power {
        Some(k) => synthetic_rate(&cfg.config.grid, k, prec)?,
        None => {
            let study = rate_study(&cfg, prec)?;
            let report = estimate_rates(&study)?;
            warn_all(&report.warnings);
            (to_json(&report)?, report.to_csv()?)
        }
    };
    let out = &cfg.config.output;
    match (&out.json, &out.csv) {
        (None, None) => write_or_print(None, &json),
        (j, c) => {
            if let Some(p) = j {
                write_or_print(Some(&cfg.resolve(p)), &json)?;
            }
            if let Some(p) = c {
                write_or_print(Some(&cfg.resolve(p)), &csv)?;
            }
            Ok(())
        }
    }
}

fn rate_study(cfg: &Loaded, prec: u32) -> CliResult<RateStudy> {
    let space = cfg.space()?;
    let (lambda, nodes, recipe) = match cfg.stencil()? {
        Some(stencil) => {
            if cfg.config.method.is_some() || cfg.config.nodes.is_some() {
                return Err(cfg.error("`stencil` replaces `nodes` and `method`; give only one"));
            }
            if let Some(f) = &cfg.config.functional {
                if *f != stencil.lambda {
                    return Err(cfg.error(format!("stencil approximates {}, config asks for {f}", stencil.lambda)));
                }
            }
            if !stencil.scalable {
                return Err(cfg.error("a stored non-scalable stencil is only valid at its build scale"));
            }
            let nodes = stencil.nodes.with_prec(prec);
            (stencil.lambda.clone(), nodes, StencilRecipe::Fixed(Box::new(stencil)))
        }
        None => (cfg.functional()?, cfg.nodes(prec)?, cfg.method()?),
    };
    let mut study = RateStudy::new(lambda, nodes, recipe, space);
    study.grid = cfg.config.grid.clone();
    study.precision = prec;
    study.max_precision = cfg.config.max_precision_bits.unwrap_or(4 * prec).max(prec);
    Ok(study)
}

/// Norms `h^k` fed through the slope machinery; every slope must equal `k`.
fn synthetic_rate(grid: &HGrid, k: f64, prec: u32) -> CliResult<(String, String)> {
    grid.validate()?;
    let hs = grid.values(prec);
    let exponent = Real::from_f64_decimal(k, prec);
    let norms: Vec<Real> = hs.iter().map(|h| h.pow(&exponent)).collect();
    let sl = slopes(&hs, &norms);
    let report = SyntheticReport {
        synthetic_power: k,
        h_values: hs.iter().map(Real::to_f64).collect(),
        norms: norms.iter().map(|n| n.to_string_digits(30)).collect(),
        terminal_slope: median_of_last(&sl, 3),
        slopes: sl,
    };
    let mut csv = String::from("h,norm,slope\n");
    for (i, h) in report.h_values.iter().enumerate() {
        let slope = report.slopes.get(i).map(|s| format!("{s:.12}")).unwrap_or_default();
        let _ = writeln!(csv, "{h:e},{},{slope}", report.norms[i]);
    }
    Ok((to_json(&report)?, csv))
}

pub fn compare(config: &Path, overrides: Overrides) -> CliResult<()> {
    let cfg = Loaded::read(config, overrides)?;
    if cfg.config.pairs.is_empty() {
        return Err(cfg.error("`pairs` must list at least one [first, second] method pair"));
    }
    let prec = cfg.precision(DEFAULT_STUDY_PRECISION);
    let lambda = cfg.functional()?;
    let nodes = cfg.nodes(prec)?;
    let space = cfg.space()?;
    let max_prec = cfg.config.max_precision_bits.unwrap_or(4 * prec).max(prec);
    let reports = cfg
        .config
        .pairs
        .iter()
        .map(|(a, b)| compare_methods(&lambda, &nodes, a, b, &space, &cfg.config.grid, prec, max_prec))
        .collect::<Result<Vec<QuotientReport>, _>>()?;
    for r in &reports {
        warn_all(&r.warnings);
    }
    let mut csv = String::from("h");
    for r in &reports {
        let _ = write!(csv, ",{}/{}", r.first, r.second);
    }
    csv.push('\n');
    for (i, h) in reports[0].h_values.iter().enumerate() {
        let _ = write!(csv, "{h:e}");
        for r in &reports {
            let _ = write!(csv, ",{:.15}", r.ratios[i]);
        }
        csv.push('\n');
    }
    let out = &cfg.config.output;
    if let Some(p) = &out.json {
        write_or_print(Some(&cfg.resolve(p)), &to_json(&reports)?)?;
    }
    write_or_print(out.csv.as_ref().map(|p| cfg.resolve(p)).as_deref(), &csv)
}

pub fn svd_diag(nodes: &Path, q: usize, overrides: Overrides) -> CliResult<()> {
    if q == 0 {
        return Err(CliError::Usage("--q must be at least 1".into()));
    }
    let prec = overrides.precision_bits.unwrap_or(DEFAULT_STENCIL_PRECISION);
    let nodes = read_nodes(nodes, prec)?;
    let basis = MonomialBasis::new(q, nodes.dim());
    let a = value_matrix(&basis, &nodes)?;
    let mut sigma: Vec<Real> = svd(&a)?.sigma;
    sigma.sort_by(|x, y| y.as_float().total_cmp(x.as_float()));
    let mut out = String::new();
    let (mut large, mut middle, mut small) = (0, 0, 0);
    for (i, s) in sigma.iter().enumerate() {
        let v = s.to_f64();
        if v > SVD_LARGE {
            large += 1;
        } else if v < SVD_SMALL {
            small += 1;
        } else {
            middle += 1;
        }
        let _ = writeln!(out, "sigma[{i}] = {}", s.to_string_digits(20));
    }
    let _ = writeln!(out, "dim P_q = {}, nodes = {}", basis.len(), nodes.len());
    let _ = writeln!(out, "above {SVD_LARGE:e}: {large}");
    let _ = writeln!(out, "between: {middle}");
    let _ = writeln!(out, "below {SVD_SMALL:e}: {small}");
    write_or_print(None, &out)
}

/// Quick end-to-end checks with known answers; returns true if all pass.
pub fn self_test() -> bool {
    let prec = DEFAULT_STENCIL_PRECISION;
    let checks: Vec<(&str, CliResult<(bool, String)>)> = vec![
        ("star stencil weights", star_weights(prec)),
        ("star exactness order", star_qmax(prec)),
        ("Beppo-Levi scaling of the star", star_scaling(prec)),
        ("synthetic slopes", synthetic_slopes(prec)),
    ];
    let mut ok = true;
    for (name, result) in checks {
        let (pass, detail) = result.unwrap_or_else(|e| (false, format!("error: {e}")));
        ok &= pass;
        println!("{} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    }
    ok
}

fn star(prec: u32) -> CliResult<Stencil> {
    Ok(build_exact(&Functional::Laplacian, &NodeSet::five_point_star(prec), 3)?)
}

fn star_weights(prec: u32) -> CliResult<(bool, String)> {
    let s = star(prec)?;
    let want = [-4.0, 1.0, 1.0, 1.0, 1.0];
    let dev = s.weights.iter().zip(want).map(|(w, t)| (w.to_f64() - t).abs()).fold(0.0, f64::max);
    Ok((dev < 1e-60, format!("max deviation {dev:.2e}")))
}

fn star_qmax(prec: u32) -> CliResult<(bool, String)> {
    let search = qmax_search(&Functional::Laplacian, &NodeSet::five_point_star(prec), None, 8)?;
    Ok((search.qmax == 4 && !search.cap_reached, format!("qmax {}", search.qmax)))
}

fn star_scaling(prec: u32) -> CliResult<(bool, String)> {
    let h = Real::from_f64(0.125, prec);
    let dev = bl_scaling_check(&star(prec)?, 3.5, &h)?.to_f64() - 1.0;
    Ok((dev.abs() < 1e-50, format!("relative deviation {dev:.2e}")))
}

fn synthetic_slopes(prec: u32) -> CliResult<(bool, String)> {
    let grid = HGrid::default();
    let hs = grid.values(prec);
    let k = Real::from_f64(2.5, prec);
    let norms: Vec<Real> = hs.iter().map(|h| h.pow(&k)).collect();
    let dev = slopes(&hs, &norms).iter().map(|s| (s - 2.5).abs()).fold(0.0, f64::max);
    Ok((dev < 1e-12, format!("max slope deviation {dev:.2e}")))
}
