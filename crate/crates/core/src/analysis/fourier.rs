//! Independent double-precision check of Sobolev dual norms through the
//! Fourier representation `∫ |ε̂(ω)|² (1 + ‖ω‖²)^{-m} dω`.

use crate::error::{Error, Result};
use crate::functionals::{ErrorFunctional, Functional};
use crate::scalar::{gamma_at, matern_normalization, Real};

/// Gauss-Kronrod 7/15 abscissae on `[-1, 1]` (non-negative half).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
/// Gauss weights for `XGK[1], XGK[3], XGK[5], XGK[7]`.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Clone, Debug)]
pub struct FourierOptions {
    /// Target relative accuracy of the integral.
    pub rel_tol: f64,
    /// Largest radial cutoff tried before giving up.
    pub max_radius: f64,
    pub max_depth: u32,
}

impl Default for FourierOptions {
    fn default() -> Self {
        FourierOptions { rel_tol: 1e-10, max_radius: 2e4, max_depth: 40 }
    }
}

/// One term `c · σ(ω) e^{iω·y}` of the functional's Fourier symbol.
#[derive(Clone, Debug)]
struct Atom {
    coeff: f64,
    at: Vec<f64>,
    kind: Functional,
}

impl Atom {
    /// `σ(ω)` as `(re, im)`.
    fn symbol(&self, w: &[f64]) -> (f64, f64) {
        match &self.kind {
            Functional::PointValue => (1.0, 0.0),
            Functional::Laplacian => (-w.iter().map(|x| x * x).sum::<f64>(), 0.0),
            Functional::Partial { alpha } => {
                let mono: f64 = w.iter().zip(alpha).map(|(x, &a)| x.powi(a as i32)).product();
                // i^k
                match alpha.iter().sum::<u32>() % 4 {
                    0 => (mono, 0.0),
                    1 => (0.0, mono),
                    2 => (-mono, 0.0),
                    _ => (0.0, -mono),
                }
            }
        }
    }

    fn order(&self) -> i32 {
        self.kind.scaling_order() as i32
    }
}

/// Atoms grouped by location; cross-group terms oscillate, in-group ones do not.
struct Symbol {
    groups: Vec<Vec<Atom>>,
}

impl Symbol {
    fn new(e: &ErrorFunctional) -> Symbol {
        let d = e.dim();
        let mut atoms = vec![Atom { coeff: 1.0, at: vec![0.0; d], kind: e.lambda.clone() }];
        for (x, w) in e.induced_nodes().to_f64().into_iter().zip(e.induced_weights()) {
            atoms.push(Atom { coeff: -w.to_f64(), at: x, kind: Functional::PointValue });
        }
        let mut groups: Vec<Vec<Atom>> = Vec::new();
        for a in atoms {
            match groups.iter_mut().find(|g| g[0].at == a.at) {
                Some(g) => g.push(a),
                None => groups.push(vec![a]),
            }
        }
        Symbol { groups }
    }

    fn group_value(g: &[Atom], w: &[f64]) -> (f64, f64) {
        g.iter().fold((0.0, 0.0), |acc, a| {
            let (sr, si) = a.symbol(w);
            (acc.0 + a.coeff * sr, acc.1 + a.coeff * si)
        })
    }

    /// `|ε̂(ω)|²`.
    fn full(&self, w: &[f64]) -> f64 {
        let (mut re, mut im) = (0.0, 0.0);
        for g in &self.groups {
            let (sr, si) = Symbol::group_value(g, w);
            let phase: f64 = w.iter().zip(&g[0].at).map(|(a, b)| a * b).sum();
            let (c, s) = (phase.cos(), phase.sin());
            re += sr * c - si * s;
            im += sr * s + si * c;
        }
        re * re + im * im
    }

    /// Non-oscillatory part: in-group squared moduli only.
    fn diagonal(&self, w: &[f64]) -> f64 {
        self.groups
            .iter()
            .map(|g| {
                let (r, i) = Symbol::group_value(g, w);
                r * r + i * i
            })
            .sum()
    }

    fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for a in &self.groups {
            for b in &self.groups {
                let dist = a[0].at.iter().zip(&b[0].at).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt();
                d = d.max(dist);
            }
        }
        d
    }

    /// Size of the neglected oscillatory tail beyond `radius`: each pair of
    /// groups at distance `z` contributes about `amplitude(R) / z`, with the
    /// angular average decaying like `(R z)^{-(d-1)/2}`.
    fn cross_tail(&self, radius: f64, dim: usize) -> f64 {
        let mut total = 0.0;
        for (i, a) in self.groups.iter().enumerate() {
            for b in &self.groups[i + 1..] {
                let z = a[0].at.iter().zip(&b[0].at).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt();
                let ca: f64 = a.iter().map(|t| t.coeff.abs() * radius.powi(t.order())).sum();
                let cb: f64 = b.iter().map(|t| t.coeff.abs() * radius.powi(t.order())).sum();
                let spread = if dim == 1 { 2.0 } else { 2.0 * std::f64::consts::PI * (radius * z).powf(-(dim as f64 - 1.0) / 2.0) };
                total += 2.0 * ca * cb * spread / z;
            }
        }
        total
    }

    fn max_order(&self) -> i32 {
        self.groups.iter().flatten().map(Atom::order).max().unwrap_or(0)
    }
}

/// Angular rule on the unit sphere: directions and weights.
fn sphere_rule(dim: usize, resolution: usize) -> Vec<(Vec<f64>, f64)> {
    match dim {
        1 => vec![(vec![1.0], 1.0), (vec![-1.0], 1.0)],
        2 => {
            let n = resolution.max(8);
            let w = 2.0 * std::f64::consts::PI / n as f64;
            (0..n)
                .map(|k| {
                    let t = w * k as f64;
                    (vec![t.cos(), t.sin()], w)
                })
                .collect()
        }
        _ => {
            let n_az = resolution.max(8);
            let (nodes, weights) = gauss_legendre(resolution.div_ceil(2).max(8));
            let w_az = 2.0 * std::f64::consts::PI / n_az as f64;
            let mut out = Vec::with_capacity(n_az * nodes.len());
            for (ct, wt) in nodes.iter().zip(&weights) {
                let st = (1.0 - ct * ct).max(0.0).sqrt();
                for k in 0..n_az {
                    let p = w_az * k as f64;
                    out.push((vec![st * p.cos(), st * p.sin(), *ct], wt * w_az));
                }
            }
            out
        }
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]` by Newton iteration.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let (pn, pn1) = if n == 1 { (z, 1.0) } else { (p1, p0) };
            let dp = n as f64 * (z * pn - pn1) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                let (mut q0, mut q1) = (1.0, z);
                for k in 2..=n {
                    let q2 = ((2 * k - 1) as f64 * z * q1 - (k - 1) as f64 * q0) / k as f64;
                    q0 = q1;
                    q1 = q2;
                }
                let (qn, qn1) = if n == 1 { (z, 1.0) } else { (q1, q0) };
                let dq = n as f64 * (z * qn - qn1) / (z * z - 1.0);
                w[i] = 2.0 / ((1.0 - z * z) * dq * dq);
                break;
            }
        }
        x[i] = z;
    }
    (x, w)
}

fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

fn adaptive(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> Result<f64> {
    let (v, err) = gk15(f, a, b);
    if err <= tol || (b - a).abs() < 1e-14 * a.abs().max(1.0) {
        return Ok(v);
    }
    if depth == 0 {
        return Err(Error::QuadratureTolerance(format!(
            "radial panel [{a:.6}, {b:.6}] did not reach {tol:.2e} (estimate {err:.2e})"
        )));
    }
    let m = 0.5 * (a + b);
    Ok(adaptive(f, a, m, tol / 2.0, depth - 1)? + adaptive(f, m, b, tol / 2.0, depth - 1)?)
}

/// Squared norm of `e` in `W_2^m(R^d)*`, normalized like the Matérn kernel
/// of the same order so it is directly comparable with the dual pairing.
///
/// Works in double precision; meant as an oracle for moderate instances.
pub fn fourier_oracle_norm_squared(e: &ErrorFunctional, m: f64, opts: &FourierOptions) -> Result<f64> {
    let d = e.dim();
    if !(1..=3).contains(&d) {
        return Err(Error::Invalid(format!("Fourier oracle supports d in 1..=3, got {d}")));
    }
    let symbol = Symbol::new(e);
    let s = symbol.max_order();
    // Radial integrand decays like ρ^{d-1+2s-2m}.
    let decay = 2.0 * m - d as f64 - 2.0 * f64::from(s);
    if decay <= 0.0 {
        return Err(Error::Continuity(format!(
            "{} is not continuous on W_2^{m}(R^{d}); the Fourier integral diverges",
            e.lambda
        )));
    }
    let weight = |rho: f64| rho.powi(d as i32 - 1) * (1.0 + rho * rho).powf(-m);
    let diam = symbol.diameter();
    let diag_rule = sphere_rule(d, 32);
    let diag = |rho: f64| -> f64 {
        let avg: f64 = diag_rule
            .iter()
            .map(|(u, w)| w * symbol.diagonal(&u.iter().map(|c| c * rho).collect::<Vec<_>>()))
            .sum();
        weight(rho) * avg
    };
    let full = |rho: f64| -> f64 {
        let rule = sphere_rule(d, (rho * diam).ceil() as usize + 40);
        let avg: f64 = rule
            .iter()
            .map(|(u, w)| w * symbol.full(&u.iter().map(|c| c * rho).collect::<Vec<_>>()))
            .sum();
        weight(rho) * avg
    };

    // Scale estimate from the non-oscillatory part over the whole half line.
    let to_unit = |f: &dyn Fn(f64) -> f64, t: f64| -> f64 {
        if t <= 0.0 || t >= 1.0 {
            return 0.0;
        }
        let rho = t / (1.0 - t);
        f(rho) / ((1.0 - t) * (1.0 - t))
    };
    let rough = adaptive(&|t| to_unit(&diag, t), 0.0, 1.0, 1e-6, opts.max_depth)?.abs();
    if rough == 0.0 {
        return Ok(0.0);
    }
    let abs_tol = opts.rel_tol * rough;

    // Cutoff where the neglected oscillatory tail is below tolerance.
        let tail_bound = |r: f64| symbol.cross_tail(r, d) * weight(r);
    let mut radius = 16.0f64;
    while tail_bound(radius) > 0.1 * abs_tol {
        radius *= 2.0;
        if radius > opts.max_radius {
            return Err(Error::QuadratureTolerance(format!(
                "oscillatory tail still {:.2e} at radius {radius:.0}",
                tail_bound(radius)
            )));
        }
    }

    // Panels of at most half an oscillation period.
    let width = if diam > 0.0 { (std::f64::consts::PI / diam).min(1.0) } else { 1.0 };
    let panels = (radius / width).ceil() as usize;
    let panel_tol = 0.5 * abs_tol / panels as f64;
    let mut core = 0.0;
    for k in 0..panels {
        let a = k as f64 * width;
        let b = ((k + 1) as f64 * width).min(radius);
        core += adaptive(&full, a, b, panel_tol, opts.max_depth)?;
    }
    // ρ = radius / t on (0, 1].
    let tail = adaptive(
        &|t: f64| if t <= 0.0 { 0.0 } else { diag(radius / t) * radius / (t * t) },
        0.0,
        1.0,
        0.25 * abs_tol,
        opts.max_depth,
    )?;

    let prec = 64;
    let mr = Real::from_f64_decimal(m, prec);
    let nu = &mr - Real::from_i64(d as i64, prec) / 2;
    let norm = matern_normalization(&nu, prec).to_f64();
    let gamma_m = gamma_at(&mr, prec)?.to_f64();
    let constant = norm * (2.0 * std::f64::consts::PI).powf(-(d as f64) / 2.0) * 2f64.powf(m - 1.0) * gamma_m;
    Ok(constant * (core + tail))
}
