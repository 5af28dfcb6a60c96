//! The scaled modified Bessel function `f_ν(r) = K_ν(r) r^ν` and its radial
//! derivatives.
//!
//! Non-integer orders use the reflection formula
//! `K_ν = π (I_{-ν} - I_ν) / (2 sin νπ)` with both power series multiplied by
//! `r^ν`; integer orders use the logarithmic expansion. Both lose bits to
//! cancellation (about `2r log2(e)` of them for larger `r`), so the series run
//! with guard bits that are doubled until the observed loss fits.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;

use super::gamma::{digamma_int, gamma_at};
use super::Real;
use crate::error::{Error, Result};

/// Largest argument accepted; the series would need tens of thousands of
/// guard bits beyond this.
pub const MAX_ARGUMENT: f64 = 1000.0;

const MAX_GUARD_DOUBLINGS: u32 = 4;

/// If `nu` is an integer, return it.
pub(crate) fn as_integer(nu: &Real) -> Option<i64> {
    let f = nu.as_float();
    if f.is_integer() {
        f.to_integer().and_then(|n| n.to_i64())
    } else {
        None
    }
}

/// `f_ν(r) = K_ν(r) r^ν` for `ν >= 0`, `r > 0`, rounded to `precision` bits.
pub fn bessel_kv_rv(nu: &Real, r: &Real, precision: u32) -> Result<Real> {
    if nu.is_negative() {
        return Err(Error::Domain { function: "bessel_kv_rv", detail: format!("order {nu} < 0") });
    }
    kv_rv_signed(nu, r, precision)
}

/// `f_ν` for any real order, using `f_{-μ}(r) = f_μ(r) r^{-2μ}` below zero.
pub(crate) fn kv_rv_signed(nu: &Real, r: &Real, precision: u32) -> Result<Real> {
    if !r.is_positive() {
        return Err(Error::Domain { function: "bessel_kv_rv", detail: format!("argument {r} <= 0") });
    }
    let rf = r.to_f64();
    if rf > MAX_ARGUMENT {
        return Err(Error::Overflow { function: "bessel_kv_rv", arg: r.to_string_digits(20) });
    }
    if nu.is_negative() {
        let mu = -nu;
        let f = kv_rv_signed(&mu, r, precision + 16)?;
        let r_hi = r.with_prec(precision + 16);
        let scale = r_hi.pow(&(mu.with_prec(precision + 16) * -2));
        return Ok((f * scale).with_prec(precision));
    }

    // Terms peak near k ≈ r/2 with size ~ e^r while the result is ~ e^{-r}.
    let mut guard = 32 + (2.0 * rf * std::f64::consts::LOG2_E).ceil() as u32;
    if as_integer(nu).is_none() {
        // Near-integer orders cancel between the two series.
        let frac = (nu.to_f64() - nu.to_f64().round()).abs();
        if frac > 0.0 {
            guard += (-frac.log2()).max(0.0).ceil() as u32;
        }
    }
    for _ in 0..=MAX_GUARD_DOUBLINGS {
        // Rounded up so cached gamma values are shared between nearby arguments.
        let work = (precision + guard).div_ceil(64) * 64;
        let (value, lost) = match as_integer(nu) {
            Some(n) => integer_order_series(n as u32, r, work)?,
            None => fractional_order_series(nu, r, work)?,
        };
        if value.is_zero() || !value.is_finite() {
            return Err(Error::Overflow { function: "bessel_kv_rv", arg: r.to_string_digits(20) });
        }
        if lost + 8.0 <= guard as f64 {
            return Ok(value.with_prec(precision));
        }
        guard = guard.max(lost.ceil() as u32 + 16) * 2;
    }
    Err(Error::PrecisionLoss { function: "bessel_kv_rv", guard_bits: guard })
}

type GammaKey = (String, u32);

/// `Γ(x)` memoized by exact argument and precision; kernel evaluation asks for
/// the same two values `Γ(1 ± ν)` thousands of times.
fn cached_gamma(x: Float, work: u32) -> Result<Real> {
    static CACHE: OnceLock<Mutex<HashMap<GammaKey, Real>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (x.to_string_radix(16, None), work);
    if let Some(v) = cache.lock().expect("gamma cache poisoned").get(&key) {
        return Ok(v.clone());
    }
    let value = gamma_at(&Real::from_float(x), work)?;
    let mut guard = cache.lock().expect("gamma cache poisoned");
    if guard.len() > 4096 {
        guard.clear();
    }
    guard.insert(key, value.clone());
    Ok(value)
}

/// Sum of a term sequence generated by a ratio until terms drop below the
/// working precision. Returns the sum and `log2` of the largest term.
struct SeriesSum {
    sum: Float,
    max_log2: f64,
}

impl SeriesSum {
    fn new(work: u32) -> Self {
        SeriesSum { sum: Float::new(work), max_log2: f64::NEG_INFINITY }
    }

    fn add(&mut self, term: &Float) {
        if !term.is_zero() {
            let (m, e) = term.to_f64_exp();
            self.max_log2 = self.max_log2.max(m.abs().log2() + e as f64);
        }
        self.sum += term;
    }
}

fn log2_of(x: &Float) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let (m, e) = x.to_f64_exp();
    m.abs().log2() + e as f64
}

/// True once `term` is negligible at `work` bits relative to `scale` and the
/// ratio sequence has started decreasing (`k` past the peak).
fn converged(term: &Float, scale_log2: f64, work: u32, k: u64, peak: f64) -> bool {
    (k as f64) > peak && log2_of(term) < scale_log2 - work as f64 - 4.0
}

/// Non-integer order: returns `(f_ν(r), bits lost to cancellation)`.
fn fractional_order_series(nu: &Real, r: &Real, work: u32) -> Result<(Real, f64)> {
    let nu_w = nu.with_prec(work);
    let nuf = nu_w.as_float();
    let r_w = r.with_prec(work);
    let quarter_r2 = Float::with_val(work, r_w.as_float() * r_w.as_float()) / 4u32;
    let peak = r.to_f64() / 2.0 + 1.0;

    let two_pow_nu = Float::with_val(work, nuf).exp2();
    let one = Float::with_val(work, 1u32);
    let g_minus = cached_gamma(Float::with_val(work, &one - nuf), work)?;
    let g_plus = cached_gamma(Float::with_val(work, &one + nuf), work)?;

    // A_k = 2^{ν-2k} r^{2k} / (k! Γ(k-ν+1))
    let mut a_term = Float::with_val(work, &two_pow_nu / g_minus.as_float());
    // B_k = 2^{-ν-2k} r^{2k+2ν} / (k! Γ(k+ν+1))
    let r_pow = Float::with_val(work, r_w.as_float().pow(Float::with_val(work, nuf * 2u32)));
    let mut b_term = Float::with_val(work, r_pow / &two_pow_nu) / g_plus.as_float();

    let mut a_sum = SeriesSum::new(work);
    let mut b_sum = SeriesSum::new(work);
    let mut k: u64 = 0;
    loop {
        a_sum.add(&a_term);
        b_sum.add(&b_term);
        let scale = a_sum.max_log2.max(b_sum.max_log2);
        if converged(&a_term, scale, work, k, peak) && converged(&b_term, scale, work, k, peak) {
            break;
        }
        k += 1;
        let kf = Float::with_val(work, k);
        let da = Float::with_val(work, &kf - nuf) * &kf;
        let db = Float::with_val(work, &kf + nuf) * &kf;
        a_term = a_term * &quarter_r2 / da;
        b_term = b_term * &quarter_r2 / db;
        if k > 1_000_000 {
            return Err(Error::NonConvergence { routine: "bessel series", iterations: k as usize });
        }
    }
    let diff = Float::with_val(work, &a_sum.sum - &b_sum.sum);
    let pi = Float::with_val(work, Constant::Pi);
    let sin = Float::with_val(work, nuf * &pi).sin();
    let value = diff * pi / (sin * 2u32);
    let scale = a_sum.max_log2.max(b_sum.max_log2);
    let lost = (scale - log2_of(&Float::with_val(work, &a_sum.sum - &b_sum.sum))).max(0.0);
    Ok((Real::from_float(value), lost))
}

/// Integer order `n`: returns `(f_n(r), bits lost to cancellation)`.
fn integer_order_series(n: u32, r: &Real, work: u32) -> Result<(Real, f64)> {
    let r_w = r.with_prec(work);
    let rf = r_w.as_float();
    let quarter_r2 = Float::with_val(work, rf * rf) / 4u32;
    let peak = r.to_f64() / 2.0 + 1.0;
    let mut acc = SeriesSum::new(work);

    // ½ Σ_{k<n} (-1)^k (n-k-1)!/k! 2^{n-2k} r^{2k}
    if n > 0 {
        let mut term = Float::with_val(work, rug::Integer::from(rug::Integer::factorial(n - 1)))
            * (Float::with_val(work, 1u32) << (n - 1));
        for k in 0..n {
            acc.add(&term);
            if k + 1 < n {
                let denom = u64::from(k + 1) * u64::from(n - k - 1);
                term = -(term * &quarter_r2) / Float::with_val(work, denom);
            }
        }
    }

    // (-1)^n Σ_k c_k (½(ψ(k+1)+ψ(n+k+1)) - ln(r/2)),
    // c_k = 2^{-n-2k} r^{2n+2k} / (k!(n+k)!)
    let ln_half_r = Float::with_val(work, rf / 2u32).ln();
    let mut c = Float::with_val(work, rf.pow(2 * n))
        / (Float::with_val(work, 1u32) << n)
        / Float::with_val(work, rug::Integer::from(rug::Integer::factorial(n)));
    let mut psi_k1 = digamma_int(1, work).into_float();
    let mut psi_nk1 = digamma_int(n + 1, work).into_float();
    let mut k: u64 = 0;
    loop {
        let half_psi = Float::with_val(work, &psi_k1 + &psi_nk1) / 2u32;
        let bracket = Float::with_val(work, &half_psi - &ln_half_r);
        let mut term = Float::with_val(work, &c * &bracket);
        if n % 2 == 1 {
            term = -term;
        }
        acc.add(&term);
        if converged(&c, acc.max_log2, work, k, peak) && converged(&term, acc.max_log2, work, k, peak) {
            break;
        }
        k += 1;
        c = c * &quarter_r2 / Float::with_val(work, k * (u64::from(n) + k));
        psi_k1 += Float::with_val(work, 1u32) / Float::with_val(work, k);
        psi_nk1 += Float::with_val(work, 1u32) / Float::with_val(work, u64::from(n) + k);
        if k > 1_000_000 {
            return Err(Error::NonConvergence { routine: "bessel series", iterations: k as usize });
        }
    }
    let lost = (acc.max_log2 - log2_of(&acc.sum)).max(0.0);
    Ok((Real::from_float(acc.sum), lost))
}

/// Radial derivatives `(f_ν, f_ν', …, f_ν^{(depth)})` at `r`, built from the
/// ladder `f_ν' = -r f_{ν-1}` and the product rule. `depth <= 4`.
pub fn kv_rv_derivative_ladder(nu: &Real, r: &Real, depth: usize, precision: u32) -> Result<Vec<Real>> {
    if depth > 4 {
        return Err(Error::UnsupportedOrder(format!("derivative depth {depth} > 4")));
    }
    if nu.is_negative() {
        return Err(Error::Domain { function: "kv_rv_derivative_ladder", detail: format!("order {nu} < 0") });
    }
    // r^{-2μ} rescaling of negative orders costs a few bits near small r.
    let work = precision + 16;
    let g: Vec<Real> = (0..=depth)
        .map(|j| kv_rv_signed(&(nu.with_prec(work) - j as i64), r, work))
        .collect::<Result<_>>()?;
    let r = r.with_prec(work);
    let r2 = &r * &r;
    let mut out = vec![g[0].clone()];
    if depth >= 1 {
        out.push(-(&r * &g[1]));
    }
    if depth >= 2 {
        out.push(&r2 * &g[2] - &g[1]);
    }
    if depth >= 3 {
        out.push(&r * &g[2] * 3 - &r2 * &r * &g[3]);
    }
    if depth >= 4 {
        out.push(&g[2] * 3 - &r2 * &g[3] * 6 + &r2 * &r2 * &g[4]);
    }
    Ok(out.into_iter().map(|v| v.with_prec(precision)).collect())
}
