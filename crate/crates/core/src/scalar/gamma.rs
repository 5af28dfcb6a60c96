//! Gamma function at arbitrary precision.
//!
//! Spouge's approximation with the parameter `a` chosen from the target
//! precision, so the truncation error bound `a^{-1/2} (2π)^{-(a+1/2)}` stays
//! below the last retained bit. Arguments below 1/2 go through reflection.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;

use super::Real;
use crate::error::{Error, Result};

/// Spouge coefficients `c_0..c_{a-1}` for one working precision.
struct SpougeTable {
    a: u32,
    coeffs: Vec<Float>,
}

fn table_cache() -> &'static Mutex<HashMap<u32, Arc<SpougeTable>>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<SpougeTable>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Number of Spouge terms needed for `bits` bits of relative accuracy.
fn spouge_parameter(bits: u32) -> u32 {
    let log2_two_pi = (2.0 * std::f64::consts::PI).log2();
    ((bits as f64 + 10.0) / log2_two_pi).ceil() as u32 + 1
}

fn spouge_table(bits: u32) -> Arc<SpougeTable> {
    // Bucket precisions so nearby requests share one table.
    let bucket = bits.div_ceil(64) * 64;
    if let Some(t) = table_cache().lock().expect("gamma cache poisoned").get(&bucket) {
        return Arc::clone(t);
    }
    let a = spouge_parameter(bucket);
    // The alternating coefficient sum cancels roughly as many bits as it resolves.
    let work = 2 * bucket + 64;
    let mut coeffs = Vec::with_capacity(a as usize);
    let two_pi = Float::with_val(work, Constant::Pi) * 2u32;
    coeffs.push(two_pi.sqrt());
    let mut fact = Float::with_val(work, 1u32); // (k-1)!
    for k in 1..a {
        if k > 1 {
            fact *= k - 1;
        }
        let base = Float::with_val(work, a - k);
        let power = base.clone().pow(Float::with_val(work, k) - 0.5f64);
        let e = Float::with_val(work, a - k).exp();
        let mut c = power * e / &fact;
        if k % 2 == 0 {
            c = -c;
        }
        coeffs.push(c);
    }
    let table = Arc::new(SpougeTable { a, coeffs });
    table_cache()
        .lock()
        .expect("gamma cache poisoned")
        .insert(bucket, Arc::clone(&table));
    table
}

/// `Γ(z+1)` by Spouge's formula for `z > 0`, at `bits` bits.
fn spouge_gamma_shifted(z: &Float, bits: u32) -> Float {
    let table = spouge_table(bits);
    let work = 2 * bits.div_ceil(64) * 64 + 64;
    let z = Float::with_val(work, z);
    let mut sum = table.coeffs[0].clone();
    for (k, c) in table.coeffs.iter().enumerate().skip(1) {
        sum += Float::with_val(work, c / Float::with_val(work, &z + k as u32));
    }
    let za = Float::with_val(work, &z + table.a);
    let lead = za.clone().pow(Float::with_val(work, &z + 0.5f64)) * (-za).exp();
    lead * sum
}

/// True when `x` is an integer `<= 0`.
fn is_nonpositive_integer(x: &Float) -> bool {
    x.is_integer() && (x.is_zero() || x.is_sign_negative())
}

/// The gamma function, correctly evaluated to the precision of `x`.
pub fn gamma(x: &Real) -> Result<Real> {
    gamma_at(x, x.prec())
}

/// The gamma function evaluated to `prec` bits.
pub fn gamma_at(x: &Real, prec: u32) -> Result<Real> {
    let xf = x.as_float();
    if !xf.is_finite() {
        return Err(Error::Domain { function: "gamma", detail: format!("non-finite argument {x}") });
    }
    if is_nonpositive_integer(xf) {
        return Err(Error::Pole(x.to_string_digits(20)));
    }
    if xf.is_integer() && *xf <= 171 {
        // Small positive integers: exact factorial.
        let n = xf.to_u32_saturating().unwrap_or(1);
        let fact = rug::Integer::from(rug::Integer::factorial(n.saturating_sub(1)));
        return Ok(Real::from_float(Float::with_val(prec, &fact)));
    }
    let work = prec + 32;
    let value = gamma_float(&Float::with_val(work.max(xf.prec() + 32), xf), work);
    if !value.is_finite() || value.is_zero() {
        return Err(Error::Overflow { function: "gamma", arg: x.to_string_digits(20) });
    }
    Ok(Real::from_float(Float::with_val(prec, value)))
}

fn gamma_float(x: &Float, work: u32) -> Float {
    if *x < 0.5f64 {
        // Reflection: Γ(x) = π / (sin(πx) Γ(1-x)).
        let reduced = Float::with_val(work, x - Float::with_val(work, x.round_ref()));
        let pi = Float::with_val(work, Constant::Pi);
        let mut s = Float::with_val(work, &reduced * &pi).sin();
        if Float::with_val(work, x.round_ref()).to_integer().map(|n| n.is_odd()).unwrap_or(false) {
            s = -s;
        }
        let one_minus = Float::with_val(work, 1u32) - Float::with_val(work, x);
        return pi / (s * gamma_float(&one_minus, work));
    }
    if *x < 2u32 {
        // Γ(x) = Γ(x+1)/x keeps Spouge's shifted argument strictly positive.
        let z = Float::with_val(work, x);
        return spouge_gamma_shifted(&z, work) / Float::with_val(work, x);
    }
    let z = Float::with_val(work, x - 1u32);
    spouge_gamma_shifted(&z, work)
}

/// Digamma at positive integers, `ψ(n) = -γ + H_{n-1}`.
pub fn digamma_int(n: u32, prec: u32) -> Real {
    assert!(n >= 1, "digamma_int requires a positive integer");
    let mut h = rug::Rational::new();
    for k in 1..n {
        h += rug::Rational::from((1, k));
    }
    Real::from_rational(&h, prec) - Real::euler(prec)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &Real, b: &Real, rel_bits: i32) -> bool {
        let diff = (a - b).abs();
        diff.is_zero() || diff.log2_abs() - b.log2_abs() < -(rel_bits as f64)
    }

    #[test]
    fn factorials() {
        let g = gamma(&Real::from_i64(5, 128)).unwrap();
        assert_eq!(g, Real::from_i64(24, 128));
    }

    #[test]
    fn half_gives_sqrt_pi() {
        for prec in [64, 256, 1000] {
            let g = gamma(&Real::from_f64(0.5, prec)).unwrap();
            assert!(close(&g, &Real::pi(prec).sqrt(), prec as i32 - 4), "prec {prec}");
        }
    }

    #[test]
    fn poles_rejected() {
        for x in [0i64, -1, -7] {
            assert!(matches!(gamma(&Real::from_i64(x, 64)), Err(Error::Pole(_))));
        }
    }

    #[test]
    fn negative_non_integer_via_reflection() {
        // Γ(-1/2) = -2√π
        let g = gamma(&Real::from_f64(-0.5, 200)).unwrap();
        let expected = Real::pi(200).sqrt() * -2;
        assert!(close(&g, &expected, 190));
        // Γ(-3/2) = 4√π/3
        let g = gamma(&Real::from_f64(-1.5, 200)).unwrap();
        let expected = Real::pi(200).sqrt() * 4 / 3;
        assert!(close(&g, &expected, 190));
    }

    #[test]
    fn agrees_with_mpfr_reference() {
        // MPFR's own gamma serves as an independent implementation.
        for (x, prec) in [(3.75, 300u32), (0.1, 256), (17.3, 512), (1.5, 850), (-2.25, 256)] {
            let ours = gamma(&Real::from_f64(x, prec)).unwrap();
            let reference = Float::with_val(prec, x).gamma();
            assert!(close(&ours, &Real::from_float(reference), prec as i32 - 6), "x={x} prec={prec}");
        }
    }

    #[test]
    fn digamma_values() {
        let psi1 = digamma_int(1, 128);
        assert!(close(&psi1, &-Real::euler(128), 120));
        let psi3 = digamma_int(3, 128);
        let expected = Real::from_f64(1.5, 128) - Real::euler(128);
        assert!(close(&psi3, &expected, 120));
    }
}
