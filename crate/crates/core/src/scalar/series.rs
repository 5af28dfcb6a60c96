//! Small-`r` expansions of radial kernels: a block of even powers followed by
//! the first non-even (odd, fractional or logarithmic) terms.
//!
//! Coefficients are built from closed forms, exactly as rationals where the
//! family allows it, never by fitting.

use rug::{Integer, Rational};

use super::gamma::{digamma_int, gamma_at};
use super::{bessel, Real};
use crate::error::{Error, Result};

/// One term `coeff · r^exponent · (log r)^{has_log}` outside the even block.
#[derive(Clone, Debug)]
pub struct SeriesTerm {
    pub exponent: Real,
    pub has_log: bool,
    pub coeff: Real,
    /// Exact value of `coeff` when it is rational.
    pub exact: Option<Rational>,
}

#[derive(Clone, Debug)]
pub struct SeriesExpansion {
    /// `even_coeffs[j]` multiplies `r^{2j}`.
    pub even_coeffs: Vec<Real>,
    pub even_exact: Vec<Option<Rational>>,
    /// Non-even terms in strictly increasing exponent order.
    pub non_even: Vec<SeriesTerm>,
    /// Remainder is `O(r^truncation_order)` (up to a log factor).
    pub truncation_order: u32,
}

impl SeriesExpansion {
    pub fn leading_non_even(&self) -> Option<&SeriesTerm> {
        self.non_even.first()
    }

    /// Coefficient of `r^{2j}`, zero past the stored block.
    pub fn even_coeff(&self, j: usize, prec: u32) -> Real {
        self.even_coeffs.get(j).cloned().unwrap_or_else(|| Real::zero(prec))
    }

    /// Evaluates the truncated series at `r >= 0`.
    pub fn evaluate(&self, r: &Real) -> Real {
        let prec = r.prec();
        let mut terms = Vec::with_capacity(self.even_coeffs.len() + self.non_even.len());
        let r2 = r * r;
        let mut power = Real::one(prec);
        for c in &self.even_coeffs {
            terms.push(c * &power);
            power = &power * &r2;
        }
        if r.is_positive() {
            let ln_r = r.ln();
            for t in &self.non_even {
                let mut v = &t.coeff * r.pow(&t.exponent);
                if t.has_log {
                    v *= &ln_r;
                }
                terms.push(v);
            }
        }
        Real::sum_of(terms.iter(), prec)
    }
}

/// True when `2ν` is an odd integer.
pub fn is_half_integer(nu: &Real) -> bool {
    let twice = nu * 2;
    bessel::as_integer(&twice).is_some_and(|t| t % 2 != 0)
}

/// Constant multiplying `K_ν(r) r^ν` so that the leading non-even series
/// coefficient takes its canonical rational value: `√(2/π)` for half-integer
/// orders, `1` otherwise.
pub fn matern_normalization(nu: &Real, prec: u32) -> Real {
    if is_half_integer(nu) {
        (Real::from_i64(2, prec) / Real::pi(prec)).sqrt()
    } else {
        Real::one(prec)
    }
}

fn factorial(n: u32) -> Integer {
    Integer::from(Integer::factorial(n))
}

fn pow2_rational(e: i64) -> Rational {
    let one = Integer::from(1);
    if e >= 0 {
        Rational::from(one << e as u32)
    } else {
        Rational::from((Integer::from(1), Integer::from(1) << (-e) as u32))
    }
}

/// Small-`r` expansion of the normalized `K_ν(r) r^ν` (see
/// [`matern_normalization`]), keeping every term with exponent `<= order`.
pub fn matern_series(nu: &Real, order: u32, prec: u32) -> Result<SeriesExpansion> {
    if nu.is_negative() {
        return Err(Error::Domain { function: "matern_series", detail: format!("order ν = {nu} < 0") });
    }
    let needed = 2.0 * nu.to_f64() + 2.0;
    if (order as f64) < needed {
        return Err(Error::UnsupportedOrder(format!(
            "truncation order {order} below 2ν+2 = {needed}; the leading non-even term would be lost"
        )));
    }
    if let Some(n) = bessel::as_integer(nu) {
        Ok(integer_series(n as u32, order, prec))
    } else if is_half_integer(nu) {
        let n = bessel::as_integer(&(nu - 0.5)).expect("half-integer") as u32;
        Ok(half_integer_series(n, order, prec))
    } else {
        general_series(nu, order, prec)
    }
}

/// `√(2/π) K_{n+1/2}(r) r^{n+1/2} = e^{-r} Σ_{i=0}^n p_i r^i`, all exact.
fn half_integer_series(n: u32, order: u32, prec: u32) -> SeriesExpansion {
    // p_i = (2n-i)! / ((n-i)! i! 2^{n-i})
    let poly: Vec<Rational> = (0..=n)
        .map(|i| {
            Rational::from((factorial(2 * n - i), factorial(n - i) * factorial(i)))
                * pow2_rational(-i64::from(n - i))
        })
        .collect();
    let coeff = |j: u32| -> Rational {
        let mut c = Rational::new();
        for i in 0..=j.min(n) {
            let mut t = Rational::from((Integer::from(1), factorial(j - i))) * &poly[i as usize];
            if (j - i) % 2 == 1 {
                t = -t;
            }
            c += t;
        }
        c
    };
    let mut even_exact = Vec::new();
    let mut non_even = Vec::new();
    for j in 0..=order {
        let c = coeff(j);
        if j % 2 == 0 {
            even_exact.push(Some(c));
        } else if c != 0 {
            non_even.push(SeriesTerm {
                exponent: Real::from_i64(i64::from(j), prec),
                has_log: false,
                coeff: Real::from_rational(&c, prec),
                exact: Some(c),
            });
        }
    }
    let even_coeffs = even_exact
        .iter()
        .map(|c| Real::from_rational(c.as_ref().expect("exact"), prec))
        .collect();
    SeriesExpansion { even_coeffs, even_exact, non_even, truncation_order: order + 1 }
}

/// `K_n(r) r^n` from the logarithmic expansion:
/// `½ Σ_{k<n} (-1)^k (n-k-1)!/k! 2^{n-2k} r^{2k}
///  + (-1)^n Σ_k c_k r^{2n+2k} (½(ψ(k+1)+ψ(n+k+1)) + ln 2 - ln r)`,
/// `c_k = 2^{-n-2k}/(k!(n+k)!)`.
fn integer_series(n: u32, order: u32, prec: u32) -> SeriesExpansion {
    let mut even_coeffs = Vec::new();
    let mut even_exact = Vec::new();
    for k in 0..n {
        let mut c = Rational::from((factorial(n - k - 1), factorial(k))) * pow2_rational(i64::from(n) - 2 * i64::from(k) - 1);
        if k % 2 == 1 {
            c = -c;
        }
        even_coeffs.push(Real::from_rational(&c, prec));
        even_exact.push(Some(c));
    }
    let ln2 = Real::ln2(prec);
    let mut non_even = Vec::new();
    let mut k = 0u32;
    while 2 * (n + k) <= order {
        let ck = Rational::from((Integer::from(1), factorial(k) * factorial(n + k))) * pow2_rational(-i64::from(n) - 2 * i64::from(k));
        let signed = if n.is_multiple_of(2) { ck.clone() } else { -ck.clone() };
        let half_psi = (digamma_int(k + 1, prec) + digamma_int(n + k + 1, prec)) / 2;
        even_coeffs.push(Real::from_rational(&signed, prec) * (half_psi + &ln2));
        even_exact.push(None);
        let log_coeff = -signed;
        non_even.push(SeriesTerm {
            exponent: Real::from_i64(i64::from(2 * (n + k)), prec),
            has_log: true,
            coeff: Real::from_rational(&log_coeff, prec),
            exact: Some(log_coeff),
        });
        k += 1;
    }
    SeriesExpansion { even_coeffs, even_exact, non_even, truncation_order: order + 1 }
}

/// Non-integer, non-half-integer order from the two `I_{±ν}` series.
fn general_series(nu: &Real, order: u32, prec: u32) -> Result<SeriesExpansion> {
    let work = prec + 32;
    let nu_w = nu.with_prec(work);
    let pi = Real::pi(work);
    let prefactor = &pi / ((&nu_w * &pi).sin() * 2);
    let two = Real::from_i64(2, work);
    let mut even_coeffs = Vec::new();
    let mut even_exact = Vec::new();
    let mut j = 0u32;
    while 2 * j <= order {
        let denom = Real::from_float(rug::Float::with_val(work, &factorial(j)))
            * gamma_at(&(Real::from_i64(i64::from(j) + 1, work) - &nu_w), work)?;
        let c = &prefactor * two.pow(&(&nu_w - i64::from(2 * j))) / denom;
        even_coeffs.push(c.with_prec(prec));
        even_exact.push(None);
        j += 1;
    }
    let mut non_even = Vec::new();
    let mut j = 0u32;
    loop {
        let exponent = &nu_w * 2 + i64::from(2 * j);
        if exponent.to_f64() > order as f64 {
            break;
        }
        let denom = Real::from_float(rug::Float::with_val(work, &factorial(j)))
            * gamma_at(&(Real::from_i64(i64::from(j) + 1, work) + &nu_w), work)?;
        let c = -(&prefactor * two.pow(&(-&nu_w - i64::from(2 * j))) / denom);
        non_even.push(SeriesTerm {
            exponent: exponent.with_prec(prec),
            has_log: false,
            coeff: c.with_prec(prec),
            exact: None,
        });
        j += 1;
    }
    Ok(SeriesExpansion { even_coeffs, even_exact, non_even, truncation_order: order + 1 })
}

/// `exp(-r²) = Σ_j (-1)^j r^{2j} / j!`, purely even.
pub fn gaussian_series(order: u32, prec: u32) -> SeriesExpansion {
    let mut even_coeffs = Vec::new();
    let mut even_exact = Vec::new();
    let mut j = 0u32;
    while 2 * j <= order {
        let mut c = Rational::from((Integer::from(1), factorial(j)));
        if j % 2 == 1 {
            c = -c;
        }
        even_coeffs.push(Real::from_rational(&c, prec));
        even_exact.push(Some(c));
        j += 1;
    }
    SeriesExpansion { even_coeffs, even_exact, non_even: Vec::new(), truncation_order: 2 * j }
}
