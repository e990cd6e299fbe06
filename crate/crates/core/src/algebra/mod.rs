//! Exact arithmetic: rationals, polynomials in λ, affine maps, and the
//! translation-expression parser.

mod affine;
mod parse;
mod poly;

pub use affine::{Affine, DimensionMismatch};
pub use parse::{parse_expr, SyntaxError};
pub use poly::LambdaPoly;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Arbitrary-precision rational in canonical form.
pub type Rational = num_rational::BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `p` or `p/q`; the denominator must be positive and nonzero.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num: BigInt = num.parse().ok()?;
    let den: BigInt = den.parse().ok()?;
    if den.is_zero() || den.is_negative() {
        return None;
    }
    Some(Rational::new(num, den))
}

pub fn pow(base: &Rational, exp: usize) -> Rational {
    let mut acc = Rational::one();
    for _ in 0..exp {
        acc *= base;
    }
    acc
}

/// Returns `k` with `value == base^k`, searching `k` in `0..=max_exp`.
///
/// `base` must lie strictly between 0 and 1. Division by `base` is exact,
/// so the search either hits 1 or overshoots it.
pub fn exact_log(value: &Rational, base: &Rational, max_exp: usize) -> Option<usize> {
    if !value.is_positive() {
        return None;
    }
    let mut current = value.clone();
    for k in 0..=max_exp {
        if current.is_one() {
            return Some(k);
        }
        if current > Rational::one() {
            return None;
        }
        current /= base;
    }
    None
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        // huge numerator/denominator: scale both down
        let n = q.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = q.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

/// Decimal rendering of an exact rational, rounded half-up to `sig`
/// significant digits, trailing zeros trimmed.
pub fn to_decimal(q: &Rational, sig: usize) -> String {
    if q.is_zero() {
        return "0".to_string();
    }
    let negative = q.is_negative();
    let q = q.abs();
    let ten = BigInt::from(10);
    // exponent e with 10^e <= q < 10^(e+1)
    let mut e: i64 = q.numer().to_string().len() as i64 - q.denom().to_string().len() as i64;
    let ten_pow = |k: i64| -> Rational {
        if k >= 0 {
            Rational::from_integer(num_traits::pow(ten.clone(), k as usize))
        } else {
            Rational::new(BigInt::one(), num_traits::pow(ten.clone(), (-k) as usize))
        }
    };
    while q >= ten_pow(e + 1) {
        e += 1;
    }
    while q < ten_pow(e) {
        e -= 1;
    }
    // scaled = q * 10^(sig-1-e), round to integer
    let shift = sig as i64 - 1 - e;
    let scaled = &q * ten_pow(shift);
    let two = Rational::from_integer(BigInt::from(2));
    let rounded = (scaled + Rational::one() / two).floor().to_integer();
    let mut digits = rounded.to_string();
    let mut shift = shift;
    if digits.len() > sig {
        // rounding carried into a new digit (e.g. 9.99.. -> 10.0)
        digits.pop();
        shift -= 1;
    }
    let body = if shift <= 0 {
        let mut s = digits;
        s.extend(std::iter::repeat('0').take((-shift) as usize));
        s
    } else {
        let shift = shift as usize;
        let (int_part, frac_part) = if digits.len() > shift {
            let split = digits.len() - shift;
            (digits[..split].to_string(), digits[split..].to_string())
        } else {
            let pad = "0".repeat(shift - digits.len());
            ("0".to_string(), format!("{pad}{digits}"))
        };
        let frac = frac_part.trim_end_matches('0');
        if frac.is_empty() {
            int_part
        } else {
            format!("{int_part}.{frac}")
        }
    };
    if negative {
        format!("-{body}")
    } else {
        body
    }
}

/// Rational bracket `(lo, hi)` with `lo² ≤ q ≤ hi²`, `q ≥ 0`.
///
/// Exact when `q` is the square of a rational; otherwise the bracket has
/// width at most `2^-bits` times the square root.
pub fn sqrt_bracket(q: &Rational, bits: u32) -> (Rational, Rational) {
    assert!(!q.is_negative(), "sqrt of a negative rational");
    if q.is_zero() {
        return (Rational::zero(), Rational::zero());
    }
    let (n, d) = (q.numer(), q.denom());
    let (rn, rd) = (num_integer::Roots::sqrt(n), num_integer::Roots::sqrt(d));
    if &(&rn * &rn) == n && &(&rd * &rd) == d {
        let r = Rational::new(rn, rd);
        return (r.clone(), r);
    }
    // floor(sqrt(n * d * 4^bits)) / (d * 2^bits)
    let scale = BigInt::one() << (2 * bits as usize);
    let root = num_integer::Roots::sqrt(&(n * d * scale));
    let den = d * (BigInt::one() << bits as usize);
    let lo = Rational::new(root.clone(), den.clone());
    let hi = Rational::new(root + 1, den);
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_rendering() {
        assert_eq!(to_decimal(&rat(5, 36), 12), "0.138888888889");
        assert_eq!(to_decimal(&rat(1, 2), 12), "0.5");
        assert_eq!(to_decimal(&rat(-3, 1), 12), "-3");
        assert_eq!(to_decimal(&rat(1, 1_000_000), 12), "0.000001");
        assert_eq!(to_decimal(&rat(2, 3), 3), "0.667");
        assert_eq!(to_decimal(&rat(9999, 1000), 3), "10");
        assert_eq!(to_decimal(&rat(12345, 1), 3), "12300");
        assert_eq!(to_decimal(&int(0), 12), "0");
    }

    #[test]
    fn exact_log_detects_powers() {
        let l = rat(1, 6);
        assert_eq!(exact_log(&rat(1, 36), &l, 64), Some(2));
        assert_eq!(exact_log(&rat(1, 12), &l, 64), None);
        assert_eq!(exact_log(&int(1), &l, 64), Some(0));
        assert_eq!(exact_log(&int(0), &l, 64), None);
        assert_eq!(exact_log(&pow(&l, 70), &l, 64), None);
    }

    #[test]
    fn sqrt_bracket_is_exact_on_squares() {
        let (lo, hi) = sqrt_bracket(&rat(25, 36), 40);
        assert_eq!(lo, rat(5, 6));
        assert_eq!(hi, rat(5, 6));
        let (lo, hi) = sqrt_bracket(&int(2), 40);
        assert!(&lo * &lo <= int(2) && &hi * &hi >= int(2));
        assert!(to_f64(&(hi - lo)) < 1e-11);
    }

    #[test]
    fn parse_rational_literals() {
        assert_eq!(parse_rational("1/6"), Some(rat(1, 6)));
        assert_eq!(parse_rational(" 3 "), Some(int(3)));
        assert_eq!(parse_rational("2/4"), Some(rat(1, 2)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
    }
}
