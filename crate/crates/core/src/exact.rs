//! Exact rational scalars shared by every module.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

pub type Rational = num_rational::BigRational;

/// `num/den` as an exact rational. Panics on a zero denominator.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// Canonical text form: `p/q` in lowest terms, or `p` when the denominator is 1.
pub fn fmt(r: &Rational) -> String {
    r.to_string()
}

/// Parses `p/q`, an integer, or a finite decimal such as `-0.25`.
pub fn parse(s: &str) -> Result<Rational, String> {
    let t = s.trim();
    if t.is_empty() {
        return Err("empty rational literal".into());
    }
    if let Some((n, d)) = t.split_once('/') {
        let num: BigInt = n
            .trim()
            .parse()
            .map_err(|_| format!("bad numerator in `{s}`"))?;
        let den: BigInt = d
            .trim()
            .parse()
            .map_err(|_| format!("bad denominator in `{s}`"))?;
        if den.is_zero() {
            return Err(format!("zero denominator in `{s}`"));
        }
        return Ok(Rational::new(num, den));
    }
    if let Some((whole, frac)) = t.split_once('.') {
        let neg = whole.starts_with('-');
        let digits = format!("{}{}", whole.trim_start_matches(['-', '+']), frac);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(format!("bad decimal literal `{s}`"));
        }
        let num: BigInt = digits.parse().map_err(|_| format!("bad decimal `{s}`"))?;
        let den = num_traits::pow(BigInt::from(10), frac.len());
        let r = Rational::new(num, den);
        return Ok(if neg { -r } else { r });
    }
    t.parse::<BigInt>()
        .map(Rational::from_integer)
        .map_err(|_| format!("bad rational literal `{s}`"))
}

pub fn nat(n: u64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn is_one(r: &Rational) -> bool {
    r.is_one()
}

pub fn abs(r: &Rational) -> Rational {
    r.abs()
}

/// Smallest integer `n` with `n >= r`.
pub fn ceil_u64(r: &Rational) -> Option<u64> {
    let c = r.ceil().to_integer();
    if c.is_negative() {
        return Some(0);
    }
    u64::try_from(c).ok()
}
