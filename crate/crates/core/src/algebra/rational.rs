use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Exact rational number, always kept in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
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

/// Parses `int` or `int/uint` (optional leading sign, surrounding whitespace
/// ignored). Decimal notation is rejected.
pub fn parse_rational(src: &str) -> Result<Rational> {
    let s = src.trim();
    let bad = |msg: &str| Error::parse(1, 1, format!("{msg}: {src:?}"));
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (s, None),
    };
    let numer = parse_int(num).ok_or_else(|| bad("invalid rational"))?;
    let denom = match den {
        Some(d) => {
            if d.starts_with(['+', '-']) {
                return Err(bad("denominator must be unsigned"));
            }
            parse_int(d).ok_or_else(|| bad("invalid rational"))?
        }
        None => BigInt::one(),
    };
    if denom.is_zero() {
        return Err(bad("zero denominator"));
    }
    Ok(Rational::new(numer, denom))
}

fn parse_int(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix(['+', '-']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

/// `n!` as a rational.
pub fn factorial(n: usize) -> Rational {
    (1..=n).fold(one(), |acc, k| acc * int(k as i64))
}

/// Binomial coefficient `C(n, k)`.
pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Least common multiple of the denominators of `values`.
pub(crate) fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    use num_integer::Integer;
    values.into_iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

pub(crate) fn is_negative(r: &Rational) -> bool {
    r.is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rational("3/2").unwrap(), rat(3, 2));
        assert_eq!(parse_rational("-4/6").unwrap(), rat(-2, 3));
        assert_eq!(parse_rational(" 7 ").unwrap(), int(7));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("0.5").is_err());
        assert!(parse_rational("1/-2").is_err());
        assert!(parse_rational("").is_err());
        assert!(parse_rational("/3").is_err());
    }

    #[test]
    fn display_is_reduced() {
        assert_eq!(rat(6, -4).to_string(), "-3/2");
        assert_eq!(rat(4, 2).to_string(), "2");
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), BigInt::from(10));
        assert_eq!(binomial(4, 0), BigInt::from(1));
        assert_eq!(binomial(3, 4), BigInt::from(0));
    }
}
