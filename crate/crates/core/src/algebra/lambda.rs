use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::multipoly::write_signed_term;
use super::rational::{binomial, Rational};

/// Dense univariate polynomial in a formal weight variable.
///
/// `coeffs[k]` is the coefficient of the k-th power; trailing zeros are
/// stripped so the zero polynomial has no coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct LambdaPoly {
    coeffs: Vec<Rational>,
}

impl LambdaPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        LambdaPoly { coeffs }
    }

    pub fn zero() -> Self {
        LambdaPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// `a + b*w`.
    pub fn linear(a: Rational, b: Rational) -> Self {
        Self::new(vec![a, b])
    }

    /// The variable itself.
    pub fn var() -> Self {
        Self::linear(Rational::zero(), Rational::one())
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, at: &Rational) -> Rational {
        self.coeffs.iter().rev().fold(Rational::zero(), |acc, c| acc * at + c)
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * factor).collect())
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::one(), |acc, _| &acc * self)
    }

    /// `Q(u) = P(u + shift)`: the coefficients of `P` re-expanded in powers
    /// of `(w - shift)`.
    pub fn taylor_shift(&self, shift: &Rational) -> Self {
        let n = self.coeffs.len();
        let mut out = vec![Rational::zero(); n];
        for (k, c) in self.coeffs.iter().enumerate() {
            // c * (u + s)^k
            let mut s_pow = Rational::one();
            for j in (0..=k).rev() {
                let b = Rational::from_integer(binomial(k as u32, j as u32));
                out[j] += c * &b * &s_pow;
                s_pow *= shift;
            }
        }
        Self::new(out)
    }

    /// `P(1 - w)`, the image of `P(w)` under the canonical adjoint.
    pub fn reflect(&self) -> Self {
        // P(1 - w) = Q(-w) with Q(u) = P(u + 1)
        let q = self.taylor_shift(&Rational::one());
        Self::new(q.coeffs.into_iter().enumerate().map(|(k, c)| if k % 2 == 1 { -c } else { c }).collect())
    }

    /// Formats with the given variable name, e.g. `2*w^2 - w + 1`.
    pub fn display_with(&self, var: &str) -> String {
        if self.coeffs.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        let mut leading = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            write_signed_term(&mut out, c, leading, &|b: &mut String| match k {
                0 => false,
                1 => {
                    b.push_str(var);
                    true
                }
                _ => {
                    b.push_str(&format!("{var}^{k}"));
                    true
                }
            })
            .expect("writing to a String cannot fail");
            leading = false;
        }
        out
    }
}

impl Add for &LambdaPoly {
    type Output = LambdaPoly;
    fn add(self, rhs: &LambdaPoly) -> LambdaPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        LambdaPoly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &LambdaPoly {
    type Output = LambdaPoly;
    fn sub(self, rhs: &LambdaPoly) -> LambdaPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        LambdaPoly::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &LambdaPoly {
    type Output = LambdaPoly;
    fn mul(self, rhs: &LambdaPoly) -> LambdaPoly {
        if self.is_zero() || rhs.is_zero() {
            return LambdaPoly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        LambdaPoly::new(out)
    }
}

impl Neg for &LambdaPoly {
    type Output = LambdaPoly;
    fn neg(self) -> LambdaPoly {
        LambdaPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl fmt::Display for LambdaPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with("l"))
    }
}

impl fmt::Debug for LambdaPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LambdaPoly({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::{int, rat};

    #[test]
    fn trailing_zeros_are_stripped() {
        let p = LambdaPoly::new(vec![int(1), int(0), int(0)]);
        assert_eq!(p.degree(), Some(0));
        assert_eq!(LambdaPoly::new(vec![int(0)]).degree(), None);
    }

    #[test]
    fn shift_and_reflect() {
        // w^2 - w = (w - 1/2)^2 - 1/4
        let p = LambdaPoly::new(vec![int(0), int(-1), int(1)]);
        assert_eq!(p.taylor_shift(&rat(1, 2)).coeffs(), &[rat(-1, 4), int(0), int(1)]);
        assert_eq!(p.reflect(), p);
        let q = LambdaPoly::linear(int(-1), int(2));
        assert_eq!(q.reflect(), -&q);
    }

    #[test]
    fn display() {
        let p = LambdaPoly::new(vec![int(1), int(-1), int(2)]);
        assert_eq!(p.display_with("w"), "2*w^2 - w + 1");
        assert_eq!(p.eval(&int(2)), int(7));
    }
}
