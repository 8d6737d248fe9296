use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::exponents::Exponents;
use super::rational::{int, Rational};
use crate::error::{Error, Result};

/// Sparse multivariate polynomial in `x1..xd` with exact rational
/// coefficients.
///
/// Zero coefficients are never stored, so structural equality is
/// mathematical equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiPoly {
    dim: usize,
    terms: BTreeMap<Exponents, Rational>,
}

/// Binary ring operation selector for [`poly_arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PolyOp {
    Add,
    Sub,
    Mul,
}

/// Checked ring arithmetic; fails when the operands live in different
/// dimensions.
pub fn poly_arith(a: &MultiPoly, b: &MultiPoly, op: PolyOp) -> Result<MultiPoly> {
    a.check_dim(b.dim)?;
    Ok(match op {
        PolyOp::Add => a + b,
        PolyOp::Sub => a - b,
        PolyOp::Mul => a * b,
    })
}

impl MultiPoly {
    pub fn zero(dim: usize) -> Self {
        MultiPoly { dim, terms: BTreeMap::new() }
    }

    pub fn constant(dim: usize, c: Rational) -> Self {
        let mut p = Self::zero(dim);
        p.add_term(Exponents::zero(dim), c);
        p
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, Rational::one())
    }

    /// The coordinate function `x_{axis+1}` (axes are 0-based).
    pub fn var(dim: usize, axis: usize) -> Self {
        assert!(axis < dim, "axis {axis} out of range for dimension {dim}");
        let mut p = Self::zero(dim);
        p.add_term(Exponents::unit(dim, axis), Rational::one());
        p
    }

    pub fn monomial(exps: Exponents, c: Rational) -> Self {
        let mut p = Self::zero(exps.dim());
        p.add_term(exps, c);
        p
    }

    pub fn from_terms(dim: usize, terms: impl IntoIterator<Item = (Exponents, Rational)>) -> Self {
        let mut p = Self::zero(dim);
        for (e, c) in terms {
            assert_eq!(e.dim(), dim, "exponent vector has wrong length");
            p.add_term(e, c);
        }
        p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Exponents::is_zero)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Exponents, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exps: &Exponents) -> Rational {
        self.terms.get(exps).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coeff(&Exponents::zero(self.dim))
    }

    /// Total degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(Exponents::degree).max()
    }

    pub fn add_term(&mut self, exps: Exponents, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_assign_scaled(&mut self, other: &MultiPoly, factor: &Rational) {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        if factor.is_zero() {
            return;
        }
        for (e, c) in &other.terms {
            self.add_term(e.clone(), c * factor);
        }
    }

    pub fn scale(&self, factor: &Rational) -> MultiPoly {
        if factor.is_zero() {
            return MultiPoly::zero(self.dim);
        }
        MultiPoly { dim: self.dim, terms: self.terms.iter().map(|(e, c)| (e.clone(), c * factor)).collect() }
    }

    pub fn pow(&self, n: u32) -> MultiPoly {
        (0..n).fold(MultiPoly::one(self.dim), |acc, _| &acc * self)
    }

    pub(crate) fn check_dim(&self, other: usize) -> Result<()> {
        if self.dim == other {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected: self.dim, found: other })
        }
    }

    /// Formal partial derivative along `axis` (0-based).
    pub fn partial(&self, axis: usize) -> Result<MultiPoly> {
        if axis >= self.dim {
            return Err(Error::AxisOutOfRange { axis: axis + 1, dim: self.dim });
        }
        Ok(self.diff(axis))
    }

    /// Like [`MultiPoly::partial`] but panics on an out-of-range axis.
    pub fn diff(&self, axis: usize) -> MultiPoly {
        assert!(axis < self.dim, "axis {axis} out of range for dimension {}", self.dim);
        let mut out = MultiPoly::zero(self.dim);
        for (e, c) in &self.terms {
            let k = e.get(axis);
            if k == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2.set(axis, k - 1);
            out.add_term(e2, c * int(k as i64));
        }
        out
    }

    /// Mixed derivative `d^alpha`.
    pub fn diff_multi(&self, alpha: &Exponents) -> MultiPoly {
        let mut out = self.clone();
        for axis in alpha.axes() {
            if out.is_zero() {
                break;
            }
            out = out.diff(axis);
        }
        out
    }

    pub fn eval(&self, point: &[Rational]) -> Rational {
        assert_eq!(point.len(), self.dim);
        let mut acc = Rational::zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (x, &k) in point.iter().zip(e.as_slice()) {
                for _ in 0..k {
                    term *= x;
                }
            }
            acc += term;
        }
        acc
    }

    /// Lifts into a larger dimension by appending unused variables.
    pub fn embed(&self, dim: usize) -> MultiPoly {
        assert!(dim >= self.dim);
        MultiPoly::from_terms(
            dim,
            self.terms.iter().map(|(e, c)| {
                let mut v = e.as_slice().to_vec();
                v.resize(dim, 0);
                (Exponents::from_slice(&v), c.clone())
            }),
        )
    }
}

impl Add for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        out.add_assign_scaled(rhs, &Rational::one());
        out
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        out.add_assign_scaled(rhs, &-Rational::one());
        out
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let mut out = MultiPoly::zero(self.dim);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                out.add_term(ea.add(eb), ca * cb);
            }
        }
        out
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        self.scale(&-Rational::one())
    }
}

macro_rules! forward_owned {
    ($($tr:ident :: $m:ident),*) => {$(
        impl $tr for MultiPoly {
            type Output = MultiPoly;
            fn $m(self, rhs: MultiPoly) -> MultiPoly { (&self).$m(&rhs) }
        }
    )*};
}
forward_owned!(Add::add, Sub::sub, Mul::mul);

impl Neg for MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        -&self
    }
}

/// Writes a monomial body such as `x1^2*x3`; returns false for the constant
/// monomial.
pub(crate) fn write_monomial(
    f: &mut impl fmt::Write,
    exps: &Exponents,
    prefix: &str,
) -> std::result::Result<bool, fmt::Error> {
    let mut first = true;
    for (axis, &k) in exps.as_slice().iter().enumerate() {
        if k == 0 {
            continue;
        }
        if !first {
            f.write_char('*')?;
        }
        first = false;
        write!(f, "{prefix}{}", axis + 1)?;
        if k > 1 {
            write!(f, "^{k}")?;
        }
    }
    Ok(!first)
}

/// Writes `coeff * body` as one signed summand. `leading` controls whether
/// the sign is written as `-` or ` - `/` + `.
pub(crate) fn write_signed_term(
    f: &mut impl fmt::Write,
    coeff: &Rational,
    leading: bool,
    body: &dyn Fn(&mut String) -> bool,
) -> fmt::Result {
    let negative = super::rational::is_negative(coeff);
    let magnitude = if negative { -coeff.clone() } else { coeff.clone() };
    match (leading, negative) {
        (true, true) => f.write_char('-')?,
        (true, false) => {}
        (false, true) => f.write_str(" - ")?,
        (false, false) => f.write_str(" + ")?,
    }
    let mut b = String::new();
    let has_body = body(&mut b);
    if !has_body {
        write!(f, "{magnitude}")
    } else if magnitude.is_one() {
        f.write_str(&b)
    } else {
        write!(f, "{magnitude}*{b}")
    }
}

impl fmt::Display for MultiPoly {
    /// Terms in descending graded-lex order, e.g. `3/2*x1^2*x2 - x3`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut out = String::new();
        for (i, (e, c)) in self.terms.iter().rev().enumerate() {
            write_signed_term(&mut out, c, i == 0, &|b: &mut String| write_monomial(b, e, "x").unwrap_or(false))?;
        }
        f.write_str(&out)
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiPoly[d={}]({})", self.dim, self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::rat;

    fn x(dim: usize, i: usize) -> MultiPoly {
        MultiPoly::var(dim, i)
    }

    #[test]
    fn difference_of_squares() {
        let one = MultiPoly::one(1);
        let p = &(&x(1, 0) + &one) * &(&x(1, 0) - &one);
        assert_eq!(p.to_string(), "x1^2 - 1");
    }

    #[test]
    fn multiplication_by_zero() {
        let p = &x(2, 0) + &x(2, 1);
        assert!((&p * &MultiPoly::zero(2)).is_zero());
    }

    #[test]
    fn cancellation_prunes() {
        let x1 = x(2, 0);
        let x2 = x(2, 1);
        let a = &(&(&x1 * &x1) * &x2) + &x2.scale(&rat(3, 2));
        let b = x2.scale(&rat(-3, 2));
        let s = &a + &b;
        assert_eq!(s, &(&x1 * &x1) * &x2);
        assert_eq!(s.len(), 1);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let err = poly_arith(&x(1, 0), &x(2, 0), PolyOp::Add).unwrap_err();
        assert_eq!(err.code(), "E_DIM");
    }

    #[test]
    fn partial_derivatives() {
        let x1 = x(2, 0);
        let x2 = x(2, 1);
        let p = &(&x1 * &x1) * &x2;
        assert_eq!(p.partial(0).unwrap(), (&x1 * &x2).scale(&rat(2, 1)));
        assert!(x1.pow(3).partial(1).unwrap().is_zero());
        let q = x(1, 0).scale(&rat(5, 3));
        assert_eq!(q.partial(0).unwrap(), MultiPoly::constant(1, rat(5, 3)));
        assert_eq!(p.partial(2).unwrap_err().code(), "E_DIM");
    }

    #[test]
    fn display_ordering() {
        let x1 = x(3, 0);
        let x2 = x(3, 1);
        let x3 = x(3, 2);
        let p = &(&(&x1 * &x1) * &x2).scale(&rat(3, 2)) - &x3;
        assert_eq!(p.to_string(), "3/2*x1^2*x2 - x3");
        assert_eq!((-&x3).to_string(), "-x3");
        assert_eq!(MultiPoly::constant(1, rat(-1, 2)).to_string(), "-1/2");
    }
}
