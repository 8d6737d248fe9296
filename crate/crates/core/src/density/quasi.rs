use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use crate::algebra::{MultiPoly, Rational};
use crate::error::{Error, Result};

use super::operator::DensityOperator;

/// Finite sum of homogeneous densities `s |vol|^lam` with distinct weights.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QuasiDensity {
    dim: usize,
    parts: BTreeMap<Rational, MultiPoly>,
}

impl QuasiDensity {
    pub fn zero(dim: usize) -> Self {
        QuasiDensity { dim, parts: BTreeMap::new() }
    }

    /// The unit: the constant function 1 of weight 0.
    pub fn unit(dim: usize) -> Self {
        Self::homogeneous(MultiPoly::one(dim), Rational::zero())
    }

    pub fn homogeneous(s: MultiPoly, weight: Rational) -> Self {
        let mut out = Self::zero(s.dim());
        out.add_part(weight, s);
        out
    }

    pub fn from_parts(dim: usize, parts: impl IntoIterator<Item = (Rational, MultiPoly)>) -> Result<Self> {
        let mut out = Self::zero(dim);
        for (w, s) in parts {
            s.check_dim(dim)?;
            out.add_part(w, s);
        }
        Ok(out)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.parts.is_empty()
    }

    /// Components in increasing weight.
    pub fn parts(&self) -> impl Iterator<Item = (&Rational, &MultiPoly)> {
        self.parts.iter()
    }

    pub fn part(&self, weight: &Rational) -> MultiPoly {
        self.parts.get(weight).cloned().unwrap_or_else(|| MultiPoly::zero(self.dim))
    }

    pub fn add_part(&mut self, weight: Rational, s: MultiPoly) {
        debug_assert_eq!(s.dim(), self.dim);
        if s.is_zero() {
            return;
        }
        let sum = match self.parts.remove(&weight) {
            Some(prev) => &prev + &s,
            None => s,
        };
        if !sum.is_zero() {
            self.parts.insert(weight, sum);
        }
    }

    pub fn add(&self, other: &QuasiDensity) -> Result<QuasiDensity> {
        self.check_dim(other.dim)?;
        let mut out = self.clone();
        for (w, s) in &other.parts {
            out.add_part(w.clone(), s.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> QuasiDensity {
        let mut out = Self::zero(self.dim);
        for (w, s) in &self.parts {
            out.add_part(w.clone(), s.scale(c));
        }
        out
    }

    /// Product of densities: weights add, coefficients multiply.
    pub fn mul(&self, other: &QuasiDensity) -> Result<QuasiDensity> {
        self.check_dim(other.dim)?;
        let mut out = Self::zero(self.dim);
        for (wa, a) in &self.parts {
            for (wb, b) in &other.parts {
                out.add_part(wa + wb, a * b);
            }
        }
        Ok(out)
    }

    fn check_dim(&self, other: usize) -> Result<()> {
        if self.dim == other {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected: self.dim, found: other })
        }
    }
}

/// Long bracket `{f, g}_A = A(fg) - f A(g) - g A(f)` of a normalized
/// operator (`A(1) = 0`).
pub fn long_bracket(a: &DensityOperator, f: &QuasiDensity, g: &QuasiDensity) -> Result<QuasiDensity> {
    let a1 = a.apply_to_unit();
    if !a1.is_zero() {
        return Err(Error::Normalization(a1.to_string()));
    }
    let minus_one = -Rational::from_integer(1.into());
    let out = a.apply(&f.mul(g)?)?;
    let out = out.add(&f.mul(&a.apply(g)?)?.scale(&minus_one))?;
    out.add(&a.apply(f)?.mul(g)?.scale(&minus_one))
}

impl fmt::Display for QuasiDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return f.write_str("0");
        }
        for (i, (w, s)) in self.parts.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({s})|vol|^({w})")?;
        }
        Ok(())
    }
}

impl fmt::Debug for QuasiDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QuasiDensity[d={}]({})", self.dim, self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::{int, rat};

    #[test]
    fn apply_acts_per_weight() {
        // (d1 + w) on x1^2 |vol|^(1/2) + x1 |vol|^0
        let a = &DensityOperator::partial(1, 0) + &DensityOperator::weight(1);
        let x = MultiPoly::var(1, 0);
        let q = QuasiDensity::from_parts(1, [(rat(1, 2), x.pow(2)), (int(0), x.clone())]).unwrap();
        let out = a.apply(&q).unwrap();
        assert_eq!(out.part(&rat(1, 2)), &x.scale(&int(2)) + &x.pow(2).scale(&rat(1, 2)));
        assert_eq!(out.part(&int(0)), MultiPoly::one(1));
    }

    #[test]
    fn weights_add_under_product() {
        let x = MultiPoly::var(1, 0);
        let a = QuasiDensity::homogeneous(x.clone(), rat(1, 3));
        let b = QuasiDensity::homogeneous(x.clone(), rat(1, 6));
        assert_eq!(a.mul(&b).unwrap(), QuasiDensity::homogeneous(x.pow(2), rat(1, 2)));
    }

    #[test]
    fn first_order_operators_have_vanishing_long_bracket() {
        let x = MultiPoly::var(1, 0);
        let a = &(&DensityOperator::multiplication(x.clone()) * &DensityOperator::partial(1, 0))
            + &DensityOperator::weight(1);
        let f = QuasiDensity::homogeneous(x.pow(3), rat(1, 2));
        let g = QuasiDensity::homogeneous(&x + &MultiPoly::one(1), rat(-1, 3));
        assert!(long_bracket(&a, &f, &g).unwrap().is_zero());
    }

    #[test]
    fn long_bracket_of_second_derivative() {
        let s = int(3);
        let a = DensityOperator::partial(1, 0).compose(&DensityOperator::partial(1, 0)).unwrap().scale(&s);
        let f = QuasiDensity::homogeneous(MultiPoly::var(1, 0), int(0));
        let out = long_bracket(&a, &f, &f).unwrap();
        assert_eq!(out, QuasiDensity::homogeneous(MultiPoly::constant(1, int(6)), int(0)));
        assert!(long_bracket(&a, &QuasiDensity::unit(1), &f).unwrap().is_zero());
    }

    #[test]
    fn long_bracket_requires_normalization() {
        let a = DensityOperator::constant(1, int(2));
        let f = QuasiDensity::unit(1);
        assert_eq!(long_bracket(&a, &f, &f).unwrap_err().code(), "E_DOMAIN");
    }
}
