use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_traits::{One, Zero};

use crate::algebra::{write_monomial, write_signed_term, Exponents, LambdaPoly, MultiPoly, Rational};
use crate::density::{DensityOperator, TermKey, VectorField};
use crate::error::{Error, Result};

/// Polynomial on the cotangent bundle: `sum S_gamma(x) p^gamma` with the
/// momenta `p_i` (the fibre coordinates `xi_i`).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SymbolPoly {
    dim: usize,
    terms: BTreeMap<Exponents, MultiPoly>,
}

impl SymbolPoly {
    pub fn zero(dim: usize) -> Self {
        SymbolPoly { dim, terms: BTreeMap::new() }
    }

    pub fn monomial(coeff: MultiPoly, xi: Exponents) -> Self {
        let mut out = Self::zero(coeff.dim());
        out.add_term(xi, coeff);
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms from the highest momentum degree down.
    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &MultiPoly)> {
        self.terms.iter().rev()
    }

    pub fn coefficient(&self, xi: &Exponents) -> MultiPoly {
        self.terms.get(xi).cloned().unwrap_or_else(|| MultiPoly::zero(self.dim))
    }

    pub fn add_term(&mut self, xi: Exponents, coeff: MultiPoly) {
        debug_assert_eq!(coeff.dim(), self.dim);
        if coeff.is_zero() {
            return;
        }
        let sum = match self.terms.remove(&xi) {
            Some(prev) => &prev + &coeff,
            None => coeff,
        };
        if !sum.is_zero() {
            self.terms.insert(xi, sum);
        }
    }

    /// Degree in the momenta, `None` for zero.
    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().next_back().map(Exponents::degree)
    }

    /// Component of momentum degree exactly `k`.
    pub fn homogeneous_part(&self, k: usize) -> SymbolPoly {
        SymbolPoly {
            dim: self.dim,
            terms: self.terms.iter().filter(|(e, _)| e.degree() == k).map(|(e, c)| (e.clone(), c.clone())).collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> SymbolPoly {
        if c.is_zero() {
            return Self::zero(self.dim);
        }
        SymbolPoly { dim: self.dim, terms: self.terms.iter().map(|(e, p)| (e.clone(), p.scale(c))).collect() }
    }

    /// Naive symbol of a `w`-free operator: `d^alpha` becomes `p^alpha`.
    pub fn naive(op: &DensityOperator) -> Result<SymbolPoly> {
        op.require_weight_free()?;
        let mut out = Self::zero(op.dim());
        for (k, c) in op.terms() {
            out.add_term(k.alpha.clone(), c.clone());
        }
        Ok(out)
    }

    /// Naive quantization: `S(x) p^alpha` becomes `S(x) d^alpha`.
    pub fn naive_quantize(&self) -> DensityOperator {
        let mut out = DensityOperator::zero(self.dim);
        for (e, c) in &self.terms {
            out.add_term(TermKey { alpha: e.clone(), wpow: 0 }, c.clone());
        }
        out
    }

    /// Contraction `D = sum_j d/dx_j d/dp_j`.
    pub fn contract(&self) -> SymbolPoly {
        let mut out = Self::zero(self.dim);
        for (e, c) in &self.terms {
            for j in 0..self.dim {
                let ej = e.get(j);
                if ej == 0 {
                    continue;
                }
                let dc = c.diff(j);
                if dc.is_zero() {
                    continue;
                }
                let mut lower = e.clone();
                lower.set(j, ej - 1);
                out.add_term(lower, dc.scale(&Rational::from_integer(ej.into())));
            }
        }
        out
    }

    /// Normalized iterated contraction `T_r(s) = (k - r)!/k! D^r s` of a
    /// symbol homogeneous of degree `k`.
    pub fn normalized_contraction(&self, k: usize, r: usize) -> SymbolPoly {
        debug_assert!(r <= k);
        let mut s = self.clone();
        let mut factor = Rational::one();
        for j in 0..r {
            s = s.contract();
            factor /= Rational::from_integer(((k - j) as u64).into());
        }
        s.scale(&factor)
    }

    /// Multiplies by `p(w)` and quantizes naively: `p(w) N(self)`.
    pub(crate) fn quantize_with(&self, weight: &LambdaPoly) -> DensityOperator {
        self.naive_quantize().weight_mul(weight)
    }

    fn check_dim(&self, other: usize) -> Result<()> {
        if self.dim == other {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected: self.dim, found: other })
        }
    }
}

/// Lie derivative of a symmetric contravariant tensor, written as the
/// Poisson bracket with `K^i p_i`:
/// `K^i d_{x^i} s - (d_j K^i) p_i d_{p_j} s`.
pub fn symbol_lie(k: &VectorField, s: &SymbolPoly) -> Result<SymbolPoly> {
    s.check_dim(k.dim())?;
    let dim = s.dim;
    let mut out = SymbolPoly::zero(dim);
    for (e, c) in &s.terms {
        out.add_term(e.clone(), k.derive(c));
        for j in 0..dim {
            let ej = e.get(j);
            if ej == 0 {
                continue;
            }
            let mut lower = e.clone();
            lower.set(j, ej - 1);
            let mult = Rational::from_integer(ej.into());
            for (i, ki) in k.components().iter().enumerate() {
                let dki = ki.diff(j);
                if dki.is_zero() {
                    continue;
                }
                let mut raised = lower.clone();
                raised.set(i, raised.get(i) + 1);
                out.add_term(raised, (&dki * c).scale(&-mult.clone()));
            }
        }
    }
    Ok(out)
}

impl Add for &SymbolPoly {
    type Output = SymbolPoly;
    fn add(self, rhs: &SymbolPoly) -> SymbolPoly {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl Sub for &SymbolPoly {
    type Output = SymbolPoly;
    fn sub(self, rhs: &SymbolPoly) -> SymbolPoly {
        self + &(-rhs)
    }
}

impl Neg for &SymbolPoly {
    type Output = SymbolPoly;
    fn neg(self) -> SymbolPoly {
        self.scale(&-Rational::one())
    }
}

impl fmt::Display for SymbolPoly {
    /// Expanded form with momenta `p1..pd`, e.g. `x1*p1^2 - 2*p1 + 1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut out = String::new();
        let mut leading = true;
        for (xi, c) in self.terms.iter().rev() {
            for (e, coeff) in c.terms().rev() {
                write_signed_term(&mut out, coeff, leading, &|b: &mut String| {
                    let any = write_monomial(b, e, "x").unwrap_or(false);
                    if xi.is_zero() {
                        return any;
                    }
                    if any {
                        b.push('*');
                    }
                    write_monomial(b, xi, "p").unwrap_or(false)
                })?;
                leading = false;
            }
        }
        f.write_str(&out)
    }
}

impl fmt::Debug for SymbolPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SymbolPoly[d={}]({})", self.dim, self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::int;

    fn x(dim: usize, i: usize) -> MultiPoly {
        MultiPoly::var(dim, i)
    }

    #[test]
    fn lie_derivative_examples() {
        let p1 = Exponents::unit(1, 0);
        let s = SymbolPoly::monomial(x(1, 0), p1.clone());
        let translation = VectorField::new(vec![MultiPoly::one(1)]).unwrap();
        assert_eq!(symbol_lie(&translation, &s).unwrap(), SymbolPoly::monomial(MultiPoly::one(1), p1.clone()));

        let euler = VectorField::new(vec![x(1, 0)]).unwrap();
        let xi = SymbolPoly::monomial(MultiPoly::one(1), p1.clone());
        assert_eq!(symbol_lie(&euler, &xi).unwrap(), -&xi);

        let c = SymbolPoly::monomial(MultiPoly::constant(1, int(4)), Exponents::zero(1));
        assert!(symbol_lie(&euler, &c).unwrap().is_zero());
    }

    #[test]
    fn contraction_of_quadratic_symbol() {
        // S = x1^2 p1^2 + x1 x2 p1 p2; D S = 4 x1 p1 + x2 p2 + x1 p1
        let dim = 2;
        let mut s = SymbolPoly::monomial(x(dim, 0).pow(2), Exponents::from_slice(&[2, 0]));
        s.add_term(Exponents::from_slice(&[1, 1]), &x(dim, 0) * &x(dim, 1));
        let ds = s.contract();
        assert_eq!(ds.coefficient(&Exponents::from_slice(&[1, 0])), x(dim, 0).scale(&int(5)));
        assert_eq!(ds.coefficient(&Exponents::from_slice(&[0, 1])), x(dim, 1));
        assert_eq!(s.normalized_contraction(2, 2).coefficient(&Exponents::zero(dim)), MultiPoly::constant(dim, int(3)));
    }

    #[test]
    fn naive_round_trip_and_display() {
        let op = &(&DensityOperator::multiplication(x(2, 0)) * &DensityOperator::partial(2, 1))
            + &DensityOperator::identity(2);
        let s = SymbolPoly::naive(&op).unwrap();
        assert_eq!(s.to_string(), "x1*p2 + 1");
        assert_eq!(s.naive_quantize(), op);
        assert_eq!(s.degree(), Some(1));
        assert!(SymbolPoly::naive(&DensityOperator::weight(1)).is_err());
    }
}
