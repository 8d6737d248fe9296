use std::cmp::{Ordering, Reverse};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::quasi::QuasiDensity;
use crate::algebra::{write_monomial, write_signed_term, Exponents, LambdaPoly, MultiPoly, Rational};
use crate::error::{Error, Result};

/// Position of a monomial `d^alpha w^wpow` in the normal form.
///
/// Ordered by spatial order descending, then `alpha` descending
/// lexicographically (so `d1` precedes `d2`), then the power of `w`
/// ascending.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct TermKey {
    pub alpha: Exponents,
    pub wpow: u32,
}

impl Ord for TermKey {
    fn cmp(&self, other: &Self) -> Ordering {
        Reverse(&self.alpha).cmp(&Reverse(&other.alpha)).then(self.wpow.cmp(&other.wpow))
    }
}

impl PartialOrd for TermKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// One normal-ordered monomial `coeff(x) d^alpha w^wpow`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct OperatorTerm {
    pub coeff: MultiPoly,
    pub alpha: Exponents,
    pub wpow: u32,
}

/// Differential operator of weight zero on the algebra of densities on
/// `R^d`, stored in normal order: every coefficient function stands to the
/// left of the derivatives `d_i` and of the weight operator `w`.
///
/// `w` commutes with `d_i` and with weight-zero functions, so it is central
/// and the normal form is unique.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DensityOperator {
    dim: usize,
    terms: BTreeMap<TermKey, MultiPoly>,
}

impl DensityOperator {
    pub fn zero(dim: usize) -> Self {
        DensityOperator { dim, terms: BTreeMap::new() }
    }

    pub fn identity(dim: usize) -> Self {
        Self::multiplication(MultiPoly::one(dim))
    }

    pub fn constant(dim: usize, c: Rational) -> Self {
        Self::multiplication(MultiPoly::constant(dim, c))
    }

    pub fn multiplication(f: MultiPoly) -> Self {
        let dim = f.dim();
        Self::monomial(f, Exponents::zero(dim), 0)
    }

    /// `d_{axis+1}`.
    pub fn partial(dim: usize, axis: usize) -> Self {
        Self::monomial(MultiPoly::one(dim), Exponents::unit(dim, axis), 0)
    }

    /// The weight operator `w`.
    pub fn weight(dim: usize) -> Self {
        Self::monomial(MultiPoly::one(dim), Exponents::zero(dim), 1)
    }

    /// The vertical operator `p(w)`.
    pub fn weight_poly(dim: usize, p: &LambdaPoly) -> Self {
        let mut out = Self::zero(dim);
        for (k, c) in p.coeffs().iter().enumerate() {
            out.add_term(TermKey { alpha: Exponents::zero(dim), wpow: k as u32 }, MultiPoly::constant(dim, c.clone()));
        }
        out
    }

    pub fn monomial(coeff: MultiPoly, alpha: Exponents, wpow: u32) -> Self {
        assert_eq!(coeff.dim(), alpha.dim(), "coefficient and multi-index dimensions differ");
        let mut out = Self::zero(coeff.dim());
        out.add_term(TermKey { alpha, wpow }, coeff);
        out
    }

    pub fn from_terms(dim: usize, terms: impl IntoIterator<Item = OperatorTerm>) -> Result<Self> {
        let mut out = Self::zero(dim);
        for t in terms {
            t.coeff.check_dim(dim)?;
            if t.alpha.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: t.alpha.dim() });
            }
            out.add_term(TermKey { alpha: t.alpha, wpow: t.wpow }, t.coeff);
        }
        Ok(out)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in canonical order.
    pub fn terms(&self) -> impl Iterator<Item = (&TermKey, &MultiPoly)> {
        self.terms.iter()
    }

    pub fn term_list(&self) -> Vec<OperatorTerm> {
        self.terms
            .iter()
            .map(|(k, c)| OperatorTerm { coeff: c.clone(), alpha: k.alpha.clone(), wpow: k.wpow })
            .collect()
    }

    pub fn coefficient(&self, alpha: &Exponents, wpow: u32) -> MultiPoly {
        self.terms.get(&TermKey { alpha: alpha.clone(), wpow }).cloned().unwrap_or_else(|| MultiPoly::zero(self.dim))
    }

    pub fn add_term(&mut self, key: TermKey, coeff: MultiPoly) {
        debug_assert_eq!(coeff.dim(), self.dim);
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get() + &coeff;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub(crate) fn check_dim(&self, other: usize) -> Result<()> {
        if self.dim == other {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected: self.dim, found: other })
        }
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        if factor.is_zero() {
            return Self::zero(self.dim);
        }
        DensityOperator { dim: self.dim, terms: self.terms.iter().map(|(k, c)| (k.clone(), c.scale(factor))).collect() }
    }

    /// `f o self` (left multiplication by a function keeps normal order).
    pub fn left_mul(&self, f: &MultiPoly) -> Self {
        let mut out = Self::zero(self.dim);
        for (k, c) in &self.terms {
            out.add_term(k.clone(), f * c);
        }
        out
    }

    /// `p(w) o self`.
    pub fn weight_mul(&self, p: &LambdaPoly) -> Self {
        let mut out = Self::zero(self.dim);
        for (j, a) in p.coeffs().iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (k, c) in &self.terms {
                out.add_term(TermKey { alpha: k.alpha.clone(), wpow: k.wpow + j as u32 }, c.scale(a));
            }
        }
        out
    }

    /// Operator product `self o other`, brought to normal order with
    /// `d^alpha o g = sum_{gamma <= alpha} C(alpha, gamma) (d^gamma g) d^(alpha - gamma)`.
    pub fn compose(&self, other: &DensityOperator) -> Result<DensityOperator> {
        self.check_dim(other.dim)?;
        Ok(self.compose_unchecked(other))
    }

    fn compose_unchecked(&self, other: &DensityOperator) -> DensityOperator {
        let mut out = Self::zero(self.dim);
        for (ka, f) in &self.terms {
            let subs = ka.alpha.sub_indices();
            for (kb, g) in &other.terms {
                for gamma in &subs {
                    let dg = g.diff_multi(gamma);
                    if dg.is_zero() {
                        continue;
                    }
                    let binom = Rational::from_integer(ka.alpha.binomial(gamma));
                    let rest = ka.alpha.checked_sub(gamma).expect("gamma <= alpha");
                    out.add_term(
                        TermKey { alpha: rest.add(&kb.alpha), wpow: ka.wpow + kb.wpow },
                        (f * &dg).scale(&binom),
                    );
                }
            }
        }
        out
    }

    /// Canonical adjoint: the anti-involution fixed by `x* = x`,
    /// `d_i* = -d_i` and `w* = 1 - w`.
    pub fn adjoint(&self) -> DensityOperator {
        let mut out = Self::zero(self.dim);
        for (k, f) in &self.terms {
            // (f d^alpha w^k)* = (1 - w)^k (-1)^|alpha| d^alpha o f
            let sign = if k.alpha.degree() % 2 == 0 { Rational::one() } else { -Rational::one() };
            let reflected = LambdaPoly::linear(Rational::one(), -Rational::one()).pow(k.wpow);
            for gamma in k.alpha.sub_indices() {
                let df = f.diff_multi(&gamma);
                if df.is_zero() {
                    continue;
                }
                let binom = Rational::from_integer(k.alpha.binomial(&gamma)) * &sign;
                let rest = k.alpha.checked_sub(&gamma).expect("gamma <= alpha");
                for (j, a) in reflected.coeffs().iter().enumerate() {
                    out.add_term(TermKey { alpha: rest.clone(), wpow: j as u32 }, df.scale(&(a * &binom)));
                }
            }
        }
        out
    }

    /// Substitutes the number `lam` for `w`; the result is `w`-free.
    pub fn restrict(&self, lam: &Rational) -> DensityOperator {
        let mut out = Self::zero(self.dim);
        for (k, c) in &self.terms {
            let mut factor = Rational::one();
            for _ in 0..k.wpow {
                factor *= lam;
            }
            out.add_term(TermKey { alpha: k.alpha.clone(), wpow: 0 }, c.scale(&factor));
        }
        out
    }

    /// Acts on a `w`-free operator's coefficient polynomial: `sum c d^alpha s`.
    pub(crate) fn act_on_poly(&self, s: &MultiPoly) -> MultiPoly {
        let mut out = MultiPoly::zero(self.dim);
        for (k, c) in &self.terms {
            debug_assert_eq!(k.wpow, 0);
            let ds = s.diff_multi(&k.alpha);
            if !ds.is_zero() {
                out = &out + &(c * &ds);
            }
        }
        out
    }

    /// Applies the operator to a quasidensity. Each weight component is
    /// preserved and acted on by the restriction at its weight.
    pub fn apply(&self, density: &QuasiDensity) -> Result<QuasiDensity> {
        self.check_dim(density.dim())?;
        let mut out = QuasiDensity::zero(self.dim);
        for (lam, s) in density.parts() {
            out.add_part(lam.clone(), self.restrict(lam).act_on_poly(s));
        }
        Ok(out)
    }

    /// `D(1)`: the image of the constant function (weight 0) as a polynomial.
    pub fn apply_to_unit(&self) -> MultiPoly {
        self.terms
            .iter()
            .filter(|(k, _)| k.alpha.is_zero() && k.wpow == 0)
            .map(|(_, c)| c.clone())
            .next()
            .unwrap_or_else(|| MultiPoly::zero(self.dim))
    }

    /// Highest number of spatial derivatives, `None` for the zero operator.
    pub fn spatial_order(&self) -> Option<usize> {
        self.terms.keys().map(|k| k.alpha.degree()).max()
    }

    /// Highest `|alpha| + wpow`, `None` for the zero operator.
    pub fn total_order(&self) -> Option<usize> {
        self.terms.keys().map(|k| k.alpha.degree() + k.wpow as usize).max()
    }

    /// Highest power of `w`, `None` for the zero operator.
    pub fn weight_degree(&self) -> Option<u32> {
        self.terms.keys().map(|k| k.wpow).max()
    }

    pub fn is_weight_free(&self) -> bool {
        self.terms.keys().all(|k| k.wpow == 0)
    }

    pub(crate) fn require_weight_free(&self) -> Result<()> {
        if self.is_weight_free() {
            Ok(())
        } else {
            Err(Error::WeightOperatorPresent)
        }
    }

    pub(crate) fn require_order(&self, max: usize) -> Result<()> {
        match self.spatial_order() {
            Some(found) if found > max => Err(Error::Order { found, max }),
            _ => Ok(()),
        }
    }

    /// Terms with exactly `k` spatial derivatives.
    pub fn homogeneous_part(&self, k: usize) -> DensityOperator {
        self.filter(|key| key.alpha.degree() == k)
    }

    pub fn filter(&self, keep: impl Fn(&TermKey) -> bool) -> DensityOperator {
        DensityOperator {
            dim: self.dim,
            terms: self.terms.iter().filter(|(k, _)| keep(k)).map(|(k, c)| (k.clone(), c.clone())).collect(),
        }
    }

    /// Collects the operator as `sum_j w^j o D_j` with `w`-free `D_j`.
    pub fn weight_components(&self) -> Vec<DensityOperator> {
        let top = self.weight_degree().map_or(0, |d| d as usize + 1);
        let mut out = vec![Self::zero(self.dim); top];
        for (k, c) in &self.terms {
            out[k.wpow as usize].add_term(TermKey { alpha: k.alpha.clone(), wpow: 0 }, c.clone());
        }
        out
    }
}

/// Spatial order of `a`: `a` lies in `V^(k)` iff the result is `<= k`.
/// The zero operator is vertical of every order and reports `None`.
pub fn vertical_order(a: &DensityOperator) -> Option<usize> {
    a.spatial_order()
}

impl Add for &DensityOperator {
    type Output = DensityOperator;
    fn add(self, rhs: &DensityOperator) -> DensityOperator {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let mut out = self.clone();
        for (k, c) in &rhs.terms {
            out.add_term(k.clone(), c.clone());
        }
        out
    }
}

impl Sub for &DensityOperator {
    type Output = DensityOperator;
    fn sub(self, rhs: &DensityOperator) -> DensityOperator {
        self + &(-rhs)
    }
}

impl Neg for &DensityOperator {
    type Output = DensityOperator;
    fn neg(self) -> DensityOperator {
        self.scale(&-Rational::one())
    }
}

/// Composition. Panics on a dimension mismatch; use
/// [`DensityOperator::compose`] for the checked form.
impl Mul for &DensityOperator {
    type Output = DensityOperator;
    fn mul(self, rhs: &DensityOperator) -> DensityOperator {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        self.compose_unchecked(rhs)
    }
}

macro_rules! forward_owned {
    ($($tr:ident :: $m:ident),*) => {$(
        impl $tr for DensityOperator {
            type Output = DensityOperator;
            fn $m(self, rhs: DensityOperator) -> DensityOperator { (&self).$m(&rhs) }
        }
    )*};
}
forward_owned!(Add::add, Sub::sub, Mul::mul);

impl Neg for DensityOperator {
    type Output = DensityOperator;
    fn neg(self) -> DensityOperator {
        -&self
    }
}

impl fmt::Display for DensityOperator {
    /// Fully expanded normal form in the operator DSL, e.g.
    /// `x1^2*d1^2 + 2*x1*w - 1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut out = String::new();
        let mut leading = true;
        for (k, c) in &self.terms {
            for (e, coeff) in c.terms().rev() {
                write_signed_term(&mut out, coeff, leading, &|b: &mut String| {
                    let mut any = write_monomial(b, e, "x").unwrap_or(false);
                    if !k.alpha.is_zero() {
                        if any {
                            b.push('*');
                        }
                        any |= write_monomial(b, &k.alpha, "d").unwrap_or(false);
                    }
                    if k.wpow > 0 {
                        if any {
                            b.push('*');
                        }
                        b.push('w');
                        if k.wpow > 1 {
                            b.push_str(&format!("^{}", k.wpow));
                        }
                        any = true;
                    }
                    any
                })?;
                leading = false;
            }
        }
        f.write_str(&out)
    }
}

impl fmt::Debug for DensityOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DensityOperator[d={}]({})", self.dim, self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::{int, rat};

    fn x1() -> DensityOperator {
        DensityOperator::multiplication(MultiPoly::var(1, 0))
    }
    fn d1() -> DensityOperator {
        DensityOperator::partial(1, 0)
    }
    fn w() -> DensityOperator {
        DensityOperator::weight(1)
    }
    fn one() -> DensityOperator {
        DensityOperator::identity(1)
    }

    #[test]
    fn leibniz_rule() {
        assert_eq!(&d1() * &x1(), &(&x1() * &d1()) + &one());
    }

    #[test]
    fn weight_operator_is_central() {
        assert_eq!(&w() * &x1(), &x1() * &w());
        assert_eq!(&w() * &d1(), &d1() * &w());
    }

    #[test]
    fn euler_operator_squared() {
        let e = &x1() * &d1();
        let x1sq = DensityOperator::multiplication(MultiPoly::var(1, 0).pow(2));
        let expected = &(&x1sq * &(&d1() * &d1())) + &e;
        assert_eq!(&e * &e, expected);
    }

    #[test]
    fn generator_adjoints() {
        assert_eq!(d1().adjoint(), -d1());
        assert_eq!(w().adjoint(), &one() - &w());
        assert_eq!(x1().adjoint(), x1());
    }

    #[test]
    fn adjoint_of_mixed_term() {
        let a = &(&x1() * &d1()) * &w();
        let expected = &(&(&a - &(&x1() * &d1())) + &w()) - &one();
        assert_eq!(a.adjoint(), expected);
    }

    #[test]
    fn restriction() {
        // (w^2 + 1) d^2 + d at w = l
        let a = &(&(&(&w() * &w()) + &one()) * &(&d1() * &d1())) + &d1();
        let lam = rat(3, 2);
        let r = a.restrict(&lam);
        let factor = &lam * &lam + int(1);
        assert_eq!(r, &(&d1() * &d1()).scale(&factor) + &d1());
        assert!(w().restrict(&int(0)).is_zero());
    }

    #[test]
    fn orders() {
        let a = &(&(&w() * &w()) * &w()) + &DensityOperator::constant(1, int(5));
        assert_eq!(vertical_order(&a), Some(0));
        assert_eq!(vertical_order(&(&w() * &d1())), Some(1));
        assert_eq!(vertical_order(&DensityOperator::zero(1)), None);
        assert_eq!((&w() * &d1()).total_order(), Some(2));
    }

    #[test]
    fn display_normal_form() {
        let a = &(&(&d1() * &x1()) * &w()) - &one();
        assert_eq!(a.to_string(), "x1*d1*w - 1 + w");
        assert_eq!(DensityOperator::zero(2).to_string(), "0");
    }

    #[test]
    fn compose_rejects_mismatched_dims() {
        let err = d1().compose(&DensityOperator::partial(2, 1)).unwrap_err();
        assert_eq!(err.code(), "E_DIM");
    }
}
