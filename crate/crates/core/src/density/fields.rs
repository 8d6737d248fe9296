use crate::algebra::{Exponents, LambdaPoly, MultiPoly};
use crate::error::{Error, Result};

use super::operator::{DensityOperator, TermKey};

/// Polynomial vector field `X = X^i d_i` on `R^d`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct VectorField {
    components: Vec<MultiPoly>,
}

impl VectorField {
    pub fn new(components: Vec<MultiPoly>) -> Result<Self> {
        let dim = components.len();
        for c in &components {
            c.check_dim(dim)?;
        }
        Ok(VectorField { components })
    }

    pub fn zero(dim: usize) -> Self {
        VectorField { components: vec![MultiPoly::zero(dim); dim] }
    }

    /// The field `f d_{axis+1}`.
    pub fn along(dim: usize, axis: usize, f: MultiPoly) -> Self {
        let mut v = Self::zero(dim);
        v.components[axis] = f;
        v
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[MultiPoly] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &MultiPoly {
        &self.components[i]
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(MultiPoly::is_zero)
    }

    /// `d_i X^i`.
    pub fn divergence(&self) -> MultiPoly {
        let mut out = MultiPoly::zero(self.dim());
        for (i, c) in self.components.iter().enumerate() {
            out = &out + &c.diff(i);
        }
        out
    }

    /// Derivative of a function along the field.
    pub fn derive(&self, f: &MultiPoly) -> MultiPoly {
        let mut out = MultiPoly::zero(self.dim());
        for (i, c) in self.components.iter().enumerate() {
            if !c.is_zero() {
                out = &out + &(c * &f.diff(i));
            }
        }
        out
    }

    /// Lie bracket `[X, Y]`.
    pub fn bracket(&self, other: &VectorField) -> Result<VectorField> {
        self.check_dim(other.dim())?;
        Ok(VectorField {
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(x, y)| &self.derive(y) - &other.derive(x))
                .collect(),
        })
    }

    pub fn scale(&self, c: &crate::algebra::Rational) -> VectorField {
        VectorField { components: self.components.iter().map(|p| p.scale(c)).collect() }
    }

    /// `X^i d_i` as a first-order operator.
    pub fn to_operator(&self) -> DensityOperator {
        let dim = self.dim();
        let mut out = DensityOperator::zero(dim);
        for (i, c) in self.components.iter().enumerate() {
            out.add_term(TermKey { alpha: Exponents::unit(dim, i), wpow: 0 }, c.clone());
        }
        out
    }

    /// Lie derivative on densities of every weight: `X^i d_i + w d_i X^i`.
    pub fn lie_lift(&self) -> DensityOperator {
        let dim = self.dim();
        let mut out = self.to_operator();
        out.add_term(TermKey { alpha: Exponents::zero(dim), wpow: 1 }, self.divergence());
        out
    }

    pub(crate) fn check_dim(&self, other: usize) -> Result<()> {
        if self.dim() == other {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected: self.dim(), found: other })
        }
    }
}

/// Vector field on the total space `R^d x R_{>0}`, homogeneous of weight 0:
/// `X^i d_i + X^0 w`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct HatVectorField {
    pub base: VectorField,
    pub vertical: MultiPoly,
}

impl HatVectorField {
    pub fn new(base: VectorField, vertical: MultiPoly) -> Result<Self> {
        vertical.check_dim(base.dim())?;
        Ok(HatVectorField { base, vertical })
    }

    pub fn to_operator(&self) -> DensityOperator {
        let dim = self.base.dim();
        let mut out = self.base.to_operator();
        out.add_term(TermKey { alpha: Exponents::zero(dim), wpow: 1 }, self.vertical.clone());
        out
    }
}

/// Canonical divergence `-(X + X*)` of a weight-0 field: `d_i X^i - X^0`.
/// The weight operator in `d_i X^i + (w - 1) X^0` acts on the weight-0
/// function `X^0` and so contributes nothing.
pub fn divergence_hat(x: &HatVectorField) -> DensityOperator {
    DensityOperator::multiplication(&x.base.divergence() - &x.vertical)
}

/// `ad_{L_K}(D) = L_K o D - D o L_K`.
pub fn ad_action(k: &VectorField, d: &DensityOperator) -> Result<DensityOperator> {
    k.check_dim(d.dim())?;
    let lk = k.lie_lift();
    Ok(&(&lk * d) - &(d * &lk))
}

/// Adjoint action on a `w`-free operator viewed as acting between densities
/// of weight `lam`: `(L_K^lam o D - D o L_K^lam)`.
pub fn ad_action_at(k: &VectorField, d: &DensityOperator, lam: &crate::algebra::Rational) -> Result<DensityOperator> {
    d.require_weight_free()?;
    Ok(ad_action(k, d)?.restrict(lam))
}

/// Components of a first-order operator written as `L_X + w S1 + S2`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FirstOrderParts {
    pub field: VectorField,
    pub s1: MultiPoly,
    pub s2: MultiPoly,
}

impl FirstOrderParts {
    pub fn to_operator(&self) -> DensityOperator {
        let s1 = DensityOperator::multiplication(self.s1.clone()).weight_mul(&LambdaPoly::var());
        &(&self.field.lie_lift() + &s1) + &DensityOperator::multiplication(self.s2.clone())
    }
}

/// Splits a regular first-order operator (terms `X^i d_i`, `a`, `b w`) into
/// its Lie-derivative part and vertical remainder.
pub fn decompose_first_order(op: &DensityOperator) -> Result<FirstOrderParts> {
    let dim = op.dim();
    let mut comps = vec![MultiPoly::zero(dim); dim];
    let mut a = MultiPoly::zero(dim);
    let mut b = MultiPoly::zero(dim);
    for (k, c) in op.terms() {
        match (k.alpha.degree(), k.wpow) {
            (1, 0) => comps[k.alpha.axes()[0]] = c.clone(),
            (0, 0) => a = c.clone(),
            (0, 1) => b = c.clone(),
            (deg, w) => return Err(Error::Order { found: deg + w as usize, max: 1 }),
        }
    }
    let field = VectorField { components: comps };
    let s1 = &b - &field.divergence();
    Ok(FirstOrderParts { field, s1, s2: a })
}
