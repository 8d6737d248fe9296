//! Pencil liftings equivariant under volume-preserving vector fields.
//!
//! A volume form `rho |Dx|` is carried only through its flat connection
//! `Gamma_i = -d_i log rho`, which keeps every construction polynomial.

use std::collections::HashMap;

use num_traits::{One, Zero};

use crate::algebra::{rat, Exponents, LambdaPoly, MultiPoly, Rational};
use crate::density::{DensityOperator, VectorField};
use crate::error::{Error, Result};

/// Volume form on `R^d`, given by the curl-free vector `Gamma_i = -d_i log rho`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct VolumeStructure {
    gamma: Vec<MultiPoly>,
}

impl VolumeStructure {
    pub fn new(gamma: Vec<MultiPoly>) -> Result<Self> {
        let dim = gamma.len();
        for g in &gamma {
            g.check_dim(dim)?;
        }
        for i in 0..dim {
            for j in (i + 1)..dim {
                if gamma[j].diff(i) != gamma[i].diff(j) {
                    return Err(Error::NotCurlFree { i: i + 1, j: j + 1 });
                }
            }
        }
        Ok(VolumeStructure { gamma })
    }

    /// Lebesgue volume: `Gamma = 0`.
    pub fn flat(dim: usize) -> Self {
        VolumeStructure { gamma: vec![MultiPoly::zero(dim); dim] }
    }

    /// Volume `exp(-phi) |Dx|`, whose connection is `grad phi`.
    pub fn from_potential(phi: &MultiPoly) -> Self {
        VolumeStructure { gamma: (0..phi.dim()).map(|i| phi.diff(i)).collect() }
    }

    pub fn dim(&self) -> usize {
        self.gamma.len()
    }

    pub fn gamma(&self) -> &[MultiPoly] {
        &self.gamma
    }

    /// Divergence with respect to the volume: `d_i X^i - Gamma_i X^i`.
    pub fn div_rho(&self, x: &VectorField) -> Result<MultiPoly> {
        x.check_dim(self.dim())?;
        let contraction =
            x.components().iter().zip(&self.gamma).fold(MultiPoly::zero(self.dim()), |acc, (a, g)| &acc + &(a * g));
        Ok(&x.divergence() - &contraction)
    }

    fn check_dim(&self, dim: usize) -> Result<()> {
        if self.dim() == dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected: self.dim(), found: dim })
        }
    }
}

/// Products of commuting first-order factors `f_i` indexed by multi-index.
struct FactorPowers {
    factors: Vec<DensityOperator>,
    cache: HashMap<Exponents, DensityOperator>,
}

impl FactorPowers {
    fn new(factors: Vec<DensityOperator>) -> Self {
        FactorPowers { factors, cache: HashMap::new() }
    }

    fn power(&mut self, alpha: &Exponents) -> DensityOperator {
        if let Some(p) = self.cache.get(alpha) {
            return p.clone();
        }
        let dim = alpha.dim();
        let out = match alpha.as_slice().iter().position(|&e| e > 0) {
            None => DensityOperator::identity(dim),
            Some(axis) => {
                let mut lower = alpha.clone();
                lower.set(axis, alpha.get(axis) - 1);
                let rest = self.power(&lower);
                &self.factors[axis] * &rest
            }
        };
        self.cache.insert(alpha.clone(), out.clone());
        out
    }
}

/// Canonical pencil lifting attached to a volume form:
/// `sum S (d + (w - lam) Gamma)^alpha` for `Delta = sum S d^alpha`.
pub fn volume_lift(delta: &DensityOperator, lam: &Rational, vol: &VolumeStructure) -> Result<DensityOperator> {
    delta.require_weight_free()?;
    vol.check_dim(delta.dim())?;
    let dim = delta.dim();
    let shift = LambdaPoly::linear(-lam.clone(), Rational::one());
    let factors = (0..dim)
        .map(|i| {
            &DensityOperator::partial(dim, i)
                + &DensityOperator::multiplication(vol.gamma[i].clone()).weight_mul(&shift)
        })
        .collect();
    let mut powers = FactorPowers::new(factors);
    let mut out = DensityOperator::zero(dim);
    for (k, c) in delta.terms() {
        out = &out + &powers.power(&k.alpha).left_mul(c);
    }
    Ok(out)
}

/// Adjoint of an operator on functions with respect to the volume form:
/// `c d^alpha` maps to `(-(d - Gamma))^alpha o c`.
pub fn rho_adjoint(delta: &DensityOperator, vol: &VolumeStructure) -> Result<DensityOperator> {
    delta.require_weight_free()?;
    vol.check_dim(delta.dim())?;
    let dim = delta.dim();
    let factors = (0..dim)
        .map(|i| &DensityOperator::multiplication(vol.gamma[i].clone()) - &DensityOperator::partial(dim, i))
        .collect();
    let mut powers = FactorPowers::new(factors);
    let mut out = DensityOperator::zero(dim);
    for (k, c) in delta.terms() {
        out = &out + &(&powers.power(&k.alpha) * &DensityOperator::multiplication(c.clone()));
    }
    Ok(out)
}

/// Parameters `(b, c_1..c_n, d_1..d_n)` of the family of regular
/// sdiff-equivariant pencil liftings of order-`n` operators on weight `lam`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SdiffFamilyParams {
    pub n: usize,
    pub lam: Rational,
    pub b: Rational,
    pub c: Vec<Rational>,
    pub dcoef: Vec<Rational>,
}

impl SdiffFamilyParams {
    pub fn new(n: usize, lam: Rational, b: Rational, c: Vec<Rational>, dcoef: Vec<Rational>) -> Result<Self> {
        if c.len() != n || dcoef.len() != n {
            return Err(Error::ShapeMismatch(format!(
                "expected {n} coefficients c_k and d_k, got {} and {}",
                c.len(),
                dcoef.len()
            )));
        }
        Ok(SdiffFamilyParams { n, lam, b, c, dcoef })
    }

    /// The origin of the family (the plain volume lift).
    pub fn origin(n: usize, lam: Rational) -> Self {
        SdiffFamilyParams {
            n,
            lam,
            b: Rational::zero(),
            c: vec![Rational::zero(); n],
            dcoef: vec![Rational::zero(); n],
        }
    }

    /// `sum_k coeffs[k-1] (w - lam)^k`.
    fn series(&self, coeffs: &[Rational]) -> LambdaPoly {
        let shift = LambdaPoly::linear(-self.lam.clone(), Rational::one());
        let mut out = LambdaPoly::zero();
        let mut pow = shift.clone();
        for c in coeffs {
            out = &out + &pow.scale(c);
            pow = &pow * &shift;
        }
        out
    }
}

fn sign(n: usize) -> Rational {
    if n.is_multiple_of(2) {
        Rational::one()
    } else {
        -Rational::one()
    }
}

/// Member of the `(2n+1)`-parameter plane of regular liftings:
/// `A(w) P + B(w) P* + C(w) P(1) + D(w) P*(1)` with `P` the volume lift,
/// `A = 1 - b(w - lam)`, `B = (-1)^n b (w - lam)`, `C = sum c_k (w - lam)^k`
/// and `D = sum d_k (w - lam)^k`.
pub fn sdiff_family_lift(
    delta: &DensityOperator,
    params: &SdiffFamilyParams,
    vol: &VolumeStructure,
) -> Result<DensityOperator> {
    delta.require_order(params.n)?;
    let p = volume_lift(delta, &params.lam, vol)?;
    let p_star = p.adjoint();
    let shift = LambdaPoly::linear(-params.lam.clone(), Rational::one());
    let a = &LambdaPoly::one() - &shift.scale(&params.b);
    let b = shift.scale(&(&params.b * sign(params.n)));
    let c = params.series(&params.c);
    let d = params.series(&params.dcoef);
    let p1 = DensityOperator::multiplication(p.apply_to_unit());
    let p_star1 = DensityOperator::multiplication(p_star.apply_to_unit());
    let mut out = p.weight_mul(&a);
    for (op, poly) in [(&p_star, &b), (&p1, &c), (&p_star1, &d)] {
        out = &out + &op.weight_mul(poly);
    }
    Ok(out)
}

/// Distinguished lifting `(w + lam - 1)/(2lam - 1) P + (-1)^n (lam - w)/(2lam - 1) P*`,
/// self-adjoint for even `n` and anti-self-adjoint for odd `n`.
pub fn distinguished_lift(
    delta: &DensityOperator,
    n: usize,
    lam: &Rational,
    vol: &VolumeStructure,
) -> Result<DensityOperator> {
    if lam == &rat(1, 2) {
        return Err(Error::SingularWeight { weight: lam.to_string(), excluded: "{1/2}" });
    }
    delta.require_order(n)?;
    let p = volume_lift(delta, lam, vol)?;
    let inv = Rational::one() / (rat(2, 1) * lam - Rational::one());
    let first = LambdaPoly::linear(lam - Rational::one(), Rational::one()).scale(&inv);
    let second = LambdaPoly::linear(lam.clone(), -Rational::one()).scale(&(inv * sign(n)));
    Ok(&p.weight_mul(&first) + &p.adjoint().weight_mul(&second))
}

/// Representative of `a` modulo `V^(k)`: drops every term with at most `k`
/// spatial derivatives. `k = -1` keeps everything.
pub fn truncate_mod_vertical(a: &DensityOperator, k: i64) -> Result<DensityOperator> {
    if k < -1 {
        return Err(Error::ExcludedParameter(format!("truncation order {k} is below -1")));
    }
    Ok(a.filter(|key| key.alpha.degree() as i64 > k))
}
