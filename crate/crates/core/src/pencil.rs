//! Diffeomorphism-equivariant pencil liftings of first- and second-order
//! operators, and the isomorphisms between second-order operator modules.

use num_traits::{One, Zero};

use crate::algebra::{rat, Exponents, LambdaPoly, MultiPoly, Rational};
use crate::density::{DensityOperator, TermKey, VectorField};
use crate::error::{Error, Result};

const EXCLUDED_SECOND_ORDER: &str = "{0, 1/2, 1}";

/// Block principal symbol `(S^{ik}, B^i, C)` of a second-order operator on
/// the total space of the density bundle.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PrincipalSymbolHat {
    s: Vec<Vec<MultiPoly>>,
    b: Vec<MultiPoly>,
    c: MultiPoly,
}

impl PrincipalSymbolHat {
    pub fn new(s: Vec<Vec<MultiPoly>>, b: Vec<MultiPoly>, c: MultiPoly) -> Result<Self> {
        let dim = b.len();
        check_symmetric(&s, dim)?;
        for p in &b {
            p.check_dim(dim)?;
        }
        c.check_dim(dim)?;
        Ok(PrincipalSymbolHat { s, b, c })
    }

    pub fn dim(&self) -> usize {
        self.b.len()
    }

    pub fn s(&self) -> &[Vec<MultiPoly>] {
        &self.s
    }

    pub fn b(&self) -> &[MultiPoly] {
        &self.b
    }

    pub fn c(&self) -> &MultiPoly {
        &self.c
    }
}

fn check_symmetric(s: &[Vec<MultiPoly>], dim: usize) -> Result<()> {
    if s.len() != dim || s.iter().any(|row| row.len() != dim) {
        return Err(Error::ShapeMismatch(format!("S must be a {dim}x{dim} matrix")));
    }
    for (i, row) in s.iter().enumerate() {
        for (k, p) in row.iter().enumerate() {
            p.check_dim(dim)?;
            if k < i && p != &s[k][i] {
                return Err(Error::ShapeMismatch(format!(
                    "S is not symmetric: S[{}][{}] != S[{}][{}]",
                    i + 1,
                    k + 1,
                    k + 1,
                    i + 1
                )));
            }
        }
    }
    Ok(())
}

/// Components `gamma_i` of a connection on the density bundle.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Connection {
    gamma: Vec<MultiPoly>,
}

impl Connection {
    pub fn new(gamma: Vec<MultiPoly>) -> Result<Self> {
        let dim = gamma.len();
        for g in &gamma {
            g.check_dim(dim)?;
        }
        Ok(Connection { gamma })
    }

    pub fn dim(&self) -> usize {
        self.gamma.len()
    }

    pub fn gamma(&self) -> &[MultiPoly] {
        &self.gamma
    }

    /// Raised components `Gamma^i = S^{ik} Gamma_k`.
    pub fn raise(&self, s: &[Vec<MultiPoly>]) -> Vec<MultiPoly> {
        s.iter()
            .map(|row| row.iter().zip(&self.gamma).fold(MultiPoly::zero(self.dim()), |acc, (a, g)| &acc + &(a * g)))
            .collect()
    }

    /// Connection divergence of a vector field: `d_i Y^i - Gamma_i Y^i`.
    pub fn divergence(&self, y: &VectorField) -> Result<MultiPoly> {
        y.check_dim(self.dim())?;
        let contraction =
            y.components().iter().zip(&self.gamma).fold(MultiPoly::zero(self.dim()), |acc, (a, g)| &acc + &(a * g));
        Ok(&y.divergence() - &contraction)
    }
}

/// Coefficients of a `w`-free operator `A^{ik} d_i d_k + A^i d_i + A` of
/// order at most two, with `A^{ik}` symmetric.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SecondOrderParts {
    pub a2: Vec<Vec<MultiPoly>>,
    pub a1: Vec<MultiPoly>,
    pub a0: MultiPoly,
}

impl SecondOrderParts {
    pub fn of(delta: &DensityOperator) -> Result<Self> {
        delta.require_weight_free()?;
        delta.require_order(2)?;
        let dim = delta.dim();
        let half = rat(1, 2);
        let mut a2 = vec![vec![MultiPoly::zero(dim); dim]; dim];
        let mut a1 = vec![MultiPoly::zero(dim); dim];
        let mut a0 = MultiPoly::zero(dim);
        for (k, c) in delta.terms() {
            let axes = k.alpha.axes();
            match axes.as_slice() {
                [] => a0 = c.clone(),
                [i] => a1[*i] = c.clone(),
                [i, j] if i == j => a2[*i][*i] = c.clone(),
                [i, j] => {
                    a2[*i][*j] = c.scale(&half);
                    a2[*j][*i] = c.scale(&half);
                }
                _ => unreachable!("order checked above"),
            }
        }
        Ok(SecondOrderParts { a2, a1, a0 })
    }

    /// `d_k A^{ki}` for every `i`.
    fn div_a2(&self) -> Vec<MultiPoly> {
        let dim = self.a1.len();
        (0..dim).map(|i| (0..dim).fold(MultiPoly::zero(dim), |acc, k| &acc + &self.a2[k][i].diff(k))).collect()
    }
}

/// `S^{ik} d_i d_k` summed over all ordered pairs.
fn second_derivative_part(s: &[Vec<MultiPoly>], dim: usize) -> DensityOperator {
    let mut out = DensityOperator::zero(dim);
    for (i, row) in s.iter().enumerate() {
        for (k, p) in row.iter().enumerate() {
            let alpha = Exponents::unit(dim, i).add(&Exponents::unit(dim, k));
            out.add_term(TermKey { alpha, wpow: 0 }, p.clone());
        }
    }
    out
}

fn first_derivative_part(v: &[MultiPoly], dim: usize) -> DensityOperator {
    let mut out = DensityOperator::zero(dim);
    for (i, p) in v.iter().enumerate() {
        out.add_term(TermKey { alpha: Exponents::unit(dim, i), wpow: 0 }, p.clone());
    }
    out
}

fn sum_divergence(v: &[MultiPoly], dim: usize) -> MultiPoly {
    v.iter().enumerate().fold(MultiPoly::zero(dim), |acc, (i, p)| &acc + &p.diff(i))
}

/// First-order pencil through `L = X^i d_i + F` on weight-`lam` densities,
/// parameterized by the point `[p : q]` of the projective line:
/// `L_X + (p w + q)/(p lam + q) (F - lam d_i X^i)`.
pub fn first_order_pencil(l: &DensityOperator, lam: &Rational, p: &Rational, q: &Rational) -> Result<DensityOperator> {
    l.require_weight_free()?;
    l.require_order(1)?;
    if p.is_zero() && q.is_zero() {
        return Err(Error::ExcludedParameter("[p:q] = [0:0] is not a point of the projective line".into()));
    }
    let denom = p * lam + q;
    if denom.is_zero() {
        return Err(Error::ExcludedParameter(format!("p*lambda + q vanishes for [p:q] = [{p}:{q}] at lambda = {lam}")));
    }
    let dim = l.dim();
    let mut comps = vec![MultiPoly::zero(dim); dim];
    for (k, c) in l.terms().filter(|(k, _)| k.alpha.degree() == 1) {
        comps[k.alpha.axes()[0]] = c.clone();
    }
    let x = VectorField::new(comps)?;
    let f = l.apply_to_unit();
    let s = &f - &x.divergence().scale(lam);
    let factor = LambdaPoly::linear(q.clone(), p.clone()).scale(&(Rational::one() / denom));
    Ok(&x.lie_lift() + &DensityOperator::multiplication(s).weight_mul(&factor))
}

/// The self-adjoint operator with principal symbol `(S, B, C)`:
/// `S^{ik} d_i d_k + d_k S^{ki} d_i + (2w - 1) B^i d_i + w d_k B^k + w(w - 1) C`.
pub fn operator_from_symbol(sym: &PrincipalSymbolHat) -> DensityOperator {
    let dim = sym.dim();
    let div_s: Vec<MultiPoly> =
        (0..dim).map(|i| (0..dim).fold(MultiPoly::zero(dim), |acc, k| &acc + &sym.s[k][i].diff(k))).collect();
    let b_part = first_derivative_part(&sym.b, dim).weight_mul(&LambdaPoly::linear(-Rational::one(), rat(2, 1)));
    let div_b = DensityOperator::multiplication(sum_divergence(&sym.b, dim)).weight_mul(&LambdaPoly::var());
    let c_part = DensityOperator::multiplication(sym.c.clone()).weight_mul(&LambdaPoly::new(vec![
        Rational::zero(),
        -Rational::one(),
        Rational::one(),
    ]));
    let mut out = second_derivative_part(&sym.s, dim);
    for part in [first_derivative_part(&div_s, dim), b_part, div_b, c_part] {
        out = &out + &part;
    }
    out
}

/// Horizontal lift `(S, Gamma^i, Gamma^i Gamma_i)` of `S` along a connection.
pub fn horizontal_symbol(s: &[Vec<MultiPoly>], conn: &Connection) -> Result<PrincipalSymbolHat> {
    let dim = conn.dim();
    check_symmetric(s, dim)?;
    let raised = conn.raise(s);
    let c = raised.iter().zip(conn.gamma()).fold(MultiPoly::zero(dim), |acc, (a, g)| &acc + &(a * g));
    PrincipalSymbolHat::new(s.to_vec(), raised, c)
}

/// Second-order operator `div_nabla(S D_nabla)` built from a connection.
pub fn operator_from_symbol_connection(s: &[Vec<MultiPoly>], conn: &Connection) -> Result<DensityOperator> {
    Ok(operator_from_symbol(&horizontal_symbol(s, conn)?))
}

fn check_second_order_weight(lam: &Rational) -> Result<()> {
    if lam.is_zero() || lam == &rat(1, 2) || lam.is_one() {
        return Err(Error::SingularWeight { weight: lam.to_string(), excluded: EXCLUDED_SECOND_ORDER });
    }
    Ok(())
}

/// Principal symbol of the unique self-adjoint normalized pencil through a
/// second-order operator on weight-`lam` densities.
pub fn canonical_symbol(delta: &DensityOperator, lam: &Rational) -> Result<PrincipalSymbolHat> {
    check_second_order_weight(lam)?;
    let parts = SecondOrderParts::of(delta)?;
    let dim = delta.dim();
    let inv = Rational::one() / (rat(2, 1) * lam - Rational::one());
    let div_a2 = parts.div_a2();
    let b: Vec<MultiPoly> = parts.a1.iter().zip(&div_a2).map(|(a, d)| (a - d).scale(&inv)).collect();
    let c =
        (&parts.a0 - &sum_divergence(&b, dim).scale(lam)).scale(&(Rational::one() / (lam * (lam - Rational::one()))));
    PrincipalSymbolHat::new(parts.a2, b, c)
}

/// Canonical self-adjoint second-order pencil lifting.
pub fn canonical_second_order_lift(delta: &DensityOperator, lam: &Rational) -> Result<DensityOperator> {
    Ok(operator_from_symbol(&canonical_symbol(delta, lam)?))
}

/// Equivariant isomorphism from second-order operators on weight `lam` to
/// weight `mu`, in closed form:
/// `B^{ij} = A^{ij}`,
/// `B^i = (2mu-1)/(2lam-1) A^i + 2(lam-mu)/(2lam-1) d_j A^{ji}`,
/// `B = mu(mu-1)/(lam(lam-1)) A + mu(lam-mu)/((2lam-1)(lam-1)) (d_j A^j - d_i d_j A^{ij})`.
pub fn duval_ovsienko_iso(delta: &DensityOperator, lam: &Rational, mu: &Rational) -> Result<DensityOperator> {
    check_second_order_weight(lam)?;
    check_second_order_weight(mu)?;
    let parts = SecondOrderParts::of(delta)?;
    let dim = delta.dim();
    let one = Rational::one();
    let two = rat(2, 1);
    let den = &two * lam - &one;
    let c1 = (&two * mu - &one) / &den;
    let c2 = &two * (lam - mu) / &den;
    let c3 = mu * (mu - &one) / (lam * (lam - &one));
    let c4 = mu * (lam - mu) / (&den * (lam - &one));

    let div_a2 = parts.div_a2();
    let b1: Vec<MultiPoly> = parts.a1.iter().zip(&div_a2).map(|(a, d)| &a.scale(&c1) + &d.scale(&c2)).collect();
    let div_a1 = sum_divergence(&parts.a1, dim);
    let divdiv_a2 = sum_divergence(&div_a2, dim);
    let b0 = &parts.a0.scale(&c3) + &(&div_a1 - &divdiv_a2).scale(&c4);

    let mut out = second_derivative_part(&parts.a2, dim);
    out = &out + &first_derivative_part(&b1, dim);
    Ok(&out + &DensityOperator::multiplication(b0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::int;

    fn x1() -> MultiPoly {
        MultiPoly::var(1, 0)
    }
    fn d(dim: usize, i: usize) -> DensityOperator {
        DensityOperator::partial(dim, i)
    }
    fn mul(p: MultiPoly) -> DensityOperator {
        DensityOperator::multiplication(p)
    }
    fn w(dim: usize) -> DensityOperator {
        DensityOperator::weight(dim)
    }

    #[test]
    fn first_order_pencil_examples() {
        let f = &x1() * &x1();
        let l = &d(1, 0) + &mul(f.clone());
        let out = first_order_pencil(&l, &rat(3, 4), &int(0), &int(1)).unwrap();
        assert_eq!(out, l);

        let euler = &mul(x1()) * &d(1, 0);
        let out = first_order_pencil(&euler, &int(1), &int(0), &int(1)).unwrap();
        let expected = &(&euler + &w(1)) - &DensityOperator::identity(1);
        assert_eq!(out, expected);
        assert_eq!(out.restrict(&int(1)), euler);
    }

    #[test]
    fn anti_self_adjoint_point() {
        let l = &(&mul(x1().pow(2)) * &d(1, 0)) + &mul(x1());
        let out = first_order_pencil(&l, &rat(1, 3), &int(2), &int(-1)).unwrap();
        assert_eq!(out.adjoint(), -&out);
        assert_eq!(out.restrict(&rat(1, 3)), l);
    }

    #[test]
    fn proportional_points_agree() {
        let l = &(&mul(x1().pow(2)) * &d(1, 0)) + &mul(x1());
        let a = first_order_pencil(&l, &rat(1, 3), &int(2), &int(5)).unwrap();
        let b = first_order_pencil(&l, &rat(1, 3), &int(-4), &int(-10)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn first_order_pencil_errors() {
        let l = d(1, 0);
        assert_eq!(first_order_pencil(&l, &int(1), &int(1), &int(-1)).unwrap_err().code(), "E_EXCLUDED_PARAM");
        assert_eq!(first_order_pencil(&l, &int(1), &int(0), &int(0)).unwrap_err().code(), "E_EXCLUDED_PARAM");
        let dd = &d(1, 0) * &d(1, 0);
        assert_eq!(first_order_pencil(&dd, &int(2), &int(0), &int(1)).unwrap_err().code(), "E_ORDER");
    }

    #[test]
    fn symbol_examples() {
        let one = MultiPoly::one(1);
        let zero = MultiPoly::zero(1);
        let sym = PrincipalSymbolHat::new(vec![vec![one.clone()]], vec![zero.clone()], zero.clone()).unwrap();
        assert_eq!(operator_from_symbol(&sym), &d(1, 0) * &d(1, 0));

        let sym = PrincipalSymbolHat::new(vec![vec![zero.clone()]], vec![one.clone()], zero.clone()).unwrap();
        let expected = &(&w(1).scale(&int(2)) - &DensityOperator::identity(1)) * &d(1, 0);
        assert_eq!(operator_from_symbol(&sym), expected);

        let sym = PrincipalSymbolHat::new(vec![vec![x1()]], vec![zero.clone()], zero).unwrap();
        let out = operator_from_symbol(&sym);
        assert_eq!(out, &(&mul(x1()) * &(&d(1, 0) * &d(1, 0))) + &d(1, 0));
        assert_eq!(out.adjoint(), out);
    }

    #[test]
    fn asymmetric_symbol_is_rejected() {
        let s = vec![vec![MultiPoly::zero(2), MultiPoly::one(2)], vec![MultiPoly::zero(2), MultiPoly::zero(2)]];
        let z = MultiPoly::zero(2);
        assert!(PrincipalSymbolHat::new(s, vec![z.clone(), z.clone()], z).is_err());
    }

    #[test]
    fn connection_with_constant_gamma() {
        let g = int(3);
        let conn = Connection::new(vec![MultiPoly::constant(1, g.clone())]).unwrap();
        let out = operator_from_symbol_connection(&[vec![MultiPoly::one(1)]], &conn).unwrap();
        let two_w_minus_one = &w(1).scale(&int(2)) - &DensityOperator::identity(1);
        let ww = &(&w(1) * &w(1)) - &w(1);
        let expected = &(&(&d(1, 0) * &d(1, 0)) + &(&two_w_minus_one * &d(1, 0)).scale(&g)) + &ww.scale(&(&g * &g));
        assert_eq!(out, expected);
    }

    #[test]
    fn canonical_lift_examples() {
        let dd = &d(1, 0) * &d(1, 0);
        assert_eq!(canonical_second_order_lift(&dd, &rat(2, 3)).unwrap(), dd);

        let delta = &mul(x1()) * &dd;
        let out = canonical_second_order_lift(&delta, &int(2)).unwrap();
        let two_w_minus_one = &w(1).scale(&int(2)) - &DensityOperator::identity(1);
        let expected = &(&delta + &d(1, 0)) - &(&two_w_minus_one * &d(1, 0)).scale(&rat(1, 3));
        assert_eq!(out, expected);
        assert_eq!(out.restrict(&int(2)), delta);
        assert_eq!(out.adjoint(), out);

        let f = mul(&x1() * &x1());
        let lam = int(3);
        let out = canonical_second_order_lift(&f, &lam).unwrap();
        let ww = &(&w(1) * &w(1)) - &w(1);
        assert_eq!(out, (&ww * &f).scale(&rat(1, 6)));
    }

    #[test]
    fn excluded_weights() {
        let dd = &d(1, 0) * &d(1, 0);
        for lam in [int(0), rat(1, 2), int(1)] {
            let err = canonical_second_order_lift(&dd, &lam).unwrap_err();
            assert_eq!(err.code(), "E_SINGULAR_WEIGHT");
            assert!(err.to_string().contains("{0, 1/2, 1}"));
        }
        let third = &dd * &d(1, 0);
        assert_eq!(canonical_second_order_lift(&third, &int(2)).unwrap_err().code(), "E_ORDER");
    }

    #[test]
    fn iso_on_lie_derivative_products() {
        let x = VectorField::new(vec![x1().pow(2)]).unwrap();
        let y = VectorField::new(vec![&x1() + &MultiPoly::one(1)]).unwrap();
        let (lam, mu) = (int(2), rat(-1, 3));
        let at = |v: &VectorField, l: &Rational| v.lie_lift().restrict(l);
        let delta = &at(&x, &lam) * &at(&y, &lam);
        let out = duval_ovsienko_iso(&delta, &lam, &mu).unwrap();
        let bracket = at(&x.bracket(&y).unwrap(), &mu);
        let factor = (&mu - &lam) / (int(2) * &lam - int(1));
        assert_eq!(out, &(&at(&x, &mu) * &at(&y, &mu)) + &bracket.scale(&factor));
        assert_eq!(out, canonical_second_order_lift(&delta, &lam).unwrap().restrict(&mu));
        assert_eq!(duval_ovsienko_iso(&delta, &lam, &lam).unwrap(), delta);
    }
}
