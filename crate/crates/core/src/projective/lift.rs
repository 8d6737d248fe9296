use num_traits::{One, Zero};

use super::symbol::SymbolPoly;
use super::table::{a_d, b_d, DloTable};
use crate::algebra::{rat, LambdaPoly, MultiPoly, Rational};
use crate::density::{DensityOperator, VectorField};
use crate::error::{Error, Result};
use crate::pencil::SecondOrderParts;

/// Generators of `proj(R^d)` in a fixed order: the translations `d_i`, then
/// the linear fields `x^k d_i` (outer loop over `i`, inner over `k`), then
/// the special fields `x^k (x^i d_i)` for `k = 1..d`.
pub fn proj_generators(d: usize) -> Result<Vec<VectorField>> {
    if d == 0 {
        return Err(Error::ShapeMismatch("proj(R^d) needs d >= 1".into()));
    }
    let mut out = Vec::with_capacity(d * (d + 2));
    for i in 0..d {
        out.push(VectorField::along(d, i, MultiPoly::one(d)));
    }
    for i in 0..d {
        for k in 0..d {
            out.push(VectorField::along(d, i, MultiPoly::var(d, k)));
        }
    }
    for k in 0..d {
        let xk = MultiPoly::var(d, k);
        out.push(VectorField::new((0..d).map(|i| &xk * &MultiPoly::var(d, i)).collect())?);
    }
    Ok(out)
}

/// Projectively equivariant full symbol
/// `sigma_lam(Delta) = sum_k sum_r c_r^(k)(lam) T_r(s_k)`, with `s_k` the
/// naive symbol of the order-`k` part of `Delta`.
pub fn full_symbol(delta: &DensityOperator, lam: &Rational, table: &DloTable) -> Result<SymbolPoly> {
    table.require_dim(delta.dim())?;
    table.require_order(delta.spatial_order())?;
    let naive = SymbolPoly::naive(delta)?;
    let mut out = SymbolPoly::zero(delta.dim());
    for k in 0..=naive.degree().unwrap_or(0) {
        let s = naive.homogeneous_part(k);
        if s.is_zero() {
            continue;
        }
        for r in 0..=k {
            let c = table.c(k, r).eval(lam);
            if !c.is_zero() {
                out = &out + &s.normalized_contraction(k, r).scale(&c);
            }
        }
    }
    Ok(out)
}

/// Quantization with the inverse coefficients taken as polynomials in `w`:
/// `sum_k sum_r ctilde_r^(k)(w) N(T_r(s_k))`.
pub fn quantize_pencil(sym: &SymbolPoly, table: &DloTable) -> Result<DensityOperator> {
    table.require_dim(sym.dim())?;
    table.require_order(sym.degree())?;
    let mut out = DensityOperator::zero(sym.dim());
    for k in 0..=sym.degree().unwrap_or(0) {
        let s = sym.homogeneous_part(k);
        if s.is_zero() {
            continue;
        }
        for r in 0..=k {
            out = &out + &s.normalized_contraction(k, r).quantize_with(table.ctilde(k, r));
        }
    }
    Ok(out)
}

/// Quantization map at weight `mu`, inverse to [`full_symbol`] at `mu`.
pub fn quantize(sym: &SymbolPoly, mu: &Rational, table: &DloTable) -> Result<DensityOperator> {
    Ok(quantize_pencil(sym, table)?.restrict(mu))
}

/// DLO pencil lifting: quantize the weight-`lam` full symbol at `w`.
pub fn dlo_pencil(delta: &DensityOperator, lam: &Rational, table: &DloTable) -> Result<DensityOperator> {
    quantize_pencil(&full_symbol(delta, lam, table)?, table)
}

/// Splits `Delta` into `Delta_n, ..., Delta_0` with `Delta_k` the
/// quantization at `lam` of the degree-`k` part of its full symbol.
/// Index `i` of the result holds `Delta_{n-i}`, `n` the table order.
pub fn graded_decompose(delta: &DensityOperator, lam: &Rational, table: &DloTable) -> Result<Vec<DensityOperator>> {
    let sym = full_symbol(delta, lam, table)?;
    (0..=table.max_order()).rev().map(|k| quantize(&sym.homogeneous_part(k), lam, table)).collect()
}

/// Lower-triangular coefficient matrix `a_ij` of the family
/// `sum_i P_i(w)/P_i(lam) Pi^DLO(Delta_{n-i})`, `P_i(w) = sum_j a_ij w^j`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TriangularFamilyParams {
    pub n: usize,
    pub lam: Rational,
    rows: Vec<Vec<Rational>>,
}

impl TriangularFamilyParams {
    /// Rows may be given ragged; missing entries above the diagonal are zero.
    pub fn new(n: usize, lam: Rational, rows: Vec<Vec<Rational>>) -> Result<Self> {
        if rows.len() != n + 1 {
            return Err(Error::ShapeMismatch(format!("expected {} rows, got {}", n + 1, rows.len())));
        }
        let mut square = Vec::with_capacity(n + 1);
        for (i, mut row) in rows.into_iter().enumerate() {
            if row.len() > n + 1 {
                return Err(Error::ShapeMismatch(format!("row {i} has more than {} entries", n + 1)));
            }
            row.resize(n + 1, Rational::zero());
            if let Some(j) = row.iter().skip(i + 1).position(|v| !v.is_zero()) {
                return Err(Error::ShapeMismatch(format!(
                    "matrix is not lower triangular: entry ({i}, {}) is nonzero",
                    i + 1 + j
                )));
            }
            if row.iter().all(Zero::is_zero) {
                return Err(Error::ExcludedParameter(format!("row {i} is identically zero")));
            }
            square.push(row);
        }
        Ok(TriangularFamilyParams { n, lam, rows: square })
    }

    /// Rows `P_i(w) = 1` for every `i`: the DLO pencil itself.
    pub fn dlo(n: usize, lam: Rational) -> Self {
        let rows = (0..=n)
            .map(|_| {
                let mut r = vec![Rational::zero(); n + 1];
                r[0] = Rational::one();
                r
            })
            .collect();
        TriangularFamilyParams { n, lam, rows }
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.rows
    }

    /// `P_i` as a polynomial.
    pub fn row_poly(&self, i: usize) -> LambdaPoly {
        LambdaPoly::new(self.rows[i].clone())
    }
}

/// Member of the triangular family of regular projectively equivariant
/// pencil liftings.
pub fn triangular_family_lift(
    delta: &DensityOperator,
    params: &TriangularFamilyParams,
    table: &DloTable,
) -> Result<DensityOperator> {
    delta.require_order(params.n)?;
    if table.max_order() < params.n {
        return Err(Error::Order { found: params.n, max: table.max_order() });
    }
    let table = table.truncate(params.n);
    let sym = full_symbol(delta, &params.lam, &table)?;
    let mut out = DensityOperator::zero(delta.dim());
    for i in 0..=params.n {
        let p = params.row_poly(i);
        let at = p.eval(&params.lam);
        if at.is_zero() {
            return Err(Error::RowSingular { row: i });
        }
        let part = sym.homogeneous_part(params.n - i);
        if part.is_zero() {
            continue;
        }
        let lifted = quantize_pencil(&part, &table)?;
        out = &out + &lifted.weight_mul(&p.scale(&(Rational::one() / at)));
    }
    Ok(out)
}

/// Outcome of [`self_adjointness_filter`].
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SelfAdjointnessReport {
    pub holds: bool,
    /// Each `P_i` re-expanded in powers of `(w - 1/2)`: `certificate[i][j]`
    /// multiplies `(w - 1/2)^j`. The condition holds iff row `i` only has
    /// powers of the parity of `i`.
    pub certificate: Vec<LambdaPoly>,
    pub failing_rows: Vec<usize>,
}

/// Checks `P_i(1 - w) = (-1)^i P_i(w)` for every row, which makes every
/// member of the family (anti-)self-adjoint in step with the grading.
pub fn self_adjointness_filter(params: &TriangularFamilyParams) -> SelfAdjointnessReport {
    let half = rat(1, 2);
    let mut certificate = Vec::with_capacity(params.n + 1);
    let mut failing_rows = Vec::new();
    for i in 0..=params.n {
        let shifted = params.row_poly(i).taylor_shift(&half);
        let ok = shifted.coeffs().iter().enumerate().all(|(j, c)| c.is_zero() || j % 2 == i % 2);
        if !ok {
            failing_rows.push(i);
        }
        certificate.push(shifted);
    }
    SelfAdjointnessReport { holds: failing_rows.is_empty(), certificate, failing_rows }
}

/// Rows `1`, `2w - 1`, `p + q w(w - 1)`: the projective line of
/// self-adjoint liftings of second-order operators.
pub fn second_order_selfadjoint_params(lam: &Rational, p: &Rational, q: &Rational) -> Result<TriangularFamilyParams> {
    if p.is_zero() && q.is_zero() {
        return Err(Error::ExcludedParameter("[p:q] = [0:0] is not a point of the projective line".into()));
    }
    TriangularFamilyParams::new(
        2,
        lam.clone(),
        vec![vec![Rational::one()], vec![-Rational::one(), rat(2, 1)], vec![p.clone(), -q.clone(), q.clone()]],
    )
}

pub fn second_order_selfadjoint_family(
    delta: &DensityOperator,
    lam: &Rational,
    p: &Rational,
    q: &Rational,
    table: &DloTable,
) -> Result<DensityOperator> {
    delta.require_weight_free()?;
    let params = second_order_selfadjoint_params(lam, p, q)?;
    triangular_family_lift(delta, &params, table)
}

/// Projectively invariant scalar of a second-order operator
/// `S^{ik} d_i d_k + A^i d_i + F` on weight-`lam` densities:
/// `F - lam d_i A^i + (lam a_d(lam) - b_d(lam)) d_i d_k S^{ik}`.
pub fn schwarzian_scalar(delta: &DensityOperator, lam: &Rational) -> Result<MultiPoly> {
    let parts = SecondOrderParts::of(delta)?;
    let d = delta.dim();
    let coeff = lam * a_d(d).eval(lam) - b_d(d).eval(lam);
    let mut div_a = MultiPoly::zero(d);
    let mut divdiv_s = MultiPoly::zero(d);
    for i in 0..d {
        div_a = &div_a + &parts.a1[i].diff(i);
        for k in 0..d {
            divdiv_s = &divdiv_s + &parts.a2[i][k].diff(i).diff(k);
        }
    }
    Ok(&(&parts.a0 - &div_a.scale(lam)) + &divdiv_s.scale(&coeff))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::int;
    use crate::algebra::Exponents;
    use crate::density::ad_action_at;
    use crate::pencil::{canonical_second_order_lift, first_order_pencil};
    use crate::projective::table::solve_dlo_table;

    fn x(dim: usize, i: usize) -> MultiPoly {
        MultiPoly::var(dim, i)
    }
    fn mul(p: MultiPoly) -> DensityOperator {
        DensityOperator::multiplication(p)
    }
    fn d(dim: usize, i: usize) -> DensityOperator {
        DensityOperator::partial(dim, i)
    }

    #[test]
    fn generator_lists() {
        let g1 = proj_generators(1).unwrap();
        assert_eq!(g1.len(), 3);
        assert_eq!(g1[2].component(0), &x(1, 0).pow(2));
        assert_eq!(proj_generators(2).unwrap().len(), 8);
        assert!(proj_generators(0).is_err());
    }

    #[test]
    fn second_order_symbol_and_quantization() {
        let dim = 2;
        let t = solve_dlo_table(dim, 2).unwrap();
        let lam = rat(2, 3);
        let s12 = &x(dim, 0) * &x(dim, 1);
        let delta = &(&(&mul(s12.clone()) * &(&d(dim, 0) * &d(dim, 1))) + &(&mul(x(dim, 0).pow(2)) * &d(dim, 1)))
            + &mul(x(dim, 1));
        let sym = full_symbol(&delta, &lam, &t).unwrap();
        // S^{12} = S^{21} = x1 x2 / 2, A^2 = x1^2, F = x2
        let dd = Rational::from_integer((dim as i64).into());
        let g = &lam * (&dd + int(1)) + int(1);
        let c1 = int(-2) * &g / (&dd + int(3));
        let c2 = &lam * &g / (&dd + int(2));
        let div_s = [x(dim, 0).scale(&rat(1, 2)), x(dim, 1).scale(&rat(1, 2))];
        assert_eq!(sym.coefficient(&Exponents::from_slice(&[1, 1])), s12);
        assert_eq!(sym.coefficient(&Exponents::from_slice(&[1, 0])), div_s[0].scale(&c1));
        assert_eq!(sym.coefficient(&Exponents::from_slice(&[0, 1])), &div_s[1].scale(&c1) + &x(dim, 0).pow(2));
        // d_i d_k S^{ik} = 2 * d1 d2 (x1 x2 / 2) = 1
        let expected_0 = &MultiPoly::constant(dim, c2) + &x(dim, 1);
        assert_eq!(sym.coefficient(&Exponents::zero(dim)), expected_0);
        assert_eq!(quantize(&sym, &lam, &t).unwrap(), delta);
    }

    #[test]
    fn dlo_first_order_matches_pencil() {
        let dim = 1;
        let t = solve_dlo_table(dim, 1).unwrap();
        let lam = rat(5, 7);
        let delta = &(&mul(x(dim, 0).pow(3)) * &d(dim, 0)) + &mul(x(dim, 0));
        let out = dlo_pencil(&delta, &lam, &t).unwrap();
        assert_eq!(out, first_order_pencil(&delta, &lam, &int(0), &int(1)).unwrap());
        let f = mul(x(dim, 0));
        assert_eq!(dlo_pencil(&f, &lam, &t).unwrap(), f);
    }

    #[test]
    fn decomposition_sums_back() {
        let dim = 1;
        let t = solve_dlo_table(dim, 3).unwrap();
        let lam = rat(-1, 4);
        let d1 = d(dim, 0);
        let delta = &(&mul(x(dim, 0).pow(3)) * &(&(&d1 * &d1) * &d1)) + &(&mul(x(dim, 0)) * &d1);
        let parts = graded_decompose(&delta, &lam, &t).unwrap();
        assert_eq!(parts.len(), 4);
        let total = parts.iter().fold(DensityOperator::zero(dim), |acc, p| &acc + p);
        assert_eq!(total, delta);
        let f = mul(x(dim, 0));
        let parts = graded_decompose(&f, &lam, &t).unwrap();
        assert!(parts[..3].iter().all(DensityOperator::is_zero));
        assert_eq!(parts[3], f);
    }

    #[test]
    fn triangular_family_examples() {
        let dim = 1;
        let t = solve_dlo_table(dim, 2).unwrap();
        let lam = rat(1, 3);
        let delta = &(&mul(x(dim, 0).pow(2)) * &d(dim, 0)) + &mul(x(dim, 0));
        let anti = TriangularFamilyParams::new(1, lam.clone(), vec![vec![int(1)], vec![int(-1), int(2)]]).unwrap();
        let out = triangular_family_lift(&delta, &anti, &t).unwrap();
        assert_eq!(out, first_order_pencil(&delta, &lam, &int(2), &int(-1)).unwrap());

        let dlo = TriangularFamilyParams::dlo(2, lam.clone());
        assert_eq!(triangular_family_lift(&delta, &dlo, &t).unwrap(), dlo_pencil(&delta, &lam, &t).unwrap());

        let singular = TriangularFamilyParams::new(1, rat(1, 2), vec![vec![int(1)], vec![int(-1), int(2)]]).unwrap();
        assert_eq!(triangular_family_lift(&delta, &singular, &t).unwrap_err(), Error::RowSingular { row: 1 });
        assert!(TriangularFamilyParams::new(1, lam.clone(), vec![vec![int(1), int(1)], vec![int(1)]]).is_err());
    }

    #[test]
    fn self_adjointness_examples() {
        let lam = int(3);
        let good = TriangularFamilyParams::new(1, lam.clone(), vec![vec![int(1)], vec![int(-1), int(2)]]).unwrap();
        let report = self_adjointness_filter(&good);
        assert!(report.holds);
        assert_eq!(report.certificate[1], LambdaPoly::linear(int(0), int(2)));

        let bad = TriangularFamilyParams::new(1, lam.clone(), vec![vec![int(1)], vec![int(0), int(1)]]).unwrap();
        assert_eq!(self_adjointness_filter(&bad).failing_rows, vec![1]);

        let params = second_order_selfadjoint_params(&lam, &int(5), &int(-3)).unwrap();
        assert!(self_adjointness_filter(&params).holds);
    }

    #[test]
    fn selfadjoint_family_examples() {
        let dim = 1;
        let t = solve_dlo_table(dim, 2).unwrap();
        let lam = rat(3, 2);
        let d1 = d(dim, 0);
        let delta = &(&(&mul(x(dim, 0).pow(2)) * &(&d1 * &d1)) + &(&mul(x(dim, 0)) * &d1)) + &mul(x(dim, 0).pow(2));
        let canonical = canonical_second_order_lift(&delta, &lam).unwrap();
        let at_01 = second_order_selfadjoint_family(&delta, &lam, &int(0), &int(1), &t).unwrap();
        assert_eq!(at_01, canonical);
        let other = second_order_selfadjoint_family(&delta, &lam, &int(2), &int(7), &t).unwrap();
        assert_eq!(other.adjoint(), other);
        assert_eq!(other.restrict(&lam), delta);
        let dd = &d1 * &d1;
        assert_eq!(second_order_selfadjoint_family(&dd, &lam, &int(2), &int(7), &t).unwrap(), dd);
    }

    #[test]
    fn schwarzian_examples() {
        let d1 = d(1, 0);
        assert!(schwarzian_scalar(&(&d1 * &d1), &int(2)).unwrap().is_zero());
        let f = x(1, 0).pow(2);
        assert_eq!(schwarzian_scalar(&mul(f.clone()), &int(2)).unwrap(), f);
        let s = x(1, 0).pow(4);
        let delta = &mul(s.clone()) * &(&d1 * &d1);
        assert_eq!(schwarzian_scalar(&delta, &int(1)).unwrap(), s.diff(0).diff(0));
    }

    #[test]
    fn schwarzian_fails_for_cubic_field() {
        // S_{ad_K d^2} = 4 lam (lam - 1) for K = x^3 d, nonzero off {0, 1}
        let dim = 1;
        let lam = int(2);
        let d1 = d(dim, 0);
        let delta = &d1 * &d1;
        let k = VectorField::new(vec![x(dim, 0).pow(3)]).unwrap();
        let lhs = schwarzian_scalar(&ad_action_at(&k, &delta, &lam).unwrap(), &lam).unwrap();
        let rhs = k.derive(&schwarzian_scalar(&delta, &lam).unwrap());
        assert_ne!(lhs, rhs);
    }
}
