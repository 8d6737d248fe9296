//! Randomized property suites behind the `check` verb.

use clap::ValueEnum;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use super::Method;
use crate::algebra::{rat, Rational};
use crate::density::{ad_action, ad_action_at, divergence_hat, DensityOperator, HatVectorField, VectorField};
use crate::error::{Error, Result};
use crate::io::field_strings;
use crate::pencil::{canonical_second_order_lift, duval_ovsienko_iso, first_order_pencil};
use crate::projective::{
    dlo_pencil, dlo_table, full_symbol, proj_generators, quantize, schwarzian_scalar, second_order_selfadjoint_family,
    triangular_family_lift, DloTable, SymbolPoly, TriangularFamilyParams,
};
use crate::random::Sampler;
use crate::sdiff::{distinguished_lift, sdiff_family_lift, volume_lift, SdiffFamilyParams};

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
pub enum Property {
    /// `ad_K(lift(D)) = lift(ad_K D)`.
    Equivariance,
    /// Adjoint is an involutive anti-homomorphism.
    Adjoint,
    /// `div X = -(X + X*)` and `div L_X = 0`.
    Divergence,
    /// Self-adjointness (up to sign) of a lifting.
    Selfadjoint,
    /// Symbol map and quantization are mutually inverse.
    Inverse,
    /// Scalar transformation law of the projective invariant.
    Schwarzian,
}

impl Property {
    fn name(self) -> &'static str {
        match self {
            Property::Equivariance => "equivariance",
            Property::Adjoint => "adjoint",
            Property::Divergence => "divergence",
            Property::Selfadjoint => "selfadjoint",
            Property::Inverse => "inverse",
            Property::Schwarzian => "schwarzian",
        }
    }
}

#[derive(Serialize, Debug)]
pub struct Failure {
    pub trial: usize,
    pub detail: Value,
}

#[derive(Serialize, Debug)]
pub struct CheckReport {
    pub check: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<&'static str>,
    pub dim: usize,
    pub n: usize,
    pub seed: u64,
    pub trials: usize,
    pub passed: usize,
    pub failed: usize,
    pub failures: Vec<Failure>,
}

struct Ctx {
    method: Option<Method>,
    dim: usize,
    n: usize,
    table: Option<std::sync::Arc<DloTable>>,
}

type Trial = Result<Option<Value>>;
type Lift<'a> = Box<dyn Fn(&DensityOperator) -> Result<DensityOperator> + 'a>;

/// Runs `trials` independent trials (concurrently); failures are listed by
/// trial index.
pub fn run_check(
    property: Property,
    method: Option<Method>,
    dim: usize,
    n: usize,
    trials: usize,
    seed: u64,
) -> Result<CheckReport> {
    if dim == 0 {
        return Err(Error::ShapeMismatch("dimension must be at least 1".into()));
    }
    let needs_method = matches!(property, Property::Equivariance | Property::Selfadjoint);
    if needs_method && method.is_none() {
        return Err(Error::parse(1, 1, format!("check {} needs --method", property.name())));
    }
    let projective = matches!(method, Some(Method::Dlo | Method::Triangular | Method::Selfadj2))
        || matches!(property, Property::Inverse);
    let table = if projective { Some(dlo_table(dim, n.max(2))?) } else { None };
    let ctx = Ctx { method, dim, n, table };
    let results: Vec<Trial> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut s = Sampler::for_trial(seed, i);
            match property {
                Property::Equivariance => equivariance(&ctx, &mut s),
                Property::Adjoint => adjoint_axioms(&ctx, &mut s),
                Property::Divergence => divergence(&ctx, &mut s),
                Property::Selfadjoint => selfadjoint(&ctx, &mut s),
                Property::Inverse => inverse(&ctx, &mut s),
                Property::Schwarzian => schwarzian(&ctx, &mut s),
            }
        })
        .collect();
    let mut failures = Vec::new();
    for (trial, r) in results.into_iter().enumerate() {
        match r {
            Ok(None) => {}
            Ok(Some(detail)) => failures.push(Failure { trial, detail }),
            Err(e) => {
                failures.push(Failure { trial, detail: json!({"error": {"code": e.code(), "message": e.to_string()}}) })
            }
        }
    }
    Ok(CheckReport {
        check: property.name(),
        method: method.map(Method::name),
        dim,
        n,
        seed,
        trials,
        passed: trials - failures.len(),
        failed: failures.len(),
        failures,
    })
}

fn mismatch(
    what: &str,
    k: Option<&VectorField>,
    delta: &DensityOperator,
    lam: &Rational,
    lhs: &DensityOperator,
    rhs: &DensityOperator,
) -> Value {
    json!({
        "property": what,
        "k": k.map(field_strings),
        "delta": delta.to_string(),
        "lambda": lam.to_string(),
        "lhs": lhs.to_string(),
        "rhs": rhs.to_string(),
    })
}

const EXCLUDED_CANONICAL: [(i64, i64); 3] = [(0, 1), (1, 2), (1, 1)];

fn avoid(s: &mut Sampler, excluded: &[(i64, i64)]) -> Rational {
    let ex: Vec<Rational> = excluded.iter().map(|&(a, b)| rat(a, b)).collect();
    s.rational_avoiding(&ex)
}

/// `p, q` with `p lam + q != 0`.
fn first_order_point(s: &mut Sampler, lam: &Rational) -> (Rational, Rational) {
    loop {
        let (p, q) = (s.rational(), s.rational());
        if !(&p * lam + &q).is_zero() {
            return (p, q);
        }
    }
}

fn random_rows(s: &mut Sampler, n: usize, lam: &Rational) -> TriangularFamilyParams {
    loop {
        let rows: Vec<Vec<Rational>> = (0..=n).map(|i| (0..=i).map(|_| s.rational()).collect()).collect();
        let Ok(params) = TriangularFamilyParams::new(n, lam.clone(), rows) else {
            continue;
        };
        if (0..=n).all(|i| !params.row_poly(i).eval(lam).is_zero()) {
            return params;
        }
    }
}

/// `[p:q]` with a nonsingular last row at `lam`.
fn selfadjoint_point(s: &mut Sampler, lam: &Rational) -> (Rational, Rational) {
    loop {
        let (p, q) = (s.rational(), s.rational());
        if !(&p + &q * lam * (lam - Rational::one())).is_zero() {
            return (p, q);
        }
    }
}

fn equivariance(ctx: &Ctx, s: &mut Sampler) -> Trial {
    let method = ctx.method.expect("checked by caller");
    let dim = ctx.dim;
    match method {
        Method::FirstOrder | Method::Canonical2 | Method::Iso => {
            let k = s.field(dim, 3);
            let order = if method == Method::FirstOrder { 1 } else { 2 };
            let delta = s.operator_of_order(dim, order, 2, 4);
            let lam = if method == Method::FirstOrder { s.rational() } else { avoid(s, &EXCLUDED_CANONICAL) };
            let image = ad_action_at(&k, &delta, &lam)?;
            let (lhs, rhs) = match method {
                Method::FirstOrder => {
                    let (p, q) = first_order_point(s, &lam);
                    let lift = |d: &DensityOperator| first_order_pencil(d, &lam, &p, &q);
                    (ad_action(&k, &lift(&delta)?)?, lift(&image)?)
                }
                Method::Canonical2 => (
                    ad_action(&k, &canonical_second_order_lift(&delta, &lam)?)?,
                    canonical_second_order_lift(&image, &lam)?,
                ),
                _ => {
                    let mu = avoid(s, &EXCLUDED_CANONICAL);
                    (
                        ad_action_at(&k, &duval_ovsienko_iso(&delta, &lam, &mu)?, &mu)?,
                        duval_ovsienko_iso(&image, &lam, &mu)?,
                    )
                }
            };
            Ok((lhs != rhs).then(|| mismatch("equivariance", Some(&k), &delta, &lam, &lhs, &rhs)))
        }
        Method::Volume | Method::SdiffFamily | Method::Disting => {
            let (phi, vol) = s.volume(dim, 2);
            let k = s.volume_preserving_field(&phi);
            let n = ctx.n;
            let delta = s.operator_of_order(dim, n, 2, 4);
            let lam = if method == Method::Disting { avoid(s, &[(1, 2)]) } else { s.rational() };
            let params = if method == Method::SdiffFamily {
                let c = (0..n).map(|_| s.rational()).collect();
                let d = (0..n).map(|_| s.rational()).collect();
                Some(SdiffFamilyParams::new(n, lam.clone(), s.rational(), c, d)?)
            } else {
                None
            };
            let lift = |d: &DensityOperator| match method {
                Method::Volume => volume_lift(d, &lam, &vol),
                Method::SdiffFamily => sdiff_family_lift(d, params.as_ref().expect("set above"), &vol),
                _ => distinguished_lift(d, n, &lam, &vol),
            };
            let lhs = ad_action(&k, &lift(&delta)?)?;
            let rhs = lift(&ad_action_at(&k, &delta, &lam)?)?;
            Ok((lhs != rhs).then(|| mismatch("equivariance", Some(&k), &delta, &lam, &lhs, &rhs)))
        }
        Method::Dlo | Method::Triangular | Method::Selfadj2 => {
            let table = ctx.table.as_ref().expect("projective table");
            let n = if method == Method::Selfadj2 { 2 } else { ctx.n };
            let lam = if method == Method::Selfadj2 { avoid(s, &[(1, 2)]) } else { s.rational() };
            let delta = s.operator_of_order(dim, n, 2, 4);
            let lift: Lift<'_> = match method {
                Method::Dlo => Box::new(|d| dlo_pencil(d, &lam, table)),
                Method::Triangular => {
                    let params = random_rows(s, n, &lam);
                    Box::new(move |d| triangular_family_lift(d, &params, table))
                }
                _ => {
                    let (p, q) = selfadjoint_point(s, &lam);
                    let at = lam.clone();
                    Box::new(move |d| second_order_selfadjoint_family(d, &at, &p, &q, table))
                }
            };
            let lifted = lift(&delta)?;
            for k in proj_generators(dim)? {
                let lhs = ad_action(&k, &lifted)?;
                let rhs = lift(&ad_action_at(&k, &delta, &lam)?)?;
                if lhs != rhs {
                    return Ok(Some(mismatch("equivariance", Some(&k), &delta, &lam, &lhs, &rhs)));
                }
            }
            Ok(None)
        }
    }
}

fn adjoint_axioms(ctx: &Ctx, s: &mut Sampler) -> Trial {
    let dim = ctx.dim;
    let a = s.operator(dim, 3, 2, 1, 4);
    let b = s.operator(dim, 3, 2, 1, 4);
    let ab = a.compose(&b)?;
    let mut failed = Vec::new();
    if ab.adjoint() != b.adjoint().compose(&a.adjoint())? {
        failed.push("anti-homomorphism");
    }
    if a.adjoint().adjoint() != a {
        failed.push("involution");
    }
    let w = DensityOperator::weight(dim);
    if w.adjoint() != &DensityOperator::identity(dim) - &w {
        failed.push("w* = 1 - w");
    }
    for i in 0..dim {
        let d = DensityOperator::partial(dim, i);
        if d.adjoint() != -&d {
            failed.push("d* = -d");
        }
    }
    Ok((!failed.is_empty()).then(|| json!({"failed": failed, "a": a.to_string(), "b": b.to_string()})))
}

fn divergence(ctx: &Ctx, s: &mut Sampler) -> Trial {
    let dim = ctx.dim;
    let x = s.field(dim, 2);
    let hat = HatVectorField::new(x.clone(), s.poly(dim, 2, 3))?;
    let op = hat.to_operator();
    let mut failed = Vec::new();
    if divergence_hat(&hat) != -&(&op + &op.adjoint()) {
        failed.push("div X = -(X + X*)");
    }
    let lie = HatVectorField::new(x.clone(), x.divergence())?;
    if !divergence_hat(&lie).is_zero() || lie.to_operator() != x.lie_lift() {
        failed.push("div L_X = 0");
    }
    if x.lie_lift().adjoint() != -&x.lie_lift() {
        failed.push("L_X* = -L_X");
    }
    Ok((!failed.is_empty())
        .then(|| json!({"failed": failed, "field": field_strings(&x), "vertical": hat.vertical.to_string()})))
}

fn selfadjoint(ctx: &Ctx, s: &mut Sampler) -> Trial {
    let method = ctx.method.expect("checked by caller");
    let dim = ctx.dim;
    let (n, lam) = match method {
        Method::Canonical2 => (2, avoid(s, &EXCLUDED_CANONICAL)),
        Method::Selfadj2 => (2, avoid(s, &[(1, 2)])),
        Method::Disting => (ctx.n, avoid(s, &[(1, 2)])),
        other => {
            return Err(Error::ExcludedParameter(format!(
                "check selfadjoint supports canonical2, selfadj2 and disting, not {}",
                other.name()
            )))
        }
    };
    let delta = s.operator_of_order(dim, n, 2, 4);
    let (lifted, sign) = match method {
        Method::Canonical2 => (canonical_second_order_lift(&delta, &lam)?, 1),
        Method::Selfadj2 => {
            let (p, q) = selfadjoint_point(s, &lam);
            let table = ctx.table.as_ref().expect("projective table");
            (second_order_selfadjoint_family(&delta, &lam, &p, &q, table)?, 1)
        }
        _ => {
            let (_, vol) = s.volume(dim, 2);
            (distinguished_lift(&delta, n, &lam, &vol)?, if n % 2 == 0 { 1 } else { -1 })
        }
    };
    let expected = lifted.scale(&Rational::from_integer(sign.into()));
    let mut failed = Vec::new();
    if lifted.adjoint() != expected {
        failed.push("adjoint");
    }
    if lifted.restrict(&lam) != delta {
        failed.push("restriction");
    }
    if method == Method::Canonical2 && !lifted.apply_to_unit().is_zero() {
        failed.push("normalisation");
    }
    Ok((!failed.is_empty()).then(
        || json!({"failed": failed, "delta": delta.to_string(), "lambda": lam.to_string(), "lift": lifted.to_string()}),
    ))
}

fn inverse(ctx: &Ctx, s: &mut Sampler) -> Trial {
    let table = ctx.table.as_ref().expect("projective table");
    let dim = ctx.dim;
    let lam = s.rational();
    let delta = s.operator(dim, ctx.n, 2, 0, 5);
    let sym = full_symbol(&delta, &lam, table)?;
    let back = quantize(&sym, &lam, table)?;
    let mut failed = Vec::new();
    if back != delta {
        failed.push("Q(sigma(D)) = D");
    }
    let mut random_sym = SymbolPoly::zero(dim);
    for _ in 0..4 {
        let k = s.below(ctx.n + 1);
        random_sym.add_term(s.exponents(dim, k), s.poly(dim, 2, 2));
    }
    let round = full_symbol(&quantize(&random_sym, &lam, table)?, &lam, table)?;
    if round != random_sym {
        failed.push("sigma(Q(s)) = s");
    }
    Ok((!failed.is_empty()).then(|| {
        json!({"failed": failed, "delta": delta.to_string(), "symbol": random_sym.to_string(), "lambda": lam.to_string()})
    }))
}

fn schwarzian(ctx: &Ctx, s: &mut Sampler) -> Trial {
    let dim = ctx.dim;
    let delta = s.operator_of_order(dim, 2, 2, 4);
    let lam = s.rational();
    let base = schwarzian_scalar(&delta, &lam)?;
    for k in proj_generators(dim)? {
        let lhs = schwarzian_scalar(&ad_action_at(&k, &delta, &lam)?, &lam)?;
        let rhs = k.derive(&base);
        if lhs != rhs {
            return Ok(Some(json!({
                "k": field_strings(&k),
                "delta": delta.to_string(),
                "lambda": lam.to_string(),
                "lhs": lhs.to_string(),
                "rhs": rhs.to_string(),
            })));
        }
    }
    Ok(None)
}
