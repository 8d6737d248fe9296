//! JSON documents exchanged by the command-line driver and the C interface.
//!
//! Polynomials travel as DSL strings and rationals as `"p/q"` strings, so
//! every value round-trips exactly.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::dsl::parse_poly;
use crate::algebra::{parse_rational, Exponents, Rational};
use crate::density::{DensityOperator, OperatorTerm, QuasiDensity, VectorField};
use crate::error::{Error, Result};
use crate::projective::{SymbolPoly, TriangularFamilyParams};
use crate::sdiff::{SdiffFamilyParams, VolumeStructure};

fn check_len(what: &str, got: usize, dim: usize) -> Result<()> {
    if got == dim {
        Ok(())
    } else {
        Err(Error::ShapeMismatch(format!("{what} has length {got}, expected {dim}")))
    }
}

fn rationals(values: &[String]) -> Result<Vec<Rational>> {
    values.iter().map(|v| parse_rational(v)).collect()
}

fn strings(values: &[Rational]) -> Vec<String> {
    values.iter().map(ToString::to_string).collect()
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermJson {
    pub coeff: String,
    pub alpha: Vec<u16>,
    pub w: u32,
}

/// `{"dim": d, "terms": [{"coeff": "<poly>", "alpha": [..], "w": k}]}`,
/// terms in canonical order on output and in any order on input. The
/// optional `text` rendering is ignored on input, so command output can be
/// fed back in.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorJson {
    pub dim: usize,
    pub terms: Vec<TermJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
}

impl OperatorJson {
    pub fn from_operator(op: &DensityOperator) -> Self {
        OperatorJson {
            dim: op.dim(),
            terms: op
                .terms()
                .map(|(k, c)| TermJson { coeff: c.to_string(), alpha: k.alpha.as_slice().to_vec(), w: k.wpow })
                .collect(),
            text: None,
        }
    }

    pub fn to_operator(&self) -> Result<DensityOperator> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            check_len("alpha", t.alpha.len(), self.dim)?;
            terms.push(OperatorTerm {
                coeff: parse_poly(&t.coeff, self.dim)?,
                alpha: Exponents::from_slice(&t.alpha),
                wpow: t.w,
            });
        }
        DensityOperator::from_terms(self.dim, terms)
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartJson {
    pub s: String,
    pub weight: String,
}

/// `{"dim": d, "parts": [{"s": "<poly>", "weight": "<rational>"}]}`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensityJson {
    pub dim: usize,
    pub parts: Vec<PartJson>,
}

impl DensityJson {
    pub fn from_density(q: &QuasiDensity) -> Self {
        DensityJson {
            dim: q.dim(),
            parts: q.parts().map(|(w, s)| PartJson { s: s.to_string(), weight: w.to_string() }).collect(),
        }
    }

    pub fn to_density(&self) -> Result<QuasiDensity> {
        let mut parts = Vec::with_capacity(self.parts.len());
        for p in &self.parts {
            parts.push((parse_rational(&p.weight)?, parse_poly(&p.s, self.dim)?));
        }
        QuasiDensity::from_parts(self.dim, parts)
    }
}

/// `{"dim": d, "gamma": ["<poly>", ...]}`.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VolumeJson {
    pub dim: usize,
    pub gamma: Vec<String>,
}

impl VolumeJson {
    pub fn to_volume(&self) -> Result<VolumeStructure> {
        check_len("gamma", self.gamma.len(), self.dim)?;
        let gamma = self.gamma.iter().map(|g| parse_poly(g, self.dim)).collect::<Result<_>>()?;
        VolumeStructure::new(gamma)
    }

    pub fn from_volume(v: &VolumeStructure) -> Self {
        VolumeJson { dim: v.dim(), gamma: v.gamma().iter().map(ToString::to_string).collect() }
    }
}

/// `{"n": n, "lambda": "<r>", "b": "<r>", "c": [...], "d": [...]}` with
/// `c` and `d` listing the coefficients of `(w - lambda)^k` for `k = 1..n`.
/// Missing trailing entries are zero.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SdiffParamsJson {
    pub n: usize,
    pub lambda: String,
    pub b: String,
    #[serde(default)]
    pub c: Vec<String>,
    #[serde(default)]
    pub d: Vec<String>,
}

impl SdiffParamsJson {
    pub fn to_params(&self) -> Result<SdiffFamilyParams> {
        let padded = |v: &[String]| -> Result<Vec<Rational>> {
            let mut out = rationals(v)?;
            if out.len() < self.n {
                out.resize(self.n, Rational::zero());
            }
            Ok(out)
        };
        SdiffFamilyParams::new(
            self.n,
            parse_rational(&self.lambda)?,
            parse_rational(&self.b)?,
            padded(&self.c)?,
            padded(&self.d)?,
        )
    }

    pub fn from_params(p: &SdiffFamilyParams) -> Self {
        SdiffParamsJson {
            n: p.n,
            lambda: p.lam.to_string(),
            b: p.b.to_string(),
            c: strings(&p.c),
            d: strings(&p.dcoef),
        }
    }
}

/// `{"rows": [["a00"], ["a10", "a11"], ...]}`, row `i` listing the
/// coefficients of `P_i(w)` from the constant term up.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub rows: Vec<Vec<String>>,
}

impl MatrixJson {
    pub fn to_params(&self, lam: Rational) -> Result<TriangularFamilyParams> {
        if self.rows.is_empty() {
            return Err(Error::ShapeMismatch("matrix has no rows".into()));
        }
        let rows = self.rows.iter().map(|r| rationals(r)).collect::<Result<Vec<_>>>()?;
        TriangularFamilyParams::new(self.rows.len() - 1, lam, rows)
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolTermJson {
    pub coeff: String,
    pub xi: Vec<u16>,
}

/// `{"dim": d, "terms": [{"coeff": "<poly>", "xi": [..]}]}`, highest
/// momentum degree first.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolJson {
    pub dim: usize,
    pub terms: Vec<SymbolTermJson>,
}

impl SymbolJson {
    pub fn from_symbol(s: &SymbolPoly) -> Self {
        SymbolJson {
            dim: s.dim(),
            terms: s
                .terms()
                .map(|(xi, c)| SymbolTermJson { coeff: c.to_string(), xi: xi.as_slice().to_vec() })
                .collect(),
        }
    }

    pub fn to_symbol(&self) -> Result<SymbolPoly> {
        let mut out = SymbolPoly::zero(self.dim);
        for t in &self.terms {
            check_len("xi", t.xi.len(), self.dim)?;
            out.add_term(Exponents::from_slice(&t.xi), parse_poly(&t.coeff, self.dim)?);
        }
        Ok(out)
    }
}

/// Components of a vector field as DSL strings.
pub fn field_strings(x: &VectorField) -> Vec<String> {
    x.components().iter().map(ToString::to_string).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::int;
    use crate::io::parse_operator;

    #[test]
    fn operator_round_trip() {
        let op = parse_operator("2/3*x1^2*d1*d2*w - x2 + w^2", 2).unwrap();
        let json = OperatorJson::from_operator(&op);
        let text = serde_json::to_string(&json).unwrap();
        assert_eq!(
            text,
            r#"{"dim":2,"terms":[{"coeff":"2/3*x1^2","alpha":[1,1],"w":1},{"coeff":"-x2","alpha":[0,0],"w":0},{"coeff":"1","alpha":[0,0],"w":2}]}"#
        );
        let back: OperatorJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_operator().unwrap(), op);
    }

    #[test]
    fn input_order_is_free_and_shapes_are_checked() {
        let text = r#"{"dim":1,"terms":[{"coeff":"1","alpha":[0],"w":0},{"coeff":"x1","alpha":[1],"w":0},{"coeff":"1","alpha":[0],"w":0}]}"#;
        let op = serde_json::from_str::<OperatorJson>(text).unwrap().to_operator().unwrap();
        assert_eq!(op, parse_operator("x1 d1 + 2", 1).unwrap());
        let bad = r#"{"dim":2,"terms":[{"coeff":"1","alpha":[0],"w":0}]}"#;
        assert_eq!(serde_json::from_str::<OperatorJson>(bad).unwrap().to_operator().unwrap_err().code(), "E_DIM");
        let unknown = r#"{"dim":1,"terms":[],"extra":1}"#;
        assert!(serde_json::from_str::<OperatorJson>(unknown).is_err());
    }

    #[test]
    fn other_documents() {
        let d: DensityJson = serde_json::from_str(r#"{"dim":1,"parts":[{"s":"x1","weight":"1/2"}]}"#).unwrap();
        let q = d.to_density().unwrap();
        assert_eq!(DensityJson::from_density(&q), d);

        let v: VolumeJson = serde_json::from_str(r#"{"dim":2,"gamma":["x1","x2"]}"#).unwrap();
        assert!(v.to_volume().is_ok());
        let curl: VolumeJson = serde_json::from_str(r#"{"dim":2,"gamma":["x2","0"]}"#).unwrap();
        assert_eq!(curl.to_volume().unwrap_err().code(), "E_DOMAIN");

        let p: SdiffParamsJson = serde_json::from_str(r#"{"n":2,"lambda":"1/3","b":"1","c":["2"]}"#).unwrap();
        let params = p.to_params().unwrap();
        assert_eq!(params.b, int(1));
        assert!(SdiffParamsJson::from_params(&params).to_params().is_ok());

        let m: MatrixJson = serde_json::from_str(r#"{"rows":[["1"],["-1","2"]]}"#).unwrap();
        assert_eq!(m.to_params(int(3)).unwrap().n, 1);
        let decimal: MatrixJson = serde_json::from_str(r#"{"rows":[["0.5"]]}"#).unwrap();
        assert_eq!(decimal.to_params(int(3)).unwrap_err().code(), "E_PARSE");

        let s = crate::io::parse_symbol("x1 p1^2 + 3", 1).unwrap();
        let sj = SymbolJson::from_symbol(&s);
        assert_eq!(
            serde_json::to_string(&sj).unwrap(),
            r#"{"dim":1,"terms":[{"coeff":"x1","xi":[2]},{"coeff":"3","xi":[0]}]}"#
        );
        assert_eq!(sj.to_symbol().unwrap(), s);
    }
}
