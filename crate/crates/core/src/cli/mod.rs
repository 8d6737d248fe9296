//! Command-line driver. [`run`] is the whole program minus process exit, so
//! it can be exercised in-process.

mod checks;

use std::ffi::OsString;
use std::io::Read;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::algebra::{parse_rational, Rational};
use crate::density::{decompose_first_order, DensityOperator};
use crate::error::{Error, Result};
use crate::io::{
    field_strings, max_index, parse_operator, parse_poly, parse_symbol, DensityJson, MatrixJson, OperatorJson,
    SdiffParamsJson, SymbolJson, VolumeJson,
};
use crate::pencil::{canonical_second_order_lift, duval_ovsienko_iso, first_order_pencil};
use crate::projective::{
    dlo_pencil, dlo_table, full_symbol, graded_decompose, quantize, quantize_pencil, schwarzian_scalar,
    second_order_selfadjoint_family, triangular_family_lift, verify_table,
};
use crate::sdiff::{distinguished_lift, sdiff_family_lift, volume_lift, VolumeStructure};

pub use checks::Property;

/// Exit status for success.
pub const EXIT_OK: i32 = 0;
/// Exit status of a `check` verb that found a counterexample.
pub const EXIT_CHECK_FAILED: i32 = 1;
/// Exit status for any error.
pub const EXIT_ERROR: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "densops", version, about = "Exact calculus of differential operators on densities")]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Subcommand, Debug)]
enum Verb {
    /// Compose operators left to right.
    Compose(ComposeArgs),
    /// Canonical adjoint.
    Adjoint(OpArgs),
    /// Substitute a weight for w.
    Restrict(LambdaOpArgs),
    /// Apply an operator to a quasi-polynomial density.
    Apply(ApplyArgs),
    /// Pencil lifting of an operator on weight-lambda densities.
    Lift(LiftArgs),
    /// First-order or graded decomposition.
    Decompose(DecomposeArgs),
    /// Projectively equivariant full symbol.
    Symbol(LambdaOpArgs),
    /// Projectively equivariant quantization of a symbol.
    Quantize(QuantizeArgs),
    /// Randomized property suites.
    Check(CheckArgs),
    /// Projectively invariant scalar of a second-order operator.
    Schwarzian(LambdaOpArgs),
    /// Coefficient table of the projective symbol map.
    Table(TableArgs),
}

#[derive(Args, Debug)]
struct OpSource {
    /// Operator in the text syntax.
    #[arg(long, allow_hyphen_values = true)]
    op: Option<String>,
    /// Operator as a JSON document (`-` reads stdin).
    #[arg(long, conflicts_with = "op")]
    op_file: Option<String>,
    /// Dimension; defaults to the largest index used.
    #[arg(long = "dim", visible_alias = "d")]
    dim: Option<usize>,
}

#[derive(Args, Debug)]
struct OpArgs {
    #[command(flatten)]
    src: OpSource,
}

#[derive(Args, Debug)]
struct LambdaOpArgs {
    #[command(flatten)]
    src: OpSource,
    #[arg(long, allow_hyphen_values = true)]
    lambda: String,
}

#[derive(Args, Debug)]
struct ComposeArgs {
    /// Operators, composed in the order given.
    #[arg(long, required = true, num_args = 1, allow_hyphen_values = true)]
    op: Vec<String>,
    #[arg(long = "dim", visible_alias = "d")]
    dim: Option<usize>,
}

#[derive(Args, Debug)]
struct ApplyArgs {
    #[command(flatten)]
    src: OpSource,
    /// Density JSON document.
    #[arg(long, conflicts_with_all = ["f", "weight"])]
    density_file: Option<String>,
    /// Coefficient of a homogeneous density `f |vol|^weight`.
    #[arg(long, allow_hyphen_values = true)]
    f: Option<String>,
    #[arg(long, allow_hyphen_values = true, default_value = "0")]
    weight: String,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
pub enum Method {
    FirstOrder,
    Canonical2,
    Iso,
    Volume,
    SdiffFamily,
    Disting,
    Dlo,
    Triangular,
    Selfadj2,
}

impl Method {
    fn name(self) -> &'static str {
        match self {
            Method::FirstOrder => "first-order",
            Method::Canonical2 => "canonical2",
            Method::Iso => "iso",
            Method::Volume => "volume",
            Method::SdiffFamily => "sdiff-family",
            Method::Disting => "disting",
            Method::Dlo => "dlo",
            Method::Triangular => "triangular",
            Method::Selfadj2 => "selfadj2",
        }
    }
}

#[derive(Args, Debug)]
struct LiftArgs {
    #[command(flatten)]
    src: OpSource,
    #[arg(long, value_enum)]
    method: Method,
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    p: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    q: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    mu: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    gamma_file: Option<String>,
    #[arg(long)]
    params_file: Option<String>,
    #[arg(long)]
    matrix_file: Option<String>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
enum DecomposeKind {
    FirstOrder,
    Graded,
}

#[derive(Args, Debug)]
struct DecomposeArgs {
    #[command(flatten)]
    src: OpSource,
    #[arg(long, value_enum)]
    method: DecomposeKind,
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<String>,
}

#[derive(Args, Debug)]
struct QuantizeArgs {
    /// Symbol in the text syntax, momenta `p1..pd`.
    #[arg(long, allow_hyphen_values = true)]
    symbol: String,
    /// Target weight; without it the result is the pencil in `w`.
    #[arg(long, allow_hyphen_values = true)]
    mu: Option<String>,
    #[arg(long = "dim", visible_alias = "d")]
    dim: Option<usize>,
}

#[derive(Args, Debug)]
struct CheckArgs {
    #[arg(value_enum)]
    property: Property,
    #[arg(long, value_enum)]
    method: Option<Method>,
    #[arg(long = "dim", visible_alias = "d", default_value_t = 1)]
    dim: usize,
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Args, Debug)]
struct TableArgs {
    #[arg(long = "dim", visible_alias = "d")]
    dim: usize,
    #[arg(long)]
    n: usize,
    /// Re-derive the table and compare it with the cached one.
    #[arg(long)]
    verify_table: bool,
}

/// Result of one invocation: exit status and the text for stdout.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Outcome {
    pub status: i32,
    pub stdout: String,
}

impl Outcome {
    fn json(status: i32, value: &impl Serialize) -> Self {
        let mut stdout = serde_json::to_string(value).expect("serializable output");
        stdout.push('\n');
        Outcome { status, stdout }
    }

    fn error(code: &str, message: &str) -> Self {
        Self::json(EXIT_ERROR, &json!({"error": {"code": code, "message": message}}))
    }
}

/// Runs one command line (including the program name) with `stdin`
/// available to `-` file arguments.
pub fn run<I, T>(args: I, stdin: &mut dyn Read) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                return Outcome { status: EXIT_OK, stdout: e.to_string() };
            }
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("invalid arguments");
            return Outcome::error("E_PARSE", first.trim_start_matches("error: "));
        }
    };
    match dispatch(cli.verb, stdin) {
        Ok(out) => out,
        Err(e) => Outcome::error(e.code(), &e.to_string()),
    }
}

fn rational_arg(name: &str, value: Option<&String>) -> Result<Rational> {
    let v = value.ok_or_else(|| Error::parse(1, 1, format!("missing --{name}")))?;
    parse_rational(v)
}

fn read_source(path: &str, stdin: &mut dyn Read) -> Result<String> {
    if path == "-" {
        let mut s = String::new();
        stdin.read_to_string(&mut s)?;
        Ok(s)
    } else {
        std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{path}: {e}")))
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &str, stdin: &mut dyn Read) -> Result<T> {
    Ok(serde_json::from_str(&read_source(path, stdin)?)?)
}

/// Dimension from an explicit flag or the largest index in `texts`, and
/// never below the dimensions of documents already loaded.
fn resolve_dim(explicit: Option<usize>, texts: &[&str], docs: &[usize]) -> Result<usize> {
    if let Some(d) = explicit {
        if d == 0 {
            return Err(Error::ShapeMismatch("dimension must be at least 1".into()));
        }
        return Ok(d);
    }
    let mut d = docs.iter().copied().max().unwrap_or(1);
    for t in texts {
        d = d.max(max_index(t)?.unwrap_or(1));
    }
    Ok(d)
}

fn require_dim(found: usize, dim: usize) -> Result<()> {
    if found == dim {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected: dim, found })
    }
}

/// Loads the operator named by `src`, together with the resolved dimension.
/// `texts` and `docs` feed dimension inference.
fn load_op(src: &OpSource, texts: &[&str], docs: &[usize], stdin: &mut dyn Read) -> Result<DensityOperator> {
    match (&src.op, &src.op_file) {
        (Some(text), _) => {
            let mut all = vec![text.as_str()];
            all.extend_from_slice(texts);
            let dim = resolve_dim(src.dim, &all, docs)?;
            parse_operator(text, dim)
        }
        (None, Some(path)) => {
            let doc: OperatorJson = read_json(path, stdin)?;
            let op = doc.to_operator()?;
            if let Some(d) = src.dim {
                require_dim(op.dim(), d)?;
            }
            Ok(op)
        }
        (None, None) => Err(Error::parse(1, 1, "missing --op or --op-file")),
    }
}

#[derive(Serialize)]
struct OperatorOut<'a> {
    dim: usize,
    terms: &'a [crate::io::TermJson],
    text: String,
}

fn operator_value(op: &DensityOperator) -> Value {
    let doc = OperatorJson::from_operator(op);
    serde_json::to_value(OperatorOut { dim: doc.dim, terms: &doc.terms, text: op.to_string() })
        .expect("serializable operator")
}

fn ok(value: Value) -> Result<Outcome> {
    Ok(Outcome::json(EXIT_OK, &value))
}

fn dispatch(verb: Verb, stdin: &mut dyn Read) -> Result<Outcome> {
    match verb {
        Verb::Compose(a) => {
            let texts: Vec<&str> = a.op.iter().map(String::as_str).collect();
            let dim = resolve_dim(a.dim, &texts, &[])?;
            let mut acc = DensityOperator::identity(dim);
            for t in &texts {
                acc = acc.compose(&parse_operator(t, dim)?)?;
            }
            ok(operator_value(&acc))
        }
        Verb::Adjoint(a) => ok(operator_value(&load_op(&a.src, &[], &[], stdin)?.adjoint())),
        Verb::Restrict(a) => {
            let lam = parse_rational(&a.lambda)?;
            ok(operator_value(&load_op(&a.src, &[], &[], stdin)?.restrict(&lam)))
        }
        Verb::Apply(a) => apply(a, stdin),
        Verb::Lift(a) => lift(a, stdin),
        Verb::Decompose(a) => decompose(a, stdin),
        Verb::Symbol(a) => {
            let lam = parse_rational(&a.lambda)?;
            let op = load_op(&a.src, &[], &[], stdin)?;
            let table = dlo_table(op.dim(), op.spatial_order().unwrap_or(0).max(1))?;
            let sym = full_symbol(&op, &lam, &table)?;
            let doc = SymbolJson::from_symbol(&sym);
            ok(json!({"dim": doc.dim, "terms": doc.terms, "text": sym.to_string()}))
        }
        Verb::Quantize(a) => {
            let dim = resolve_dim(a.dim, &[&a.symbol], &[])?;
            let sym = parse_symbol(&a.symbol, dim)?;
            let table = dlo_table(dim, sym.degree().unwrap_or(0).max(1))?;
            let op = match &a.mu {
                Some(mu) => quantize(&sym, &parse_rational(mu)?, &table)?,
                None => quantize_pencil(&sym, &table)?,
            };
            ok(operator_value(&op))
        }
        Verb::Check(a) => {
            let report = checks::run_check(a.property, a.method, a.dim, a.n, a.trials, a.seed)?;
            let status = if report.failed == 0 { EXIT_OK } else { EXIT_CHECK_FAILED };
            Ok(Outcome::json(status, &report))
        }
        Verb::Schwarzian(a) => {
            let lam = parse_rational(&a.lambda)?;
            let op = load_op(&a.src, &[], &[], stdin)?;
            let s = schwarzian_scalar(&op, &lam)?;
            ok(json!({"dim": op.dim(), "lambda": lam.to_string(), "scalar": s.to_string()}))
        }
        Verb::Table(a) => {
            if a.dim == 0 {
                return Err(Error::ShapeMismatch("dimension must be at least 1".into()));
            }
            if a.verify_table && !verify_table(a.dim, a.n)? {
                return Err(Error::Table(format!(
                    "cached table for d={}, n={} differs from a fresh derivation",
                    a.dim, a.n
                )));
            }
            let table = dlo_table(a.dim, a.n)?;
            ok(serde_json::to_value(table.to_json())?)
        }
    }
}

fn apply(a: ApplyArgs, stdin: &mut dyn Read) -> Result<Outcome> {
    let (doc, texts): (Option<DensityJson>, Vec<&str>) = match (&a.density_file, &a.f) {
        (Some(path), _) => (Some(read_json(path, stdin)?), vec![]),
        (None, Some(f)) => (None, vec![f.as_str()]),
        (None, None) => return Err(Error::parse(1, 1, "missing --density-file or --f")),
    };
    let docs: Vec<usize> = doc.iter().map(|d| d.dim).collect();
    let op = load_op(&a.src, &texts, &docs, stdin)?;
    let density = match (doc, &a.f) {
        (Some(d), _) => {
            require_dim(d.dim, op.dim())?;
            d.to_density()?
        }
        (None, Some(f)) => {
            crate::density::QuasiDensity::homogeneous(parse_poly(f, op.dim())?, parse_rational(&a.weight)?)
        }
        (None, None) => unreachable!("checked above"),
    };
    let out = op.apply(&density)?;
    let doc = DensityJson::from_density(&out);
    ok(json!({"dim": doc.dim, "parts": doc.parts, "text": out.to_string()}))
}

fn lift(a: LiftArgs, stdin: &mut dyn Read) -> Result<Outcome> {
    let vol_doc: Option<VolumeJson> = a.gamma_file.as_deref().map(|p| read_json(p, stdin)).transpose()?;
    let docs: Vec<usize> = vol_doc.iter().map(|v| v.dim).collect();
    let op = load_op(&a.src, &[], &docs, stdin)?;
    let dim = op.dim();
    let volume = || -> Result<VolumeStructure> {
        match &vol_doc {
            Some(v) => {
                require_dim(v.dim, dim)?;
                v.to_volume()
            }
            None => Ok(VolumeStructure::flat(dim)),
        }
    };
    let lam = || rational_arg("lambda", a.lambda.as_ref());
    let order = op.spatial_order().unwrap_or(0);
    let lifted = match a.method {
        Method::FirstOrder => {
            first_order_pencil(&op, &lam()?, &rational_arg("p", a.p.as_ref())?, &rational_arg("q", a.q.as_ref())?)?
        }
        Method::Canonical2 => canonical_second_order_lift(&op, &lam()?)?,
        Method::Iso => duval_ovsienko_iso(&op, &lam()?, &rational_arg("mu", a.mu.as_ref())?)?,
        Method::Volume => volume_lift(&op, &lam()?, &volume()?)?,
        Method::SdiffFamily => {
            let path = a.params_file.as_deref().ok_or_else(|| Error::parse(1, 1, "missing --params-file"))?;
            let params = read_json::<SdiffParamsJson>(path, stdin)?.to_params()?;
            if let Some(l) = &a.lambda {
                if parse_rational(l)? != params.lam {
                    return Err(Error::ExcludedParameter(
                        "--lambda disagrees with the lambda of the parameter file".into(),
                    ));
                }
            }
            sdiff_family_lift(&op, &params, &volume()?)?
        }
        Method::Disting => distinguished_lift(&op, a.n.unwrap_or(order), &lam()?, &volume()?)?,
        Method::Dlo => {
            let table = dlo_table(dim, a.n.unwrap_or(order).max(1))?;
            dlo_pencil(&op, &lam()?, &table)?
        }
        Method::Triangular => {
            let path = a.matrix_file.as_deref().ok_or_else(|| Error::parse(1, 1, "missing --matrix-file"))?;
            let params = read_json::<MatrixJson>(path, stdin)?.to_params(lam()?)?;
            let table = dlo_table(dim, params.n.max(1))?;
            triangular_family_lift(&op, &params, &table)?
        }
        Method::Selfadj2 => {
            let table = dlo_table(dim, 2)?;
            second_order_selfadjoint_family(
                &op,
                &lam()?,
                &rational_arg("p", a.p.as_ref())?,
                &rational_arg("q", a.q.as_ref())?,
                &table,
            )?
        }
    };
    ok(operator_value(&lifted))
}

fn decompose(a: DecomposeArgs, stdin: &mut dyn Read) -> Result<Outcome> {
    let op = load_op(&a.src, &[], &[], stdin)?;
    match a.method {
        DecomposeKind::FirstOrder => {
            let parts = decompose_first_order(&op)?;
            ok(json!({
                "dim": op.dim(),
                "field": field_strings(&parts.field),
                "s1": parts.s1.to_string(),
                "s2": parts.s2.to_string(),
            }))
        }
        DecomposeKind::Graded => {
            let lam = rational_arg("lambda", a.lambda.as_ref())?;
            let n = op.spatial_order().unwrap_or(0).max(1);
            let table = dlo_table(op.dim(), n)?;
            let parts = graded_decompose(&op, &lam, &table)?;
            let values: Vec<Value> =
                parts.iter().enumerate().map(|(i, p)| json!({"order": n - i, "operator": operator_value(p)})).collect();
            ok(json!({"dim": op.dim(), "lambda": lam.to_string(), "parts": values}))
        }
    }
}
