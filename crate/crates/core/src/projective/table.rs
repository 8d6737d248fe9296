//! Coefficients of the projectively equivariant symbol map, obtained by
//! solving the equivariance constraints exactly at sample weights and
//! interpolating in the weight.

use std::collections::{HashMap, HashSet};
use std::path::PathBuf;
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::symbol::{symbol_lie, SymbolPoly};
use crate::algebra::{
    interpolate_lambda, parse_rational, rat, solve_linear_exact, Exponents, LambdaPoly, LinearSolution, MultiPoly,
    Rational,
};
use crate::density::{ad_action, DensityOperator, VectorField};
use crate::error::{Error, Result};

/// Environment variable naming the directory of the on-disk table cache.
pub const TABLE_CACHE_ENV: &str = "DENSOPS_TABLE_CACHE";

/// Number of candidate sample weights `(j + 1)/97`, `j = 0..SAMPLE_CANDIDATES`.
const SAMPLE_CANDIDATES: i64 = 201;
const SAMPLE_DENOMINATOR: i64 = 97;

/// Coefficients `c_r^(k)(lam)` of the equivariant symbol map and
/// `ctilde_r^(k)(mu)` of its inverse quantization, for `0 <= r <= k <= n`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DloTable {
    dim: usize,
    n: usize,
    c: Vec<Vec<LambdaPoly>>,
    ctilde: Vec<Vec<LambdaPoly>>,
}

impl DloTable {
    /// Builds the table from the symbol-map coefficients; `c[k][r]` for
    /// `r <= k`, with `c[k][0] = 1`. The inverse coefficients follow from
    /// `ctilde_p^(k) = -sum_{i=1}^p ctilde_{p-i}^(k) c_i^(k-p+i)`.
    pub fn from_symbol_coefficients(dim: usize, c: Vec<Vec<LambdaPoly>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Table("dimension must be at least 1".into()));
        }
        let n = c.len().checked_sub(1).ok_or_else(|| Error::Table("coefficient table is empty".into()))?;
        for (k, row) in c.iter().enumerate() {
            if row.len() != k + 1 {
                return Err(Error::Table(format!("row k={k} has {} entries, expected {}", row.len(), k + 1)));
            }
            if row[0] != LambdaPoly::one() {
                return Err(Error::Table(format!("c_0^({k}) must equal 1")));
            }
            for (r, p) in row.iter().enumerate() {
                if p.degree().is_some_and(|deg| deg > r) {
                    return Err(Error::Table(format!("c_{r}^({k}) has degree above {r}")));
                }
            }
        }
        let ctilde = invert_coefficients(&c);
        Ok(DloTable { dim, n, c, ctilde })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn max_order(&self) -> usize {
        self.n
    }

    /// `c_r^(k)`.
    pub fn c(&self, k: usize, r: usize) -> &LambdaPoly {
        &self.c[k][r]
    }

    /// `ctilde_r^(k)`.
    pub fn ctilde(&self, k: usize, r: usize) -> &LambdaPoly {
        &self.ctilde[k][r]
    }

    /// The same table restricted to orders `<= n`.
    pub fn truncate(&self, n: usize) -> DloTable {
        let n = n.min(self.n);
        DloTable { dim: self.dim, n, c: self.c[..=n].to_vec(), ctilde: self.ctilde[..=n].to_vec() }
    }

    pub(crate) fn require_order(&self, order: Option<usize>) -> Result<()> {
        match order {
            Some(found) if found > self.n => Err(Error::Order { found, max: self.n }),
            _ => Ok(()),
        }
    }

    pub(crate) fn require_dim(&self, dim: usize) -> Result<()> {
        if dim == self.dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected: self.dim, found: dim })
        }
    }

    pub fn to_json(&self) -> TableJson {
        let enc = |rows: &[Vec<LambdaPoly>]| {
            rows.iter()
                .map(|row| row.iter().map(|p| p.coeffs().iter().map(|c| c.to_string()).collect()).collect())
                .collect()
        };
        TableJson { dim: self.dim, n: self.n, c: enc(&self.c), ctilde: enc(&self.ctilde) }
    }

    /// Decodes and validates a serialized table: the stored inverse
    /// coefficients must agree with the recurrence.
    pub fn from_json(json: &TableJson) -> Result<Self> {
        let dec = |rows: &[Vec<Vec<String>>]| -> Result<Vec<Vec<LambdaPoly>>> {
            rows.iter()
                .map(|row| {
                    row.iter()
                        .map(|coeffs| {
                            coeffs
                                .iter()
                                .map(|s| parse_rational(s).map_err(|e| Error::Table(format!("bad entry {s:?}: {e}"))))
                                .collect::<Result<Vec<_>>>()
                                .map(LambdaPoly::new)
                        })
                        .collect()
                })
                .collect()
        };
        let table = Self::from_symbol_coefficients(json.dim, dec(&json.c)?)?;
        if table.n != json.n {
            return Err(Error::Table(format!("declared n={} but table has n={}", json.n, table.n)));
        }
        if table.ctilde != dec(&json.ctilde)? {
            return Err(Error::Table("stored ctilde does not satisfy the inversion recurrence".into()));
        }
        Ok(table)
    }
}

/// Serialized form of a [`DloTable`]: each polynomial is its list of
/// coefficients in increasing degree, as rational strings.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableJson {
    pub dim: usize,
    pub n: usize,
    pub c: Vec<Vec<Vec<String>>>,
    pub ctilde: Vec<Vec<Vec<String>>>,
}

fn invert_coefficients(c: &[Vec<LambdaPoly>]) -> Vec<Vec<LambdaPoly>> {
    c.iter()
        .enumerate()
        .map(|(k, _)| {
            let mut row = vec![LambdaPoly::one()];
            for p in 1..=k {
                let mut acc = LambdaPoly::zero();
                for i in 1..=p {
                    acc = &acc + &(&row[p - i] * &c[k - p + i][i]);
                }
                row.push(-&acc);
            }
            row
        })
        .collect()
}

/// `a_d(lam) = 2(lam(d+1) + 1)/(d+3)`, the first-order correction of the
/// second-order quantization.
pub fn a_d(d: usize) -> LambdaPoly {
    let d = Rational::from_integer((d as i64).into());
    let den = &d + rat(3, 1);
    LambdaPoly::linear(rat(2, 1) / &den, rat(2, 1) * (&d + Rational::one()) / &den)
}

/// `b_d(lam) = lam(d+1)(lam(d+1) + 1)/((d+2)(d+3))`.
pub fn b_d(d: usize) -> LambdaPoly {
    let d = Rational::from_integer((d as i64).into());
    let d1 = &d + Rational::one();
    let den = (&d + rat(2, 1)) * (&d + rat(3, 1));
    LambdaPoly::new(vec![Rational::zero(), &d1 / &den, &d1 * &d1 / &den])
}

/// Special projective generators `x^j (x^i d_i)`, the only ones that
/// constrain the table (affine fields are satisfied for any coefficients).
fn special_generators(dim: usize) -> Vec<VectorField> {
    (0..dim)
        .map(|j| {
            let xj = MultiPoly::var(dim, j);
            VectorField::new((0..dim).map(|i| &xj * &MultiPoly::var(dim, i)).collect()).expect("consistent dims")
        })
        .collect()
}

/// Term of a constraint: `coefficient(slot) * lam^wpow * symbol`.
struct ConstraintTerm {
    slot: Option<usize>,
    wpow: usize,
    symbol: SymbolPoly,
}

struct Unknowns {
    index: HashMap<(usize, usize), usize>,
    count: usize,
}

impl Unknowns {
    fn new(n: usize) -> Self {
        let mut index = HashMap::new();
        for k in 1..=n {
            for r in 1..=k {
                let next = index.len();
                index.insert((k, r), next);
            }
        }
        let count = index.len();
        Unknowns { index, count }
    }

    /// `None` for the fixed normalisation `c_0^(k) = 1`.
    fn slot(&self, k: usize, r: usize) -> Option<usize> {
        if r == 0 {
            None
        } else {
            Some(self.index[&(k, r)])
        }
    }
}

fn homogeneous_symbols(op: &DensityOperator) -> Vec<(usize, SymbolPoly)> {
    let Some(top) = op.spatial_order() else {
        return Vec::new();
    };
    let naive = SymbolPoly::naive(op).expect("w-free operator");
    (0..=top).map(|m| (m, naive.homogeneous_part(m))).filter(|(_, s)| !s.is_zero()).collect()
}

/// Symbolic form of `sigma(ad_K Delta) - L_K sigma(Delta) = 0` for one pair,
/// with the weight left as a formal parameter.
fn constraint(k: &VectorField, delta: &DensityOperator, order: usize, unknowns: &Unknowns) -> Vec<ConstraintTerm> {
    let mut terms = Vec::new();
    let ad = ad_action(k, delta).expect("consistent dims");
    for (wpow, component) in ad.weight_components().iter().enumerate() {
        for (m, s) in homogeneous_symbols(component) {
            for r in 0..=m {
                terms.push(ConstraintTerm { slot: unknowns.slot(m, r), wpow, symbol: s.normalized_contraction(m, r) });
            }
        }
    }
    let s = SymbolPoly::naive(delta).expect("w-free operator");
    for r in 0..=order {
        let transported = symbol_lie(k, &s.normalized_contraction(order, r)).expect("consistent dims");
        terms.push(ConstraintTerm { slot: unknowns.slot(order, r), wpow: 0, symbol: -&transported });
    }
    terms
}

/// Assembles the deduplicated, normalized linear system at one weight.
fn linear_system(
    constraints: &[Vec<ConstraintTerm>],
    lam: &Rational,
    unknowns: &Unknowns,
) -> (Vec<Vec<Rational>>, Vec<Rational>) {
    let width = unknowns.count + 1;
    let mut seen: HashSet<Vec<Rational>> = HashSet::new();
    let mut rows = Vec::new();
    let mut lam_pows = vec![Rational::one()];
    for terms in constraints {
        let mut acc: HashMap<(Exponents, Exponents), Vec<Rational>> = HashMap::new();
        for t in terms {
            while lam_pows.len() <= t.wpow {
                let next = lam_pows.last().expect("non-empty") * lam;
                lam_pows.push(next);
            }
            let factor = &lam_pows[t.wpow];
            if factor.is_zero() {
                continue;
            }
            let col = t.slot.unwrap_or(unknowns.count);
            for (xi, coeff) in t.symbol.terms() {
                for (xe, c) in coeff.terms() {
                    let row = acc.entry((xi.clone(), xe.clone())).or_insert_with(|| vec![Rational::zero(); width]);
                    row[col] += c * factor;
                }
            }
        }
        for mut row in acc.into_values() {
            let Some(lead) = row.iter().find(|v| !v.is_zero()).cloned() else {
                continue;
            };
            for v in row.iter_mut() {
                *v /= &lead;
            }
            if seen.insert(row.clone()) {
                rows.push(row);
            }
        }
    }
    let b = rows.iter_mut().map(|row| -row.pop().expect("constant column")).collect();
    (rows, b)
}

/// Derives the table for dimension `d` and orders `<= n` from projective
/// equivariance. Test operators are `x^gamma d^alpha` with `|alpha| = k`
/// and `|gamma| <= k`; weights are sampled from `(j + 1)/97`, skipping
/// samples where the system is singular or inconsistent.
pub fn solve_dlo_table(d: usize, n: usize) -> Result<DloTable> {
    if d == 0 {
        return Err(Error::Table("dimension must be at least 1".into()));
    }
    let unknowns = Unknowns::new(n);
    let mut c: Vec<Vec<LambdaPoly>> = (0..=n).map(|k| vec![LambdaPoly::one(); k + 1]).collect();
    if unknowns.count == 0 {
        return DloTable::from_symbol_coefficients(d, c);
    }

    let generators = special_generators(d);
    let mut constraints = Vec::new();
    for k in 1..=n {
        for alpha in Exponents::all_of_degree(d, k) {
            for g in 0..=k {
                for gamma in Exponents::all_of_degree(d, g) {
                    let delta = DensityOperator::monomial(
                        MultiPoly::monomial(gamma.clone(), Rational::one()),
                        alpha.clone(),
                        0,
                    );
                    for kf in &generators {
                        constraints.push(constraint(kf, &delta, k, &unknowns));
                    }
                }
            }
        }
    }

    let needed = n + 3;
    let mut samples: Vec<(Rational, Vec<Rational>)> = Vec::with_capacity(needed);
    for j in 0..SAMPLE_CANDIDATES {
        if samples.len() == needed {
            break;
        }
        let lam = rat(j + 1, SAMPLE_DENOMINATOR);
        let (a, b) = linear_system(&constraints, &lam, &unknowns);
        if let LinearSolution::Solved { solution, kernel_rank: 0 } = solve_linear_exact(&a, &b)? {
            samples.push((lam, solution));
        }
    }
    if samples.len() < needed {
        return Err(Error::Table(format!(
            "found only {} regular sample weights among {SAMPLE_CANDIDATES} candidates, need {needed}",
            samples.len()
        )));
    }

    for (k, row) in c.iter_mut().enumerate().skip(1) {
        for (r, entry) in row.iter_mut().enumerate().skip(1) {
            let slot = unknowns.index[&(k, r)];
            let points: Vec<(Rational, Rational)> = samples.iter().map(|(l, s)| (l.clone(), s[slot].clone())).collect();
            *entry = interpolate_lambda(&points, r)?;
        }
    }
    DloTable::from_symbol_coefficients(d, c)
}

fn memo() -> &'static Mutex<HashMap<usize, Arc<DloTable>>> {
    static TABLES: OnceLock<Mutex<HashMap<usize, Arc<DloTable>>>> = OnceLock::new();
    TABLES.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Directory of the on-disk cache, if configured.
pub fn table_cache_dir() -> Option<PathBuf> {
    std::env::var_os(TABLE_CACHE_ENV).filter(|v| !v.is_empty()).map(PathBuf::from)
}

fn cache_file(dir: &std::path::Path, d: usize, n: usize) -> PathBuf {
    dir.join(format!("dlo-d{d}-n{n}.json"))
}

fn load_from_disk(d: usize, n: usize) -> Result<Option<DloTable>> {
    let Some(dir) = table_cache_dir() else {
        return Ok(None);
    };
    let path = cache_file(&dir, d, n);
    let text = match std::fs::read_to_string(&path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(Error::Io(format!("{}: {e}", path.display()))),
    };
    let json: TableJson = serde_json::from_str(&text).map_err(|e| Error::Table(format!("{}: {e}", path.display())))?;
    let table = DloTable::from_json(&json)?;
    if table.dim != d || table.n != n {
        return Err(Error::Table(format!("{} holds a table for d={}, n={}", path.display(), table.dim, table.n)));
    }
    Ok(Some(table))
}

fn store_on_disk(table: &DloTable) -> Result<()> {
    let Some(dir) = table_cache_dir() else {
        return Ok(());
    };
    std::fs::create_dir_all(&dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    let path = cache_file(&dir, table.dim, table.n);
    let text = serde_json::to_string(&table.to_json()).map_err(|e| Error::Io(e.to_string()))?;
    std::fs::write(&path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Shared table for `(d, n)`. Built once per process (or loaded from the
/// directory named by `DENSOPS_TABLE_CACHE`) and then handed out read-only;
/// a cached table of higher order is truncated instead of re-solved.
pub fn dlo_table(d: usize, n: usize) -> Result<Arc<DloTable>> {
    let mut tables = memo().lock().unwrap_or_else(|poisoned| poisoned.into_inner());
    if let Some(t) = tables.get(&d) {
        if t.n >= n {
            return Ok(if t.n == n { Arc::clone(t) } else { Arc::new(t.truncate(n)) });
        }
    }
    let table = match load_from_disk(d, n)? {
        Some(t) => t,
        None => {
            let t = solve_dlo_table(d, n)?;
            store_on_disk(&t)?;
            t
        }
    };
    let table = Arc::new(table);
    tables.insert(d, Arc::clone(&table));
    Ok(table)
}

/// Re-derives the table from scratch and compares it with the shared one.
pub fn verify_table(d: usize, n: usize) -> Result<bool> {
    let fresh = solve_dlo_table(d, n)?;
    Ok(*dlo_table(d, n)? == fresh)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::int;

    #[test]
    fn order_two_coefficients_in_low_dimension() {
        for d in 1..=2 {
            let t = solve_dlo_table(d, 2).unwrap();
            let dd = Rational::from_integer((d as i64).into());
            let d1 = &dd + int(1);
            // c_1^(1) = -lam
            assert_eq!(t.c(1, 1), &LambdaPoly::linear(int(0), int(-1)));
            // c_1^(2) = -2(lam(d+1) + 1)/(d+3)
            let den3 = &dd + int(3);
            assert_eq!(t.c(2, 1), &LambdaPoly::linear(int(-2) / &den3, int(-2) * &d1 / &den3));
            // c_2^(2) = lam(lam(d+1) + 1)/(d+2)
            let den2 = &dd + int(2);
            assert_eq!(t.c(2, 2), &LambdaPoly::new(vec![int(0), int(1) / &den2, &d1 / &den2]));
            assert_eq!(t.ctilde(2, 1), &a_d(d));
            assert_eq!(t.ctilde(2, 2), &b_d(d));
        }
    }

    #[test]
    fn one_dimensional_closed_forms() {
        assert_eq!(a_d(1), LambdaPoly::linear(rat(1, 2), int(1)));
        assert_eq!(b_d(1), LambdaPoly::new(vec![int(0), rat(1, 6), rat(1, 3)]));
    }

    #[test]
    fn json_round_trip_and_validation() {
        let t = solve_dlo_table(1, 2).unwrap();
        let json = t.to_json();
        assert_eq!(DloTable::from_json(&json).unwrap(), t);
        let mut broken = json.clone();
        broken.ctilde[2][1] = vec!["0".into()];
        assert_eq!(DloTable::from_json(&broken).unwrap_err().code(), "E_TABLE");
    }

    #[test]
    fn truncation_matches_direct_solve() {
        let big = solve_dlo_table(1, 3).unwrap();
        assert_eq!(big.truncate(2), solve_dlo_table(1, 2).unwrap());
    }

    #[test]
    fn trivial_orders() {
        let t = solve_dlo_table(2, 0).unwrap();
        assert_eq!(t.max_order(), 0);
        assert!(solve_dlo_table(0, 1).is_err());
    }
}
