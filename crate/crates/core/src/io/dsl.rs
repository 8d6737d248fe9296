//! Text syntax for polynomials, operators and symbols.
//!
//! Atoms are `x<i>`, `d<i>`, `p<i>` (indices from 1), `w` and rationals
//! `n` or `n/m`. Binary `+ - *`, unary minus, parentheses, and `^` with a
//! small non-negative integer exponent on atoms. Juxtaposition is the same
//! as `*`; products are read left to right and are compositions for
//! operators.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use crate::algebra::{Exponents, MultiPoly, Rational};
use crate::density::DensityOperator;
use crate::error::{Error, Result};
use crate::projective::SymbolPoly;

/// Largest exponent accepted after `^`.
pub const MAX_EXPONENT: u32 = 32;
const MAX_DEPTH: usize = 128;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum AtomKind {
    X,
    D,
    P,
    W,
}

#[derive(Clone, PartialEq, Eq, Debug)]
enum Tok {
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
    Num(Rational),
    Atom(AtomKind, usize),
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(src: &str) -> Result<Vec<Spanned>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut line, mut column) = (1, 1);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let start = (line, column);
        let single = match c {
            '+' => Some(Tok::Plus),
            '-' | '\u{2212}' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            _ => None,
        };
        if c == '\n' {
            line += 1;
            column = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            column += 1;
            i += 1;
            continue;
        }
        if let Some(tok) = single {
            out.push(Spanned { tok, line: start.0, column: start.1 });
            column += 1;
            i += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let begin = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let numer: BigInt = chars[begin..i].iter().collect::<String>().parse().expect("digits");
            let mut value = Rational::from_integer(numer);
            if i < chars.len() && (chars[i] == '.' || chars[i] == ',') {
                return Err(Error::parse(line, column + (i - begin), "decimal notation is not accepted; write p/q"));
            }
            if i + 1 < chars.len() && chars[i] == '/' && chars[i + 1].is_ascii_digit() {
                i += 1;
                let dbegin = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let denom: BigInt = chars[dbegin..i].iter().collect::<String>().parse().expect("digits");
                if denom.is_zero() {
                    return Err(Error::parse(start.0, start.1, "zero denominator"));
                }
                value /= Rational::from_integer(denom);
            }
            column += i - begin;
            out.push(Spanned { tok: Tok::Num(value), line: start.0, column: start.1 });
            continue;
        }
        let kind = match c {
            'x' => Some(AtomKind::X),
            'd' => Some(AtomKind::D),
            'p' => Some(AtomKind::P),
            'w' => Some(AtomKind::W),
            _ => None,
        };
        let Some(kind) = kind else {
            return Err(Error::parse(line, column, format!("unexpected character {c:?}")));
        };
        i += 1;
        column += 1;
        if kind == AtomKind::W {
            out.push(Spanned { tok: Tok::Atom(kind, 0), line: start.0, column: start.1 });
            continue;
        }
        let begin = i;
        while i < chars.len() && chars[i].is_ascii_digit() {
            i += 1;
        }
        if begin == i {
            return Err(Error::parse(line, column, format!("expected an index after {c:?}")));
        }
        let digits: String = chars[begin..i].iter().collect();
        let index = digits
            .parse::<usize>()
            .ok()
            .filter(|&k| k >= 1)
            .ok_or_else(|| Error::parse(line, column, format!("invalid index {digits:?}; indices start at 1")))?;
        column += i - begin;
        out.push(Spanned { tok: Tok::Atom(kind, index), line: start.0, column: start.1 });
    }
    Ok(out)
}

/// Largest variable index in `src`, for inferring the dimension. Returns
/// `None` when no indexed atom occurs.
pub fn max_index(src: &str) -> Result<Option<usize>> {
    Ok(lex(src)?
        .into_iter()
        .filter_map(|s| match s.tok {
            Tok::Atom(AtomKind::W, _) => None,
            Tok::Atom(_, i) => Some(i),
            _ => None,
        })
        .max())
}

/// Arithmetic the parser evaluates into.
trait Target: Sized {
    fn constant(dim: usize, c: Rational) -> Self;
    fn atom(dim: usize, kind: AtomKind, axis: usize) -> Option<Self>;
    fn add(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn mul(&self, other: &Self) -> Result<Self>;

    fn pow(&self, dim: usize, n: u32) -> Result<Self> {
        let mut acc = Self::constant(dim, Rational::one());
        for _ in 0..n {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }
}

impl Target for DensityOperator {
    fn constant(dim: usize, c: Rational) -> Self {
        DensityOperator::constant(dim, c)
    }
    fn atom(dim: usize, kind: AtomKind, axis: usize) -> Option<Self> {
        match kind {
            AtomKind::X => Some(DensityOperator::multiplication(MultiPoly::var(dim, axis))),
            AtomKind::D => Some(DensityOperator::partial(dim, axis)),
            AtomKind::W => Some(DensityOperator::weight(dim)),
            AtomKind::P => None,
        }
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn mul(&self, other: &Self) -> Result<Self> {
        self.compose(other)
    }
}

impl Target for MultiPoly {
    fn constant(dim: usize, c: Rational) -> Self {
        MultiPoly::constant(dim, c)
    }
    fn atom(dim: usize, kind: AtomKind, axis: usize) -> Option<Self> {
        (kind == AtomKind::X).then(|| MultiPoly::var(dim, axis))
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn mul(&self, other: &Self) -> Result<Self> {
        Ok(self * other)
    }
}

/// Symbols are parsed as commutative polynomials in `x1..xd, p1..pd`,
/// stored in a polynomial ring of dimension `2d`.
struct SymbolAsPoly(MultiPoly);

impl Target for SymbolAsPoly {
    fn constant(dim: usize, c: Rational) -> Self {
        SymbolAsPoly(MultiPoly::constant(2 * dim, c))
    }
    fn atom(dim: usize, kind: AtomKind, axis: usize) -> Option<Self> {
        match kind {
            AtomKind::X => Some(SymbolAsPoly(MultiPoly::var(2 * dim, axis))),
            AtomKind::P => Some(SymbolAsPoly(MultiPoly::var(2 * dim, dim + axis))),
            _ => None,
        }
    }
    fn add(&self, other: &Self) -> Self {
        SymbolAsPoly(&self.0 + &other.0)
    }
    fn neg(&self) -> Self {
        SymbolAsPoly(-&self.0)
    }
    fn mul(&self, other: &Self) -> Result<Self> {
        Ok(SymbolAsPoly(&self.0 * &other.0))
    }
}

struct Parser<'a> {
    toks: &'a [Spanned],
    pos: usize,
    dim: usize,
    what: &'static str,
    depth: usize,
    end: (usize, usize),
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&'a Spanned> {
        self.toks.get(self.pos)
    }

    fn here(&self) -> (usize, usize) {
        self.peek().map_or(self.end, |s| (s.line, s.column))
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T> {
        let (line, column) = self.here();
        Err(Error::parse(line, column, message))
    }

    fn starts_factor(&self) -> bool {
        matches!(self.peek().map(|s| &s.tok), Some(Tok::Num(_) | Tok::Atom(..) | Tok::LParen))
    }

    fn expr<T: Target>(&mut self) -> Result<T> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return self.error("expression nested too deeply");
        }
        let mut acc = self.term::<T>()?;
        loop {
            match self.peek().map(|s| &s.tok) {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    acc = acc.add(&self.term::<T>()?);
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    acc = acc.add(&self.term::<T>()?.neg());
                }
                _ => break,
            }
        }
        self.depth -= 1;
        Ok(acc)
    }

    fn term<T: Target>(&mut self) -> Result<T> {
        let mut acc = self.unary::<T>()?;
        loop {
            if matches!(self.peek().map(|s| &s.tok), Some(Tok::Star)) {
                self.pos += 1;
            } else if !self.starts_factor() {
                break;
            }
            let rhs = self.unary::<T>()?;
            acc = acc.mul(&rhs)?;
        }
        Ok(acc)
    }

    fn unary<T: Target>(&mut self) -> Result<T> {
        match self.peek().map(|s| &s.tok) {
            Some(Tok::Minus) => {
                self.pos += 1;
                self.guarded(|p| Ok(p.unary::<T>()?.neg()))
            }
            Some(Tok::Plus) => {
                self.pos += 1;
                self.guarded(|p| p.unary::<T>())
            }
            _ => self.power::<T>(),
        }
    }

    fn guarded<T>(&mut self, f: impl FnOnce(&mut Self) -> Result<T>) -> Result<T> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return self.error("expression nested too deeply");
        }
        let out = f(self)?;
        self.depth -= 1;
        Ok(out)
    }

    fn power<T: Target>(&mut self) -> Result<T> {
        let Some(tok) = self.peek() else {
            return self.error(format!("unexpected end of {}", self.what));
        };
        let (base, is_atom) = match &tok.tok {
            Tok::LParen => {
                self.pos += 1;
                let inner = self.expr::<T>()?;
                match self.peek().map(|s| &s.tok) {
                    Some(Tok::RParen) => self.pos += 1,
                    _ => return self.error("expected ')'"),
                }
                (inner, false)
            }
            Tok::Num(c) => {
                self.pos += 1;
                (T::constant(self.dim, c.clone()), true)
            }
            Tok::Atom(kind, index) => {
                let (kind, index) = (*kind, *index);
                if kind != AtomKind::W && index > self.dim {
                    return Err(Error::AxisOutOfRange { axis: index, dim: self.dim });
                }
                let axis = index.saturating_sub(1);
                let Some(v) = T::atom(self.dim, kind, axis) else {
                    let name = match kind {
                        AtomKind::X => "x",
                        AtomKind::D => "d",
                        AtomKind::P => "p",
                        AtomKind::W => "w",
                    };
                    return self.error(format!("atom {name:?} is not allowed in a {}", self.what));
                };
                self.pos += 1;
                (v, true)
            }
            other => return self.error(format!("unexpected {}", describe(other))),
        };
        if !matches!(self.peek().map(|s| &s.tok), Some(Tok::Caret)) {
            return Ok(base);
        }
        if !is_atom {
            return self.error("'^' applies to atoms only");
        }
        self.pos += 1;
        let n = match self.peek().map(|s| &s.tok) {
            Some(Tok::Num(n)) if n.is_integer() => n.to_integer().to_u32().filter(|&n| n <= MAX_EXPONENT),
            _ => None,
        };
        let Some(n) = n else {
            return self.error(format!("expected an integer exponent between 0 and {MAX_EXPONENT}"));
        };
        self.pos += 1;
        base.pow(self.dim, n)
    }
}

fn describe(tok: &Tok) -> &'static str {
    match tok {
        Tok::Plus => "'+'",
        Tok::Minus => "'-'",
        Tok::Star => "'*'",
        Tok::Caret => "'^'",
        Tok::LParen => "'('",
        Tok::RParen => "')'",
        Tok::Num(_) => "number",
        Tok::Atom(..) => "atom",
    }
}

fn end_position(src: &str) -> (usize, usize) {
    let line = src.matches('\n').count() + 1;
    let column = src.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

fn parse_with<T: Target>(src: &str, dim: usize, what: &'static str) -> Result<T> {
    if dim == 0 {
        return Err(Error::ShapeMismatch("dimension must be at least 1".into()));
    }
    let toks = lex(src)?;
    let mut p = Parser { toks: &toks, pos: 0, dim, what, depth: 0, end: end_position(src) };
    if toks.is_empty() {
        return p.error(format!("empty {what}"));
    }
    let out = p.expr::<T>()?;
    if let Some(tok) = p.peek() {
        return p.error(format!("unexpected {}", describe(&tok.tok)));
    }
    Ok(out)
}

/// Parses an operator expression and returns it in normal form.
pub fn parse_operator(src: &str, dim: usize) -> Result<DensityOperator> {
    parse_with(src, dim, "operator")
}

/// Parses a polynomial in `x1..xd`.
pub fn parse_poly(src: &str, dim: usize) -> Result<MultiPoly> {
    parse_with(src, dim, "polynomial")
}

/// Parses a symbol: a polynomial in `x1..xd` and the momenta `p1..pd`.
pub fn parse_symbol(src: &str, dim: usize) -> Result<SymbolPoly> {
    let SymbolAsPoly(flat) = parse_with(src, dim, "symbol")?;
    let mut out = SymbolPoly::zero(dim);
    for (e, c) in flat.terms() {
        let (xs, ps) = e.as_slice().split_at(dim);
        let coeff = MultiPoly::monomial(Exponents::from_slice(xs), c.clone());
        out.add_term(Exponents::from_slice(ps), coeff);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;
    use crate::algebra::rational::int;

    #[test]
    fn operator_examples() {
        let op = parse_operator("d1*x1", 1).unwrap();
        assert_eq!(op.to_string(), "x1*d1 + 1");
        let intro = parse_operator("(w^2+1)*d1*d1 + d1", 1).unwrap();
        let d = DensityOperator::partial(1, 0);
        let w = DensityOperator::weight(1);
        let expected = &(&(&(&w * &w) + &DensityOperator::identity(1)) * &(&d * &d)) + &d;
        assert_eq!(intro, expected);
        assert_eq!(parse_operator("d2", 1).unwrap_err().code(), "E_DIM");
    }

    #[test]
    fn juxtaposition_and_precedence() {
        let a = parse_operator("2/3 x1 d1^2 - -w", 1).unwrap();
        let b = parse_operator("2/3*x1*d1*d1 + w", 1).unwrap();
        assert_eq!(a, b);
        let c = parse_operator("x1^2 d1 + 1 - x2", 2).unwrap();
        assert_eq!(c.to_string(), "x1^2*d1 - x2 + 1");
    }

    #[test]
    fn errors_carry_positions() {
        match parse_operator("x1 +\n  * d1", 1).unwrap_err() {
            Error::Parse { line, column, .. } => assert_eq!((line, column), (2, 3)),
            e => panic!("{e:?}"),
        }
        match parse_operator("x1 + ", 1).unwrap_err() {
            Error::Parse { line, column, .. } => assert_eq!((line, column), (1, 6)),
            e => panic!("{e:?}"),
        }
        for bad in ["", "1.5*d1", "(x1+d1)^2", "x1^x1", "x0", "q1", "x1)", "d1^99", "1/0", "x1^2^2"] {
            assert_eq!(parse_operator(bad, 1).unwrap_err().code(), "E_PARSE", "{bad}");
        }
        assert_eq!(parse_poly("x1*d1", 1).unwrap_err().code(), "E_PARSE");
        assert_eq!(parse_operator("p1", 1).unwrap_err().code(), "E_PARSE");
    }

    #[test]
    fn polys_and_symbols() {
        let p = parse_poly("3/2 x1^2 x2 - x2 x1^2", 2).unwrap();
        assert_eq!(p.to_string(), "1/2*x1^2*x2");
        let s = parse_symbol("x1 p1 p2 + p2 x1 p1 + 4", 2).unwrap();
        assert_eq!(s.to_string(), "2*x1*p1*p2 + 4");
        assert_eq!(s.coefficient(&Exponents::zero(2)), MultiPoly::constant(2, int(4)));
        assert_eq!(max_index("x3 d12 w").unwrap(), Some(12));
        assert_eq!(max_index("w - 1/2").unwrap(), None);
        assert_eq!(parse_poly("-1/2", 1).unwrap(), MultiPoly::constant(1, rat(-1, 2)));
    }

    #[test]
    fn deep_nesting_is_rejected() {
        let src = format!("{}x1{}", "(".repeat(1000), ")".repeat(1000));
        assert_eq!(parse_operator(&src, 1).unwrap_err().code(), "E_PARSE");
        let src = "-".repeat(1000) + "x1";
        assert_eq!(parse_operator(&src, 1).unwrap_err().code(), "E_PARSE");
    }
}
