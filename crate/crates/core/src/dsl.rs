//! Text notation for lattices: `U + A1(3)`, `[0,2,2,0,1,-14]`, `U(2) + A2^2`.
//!
//! Grammar (whitespace-insensitive, `⊕` is a synonym for `+`):
//!
//! ```text
//! expr := term ('+' term)*
//! term := atom ( '(' int ')' | '^' uint )*
//! atom := 'U' | ('A'|'D'|'E') index | '[' int (',' int)* ']' | '(' expr ')'
//! ```
//!
//! Indices may be written `A2`, `A_2`, `A_{2}` or `A₂`; exponents `^2`, `^{2}` or `²`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::matrix::{Int, IntMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Family {
    U,
    A,
    D,
    E,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LatticeExpr {
    Named(Family, u32),
    RankOne(Int),
    /// Lower-triangle entries `a11, a21, a22, a31, ...`.
    ExplicitGram(Vec<Int>),
    Twist(Box<LatticeExpr>, Int),
    Sum(Vec<LatticeExpr>),
    Power(Box<LatticeExpr>, u32),
}

impl LatticeExpr {
    pub fn named(family: Family, index: u32) -> Result<Self> {
        let ok = match family {
            Family::U => true,
            Family::A => index >= 1,
            Family::D => index >= 4,
            Family::E => (6..=8).contains(&index),
        };
        if !ok {
            return Err(Error::BadIndex(format!("{family:?}{index}")));
        }
        Ok(LatticeExpr::Named(family, index))
    }

    pub fn explicit(entries: Vec<Int>) -> Result<Self> {
        triangle_rank(entries.len()).ok_or(Error::BadTriangleCount(entries.len()))?;
        Ok(LatticeExpr::ExplicitGram(entries))
    }

    pub fn eval(&self) -> Lattice {
        match self {
            LatticeExpr::Named(f, n) => named_lattice(*f, *n),
            LatticeExpr::RankOne(a) => Lattice::new(vec![vec![a.clone()]]).expect("1x1 is symmetric"),
            LatticeExpr::ExplicitGram(e) => Lattice::new(lower_triangle_gram(e)).expect("built symmetric"),
            LatticeExpr::Twist(c, k) => {
                let l = c.eval();
                if k.is_zero() {
                    l
                } else {
                    l.twist(k).expect("nonzero scale")
                }
            }
            LatticeExpr::Sum(cs) => cs.iter().fold(Lattice::zero(), |acc, c| acc.direct_sum(&c.eval())),
            LatticeExpr::Power(c, k) => {
                let l = c.eval();
                (0..*k).fold(Lattice::zero(), |acc, _| acc.direct_sum(&l))
            }
        }
    }

    /// Flat list of (atom, twist) summands with twists pushed onto atoms.
    fn summands(&self, scale: &Int, out: &mut Vec<(LatticeExpr, Int)>) {
        match self {
            LatticeExpr::Twist(c, k) => c.summands(&(scale * k), out),
            LatticeExpr::Sum(cs) => cs.iter().for_each(|c| c.summands(scale, out)),
            LatticeExpr::Power(c, k) => {
                for _ in 0..*k {
                    c.summands(scale, out);
                }
            }
            atom => out.push((atom.clone(), scale.clone())),
        }
    }

    /// Normal form: flattened sum, twists pushed onto atoms, adjacent repeats
    /// collapsed. Summand order is kept, so the Gram matrix is unchanged.
    pub fn canonical(&self) -> LatticeExpr {
        self.normal_form(false)
    }

    /// Like [`canonical`](Self::canonical) but with summands sorted; equal for
    /// expressions differing only in summand order (the Gram changes by a
    /// block permutation).
    pub fn sorted_form(&self) -> LatticeExpr {
        self.normal_form(true)
    }

    fn normal_form(&self, sort: bool) -> LatticeExpr {
        let mut parts = Vec::new();
        self.summands(&Int::one(), &mut parts);
        if sort {
            parts.sort_by(cmp_summand);
        }
        let mut terms: Vec<LatticeExpr> = Vec::new();
        let mut i = 0;
        while i < parts.len() {
            let mut j = i + 1;
            while j < parts.len() && parts[j] == parts[i] {
                j += 1;
            }
            let (atom, k) = &parts[i];
            let mut t = atom.clone();
            if !k.is_one() {
                t = LatticeExpr::Twist(Box::new(t), k.clone());
            }
            if j - i > 1 {
                t = LatticeExpr::Power(Box::new(t), (j - i) as u32);
            }
            terms.push(t);
            i = j;
        }
        if terms.len() == 1 {
            terms.pop().unwrap()
        } else {
            LatticeExpr::Sum(terms)
        }
    }
}

fn atom_class(e: &LatticeExpr) -> u8 {
    match e {
        LatticeExpr::Named(..) => 0,
        LatticeExpr::RankOne(_) => 1,
        _ => 2,
    }
}

fn cmp_summand(a: &(LatticeExpr, Int), b: &(LatticeExpr, Int)) -> Ordering {
    let key = |(e, k): &(LatticeExpr, Int)| -> (u8, Option<(Family, u32)>, String, Int) {
        match e {
            LatticeExpr::Named(f, n) => (0, Some((*f, *n)), String::new(), k.clone()),
            other => (atom_class(other), None, other.to_string(), k.clone()),
        }
    };
    key(a).cmp(&key(b))
}

/// Rank `n` with `n(n+1)/2 = len`, if any.
pub fn triangle_rank(len: usize) -> Option<usize> {
    let mut n = 0;
    while n * (n + 1) / 2 < len {
        n += 1;
    }
    (n * (n + 1) / 2 == len && len > 0).then_some(n)
}

fn lower_triangle_gram(e: &[Int]) -> IntMatrix {
    let n = triangle_rank(e.len()).expect("validated at construction");
    let mut g = vec![vec![Int::zero(); n]; n];
    let mut it = e.iter();
    for i in 0..n {
        for j in 0..=i {
            let x = it.next().unwrap().clone();
            g[j][i] = x.clone();
            g[i][j] = x;
        }
    }
    g
}

/// Negated Cartan matrix of a simply-laced Dynkin diagram given by its edges.
fn cartan(n: usize, edges: &[(usize, usize)]) -> Lattice {
    let mut g = vec![vec![Int::zero(); n]; n];
    for (i, row) in g.iter_mut().enumerate() {
        row[i] = Int::from(-2);
    }
    for &(i, j) in edges {
        g[i][j] = Int::one();
        g[j][i] = Int::one();
    }
    Lattice::new(g).expect("symmetric")
}

pub fn named_lattice(f: Family, n: u32) -> Lattice {
    let n = n as usize;
    let chain = |len: usize| (1..len).map(|i| (i - 1, i)).collect::<Vec<_>>();
    match f {
        Family::U => Lattice::from_rows(&[&[0, 1], &[1, 0]]).unwrap(),
        Family::A => cartan(n, &chain(n)),
        Family::D => {
            let mut e = chain(n - 1);
            e.push((n - 3, n - 1));
            cartan(n, &e)
        }
        Family::E => {
            let mut e = chain(n - 1);
            e.push((2, n - 1));
            cartan(n, &e)
        }
    }
}

impl fmt::Display for LatticeExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LatticeExpr::Named(Family::U, _) => write!(f, "U"),
            LatticeExpr::Named(fam, n) => write!(f, "{fam:?}{n}"),
            LatticeExpr::RankOne(a) => write!(f, "[{a}]"),
            LatticeExpr::ExplicitGram(e) => {
                let s: Vec<String> = e.iter().map(|x| x.to_string()).collect();
                write!(f, "[{}]", s.join(","))
            }
            LatticeExpr::Twist(c, k) => {
                if matches!(**c, LatticeExpr::Sum(_)) {
                    write!(f, "({c})({k})")
                } else {
                    write!(f, "{c}({k})")
                }
            }
            LatticeExpr::Power(c, k) => {
                if matches!(**c, LatticeExpr::Sum(_)) {
                    write!(f, "({c})^{k}")
                } else {
                    write!(f, "{c}^{k}")
                }
            }
            LatticeExpr::Sum(cs) => {
                let s: Vec<String> = cs.iter().map(|c| c.to_string()).collect();
                write!(f, "{}", s.join(" + "))
            }
        }
    }
}

/// Canonical printed form.
pub fn print(e: &LatticeExpr) -> String {
    e.canonical().to_string()
}

pub fn parse(text: &str) -> Result<LatticeExpr> {
    let mut p = Parser { src: text, pos: 0 };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.err("'+' or end of input"));
    }
    Ok(e)
}

/// Parses and evaluates in one step.
pub fn parse_lattice(text: &str) -> Result<Lattice> {
    Ok(parse(text)?.eval())
}

impl FromStr for LatticeExpr {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse(s)
    }
}

/// Strips a `#` comment and surrounding whitespace.
pub fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("").trim()
}

/// A lattice list file: one expression per line, `#rank n` section headers,
/// other `#name value` lines kept as directives, `#` comments elsewhere.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TableFile {
    pub entries: Vec<TableEntry>,
    pub directives: Vec<(String, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableEntry {
    pub rank_header: Option<usize>,
    pub expr: LatticeExpr,
    pub line: usize,
}

impl TableFile {
    pub fn parse(text: &str) -> Result<TableFile> {
        let mut out = TableFile::default();
        let mut rank = None;
        for (i, raw) in text.lines().enumerate() {
            let t = raw.trim();
            if let Some(d) = t.strip_prefix('#') {
                let mut it = d.trim().splitn(2, char::is_whitespace);
                let key = it.next().unwrap_or("");
                let val = it.next().unwrap_or("").trim();
                if key == "rank" {
                    rank = Some(val.parse().map_err(|_| Error::Syntax {
                        position: 0,
                        expected: format!("rank number on line {}", i + 1),
                    })?);
                } else if !key.is_empty() && key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
                    out.directives.push((key.to_string(), val.to_string()));
                }
                continue;
            }
            let body = strip_comment(t);
            if body.is_empty() {
                continue;
            }
            let expr = parse(body).map_err(|e| match e {
                Error::Syntax { position, expected } => {
                    Error::Syntax { position, expected: format!("{expected} (line {})", i + 1) }
                }
                other => other,
            })?;
            out.entries.push(TableEntry { rank_header: rank, expr, line: i + 1 });
        }
        Ok(out)
    }

    pub fn directive(&self, key: &str) -> Option<&str> {
        self.directives.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn with_rank(&self, n: usize) -> impl Iterator<Item = &TableEntry> {
        self.entries.iter().filter(move |e| e.rank_header == Some(n))
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

const SUBSCRIPTS: &str = "₀₁₂₃₄₅₆₇₈₉";
const SUPERSCRIPTS: &str = "⁰¹²³⁴⁵⁶⁷⁸⁹";

fn script_digit(c: char, set: &str) -> Option<u32> {
    set.chars().position(|d| d == c).map(|p| p as u32)
}

impl<'a> Parser<'a> {
    fn err(&self, expected: &str) -> Error {
        Error::Syntax { position: self.pos, expected: expected.to_string() }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.bump();
        }
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<LatticeExpr> {
        let mut terms = vec![self.term()?];
        loop {
            self.skip_ws();
            match self.peek() {
                Some('+') | Some('⊕') => {
                    self.bump();
                    terms.push(self.term()?);
                }
                _ => break,
            }
        }
        Ok(if terms.len() == 1 { terms.pop().unwrap() } else { LatticeExpr::Sum(terms) })
    }

    fn term(&mut self) -> Result<LatticeExpr> {
        let mut e = self.atom()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some('(') => {
                    self.bump();
                    let k = self.int()?;
                    if k.is_zero() {
                        return Err(Error::ZeroScale);
                    }
                    if !self.eat(')') {
                        return Err(self.err("')'"));
                    }
                    e = LatticeExpr::Twist(Box::new(e), k);
                }
                Some('^') => {
                    self.bump();
                    self.skip_ws();
                    let braced = self.eat('{');
                    let k = self.uint()?;
                    if braced && !self.eat('}') {
                        return Err(self.err("'}'"));
                    }
                    e = LatticeExpr::Power(Box::new(e), k);
                }
                Some(c) if script_digit(c, SUPERSCRIPTS).is_some() => {
                    let mut k = 0u32;
                    while let Some(d) = self.peek().and_then(|c| script_digit(c, SUPERSCRIPTS)) {
                        self.bump();
                        k = k * 10 + d;
                    }
                    e = LatticeExpr::Power(Box::new(e), k);
                }
                _ => return Ok(e),
            }
        }
    }

    fn atom(&mut self) -> Result<LatticeExpr> {
        self.skip_ws();
        let start = self.pos;
        match self.peek() {
            Some('U') => {
                self.bump();
                Ok(LatticeExpr::Named(Family::U, 0))
            }
            Some(c @ ('A' | 'D' | 'E')) => {
                self.bump();
                let fam = match c {
                    'A' => Family::A,
                    'D' => Family::D,
                    _ => Family::E,
                };
                let n = self.index()?;
                LatticeExpr::named(fam, n).map_err(|e| match e {
                    Error::BadIndex(s) => Error::BadIndex(format!("{s} at byte {start}")),
                    other => other,
                })
            }
            Some('[') => {
                self.bump();
                let mut entries = vec![self.int()?];
                while self.eat(',') {
                    entries.push(self.int()?);
                }
                if !self.eat(']') {
                    return Err(self.err("',' or ']'"));
                }
                if entries.len() == 1 {
                    Ok(LatticeExpr::RankOne(entries.pop().unwrap()))
                } else {
                    LatticeExpr::explicit(entries)
                }
            }
            Some('(') => {
                self.bump();
                let e = self.expr()?;
                if !self.eat(')') {
                    return Err(self.err("')'"));
                }
                Ok(e)
            }
            _ => Err(self.err("one of U, A, D, E, '[', '('")),
        }
    }

    fn index(&mut self) -> Result<u32> {
        if let Some(c) = self.peek() {
            if script_digit(c, SUBSCRIPTS).is_some() {
                let mut n = 0u32;
                while let Some(d) = self.peek().and_then(|c| script_digit(c, SUBSCRIPTS)) {
                    self.bump();
                    n = n.saturating_mul(10).saturating_add(d);
                }
                return Ok(n);
            }
        }
        if self.peek() == Some('_') {
            self.bump();
            if self.peek() == Some('{') {
                self.bump();
                let n = self.uint()?;
                if !self.eat('}') {
                    return Err(self.err("'}'"));
                }
                return Ok(n);
            }
        }
        self.uint()
    }

    fn uint(&mut self) -> Result<u32> {
        self.skip_ws();
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.bump();
        }
        if start == self.pos {
            return Err(self.err("unsigned integer"));
        }
        self.src[start..self.pos].parse().map_err(|_| Error::Syntax {
            position: start,
            expected: "integer that fits in 32 bits".into(),
        })
    }

    fn int(&mut self) -> Result<Int> {
        self.skip_ws();
        let start = self.pos;
        if matches!(self.peek(), Some('-') | Some('−')) {
            self.bump();
            self.skip_ws();
        }
        let digits = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.bump();
        }
        if digits == self.pos {
            return Err(Error::Syntax { position: digits, expected: "integer".into() });
        }
        let v: Int = self.src[digits..self.pos].parse().expect("ascii digits");
        Ok(if start != digits { -v } else { v })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::int;

    fn g(rows: &[&[i64]]) -> Lattice {
        Lattice::from_rows(rows).unwrap()
    }

    #[test]
    fn parse_examples() {
        assert_eq!(
            parse("U + A1(3)").unwrap(),
            LatticeExpr::Sum(vec![
                LatticeExpr::Named(Family::U, 0),
                LatticeExpr::Twist(Box::new(LatticeExpr::Named(Family::A, 1)), int(3)),
            ])
        );
        let l = parse_lattice("[0,2,2,0,1,-14]").unwrap();
        assert_eq!(l, g(&[&[0, 2, 0], &[2, 2, 1], &[0, 1, -14]]));
        let l = parse_lattice("U(2) + A2^2").unwrap();
        assert_eq!(l.rank(), 6);
        assert_eq!(l.determinant(), int(-4 * 9));
    }

    #[test]
    fn aliases_and_unicode() {
        let a = parse_lattice("U ⊕ A₁²(2)").unwrap();
        let b = parse_lattice("U + A_1^{2}(2)").unwrap();
        let c = parse_lattice("U+A1(2)+A1(2)").unwrap();
        assert_eq!(a, c);
        assert_eq!(b, c);
        assert_eq!(parse_lattice("D_{11}").unwrap().rank(), 11);
        assert_eq!(parse_lattice("[-2, 1, −4]").unwrap(), g(&[&[-2, 1], &[1, -4]]));
    }

    #[test]
    fn errors() {
        assert!(matches!(parse("E9"), Err(Error::BadIndex(_))));
        assert!(matches!(parse("D3"), Err(Error::BadIndex(_))));
        assert_eq!(parse("[1,2]"), Err(Error::BadTriangleCount(2)));
        assert!(matches!(parse("U +"), Err(Error::Syntax { position: 3, .. })));
        assert!(matches!(parse("U A1"), Err(Error::Syntax { position: 2, .. })));
        assert_eq!(parse("A1(0)"), Err(Error::ZeroScale));
    }

    #[test]
    fn eval_examples() {
        assert_eq!(parse_lattice("A1").unwrap(), g(&[&[-2]]));
        let l = parse_lattice("[8] + A2").unwrap();
        assert_eq!((l.rank(), l.determinant()), (3, int(24)));
        let l = parse_lattice("U(16) + A1").unwrap();
        assert_eq!((l.rank(), l.determinant()), (3, int(512)));
        for (s, det) in [("A4", 5), ("D4", 4), ("D5", -4), ("E6", 3), ("E7", -2), ("E8", 1)] {
            assert_eq!(parse_lattice(s).unwrap().determinant(), int(det), "{s}");
            assert!(parse_lattice(s).unwrap().is_negative_definite(), "{s}");
        }
    }

    #[test]
    fn print_examples() {
        let a1 = LatticeExpr::Named(Family::A, 1);
        assert_eq!(print(&LatticeExpr::Sum(vec![a1.clone(), a1])), "A1^2");
        let e = LatticeExpr::ExplicitGram(vec![int(-2), int(1), int(-4)]);
        assert_eq!(print(&e), "[-2,1,-4]");
        assert_eq!(print(&parse("A1(3) + U").unwrap()), "A1(3) + U");
        assert_eq!(parse("A1(3) + U").unwrap().sorted_form().to_string(), "U + A1(3)");
        assert_eq!(print(&parse("[2]+A1^2(2)+A1").unwrap()), "[2] + A1(2)^2 + A1");
        let sorted = parse("[2]+A1^2(2)+A1").unwrap().sorted_form();
        assert_eq!(sorted.to_string(), "A1 + A1(2)^2 + [2]");
        assert_eq!(print(&parse("(A1+A2)(2)(3)").unwrap()), "A1(6) + A2(6)");
    }
}
