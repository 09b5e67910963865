//! Exact covering radii for the cases that have closed forms: rank one, rank
//! two (obtuse superbase), scaled ADE root lattices via a table, and
//! orthogonal sums of these.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;

use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::dsl::strip_comment;
use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::matrix::{Int, Rat};
use crate::roots::{self, AdeType};

const BUILTIN_TABLE: &str = include_str!("../../../tables/covering_radii.tbl");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoveringMethod {
    Rank1,
    Rank2Delaunay,
    DirectSum,
    Table,
}

impl fmt::Display for CoveringMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CoveringMethod::Rank1 => "rank1",
            CoveringMethod::Rank2Delaunay => "rank2-delaunay",
            CoveringMethod::DirectSum => "direct-sum",
            CoveringMethod::Table => "table",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CoveringRadiusResult {
    Known { value_sq: Rat, method: CoveringMethod },
    Unknown,
}

impl CoveringRadiusResult {
    pub fn value(&self) -> Option<&Rat> {
        match self {
            CoveringRadiusResult::Known { value_sq, .. } => Some(value_sq),
            CoveringRadiusResult::Unknown => None,
        }
    }
}

/// Covering radius squared of unit root lattices, keyed by type and rank.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CoveringTable {
    values: HashMap<(AdeType, usize), Rat>,
}

impl CoveringTable {
    pub fn parse(text: &str) -> Result<Self> {
        let mut values = HashMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = strip_comment(raw);
            if line.is_empty() {
                continue;
            }
            let bad = || Error::Syntax { position: 0, expected: format!("`<family><rank> <p>/<q>` on line {}", i + 1) };
            let mut it = line.split_whitespace();
            let (name, val) = (it.next().ok_or_else(bad)?, it.next().ok_or_else(bad)?);
            let kind = match name.chars().next() {
                Some('A') => AdeType::A,
                Some('D') => AdeType::D,
                Some('E') => AdeType::E,
                _ => return Err(bad()),
            };
            let rank: usize = name[1..].parse().map_err(|_| bad())?;
            let value: Rat = val.parse().map_err(|_| bad())?;
            values.insert((kind, rank), value);
        }
        Ok(CoveringTable { values })
    }

    pub fn load(path: &Path) -> Result<Self> {
        CoveringTable::parse(&std::fs::read_to_string(path)?)
    }

    pub fn builtin() -> Self {
        CoveringTable::parse(BUILTIN_TABLE).expect("bundled table parses")
    }

    pub fn get(&self, kind: AdeType, rank: usize) -> Option<&Rat> {
        self.values.get(&(kind, rank))
    }
}

/// Splits the Gram matrix into orthogonal blocks of the given basis.
fn blocks(g: &[Vec<Int>]) -> Vec<Vec<usize>> {
    let n = g.len();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        let mut stack = vec![s];
        let mut comp = Vec::new();
        seen[s] = true;
        while let Some(i) = stack.pop() {
            comp.push(i);
            for j in 0..n {
                if !seen[j] && !g[i][j].is_zero() {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        comp.sort();
        out.push(comp);
    }
    out
}

/// Rank-two covering radius squared via an obtuse superbase.
pub fn rank2_covering_sq(a: &Int, b: &Int, c: &Int) -> Rat {
    let (mut a, mut b, mut c) = (a.clone(), b.clone(), c.clone());
    // Lagrange–Gauss reduction: |2b| ≤ a ≤ c
    loop {
        if a > c {
            std::mem::swap(&mut a, &mut c);
        }
        let two_b: Int = &b * 2;
        if two_b.abs() <= a {
            break;
        }
        // b₂ ← b₂ − q·b₁ with q the nearest integer to b/a
        let q = Rat::new(b.clone(), a.clone()).round().to_integer();
        let qb: Int = &q * &b;
        let qqa: Int = &q * &q * &a;
        c = &c - &qb - &qb + qqa;
        b = &b - &q * &a;
    }
    if b.is_positive() {
        b = -b;
    }
    let det = &a * &c - &b * &b;
    let n3: Int = &a + &c + &b + &b;
    Rat::new(a * c * n3, det * 4)
}

pub fn covering_radius_sq(d: &Lattice, table: &CoveringTable) -> Result<CoveringRadiusResult> {
    if !d.is_positive_definite() {
        return Err(Error::NotPositiveDefinite);
    }
    let g = d.gram();
    let parts = blocks(g);
    let mut total = Rat::zero();
    let mut single_method = None;
    for idx in &parts {
        let sub: Vec<Vec<Int>> = idx.iter().map(|&i| idx.iter().map(|&j| g[i][j].clone()).collect()).collect();
        let (v, m) = match block_value(&sub, table)? {
            Some(x) => x,
            None => return Ok(CoveringRadiusResult::Unknown),
        };
        total += v;
        single_method = Some(m);
    }
    let method = if parts.len() == 1 { single_method.unwrap() } else { CoveringMethod::DirectSum };
    if parts.is_empty() {
        return Ok(CoveringRadiusResult::Unknown);
    }
    Ok(CoveringRadiusResult::Known { value_sq: total, method })
}

fn block_value(g: &[Vec<Int>], table: &CoveringTable) -> Result<Option<(Rat, CoveringMethod)>> {
    match g.len() {
        1 => Ok(Some((Rat::new(g[0][0].clone(), Int::from(4)), CoveringMethod::Rank1))),
        2 => Ok(Some((rank2_covering_sq(&g[0][0], &g[0][1], &g[1][1]), CoveringMethod::Rank2Delaunay))),
        n => {
            let k = g.iter().flatten().fold(Int::zero(), |acc, x| acc.gcd(x));
            let unit = Lattice::new(g.iter().map(|r| r.iter().map(|x| -(x / &k)).collect()).collect())?;
            if !unit.is_even() {
                return Ok(None);
            }
            let rs = roots::roots(&unit)?;
            if rs.rank() != n || rs.components.len() != 1 {
                return Ok(None);
            }
            let comp = &rs.components[0];
            // a root lattice is the whole lattice iff the determinants agree
            let root_det = crate::lattice::SublatticeBasis { vectors: comp.simple.clone() }.gram_in(&unit).determinant();
            if root_det != unit.determinant() {
                return Ok(None);
            }
            Ok(table.get(comp.kind, comp.rank).map(|v| (v * Rat::from(k), CoveringMethod::Table)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_lattice;
    use crate::matrix::int;

    fn cr(s: &str) -> CoveringRadiusResult {
        covering_radius_sq(&parse_lattice(s).unwrap().negate(), &CoveringTable::builtin()).unwrap()
    }

    fn known(p: i64, q: i64, m: CoveringMethod) -> CoveringRadiusResult {
        CoveringRadiusResult::Known { value_sq: Rat::new(int(p), int(q)), method: m }
    }

    #[test]
    fn spec_examples() {
        let two = Lattice::from_rows(&[&[2]]).unwrap();
        assert_eq!(
            covering_radius_sq(&two, &CoveringTable::builtin()).unwrap(),
            known(1, 2, CoveringMethod::Rank1)
        );
        assert_eq!(cr("[-2,1,-4]"), known(8, 7, CoveringMethod::Rank2Delaunay));
        assert_eq!(cr("[-2,1,-22]"), known(242, 43, CoveringMethod::Rank2Delaunay));
    }

    #[test]
    fn reduction_handles_unreduced_forms() {
        // [2,-1,4] written in a skewed basis
        assert_eq!(rank2_covering_sq(&int(2), &int(3), &int(8)), Rat::new(int(8), int(7)));
        assert_eq!(rank2_covering_sq(&int(2), &int(1), &int(2)), Rat::new(int(2), int(3)));
    }

    #[test]
    fn table_and_sums() {
        assert_eq!(cr("E8"), known(1, 1, CoveringMethod::Table));
        assert_eq!(cr("D4(2)"), known(2, 1, CoveringMethod::Table));
        assert_eq!(cr("A1 + A2(3)"), known(1 + 4, 2, CoveringMethod::DirectSum));
        assert_eq!(cr("E8(3) + A1"), known(6 + 1, 2, CoveringMethod::DirectSum));
    }

    #[test]
    fn unknown_for_generic_rank3() {
        assert_eq!(cr("[-2,-1,-4,-1,0,-4]"), CoveringRadiusResult::Unknown);
    }

    #[test]
    fn rejects_indefinite() {
        let u = parse_lattice("U").unwrap();
        assert_eq!(covering_radius_sq(&u, &CoveringTable::builtin()), Err(Error::NotPositiveDefinite));
    }
}
