//! Reference lists of lattices (possibly incomplete) and sound membership
//! queries against them.

use std::collections::BTreeSet;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::dsl::TableFile;
use crate::error::{Error, Result};
use crate::isometry;
use crate::lattice::Lattice;
use crate::matrix::Int;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Membership {
    /// Same genus as a listed entry.
    GenusMatch,
    /// Provably not isometric to any member of the full list.
    Absent,
    Unknown,
}

/// A list of lattices with what is known about the part that is not listed.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ReferenceTable {
    pub entries: Vec<Lattice>,
    /// Every member of the full list is among `entries`.
    pub complete: bool,
    /// The set of `|det|` over the full list, when known.
    pub dets: Option<BTreeSet<Int>>,
    /// `|det|` values that occur in no member of the full list.
    pub absent_dets: BTreeSet<Int>,
    /// Every `|det|` in the full list is a product of these primes.
    pub det_primes: Option<Vec<Int>>,
}

fn parse_ints(v: &str) -> Result<Vec<Int>> {
    v.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<Int>().map_err(|_| Error::Syntax { position: 0, expected: format!("integer, got `{s}`") }))
        .collect()
}

impl ReferenceTable {
    pub fn complete(entries: Vec<Lattice>) -> Self {
        ReferenceTable { entries, complete: true, ..Default::default() }
    }

    /// Entries of the given rank plus the `#complete`, `#dets`, `#absent-dets`
    /// and `#det-primes` directives.
    pub fn from_table(file: &TableFile, rank: Option<usize>) -> Result<Self> {
        let entries = file
            .entries
            .iter()
            .map(|e| e.expr.eval())
            .filter(|l| rank.map_or(true, |r| l.rank() == r))
            .collect();
        let complete = file.directive("complete").is_some_and(|v| v.trim() == "true");
        let dets = file.directive("dets").map(parse_ints).transpose()?.map(|v| v.into_iter().collect());
        let absent_dets = file.directive("absent-dets").map(parse_ints).transpose()?.unwrap_or_default().into_iter().collect();
        let det_primes = file.directive("det-primes").map(parse_ints).transpose()?;
        Ok(ReferenceTable { entries, complete, dets, absent_dets, det_primes })
    }

    pub fn membership(&self, l: &Lattice) -> Result<Membership> {
        for t in &self.entries {
            if t.rank() == l.rank() && t.determinant() == l.determinant() && isometry::same_genus(t, l)? {
                return Ok(Membership::GenusMatch);
            }
        }
        let d = l.determinant().abs();
        if self.absent_dets.contains(&d) {
            return Ok(Membership::Absent);
        }
        if let Some(primes) = &self.det_primes {
            let mut rest = d.clone();
            for p in primes {
                while !rest.is_zero() && (&rest % p).is_zero() {
                    rest /= p;
                }
            }
            if !rest.is_one() {
                return Ok(Membership::Absent);
            }
        }
        if self.dets.as_ref().is_some_and(|s| !s.contains(&d)) {
            return Ok(Membership::Absent);
        }
        Ok(if self.complete { Membership::Absent } else { Membership::Unknown })
    }
}

/// Union of reference tables.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ReferenceSet {
    pub parts: Vec<ReferenceTable>,
}

impl ReferenceSet {
    pub fn single(t: ReferenceTable) -> Self {
        ReferenceSet { parts: vec![t] }
    }

    pub fn membership(&self, l: &Lattice) -> Result<Membership> {
        let mut all_absent = true;
        for p in &self.parts {
            match p.membership(l)? {
                Membership::GenusMatch => return Ok(Membership::GenusMatch),
                Membership::Unknown => all_absent = false,
                Membership::Absent => {}
            }
        }
        Ok(if all_absent { Membership::Absent } else { Membership::Unknown })
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }
}

/// Smallest prime factor, by trial division.
pub fn smallest_prime_factor(n: &Int) -> Option<Int> {
    let n = n.abs();
    if n <= Int::one() {
        return None;
    }
    let mut p = Int::from(2);
    while &p * &p <= n {
        if n.is_multiple_of(&p) {
            return Some(p);
        }
        p += 1;
    }
    Some(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_lattice;

    fn lat(s: &str) -> Lattice {
        parse_lattice(s).unwrap()
    }

    #[test]
    fn membership_rules() {
        let t = ReferenceTable::complete(vec![lat("U + E8 + A2")]);
        assert_eq!(t.membership(&lat("U + E6 + A2^2")).unwrap(), Membership::Absent);
        assert_eq!(t.membership(&lat("U + A2 + E8")).unwrap(), Membership::GenusMatch);

        let text = "#det-primes 2\nU + E8 + A1^2\n";
        let t = ReferenceTable::from_table(&TableFile::parse(text).unwrap(), None).unwrap();
        assert_eq!(t.membership(&lat("U + E8 + A2")).unwrap(), Membership::Absent);
        assert_eq!(t.membership(&lat("U + D8 + A1^2")).unwrap(), Membership::Unknown);

        let text = "#dets 3 4\n#absent-dets 242\nU + E8 + A2\n";
        let t = ReferenceTable::from_table(&TableFile::parse(text).unwrap(), None).unwrap();
        assert_eq!(t.membership(&lat("U + A1 + A1(2)")).unwrap(), Membership::Absent);
        assert_eq!(t.membership(&lat("U + E8 + A1^2")).unwrap(), Membership::Unknown);
        let s = ReferenceSet { parts: vec![t, ReferenceTable::default()] };
        assert_eq!(s.membership(&lat("U + A1 + A1(2)")).unwrap(), Membership::Unknown);
    }

    #[test]
    fn prime_factors() {
        assert_eq!(smallest_prime_factor(&Int::from(91)), Some(Int::from(7)));
        assert_eq!(smallest_prime_factor(&Int::from(13)), Some(Int::from(13)));
        assert_eq!(smallest_prime_factor(&Int::from(1)), None);
    }
}
