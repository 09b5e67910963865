//! Root systems of negative definite lattices and their ADE decomposition.

use std::collections::HashSet;
use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::enumerate;
use crate::error::{Error, Result};
use crate::lattice::{Lattice, SublatticeBasis};
use crate::matrix::{self, Int, Rat};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum AdeType {
    A,
    D,
    E,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootComponent {
    pub kind: AdeType,
    pub rank: usize,
    pub roots: Vec<Vec<Int>>,
    /// Simple roots for a fixed generic chamber.
    pub simple: Vec<Vec<Int>>,
    pub highest: Vec<Int>,
}

impl RootComponent {
    pub fn label(&self) -> String {
        format!("{:?}{}", self.kind, self.rank)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootSystem {
    pub ambient: Lattice,
    pub roots: Vec<Vec<Int>>,
    pub components: Vec<RootComponent>,
}

impl RootSystem {
    pub fn rank(&self) -> usize {
        self.components.iter().map(|c| c.rank).sum()
    }

    pub fn simple_roots(&self) -> Vec<Vec<Int>> {
        self.components.iter().flat_map(|c| c.simple.iter().cloned()).collect()
    }

    /// Type string such as `A1^2 + D4`, components sorted.
    pub fn type_label(&self) -> String {
        let mut labels: Vec<(AdeType, usize)> = self.components.iter().map(|c| (c.kind, c.rank)).collect();
        labels.sort();
        let mut parts: Vec<String> = Vec::new();
        let mut i = 0;
        while i < labels.len() {
            let j = (i..labels.len()).find(|&j| labels[j] != labels[i]).unwrap_or(labels.len());
            let base = format!("{:?}{}", labels[i].0, labels[i].1);
            parts.push(if j - i > 1 { format!("{base}^{}", j - i) } else { base });
            i = j;
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }

    pub fn root_sublattice(&self) -> Option<SublatticeBasis> {
        let s = self.simple_roots();
        if s.is_empty() {
            None
        } else {
            Some(SublatticeBasis { vectors: s })
        }
    }
}

impl fmt::Display for RootSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({} roots)", self.type_label(), self.roots.len())
    }
}

/// ADE type from the rank and number of roots of an irreducible system.
pub fn classify(rank: usize, count: usize) -> Option<AdeType> {
    let n = rank;
    if count == n * (n + 1) {
        Some(AdeType::A)
    } else if n >= 4 && count == 2 * n * (n - 1) {
        Some(AdeType::D)
    } else if matches!((n, count), (6, 72) | (7, 126) | (8, 240)) {
        Some(AdeType::E)
    } else {
        None
    }
}

/// Roots (norm −2 vectors) of a negative definite lattice with ADE decomposition.
pub fn roots(m: &Lattice) -> Result<RootSystem> {
    if !m.is_negative_definite() {
        return Err(Error::NotNegativeDefinite);
    }
    let pos = m.negate();
    let all = enumerate::vectors_of_norm(&pos, &Int::from(2))?;
    let components = decompose(m, &all);
    Ok(RootSystem { ambient: m.clone(), roots: all, components })
}

pub fn has_finite_index_root_sublattice(m: &Lattice) -> Result<bool> {
    Ok(roots(m)?.rank() == m.rank())
}

fn decompose(m: &Lattice, all: &[Vec<Int>]) -> Vec<RootComponent> {
    let n = all.len();
    if n == 0 {
        return Vec::new();
    }
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut c = x;
        while p[c] != r {
            let nx = p[c];
            p[c] = r;
            c = nx;
        }
        r
    }
    let images: Vec<Vec<Int>> = all.iter().map(|r| matrix::vec_mat(r, m.gram())).collect();
    for i in 0..n {
        for j in i + 1..n {
            if !matrix::dot(&images[i], &all[j]).is_zero() {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a] = b;
                }
            }
        }
    }
    // generic functional: no root is orthogonal to it
    let dim = m.rank();
    let mut w: Vec<Int> = (0..dim).map(|i| Int::from(1i64 << (i % 20)) + Int::from(i as i64 * 7919)).collect();
    let mut salt = 1u64;
    while all.iter().any(|r| matrix::dot(&w, r).is_zero()) {
        salt += 1;
        w = (0..dim).map(|i| Int::from(((i as u64 + 1) * 104729 * salt) % 1_000_003 + 1)).collect();
    }

    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..n {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    let mut comps: Vec<RootComponent> = groups
        .values()
        .map(|idx| {
            let roots: Vec<Vec<Int>> = idx.iter().map(|&i| all[i].clone()).collect();
            component(&roots, &w)
        })
        .collect();
    comps.sort_by(|a, b| (a.kind, a.rank, &a.simple).cmp(&(b.kind, b.rank, &b.simple)));
    comps
}

fn component(roots: &[Vec<Int>], w: &[Int]) -> RootComponent {
    let set: HashSet<&Vec<Int>> = roots.iter().collect();
    let positive: Vec<&Vec<Int>> = roots.iter().filter(|r| matrix::dot(w, r).is_positive()).collect();
    let sub = |a: &Vec<Int>, b: &Vec<Int>| a.iter().zip(b).map(|(x, y)| x - y).collect::<Vec<Int>>();
    let add = |a: &Vec<Int>, b: &Vec<Int>| a.iter().zip(b).map(|(x, y)| x + y).collect::<Vec<Int>>();
    let pos_set: HashSet<&Vec<Int>> = positive.iter().copied().collect();
    let mut simple: Vec<Vec<Int>> = positive
        .iter()
        .filter(|r| !positive.iter().any(|s| pos_set.contains(&sub(r, s))))
        .map(|r| (*r).clone())
        .collect();
    simple.sort();
    let highest = positive
        .iter()
        .find(|r| simple.iter().all(|a| !set.contains(&add(r, a))))
        .map(|r| (*r).clone())
        .expect("a finite root system has a highest root");
    let rank = simple.len();
    let kind = classify(rank, roots.len()).expect("irreducible simply-laced root system");
    let mut roots = roots.to_vec();
    roots.sort();
    RootComponent { kind, rank, roots, simple, highest }
}

/// Coordinates of `v` in the given simple roots (which must span it rationally).
pub fn simple_coordinates(simple: &[Vec<Int>], v: &[Int]) -> Option<Vec<Rat>> {
    let vr: Vec<Rat> = v.iter().map(|x| Rat::from(x.clone())).collect();
    matrix::solve_rational(simple, &vr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_lattice;

    fn rs(s: &str) -> RootSystem {
        roots(&parse_lattice(s).unwrap()).unwrap()
    }

    #[test]
    fn spec_examples() {
        let a = rs("A1^2");
        assert_eq!(a.roots.len(), 4);
        assert_eq!(a.type_label(), "A1^2");
        let d = rs("D4");
        assert_eq!(d.roots.len(), 24);
        assert_eq!(d.type_label(), "D4");
        assert!(rs("[-4]").roots.is_empty());
    }

    #[test]
    fn finite_index() {
        assert!(has_finite_index_root_sublattice(&parse_lattice("A2").unwrap()).unwrap());
        assert!(!has_finite_index_root_sublattice(&parse_lattice("[-4]").unwrap()).unwrap());
        let m = parse_lattice("E8(3) + A2").unwrap();
        let r = roots(&m).unwrap();
        assert_eq!(r.rank(), 2);
        assert!(!has_finite_index_root_sublattice(&m).unwrap());
    }

    #[test]
    fn simple_roots_have_cartan_gram() {
        for s in ["A3", "D5", "E6", "E7", "A2 + D4"] {
            let m = parse_lattice(s).unwrap();
            let r = roots(&m).unwrap();
            for c in &r.components {
                let g = matrix::congruence(m.gram(), &c.simple);
                for (i, row) in g.iter().enumerate() {
                    for (j, x) in row.iter().enumerate() {
                        let ok = if i == j { *x == Int::from(-2) } else { *x == Int::from(0) || *x == Int::from(1) };
                        assert!(ok, "{s}: {g:?}");
                    }
                }
                assert_eq!(m.norm(&c.highest), Int::from(-2));
            }
        }
    }

    #[test]
    fn overlattice_roots() {
        let r = rs("[-2,1,-4]");
        assert_eq!(r.type_label(), "A1");
        assert_eq!(rs("A1(2) + A2").type_label(), "A2");
    }

    #[test]
    fn rejects_indefinite() {
        assert_eq!(roots(&parse_lattice("U").unwrap()), Err(Error::NotNegativeDefinite));
    }
}
