use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::lattice::Lattice;
use crate::matrix::Int;
use crate::roots::{self, AdeType};

use super::split_form;

/// A reducible fiber of the isotropic vector `e`: an extended Dynkin diagram.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiberDescription {
    pub kind: AdeType,
    /// Rank of the finite root system; the fiber has `rank + 1` components.
    pub rank: usize,
    pub component_count: usize,
    /// Simple roots followed by the affine node `e − θ`, in coordinates of `l`.
    pub component_vectors: Vec<Vec<Int>>,
}

impl FiberDescription {
    pub fn affine_type(&self) -> String {
        let base = match self.kind {
            AdeType::A => "A",
            AdeType::D => "D",
            AdeType::E => "E",
        };
        format!("{base}\u{303}{}", self.rank)
    }
}

impl fmt::Display for FiberDescription {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({} components)", self.affine_type(), self.component_count)
    }
}

/// Fibers of `e` (the first basis vector) for `l` in the basis `e, f, M`.
pub fn reducible_fibers(l: &Lattice) -> Result<Vec<FiberDescription>> {
    let m = split_form(l)?;
    if m.rank() == 0 {
        return Ok(Vec::new());
    }
    let rs = roots::roots(&m)?;
    let embed = |v: &[Int]| {
        let mut out = vec![Int::from(0), Int::from(0)];
        out.extend(v.iter().cloned());
        out
    };
    Ok(rs
        .components
        .iter()
        .map(|c| {
            let mut vectors: Vec<Vec<Int>> = c.simple.iter().map(|s| embed(s)).collect();
            let mut affine = embed(&c.highest.iter().map(|x| -x).collect::<Vec<_>>());
            affine[0] += 1;
            vectors.push(affine);
            FiberDescription { kind: c.kind, rank: c.rank, component_count: c.rank + 1, component_vectors: vectors }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_lattice;
    use crate::matrix;

    fn fibers(s: &str) -> Vec<FiberDescription> {
        reducible_fibers(&parse_lattice(s).unwrap()).unwrap()
    }

    #[test]
    fn examples() {
        let f = fibers("U + A1 + D9");
        let summary: Vec<(String, usize)> = f.iter().map(|x| (x.affine_type(), x.component_count)).collect();
        assert_eq!(summary, vec![("A\u{303}1".to_string(), 2), ("D\u{303}9".to_string(), 10)]);
        assert!(fibers("U + [-4]").is_empty());
        let f = fibers("U + A1^2");
        assert_eq!(f.len(), 2);
        assert!(f.iter().all(|x| x.component_count == 2));
    }

    #[test]
    fn components_form_extended_diagrams() {
        for s in ["U + A1", "U + A3", "U + D5", "U + E6", "U + E8 + A2"] {
            let l = parse_lattice(s).unwrap();
            for fib in reducible_fibers(&l).unwrap() {
                let g = matrix::congruence(l.gram(), &fib.component_vectors);
                let n = g.len();
                let mut edges = 0;
                for i in 0..n {
                    assert_eq!(g[i][i], Int::from(-2));
                    // every component is orthogonal to e
                    assert_eq!(fib.component_vectors[i][1], Int::from(0));
                    for j in i + 1..n {
                        assert!(g[i][j] >= Int::from(0));
                        if g[i][j] > Int::from(0) {
                            edges += 1;
                        }
                    }
                }
                // an affine diagram is a tree except the cycle of Ã_n (n ≥ 2)
                let expect = if fib.kind == AdeType::A && fib.rank >= 2 { n } else { n - 1 };
                assert_eq!(edges, expect, "{s}");
                // the Gram matrix is degenerate with kernel spanned by the marks
                assert_eq!(matrix::determinant(&g), Int::from(0));
            }
        }
    }
}
