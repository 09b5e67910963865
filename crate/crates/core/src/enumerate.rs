//! Basis reduction and short-vector enumeration in positive definite lattices.
//!
//! Reduction is exact (rational Gram–Schmidt). The Fincke–Pohst search prunes
//! with `f64` bounds widened by a safety margin; every emitted vector is then
//! checked with exact integer arithmetic, so the output never contains a
//! vector above the bound.

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::matrix::{self, Int, IntMatrix, Rat};

/// Gram–Schmidt data of a Gram matrix: squared lengths `b` and coefficients `mu[i][j]`, `j < i`.
struct Gso {
    b: Vec<Rat>,
    mu: Vec<Vec<Rat>>,
}

fn gso(g: &[Vec<Int>]) -> Gso {
    let n = g.len();
    let mut b: Vec<Rat> = Vec::with_capacity(n);
    let mut mu = vec![vec![Rat::zero(); n]; n];
    for i in 0..n {
        for j in 0..i {
            let mut s = Rat::from(g[i][j].clone());
            for k in 0..j {
                s -= &mu[j][k] * &mu[i][k] * &b[k];
            }
            mu[i][j] = s / &b[j];
        }
        let mut s = Rat::from(g[i][i].clone());
        for k in 0..i {
            s -= &mu[i][k] * &mu[i][k] * &b[k];
        }
        b.push(s);
    }
    Gso { b, mu }
}

fn round(x: &Rat) -> Int {
    (x + Rat::new(Int::one(), Int::from(2))).floor().to_integer()
}

/// `b_k ← b_k − q·b_j` applied to the Gram matrix and the transform.
fn reduce_row(g: &mut [Vec<Int>], t: &mut [Vec<Int>], k: usize, j: usize, q: &Int) {
    let n = g.len();
    for l in 0..n {
        let d = q * &g[j][l];
        g[k][l] -= d;
    }
    for l in 0..n {
        let d = q * &g[l][j];
        g[l][k] -= d;
    }
    let tj = t[j].clone();
    for (x, y) in t[k].iter_mut().zip(&tj) {
        *x -= q * y;
    }
}

fn swap_rows(g: &mut [Vec<Int>], t: &mut [Vec<Int>], a: usize, b: usize) {
    g.swap(a, b);
    for row in g.iter_mut() {
        row.swap(a, b);
    }
    t.swap(a, b);
}

/// LLL reduction (δ = 3/4) of a positive definite lattice.
///
/// Returns `(reduced, t)` with `reduced.gram() = t · G · tᵀ` and `t` unimodular.
pub fn lll_reduce(l: &Lattice) -> Result<(Lattice, IntMatrix)> {
    if !l.is_positive_definite() {
        return Err(Error::NotPositiveDefinite);
    }
    let n = l.rank();
    let mut g = l.gram().clone();
    let mut t = matrix::identity(n);
    let delta = Rat::new(Int::from(3), Int::from(4));
    let mut k = 1;
    let mut d = gso(&g);
    while k < n {
        for j in (0..k).rev() {
            let q = round(&d.mu[k][j]);
            if q.is_zero() {
                continue;
            }
            reduce_row(&mut g, &mut t, k, j, &q);
            let qr = Rat::from(q);
            for l in 0..j {
                let x = &qr * &d.mu[j][l];
                d.mu[k][l] -= x;
            }
            d.mu[k][j] -= &qr;
        }
        let lhs = d.b[k].clone();
        let rhs = (&delta - &d.mu[k][k - 1] * &d.mu[k][k - 1]) * &d.b[k - 1];
        if lhs >= rhs {
            k += 1;
        } else {
            swap_rows(&mut g, &mut t, k, k - 1);
            d = gso(&g);
            k = (k - 1).max(1);
        }
    }
    Ok((Lattice::new(g).expect("congruent to symmetric"), t))
}

/// Nonzero vectors `v` (original coordinates) with `0 < v² ≤ bound`, with their norms.
///
/// With `half` set only one of each `±v` pair is returned (first nonzero
/// coordinate positive). Fails with `TooLarge` once more than `cap` vectors
/// would be produced.
pub fn short_vectors_with_norms(
    d: &Lattice,
    bound: &Rat,
    half: bool,
    cap: Option<usize>,
) -> Result<Vec<(Vec<Int>, Int)>> {
    let (red, t) = lll_reduce(d)?;
    let n = red.rank();
    if n == 0 || !bound.is_positive() {
        return Ok(Vec::new());
    }
    let exact_bound = bound.floor().to_integer();
    let gs = gso(red.gram());
    let b: Vec<f64> = gs.b.iter().map(|x| x.to_f64().unwrap_or(f64::MAX)).collect();
    let mu: Vec<Vec<f64>> = gs.mu.iter().map(|r| r.iter().map(|x| x.to_f64().unwrap_or(0.0)).collect()).collect();
    let bf = bound.to_f64().unwrap_or(f64::MAX);
    let eps = 1e-7 * (1.0 + bf);

    let mut search = Search { n, b, mu, eps, x: vec![0i64; n], found: Vec::new() };
    search.descend(n - 1, bf + eps, cap)?;

    let rg = red.gram();
    let mut out = Vec::with_capacity(search.found.len());
    for x in search.found {
        let xi: Vec<Int> = x.iter().map(|&c| Int::from(c)).collect();
        let norm = matrix::pair(rg, &xi, &xi);
        if norm.is_zero() || norm > exact_bound {
            continue;
        }
        let v = matrix::vec_mat(&xi, &t);
        if half && v.iter().find(|c| !c.is_zero()).is_some_and(|c| c.is_negative()) {
            continue;
        }
        out.push((v, norm));
    }
    out.sort();
    Ok(out)
}

pub fn short_vectors(d: &Lattice, bound: &Rat, half: bool) -> Result<Vec<Vec<Int>>> {
    Ok(short_vectors_with_norms(d, bound, half, None)?.into_iter().map(|(v, _)| v).collect())
}

/// All vectors of exactly the given norm in a positive definite lattice.
pub fn vectors_of_norm(d: &Lattice, norm: &Int) -> Result<Vec<Vec<Int>>> {
    Ok(short_vectors_with_norms(d, &Rat::from(norm.clone()), false, None)?
        .into_iter()
        .filter(|(_, m)| m == norm)
        .map(|(v, _)| v)
        .collect())
}

/// Minimum of a positive definite lattice.
pub fn minimum(d: &Lattice) -> Result<Int> {
    let (red, _) = lll_reduce(d)?;
    let upper = red.gram().iter().enumerate().map(|(i, r)| r[i].clone()).min().unwrap_or_else(Int::zero);
    let v = short_vectors_with_norms(&red, &Rat::from(upper.clone()), true, None)?;
    Ok(v.into_iter().map(|(_, m)| m).min().unwrap_or(upper))
}

struct Search {
    n: usize,
    b: Vec<f64>,
    mu: Vec<Vec<f64>>,
    eps: f64,
    x: Vec<i64>,
    found: Vec<Vec<i64>>,
}

impl Search {
    fn descend(&mut self, i: usize, rem: f64, cap: Option<usize>) -> Result<()> {
        let mut c = 0.0;
        for j in i + 1..self.n {
            c -= self.mu[j][i] * self.x[j] as f64;
        }
        let r = (rem.max(0.0) / self.b[i]).sqrt() + self.eps;
        let lo = (c - r).ceil() as i64;
        let hi = (c + r).floor() as i64;
        for xi in lo..=hi {
            let diff = xi as f64 - c;
            let left = rem - self.b[i] * diff * diff;
            if left < -self.eps {
                continue;
            }
            self.x[i] = xi;
            if i == 0 {
                if self.x.iter().any(|&v| v != 0) {
                    self.found.push(self.x.clone());
                    if cap.is_some_and(|m| self.found.len() > m) {
                        return Err(Error::TooLarge(format!("more than {} short vectors", cap.unwrap())));
                    }
                }
            } else {
                self.descend(i - 1, left, cap)?;
            }
        }
        self.x[i] = 0;
        Ok(())
    }
}

/// Divisibility of `v` in `L`: the positive generator of `(v, L)`.
pub fn divisibility(l: &Lattice, v: &[Int]) -> Int {
    matrix::vec_mat(v, l.gram()).iter().fold(Int::zero(), |a, b| a.gcd(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_lattice;
    use crate::matrix::int;

    fn pos(s: &str) -> Lattice {
        parse_lattice(s).unwrap().negate()
    }

    #[test]
    fn lll_keeps_gram_congruent() {
        let l = Lattice::from_rows(&[&[10, 7, 3], &[7, 10, 5], &[3, 5, 10]]).unwrap();
        let (red, t) = lll_reduce(&l).unwrap();
        assert_eq!(red.gram(), &matrix::congruence(l.gram(), &t));
        assert_eq!(matrix::determinant(&t).abs(), int(1));
        assert_eq!(red.determinant(), l.determinant());
    }

    #[test]
    fn spec_counts() {
        assert_eq!(short_vectors(&pos("A2"), &Rat::from(int(2)), true).unwrap().len(), 3);
        assert_eq!(short_vectors(&pos("A2"), &Rat::from(int(2)), false).unwrap().len(), 6);
        assert_eq!(short_vectors(&pos("E8"), &Rat::from(int(2)), true).unwrap().len(), 120);
        let two = Lattice::from_rows(&[&[2]]).unwrap();
        assert!(short_vectors(&two, &Rat::from(int(1)), false).unwrap().is_empty());
    }

    #[test]
    fn rejects_indefinite() {
        let u = parse_lattice("U").unwrap();
        assert_eq!(short_vectors(&u, &Rat::from(int(2)), false), Err(Error::NotPositiveDefinite));
    }

    #[test]
    fn cap_is_enforced() {
        let r = short_vectors_with_norms(&pos("E8"), &Rat::from(int(4)), false, Some(100));
        assert!(matches!(r, Err(Error::TooLarge(_))));
    }

    #[test]
    fn minimum_of_twisted_e8() {
        assert_eq!(minimum(&pos("E8(3)")).unwrap(), int(6));
    }
}
