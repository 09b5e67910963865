//! Integral lattices given by Gram matrices.

use std::fmt;

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{self, Int, IntMatrix, Rat};

/// A free ℤ-module with an integral symmetric bilinear form, stored as the
/// Gram matrix of an implicit basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Lattice {
    gram: IntMatrix,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Signature {
    pub positives: usize,
    pub negatives: usize,
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.positives, self.negatives)
    }
}

impl Lattice {
    pub fn new(gram: IntMatrix) -> Result<Self> {
        let n = gram.len();
        if gram.iter().any(|r| r.len() != n) {
            return Err(Error::NotSquare);
        }
        for i in 0..n {
            for j in 0..i {
                if gram[i][j] != gram[j][i] {
                    return Err(Error::NotSymmetric);
                }
            }
        }
        Ok(Lattice { gram })
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> Result<Self> {
        Lattice::new(matrix::from_i64(rows))
    }

    /// Convenience constructor for literal matrices.
    pub fn from_rows(rows: &[&[i64]]) -> Result<Self> {
        Lattice::new(rows.iter().map(|r| r.iter().map(|&x| Int::from(x)).collect()).collect())
    }

    /// Accepts a rational Gram matrix, rejecting non-integral entries.
    pub fn from_rational(gram: &[Vec<Rat>]) -> Result<Self> {
        let n = gram.len();
        if gram.iter().any(|r| r.len() != n) {
            return Err(Error::NotSquare);
        }
        let mut out = Vec::with_capacity(n);
        for row in gram {
            let mut r = Vec::with_capacity(n);
            for x in row {
                if !x.is_integer() {
                    return Err(Error::NotIntegral);
                }
                r.push(x.to_integer());
            }
            out.push(r);
        }
        Lattice::new(out)
    }

    pub fn zero() -> Self {
        Lattice { gram: Vec::new() }
    }

    pub fn gram(&self) -> &IntMatrix {
        &self.gram
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    pub fn determinant(&self) -> Int {
        matrix::determinant(&self.gram)
    }

    pub fn is_nondegenerate(&self) -> bool {
        !self.determinant().is_zero()
    }

    pub fn is_even(&self) -> bool {
        self.gram.iter().enumerate().all(|(i, r)| (&r[i] % 2u8).is_zero())
    }

    pub fn pair(&self, x: &[Int], y: &[Int]) -> Int {
        matrix::pair(&self.gram, x, y)
    }

    pub fn norm(&self, x: &[Int]) -> Int {
        self.pair(x, x)
    }

    /// Exact signature by symmetric Gaussian reduction over ℚ.
    pub fn signature(&self) -> Result<Signature> {
        let n = self.rank();
        let mut a = matrix::to_rat(&self.gram);
        let mut sig = Signature { positives: 0, negatives: 0 };
        for k in 0..n {
            if let Some(i) = (k..n).find(|&i| !a[i][i].is_zero()) {
                sym_swap(&mut a, k, i);
            } else {
                let off = (k..n).flat_map(|i| (k..n).map(move |j| (i, j))).find(|&(i, j)| !a[i][j].is_zero());
                let Some((i, j)) = off else {
                    return Err(Error::Degenerate);
                };
                // e_i <- e_i + e_j makes the diagonal entry 2·a_ij
                for c in 0..n {
                    let t = a[j][c].clone();
                    a[i][c] += t;
                }
                for r in 0..n {
                    let t = a[r][j].clone();
                    a[r][i] += t;
                }
                sym_swap(&mut a, k, i);
            }
            let p = a[k][k].clone();
            if p.is_positive() {
                sig.positives += 1;
            } else {
                sig.negatives += 1;
            }
            for r in k + 1..n {
                if a[r][k].is_zero() {
                    continue;
                }
                let f = &a[r][k] / &p;
                for c in k..n {
                    let t = &f * &a[k][c];
                    a[r][c] -= t;
                }
                for rr in k..n {
                    let t = &f * &a[rr][k];
                    a[rr][r] -= t;
                }
            }
        }
        Ok(sig)
    }

    pub fn is_hyperbolic(&self) -> bool {
        matches!(self.signature(), Ok(s) if s.positives == 1)
    }

    pub fn is_positive_definite(&self) -> bool {
        matches!(self.signature(), Ok(s) if s.negatives == 0)
    }

    pub fn is_negative_definite(&self) -> bool {
        matches!(self.signature(), Ok(s) if s.positives == 0)
    }

    pub fn direct_sum(&self, other: &Lattice) -> Lattice {
        let n = self.rank();
        let m = other.rank();
        let mut gram = vec![vec![Int::zero(); n + m]; n + m];
        for i in 0..n {
            gram[i][..n].clone_from_slice(&self.gram[i]);
        }
        for i in 0..m {
            gram[n + i][n..].clone_from_slice(&other.gram[i]);
        }
        Lattice { gram }
    }

    /// `L(a)`: the same module with the form scaled by `a`.
    pub fn twist(&self, a: &Int) -> Result<Lattice> {
        if a.is_zero() {
            return Err(Error::ZeroScale);
        }
        Ok(Lattice { gram: self.gram.iter().map(|r| r.iter().map(|x| x * a).collect()).collect() })
    }

    pub fn negate(&self) -> Lattice {
        Lattice { gram: self.gram.iter().map(|r| r.iter().map(|x| -x).collect()).collect() }
    }

    /// Gram matrix of the lattice spanned by the rows of `basis`.
    pub fn restrict(&self, basis: &[Vec<Int>]) -> Lattice {
        Lattice { gram: matrix::congruence(&self.gram, basis) }
    }

    /// Gram entries as machine words, for enumeration fast paths.
    pub fn gram_i64(&self) -> Result<Vec<Vec<i64>>> {
        self.gram
            .iter()
            .map(|r| r.iter().map(|x| x.to_i64().ok_or(Error::Overflow)).collect())
            .collect()
    }

    /// Greatest common divisor of all Gram entries.
    pub fn scale(&self) -> Int {
        self.gram.iter().flatten().fold(Int::zero(), |acc, x| num_integer::Integer::gcd(&acc, x))
    }
}

fn sym_swap(a: &mut [Vec<Rat>], i: usize, j: usize) {
    if i == j {
        return;
    }
    a.swap(i, j);
    for row in a.iter_mut() {
        row.swap(i, j);
    }
}

impl fmt::Display for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .gram
            .iter()
            .map(|r| format!("[{}]", r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")))
            .collect();
        write!(f, "[{}]", rows.join(","))
    }
}

/// Integer coordinate vectors (rows) spanning a sublattice of an ambient lattice.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SublatticeBasis {
    pub vectors: IntMatrix,
}

impl SublatticeBasis {
    pub fn new(vectors: IntMatrix) -> Result<Self> {
        if matrix::rank(&vectors) != vectors.len() {
            return Err(Error::DegenerateSubspace);
        }
        Ok(SublatticeBasis { vectors })
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> Result<Self> {
        SublatticeBasis::new(matrix::from_i64(rows))
    }

    pub fn rank(&self) -> usize {
        self.vectors.len()
    }

    pub fn gram_in(&self, ambient: &Lattice) -> Lattice {
        ambient.restrict(&self.vectors)
    }

    /// Whether `v` lies in the sublattice.
    pub fn contains(&self, v: &[Int]) -> bool {
        matrix::solve_integer(&self.vectors, v).is_some()
    }

    /// Index in `other` when `self ⊆ other` have equal rank (via Euclidean
    /// covolumes, so it does not depend on the ambient form).
    pub fn index_in(&self, other: &SublatticeBasis) -> Int {
        let a = matrix::determinant(&matrix::mat_mul(&self.vectors, &matrix::transpose(&self.vectors)));
        let b = matrix::determinant(&matrix::mat_mul(&other.vectors, &matrix::transpose(&other.vectors)));
        (a / b).sqrt()
    }
}

/// `{x ∈ L : (x, s) = 0 for all s ∈ S}`; always primitive.
pub fn orthogonal_complement(l: &Lattice, s: &SublatticeBasis) -> Result<SublatticeBasis> {
    if matrix::rank(&s.vectors) != s.rank() {
        return Err(Error::DegenerateSubspace);
    }
    if s.rank() == 0 {
        return Ok(SublatticeBasis { vectors: matrix::identity(l.rank()) });
    }
    let a = matrix::mat_mul(l.gram(), &matrix::transpose(&s.vectors));
    Ok(SublatticeBasis { vectors: matrix::left_kernel(&a) })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Saturation {
    pub basis: SublatticeBasis,
    pub index: Int,
}

/// Primitive closure `L ∩ (S ⊗ ℚ)` with the index `[sat(S) : S]`.
pub fn saturate(l: &Lattice, s: &SublatticeBasis) -> Saturation {
    let n = l.rank();
    let k = s.rank();
    if k == 0 {
        return Saturation { basis: s.clone(), index: Int::one() };
    }
    if k == n {
        return Saturation {
            basis: SublatticeBasis { vectors: matrix::identity(n) },
            index: matrix::determinant(&s.vectors).abs(),
        };
    }
    let perp = matrix::right_kernel(&s.vectors);
    let sat = matrix::left_kernel(&matrix::transpose(&perp));
    let basis = SublatticeBasis { vectors: sat };
    let index = s.index_in(&basis);
    Saturation { basis, index }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::int;

    fn u() -> Lattice {
        Lattice::from_rows(&[&[0, 1], &[1, 0]]).unwrap()
    }

    #[test]
    fn make_lattice_examples() {
        let a2 = Lattice::from_rows(&[&[-2, 1], &[1, -2]]).unwrap();
        assert_eq!(u().determinant(), int(-1));
        assert!(u().is_even());
        assert_eq!(a2.determinant(), int(3));
        assert!(a2.is_even());
        assert_eq!(Lattice::from_rows(&[&[0, 1], &[2, 0]]), Err(Error::NotSymmetric));
        let half = Rat::new(int(1), int(2));
        assert_eq!(
            Lattice::from_rational(&[vec![half.clone()]]),
            Err(Error::NotIntegral)
        );
    }

    #[test]
    fn sums_and_twists() {
        let a1 = Lattice::from_rows(&[&[-2]]).unwrap();
        let s = u().direct_sum(&a1);
        assert_eq!(s.rank(), 3);
        assert_eq!(s.determinant(), int(2));
        assert_eq!(u().direct_sum(&Lattice::zero()), u());
        assert_eq!(a1.twist(&int(2)).unwrap().gram(), &vec![vec![int(-4)]]);
        assert_eq!(u().twist(&int(0)), Err(Error::ZeroScale));
    }

    #[test]
    fn signature_with_zero_diagonal() {
        assert_eq!(u().signature().unwrap(), Signature { positives: 1, negatives: 1 });
        let l = u().direct_sum(&Lattice::from_rows(&[&[-10]]).unwrap());
        assert_eq!(l.signature().unwrap(), Signature { positives: 1, negatives: 2 });
        let deg = Lattice::from_rows(&[&[0, 0], &[0, 0]]).unwrap();
        assert_eq!(deg.signature(), Err(Error::Degenerate));
    }

    #[test]
    fn complement_in_u_plus_a2() {
        let a2 = Lattice::from_rows(&[&[-2, 1], &[1, -2]]).unwrap();
        let l = u().direct_sum(&a2);
        let s = SublatticeBasis::from_i64(&[vec![1, 0, 0, 0], vec![0, 1, 0, 0]]).unwrap();
        let c = orthogonal_complement(&l, &s).unwrap();
        assert_eq!(c.gram_in(&l).determinant(), int(3));
        assert_eq!(c.rank(), 2);
    }

    #[test]
    fn complement_of_isotropic_line() {
        let s = SublatticeBasis::from_i64(&[vec![1, 0]]).unwrap();
        let c = orthogonal_complement(&u(), &s).unwrap();
        assert_eq!(c.rank(), 1);
        assert!(c.contains(&[int(1), int(0)]));
    }

    #[test]
    fn saturation_examples() {
        let s = SublatticeBasis::from_i64(&[vec![2, 0]]).unwrap();
        let sat = saturate(&u(), &s);
        assert_eq!(sat.index, int(2));
        assert!(sat.basis.contains(&[int(1), int(0)]));

        let l = u().direct_sum(&Lattice::from_rows(&[&[-4]]).unwrap());
        let roots = SublatticeBasis::from_i64(&[vec![1, -1, 0], vec![1, 1, 1], vec![1, 1, -1]]).unwrap();
        let sat = saturate(&l, &roots);
        assert_eq!(sat.index, int(4));

        let prim = SublatticeBasis::from_i64(&[vec![1, 0, 0], vec![0, 0, 1]]).unwrap();
        let sat = saturate(&l, &prim);
        assert_eq!(sat.index, int(1));
        assert_eq!(saturate(&l, &sat.basis).index, int(1));
    }
}
