//! Critical sublattices of `L = U ⊕ M`.
//!
//! Lower bounds come from roots that provably lie in `L_cr` (sections of `e`,
//! or every root when `e` has no reducible fiber) closed under
//! `v ∈ L_cr, (v, r) = k ⇒ k·r ∈ L_cr`. Upper bounds come from finite coset
//! scans modulo `N·L` showing that no root escapes a candidate sublattice.

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::covering::{covering_radius_sq, CoveringTable};
use crate::enumerate;
use crate::error::{Error, Result};
use crate::lattice::{Lattice, SublatticeBasis};
use crate::matrix::{self, Int, IntMatrix, Rat};

use super::battery::genus_search;
use super::{reducible_fibers, split_form};

/// Largest number of cosets `L/N·L` a residue scan will visit.
pub const COSET_CAP: u64 = 1 << 22;

#[derive(Clone, Debug)]
pub struct CriticalOptions {
    /// Initial bound on `−v²` for the `M`-part of seed roots; 0 picks one from `M`.
    pub root_bound: i64,
    pub doublings: u32,
    /// Trials for the two-class genus search used as a last resort.
    pub genus_trials: usize,
    pub seed: u64,
}

impl Default for CriticalOptions {
    fn default() -> Self {
        CriticalOptions { root_bound: 0, doublings: 3, genus_trials: 50, seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CriticalCertificate {
    /// A fiber with at least three components forces `L_cr = L`.
    FiberWithThreeComponents { fiber: String },
    /// Two non-isometric lattices in the genus of `M` force `L_cr = L`.
    GenusTwoClasses { first: Lattice, second: Lattice },
    /// No reducible fiber: `L_cr` is spanned by all roots; the span of the seed
    /// roots is complete by a residue scan modulo `modulus`.
    RootSpan { modulus: i64 },
    /// Fibers with two components only: index at most two, the closure of the
    /// sections already equals `L`.
    SectionClosure,
    /// Index exactly two: the candidate is reflection-stable, contains the
    /// sections, and every wall root meeting `e` positively is a section
    /// because the covering radius of `M(−1)` is at most `√2`.
    IndexTwoSections { covering_sq: Rat },
    /// Index exactly two: no root lies outside the candidate.
    IndexTwoResidue { modulus: i64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CriticalSublatticeResult {
    Decided { basis: SublatticeBasis, index: Int, certificate: CriticalCertificate },
    Undecided { reason: String },
}

impl CriticalSublatticeResult {
    pub fn index(&self) -> Option<&Int> {
        match self {
            CriticalSublatticeResult::Decided { index, .. } => Some(index),
            CriticalSublatticeResult::Undecided { .. } => None,
        }
    }
}

pub fn critical_sublattice(l: &Lattice) -> Result<CriticalSublatticeResult> {
    critical_sublattice_with(l, &CriticalOptions::default())
}

fn whole(n: usize) -> SublatticeBasis {
    SublatticeBasis { vectors: matrix::identity(n) }
}

pub fn critical_sublattice_with(l: &Lattice, opts: &CriticalOptions) -> Result<CriticalSublatticeResult> {
    let m = split_form(l)?;
    let n = l.rank();
    let fibers = reducible_fibers(l)?;
    if let Some(f) = fibers.iter().find(|f| f.component_count >= 3) {
        return Ok(CriticalSublatticeResult::Decided {
            basis: whole(n),
            index: Int::one(),
            certificate: CriticalCertificate::FiberWithThreeComponents { fiber: f.affine_type() },
        });
    }
    let decided = if fibers.is_empty() { rootless_case(l, &m, opts)? } else { two_component_case(l, &m, opts)? };
    if let Some(d) = decided {
        return Ok(d);
    }
    if opts.genus_trials > 0 && m.rank() >= 2 {
        let found = genus_search(l, opts.genus_trials, opts.seed)?;
        if found.classes.len() >= 2 {
            return Ok(CriticalSublatticeResult::Decided {
                basis: whole(n),
                index: Int::one(),
                certificate: CriticalCertificate::GenusTwoClasses {
                    first: found.classes[0].clone(),
                    second: found.classes[1].clone(),
                },
            });
        }
    }
    Ok(CriticalSublatticeResult::Undecided { reason: "no certificate route applied".into() })
}

fn initial_bound(m: &Lattice, opts: &CriticalOptions) -> i64 {
    if opts.root_bound > 0 {
        return opts.root_bound;
    }
    let diag = m.gram().iter().enumerate().map(|(i, r)| r[i].abs().to_i64().unwrap_or(i64::MAX / 4)).max().unwrap_or(0);
    (2 * diag + 8).min(1 << 20)
}

/// Roots `a·e + b·f + v` of `U ⊕ M` with `−v² ≤ t` (and `|a|, |b| ≤ 2` when `ab = 0`).
pub(crate) fn seed_roots(m: &Lattice, t: i64) -> Result<Vec<Vec<Int>>> {
    let mut vs: Vec<(Vec<Int>, i64)> = vec![(vec![Int::zero(); m.rank()], 0)];
    if m.rank() > 0 {
        for (v, norm) in enumerate::short_vectors_with_norms(&m.negate(), &Rat::from(Int::from(t)), false, Some(100_000))? {
            vs.push((v, norm.to_i64().ok_or(Error::Overflow)?));
        }
    }
    let mut out = Vec::new();
    let mut push = |a: i64, b: i64, v: &[Int]| {
        let mut r = vec![Int::from(a), Int::from(b)];
        r.extend(v.iter().cloned());
        out.push(r);
    };
    for (v, mm) in &vs {
        // 2ab + v² = −2
        let ab = mm / 2 - 1;
        if ab == 0 {
            for k in -2..=2i64 {
                push(k, 0, v);
                if k != 0 {
                    push(0, k, v);
                }
            }
        } else {
            let k = ab.abs();
            for d in (1..=k).take_while(|d| d * d <= k) {
                if k % d != 0 {
                    continue;
                }
                for (x, y) in [(d, k / d), (k / d, d)] {
                    let s = ab.signum();
                    push(x, s * y, v);
                    push(-x, -s * y, v);
                }
            }
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// Closure of `rows` under `v ∈ S, root r ⇒ gcd_v (v, r) · r ∈ S`.
fn closure(l: &Lattice, rows: Vec<Vec<Int>>, roots: &[Vec<Int>]) -> IntMatrix {
    let mut basis = matrix::row_basis(&rows);
    loop {
        let mut grown = false;
        for r in roots {
            let img = matrix::vec_mat(r, l.gram());
            let g = basis.iter().fold(Int::zero(), |acc, b| acc.gcd(&matrix::dot(b, &img)));
            if g.is_zero() {
                continue;
            }
            let gr: Vec<Int> = r.iter().map(|x| x * &g).collect();
            if matrix::solve_integer(&basis, &gr).is_none() {
                basis.push(gr);
                basis = matrix::row_basis(&basis);
                grown = true;
            }
        }
        if !grown {
            return basis;
        }
    }
}

/// Order of `e` (first basis vector) modulo the full-rank sublattice `s`.
fn order_of_e(s: &[Vec<Int>]) -> Option<Int> {
    let n = s.len();
    let mut e = vec![Rat::zero(); n];
    e[0] = Rat::one();
    let c = matrix::solve_rational(s, &e)?;
    Some(c.iter().fold(Int::one(), |acc, x| acc.lcm(x.denom())))
}

fn rootless_case(l: &Lattice, m: &Lattice, opts: &CriticalOptions) -> Result<Option<CriticalSublatticeResult>> {
    let n = l.rank();
    let mut t = initial_bound(m, opts);
    for _ in 0..=opts.doublings {
        let seeds = seed_roots(m, t)?;
        t *= 2;
        let s = matrix::row_basis(&seeds);
        if s.len() < n {
            continue;
        }
        let index = matrix::determinant(&s).abs();
        if order_of_e(&s).as_ref() != Some(&index) {
            continue;
        }
        let basis = SublatticeBasis { vectors: s };
        let nn = index.to_i64().ok_or(Error::Overflow)?;
        for modulus in [nn, 2 * nn] {
            match root_residue_certificate(l, &basis, modulus) {
                Ok(true) => {
                    return Ok(Some(CriticalSublatticeResult::Decided {
                        basis,
                        index,
                        certificate: CriticalCertificate::RootSpan { modulus },
                    }))
                }
                Ok(false) => {}
                Err(Error::TooLarge(_)) => return Ok(None),
                Err(e) => return Err(e),
            }
        }
    }
    Ok(None)
}

fn two_component_case(l: &Lattice, m: &Lattice, opts: &CriticalOptions) -> Result<Option<CriticalSublatticeResult>> {
    let n = l.rank();
    let mut t = initial_bound(m, opts);
    for _ in 0..=opts.doublings {
        let seeds = seed_roots(m, t)?;
        t *= 2;
        // sections (b = 1) and 2e lie in L_cr since L/L_cr is cyclic of order ≤ 2 on e
        let mut rows: Vec<Vec<Int>> = seeds.iter().filter(|r| r[1].is_one()).cloned().collect();
        let mut two_e = vec![Int::zero(); n];
        two_e[0] = Int::from(2);
        rows.push(two_e);
        let s = closure(l, rows, &seeds);
        if s.len() < n {
            continue;
        }
        let index = matrix::determinant(&s).abs();
        let basis = SublatticeBasis { vectors: s };
        if index.is_one() {
            return Ok(Some(CriticalSublatticeResult::Decided {
                basis: whole(n),
                index,
                certificate: CriticalCertificate::SectionClosure,
            }));
        }
        if index != Int::from(2) {
            continue;
        }
        for modulus in [2, 4] {
            match root_residue_certificate(l, &basis, modulus) {
                Ok(true) => {
                    return Ok(Some(CriticalSublatticeResult::Decided {
                        basis,
                        index,
                        certificate: CriticalCertificate::IndexTwoResidue { modulus },
                    }))
                }
                Ok(false) => {}
                Err(Error::TooLarge(_)) => return Ok(None),
                Err(e) => return Err(e),
            }
        }
        let cov = covering_radius_sq(&m.negate(), &CoveringTable::builtin())?;
        if let Some(v) = cov.value() {
            if *v <= Rat::from(Int::from(2)) && reflection_stable(l, &basis)? {
                return Ok(Some(CriticalSublatticeResult::Decided {
                    basis,
                    index,
                    certificate: CriticalCertificate::IndexTwoSections { covering_sq: v.clone() },
                }));
            }
        }
        return Ok(None);
    }
    Ok(None)
}

struct CosetScan {
    n: usize,
    gram: Vec<Vec<i64>>,
    /// `x ∈ S` iff `x · adj ≡ 0 (mod det)`.
    adj: Vec<Vec<i64>>,
    det: i64,
    basis: Vec<Vec<i64>>,
}

impl CosetScan {
    fn new(l: &Lattice, s: &SublatticeBasis) -> Result<Self> {
        let n = l.rank();
        let det = matrix::determinant(&s.vectors).abs();
        let inv = matrix::inverse_rational(&s.vectors).ok_or(Error::DegenerateSubspace)?;
        let dr = Rat::from(det.clone());
        let to64 = |x: &Int| x.to_i64().ok_or(Error::Overflow);
        let adj = inv.iter().map(|r| r.iter().map(|x| to64(&(x * &dr).to_integer())).collect()).collect::<Result<_>>()?;
        let gram = l.gram().iter().map(|r| r.iter().map(to64).collect()).collect::<Result<_>>()?;
        let basis = s.vectors.iter().map(|r| r.iter().map(to64).collect()).collect::<Result<_>>()?;
        Ok(CosetScan { n, gram, adj, det: to64(&det)?, basis })
    }

    fn contains(&self, x: &[i64]) -> bool {
        (0..self.n).all(|j| {
            let s: i128 = (0..self.n).map(|i| x[i] as i128 * self.adj[i][j] as i128).sum();
            s.rem_euclid(self.det as i128) == 0
        })
    }

    fn image(&self, x: &[i64]) -> Vec<i128> {
        (0..self.n).map(|j| (0..self.n).map(|i| x[i] as i128 * self.gram[i][j] as i128).sum()).collect()
    }

    /// Whether some vector of the coset `x + N·L` could be a root.
    fn may_hold_root(&self, x: &[i64], modulus: i64) -> bool {
        let img = self.image(x);
        let norm: i128 = img.iter().zip(x).map(|(a, b)| a * *b as i128).sum();
        let div = img.iter().fold(0i128, |acc, v| acc.gcd(v)).gcd(&(modulus as i128));
        (norm + 2).rem_euclid(2 * modulus as i128 * div) == 0
    }

    /// True iff no coset accepted by `outside` may hold a root.
    fn scan(&self, modulus: i64, outside: impl Fn(&Self, &[i64]) -> bool) -> Result<bool> {
        let total = (modulus as u64).checked_pow(self.n as u32).filter(|&c| c <= COSET_CAP);
        if total.is_none() {
            return Err(Error::TooLarge(format!("{modulus}^{} cosets", self.n)));
        }
        let mut x = vec![0i64; self.n];
        loop {
            if outside(self, &x) && self.may_hold_root(&x, modulus) {
                return Ok(false);
            }
            let mut i = 0;
            loop {
                if i == self.n {
                    return Ok(true);
                }
                x[i] += 1;
                if x[i] < modulus {
                    break;
                }
                x[i] = 0;
                i += 1;
            }
        }
    }
}

/// Proves that every root of `l` lies in `s` by scanning `L/N·L`.
///
/// `true` is a proof; `false` only means some coset outside `s` passes the
/// necessary congruence `x² + 2N(x, w) ≡ −2 (mod 2N²)`.
pub fn root_residue_certificate(l: &Lattice, s: &SublatticeBasis, modulus: i64) -> Result<bool> {
    let n = l.rank();
    if s.rank() != n {
        return Err(Error::DegenerateSubspace);
    }
    if modulus < 1 {
        return Err(Error::ModulusTooSmall(modulus.to_string()));
    }
    let scan = CosetScan::new(l, s)?;
    for i in 0..n {
        let mut v = vec![0i64; n];
        v[i] = modulus;
        if !scan.contains(&v) {
            return Err(Error::ModulusTooSmall(format!("{modulus}·L is not contained in the sublattice")));
        }
    }
    scan.scan(modulus, |sc, x| !sc.contains(x))
}

/// An index-two sublattice is preserved by every reflection iff no root
/// outside it pairs oddly with it; checked modulo `2L`.
fn reflection_stable(l: &Lattice, s: &SublatticeBasis) -> Result<bool> {
    let scan = CosetScan::new(l, s)?;
    match scan.scan(2, |sc, x| {
        if sc.contains(x) {
            return false;
        }
        let img = sc.image(x);
        sc.basis.iter().any(|b| b.iter().zip(&img).map(|(p, q)| *p as i128 * q).sum::<i128>() % 2 != 0)
    }) {
        Err(Error::TooLarge(_)) => Ok(false),
        r => r,
    }
}

/// All sublattices between `L_cr` and `L`: one per divisor of the index.
pub fn zero_entropy_sublattices(l: &Lattice, cr: &CriticalSublatticeResult) -> Result<Vec<SublatticeBasis>> {
    let CriticalSublatticeResult::Decided { basis, index, .. } = cr else {
        return Err(Error::CertificationFailed("critical sublattice undecided".into()));
    };
    let n = l.rank();
    let m = index.to_u64().ok_or(Error::Overflow)?;
    let mut out = Vec::new();
    for d in (1..=m).filter(|d| m % d == 0) {
        // preimage of the subgroup of order d, generated by (m/d)·e
        let mut rows = basis.vectors.clone();
        let mut v = vec![Int::zero(); n];
        v[0] = Int::from(m / d);
        rows.push(v);
        out.push(SublatticeBasis { vectors: matrix::row_basis(&rows) });
    }
    Ok(out)
}

/// Whether every root in the seed set keeps `s` stable under reflection.
pub fn seed_reflection_closed(l: &Lattice, s: &SublatticeBasis, bound: i64) -> Result<bool> {
    let m = split_form(l)?;
    for r in seed_roots(&m, bound)? {
        let img = matrix::vec_mat(&r, l.gram());
        for v in &s.vectors {
            let k = matrix::dot(v, &img);
            let sv: Vec<Int> = v.iter().zip(&r).map(|(a, b)| a + &k * b).collect();
            if !s.contains(&sv) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_lattice;
    use crate::matrix::int;

    fn lat(s: &str) -> Lattice {
        parse_lattice(s).unwrap()
    }

    fn basis(rows: &[&[i64]]) -> SublatticeBasis {
        SublatticeBasis::from_i64(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn example_u_minus_four() {
        let l = lat("U + [-4]");
        let cr = critical_sublattice(&l).unwrap();
        let CriticalSublatticeResult::Decided { basis: b, index, .. } = &cr else { panic!("{cr:?}") };
        assert_eq!(index, &int(4));
        let expected = basis(&[&[1, -1, 0], &[1, 1, 1], &[1, 1, -1]]);
        assert_eq!(matrix::row_basis(&b.vectors), matrix::row_basis(&expected.vectors));
        assert_eq!(zero_entropy_sublattices(&l, &cr).unwrap().len(), 3);
        assert!(seed_reflection_closed(&l, b, 40).unwrap());
    }

    #[test]
    fn rank_three_indices() {
        let expected = [(2, 4), (3, 6), (4, 8), (5, 1), (7, 2), (9, 3), (13, 1), (25, 1)];
        for (k, idx) in expected {
            let l = lat(&format!("U + [{}]", -2 * k));
            let cr = critical_sublattice(&l).unwrap();
            assert_eq!(cr.index(), Some(&int(idx)), "k = {k}: {cr:?}");
        }
    }

    #[test]
    fn fiber_route() {
        let cr = critical_sublattice(&lat("U + A1 + D9")).unwrap();
        assert!(matches!(
            cr,
            CriticalSublatticeResult::Decided { certificate: CriticalCertificate::FiberWithThreeComponents { .. }, .. }
        ));
        assert_eq!(cr.index(), Some(&int(1)));
    }

    #[test]
    fn residue_examples() {
        let l = lat("U + [-4]");
        let s = basis(&[&[1, -1, 0], &[1, 1, 1], &[1, 1, -1]]);
        assert!(root_residue_certificate(&l, &s, 4).unwrap());
        assert!(root_residue_certificate(&l, &whole(3), 3).unwrap());
        // contains L_cr, so no root escapes it
        let half = basis(&[&[1, -1, 0], &[1, 1, 1], &[2, 0, 0]]);
        assert!(root_residue_certificate(&l, &half, 2).unwrap());
        let twice = basis(&[&[2, 0, 0], &[0, 2, 0], &[0, 0, 2]]);
        assert!(!root_residue_certificate(&l, &twice, 2).unwrap());
        assert!(matches!(root_residue_certificate(&l, &s, 2), Err(Error::ModulusTooSmall(_))));
    }

    #[test]
    fn sublattice_count_is_divisor_count() {
        let l = lat("U + [-8]");
        let cr = critical_sublattice(&l).unwrap();
        assert_eq!(cr.index(), Some(&int(8)));
        assert_eq!(zero_entropy_sublattices(&l, &cr).unwrap().len(), 4);
    }
}
