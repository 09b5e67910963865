//! Isometries of definite lattices (backtracking on short-vector
//! fingerprints), automorphism group orders by a stabilizer chain, and
//! isomorphism of finite quadratic modules.

use std::collections::{HashMap, HashSet};

use num_traits::{One, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::discriminant::{glue_group, Elem, FiniteQuadraticModule, DEFAULT_GROUP_CAP};
use crate::enumerate;
use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::matrix::{self, Int, IntMatrix, Rat};
use crate::roots;

/// Vectors kept for the search; beyond this the search reports `TooLarge`.
pub const VECTOR_CAP: usize = 200_000;
/// Backtracking nodes per search.
pub const NODE_BUDGET: u64 = 20_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsometryWitness {
    /// `matrix · gram(source) · matrixᵀ = gram(target)`.
    pub matrix: IntMatrix,
    pub source: Lattice,
    pub target: Lattice,
}

impl IsometryWitness {
    pub fn verify(&self) -> bool {
        matrix::congruence(self.source.gram(), &self.matrix) == *self.target.gram()
            && matrix::determinant(&self.matrix).abs().is_one()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrthogonalGroupDescription {
    pub generators: Vec<IsometryWitness>,
    pub order: Int,
}

fn to_i64(m: &[Vec<Int>]) -> Result<Vec<Vec<i64>>> {
    m.iter().map(|r| r.iter().map(|x| x.to_i64().ok_or(Error::Overflow)).collect()).collect()
}

fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn vec_mat(v: &[i64], m: &[Vec<i64>]) -> Vec<i64> {
    let mut out = vec![0i64; m.first().map_or(0, |r| r.len())];
    for (x, row) in v.iter().zip(m) {
        if *x != 0 {
            for (o, y) in out.iter_mut().zip(row) {
                *o += x * y;
            }
        }
    }
    out
}

type Fingerprint = Vec<(i64, u32)>;

/// A positive definite lattice with its short vectors up to a bound.
struct Prepared {
    /// LLL transform: rows are the reduced basis in original coordinates.
    t: IntMatrix,
    red: Vec<Vec<i64>>,
    vecs: Vec<Vec<i64>>,
    images: Vec<Vec<i64>>,
    norms: Vec<i64>,
    index: HashMap<Vec<i64>, usize>,
    fps: Vec<Fingerprint>,
}

impl Prepared {
    fn new(l: &Lattice, bound: Option<i64>) -> Result<Self> {
        let (red_l, t) = enumerate::lll_reduce(l)?;
        let red = to_i64(red_l.gram())?;
        let bound = bound.unwrap_or_else(|| (0..red.len()).map(|i| red[i][i]).max().unwrap_or(0));
        let sv = enumerate::short_vectors_with_norms(l, &Rat::from(Int::from(bound)), false, Some(VECTOR_CAP))?;
        let gram = to_i64(l.gram())?;
        let mut vecs = Vec::with_capacity(sv.len());
        let mut norms = Vec::with_capacity(sv.len());
        for (v, m) in sv {
            vecs.push(v.iter().map(|x| x.to_i64().ok_or(Error::Overflow)).collect::<Result<Vec<_>>>()?);
            norms.push(m.to_i64().ok_or(Error::Overflow)?);
        }
        let images: Vec<Vec<i64>> = vecs.iter().map(|v| vec_mat(v, &gram)).collect();
        let index = vecs.iter().enumerate().map(|(i, v)| (v.clone(), i)).collect();
        let min = norms.iter().copied().min().unwrap_or(0);
        let minimal: Vec<usize> = (0..vecs.len()).filter(|&i| norms[i] == min).collect();
        let fps = images
            .iter()
            .map(|img| {
                let mut counts: HashMap<i64, u32> = HashMap::new();
                for &w in &minimal {
                    *counts.entry(dot(img, &vecs[w]).abs()).or_default() += 1;
                }
                let mut fp: Fingerprint = counts.into_iter().collect();
                fp.sort_unstable();
                fp
            })
            .collect();
        Ok(Prepared { t, red, vecs, images, norms, index, fps })
    }

    fn histogram(&self) -> Vec<(i64, usize)> {
        let mut h: HashMap<i64, usize> = HashMap::new();
        for &m in &self.norms {
            *h.entry(m).or_default() += 1;
        }
        let mut v: Vec<_> = h.into_iter().collect();
        v.sort_unstable();
        v
    }

    fn basis_index(&self, i: usize) -> Option<usize> {
        let v: Vec<i64> = self.t[i].iter().map(|x| x.to_i64().unwrap_or(i64::MAX)).collect();
        self.index.get(&v).copied()
    }

    fn pair(&self, a: usize, b: usize) -> i64 {
        dot(&self.images[a], &self.vecs[b])
    }
}

/// Backtracking search for `x_0..x_{n−1}` among `target`'s vectors with
/// `(x_i, x_j) = red[i][j]`.
struct Matcher<'a> {
    target: &'a Prepared,
    red: &'a [Vec<i64>],
    candidates: Vec<Vec<usize>>,
    nodes: u64,
}

impl<'a> Matcher<'a> {
    fn new(source: &'a Prepared, target: &'a Prepared) -> Self {
        let n = source.red.len();
        let src_fps: Vec<Fingerprint> = (0..n)
            .map(|i| source.basis_index(i).map(|k| source.fps[k].clone()).unwrap_or_default())
            .collect();
        let candidates = (0..n)
            .map(|i| {
                (0..target.vecs.len())
                    .filter(|&c| target.norms[c] == source.red[i][i] && target.fps[c] == src_fps[i])
                    .collect()
            })
            .collect();
        Matcher { target, red: &source.red, candidates, nodes: 0 }
    }

    fn consistent(&self, chosen: &[usize], level: usize, c: usize) -> bool {
        chosen[..level].iter().enumerate().all(|(j, &x)| self.target.pair(c, x) == self.red[level][j])
    }

    fn complete(&mut self, chosen: &mut Vec<usize>, level: usize) -> Result<bool> {
        if level == self.red.len() {
            return Ok(true);
        }
        let cands = self.candidates[level].clone();
        for c in cands {
            self.nodes += 1;
            if self.nodes > NODE_BUDGET {
                return Err(Error::TooLarge("isometry search node budget".into()));
            }
            if !self.consistent(chosen, level, c) {
                continue;
            }
            chosen.truncate(level);
            chosen.push(c);
            if self.complete(chosen, level + 1)? {
                return Ok(true);
            }
        }
        chosen.truncate(level);
        Ok(false)
    }

    fn rows(&self, chosen: &[usize]) -> IntMatrix {
        chosen.iter().map(|&c| self.target.vecs[c].iter().map(|&x| Int::from(x)).collect()).collect()
    }
}

fn positive_form(l: &Lattice) -> Result<Lattice> {
    let s = l.signature()?;
    if s.negatives == 0 {
        Ok(l.clone())
    } else if s.positives == 0 {
        Ok(l.negate())
    } else {
        Err(Error::NotPositiveDefinite)
    }
}

fn root_label(pos: &Lattice) -> Result<Option<String>> {
    if !pos.is_even() {
        return Ok(None);
    }
    Ok(Some(roots::roots(&pos.negate())?.type_label()))
}

/// An isometry `a → b` of definite lattices, or `None` if they are not isometric.
pub fn is_isometric_definite(a: &Lattice, b: &Lattice) -> Result<Option<IsometryWitness>> {
    if a.rank() != b.rank() {
        return Err(Error::RankMismatch(a.rank(), b.rank()));
    }
    let sa = a.signature()?;
    let sb = b.signature()?;
    if (sa.positives != 0 && sa.negatives != 0) || (sb.positives != 0 && sb.negatives != 0) {
        return Err(Error::NotPositiveDefinite);
    }
    if sa != sb || a.determinant() != b.determinant() || a.is_even() != b.is_even() {
        return Ok(None);
    }
    let pa = positive_form(a)?;
    let pb = positive_form(b)?;
    if root_label(&pa)? != root_label(&pb)? {
        return Ok(None);
    }
    let src = Prepared::new(&pa, None)?;
    let bound = (0..src.red.len()).map(|i| src.red[i][i]).max().unwrap_or(0);
    let tgt = Prepared::new(&pb, Some(bound))?;
    if src.histogram() != tgt.histogram() {
        return Ok(None);
    }
    let mut m = Matcher::new(&src, &tgt);
    let mut chosen = Vec::new();
    if !m.complete(&mut chosen, 0)? {
        return Ok(None);
    }
    // rows X in b-coordinates satisfy X·G_b·Xᵀ = T_a·G_a·T_aᵀ
    let x = m.rows(&chosen);
    let tinv = matrix::inverse_unimodular(&src.t).expect("unimodular");
    let to_a = matrix::mat_mul(&tinv, &x); // to_a · G_b · to_aᵀ = G_a
    let w = matrix::inverse_unimodular(&to_a).expect("isometry is unimodular");
    let witness = IsometryWitness { matrix: w, source: a.clone(), target: b.clone() };
    debug_assert!(witness.verify());
    if !witness.verify() {
        return Err(Error::CertificationFailed("isometry witness failed verification".into()));
    }
    Ok(Some(witness))
}

/// Generators and exact order of `O(d)` for a definite lattice.
pub fn automorphism_group(d: &Lattice) -> Result<OrthogonalGroupDescription> {
    let pos = positive_form(d)?;
    let n = pos.rank();
    if n == 0 {
        return Ok(OrthogonalGroupDescription { generators: Vec::new(), order: Int::one() });
    }
    let p = Prepared::new(&pos, None)?;
    let tinv = matrix::inverse_unimodular(&p.t).expect("unimodular");
    let basis: Vec<usize> = (0..n).map(|i| p.basis_index(i).expect("reduced basis vectors are short")).collect();
    let mut matcher = Matcher::new(&p, &p);
    let mut gens: Vec<Vec<Vec<i64>>> = Vec::new();
    let mut witnesses = Vec::new();
    let mut order = Int::one();
    for k in (0..n).rev() {
        let prefix: Vec<usize> = basis[..k].to_vec();
        let cands: Vec<usize> = matcher.candidates[k]
            .iter()
            .copied()
            .filter(|&c| matcher.consistent(&prefix, k, c))
            .collect();
        let mut orbit = orbit_of(&p, basis[k], &gens);
        let mut dead: HashSet<usize> = HashSet::new();
        for c in cands {
            if orbit.contains(&c) || dead.contains(&c) {
                continue;
            }
            let mut chosen = prefix.clone();
            chosen.push(c);
            if matcher.complete(&mut chosen, k + 1)? {
                let x = matcher.rows(&chosen);
                let w = matrix::mat_mul(&tinv, &x);
                gens.push(to_i64(&w)?);
                witnesses.push(IsometryWitness { matrix: w, source: d.clone(), target: d.clone() });
                orbit = orbit_of(&p, basis[k], &gens);
            } else {
                dead.insert(c);
            }
        }
        order *= Int::from(orbit.len());
    }
    if witnesses.iter().any(|w| !w.verify()) {
        return Err(Error::CertificationFailed("automorphism failed verification".into()));
    }
    Ok(OrthogonalGroupDescription { generators: witnesses, order })
}

fn orbit_of(p: &Prepared, start: usize, gens: &[Vec<Vec<i64>>]) -> HashSet<usize> {
    let mut seen = HashSet::from([start]);
    let mut stack = vec![start];
    while let Some(i) = stack.pop() {
        for g in gens {
            let img = vec_mat(&p.vecs[i], g);
            if let Some(&j) = p.index.get(&img) {
                if seen.insert(j) {
                    stack.push(j);
                }
            }
        }
    }
    seen
}

/// Keeps one representative per isometry class. Pairs the search cannot
/// decide are both kept.
pub fn dedup_definite(lats: Vec<Lattice>) -> Vec<Lattice> {
    let mut kept: Vec<Lattice> = Vec::new();
    for l in lats {
        let dup = kept.iter().any(|k| matches!(is_isometric_definite(k, &l), Ok(Some(_))));
        if !dup {
            kept.push(l);
        }
    }
    kept
}

/// Automorphism of a glue group, given by the images of its generators.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FqmAutomorphism {
    pub images: Vec<Elem>,
}

impl FqmAutomorphism {
    pub fn apply(&self, fqm: &FiniteQuadraticModule, x: &Elem) -> Elem {
        let mut out = fqm.zero();
        for (a, img) in x.iter().zip(&self.images) {
            out = fqm.add(&out, &fqm.scale(*a, img));
        }
        out
    }

    pub fn compose(&self, fqm: &FiniteQuadraticModule, other: &FqmAutomorphism) -> FqmAutomorphism {
        FqmAutomorphism { images: other.images.iter().map(|y| self.apply(fqm, y)).collect() }
    }
}

/// Action of an isometry of `l` on `G(l)`.
pub fn induced_discriminant_action(l: &Lattice, w: &IsometryWitness) -> Result<FqmAutomorphism> {
    let fqm = glue_group(l)?;
    induced_action_on(&fqm, &w.matrix)
}

fn induced_action_on(fqm: &FiniteQuadraticModule, w: &[Vec<Int>]) -> Result<FqmAutomorphism> {
    let wr = matrix::to_rat(w);
    let mut images = Vec::with_capacity(fqm.rank());
    for i in 0..fqm.rank() {
        let c = fqm.lift(&fqm.generator(i));
        let n = c.len();
        let img: Vec<Rat> = (0..n).map(|j| (0..n).map(|k| &c[k] * &wr[k][j]).sum()).collect();
        images.push(fqm.class_of(&img).ok_or_else(|| Error::CertificationFailed("image not in dual".into()))?);
    }
    Ok(FqmAutomorphism { images })
}

fn q_profile(f: &FiniteQuadraticModule) -> Vec<(i64, i64, usize)> {
    let mut h: HashMap<(i64, i64), usize> = HashMap::new();
    for x in f.elements() {
        *h.entry((f.element_order(&x), f.q_scaled(&x))).or_default() += 1;
    }
    let mut v: Vec<_> = h.into_iter().map(|((a, b), c)| (a, b, c)).collect();
    v.sort_unstable();
    v
}

/// Search for generator images `g_i ↦ y_i` preserving orders, `q` and `b`.
struct FqmSearch<'a> {
    x: &'a FiniteQuadraticModule,
    y: &'a FiniteQuadraticModule,
    candidates: Vec<Vec<Elem>>,
}

impl<'a> FqmSearch<'a> {
    fn new(x: &'a FiniteQuadraticModule, y: &'a FiniteQuadraticModule) -> Self {
        let ys: Vec<Elem> = y.elements().collect();
        let candidates = (0..x.rank())
            .map(|i| {
                let g = x.generator(i);
                let (o, q) = (x.element_order(&g), x.q_scaled(&g));
                ys.iter().filter(|e| y.element_order(e) == o && y.q_scaled(e) == q).cloned().collect()
            })
            .collect();
        FqmSearch { x, y, candidates }
    }

    fn ok(&self, chosen: &[Elem], level: usize, c: &Elem) -> bool {
        let g = self.x.generator(level);
        chosen.iter().enumerate().all(|(j, yj)| self.y.b_scaled(yj, c) == self.x.b_scaled(&self.x.generator(j), &g))
    }

    fn exists(&self, chosen: &mut Vec<Elem>, level: usize, budget: &mut u64) -> Result<bool> {
        if level == self.x.rank() {
            return Ok(true);
        }
        for c in &self.candidates[level] {
            *budget += 1;
            if *budget > NODE_BUDGET {
                return Err(Error::TooLarge("quadratic module search budget".into()));
            }
            if !self.ok(chosen, level, c) {
                continue;
            }
            chosen.push(c.clone());
            if self.exists(chosen, level + 1, budget)? {
                return Ok(true);
            }
            chosen.pop();
        }
        Ok(false)
    }

    fn first(&self) -> Result<Option<FqmAutomorphism>> {
        let mut chosen = Vec::new();
        let mut budget = 0;
        Ok(self.exists(&mut chosen, 0, &mut budget)?.then_some(FqmAutomorphism { images: chosen }))
    }
}

fn check_cap(f: &FiniteQuadraticModule, cap: usize) -> Result<()> {
    for p in f.primes() {
        let part = f.sylow(p);
        if part.order() > cap as u128 {
            return Err(Error::GroupTooLarge { order: part.order().to_string(), cap });
        }
    }
    Ok(())
}

pub fn fqm_isomorphic(x: &FiniteQuadraticModule, y: &FiniteQuadraticModule) -> Result<bool> {
    fqm_isomorphic_capped(x, y, DEFAULT_GROUP_CAP)
}

pub fn fqm_isomorphic_capped(x: &FiniteQuadraticModule, y: &FiniteQuadraticModule, cap: usize) -> Result<bool> {
    if x.orders() != y.orders() {
        return Ok(false);
    }
    check_cap(x, cap)?;
    for p in x.primes() {
        let (xp, yp) = (x.sylow(p), y.sylow(p));
        if q_profile(&xp) != q_profile(&yp) {
            return Ok(false);
        }
        if FqmSearch::new(&xp, &yp).first()?.is_none() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Exact `|O(q)|` as the product over a stabilizer chain of extendable-image counts.
pub fn orthogonal_q_group_order(x: &FiniteQuadraticModule) -> Result<Int> {
    check_cap(x, DEFAULT_GROUP_CAP)?;
    let mut total = Int::one();
    for p in x.primes() {
        let part = x.sylow(p);
        let s = FqmSearch::new(&part, &part);
        let mut budget = 0u64;
        for level in 0..part.rank() {
            let prefix: Vec<Elem> = (0..level).map(|i| part.generator(i)).collect();
            let mut count = 0u64;
            for c in &s.candidates[level] {
                if !s.ok(&prefix, level, c) {
                    continue;
                }
                let mut chosen = prefix.clone();
                chosen.push(c.clone());
                if s.exists(&mut chosen, level + 1, &mut budget)? {
                    count += 1;
                }
            }
            total *= Int::from(count);
        }
    }
    Ok(total)
}

/// Order of the image of the given isometries in `O(q)`, by closure; `None` past `cap`.
pub fn image_order(fqm: &FiniteQuadraticModule, gens: &[FqmAutomorphism], cap: usize) -> Option<usize> {
    let id = FqmAutomorphism { images: (0..fqm.rank()).map(|i| fqm.generator(i)).collect() };
    let mut seen: HashSet<FqmAutomorphism> = HashSet::from([id.clone()]);
    let mut stack = vec![id];
    while let Some(a) = stack.pop() {
        for g in gens {
            let b = g.compose(fqm, &a);
            if seen.insert(b.clone()) {
                if seen.len() > cap {
                    return None;
                }
                stack.push(b);
            }
        }
    }
    Some(seen.len())
}

/// Induced actions of isometry matrices on `G(l)`.
pub fn induced_actions(l: &Lattice, mats: &[IntMatrix]) -> Result<(FiniteQuadraticModule, Vec<FqmAutomorphism>)> {
    let fqm = glue_group(l)?;
    let acts = mats.iter().map(|w| induced_action_on(&fqm, w)).collect::<Result<Vec<_>>>()?;
    Ok((fqm, acts))
}

/// Same signature and isomorphic discriminant forms.
pub fn same_genus(a: &Lattice, b: &Lattice) -> Result<bool> {
    if a.rank() != b.rank() || a.signature()? != b.signature()? || a.determinant() != b.determinant() {
        return Ok(false);
    }
    fqm_isomorphic(&glue_group(a)?, &glue_group(b)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discriminant::even_overlattices;
    use crate::dsl::parse_lattice;
    use crate::matrix::int;

    fn lat(s: &str) -> Lattice {
        parse_lattice(s).unwrap()
    }

    fn d16_plus() -> Lattice {
        let ov = even_overlattices(&lat("D16"), DEFAULT_GROUP_CAP).unwrap();
        ov.into_iter().find(|o| o.index == int(2)).unwrap().lattice
    }

    #[test]
    fn isometry_examples() {
        let w = is_isometric_definite(&lat("E8"), &lat("E8")).unwrap().unwrap();
        assert!(w.verify());
        assert!(is_isometric_definite(&lat("A3"), &lat("A1^3")).unwrap().is_none());
        assert!(is_isometric_definite(&lat("E8^2"), &d16_plus()).unwrap().is_none());
    }

    #[test]
    fn isometry_finds_basis_change() {
        let a = lat("[-2,1,-4]");
        let b = Lattice::from_rows(&[&[-2, -3], &[-3, -8]]).unwrap();
        let w = is_isometric_definite(&a, &b).unwrap().unwrap();
        assert!(w.verify());
        assert!(is_isometric_definite(&lat("[-2,1,-6]"), &lat("[-4,1,-4]")).unwrap().is_none());
    }

    #[test]
    fn automorphism_orders() {
        assert_eq!(automorphism_group(&lat("A1")).unwrap().order, int(2));
        assert_eq!(automorphism_group(&lat("A2")).unwrap().order, int(12));
        assert_eq!(automorphism_group(&lat("A1^2")).unwrap().order, int(8));
        assert_eq!(automorphism_group(&lat("D4")).unwrap().order, int(1152));
        assert_eq!(automorphism_group(&lat("E6")).unwrap().order, int(103680));
    }

    #[test]
    fn fqm_examples() {
        let g = |s: &str| glue_group(&lat(s)).unwrap();
        assert!(fqm_isomorphic(&g("A2"), &g("A2")).unwrap());
        assert!(!fqm_isomorphic(&g("A1(2)"), &g("A1(2)").negated()).unwrap());
        assert!(!fqm_isomorphic(&g("D8"), &g("A1^2")).unwrap());
        assert!(fqm_isomorphic(&g("A1(3) + A1"), &g("A1 + A1(3)")).unwrap());
    }

    #[test]
    fn genus_examples() {
        assert!(same_genus(&lat("U + A2"), &lat("U + A2")).unwrap());
        assert!(same_genus(&lat("E8^2"), &d16_plus()).unwrap());
        assert!(!same_genus(&lat("U + A1(2)"), &lat("U + A1 + A1")).unwrap());
        assert!(!same_genus(&lat("U + A2"), &lat("U + A1^2")).unwrap());
    }

    #[test]
    fn o_q_orders() {
        let g = |s: &str| glue_group(&lat(s)).unwrap();
        assert_eq!(orthogonal_q_group_order(&g("A2")).unwrap(), int(2));
        assert_eq!(orthogonal_q_group_order(&g("E8")).unwrap(), int(1));
        assert_eq!(orthogonal_q_group_order(&g("A1^2")).unwrap(), int(2));
    }

    #[test]
    fn induced_actions_preserve_q() {
        let l = lat("A2");
        let minus = IsometryWitness {
            matrix: vec![vec![int(-1), int(0)], vec![int(0), int(-1)]],
            source: l.clone(),
            target: l.clone(),
        };
        let act = induced_discriminant_action(&l, &minus).unwrap();
        let f = glue_group(&l).unwrap();
        assert_eq!(act.apply(&f, &f.generator(0)), f.neg(&f.generator(0)));

        let m = lat("D4 + A2");
        let group = automorphism_group(&m).unwrap();
        let (f, acts) = induced_actions(&m, &group.generators.iter().map(|g| g.matrix.clone()).collect::<Vec<_>>()).unwrap();
        for a in &acts {
            for x in f.elements() {
                assert_eq!(f.q_scaled(&a.apply(&f, &x)), f.q_scaled(&x));
            }
        }
        assert_eq!(image_order(&f, &acts, 1000), Some(orthogonal_q_group_order(&f).unwrap().to_usize().unwrap()));
    }
}
