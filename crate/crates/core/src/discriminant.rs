//! Glue groups `L*/L` with their discriminant forms, and even overlattices.
//!
//! Values are stored scaled by the exponent `E` of the group: `q` as an
//! integer mod `2E`, `b` as an integer mod `E`. Elements are coordinate
//! vectors with respect to the invariant-factor generators.

use std::collections::{HashMap, HashSet};
use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::matrix::{self, Int, Rat};

pub const DEFAULT_GROUP_CAP: usize = 10_000;

pub type Elem = Vec<i64>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteQuadraticModule {
    orders: Vec<i64>,
    exponent: i64,
    q: Vec<i64>,
    b: Vec<Vec<i64>>,
    lifts: Vec<Vec<Rat>>,
    /// Row `i` maps a dual vector to generator coefficient `i` (before reduction).
    to_group: Vec<Vec<Rat>>,
    gram: Vec<Vec<Int>>,
    even: bool,
}

fn small(x: &Int) -> Result<i64> {
    x.to_i64().filter(|v| v.unsigned_abs() < (1u64 << 31)).ok_or(Error::Overflow)
}

fn scaled(x: &Rat, e: i64, modulus: i64) -> Result<i64> {
    let v = x * Rat::from(Int::from(e));
    if !v.is_integer() {
        return Err(Error::NotIntegral);
    }
    Ok(small(&v.to_integer().mod_floor(&Int::from(modulus)))?)
}

/// The glue group of a nondegenerate lattice, computed from the Smith form of its Gram matrix.
pub fn glue_group(l: &Lattice) -> Result<FiniteQuadraticModule> {
    if !l.is_nondegenerate() {
        return Err(Error::Degenerate);
    }
    let g = l.gram();
    let s = matrix::smith(g);
    let vinv = matrix::inverse_unimodular(&s.right).expect("Smith transforms are unimodular");
    let n = l.rank();
    let mut lifts = Vec::new();
    let mut to_group = Vec::new();
    let mut orders = Vec::new();
    for i in 0..n {
        let d = s.diag[i].abs();
        if d.is_one() {
            continue;
        }
        orders.push(small(&d)?);
        lifts.push((0..n).map(|r| Rat::new(s.right[r][i].clone(), d.clone())).collect());
        to_group.push(vinv[i].iter().map(|x| Rat::from(x * &d)).collect());
    }
    FiniteQuadraticModule::from_lifts(g.clone(), orders, lifts, to_group, l.is_even())
}

pub fn l_invariant(l: &Lattice) -> Result<usize> {
    Ok(glue_group(l)?.orders.len())
}

impl FiniteQuadraticModule {
    fn from_lifts(
        gram: Vec<Vec<Int>>,
        orders: Vec<i64>,
        lifts: Vec<Vec<Rat>>,
        to_group: Vec<Vec<Rat>>,
        even: bool,
    ) -> Result<Self> {
        let exponent = orders.iter().fold(1i64, |a, &b| a.lcm(&b));
        let gr = matrix::to_rat(&gram);
        let k = lifts.len();
        let mut q = Vec::with_capacity(k);
        let mut b = vec![vec![0i64; k]; k];
        let pr = |x: &[Rat], y: &[Rat]| -> Rat {
            let mut s = Rat::zero();
            for (i, xi) in x.iter().enumerate() {
                if xi.is_zero() {
                    continue;
                }
                for (j, yj) in y.iter().enumerate() {
                    if !yj.is_zero() && !gr[i][j].is_zero() {
                        s += xi * &gr[i][j] * yj;
                    }
                }
            }
            s
        };
        for i in 0..k {
            q.push(scaled(&pr(&lifts[i], &lifts[i]), exponent, 2 * exponent)?);
            for j in 0..k {
                b[i][j] = scaled(&pr(&lifts[i], &lifts[j]), exponent, exponent)?;
            }
        }
        Ok(FiniteQuadraticModule { orders, exponent, q, b, lifts, to_group, gram, even })
    }

    pub fn orders(&self) -> &[i64] {
        &self.orders
    }

    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    pub fn is_even(&self) -> bool {
        self.even
    }

    pub fn order(&self) -> u128 {
        self.orders.iter().map(|&d| d as u128).product()
    }

    pub fn rank(&self) -> usize {
        self.orders.len()
    }

    pub fn zero(&self) -> Elem {
        vec![0; self.orders.len()]
    }

    pub fn generator(&self, i: usize) -> Elem {
        let mut e = self.zero();
        e[i] = 1;
        e
    }

    pub fn reduce(&self, x: &mut Elem) {
        for (a, d) in x.iter_mut().zip(&self.orders) {
            *a = a.rem_euclid(*d);
        }
    }

    pub fn add(&self, x: &Elem, y: &Elem) -> Elem {
        let mut z: Elem = x.iter().zip(y).map(|(a, b)| a + b).collect();
        self.reduce(&mut z);
        z
    }

    pub fn scale(&self, k: i64, x: &Elem) -> Elem {
        let mut z: Elem = x.iter().zip(&self.orders).map(|(a, &d)| ((*a as i128 * k as i128).rem_euclid(d as i128)) as i64).collect();
        self.reduce(&mut z);
        z
    }

    pub fn neg(&self, x: &Elem) -> Elem {
        self.scale(-1, x)
    }

    pub fn element_order(&self, x: &Elem) -> i64 {
        x.iter().zip(&self.orders).fold(1i64, |acc, (a, d)| acc.lcm(&(d / a.gcd(d))))
    }

    /// `q(x)·E mod 2E`.
    pub fn q_scaled(&self, x: &Elem) -> i64 {
        let m = 2 * self.exponent as i128;
        let mut s: i128 = 0;
        for i in 0..x.len() {
            if x[i] == 0 {
                continue;
            }
            s += (x[i] as i128 * x[i] as i128 % m) * self.q[i] as i128 % m;
            for j in i + 1..x.len() {
                if x[j] != 0 {
                    s += 2 * ((x[i] as i128 * x[j] as i128 % m) * self.b[i][j] as i128 % m);
                }
            }
            s %= m;
        }
        s.rem_euclid(m) as i64
    }

    /// `b(x, y)·E mod E`.
    pub fn b_scaled(&self, x: &Elem, y: &Elem) -> i64 {
        let m = self.exponent as i128;
        let mut s: i128 = 0;
        for i in 0..x.len() {
            if x[i] == 0 {
                continue;
            }
            for j in 0..y.len() {
                if y[j] != 0 {
                    s += (x[i] as i128 * y[j] as i128 % m) * self.b[i][j] as i128 % m;
                }
            }
            s %= m;
        }
        s.rem_euclid(m) as i64
    }

    /// `q(x)` as a rational in `[0, 2)`.
    pub fn q(&self, x: &Elem) -> Rat {
        Rat::new(Int::from(self.q_scaled(x)), Int::from(self.exponent))
    }

    /// `b(x, y)` as a rational in `[0, 1)`.
    pub fn b(&self, x: &Elem, y: &Elem) -> Rat {
        Rat::new(Int::from(self.b_scaled(x, y)), Int::from(self.exponent))
    }

    /// Rational coordinates (in the lattice basis) of a dual vector representing `x`.
    pub fn lift(&self, x: &Elem) -> Vec<Rat> {
        let n = self.gram.len();
        let mut v = vec![Rat::zero(); n];
        for (a, l) in x.iter().zip(&self.lifts) {
            if *a == 0 {
                continue;
            }
            let ar = Rat::from(Int::from(*a));
            for (vi, li) in v.iter_mut().zip(l) {
                *vi += &ar * li;
            }
        }
        v
    }

    /// Class of a dual vector, or `None` if `c ∉ L*` or outside this module.
    pub fn class_of(&self, c: &[Rat]) -> Option<Elem> {
        let gr = matrix::to_rat(&self.gram);
        for row in &gr {
            let s: Rat = row.iter().zip(c).map(|(a, b)| a * b).sum();
            if !s.is_integer() {
                return None;
            }
        }
        let mut out = Vec::with_capacity(self.orders.len());
        for (row, &d) in self.to_group.iter().zip(&self.orders) {
            let t: Rat = row.iter().zip(c).map(|(a, b)| a * b).sum();
            if !t.is_integer() {
                return None;
            }
            out.push(small(&t.to_integer().mod_floor(&Int::from(d))).ok()?);
        }
        Some(out)
    }

    pub fn class_of_int(&self, v: &[Int]) -> Option<Elem> {
        let c: Vec<Rat> = v.iter().map(|x| Rat::from(x.clone())).collect();
        self.class_of(&c)
    }

    /// Elements in mixed-radix order.
    pub fn elements(&self) -> impl Iterator<Item = Elem> + '_ {
        let total = self.order() as usize;
        (0..total).map(move |i| self.elem_at(i))
    }

    pub fn elem_at(&self, mut i: usize) -> Elem {
        let mut e = self.zero();
        for (a, &d) in e.iter_mut().zip(&self.orders) {
            *a = (i % d as usize) as i64;
            i /= d as usize;
        }
        e
    }

    pub fn index_of(&self, x: &Elem) -> usize {
        let mut i = 0usize;
        for (a, &d) in x.iter().zip(&self.orders).rev() {
            i = i * d as usize + *a as usize;
        }
        i
    }

    /// The same group with `q` and `b` negated (the glue group of `L(−1)`).
    pub fn negated(&self) -> Self {
        let e = self.exponent;
        let mut out = self.clone();
        out.q = self.q.iter().map(|x| (-x).rem_euclid(2 * e)).collect();
        out.b = self.b.iter().map(|r| r.iter().map(|x| (-x).rem_euclid(e)).collect()).collect();
        out.gram = self.gram.iter().map(|r| r.iter().map(|x| -x).collect()).collect();
        out
    }

    /// The `p`-primary part, on the generators `(d_i / p^{v_i})·g_i`.
    pub fn sylow(&self, p: i64) -> Self {
        let mut orders = Vec::new();
        let mut lifts = Vec::new();
        let mut to_group = Vec::new();
        for (i, &d) in self.orders.iter().enumerate() {
            let mut pk = 1;
            while d % (pk * p) == 0 {
                pk *= p;
            }
            if pk == 1 {
                continue;
            }
            let m = d / pk;
            let mr = Rat::from(Int::from(m));
            orders.push(pk);
            lifts.push(self.lifts[i].iter().map(|x| x * &mr).collect());
            to_group.push(self.to_group[i].iter().map(|x| x / &mr).collect());
        }
        FiniteQuadraticModule::from_lifts(self.gram.clone(), orders, lifts, to_group, self.even)
            .expect("sub-module of a valid module")
    }

    /// Primes dividing the group order.
    pub fn primes(&self) -> Vec<i64> {
        let mut ps = Vec::new();
        let mut e = self.exponent;
        let mut p = 2;
        while p * p <= e {
            if e % p == 0 {
                ps.push(p);
                while e % p == 0 {
                    e /= p;
                }
            }
            p += 1;
        }
        if e > 1 {
            ps.push(e);
        }
        ps
    }

    /// Elements `x` with `p·x = 0`.
    pub fn p_torsion(&self, p: i64) -> Vec<Elem> {
        let steps: Vec<(i64, i64)> = self
            .orders
            .iter()
            .map(|&d| if d % p == 0 { (d / p, p) } else { (d, 1) })
            .collect();
        let mut out = vec![self.zero()];
        for (i, &(step, count)) in steps.iter().enumerate() {
            let mut next = Vec::with_capacity(out.len() * count as usize);
            for e in &out {
                for k in 0..count {
                    let mut f = e.clone();
                    f[i] = (k * step) % self.orders[i];
                    next.push(f);
                }
            }
            out = next;
        }
        out
    }
}

impl fmt::Display for FiniteQuadraticModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.orders.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .orders
            .iter()
            .enumerate()
            .map(|(i, d)| format!("Z/{d} [q={}]", self.q(&self.generator(i))))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// A subgroup of a glue group on which `q` vanishes identically.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsotropicSubgroup {
    pub generators: Vec<Elem>,
    pub order: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Overlattice {
    pub lattice: Lattice,
    pub index: Int,
    /// Basis of the overlattice in rational coordinates of the original basis.
    pub basis: Vec<Vec<Rat>>,
    pub glue: IsotropicSubgroup,
}

fn span(fqm: &FiniteQuadraticModule, gens: &[Elem]) -> Vec<usize> {
    let mut seen: HashSet<usize> = HashSet::new();
    let zero = fqm.zero();
    seen.insert(fqm.index_of(&zero));
    let mut frontier = vec![zero];
    while let Some(x) = frontier.pop() {
        for g in gens {
            let y = fqm.add(&x, g);
            if seen.insert(fqm.index_of(&y)) {
                frontier.push(y);
            }
        }
    }
    let mut v: Vec<usize> = seen.into_iter().collect();
    v.sort_unstable();
    v
}

/// All `q`-null subgroups of `fqm` (assumed a `p`-group or small), with generators.
fn q_null_subgroups(fqm: &FiniteQuadraticModule) -> Vec<IsotropicSubgroup> {
    let candidates: Vec<Elem> = fqm.elements().filter(|x| fqm.q_scaled(x) == 0).collect();
    let mut seen: HashMap<Vec<usize>, IsotropicSubgroup> = HashMap::new();
    let trivial = IsotropicSubgroup { generators: Vec::new(), order: 1 };
    seen.insert(vec![fqm.index_of(&fqm.zero())], trivial.clone());
    let mut queue = vec![(vec![fqm.index_of(&fqm.zero())], trivial)];
    while let Some((members, h)) = queue.pop() {
        let member_set: HashSet<usize> = members.iter().copied().collect();
        let elems: Vec<Elem> = members.iter().map(|&i| fqm.elem_at(i)).collect();
        for x in &candidates {
            if member_set.contains(&fqm.index_of(x)) {
                continue;
            }
            if elems.iter().any(|h| fqm.b_scaled(h, x) != 0) {
                continue;
            }
            let mut gens = h.generators.clone();
            gens.push(x.clone());
            let key = span(fqm, &gens);
            if seen.contains_key(&key) {
                continue;
            }
            let sub = IsotropicSubgroup { generators: gens, order: key.len() };
            seen.insert(key.clone(), sub.clone());
            queue.push((key, sub));
        }
    }
    let mut out: Vec<IsotropicSubgroup> = seen.into_values().collect();
    out.sort_by(|a, b| (a.order, &a.generators).cmp(&(b.order, &b.generators)));
    out
}

/// Overlattice obtained by adjoining lifts of the given glue elements.
pub fn overlattice_from_glue(l: &Lattice, fqm: &FiniteQuadraticModule, glue: &IsotropicSubgroup) -> Result<Overlattice> {
    let n = l.rank();
    let mut rows: Vec<Vec<Rat>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }).collect())
        .collect();
    rows.extend(glue.generators.iter().map(|g| fqm.lift(g)));
    let den = rows.iter().fold(Int::one(), |acc, r| acc.lcm(&matrix::common_denominator(r)));
    let dr = Rat::from(den.clone());
    let int_rows: Vec<Vec<Int>> = rows.iter().map(|r| r.iter().map(|x| (x * &dr).to_integer()).collect()).collect();
    let basis_int = matrix::row_basis(&int_rows);
    let basis: Vec<Vec<Rat>> = basis_int.iter().map(|r| r.iter().map(|x| Rat::new(x.clone(), den.clone())).collect()).collect();
    let den2 = &den * &den;
    let gram: Vec<Vec<Rat>> = matrix::congruence(l.gram(), &basis_int)
        .into_iter()
        .map(|r| r.into_iter().map(|x| Rat::new(x, den2.clone())).collect())
        .collect();
    let lattice = Lattice::from_rational(&gram)?;
    Ok(Overlattice { lattice, index: Int::from(glue.order), basis, glue: glue.clone() })
}

/// Every even overlattice (including `l` itself), one per `q`-null subgroup.
pub fn even_overlattices(l: &Lattice, cap: usize) -> Result<Vec<Overlattice>> {
    let fqm = glue_group(l)?;
    if fqm.order() > cap as u128 {
        return Err(Error::GroupTooLarge { order: fqm.order().to_string(), cap });
    }
    let mut combos: Vec<IsotropicSubgroup> = vec![IsotropicSubgroup { generators: Vec::new(), order: 1 }];
    for p in fqm.primes() {
        let part = fqm.sylow(p);
        let local = q_null_subgroups(&part);
        // embed local generators into the full module via the lift
        let embedded: Vec<Vec<Elem>> = local
            .iter()
            .map(|h| h.generators.iter().map(|g| fqm.class_of(&part.lift(g)).expect("sub-module element")).collect())
            .collect();
        let mut next = Vec::with_capacity(combos.len() * local.len());
        for c in &combos {
            for (h, gens) in local.iter().zip(&embedded) {
                let mut g = c.generators.clone();
                g.extend(gens.iter().cloned());
                next.push(IsotropicSubgroup { generators: g, order: c.order * h.order });
            }
        }
        combos = next;
    }
    combos.iter().map(|h| overlattice_from_glue(l, &fqm, h)).collect()
}

/// Order-`p` subgroups of `G(l)` on which `q` vanishes, one generator each.
///
/// The cap bounds the number of order-`p` subgroups scanned, `(p^k − 1)/(p − 1)`
/// with `k` the `p`-rank.
pub fn prime_index_glue(l: &Lattice, p: i64, cap: usize) -> Result<(FiniteQuadraticModule, Vec<IsotropicSubgroup>)> {
    let fqm = glue_group(l)?;
    let k = fqm.orders.iter().filter(|&&d| d % p == 0).count() as u32;
    let lines = ((p as u128).pow(k) - 1) / (p as u128 - 1);
    if lines > cap as u128 {
        return Err(Error::GroupTooLarge { order: lines.to_string(), cap });
    }
    let mut out = Vec::new();
    for x in fqm.p_torsion(p) {
        // normalise each line by its first nonzero coordinate
        let Some(lead) = x.iter().zip(&fqm.orders).find(|(a, _)| **a != 0) else { continue };
        if *lead.0 != lead.1 / p || fqm.q_scaled(&x) != 0 {
            continue;
        }
        out.push(IsotropicSubgroup { generators: vec![x], order: p as usize });
    }
    Ok((fqm, out))
}

/// Even overlattices of prime index `p`, without deduplication.
pub fn prime_index_overlattices_raw(l: &Lattice, p: i64, cap: usize) -> Result<Vec<Overlattice>> {
    let (fqm, glue) = prime_index_glue(l, p, cap)?;
    glue.iter().map(|h| overlattice_from_glue(l, &fqm, h)).collect()
}

/// Even overlattices of prime index `p`; definite ones are deduplicated up to isometry.
pub fn prime_index_overlattices(l: &Lattice, p: i64) -> Result<Vec<Lattice>> {
    prime_index_overlattices_capped(l, p, DEFAULT_GROUP_CAP)
}

pub fn prime_index_overlattices_capped(l: &Lattice, p: i64, cap: usize) -> Result<Vec<Lattice>> {
    let all: Vec<Lattice> = prime_index_overlattices_raw(l, p, cap)?.into_iter().map(|o| o.lattice).collect();
    if l.is_positive_definite() || l.is_negative_definite() {
        Ok(crate::isometry::dedup_definite(all))
    } else {
        Ok(all)
    }
}

/// The divisibility criterion guaranteeing an even overlattice of index `p`
/// on an even hyperbolic lattice.
pub fn exists_prime_overlattice_shortcut(l: &Lattice, p: i64) -> bool {
    let det = l.determinant().abs();
    let m = if p == 2 { Int::from(16) } else { Int::from(p).pow(3) };
    (det % m).is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_lattice;
    use crate::matrix::int;

    fn lat(s: &str) -> Lattice {
        parse_lattice(s).unwrap()
    }

    fn r(p: i64, q: i64) -> Rat {
        Rat::new(int(p), int(q))
    }

    #[test]
    fn glue_examples() {
        let a2 = glue_group(&lat("A2")).unwrap();
        assert_eq!(a2.orders(), &[3]);
        assert_eq!(a2.q(&a2.generator(0)), r(4, 3));
        let a1_2 = glue_group(&lat("A1(2)")).unwrap();
        assert_eq!(a1_2.orders(), &[4]);
        assert_eq!(a1_2.q(&a1_2.generator(0)), r(7, 4));
        assert_eq!(glue_group(&lat("U")).unwrap().order(), 1);
    }

    #[test]
    fn l_invariant_examples() {
        assert_eq!(l_invariant(&lat("U + A1^6 + D4")).unwrap(), 8);
        assert_eq!(l_invariant(&lat("E8")).unwrap(), 0);
        assert_eq!(l_invariant(&lat("U + A1(25)")).unwrap(), 1);
        assert_eq!(glue_group(&lat("U + A1(25)")).unwrap().orders(), &[50]);
    }

    #[test]
    fn polarization_and_homogeneity() {
        let f = glue_group(&lat("[2,1,-4] + A3 + A1(3)")).unwrap();
        let e = f.exponent();
        for x in f.elements() {
            for y in f.elements() {
                let lhs = (f.q_scaled(&f.add(&x, &y)) - f.q_scaled(&x) - f.q_scaled(&y)).rem_euclid(2 * e);
                assert_eq!(lhs, (2 * f.b_scaled(&x, &y)).rem_euclid(2 * e));
            }
            for k in 0..5 {
                assert_eq!(f.q_scaled(&f.scale(k, &x)), (k * k * f.q_scaled(&x)).rem_euclid(2 * e));
            }
        }
    }

    #[test]
    fn lifts_round_trip() {
        let f = glue_group(&lat("D4 + A2(2)")).unwrap();
        for x in f.elements() {
            assert_eq!(f.class_of(&f.lift(&x)), Some(x));
        }
    }

    #[test]
    fn twist_by_minus_one_negates() {
        let l = lat("U + A1(3) + A2");
        let f = glue_group(&l).unwrap();
        let g = glue_group(&l.twist(&int(-1)).unwrap()).unwrap();
        for x in f.elements() {
            assert_eq!((f.q_scaled(&x) + g.q_scaled(&x)).rem_euclid(2 * f.exponent()), 0);
        }
    }

    #[test]
    fn overlattice_examples() {
        assert_eq!(even_overlattices(&lat("A2"), DEFAULT_GROUP_CAP).unwrap().len(), 1);
        let d8 = even_overlattices(&lat("D8"), DEFAULT_GROUP_CAP).unwrap();
        assert_eq!(d8.len(), 3);
        for o in d8.iter().filter(|o| o.index == int(2)) {
            assert_eq!(o.lattice.determinant(), int(1));
            assert!(o.lattice.is_even());
        }
        let a1_4 = even_overlattices(&lat("A1^4"), DEFAULT_GROUP_CAP).unwrap();
        let idx2: Vec<_> = a1_4.iter().filter(|o| o.index == int(2)).collect();
        assert_eq!(idx2.len(), 1);
        assert_eq!(idx2[0].lattice.determinant(), int(4));
    }

    #[test]
    fn prime_index_examples() {
        assert!(prime_index_overlattices_raw(&lat("A2"), 3, DEFAULT_GROUP_CAP).unwrap().is_empty());
        assert_eq!(prime_index_overlattices_raw(&lat("D8"), 2, DEFAULT_GROUP_CAP).unwrap().len(), 2);
        let (_, lines) = prime_index_glue(&lat("E8(3) + A2"), 3, DEFAULT_GROUP_CAP).unwrap();
        assert!(!lines.is_empty());
        // the two index-2 overlattices of D8 are swapped by an outer automorphism
        assert_eq!(prime_index_overlattices(&lat("D8"), 2).unwrap().len(), 1);
    }

    #[test]
    fn shortcut_examples() {
        assert!(exists_prime_overlattice_shortcut(&lat("U + E8(3) + A2"), 3));
        let det8 = lat("U + A1(4)");
        assert_eq!(det8.determinant().abs(), int(8));
        assert!(!exists_prime_overlattice_shortcut(&det8, 2));
    }

    #[test]
    fn cap_is_enforced() {
        assert!(matches!(
            even_overlattices(&lat("A1^8"), 100),
            Err(Error::GroupTooLarge { .. })
        ));
    }
}
