//! The positivity tests and the covering-radius zero-entropy test.

use std::collections::HashSet;

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::covering::{covering_radius_sq, CoveringRadiusResult, CoveringTable};
use crate::discriminant::{glue_group, overlattice_from_glue, prime_index_glue, DEFAULT_GROUP_CAP};
use crate::error::{Error, Result};
use crate::isometry;
use crate::lattice::{orthogonal_complement, Lattice, SublatticeBasis};
use crate::matrix::{self, Int, Rat};
use crate::reference::{Membership, ReferenceSet};
use crate::roots;

use super::{split_form, with_hyperbolic_plane, Certificate, Status, Verdict};

pub const DEFAULT_SUBLATTICE_TRIALS: usize = 500;
pub const DEFAULT_GENUS_TRIALS: usize = 200;
pub const DEFAULT_COORD_BOUND: i64 = 10;
/// Consecutive unproductive trials after which the coordinate bound doubles.
const EXHAUSTION: usize = 100;
const MAX_BOUND: i64 = 1 << 12;
/// Largest `|O(q)|` for which the image of `O(M)` is enumerated.
const OQ_CAP: usize = 100_000;

fn positive(test: &str, seed: Option<u64>, certificate: Certificate) -> Verdict {
    Verdict { status: Status::PositiveEntropy, test: test.into(), seed, certificate }
}

/// Sparse random coordinates: each is zero with probability ½, else uniform in `[−b, b]`.
fn sparse_vector(rng: &mut ChaCha8Rng, n: usize, b: i64) -> Vec<i64> {
    (0..n).map(|_| if rng.gen_bool(0.5) { 0 } else { rng.gen_range(-b..=b) }).collect()
}

fn ints(v: &[i64]) -> Vec<Int> {
    v.iter().map(|&x| Int::from(x)).collect()
}

pub fn overlattice_test(l: &Lattice, f_table: Option<&ReferenceSet>) -> Result<Verdict> {
    const NAME: &str = "overlattice";
    let m = split_form(l)?;
    let table = f_table.filter(|t| !t.is_empty()).ok_or_else(|| Error::TableMissing(format!("2-reflective lattices of rank {}", l.rank())))?;
    let det = m.determinant().abs();
    let fqm = glue_group(&m)?;
    let mut unknown = 0usize;
    let mut skipped = Vec::new();
    let mut any = false;
    for p in fqm.primes() {
        let pp = Int::from(p * p);
        if !(&det % &pp).is_zero() {
            continue;
        }
        let (group, lines) = match prime_index_glue(&m, p, DEFAULT_GROUP_CAP) {
            Ok(x) => x,
            Err(Error::GroupTooLarge { order, .. }) => {
                skipped.push(format!("{order} lines at p = {p}"));
                continue;
            }
            Err(e) => return Err(e),
        };
        for h in &lines {
            any = true;
            let ov = overlattice_from_glue(&m, &group, h)?;
            let big = with_hyperbolic_plane(&ov.lattice);
            match table.membership(&big)? {
                Membership::Absent => {
                    return Ok(positive(
                        NAME,
                        None,
                        Certificate::Overlattice { prime: p, basis: ov.basis, gram: ov.lattice },
                    ))
                }
                Membership::Unknown => unknown += 1,
                Membership::GenusMatch => {}
            }
        }
    }
    let reason = if !skipped.is_empty() {
        format!("overlattice scan over the cap ({})", skipped.join(", "))
    } else if !any {
        "M has no even overlattice of prime index".to_string()
    } else if unknown > 0 {
        format!("{unknown} overlattices not decidable against an incomplete table")
    } else {
        "every prime-index overlattice lies in a table genus".to_string()
    };
    Ok(Verdict::inconclusive(NAME, None, reason))
}

pub fn det_cube_test(l: &Lattice) -> Result<Verdict> {
    const NAME: &str = "det-cube";
    if l.rank() < 13 {
        return Err(Error::RankTooSmall(l.rank(), 13));
    }
    let mut rest = l.determinant().abs();
    while rest.is_even() && !rest.is_zero() {
        rest /= 2;
    }
    let mut p = Int::from(3);
    while &p * &p * &p <= rest {
        let mut k = 0;
        while (&rest % &p).is_zero() {
            rest /= &p;
            k += 1;
        }
        if k >= 3 {
            return Ok(positive(NAME, None, Certificate::DetCube { prime: p }));
        }
        p += 2;
    }
    Ok(Verdict::inconclusive(NAME, None, "no odd prime cube divides det"))
}

/// Corank-one primitive sublattices `ker c` for sparse random functionals `c`.
pub fn sublattice_test(l: &Lattice, z_table: Option<&ReferenceSet>, trials: usize, seed: u64) -> Result<Verdict> {
    const NAME: &str = "sublattice";
    let table = z_table.ok_or_else(|| Error::TableMissing(format!("zero-entropy lattices of rank {}", l.rank() - 1)))?;
    let n = l.rank();
    let det = l.determinant().abs();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bound = DEFAULT_COORD_BOUND;
    let mut seen: HashSet<Vec<i64>> = HashSet::new();
    let mut stale = 0;
    let mut undecidable = 0;
    for _ in 0..trials {
        if stale >= EXHAUSTION && bound < MAX_BOUND {
            bound *= 2;
            stale = 0;
        }
        let mut c = sparse_vector(&mut rng, n, bound);
        let g = c.iter().fold(0i64, |a, b| a.gcd(b));
        if g == 0 {
            stale += 1;
            continue;
        }
        c.iter_mut().for_each(|x| *x /= g);
        if c.iter().find(|x| **x != 0).is_some_and(|x| *x < 0) {
            c.iter_mut().for_each(|x| *x = -*x);
        }
        if !seen.insert(c.clone()) {
            stale += 1;
            continue;
        }
        stale = 0;
        let basis = matrix::right_kernel(&[ints(&c)]);
        let l1 = l.restrict(&basis);
        let Ok(sig) = l1.signature() else { continue };
        if sig.positives != 1 || sig.negatives + 2 != n {
            continue;
        }
        let d1 = l1.determinant();
        if det < d1.abs() * 2 {
            continue;
        }
        match table.membership(&l1)? {
            Membership::Absent => {
                return Ok(positive(NAME, Some(seed), Certificate::Sublattice { basis, det: d1 }));
            }
            Membership::Unknown => undecidable += 1,
            Membership::GenusMatch => {}
        }
    }
    let reason = if undecidable > 0 {
        format!("no certificate in {trials} trials ({undecidable} candidates undecidable against the table)")
    } else {
        format!("no certificate in {trials} trials")
    };
    Ok(Verdict::inconclusive(NAME, Some(seed), reason))
}

/// Classes in the genus of `M` found as `e_v^⊥ / e_v` for random isotropic `e_v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenusSearch {
    /// Pairwise non-isometric, `M` first.
    pub classes: Vec<Lattice>,
}

/// Searches until two classes are known.
pub fn genus_search(l: &Lattice, trials: usize, seed: u64) -> Result<GenusSearch> {
    search_classes(l, trials, seed, |cs| cs.len() >= 2)
}

fn complement_class(l: &Lattice, m: &Lattice, v: &[Int], rng: &mut ChaCha8Rng) -> Result<Option<Lattice>> {
    let half: Int = -m.norm(v) / 2;
    if half <= Int::zero() {
        return Ok(None);
    }
    let h = half.to_i64().ok_or(Error::Overflow)?;
    let divisors: Vec<i64> = (1..=h).take_while(|d| d * d <= h).filter(|d| h % d == 0).flat_map(|d| [d, h / d]).collect();
    let a = divisors[rng.gen_range(0..divisors.len())];
    let b = h / a;
    let div_v = matrix::vec_mat(v, m.gram()).iter().fold(Int::zero(), |acc, x| acc.gcd(x));
    if !Int::from(a.gcd(&b)).gcd(&div_v).is_one() {
        return Ok(None);
    }
    let mut e = vec![Int::from(a), Int::from(b)];
    e.extend(v.iter().cloned());
    let w = matrix::vec_mat(&e, l.gram());
    let column: Vec<Vec<Int>> = w.iter().map(|x| vec![x.clone()]).collect();
    let Some(mut y) = matrix::solve_integer(&column, &[Int::one()]) else { return Ok(None) };
    let k = l.norm(&y) / 2;
    for (yi, ei) in y.iter_mut().zip(&e) {
        *yi -= &k * ei;
    }
    let plane = SublatticeBasis::new(vec![e, y])?;
    let comp = orthogonal_complement(l, &plane)?;
    Ok(Some(comp.gram_in(l)))
}

fn search_classes(l: &Lattice, trials: usize, seed: u64, done: impl Fn(&[Lattice]) -> bool) -> Result<GenusSearch> {
    let m = split_form(l)?;
    let mut classes = vec![m.clone()];
    if m.rank() <= 1 {
        return Ok(GenusSearch { classes });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bound = DEFAULT_COORD_BOUND;
    let mut stale = 0;
    for _ in 0..trials {
        if done(&classes) {
            break;
        }
        if stale >= EXHAUSTION && bound < MAX_BOUND {
            bound *= 2;
            stale = 0;
        }
        stale += 1;
        let v = ints(&sparse_vector(&mut rng, m.rank(), bound));
        if v.iter().all(|x| x.is_zero()) {
            continue;
        }
        let Some(n) = complement_class(l, &m, &v, &mut rng)? else { continue };
        let mut new = true;
        for c in &classes {
            match isometry::is_isometric_definite(c, &n) {
                Ok(Some(_)) | Err(Error::TooLarge(_)) => {
                    new = false;
                    break;
                }
                Ok(None) => {}
                Err(e) => return Err(e),
            }
        }
        if new {
            classes.push(n);
            stale = 0;
        }
    }
    Ok(GenusSearch { classes })
}

fn distinguishing_invariant(a: &Lattice, b: &Lattice) -> Result<String> {
    let ra = roots::roots(a)?.type_label();
    let rb = roots::roots(b)?.type_label();
    if ra != rb {
        return Ok(format!("root systems {ra} vs {rb}"));
    }
    let ma = crate::enumerate::minimum(&a.negate())?;
    let mb = crate::enumerate::minimum(&b.negate())?;
    if ma != mb {
        return Ok(format!("minima {ma} vs {mb}"));
    }
    Ok("no isometry (exhaustive search)".into())
}

pub fn genus_test(l: &Lattice, trials: usize, seed: u64) -> Result<Verdict> {
    const NAME: &str = "genus";
    let m = split_form(l)?;
    if m.rank() <= 1 {
        return Ok(Verdict::inconclusive(NAME, Some(seed), "rank-one genus has a single class"));
    }
    let rootless = |c: &Lattice| roots::has_finite_index_root_sublattice(c).map(|x| !x).unwrap_or(false);
    let found = search_classes(l, trials, seed, |cs| cs.iter().filter(|c| rootless(c)).count() >= 2)?;
    let good: Vec<&Lattice> = found.classes.iter().filter(|c| rootless(c)).collect();
    if good.len() >= 2 {
        let invariant = distinguishing_invariant(good[0], good[1])?;
        return Ok(positive(
            NAME,
            Some(seed),
            Certificate::Genus { first: good[0].clone(), second: good[1].clone(), invariant },
        ));
    }
    Ok(Verdict::inconclusive(
        NAME,
        Some(seed),
        format!("{} class(es) found, {} without a finite-index root sublattice", found.classes.len(), good.len()),
    ))
}

/// `(|image of O(M) in O(q)|, |O(q)|)`, or `None` past the caps.
pub(crate) fn surjectivity_orders(m: &Lattice) -> Result<Option<(usize, Int)>> {
    let fqm = glue_group(m)?;
    let oq = match isometry::orthogonal_q_group_order(&fqm) {
        Ok(x) => x,
        Err(Error::GroupTooLarge { .. }) | Err(Error::TooLarge(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    let Some(cap) = oq.to_usize().filter(|&c| c <= OQ_CAP) else { return Ok(None) };
    let group = match isometry::automorphism_group(m) {
        Ok(g) => g,
        Err(Error::TooLarge(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    let mats: Vec<_> = group.generators.iter().map(|g| g.matrix.clone()).collect();
    let (f, acts) = isometry::induced_actions(m, &mats)?;
    Ok(isometry::image_order(&f, &acts, cap).map(|k| (k, oq)))
}

pub fn surjectivity_test(l: &Lattice) -> Result<Verdict> {
    const NAME: &str = "surjectivity";
    let m = split_form(l)?;
    if m.rank() == 0 || roots::has_finite_index_root_sublattice(&m)? {
        return Ok(Verdict::inconclusive(NAME, None, "M has a finite-index root sublattice"));
    }
    match surjectivity_orders(&m)? {
        None => Ok(Verdict::inconclusive(NAME, None, "group orders beyond the caps")),
        Some((img, oq)) if Int::from(img) < oq => {
            Ok(positive(NAME, None, Certificate::Surjectivity { image_order: img, oq_order: oq }))
        }
        Some((img, oq)) => Ok(Verdict::inconclusive(NAME, None, format!("O(M) surjects onto O(q) (order {img} = {oq})"))),
    }
}

pub fn covering_radius_test(l: &Lattice) -> Result<Verdict> {
    const NAME: &str = "covering-radius";
    let m = split_form(l)?;
    if m.rank() == 0 {
        return Ok(Verdict::inconclusive(NAME, None, "M is zero"));
    }
    match covering_radius_sq(&m.negate(), &CoveringTable::builtin())? {
        CoveringRadiusResult::Known { value_sq, method } if value_sq <= Rat::from(Int::from(2)) => Ok(Verdict {
            status: Status::ZeroEntropy,
            test: NAME.into(),
            seed: None,
            certificate: Certificate::CoveringRadius { value_sq, method },
        }),
        CoveringRadiusResult::Known { value_sq, .. } => {
            Ok(Verdict::inconclusive(NAME, None, format!("covering radius² = {value_sq} > 2")))
        }
        CoveringRadiusResult::Unknown => Ok(Verdict::inconclusive(NAME, None, "covering radius unknown")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_lattice;
    use crate::matrix::int;
    use crate::reference::ReferenceTable;

    fn lat(s: &str) -> Lattice {
        parse_lattice(s).unwrap()
    }

    fn rank12_table() -> ReferenceSet {
        ReferenceSet::single(ReferenceTable::complete(
            ["U + E8 + A2", "U + E8 + A1^2", "U + D8 + A1^2", "U + D4^2 + A1^2"].iter().map(|s| lat(s)).collect(),
        ))
    }

    #[test]
    fn overlattice_examples() {
        let l = lat("U + E8(3) + A2");
        let t = rank12_table();
        let v = overlattice_test(&l, Some(&t)).unwrap();
        assert_eq!(v.status, Status::PositiveEntropy);
        assert!(v.verify(&l, Some(&t)).unwrap());
        let Certificate::Overlattice { gram, .. } = &v.certificate else { panic!() };
        assert_eq!(gram.determinant().abs(), int(3).pow(7));

        let a2 = lat("U + A2");
        assert_eq!(overlattice_test(&a2, Some(&t)).unwrap().status, Status::Inconclusive);
        assert!(matches!(overlattice_test(&l, None), Err(Error::TableMissing(_))));
        // a table member whose overlattices are all table members
        let ok = lat("U + A2 + D8");
        assert_eq!(overlattice_test(&ok, Some(&t)).unwrap().status, Status::Inconclusive);
    }

    #[test]
    fn det_cube_examples() {
        let v = det_cube_test(&lat("U + E8(3) + A2 + A1")).unwrap();
        assert_eq!(v.status, Status::PositiveEntropy);
        assert_eq!(v.certificate, Certificate::DetCube { prime: int(3) });
        assert!(v.verify(&lat("U + E8(3) + A2 + A1"), None).unwrap());
        assert_eq!(det_cube_test(&lat("U + D4^2 + A1^4")).unwrap().status, Status::Inconclusive);
        assert_eq!(det_cube_test(&lat("U + E8(3) + A2")), Err(Error::RankTooSmall(12, 13)));
    }

    #[test]
    fn sublattice_certificate_for_the_det_242_family() {
        let z3 = ReferenceSet::single(ReferenceTable { absent_dets: [int(242)].into_iter().collect(), ..Default::default() });
        for (a, ok) in [(121, false), (122, true), (200, true)] {
            let l = lat(&format!("U + [-2,1,{}]", -2 * a));
            // ⟨e, α, 11f − β⟩ in the basis e, f, α, β
            let basis = matrix::from_i64(&[vec![1, 0, 0, 0], vec![0, 0, 1, 0], vec![0, 11, 0, -1]]);
            assert_eq!(l.restrict(&basis).determinant().abs(), int(242));
            let v = Verdict {
                status: Status::PositiveEntropy,
                test: "sublattice".into(),
                seed: None,
                certificate: Certificate::Sublattice { basis, det: l.restrict(&matrix::from_i64(&[vec![1, 0, 0, 0], vec![0, 0, 1, 0], vec![0, 11, 0, -1]])).determinant() },
            };
            assert_eq!(v.verify(&l, Some(&z3)).unwrap(), ok, "a = {a}");
        }
        let l = lat("U + [-2,1,-400]");
        assert_eq!(sublattice_test(&l, Some(&z3), 0, 1).unwrap().status, Status::Inconclusive);
    }

    #[test]
    fn sublattice_finds_rank13_certificate() {
        let l = lat("U + E8(3) + A2 + A1");
        let mut z12 = rank12_table();
        z12.parts.push(ReferenceTable::complete(
            ["U + A1 + D9", "U + A2 + D8", "U + A3 + D7", "U + A2^2 + E6", "U + A1^6 + D4"].iter().map(|s| lat(s)).collect(),
        ));
        let v = sublattice_test(&l, Some(&z12), 500, 7).unwrap();
        assert_eq!(v.status, Status::PositiveEntropy, "{v}");
        assert!(v.verify(&l, Some(&z12)).unwrap());
        let again = sublattice_test(&l, Some(&z12), 500, 7).unwrap();
        assert_eq!(v, again);
    }

    #[test]
    fn zero_entropy_rank3_lattices_never_fire() {
        let z2 = ReferenceSet::single(ReferenceTable { complete: false, ..Default::default() });
        for k in [2, 3, 4, 5, 7, 9, 13, 25] {
            let l = lat(&format!("U + A1({k})"));
            assert_eq!(sublattice_test(&l, Some(&z2), 200, 3).unwrap().status, Status::Inconclusive);
        }
    }

    #[test]
    fn genus_examples() {
        assert_eq!(genus_test(&lat("U + [-4]"), 50, 0).unwrap().status, Status::Inconclusive);
        assert_eq!(genus_test(&lat("U + A2"), 50, 0).unwrap().status, Status::Inconclusive);
    }

    #[test]
    fn complements_stay_in_the_genus() {
        let l = lat("U + A2 + A1(3)");
        let m = split_form(&l).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut hits = 0;
        for _ in 0..40 {
            let v = ints(&sparse_vector(&mut rng, m.rank(), 4));
            if v.iter().all(|x| x.is_zero()) {
                continue;
            }
            if let Some(n) = complement_class(&l, &m, &v, &mut rng).unwrap() {
                assert!(isometry::same_genus(&n, &m).unwrap());
                hits += 1;
            }
        }
        assert!(hits > 0);
    }

    #[test]
    fn surjectivity_examples() {
        assert_eq!(surjectivity_test(&lat("U + A2")).unwrap().status, Status::Inconclusive);
        let v = surjectivity_test(&lat("U + [-4]")).unwrap();
        assert_eq!(v.status, Status::Inconclusive);
        assert_eq!(surjectivity_orders(&lat("[-4]")).unwrap(), Some((2, int(2))));
    }

    #[test]
    fn covering_examples() {
        let v = covering_radius_test(&lat("U + [-2,1,-4]")).unwrap();
        assert_eq!(v.status, Status::ZeroEntropy);
        assert!(v.verify(&lat("U + [-2,1,-4]"), None).unwrap());
        assert_eq!(covering_radius_test(&lat("U + [-2,1,-22]")).unwrap().status, Status::Inconclusive);
        assert_eq!(covering_radius_test(&lat("U + E8")).unwrap().status, Status::ZeroEntropy);
        assert!(matches!(covering_radius_test(&lat("A1 + U")), Err(Error::NotSplitForm)));
    }
}
