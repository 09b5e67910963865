//! Entropy tests for `L = U ⊕ M`, reducible fibers, and critical sublattices.
//!
//! Every positive or zero verdict carries a certificate that can be checked
//! again from scratch with [`Certificate::verify`].

mod battery;
mod critical;
mod fibers;

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::covering::{covering_radius_sq, CoveringMethod, CoveringRadiusResult, CoveringTable};
use crate::error::{Error, Result};
use crate::isometry;
use crate::lattice::{saturate, Lattice, SublatticeBasis};
use crate::reference::{Membership, ReferenceSet};
use crate::matrix::{self, Int, Rat};
use crate::roots;

pub use battery::{
    covering_radius_test, det_cube_test, genus_search, genus_test, overlattice_test, sublattice_test,
    surjectivity_test, GenusSearch, DEFAULT_COORD_BOUND, DEFAULT_GENUS_TRIALS, DEFAULT_SUBLATTICE_TRIALS,
};
pub use critical::{
    critical_sublattice, critical_sublattice_with, root_residue_certificate, seed_reflection_closed, zero_entropy_sublattices,
    CriticalCertificate, CriticalOptions, CriticalSublatticeResult,
};
pub use fibers::{reducible_fibers, FiberDescription};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Status {
    PositiveEntropy,
    ZeroEntropy,
    Inconclusive,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::PositiveEntropy => "positive",
            Status::ZeroEntropy => "zero",
            Status::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Certificate {
    /// Inconclusive outcome; the reason is informational.
    None { reason: String },
    /// `M ⊂ M'` of prime index with `U ⊕ M'` outside every table genus.
    Overlattice { prime: i64, basis: Vec<Vec<Rat>>, gram: Lattice },
    DetCube { prime: Int },
    /// A primitive hyperbolic corank-one sublattice outside every table genus.
    Sublattice { basis: Vec<Vec<Int>>, det: Int },
    /// Two non-isometric classes in the genus of `M`, both without a
    /// finite-index root sublattice.
    Genus { first: Lattice, second: Lattice, invariant: String },
    Surjectivity { image_order: usize, oq_order: Int },
    CoveringRadius { value_sq: Rat, method: CoveringMethod },
    /// A sublattice of a zero-entropy `parent` containing its critical sublattice.
    Critical { parent: Lattice, basis: Vec<Vec<Int>>, parent_certificate: Box<Certificate> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub status: Status,
    pub test: String,
    pub seed: Option<u64>,
    pub certificate: Certificate,
}

impl Verdict {
    pub(crate) fn inconclusive(test: &str, seed: Option<u64>, reason: impl Into<String>) -> Self {
        Verdict { status: Status::Inconclusive, test: test.into(), seed, certificate: Certificate::None { reason: reason.into() } }
    }

    /// Re-checks the certificate against `l` (and the table it cites, if any).
    pub fn verify(&self, l: &Lattice, table: Option<&ReferenceSet>) -> Result<bool> {
        let ok = self.certificate.verify(l, table)?;
        Ok(ok
            && match (&self.status, &self.certificate) {
                (Status::Inconclusive, Certificate::None { .. }) => true,
                (Status::ZeroEntropy, Certificate::CoveringRadius { .. } | Certificate::Critical { .. }) => true,
                (Status::PositiveEntropy, c) => {
                    !matches!(c, Certificate::None { .. } | Certificate::CoveringRadius { .. } | Certificate::Critical { .. })
                }
                _ => false,
            })
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.test, self.status)?;
        if let Some(s) = self.seed {
            write!(f, " (seed {s})")?;
        }
        match &self.certificate {
            Certificate::None { reason } => write!(f, " — {reason}"),
            Certificate::Overlattice { prime, gram, .. } => {
                write!(f, " — index-{prime} overlattice M' with det {} outside the table", gram.determinant())
            }
            Certificate::DetCube { prime } => write!(f, " — {prime}^3 divides det"),
            Certificate::Sublattice { det, .. } => write!(f, " — primitive sublattice of det {det} outside the table"),
            Certificate::Genus { invariant, .. } => write!(f, " — two rootless classes ({invariant})"),
            Certificate::Surjectivity { image_order, oq_order } => {
                write!(f, " — image of O(M) has order {image_order} < |O(q)| = {oq_order}")
            }
            Certificate::CoveringRadius { value_sq, method } => write!(f, " — covering radius² = {value_sq} ({method})"),
            Certificate::Critical { parent, .. } => {
                write!(f, " — contains the critical sublattice of a zero-entropy lattice of det {}", parent.determinant())
            }
        }
    }
}

/// The `M` of a lattice given in the basis `e, f, M` with `(e, f) = 1`.
pub fn split_form(l: &Lattice) -> Result<Lattice> {
    let g = l.gram();
    let n = l.rank();
    if n < 2 || !g[0][0].is_zero() || !g[1][1].is_zero() || !g[0][1].is_one() {
        return Err(Error::NotSplitForm);
    }
    if (2..n).any(|j| !g[0][j].is_zero() || !g[1][j].is_zero()) {
        return Err(Error::NotSplitForm);
    }
    let m = Lattice::new(g[2..].iter().map(|r| r[2..].to_vec()).collect())?;
    if m.rank() > 0 && (!m.is_even() || !m.is_negative_definite()) {
        return Err(Error::NotSplitForm);
    }
    Ok(m)
}

pub fn with_hyperbolic_plane(m: &Lattice) -> Lattice {
    Lattice::from_rows(&[&[0, 1], &[1, 0]]).expect("U").direct_sum(m)
}

fn absent_from(l: &Lattice, table: &ReferenceSet) -> Result<bool> {
    Ok(table.membership(l)? == Membership::Absent)
}

impl Certificate {
    pub fn verify(&self, l: &Lattice, table: Option<&ReferenceSet>) -> Result<bool> {
        match self {
            Certificate::None { .. } => Ok(true),
            Certificate::Overlattice { prime, basis, gram } => {
                let m = split_form(l)?;
                let g = matrix::to_rat(m.gram());
                let n = m.rank();
                if basis.len() != n {
                    return Ok(false);
                }
                let computed: Vec<Vec<Rat>> = (0..n)
                    .map(|i| {
                        (0..n)
                            .map(|j| {
                                let mut s = Rat::zero();
                                for a in 0..n {
                                    for b in 0..n {
                                        s += &basis[i][a] * &g[a][b] * &basis[j][b];
                                    }
                                }
                                s
                            })
                            .collect()
                    })
                    .collect();
                let same = computed.iter().zip(gram.gram()).all(|(r, s)| r.iter().zip(s).all(|(x, y)| *x == Rat::from(y.clone())));
                // M ⊂ M': unit vectors have integral coordinates in the new basis
                let inv = matrix_inverse_rat(basis);
                let contains = inv.as_ref().is_some_and(|m| m.iter().flatten().all(|x| x.is_integer()));
                let p = Int::from(*prime);
                let index_ok = m.determinant() == gram.determinant() * &p * &p;
                let table = table.ok_or_else(|| Error::TableMissing("overlattice certificate".into()))?;
                Ok(same
                    && contains
                    && index_ok
                    && gram.is_even()
                    && absent_from(&with_hyperbolic_plane(gram), table)?)
            }
            Certificate::DetCube { prime } => {
                let d = l.determinant().abs();
                let p3 = prime.pow(3);
                Ok(l.rank() >= 13
                    && prime > &Int::from(2)
                    && crate::reference::smallest_prime_factor(prime).as_ref() == Some(prime)
                    && (d % p3).is_zero())
            }
            Certificate::Sublattice { basis, det } => {
                let n = l.rank();
                let Ok(s) = SublatticeBasis::new(basis.clone()) else { return Ok(false) };
                let l1 = s.gram_in(l);
                let sig = match l1.signature() {
                    Ok(sig) => sig,
                    Err(_) => return Ok(false),
                };
                let table = table.ok_or_else(|| Error::TableMissing("sublattice certificate".into()))?;
                Ok(s.rank() + 1 == n
                    && sig.positives == 1
                    && saturate(l, &s).index.is_one()
                    && &l1.determinant() == det
                    && l.determinant().abs() >= det.abs() * 2
                    && absent_from(&l1, table)?)
            }
            Certificate::Genus { first, second, .. } => {
                let m = split_form(l)?;
                Ok(isometry::same_genus(first, &m)?
                    && isometry::same_genus(second, &m)?
                    && !roots::has_finite_index_root_sublattice(first)?
                    && !roots::has_finite_index_root_sublattice(second)?
                    && isometry::is_isometric_definite(first, second)?.is_none())
            }
            Certificate::Surjectivity { image_order, oq_order } => {
                let m = split_form(l)?;
                let again = battery::surjectivity_orders(&m)?;
                Ok(!roots::has_finite_index_root_sublattice(&m)?
                    && again == Some((*image_order, oq_order.clone()))
                    && Int::from(*image_order) < *oq_order)
            }
            Certificate::CoveringRadius { value_sq, .. } => {
                let m = split_form(l)?;
                let r = covering_radius_sq(&m.negate(), &CoveringTable::builtin())?;
                Ok(matches!(r, CoveringRadiusResult::Known { value_sq: ref v, .. } if v == value_sq)
                    && *value_sq <= Rat::from(Int::from(2)))
            }
            Certificate::Critical { parent, basis, parent_certificate } => {
                if !matches!(**parent_certificate, Certificate::CoveringRadius { .. } | Certificate::Critical { .. })
                    || !parent_certificate.verify(parent, table)?
                {
                    return Ok(false);
                }
                let Ok(s) = SublatticeBasis::new(basis.clone()) else { return Ok(false) };
                if s.rank() != parent.rank() || s.gram_in(parent) != *l {
                    return Ok(false);
                }
                match critical_sublattice(parent)? {
                    CriticalSublatticeResult::Decided { basis: cr, .. } => Ok(cr.vectors.iter().all(|v| s.contains(v))),
                    CriticalSublatticeResult::Undecided { .. } => Ok(false),
                }
            }
        }
    }
}

fn matrix_inverse_rat(a: &[Vec<Rat>]) -> Option<Vec<Vec<Rat>>> {
    let den = a.iter().flatten().fold(Int::one(), |acc, x| num_integer::Integer::lcm(&acc, x.denom()));
    let scaled: Vec<Vec<Int>> = a.iter().map(|r| r.iter().map(|x| (x * Rat::from(den.clone())).to_integer()).collect()).collect();
    let inv = matrix::inverse_rational(&scaled)?;
    Some(inv.into_iter().map(|r| r.into_iter().map(|x| x * Rat::from(den.clone())).collect()).collect())
}
