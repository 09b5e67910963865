use nslat::discriminant::glue_group;
use nslat::dsl::{self, Family, LatticeExpr};
use nslat::enumerate;
use nslat::isometry;
use nslat::matrix::{self, int, Int, Rat};
use nslat::Lattice;
use num_traits::{ToPrimitive, Zero};
use proptest::prelude::*;

fn definite(max_rank: usize) -> impl Strategy<Value = Lattice> {
    (2..=max_rank)
        .prop_flat_map(|n| (Just(n), proptest::collection::vec(1i64..=4, n), proptest::collection::vec(-2i64..=2, n * n)))
        .prop_filter_map("positive definite", |(n, diag, off)| {
            let mut g = vec![vec![0i64; n]; n];
            for i in 0..n {
                g[i][i] = 2 * diag[i];
                for j in 0..i {
                    g[i][j] = off[i * n + j];
                    g[j][i] = off[i * n + j];
                }
            }
            let l = Lattice::from_i64(&g).ok()?;
            l.is_positive_definite().then_some(l)
        })
}

fn atom() -> impl Strategy<Value = LatticeExpr> {
    prop_oneof![
        (1u32..=5).prop_map(|k| LatticeExpr::Named(Family::A, k)),
        (4u32..=6).prop_map(|k| LatticeExpr::Named(Family::D, k)),
        (6u32..=8).prop_map(|k| LatticeExpr::Named(Family::E, k)),
        Just(LatticeExpr::Named(Family::U, 0)),
        (1i64..=10).prop_map(|k| LatticeExpr::RankOne(int(-2 * k))),
        (1i64..=3, -1i64..=1).prop_map(|(a, b)| LatticeExpr::ExplicitGram(vec![int(-2), int(b), int(-2 * a)])),
    ]
}

fn expr() -> impl Strategy<Value = LatticeExpr> {
    let term = (atom(), 1i64..=3, 1u32..=2).prop_map(|(a, k, p)| {
        let t = if k == 1 { a } else { LatticeExpr::Twist(Box::new(a), int(k)) };
        if p == 1 {
            t
        } else {
            LatticeExpr::Power(Box::new(t), p)
        }
    });
    proptest::collection::vec(term, 1..=3).prop_map(LatticeExpr::Sum)
}

/// Brute force over the box `|x_i| ≤ √(bound · (G⁻¹)_ii)`.
fn naive_short(l: &Lattice, bound: i64) -> Vec<Vec<Int>> {
    let inv = matrix::inverse_rational(l.gram()).unwrap();
    let n = l.rank();
    let r: Vec<i64> = (0..n).map(|i| ((&inv[i][i] * Rat::from(int(bound))).to_f64().unwrap().sqrt() + 1e-9) as i64).collect();
    let mut out = Vec::new();
    let mut x: Vec<i64> = r.iter().map(|k| -k).collect();
    loop {
        let v: Vec<Int> = x.iter().map(|&c| int(c)).collect();
        let q = l.norm(&v);
        if !q.is_zero() && q <= int(bound) {
            out.push(v);
        }
        let mut i = 0;
        loop {
            if i == n {
                out.sort();
                return out;
            }
            x[i] += 1;
            if x[i] <= r[i] {
                break;
            }
            x[i] = -r[i];
            i += 1;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn enumeration_matches_box(l in definite(3), bound in 2i64..=12) {
        let ours = enumerate::short_vectors(&l, &Rat::from(int(bound)), false).unwrap();
        prop_assert_eq!(ours, naive_short(&l, bound));
    }

    #[test]
    fn dsl_round_trip(e in expr()) {
        let printed = dsl::print(&e);
        let back = dsl::parse(&printed).unwrap();
        prop_assert_eq!(back.eval(), e.eval());
        prop_assert_eq!(dsl::print(&back), printed);
    }

    #[test]
    fn automorphism_order_is_even(l in definite(3)) {
        let g = isometry::automorphism_group(&l).unwrap();
        prop_assert!((&g.order % int(2)).is_zero());
        for w in &g.generators {
            prop_assert!(w.verify());
        }
    }

    #[test]
    fn induced_action_preserves_q(l in definite(3)) {
        let g = isometry::automorphism_group(&l).unwrap();
        let mats: Vec<_> = g.generators.iter().map(|w| w.matrix.clone()).collect();
        let (fqm, acts) = isometry::induced_actions(&l, &mats).unwrap();
        for a in &acts {
            for x in fqm.elements() {
                prop_assert_eq!(fqm.q_scaled(&a.apply(&fqm, &x)), fqm.q_scaled(&x));
            }
        }
    }

    #[test]
    fn same_genus_is_an_equivalence(a in definite(2), b in definite(2), c in definite(2)) {
        let sg = |x: &Lattice, y: &Lattice| isometry::same_genus(x, y).unwrap();
        prop_assert!(sg(&a, &a));
        prop_assert_eq!(sg(&a, &b), sg(&b, &a));
        if sg(&a, &b) && sg(&b, &c) {
            prop_assert!(sg(&a, &c));
        }
        // isometric lattices share a genus
        if isometry::is_isometric_definite(&a, &b).unwrap().is_some() {
            prop_assert!(sg(&a, &b));
        }
    }

    #[test]
    fn glue_order_is_det(l in definite(4)) {
        let fqm = glue_group(&l).unwrap();
        prop_assert_eq!(Int::from(fqm.order()), l.determinant());
    }
}
