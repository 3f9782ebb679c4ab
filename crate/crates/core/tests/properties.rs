//! Property tests for closure operators, the sheaf calculus on P1,
//! factorization and monomial decompositions.

use std::collections::BTreeSet;

use proptest::prelude::*;
use tfclass_core::affine::monomial::{box_monomials, MonomialIdeal};
use tfclass_core::affine::{AffineBackend, AffineWindow, PidPrime, RingDescriptor};
use tfclass_core::exact::{factor_poly, is_irreducible, Field, Poly};
use tfclass_core::p1::{self, ClosedPoint, SheafP1};
use tfclass_core::subcat::{ops, ClosureOp, WindowIndex};

fn integers() -> AffineBackend {
    AffineBackend::new(
        RingDescriptor::parse("Z").unwrap(),
        AffineWindow::Pid { primes: vec![PidPrime::Int(2), PidPrime::Int(3)], max_exponent: 2, max_rank: 1 },
    )
    .unwrap()
}

fn pick(mask: u64, n: usize) -> Vec<usize> {
    (0..n).filter(|i| mask >> (i % 64) & 1 == 1).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closure_is_a_closure_operator(m1 in any::<u64>(), m2 in any::<u64>(), which in 0usize..3) {
        let b = integers();
        let idx = WindowIndex::new(&b).unwrap();
        let n = idx.len();
        let op_sets = [
            ops(&[ClosureOp::Sub, ClosureOp::Ext]),
            ops(&[ClosureOp::Quot, ClosureOp::Ext]),
            ops(&[ClosureOp::Image, ClosureOp::Ext]),
        ];
        let o = &op_sets[which];
        let g = pick(m1, n);
        let h: Vec<usize> = g.iter().copied().chain(pick(m2, n)).collect();
        let cg = idx.closure(&g, o).unwrap();
        let ch = idx.closure(&h, o).unwrap();
        for &x in &g {
            prop_assert!(cg.contains(x));
        }
        prop_assert!(cg.is_subset(&ch));
        let again = idx.closure(&cg.ones().collect::<Vec<_>>(), o).unwrap();
        prop_assert_eq!(&again, &cg);
        prop_assert!(idx.is_closed(&cg, o).unwrap());
    }

    #[test]
    fn torsionfree_closure_is_the_ass_class(mask in any::<u64>()) {
        let b = integers();
        let idx = WindowIndex::new(&b).unwrap();
        let g = pick(mask, idx.len());
        let fix = idx.closure(&g, &ops(&[ClosureOp::Sub, ClosureOp::Ext])).unwrap();
        let want = idx.ass_class(&idx.ass_of(g.iter().copied()));
        prop_assert_eq!(fix, want);
    }

    #[test]
    fn torsion_closure_is_the_supp_class(mask in any::<u64>()) {
        let b = integers();
        let idx = WindowIndex::new(&b).unwrap();
        let g = pick(mask, idx.len());
        let fix = idx.closure(&g, &ops(&[ClosureOp::Quot, ClosureOp::Ext])).unwrap();
        let want = idx.supp_class(&idx.supp_of(g.iter().copied()));
        prop_assert_eq!(fix, want);
    }
}

fn f2() -> Field {
    Field::prime(2).unwrap()
}

fn points() -> Vec<ClosedPoint> {
    vec![
        ClosedPoint::Finite(Poly::from_i64s(f2(), &[0, 1])),
        ClosedPoint::Finite(Poly::from_i64s(f2(), &[1, 1])),
        ClosedPoint::Finite(Poly::from_i64s(f2(), &[1, 1, 1])),
        ClosedPoint::Infinity,
    ]
}

fn sheaf_strategy() -> impl Strategy<Value = SheafP1> {
    (
        prop::collection::vec(-6i64..6, 0..4),
        prop::collection::vec((0usize..4, 1u32..4), 0..4),
    )
        .prop_map(|(twists, tors)| {
            let pts = points();
            SheafP1::new(twists, tors.into_iter().map(|(i, l)| (pts[i].clone(), l)).collect())
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn hom_and_ext_are_twist_invariant(f in sheaf_strategy(), g in sheaf_strategy(), m in -5i64..5) {
        prop_assert_eq!(p1::hom_dim(&p1::twist(&f, m), &p1::twist(&g, m)), p1::hom_dim(&f, &g));
        prop_assert_eq!(p1::ext1_dim(&p1::twist(&f, m), &p1::twist(&g, m)), p1::ext1_dim(&f, &g));
    }

    #[test]
    fn serre_duality(f in sheaf_strategy(), g in sheaf_strategy()) {
        prop_assert_eq!(p1::ext1_dim(&f, &g), p1::hom_dim(&g, &p1::twist(&f, -2)));
    }

    #[test]
    fn riemann_roch(f in sheaf_strategy(), g in sheaf_strategy()) {
        let (rf, df) = (f.rank() as i64, f.degree());
        let (rg, dg) = (g.rank() as i64, g.degree());
        let chi = p1::hom_dim(&f, &g) as i64 - p1::ext1_dim(&f, &g) as i64;
        prop_assert_eq!(chi, rf * rg + rf * dg - rg * df);
        prop_assert_eq!(p1::euler_characteristic(&g), rg + dg);
    }

    #[test]
    fn decomposition_splits(f in sheaf_strategy()) {
        let (tor, vect) = p1::decompose(&f);
        prop_assert_eq!(tor.direct_sum(&vect), f.clone());
        prop_assert_eq!(p1::ext1_dim(&vect, &tor), 0);
        prop_assert_eq!(tor.rank(), 0);
        prop_assert!(vect.torsion().is_empty());
    }

    #[test]
    fn ass_is_additive_on_direct_sums(f in sheaf_strategy(), g in sheaf_strategy()) {
        let sum: BTreeSet<_> = p1::ass_p1(&f).union(&p1::ass_p1(&g)).cloned().collect();
        prop_assert_eq!(p1::ass_p1(&f.direct_sum(&g)), sum);
    }
}

fn poly_strategy() -> impl Strategy<Value = Poly> {
    (prop::sample::select(vec![2u64, 3, 5]), prop::collection::vec(0i64..5, 2..9)).prop_filter_map(
        "constant",
        |(p, mut c)| {
            let field = Field::prime(p).unwrap();
            c.push(1);
            let f = Poly::from_i64s(field, &c);
            (f.deg() >= 1).then_some(f)
        },
    )
}

fn rational_poly_strategy() -> impl Strategy<Value = Poly> {
    prop::collection::vec(-4i64..5, 2..6).prop_filter_map("constant", |mut c| {
        c.push(1);
        let f = Poly::from_i64s(Field::Rationals, &c);
        (f.deg() >= 1).then_some(f)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn factorization_round_trips_over_finite_fields(f in poly_strategy()) {
        let fac = factor_poly(&f).unwrap();
        prop_assert_eq!(fac.expand(), f);
        for (g, e) in &fac.factors {
            prop_assert!(*e >= 1);
            prop_assert!(g.is_monic() && is_irreducible(g));
        }
    }

    #[test]
    fn factorization_round_trips_over_q(f in rational_poly_strategy()) {
        let fac = factor_poly(&f).unwrap();
        prop_assert_eq!(fac.expand(), f);
        for (g, _) in &fac.factors {
            prop_assert!(is_irreducible(g));
        }
    }
}

fn monomial_ideal_strategy(nvars: usize) -> impl Strategy<Value = MonomialIdeal> {
    prop::collection::vec(prop::collection::vec(0u32..4, nvars), 1..4)
        .prop_map(move |gens| MonomialIdeal::new(nvars, gens))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn irreducible_components_intersect_to_the_ideal(j in monomial_ideal_strategy(3)) {
        let comps = j.irreducible_components();
        for c in &comps {
            prop_assert!(c.is_irreducible());
            prop_assert!(c.contains(&j));
        }
        for m in box_monomials(3, 5) {
            let inside_all = comps.iter().all(|c| c.contains_monomial(&m));
            prop_assert_eq!(inside_all, j.contains_monomial(&m), "monomial {:?}", m);
        }
    }

    #[test]
    fn colon_membership(j in monomial_ideal_strategy(2), u in prop::collection::vec(0u32..3, 2)) {
        let col = j.colon(&u);
        for m in box_monomials(2, 5) {
            let prod: Vec<u32> = m.iter().zip(&u).map(|(a, b)| a + b).collect();
            prop_assert_eq!(col.contains_monomial(&m), j.contains_monomial(&prod));
        }
    }
}
