use std::sync::Arc;

use proptest::prelude::*;

use satake_isolator::laurent::{
    Block, GaussianRational, LaurentPoly, SignedPermutation, VariableLayout, WeylGroup,
};
use satake_isolator::satake::{trace, SphericalHeckeElement, UnramifiedRep};
use satake_isolator::torus::{
    diagonal_lift, lift_poly, shifted_diagonal_map, Lift, Place, TorusPoint,
};

fn layout() -> Arc<VariableLayout> {
    VariableLayout::new(vec![
        Block {
            place: "p".into(),
            rank: 2,
        },
        Block {
            place: "q".into(),
            rank: 2,
        },
    ])
    .unwrap()
    .shared()
}

/// Swaps and inversions on two coordinates (order 4).
fn group() -> WeylGroup {
    let swap = SignedPermutation::from_permutation(vec![1, 0]).unwrap();
    let inv = SignedPermutation::inversion(2);
    WeylGroup::new(vec![
        SignedPermutation::identity(2),
        swap.clone(),
        inv.clone(),
        swap.compose(&inv),
    ])
    .unwrap()
}

fn coeff() -> impl Strategy<Value = GaussianRational> {
    (-6i64..=6, 1i64..=4, -3i64..=3, 1i64..=3).prop_map(|(a, b, c, d)| GaussianRational::from_parts(a, b, c, d))
}

fn nonzero() -> impl Strategy<Value = GaussianRational> {
    coeff().prop_filter("nonzero", |c| *c != GaussianRational::from(0))
}

fn poly_on(layout: Arc<VariableLayout>) -> impl Strategy<Value = LaurentPoly> {
    let n = layout.len();
    prop::collection::vec((prop::collection::vec(-3i64..=3, n), coeff()), 0..6)
        .prop_map(move |terms| LaurentPoly::from_terms(layout.clone(), terms).unwrap())
}

fn poly() -> impl Strategy<Value = LaurentPoly> {
    poly_on(layout())
}

fn point(n: usize) -> impl Strategy<Value = Vec<GaussianRational>> {
    prop::collection::vec(nonzero(), n)
}

fn element() -> impl Strategy<Value = SignedPermutation> {
    (0..group().order()).prop_map(|i| group().elements()[i].clone())
}

fn cfg() -> ProptestConfig {
    ProptestConfig::with_cases(256)
}

proptest! {
    #![proptest_config(cfg())]

    #[test]
    fn ring_laws(a in poly(), b in poly(), c in poly()) {
        let l = layout();
        prop_assert_eq!(a.checked_add(&b).unwrap(), b.checked_add(&a).unwrap());
        prop_assert_eq!(a.checked_mul(&b).unwrap(), b.checked_mul(&a).unwrap());
        prop_assert_eq!(
            a.checked_add(&b).unwrap().checked_add(&c).unwrap(),
            a.checked_add(&b.checked_add(&c).unwrap()).unwrap()
        );
        prop_assert_eq!(
            a.checked_mul(&b).unwrap().checked_mul(&c).unwrap(),
            a.checked_mul(&b.checked_mul(&c).unwrap()).unwrap()
        );
        prop_assert_eq!(
            a.checked_mul(&b.checked_add(&c).unwrap()).unwrap(),
            a.checked_mul(&b).unwrap().checked_add(&a.checked_mul(&c).unwrap()).unwrap()
        );
        prop_assert_eq!(a.checked_add(&LaurentPoly::zero(l.clone())).unwrap(), a.clone());
        prop_assert_eq!(a.checked_mul(&LaurentPoly::one(l.clone())).unwrap(), a.clone());
        prop_assert!(a.checked_sub(&a).unwrap().is_zero());
    }

    #[test]
    fn evaluate_is_a_homomorphism(a in poly(), b in poly(), x in point(4)) {
        let va = a.evaluate(&x).unwrap();
        let vb = b.evaluate(&x).unwrap();
        prop_assert_eq!(a.checked_add(&b).unwrap().evaluate(&x).unwrap(), &va + &vb);
        prop_assert_eq!(a.checked_mul(&b).unwrap().evaluate(&x).unwrap(), &va * &vb);
    }

    #[test]
    fn action_laws(p in poly(), w1 in element(), w2 in element(), v1 in element(), v2 in element()) {
        let id = [SignedPermutation::identity(2), SignedPermutation::identity(2)];
        prop_assert_eq!(p.act(&id).unwrap(), p.clone());
        let lhs = p.act(&[w1.compose(&w2), v1.compose(&v2)]).unwrap();
        let rhs = p.act(&[w1.clone(), v1.clone()]).unwrap().act(&[w2.clone(), v2.clone()]).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn action_is_a_ring_automorphism(a in poly(), b in poly(), w in element(), v in element()) {
        let ws = [w, v];
        prop_assert_eq!(
            a.checked_mul(&b).unwrap().act(&ws).unwrap(),
            a.act(&ws).unwrap().checked_mul(&b.act(&ws).unwrap()).unwrap()
        );
    }

    #[test]
    fn evaluate_act_compatibility(p in poly(), w in element(), v in element(), x in point(4)) {
        let mut moved = w.apply_point(&x[..2]).unwrap();
        moved.extend(v.apply_point(&x[2..]).unwrap());
        prop_assert_eq!(p.act(&[w, v]).unwrap().evaluate(&x).unwrap(), p.evaluate(&moved).unwrap());
    }

    #[test]
    fn symmetrize_idempotent_and_invariant(p in poly()) {
        let g = group();
        let s = p.symmetrize_uniform(&g).unwrap();
        prop_assert!(s.is_invariant_uniform(&g).unwrap());
        prop_assert_eq!(s.symmetrize_uniform(&g).unwrap(), s.clone());
        if p.is_invariant_uniform(&g).unwrap() {
            prop_assert_eq!(s, p);
        }
    }

    #[test]
    fn trace_is_orbit_independent(p in poly_on(VariableLayout::single("v", 2).shared()), x in point(2), w in element()) {
        let g = group();
        let place = Place::new("v", 1).unwrap();
        let h = SphericalHeckeElement::new(place.clone(), p.symmetrize_uniform(&g).unwrap(), &g).unwrap();
        let a = TorusPoint::new(x.clone()).unwrap();
        let b = TorusPoint::new(w.apply_point(&x).unwrap()).unwrap();
        let ra = UnramifiedRep::new(place.clone(), &a, &g).unwrap();
        let rb = UnramifiedRep::new(place, &b, &g).unwrap();
        prop_assert_eq!(&ra, &rb);
        prop_assert_eq!(trace(&h, &ra).unwrap(), h.value_at(&a).unwrap());
        prop_assert_eq!(h.value_at(&a).unwrap(), h.value_at(&b).unwrap());
    }

    #[test]
    fn diagonal_lift_recovers_base_point(z in nonzero(), k in 0usize..4) {
        let (n1, n2) = [(1, 2), (2, 3), (3, 4), (2, 5)][k];
        let x = z.pow(n1 as i64).unwrap();
        let y = z.pow(n2 as i64).unwrap();
        prop_assert_eq!(diagonal_lift(&x, &y, n1, n2).unwrap(), Lift::Lifted(z));
    }

    #[test]
    fn perturbed_pairs_are_rejected(z in nonzero(), k in 0usize..4) {
        let (n1, n2) = [(1, 2), (2, 3), (3, 4), (2, 5)][k];
        let x = z.pow(n1 as i64).unwrap();
        // A lift w would make (w/z)^{n1} = 1, so w/z is a root of unity in
        // Q(i) and (w/z)^{n2} could not be 2.
        let y = z.pow(n2 as i64).unwrap() * GaussianRational::from(2);
        prop_assert_eq!(diagonal_lift(&x, &y, n1, n2).unwrap(), Lift::NotOnDiagonal);
    }

    #[test]
    fn lift_poly_round_trip(p in poly_on(VariableLayout::single("u", 2).shared()), k in 0usize..4) {
        let (n1, n2) = [(1, 2), (2, 3), (3, 4), (2, 5)][k];
        let lifted = lift_poly(&p, n1, n2, "x", "y").unwrap();
        let back = shifted_diagonal_map(
            &TorusPoint::ones(2),
            &TorusPoint::ones(2),
            n1,
            n2,
            p.layout().clone(),
        )
        .unwrap();
        prop_assert_eq!(lifted.substitute(&back).unwrap(), p);
    }
}

mod restriction {
    use std::collections::BTreeSet;

    use proptest::prelude::*;

    use satake_isolator::demo;
    use satake_isolator::laurent::LaurentPoly;
    use satake_isolator::spectrum::{nearly_equivalent, parse_config, restrict_to_family, SpectrumConfig};

    fn config() -> SpectrumConfig {
        parse_config(demo::PGL2).unwrap()
    }

    fn poly() -> impl Strategy<Value = LaurentPoly> {
        super::poly_on(config().layout_for(["a", "b", "c"]))
    }

    proptest! {
        #![proptest_config(super::cfg())]

        #[test]
        fn restriction_is_a_ring_homomorphism(p in poly(), q in poly(), i in 0usize..2, j in 0usize..2) {
            let cfg = config();
            let sigma = &cfg.eisenstein[0];
            let w = cfg.weyl.elements();
            let r = |x: &LaurentPoly| restrict_to_family(x, &cfg, sigma, ("a", "b"), (&w[i], &w[j])).unwrap();
            prop_assert_eq!(r(&p.checked_mul(&q).unwrap()), r(&p).checked_mul(&r(&q)).unwrap());
            prop_assert_eq!(r(&p.checked_add(&q).unwrap()), r(&p).checked_add(&r(&q)).unwrap());
        }
    }

    #[test]
    fn near_equivalence_is_reflexive_and_symmetric() {
        let cfg = config();
        let none = BTreeSet::new();
        let reps: Vec<_> = std::iter::once(&cfg.target).chain(cfg.cuspidals.iter().map(|c| &c.rep)).collect();
        for a in &reps {
            assert!(nearly_equivalent(a, a, &none, &cfg));
            for b in &reps {
                assert_eq!(nearly_equivalent(a, b, &none, &cfg), nearly_equivalent(b, a, &none, &cfg));
            }
        }
    }
}
