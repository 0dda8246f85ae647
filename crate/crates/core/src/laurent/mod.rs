//! Exact multivariate Laurent polynomials over the Gaussian rationals,
//! monomial substitution, and signed-permutation group actions.
//!
//! Hecke elements and multipliers are all represented here: a spherical
//! Hecke element at a place is a Weyl-invariant polynomial in that place's
//! block of variables, and a global multiplier lives on the union layout.

mod gaussian;
mod layout;
mod poly;
mod weyl;

use thiserror::Error;

pub use gaussian::{parse_fraction, GaussianRational};
pub use layout::{Block, VariableLayout};
pub use poly::{LaurentPoly, MonomialImage, MonomialMap};
pub use weyl::{SignedPermutation, WeylGroup, WeylKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LaurentError {
    #[error("operands live on different variable layouts")]
    LayoutMismatch,
    #[error("layout error: {0}")]
    Layout(String),
    #[error("zero coordinate on the torus")]
    ZeroOnTorus,
    #[error("exponent overflow")]
    ExponentOverflow,
    #[error("invalid group: {0}")]
    Group(String),
    #[error("parse error: {0}")]
    Parse(String),
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use num_traits::{One, Zero};

    use super::*;

    fn one_var() -> Arc<VariableLayout> {
        VariableLayout::single("v", 1).shared()
    }

    fn z(layout: &Arc<VariableLayout>, k: i64) -> LaurentPoly {
        LaurentPoly::variable(layout.clone(), 0, k).unwrap()
    }

    fn c(n: i64) -> GaussianRational {
        GaussianRational::from(n)
    }

    #[test]
    fn ring_op_examples() {
        let l = one_var();
        let s = z(&l, 1).checked_add(&z(&l, -1)).unwrap();
        assert_eq!(s.checked_add(&z(&l, -1).neg()).unwrap(), z(&l, 1));
        assert_eq!(z(&l, 1).checked_mul(&z(&l, -1)).unwrap(), LaurentPoly::one(l.clone()));
        let one = LaurentPoly::one(l.clone());
        let lhs = z(&l, 1)
            .checked_add(&one)
            .unwrap()
            .checked_mul(&z(&l, 1).checked_sub(&one).unwrap())
            .unwrap();
        let rhs = z(&l, 2).checked_sub(&one).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn cancellation_leaves_no_zero_terms() {
        let l = one_var();
        let p = z(&l, 3).checked_sub(&z(&l, 3)).unwrap();
        assert!(p.is_zero());
        assert_eq!(p.num_terms(), 0);
        assert_eq!(p, LaurentPoly::zero(l));
    }

    #[test]
    fn layout_mismatch_is_an_error() {
        let a = z(&one_var(), 1);
        let b = z(&VariableLayout::single("w", 1).shared(), 1);
        assert_eq!(a.checked_add(&b), Err(LaurentError::LayoutMismatch));
        assert_eq!(a.checked_mul(&b), Err(LaurentError::LayoutMismatch));
    }

    #[test]
    fn evaluate_examples() {
        let l = one_var();
        let p = z(&l, 1).checked_add(&z(&l, -1)).unwrap();
        assert_eq!(p.evaluate(&[GaussianRational::i()]).unwrap(), GaussianRational::zero());
        assert_eq!(
            LaurentPoly::one(l.clone()).evaluate(&[c(7)]).unwrap(),
            GaussianRational::one()
        );
        let q = z(&l, 2).checked_sub(&LaurentPoly::one(l.clone())).unwrap();
        let x = GaussianRational::from_parts(3, 5, 4, 5);
        assert_eq!(
            q.evaluate(&[x]).unwrap(),
            GaussianRational::from_parts(-32, 25, 24, 25)
        );
    }

    #[test]
    fn evaluate_errors() {
        let l = one_var();
        assert_eq!(
            z(&l, 1).evaluate(&[GaussianRational::zero()]),
            Err(LaurentError::ZeroOnTorus)
        );
        assert!(matches!(
            z(&l, 1).evaluate(&[c(1), c(2)]),
            Err(LaurentError::Layout(_))
        ));
    }

    #[test]
    fn substitute_examples() {
        let l = one_var();
        let u = VariableLayout::single("u", 1).shared();
        let sq = MonomialMap::new(
            u.clone(),
            vec![MonomialImage {
                coeff: c(1),
                exponents: vec![2],
            }],
        )
        .unwrap();
        let p = z(&l, 1).checked_add(&z(&l, -1)).unwrap();
        let expect = z(&u, 2).checked_add(&z(&u, -2)).unwrap();
        assert_eq!(p.substitute(&sq).unwrap(), expect);

        let xy = VariableLayout::new(vec![
            Block {
                place: "x".into(),
                rank: 1,
            },
            Block {
                place: "y".into(),
                rank: 1,
            },
        ])
        .unwrap()
        .shared();
        let q = LaurentPoly::from_terms(xy, [(vec![-1, 1], c(1)), (vec![1, -1], c(1))]).unwrap();
        let map = MonomialMap::new(
            u.clone(),
            vec![
                MonomialImage {
                    coeff: c(1),
                    exponents: vec![2],
                },
                MonomialImage {
                    coeff: c(1),
                    exponents: vec![3],
                },
            ],
        )
        .unwrap();
        assert_eq!(
            q.substitute(&map).unwrap(),
            z(&u, 1).checked_add(&z(&u, -1)).unwrap()
        );

        let scale = MonomialMap::new(
            u.clone(),
            vec![MonomialImage {
                coeff: c(2),
                exponents: vec![1],
            }],
        )
        .unwrap();
        assert_eq!(z(&l, 1).substitute(&scale).unwrap(), z(&u, 1).scale(&c(2)));
    }

    #[test]
    fn substitute_rejects_zero_constant() {
        let u = VariableLayout::single("u", 1).shared();
        let err = MonomialMap::new(
            u,
            vec![MonomialImage {
                coeff: GaussianRational::zero(),
                exponents: vec![1],
            }],
        );
        assert_eq!(err.unwrap_err(), LaurentError::ZeroOnTorus);
    }

    #[test]
    fn exponent_overflow_is_reported() {
        let l = one_var();
        let big = z(&l, i64::MAX);
        assert_eq!(big.checked_mul(&z(&l, 1)), Err(LaurentError::ExponentOverflow));
    }

    #[test]
    fn act_examples() {
        let l = one_var();
        let inv = SignedPermutation::inversion(1);
        let p = z(&l, 1).checked_add(&z(&l, -1)).unwrap();
        assert_eq!(p.act(std::slice::from_ref(&inv)).unwrap(), p);
        assert_eq!(z(&l, 1).act(&[inv]).unwrap(), z(&l, -1));

        let l2 = VariableLayout::single("v", 2).shared();
        let m = LaurentPoly::monomial(l2.clone(), vec![2, 1], c(1)).unwrap();
        let swap = SignedPermutation::from_permutation(vec![1, 0]).unwrap();
        assert_eq!(
            m.act(&[swap]).unwrap(),
            LaurentPoly::monomial(l2, vec![1, 2], c(1)).unwrap()
        );
    }

    #[test]
    fn act_dimension_mismatch() {
        let l = one_var();
        let swap = SignedPermutation::from_permutation(vec![1, 0]).unwrap();
        assert!(matches!(z(&l, 1).act(&[swap]), Err(LaurentError::Layout(_))));
        assert!(matches!(z(&l, 1).act(&[]), Err(LaurentError::Layout(_))));
    }

    #[test]
    fn symmetrize_examples() {
        let l = one_var();
        let w = WeylGroup::inversion(1);
        let half = GaussianRational::from_ratio(1, 2);
        let expect = z(&l, 1).checked_add(&z(&l, -1)).unwrap().scale(&half);
        assert_eq!(z(&l, 1).symmetrize_uniform(&w).unwrap(), expect);
        assert!(z(&l, 1)
            .checked_add(&z(&l, -1))
            .unwrap()
            .is_invariant_uniform(&w)
            .unwrap());
        assert!(!z(&l, 1).is_invariant_uniform(&w).unwrap());
    }

    #[test]
    fn reembed_places_blocks() {
        let l = VariableLayout::single("b", 1).shared();
        let big = VariableLayout::new(vec![
            Block {
                place: "a".into(),
                rank: 2,
            },
            Block {
                place: "b".into(),
                rank: 1,
            },
        ])
        .unwrap()
        .shared();
        let p = z(&l, 3).reembed(&big).unwrap();
        assert_eq!(p.terms().next().unwrap().0, &[0, 0, 3]);
        assert_eq!(LaurentPoly::one(l.clone()).reembed(&big).unwrap(), LaurentPoly::one(big.clone()));
        assert!(p.reembed(&l).is_err());
    }

    #[test]
    fn serialization_shape() {
        let l = one_var();
        let p = z(&l, 1).checked_add(&z(&l, -1).scale(&GaussianRational::from_parts(-7, 25, 24, 25))).unwrap();
        let json = serde_json::to_value(&p).unwrap();
        assert_eq!(json["layout"][0]["place"], "v");
        assert_eq!(json["terms"][0]["exponents"][0], -1);
        assert_eq!(json["terms"][0]["re"], "-7/25");
        assert_eq!(json["terms"][0]["im"], "24/25");
        let back: LaurentPoly = serde_json::from_value(json).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn display() {
        let l = one_var();
        let p = z(&l, 1)
            .checked_add(&z(&l, -1))
            .unwrap()
            .checked_sub(&LaurentPoly::constant(l.clone(), GaussianRational::from_ratio(10, 3)))
            .unwrap();
        assert_eq!(p.to_string(), "v - 10/3 + v^-1");
    }
}
